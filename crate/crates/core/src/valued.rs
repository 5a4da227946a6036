//! Finite-precision model of the unramified valued field `K = Frac(C[k])`.
//!
//! A nonzero element is `p^val · unit` with `unit` a member of `C_M(k)` of nonzero
//! residue, known modulo `p^{val+M}`; the precision `M` is the unit's length.

use rand::Rng;

use crate::cohen::CohenRingModel;
use crate::error::{Error, Result};
use crate::witt::{WittRing, WittVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedElement {
    val: Option<i64>,
    unit: WittVector,
    precision: usize,
}

impl ValuedElement {
    /// `None` for zero.
    pub fn val(&self) -> Option<i64> {
        self.val
    }

    pub fn unit(&self) -> Option<&WittVector> {
        self.val.map(|_| &self.unit)
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }
}

/// `K` together with the top Cohen–Witt model `C_M(k)` carrying units.
#[derive(Clone, Debug)]
pub struct ValuedField {
    model: CohenRingModel,
}

impl ValuedField {
    pub fn new(model: CohenRingModel) -> Self {
        ValuedField { model }
    }

    pub fn model(&self) -> &CohenRingModel {
        &self.model
    }

    pub fn precision(&self) -> usize {
        self.model.len()
    }

    fn ring(&self, n: usize) -> WittRing {
        self.model.ring().with_len(n).expect("length within the top model")
    }

    fn level(&self, n: usize) -> CohenRingModel {
        self.model.truncated(n).expect("length within the top model")
    }

    pub fn zero(&self) -> ValuedElement {
        let m = self.precision();
        ValuedElement { val: None, unit: self.ring(m).zero(), precision: m }
    }

    pub fn one(&self) -> ValuedElement {
        self.from_int(1)
    }

    /// The uniformizer.
    pub fn p(&self) -> ValuedElement {
        self.from_int(self.model.p() as i64)
    }

    pub fn from_int(&self, n: i64) -> ValuedElement {
        if n == 0 {
            return self.zero();
        }
        let p = self.model.p() as i64;
        let (mut n, mut val) = (n, 0);
        while n % p == 0 {
            n /= p;
            val += 1;
        }
        let m = self.precision();
        ValuedElement { val: Some(val), unit: self.ring(m).from_int(n), precision: m }
    }

    /// `p^val · unit`; the unit must be a member with nonzero residue.
    pub fn from_unit(&self, val: i64, unit: WittVector) -> Result<ValuedElement> {
        let n = unit.len();
        if n == 0 || n > self.precision() {
            return Err(Error::PrecisionError { requested: n, available: self.precision() });
        }
        if unit.res().is_zero() {
            return Err(Error::InvalidModel("a unit needs a nonzero residue".into()));
        }
        if !self.level(n).is_member(&unit) {
            return Err(Error::NotMember);
        }
        Ok(ValuedElement { val: Some(val), unit, precision: n })
    }

    /// An element of `C_n(k)`, read as an integral element known modulo `p^n`.
    /// Leading zero digits reduce the precision of the unit.
    pub fn from_integral(&self, x: &WittVector) -> Result<ValuedElement> {
        let n = x.len();
        let model = self.level(n);
        let digits = model.digitize(x)?;
        let Some(j) = digits.0.iter().position(|d| !d.is_zero()) else {
            return Ok(ValuedElement { val: None, unit: x.clone(), precision: n });
        };
        Ok(ValuedElement { val: Some(j as i64), unit: self.strip_p(x, j), precision: n - j })
    }

    /// `x / p^j` for `x` with `j` leading zero Cohen digits.
    fn strip_p(&self, x: &WittVector, j: usize) -> WittVector {
        let mut cur = x.clone();
        for _ in 0..j {
            cur = self.ring(cur.len()).div_by_p(&cur).expect("leading Cohen digits vanish");
        }
        cur
    }

    fn truncated_unit(&self, x: &ValuedElement, n: usize) -> WittVector {
        self.ring(x.precision).truncate(&x.unit, n).expect("n within precision")
    }

    pub fn mul(&self, x: &ValuedElement, y: &ValuedElement) -> ValuedElement {
        let n = x.precision.min(y.precision);
        match (x.val, y.val) {
            (Some(a), Some(b)) => {
                let unit = self.ring(n).mul(&self.truncated_unit(x, n), &self.truncated_unit(y, n));
                ValuedElement { val: Some(a + b), unit, precision: n }
            }
            _ => ValuedElement { val: None, unit: self.ring(n).zero(), precision: n },
        }
    }

    pub fn inv(&self, x: &ValuedElement) -> Result<ValuedElement> {
        let a = x.val.ok_or(Error::DivisionByZero)?;
        let unit = self.ring(x.precision).inv(&x.unit)?;
        Ok(ValuedElement { val: Some(-a), unit, precision: x.precision })
    }

    pub fn div(&self, x: &ValuedElement, y: &ValuedElement) -> Result<ValuedElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn neg(&self, x: &ValuedElement) -> ValuedElement {
        ValuedElement { val: x.val, unit: self.ring(x.precision).neg(&x.unit), precision: x.precision }
    }

    /// Sum with precision tracking: cancellation of `j` leading digits costs `j` digits.
    pub fn add(&self, x: &ValuedElement, y: &ValuedElement) -> Result<ValuedElement> {
        let (a, b) = match (x.val, y.val) {
            (None, _) => return Ok(y.clone()),
            (_, None) => return Ok(x.clone()),
            (Some(a), Some(b)) => (a, b),
        };
        let (lo, hi, a, b) = if a <= b { (x, y, a, b) } else { (y, x, b, a) };
        let gap = (b - a) as usize;
        // Known modulo p^{a + n}.
        let n = lo.precision.min(hi.precision.saturating_add(gap));
        if gap >= n {
            return Ok(ValuedElement { val: Some(a), unit: self.truncated_unit(lo, n), precision: n });
        }
        let ring = self.ring(n);
        let shifted = ring.times_p_pow(&self.truncated_unit(hi, n - gap), gap);
        let z = ring.add(&self.truncated_unit(lo, n), &shifted);
        if z.is_zero() {
            return Ok(ValuedElement { val: None, unit: z, precision: n });
        }
        let digits = self.level(n).digitize(&z)?;
        let j = digits.0.iter().position(|d| !d.is_zero()).ok_or(Error::PrecisionExhausted)?;
        Ok(ValuedElement { val: Some(a + j as i64), unit: self.strip_p(&z, j), precision: n - j })
    }

    pub fn sub(&self, x: &ValuedElement, y: &ValuedElement) -> Result<ValuedElement> {
        self.add(x, &self.neg(y))
    }

    /// `op` is one of `add`, `sub`, `mul`, `div`.
    pub fn arith(&self, op: &str, x: &ValuedElement, y: &ValuedElement) -> Result<ValuedElement> {
        match op {
            "add" => self.add(x, y),
            "sub" => self.sub(x, y),
            "mul" => Ok(self.mul(x, y)),
            "div" => self.div(x, y),
            _ => Err(Error::Unsupported(format!("valued operation {op}"))),
        }
    }

    /// `r_n(x) ∈ C_n(k) = 𝒪/(p^n)`.
    pub fn residue(&self, x: &ValuedElement, n: usize) -> Result<WittVector> {
        self.check_level(n)?;
        let ring = self.ring(n);
        let Some(v) = x.val else { return Ok(ring.zero()) };
        if v < 0 {
            return Err(Error::NotIntegral);
        }
        let v = v as usize;
        if v >= n {
            return Ok(ring.zero());
        }
        if n - v > x.precision {
            return Err(Error::PrecisionError { requested: n - v, available: x.precision });
        }
        Ok(ring.times_p_pow(&self.truncated_unit(x, n - v), v))
    }

    /// `ac_n(x) = r_n(x·p^{−v(x)})`, the first `n` digits of the unit.
    pub fn ac(&self, x: &ValuedElement, n: usize) -> Result<WittVector> {
        self.check_level(n)?;
        if x.is_zero() {
            return Ok(self.ring(n).zero());
        }
        if n > x.precision {
            return Err(Error::PrecisionError { requested: n, available: x.precision });
        }
        Ok(self.truncated_unit(x, n))
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.precision() {
            return Err(Error::PrecisionError { requested: n, available: self.precision() });
        }
        Ok(())
    }

    /// Random nonzero element with `|val| ≤ max_val` and a random full-precision unit.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_val: i64, max_deg: u32) -> ValuedElement {
        let val = rng.gen_range(-max_val..=max_val);
        loop {
            let unit = self.model.random_member(rng, max_deg, 2);
            if !unit.res().is_zero() {
                return ValuedElement { val: Some(val), unit, precision: self.precision() };
            }
        }
    }

    pub fn to_json(&self, x: &ValuedElement) -> serde_json::Value {
        let ring = self.ring(x.precision);
        serde_json::json!({
            "val": x.val.map(serde_json::Value::from).unwrap_or_else(|| "inf".into()),
            "unit": if x.is_zero() { serde_json::json!([]) } else { ring.to_json(&x.unit) },
            "precision": x.precision,
        })
    }

    pub fn from_json(&self, value: &serde_json::Value) -> Result<ValuedElement> {
        let bad = |what: &str| Error::Syntax(format!("valued element: {what}"));
        let precision = match value.get("precision") {
            Some(p) => p.as_u64().ok_or_else(|| bad("precision must be a positive integer"))? as usize,
            None => self.precision(),
        };
        match value.get("val") {
            Some(serde_json::Value::String(s)) if s == "inf" => {
                if precision == 0 || precision > self.precision() {
                    return Err(Error::PrecisionError { requested: precision, available: self.precision() });
                }
                Ok(ValuedElement { val: None, unit: self.ring(precision).zero(), precision })
            }
            Some(v) => {
                let val = v.as_i64().ok_or_else(|| bad("val must be an integer or \"inf\""))?;
                let digits = value
                    .get("unit")
                    .and_then(|u| u.as_array())
                    .ok_or_else(|| bad("unit must be an array of digits"))?
                    .iter()
                    .map(|d| d.as_str().ok_or_else(|| bad("digits must be strings")))
                    .collect::<Result<Vec<_>>>()?;
                if digits.len() != precision {
                    return Err(bad("unit length must equal the precision"));
                }
                let unit = self.ring(precision.clamp(1, self.precision())).parse(&digits)?;
                self.from_unit(val, unit)
            }
            None => Err(bad("missing val")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Field;

    fn field(m: usize) -> ValuedField {
        ValuedField::new(CohenRingModel::standard(&Field::new(2, 1, 1).unwrap(), m).unwrap())
    }

    #[test]
    fn valuation_examples() {
        let kf = field(3);
        let one = kf.one();
        let p = kf.p();
        let x = ValuedElement { val: Some(1), ..one.clone() };
        let y = ValuedElement { val: Some(2), ..one.clone() };
        assert_eq!(kf.mul(&x, &y).val(), Some(3));
        assert_eq!(kf.add(&p, &p).unwrap().val(), Some(2));
        let two_p = kf.add(&p, &p).unwrap();
        assert_eq!((two_p.val(), two_p.precision()), (Some(2), 2));
        assert_eq!(two_p.unit().unwrap(), &kf.model().ring().with_len(2).unwrap().one());
        assert!(kf.sub(&x, &x).unwrap().is_zero());
        assert_eq!(kf.div(&one, &kf.zero()), Err(Error::DivisionByZero));
        assert_eq!(kf.from_int(12).val(), Some(2));
        let third = kf.inv(&kf.from_int(3)).unwrap();
        assert_eq!(kf.mul(&third, &kf.from_int(3)), one);
    }

    #[test]
    fn residue_and_ac_examples() {
        let kf = field(2);
        let ring = kf.model().ring().clone();
        let u = kf.from_unit(0, ring.parse(&["t", "1"]).unwrap()).unwrap();
        assert_eq!(kf.residue(&u, 1).unwrap().res(), &kf.model().field().var(0));
        assert_eq!(ring.format(&kf.residue(&kf.p(), 2).unwrap()), ["0", "1"]);
        let small = ValuedElement { val: Some(-1), ..u.clone() };
        assert_eq!(kf.residue(&small, 1), Err(Error::NotIntegral));
        assert_eq!(kf.ac(&kf.p(), 2).unwrap(), ring.one());
        assert!(kf.ac(&kf.zero(), 2).unwrap().is_zero());
        let big = ValuedElement { val: Some(2), ..u.clone() };
        assert_eq!(kf.ac(&big, 1).unwrap().res(), u.unit().unwrap().res());
        assert!(matches!(kf.ac(&u, 3), Err(Error::PrecisionError { .. })));
    }

    #[test]
    fn cancellation_costs_precision() {
        let kf = field(3);
        let ring = kf.model().ring().clone();
        let a = kf.from_unit(0, ring.from_int(1)).unwrap();
        let b = kf.from_unit(0, ring.from_int(3)).unwrap();
        let d = kf.sub(&b, &a).unwrap();
        assert_eq!((d.val(), d.precision()), (Some(1), 2));
        let integral = kf.from_integral(&ring.from_int(2)).unwrap();
        assert_eq!((integral.val(), integral.precision()), (Some(1), 2));
    }

    #[test]
    fn json_roundtrip() {
        let kf = field(2);
        for x in [kf.zero(), kf.p(), kf.inv(&kf.p()).unwrap()] {
            assert_eq!(kf.from_json(&kf.to_json(&x)).unwrap(), x);
        }
        assert_eq!(kf.to_json(&kf.p())["val"], 1);
        assert_eq!(kf.to_json(&kf.zero())["val"], "inf");
    }
}
