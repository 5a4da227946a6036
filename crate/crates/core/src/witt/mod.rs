//! Truncated Witt rings `W_m(k)`.
//!
//! Two interchangeable engines compute sums, products and negatives:
//! [`Engine::Structural`] evaluates the cached structural polynomials, and
//! [`Engine::GhostLift`] runs the same integral ghost recursion on lifted digits
//! modulo `p^m`. The structural polynomials grow quickly with `p^{m−1}`, so
//! [`Engine::Auto`] uses them only for small rings.

mod lift;
pub mod structural;

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::{Field, RatFn};
use structural::StructOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Auto,
    Structural,
    GhostLift,
}

/// Largest `p^{m−1}` served by structural polynomials under [`Engine::Auto`].
pub const STRUCTURAL_LIMIT: u64 = 9;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittVector {
    digits: Vec<RatFn>,
}

impl WittVector {
    pub fn digits(&self) -> &[RatFn] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<RatFn> {
        self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|d| d.is_zero())
    }

    /// The residue `x_0`.
    pub fn res(&self) -> &RatFn {
        &self.digits[0]
    }
}

#[derive(Clone)]
pub struct WittRing {
    field: Field,
    m: usize,
    engine: Engine,
}

impl PartialEq for WittRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.m == other.m
    }
}

impl Eq for WittRing {}

impl fmt::Debug for WittRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W_{}({:?})", self.m, self.field)
    }
}

impl WittRing {
    pub fn new(field: &Field, m: usize) -> Result<Self> {
        Self::with_engine(field, m, Engine::Auto)
    }

    pub fn with_engine(field: &Field, m: usize, engine: Engine) -> Result<Self> {
        if m == 0 {
            return Err(Error::LevelError { requested: 0, available: 0 });
        }
        Ok(WittRing { field: field.clone(), m, engine })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    fn resolved_engine(&self) -> Engine {
        match self.engine {
            Engine::Auto => {
                let size = (self.p() as u64).checked_pow(self.m as u32 - 1).unwrap_or(u64::MAX);
                if size <= STRUCTURAL_LIMIT { Engine::Structural } else { Engine::GhostLift }
            }
            e => e,
        }
    }

    /// The ring of the same field with length `n`.
    pub fn with_len(&self, n: usize) -> Result<Self> {
        Self::with_engine(&self.field, n, self.engine)
    }

    pub fn check(&self, x: &WittVector) -> Result<()> {
        if x.digits.len() != self.m {
            return Err(Error::RingMismatch);
        }
        for d in &x.digits {
            self.field.validate(d).map_err(|_| Error::RingMismatch)?;
        }
        Ok(())
    }

    pub fn from_digits(&self, digits: Vec<RatFn>) -> Result<WittVector> {
        let x = WittVector { digits };
        self.check(&x)?;
        Ok(x)
    }

    pub fn parse(&self, digits: &[&str]) -> Result<WittVector> {
        let parsed = digits.iter().map(|s| self.field.parse(s)).collect::<std::result::Result<Vec<_>, _>>()?;
        self.from_digits(parsed)
    }

    pub fn format(&self, x: &WittVector) -> Vec<String> {
        x.digits.iter().map(|d| self.field.format(d)).collect()
    }

    pub fn to_json(&self, x: &WittVector) -> serde_json::Value {
        serde_json::Value::from(self.format(x))
    }

    pub fn zero(&self) -> WittVector {
        WittVector { digits: vec![self.field.zero(); self.m] }
    }

    pub fn one(&self) -> WittVector {
        self.teichmuller(&self.field.one())
    }

    /// `[α] = (α, 0, ..., 0)`.
    pub fn teichmuller(&self, alpha: &RatFn) -> WittVector {
        let mut digits = vec![self.field.zero(); self.m];
        digits[0] = alpha.clone();
        WittVector { digits }
    }

    /// The image of an integer.
    pub fn from_int(&self, n: i64) -> WittVector {
        let mut acc = self.zero();
        let mut base = self.one();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.add(&base, &base);
            }
        }
        if n < 0 { self.neg(&acc) } else { acc }
    }

    fn apply(&self, op: StructOp, x: &WittVector, y: &WittVector) -> WittVector {
        debug_assert_eq!(x.len(), self.m);
        debug_assert_eq!(y.len(), self.m);
        let k = &self.field;
        match self.resolved_engine() {
            Engine::Structural => {
                let polys = structural::reduced(self.p(), op, self.m);
                let mut args: Vec<&RatFn> = Vec::with_capacity(2 * self.m);
                let mut digits = Vec::with_capacity(self.m);
                for (n, f) in polys.iter().enumerate() {
                    args.push(&x.digits[n]);
                    args.push(&y.digits[n]);
                    digits.push(f.evaluate(k, &args));
                }
                WittVector { digits }
            }
            _ => {
                let digits = lift::ghost_lift(k, op, &x.digits, &y.digits)
                    .expect("p^m exceeds the lifting range; use a shorter ring");
                WittVector { digits }
            }
        }
    }

    pub fn add(&self, x: &WittVector, y: &WittVector) -> WittVector {
        if x.is_zero() {
            return y.clone();
        }
        if y.is_zero() {
            return x.clone();
        }
        self.apply(StructOp::Add, x, y)
    }

    pub fn neg(&self, x: &WittVector) -> WittVector {
        if self.p() != 2 {
            return WittVector { digits: x.digits.iter().map(|d| self.field.neg(d)).collect() };
        }
        if x.is_zero() {
            return x.clone();
        }
        self.apply(StructOp::Neg, x, x)
    }

    pub fn sub(&self, x: &WittVector, y: &WittVector) -> WittVector {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &WittVector, y: &WittVector) -> WittVector {
        if x.is_zero() || y.is_zero() {
            return self.zero();
        }
        if is_teichmuller(x) {
            return self.mul_teichmuller(&x.digits[0], y);
        }
        if is_teichmuller(y) {
            return self.mul_teichmuller(&y.digits[0], x);
        }
        self.apply(StructOp::Mul, x, y)
    }

    /// Checked arithmetic for external callers.
    pub fn op(&self, op: &str, x: &WittVector, y: Option<&WittVector>) -> Result<WittVector> {
        self.check(x)?;
        if let Some(y) = y {
            self.check(y)?;
        }
        let need = || y.ok_or_else(|| Error::Unsupported(format!("{op} needs two operands")));
        Ok(match op {
            "add" => self.add(x, need()?),
            "sub" => self.sub(x, need()?),
            "mul" => self.mul(x, need()?),
            "neg" => self.neg(x),
            other => return Err(Error::Unsupported(format!("unknown Witt operation {other}"))),
        })
    }

    /// Pairwise summation; keeps intermediate digits balanced in size.
    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a WittVector>) -> WittVector {
        let mut layer: Vec<WittVector> = items.into_iter().filter(|x| !x.is_zero()).cloned().collect();
        while layer.len() > 1 {
            layer = layer
                .chunks(2)
                .map(|c| if c.len() == 2 { self.add(&c[0], &c[1]) } else { c[0].clone() })
                .collect();
        }
        layer.pop().unwrap_or_else(|| self.zero())
    }

    pub fn pow(&self, x: &WittVector, mut e: u64) -> WittVector {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `[c]·x = (c x_0, c^p x_1, c^{p^2} x_2, ...)`.
    pub fn mul_teichmuller(&self, c: &RatFn, x: &WittVector) -> WittVector {
        let k = &self.field;
        let digits = x.digits.iter().enumerate().map(|(i, d)| k.mul(&k.frobenius_pow(c, i as u32), d)).collect();
        WittVector { digits }
    }

    /// `V(x) = (0, x_0, ..., x_{m−2})`.
    pub fn verschiebung(&self, x: &WittVector) -> WittVector {
        let mut digits = Vec::with_capacity(self.m);
        digits.push(self.field.zero());
        digits.extend(x.digits[..self.m - 1].iter().cloned());
        WittVector { digits }
    }

    /// `F(x) = (x_0^p, ..., x_{m−1}^p)`.
    pub fn frobenius(&self, x: &WittVector) -> WittVector {
        self.frobenius_pow(x, 1)
    }

    pub fn frobenius_pow(&self, x: &WittVector, k: u32) -> WittVector {
        WittVector { digits: x.digits.iter().map(|d| self.field.frobenius_pow(d, k)).collect() }
    }

    /// `p·x = V(F(x))`.
    pub fn times_p(&self, x: &WittVector) -> WittVector {
        self.verschiebung(&self.frobenius(x))
    }

    /// `p^j·x`.
    pub fn times_p_pow(&self, x: &WittVector, j: usize) -> WittVector {
        if j >= self.m {
            return self.zero();
        }
        let mut digits = vec![self.field.zero(); j];
        digits.extend(x.digits[..self.m - j].iter().map(|d| self.field.frobenius_pow(d, j as u32)));
        WittVector { digits }
    }

    /// The first `n` digits, a ring map `W_m → W_n`.
    pub fn truncate(&self, x: &WittVector, n: usize) -> Result<WittVector> {
        if n > x.len() {
            return Err(Error::LevelError { requested: n as u32, available: x.len() as u32 });
        }
        if n == 0 {
            return Err(Error::LevelError { requested: 0, available: x.len() as u32 });
        }
        Ok(WittVector { digits: x.digits[..n].to_vec() })
    }

    /// The unique `b` of length `m−1` with `p·b ≡ x`, when it exists.
    ///
    /// `p·(b_0, ..., b_{m−1}) = (0, b_0^p, ..., b_{m−2}^p)`, so `x` is divisible iff
    /// `x_0 = 0` and every other digit is a p-th power. The top digit of a full-length
    /// quotient is not determined by `x`; it is dropped.
    pub fn div_by_p(&self, x: &WittVector) -> Result<WittVector> {
        if self.m < 2 {
            return Err(Error::LevelError { requested: 1, available: 0 });
        }
        if !x.digits[0].is_zero() {
            return Err(Error::NotDivisible);
        }
        let digits = x.digits[1..]
            .iter()
            .map(|d| self.field.pth_root(d).ok_or(Error::NotDivisible))
            .collect::<Result<Vec<_>>>()?;
        Ok(WittVector { digits })
    }

    /// Extends by zero digits to length `n ≥ m`; a set map, not a ring map.
    pub fn pad(&self, x: &WittVector, n: usize) -> WittVector {
        let mut digits = x.digits.clone();
        digits.resize(n.max(x.len()), self.field.zero());
        WittVector { digits }
    }

    pub fn is_unit(&self, x: &WittVector) -> bool {
        !x.digits[0].is_zero()
    }

    /// Multiplicative inverse of a unit, by Newton iteration from `[x_0^{-1}]`.
    pub fn inv(&self, x: &WittVector) -> Result<WittVector> {
        if !self.is_unit(x) {
            return Err(Error::DivisionByZero);
        }
        let k = &self.field;
        let mut y = self.teichmuller(&k.inv(&x.digits[0])?);
        let two = self.from_int(2);
        let mut precision = 1;
        while precision < self.m {
            let xy = self.mul(x, &y);
            y = self.mul(&y, &self.sub(&two, &xy));
            precision *= 2;
        }
        Ok(y)
    }

    /// Random vector with digits from [`Field::random`].
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: u32, max_terms: usize, fractions: bool) -> WittVector {
        WittVector { digits: (0..self.m).map(|_| self.field.random(rng, max_deg, max_terms, fractions)).collect() }
    }
}

fn is_teichmuller(x: &WittVector) -> bool {
    x.digits[1..].iter().all(|d| d.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u32, d: usize, r: usize, m: usize) -> WittRing {
        WittRing::new(&Field::new(p, d, r).unwrap(), m).unwrap()
    }

    #[test]
    fn small_sums_and_products() {
        let w = ring(2, 1, 0, 2);
        let one = w.parse(&["1", "0"]).unwrap();
        assert_eq!(w.format(&w.add(&one, &one)), ["0", "1"]);
        assert_eq!(w.format(&w.times_p(&one)), ["0", "1"]);

        let w3 = ring(3, 1, 0, 2);
        let two = w3.parse(&["2", "0"]).unwrap();
        // [2]^2 = [4] = [1]
        assert_eq!(w3.format(&w3.mul(&two, &two)), ["1", "0"]);
        let x = w3.parse(&["2", "1"]).unwrap();
        assert_eq!(w3.add(&x, &w3.zero()), x);
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let w = ring(2, 2, 0, 2);
        let k = w.field().clone();
        let om = k.generator().unwrap();
        let om2 = k.mul(&om, &om);
        let prod = w.mul(&w.teichmuller(&om), &w.teichmuller(&om2));
        assert_eq!(prod, w.one());
        let w = ring(2, 1, 1, 2);
        assert_eq!(w.format(&w.teichmuller(&w.field().var(0))), ["t", "0"]);
    }

    #[test]
    fn shift_and_frobenius() {
        let w = ring(2, 1, 1, 2);
        let x = w.parse(&["t", "1"]).unwrap();
        assert_eq!(w.format(&w.verschiebung(&x)), ["0", "t"]);
        assert_eq!(w.format(&w.frobenius(&x)), ["t^2", "1"]);
    }

    #[test]
    fn truncation_and_division() {
        let w = ring(2, 1, 1, 3);
        let x = w.parse(&["t", "1", "0"]).unwrap();
        assert_eq!(w.format(&w.truncate(&x, 2).unwrap()), ["t", "1"]);
        assert!(w.truncate(&x, 4).is_err());
        let w2 = ring(2, 1, 0, 2);
        let x = w2.parse(&["0", "1"]).unwrap();
        assert_eq!(w2.format(&w2.div_by_p(&x).unwrap()), ["1"]);
        let wt = ring(2, 1, 1, 2);
        assert_eq!(wt.div_by_p(&wt.parse(&["0", "t"]).unwrap()), Err(Error::NotDivisible));
        assert_eq!(wt.format(&wt.div_by_p(&wt.zero()).unwrap()), ["0"]);
    }

    #[test]
    fn engines_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, d, r, m) in [(2, 1, 1, 3), (2, 1, 1, 4), (3, 1, 1, 3), (2, 2, 1, 3), (3, 1, 2, 2), (2, 1, 0, 4), (5, 1, 0, 2)] {
            let k = Field::new(p, d, r).unwrap();
            let a = WittRing::with_engine(&k, m, Engine::Structural).unwrap();
            let b = WittRing::with_engine(&k, m, Engine::GhostLift).unwrap();
            for _ in 0..10 {
                let x = a.random(&mut rng, 2, 2, true);
                let y = a.random(&mut rng, 2, 2, true);
                assert_eq!(a.apply(StructOp::Add, &x, &y), b.apply(StructOp::Add, &x, &y), "add {p} {m}");
                assert_eq!(a.apply(StructOp::Mul, &x, &y), b.apply(StructOp::Mul, &x, &y), "mul {p} {m}");
                assert_eq!(a.apply(StructOp::Neg, &x, &x), b.apply(StructOp::Neg, &x, &x), "neg {p} {m}");
            }
        }
    }

    #[test]
    fn inverse_and_negation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, r, m) in [(2, 1, 3), (3, 1, 2), (2, 0, 5)] {
            let w = ring(p, 1, r, m);
            for _ in 0..5 {
                let x = w.random(&mut rng, 2, 2, true);
                assert!(w.add(&x, &w.neg(&x)).is_zero());
                if w.is_unit(&x) {
                    assert_eq!(w.mul(&x, &w.inv(&x).unwrap()), w.one());
                }
            }
        }
    }

    #[test]
    fn integers_match_residues() {
        let w = ring(3, 1, 0, 3);
        // 26 = -1 mod 27
        assert_eq!(w.from_int(26), w.neg(&w.one()));
        assert_eq!(w.from_int(27), w.zero());
    }
}
