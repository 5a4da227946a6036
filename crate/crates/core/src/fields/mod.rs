//! Exact arithmetic in `F_{p^d}(t1, ..., tr)`.
//!
//! A [`Field`] is a cheap shared handle. Values are plain [`RatFn`] data and every
//! operation goes through the field, so the hot paths carry no per-element pointers.
//! [`FieldElement`] pairs a value with its field for checked, self-describing use.

mod gf;
mod hom;
mod poly;
mod text;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::smallvec;

use crate::error::FieldError;

pub use gf::{default_modulus, is_prime, Gf, MAX_EXTENSION_SIZE};
pub use hom::FieldHom;
pub use poly::{gcd, grlex, Mono, Poly};

/// Serialized shape of a field: `{"p":..,"d":..,"modulus":..,"r":..}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    #[serde(default = "one")]
    pub d: usize,
    #[serde(default)]
    pub modulus: Option<Vec<u32>>,
    #[serde(default)]
    pub r: usize,
}

fn one() -> usize {
    1
}

impl FieldDescriptor {
    pub fn new(p: u32, d: usize, r: usize) -> Self {
        FieldDescriptor { p, d, modulus: None, r }
    }
}

/// A reduced fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value lies in the coefficient field.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }
}

struct Inner {
    gf: Gf,
    r: usize,
}

#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.gf == other.0.gf && self.0.r == other.0.r)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p(), self.degree())?;
        if self.r() > 0 {
            write!(f, "({})", (1..=self.r()).map(|i| self.var_name(i - 1)).collect::<Vec<_>>().join(","))?;
        }
        Ok(())
    }
}

impl Field {
    pub fn new(p: u32, d: usize, r: usize) -> Result<Self, FieldError> {
        Self::from_descriptor(&FieldDescriptor::new(p, d, r))
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<Self, FieldError> {
        let gf = Gf::new(desc.p, desc.d, desc.modulus.clone())?;
        Ok(Field(Arc::new(Inner { gf, r: desc.r })))
    }

    /// Same coefficient field, different number of variables.
    pub fn with_vars(&self, r: usize) -> Self {
        Field(Arc::new(Inner { gf: self.0.gf.clone(), r }))
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p(),
            d: self.degree(),
            modulus: if self.degree() > 1 { Some(self.gf().modulus().to_vec()) } else { None },
            r: self.r(),
        }
    }

    pub fn gf(&self) -> &Gf {
        &self.0.gf
    }

    pub fn p(&self) -> u32 {
        self.0.gf.p()
    }

    pub fn degree(&self) -> usize {
        self.0.gf.degree()
    }

    pub fn r(&self) -> usize {
        self.0.r
    }

    /// `r == 0`: a finite field, hence perfect.
    pub fn is_perfect(&self) -> bool {
        self.r() == 0
    }

    pub fn zero(&self) -> RatFn {
        RatFn { num: Poly::zero(self.r()), den: Poly::one(self.r()) }
    }

    pub fn one(&self) -> RatFn {
        self.constant(1)
    }

    pub fn constant(&self, c: u32) -> RatFn {
        RatFn { num: Poly::constant(self.r(), c), den: Poly::one(self.r()) }
    }

    pub fn from_int(&self, n: i64) -> RatFn {
        self.constant(self.gf().from_int(n))
    }

    /// The variable `t_{i+1}`.
    pub fn var(&self, i: usize) -> RatFn {
        assert!(i < self.r(), "variable index {i} out of range");
        RatFn { num: Poly::var(self.r(), i), den: Poly::one(self.r()) }
    }

    pub fn vars(&self) -> Vec<RatFn> {
        (0..self.r()).map(|i| self.var(i)).collect()
    }

    /// The generator `w` of `F_{p^d}` over `F_p`, when `d > 1`.
    pub fn generator(&self) -> Option<RatFn> {
        self.gf().generator().map(|g| self.constant(g))
    }

    pub fn monomial(&self, exps: &[u32]) -> RatFn {
        RatFn { num: Poly::monomial(exps.iter().copied().collect(), 1), den: Poly::one(self.r()) }
    }

    pub fn from_poly(&self, num: Poly) -> RatFn {
        RatFn { num, den: Poly::one(self.r()) }
    }

    /// Builds `num / den` in canonical form.
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<RatFn, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.normalize(num, den))
    }

    fn normalize(&self, num: Poly, den: Poly) -> RatFn {
        let gf = self.gf();
        if num.is_zero() {
            return self.zero();
        }
        if den.is_constant() {
            let c = gf.inv(den.constant_value());
            return RatFn { num: num.scale(gf, c), den: Poly::one(self.r()) };
        }
        let g = gcd(gf, &num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(gf, &g).unwrap(), den.div_exact(gf, &g).unwrap())
        };
        let c = gf.inv(den.lc());
        RatFn { num: num.scale(gf, c), den: den.scale(gf, c) }
    }

    pub fn add(&self, a: &RatFn, b: &RatFn) -> RatFn {
        let gf = self.gf();
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            let num = a.num.add(gf, &b.num);
            if a.den.is_one() {
                return RatFn { num, den: a.den.clone() };
            }
            return self.normalize(num, a.den.clone());
        }
        let g = gcd(gf, &a.den, &b.den);
        let (ad, bd) = if g.is_one() {
            (a.den.clone(), b.den.clone())
        } else {
            (a.den.div_exact(gf, &g).unwrap(), b.den.div_exact(gf, &g).unwrap())
        };
        let num = a.num.mul(gf, &bd).add(gf, &b.num.mul(gf, &ad));
        let den = a.den.mul(gf, &bd);
        self.normalize(num, den)
    }

    pub fn neg(&self, a: &RatFn) -> RatFn {
        RatFn { num: a.num.neg(self.gf()), den: a.den.clone() }
    }

    pub fn sub(&self, a: &RatFn, b: &RatFn) -> RatFn {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RatFn, b: &RatFn) -> RatFn {
        let gf = self.gf();
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        if a.den.is_one() && b.den.is_one() {
            return RatFn { num: a.num.mul(gf, &b.num), den: a.den.clone() };
        }
        let cancel = |n: &Poly, d: &Poly| -> (Poly, Poly) {
            let g = gcd(gf, n, d);
            if g.is_one() {
                (n.clone(), d.clone())
            } else {
                (n.div_exact(gf, &g).unwrap(), d.div_exact(gf, &g).unwrap())
            }
        };
        let (an, bd) = cancel(&a.num, &b.den);
        let (bn, ad) = cancel(&b.num, &a.den);
        let num = an.mul(gf, &bn);
        let den = ad.mul(gf, &bd);
        let c = gf.inv(den.lc());
        RatFn { num: num.scale(gf, c), den: den.scale(gf, c) }
    }

    pub fn square(&self, a: &RatFn) -> RatFn {
        self.mul(a, a)
    }

    pub fn inv(&self, a: &RatFn) -> Result<RatFn, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let c = self.gf().inv(a.num.lc());
        Ok(RatFn { num: a.den.scale(self.gf(), c), den: a.num.scale(self.gf(), c) })
    }

    pub fn div(&self, a: &RatFn, b: &RatFn) -> Result<RatFn, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &RatFn, e: u64) -> RatFn {
        let gf = self.gf();
        if e == 0 {
            return self.one();
        }
        if a.is_zero() {
            return self.zero();
        }
        // powers of a reduced fraction stay reduced; the denominator stays monic
        RatFn { num: a.num.pow(gf, e), den: a.den.pow(gf, e) }
    }

    /// Integer power, negative exponents allowed.
    pub fn powi(&self, a: &RatFn, e: i64) -> Result<RatFn, FieldError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    pub fn frobenius(&self, a: &RatFn) -> RatFn {
        self.frobenius_pow(a, 1)
    }

    /// `a^{p^k}`.
    pub fn frobenius_pow(&self, a: &RatFn, k: u32) -> RatFn {
        if k == 0 {
            return a.clone();
        }
        let gf = self.gf();
        RatFn { num: a.num.frobenius_pow(gf, k), den: a.den.frobenius_pow(gf, k) }
    }

    /// The unique `b` with `b^p = a`, or `None` when `a` is not a p-th power.
    pub fn pth_root(&self, a: &RatFn) -> Option<RatFn> {
        let gf = self.gf();
        Some(RatFn { num: a.num.pth_root(gf)?, den: a.den.pth_root(gf)? })
    }

    /// `k`-fold p-th root.
    pub fn pth_root_iter(&self, a: &RatFn, k: u32) -> Option<RatFn> {
        let mut x = a.clone();
        for _ in 0..k {
            x = self.pth_root(&x)?;
        }
        Some(x)
    }

    /// `a` lies in `k^{p^k}`.
    pub fn is_pth_power_iter(&self, a: &RatFn, k: u32) -> bool {
        self.pth_root_iter(a, k).is_some()
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a RatFn>) -> RatFn {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a RatFn>) -> RatFn {
        items.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }

    /// Checks that a value is well formed for this field.
    pub fn validate(&self, a: &RatFn) -> Result<(), FieldError> {
        let ok_poly = |p: &Poly| {
            p.nvars() == self.r()
                && p.terms().iter().all(|(m, c)| m.len() == self.r() && *c != 0 && *c < self.gf().size())
        };
        if !ok_poly(&a.num) || !ok_poly(&a.den) || a.den.lc() != 1 {
            return Err(FieldError::FieldMismatch);
        }
        Ok(())
    }

    /// A random element: numerator and denominator of total degree at most `max_deg`
    /// with up to `max_terms` terms each. The denominator is 1 unless `fractions`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: u32, max_terms: usize, fractions: bool) -> RatFn {
        let num = self.random_poly(rng, max_deg, max_terms);
        if !fractions || self.r() == 0 {
            return self.from_poly(num);
        }
        loop {
            let den = self.random_poly(rng, max_deg, max_terms);
            if !den.is_zero() {
                return self.normalize(num, den);
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: u32, max_terms: usize, fractions: bool) -> RatFn {
        loop {
            let x = self.random(rng, max_deg, max_terms, fractions);
            if !x.is_zero() {
                return x;
            }
        }
    }

    pub fn random_poly<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: u32, max_terms: usize) -> Poly {
        let r = self.r();
        let q = self.gf().size();
        let n = rng.gen_range(0..=max_terms.max(1));
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let mut m: Mono = smallvec![0; r];
            if r > 0 {
                let deg = rng.gen_range(0..=max_deg);
                for _ in 0..deg {
                    m[rng.gen_range(0..r)] += 1;
                }
            }
            terms.push((m, rng.gen_range(1..q)));
        }
        Poly::from_terms(self.gf(), r, terms)
    }

    pub fn var_name(&self, i: usize) -> String {
        if self.r() == 1 {
            "t".to_string()
        } else {
            format!("t{}", i + 1)
        }
    }

    pub fn format(&self, a: &RatFn) -> String {
        text::format(self, a)
    }

    pub fn parse(&self, s: &str) -> Result<RatFn, FieldError> {
        text::parse(self, s)
    }

    pub fn element(&self, value: RatFn) -> FieldElement {
        FieldElement { field: self.clone(), value }
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        Ok(self.element(self.parse(s)?))
    }
}

/// A value together with its field; arithmetic checks that fields agree.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: RatFn,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(&self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(&self.value))
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> &RatFn {
        &self.value
    }

    pub fn into_value(self) -> RatFn {
        self.value
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.add(&self.value, &other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.sub(&self.value, &other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.mul(&self.value, &other.value)))
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.field.element(self.field.div(&self.value, &other.value)?))
    }

    pub fn neg(&self) -> Self {
        self.field.element(self.field.neg(&self.value))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.field.element(self.field.pow(&self.value, e))
    }

    pub fn frobenius(&self) -> Self {
        self.field.element(self.field.frobenius(&self.value))
    }

    pub fn pth_root(&self) -> Option<Self> {
        self.field.pth_root(&self.value).map(|v| self.field.element(v))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}
