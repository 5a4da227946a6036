//! Sparse multivariate polynomials over `F_{p^d}`.
//!
//! Terms are kept sorted ascending under graded-lex order (total degree first, then
//! lexicographic with `t1 > t2 > ...`), with no zero coefficients. Every monomial has
//! the same number of exponent slots. Operations take the coefficient field explicitly.

use std::cmp::Ordering;

use smallvec::{smallvec, SmallVec};

use super::gf::Gf;

pub type Mono = SmallVec<[u32; 4]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Mono, u32)>,
}

pub fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: u32) -> Self {
        if c == 0 {
            Self::zero(nvars)
        } else {
            Poly { nvars, terms: vec![(smallvec![0; nvars], c)] }
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m: Mono = smallvec![0; nvars];
        m[i] = 1;
        Poly { nvars, terms: vec![(m, 1)] }
    }

    pub fn monomial(mono: Mono, c: u32) -> Self {
        let nvars = mono.len();
        if c == 0 {
            Self::zero(nvars)
        } else {
            Poly { nvars, terms: vec![(mono, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(gf: &Gf, nvars: usize, mut terms: Vec<(Mono, u32)>) -> Self {
        terms.sort_unstable_by(|a, b| grlex(&a.0, &b.0));
        let mut out: Vec<(Mono, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = gf.add(*lc, c),
                _ => out.push((m, c)),
            }
            if matches!(out.last(), Some((_, 0))) {
                out.pop();
            }
        }
        Poly { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value() == 1
    }

    /// Value of a constant polynomial (0 for the zero polynomial).
    pub fn constant_value(&self) -> u32 {
        match self.terms.first() {
            Some((m, c)) if m.iter().all(|&e| e == 0) => *c,
            _ => 0,
        }
    }

    pub fn leading(&self) -> Option<(&Mono, u32)> {
        self.terms.last().map(|(m, c)| (m, *c))
    }

    pub fn lc(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.1)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.iter().map(|(m, _)| m.iter().map(|&e| e as u64).sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[v]).max().unwrap_or(0)
    }

    /// Highest variable index that occurs, if any.
    fn top_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.terms.iter().any(|(m, _)| m[v] > 0))
    }

    /// `Some(v)` when only variable `v` occurs; `Some(None)` for constants.
    fn single_var(&self) -> Option<Option<usize>> {
        let mut found = None;
        for (m, _) in &self.terms {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    match found {
                        None => found = Some(i),
                        Some(j) if j != i => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(found)
    }

    pub fn neg(&self, gf: &Gf) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), gf.neg(*c))).collect(),
        }
    }

    pub fn scale(&self, gf: &Gf, c: u32) -> Self {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        if c == 1 {
            return self.clone();
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), gf.mul(*x, c))).collect(),
        }
    }

    fn combine(&self, gf: &Gf, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let sgn = |c: u32| if negate { gf.neg(c) } else { c };
        while i < a.len() && j < b.len() {
            match grlex(&a[i].0, &b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), sgn(b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = gf.add(a[i].1, sgn(b[j].1));
                    if c != 0 {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sgn(*c))));
        Poly { nvars: self.nvars, terms: out }
    }

    pub fn add(&self, gf: &Gf, other: &Self) -> Self {
        self.combine(gf, other, false)
    }

    pub fn sub(&self, gf: &Gf, other: &Self) -> Self {
        self.combine(gf, other, true)
    }

    pub fn mul(&self, gf: &Gf, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars);
        }
        if self.is_constant() {
            return other.scale(gf, self.constant_value());
        }
        if other.is_constant() {
            return self.scale(gf, other.constant_value());
        }
        if let (Some(Some(u)), Some(Some(v))) = (self.single_var(), other.single_var()) {
            if u == v {
                let prod = dense_mul(gf, &self.to_dense(u), &other.to_dense(u));
                return Self::from_dense(self.nvars, u, &prod);
            }
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Mono = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                terms.push((m, gf.mul(*ca, *cb)));
            }
        }
        Self::from_terms(gf, self.nvars, terms)
    }

    pub fn mul_term(&self, gf: &Gf, mono: &[u32], c: u32) -> Self {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.iter().zip(mono).map(|(a, b)| a + b).collect(), gf.mul(*x, c)))
                .collect(),
        }
    }

    pub fn pow(&self, gf: &Gf, mut e: u64) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(gf, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(gf, &base);
            }
        }
        acc
    }

    /// `self^p`: exponents times `p`, coefficients through Frobenius.
    pub fn frobenius(&self, gf: &Gf) -> Self {
        self.frobenius_pow(gf, 1)
    }

    /// `self^{p^k}`.
    pub fn frobenius_pow(&self, gf: &Gf, k: u32) -> Self {
        let q = (gf.p() as u64).pow(k);
        // scaling exponents preserves graded-lex order
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.iter().map(|&e| (e as u64 * q) as u32).collect(), gf.pow(*c, q)))
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    /// The unique `q` with `q^p = self`, if every exponent is divisible by `p`.
    pub fn pth_root(&self, gf: &Gf) -> Option<Self> {
        let p = gf.p();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if m.iter().any(|&e| e % p != 0) {
                return None;
            }
            terms.push((m.iter().map(|&e| e / p).collect(), gf.frobenius_inv(*c)));
        }
        Some(Poly { nvars: self.nvars, terms })
    }

    pub fn monic(&self, gf: &Gf) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, 1)) => self.clone(),
            Some((_, c)) => self.scale(gf, gf.inv(c)),
        }
    }

    /// Exact quotient `self / other`, or `None` when `other` does not divide `self`.
    pub fn div_exact(&self, gf: &Gf, other: &Self) -> Option<Self> {
        assert!(!other.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if other.is_constant() {
            return Some(self.scale(gf, gf.inv(other.constant_value())));
        }
        if let (Some(su), Some(Some(v))) = (self.single_var(), other.single_var()) {
            if su.is_none() || su == Some(v) {
                let (q, r) = dense_divrem(gf, &self.to_dense(v), &other.to_dense(v));
                return if r.is_empty() { Some(Self::from_dense(self.nvars, v, &q)) } else { None };
            }
        }
        let (lmb, lcb) = other.leading().map(|(m, c)| (m.clone(), c)).unwrap();
        let inv = gf.inv(lcb);
        let mut rem = self.clone();
        let mut quot: Vec<(Mono, u32)> = Vec::new();
        while let Some((lmr, lcr)) = rem.leading() {
            if !divides(&lmb, lmr) {
                return None;
            }
            let m: Mono = lmr.iter().zip(&lmb).map(|(a, b)| a - b).collect();
            let c = gf.mul(lcr, inv);
            rem = rem.sub(gf, &other.mul_term(gf, &m, c));
            quot.push((m, c));
        }
        quot.reverse();
        Some(Poly { nvars: self.nvars, terms: quot })
    }

    fn to_dense(&self, v: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            out[m[v] as usize] = *c;
        }
        trim(&mut out);
        out
    }

    fn from_dense(nvars: usize, v: usize, coeffs: &[u32]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| {
                let mut m: Mono = smallvec![0; nvars];
                m[v] = e as u32;
                (m, c)
            })
            .collect();
        Poly { nvars, terms }
    }

    /// Coefficients of `self` as a polynomial in variable `v` (index = degree in `v`).
    fn coeffs_in(&self, gf: &Gf, v: usize) -> Vec<Poly> {
        let mut buckets: Vec<Vec<(Mono, u32)>> = vec![Vec::new(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2[v] = 0;
            buckets[m[v] as usize].push((m2, *c));
        }
        buckets.into_iter().map(|t| Poly::from_terms(gf, self.nvars, t)).collect()
    }

    fn from_coeffs_in(gf: &Gf, nvars: usize, v: usize, coeffs: &[Poly]) -> Self {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                let mut m2 = m.clone();
                m2[v] = e as u32;
                terms.push((m2, *x));
            }
        }
        Poly::from_terms(gf, nvars, terms)
    }

    /// Generic evaluation: `coeff` embeds coefficients and `var_pow(i, e)` gives `x_i^e`.
    pub fn evaluate<T: Clone>(
        &self,
        zero: T,
        coeff: impl Fn(u32) -> T,
        var_pow: impl Fn(usize, u32) -> T,
        add: impl Fn(&T, &T) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut term = coeff(*c);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    term = mul(&term, &var_pow(i, e));
                }
            }
            acc = add(&acc, &term);
        }
        acc
    }
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn dense_mul(gf: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[i + j] = gf.add(out[i + j], gf.mul(x, y));
            }
        }
    }
    trim(&mut out);
    out
}

fn dense_divrem(gf: &Gf, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = gf.inv(*b.last().unwrap());
    let mut q = vec![0u32; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = gf.mul(*r.last().unwrap(), inv);
        q[shift] = c;
        for (k, &bk) in b.iter().enumerate() {
            r[shift + k] = gf.sub(r[shift + k], gf.mul(c, bk));
        }
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    trim(&mut q);
    (q, r)
}

fn dense_gcd(gf: &Gf, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let (_, r) = dense_divrem(gf, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lc) = a.last() {
        let inv = gf.inv(lc);
        for c in a.iter_mut() {
            *c = gf.mul(*c, inv);
        }
    }
    a
}

/// Monic greatest common divisor (zero only when both inputs are zero).
pub fn gcd(gf: &Gf, a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars;
    if a.is_zero() {
        return b.monic(gf);
    }
    if b.is_zero() {
        return a.monic(gf);
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if let (Some(Some(u)), Some(Some(v))) = (a.single_var(), b.single_var()) {
        if u == v {
            return Poly::from_dense(n, u, &dense_gcd(gf, &a.to_dense(u), &b.to_dense(u)));
        }
        return Poly::one(n);
    }
    let v = a.top_var().max(b.top_var()).unwrap();
    let ca = a.coeffs_in(gf, v);
    let cb = b.coeffs_in(gf, v);
    let (conta, ppa) = primitive(gf, ca);
    let (contb, ppb) = primitive(gf, cb);
    let cont = gcd(gf, &conta, &contb);
    let (mut u, mut w) = if ppa.len() >= ppb.len() { (ppa, ppb) } else { (ppb, ppa) };
    let g = loop {
        if w.len() <= 1 {
            break vec![Poly::one(n)];
        }
        let r = prem(gf, &u, &w);
        if r.is_empty() {
            break w;
        }
        if r.len() == 1 {
            break vec![Poly::one(n)];
        }
        u = w;
        w = primitive(gf, r).1;
    };
    Poly::from_coeffs_in(gf, n, v, &g).mul(gf, &cont).monic(gf)
}

/// Content and primitive part of a polynomial given by its coefficients in one variable.
fn primitive(gf: &Gf, coeffs: Vec<Poly>) -> (Poly, Vec<Poly>) {
    let n = coeffs[0].nvars;
    let mut cont = Poly::zero(n);
    for c in &coeffs {
        cont = gcd(gf, &cont, c);
        if cont.is_one() {
            return (cont, coeffs);
        }
    }
    let pp = coeffs.iter().map(|c| c.div_exact(gf, &cont).expect("content divides")).collect();
    (cont, pp)
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
fn prem(gf: &Gf, u: &[Poly], w: &[Poly]) -> Vec<Poly> {
    let lw = w.last().unwrap().clone();
    let mut r: Vec<Poly> = u.to_vec();
    while r.len() >= w.len() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - w.len();
        for c in r.iter_mut() {
            *c = c.mul(gf, &lw);
        }
        for (k, wk) in w.iter().enumerate() {
            r[shift + k] = r[shift + k].sub(gf, &wk.mul(gf, &lr));
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Gf {
        Gf::new(2, 1, None).unwrap()
    }

    fn mono(e: &[u32]) -> Mono {
        e.iter().copied().collect()
    }

    fn poly(gf: &Gf, terms: &[(&[u32], u32)]) -> Poly {
        let n = terms[0].0.len();
        Poly::from_terms(gf, n, terms.iter().map(|(m, c)| (mono(m), *c)).collect())
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        assert_eq!(grlex(&[0, 2], &[1, 0]), Ordering::Greater);
        assert_eq!(grlex(&[1, 1], &[0, 2]), Ordering::Greater);
        assert_eq!(grlex(&[2, 0], &[1, 1]), Ordering::Greater);
    }

    #[test]
    fn square_of_sum_in_char_two() {
        let gf = f2();
        let a = poly(&gf, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(a.mul(&gf, &a), poly(&gf, &[(&[0], 1), (&[2], 1)]));
        assert_eq!(a.frobenius(&gf), a.mul(&gf, &a));
    }

    #[test]
    fn bivariate_gcd() {
        let gf = Gf::new(3, 1, None).unwrap();
        // (t1 + t2) * (t1*t2 + 1) and (t1 + t2) * (t1 + 2)
        let common = poly(&gf, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let x = poly(&gf, &[(&[1, 1], 1), (&[0, 0], 1)]);
        let y = poly(&gf, &[(&[1, 0], 1), (&[0, 0], 2)]);
        let a = common.mul(&gf, &x);
        let b = common.mul(&gf, &y);
        assert_eq!(gcd(&gf, &a, &b), common.monic(&gf));
        assert!(gcd(&gf, &x, &y).is_one());
        assert_eq!(a.div_exact(&gf, &common), Some(x.clone()));
        assert_eq!(a.div_exact(&gf, &y), None);
    }

    #[test]
    fn gcd_with_content() {
        let gf = f2();
        // t1 * (t2 + 1) and t1^2 * (t2 + 1)^2 * (t1 + t2)
        let a = poly(&gf, &[(&[1, 1], 1), (&[1, 0], 1)]);
        let b = a.mul(&gf, &a).mul(&gf, &poly(&gf, &[(&[1, 0], 1), (&[0, 1], 1)]));
        assert_eq!(gcd(&gf, &a, &b), a);
    }

    #[test]
    fn pth_root_roundtrip() {
        let gf = Gf::new(2, 2, None).unwrap();
        let a = poly(&gf, &[(&[0, 1], 2), (&[3, 0], 3), (&[0, 0], 1)]);
        assert_eq!(a.frobenius(&gf).pth_root(&gf), Some(a.clone()));
        assert_eq!(a.pth_root(&gf), None);
    }
}
