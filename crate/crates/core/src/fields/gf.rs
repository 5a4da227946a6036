//! The finite coefficient field `F_{p^d}`.
//!
//! Elements are stored as `u32` indices `c = a_0 + a_1 p + ... + a_{d-1} p^{d-1}`
//! standing for `a_0 + a_1 w + ... + a_{d-1} w^{d-1}`, where `w` is a root of the
//! defining modulus. For `d > 1` multiplication goes through exp/log tables.

use crate::error::FieldError;

/// Largest `p^d` accepted for a proper extension (`d > 1`); the tables are dense.
pub const MAX_EXTENSION_SIZE: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct Gf {
    p: u32,
    d: usize,
    size: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

#[derive(Clone, Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf {
    /// Builds `F_{p^d}`. `modulus` lists the coefficients of a monic polynomial of degree
    /// `d`, lowest degree first; `None` selects the default modulus.
    pub fn new(p: u32, d: usize, modulus: Option<Vec<u32>>) -> Result<Self, FieldError> {
        if p < 2 || !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if d == 0 {
            return Err(FieldError::BadDegree(d));
        }
        let size = (p as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
        if d > 1 && size > MAX_EXTENSION_SIZE {
            return Err(FieldError::FieldTooLarge { p: p as u64, d });
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != d + 1 || m[d] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(FieldError::BadModulus(format!(
                        "expected {} coefficients mod {p} ending in 1, got {m:?}",
                        d + 1
                    )));
                }
                if !is_irreducible(p, &m) {
                    return Err(FieldError::BadModulus(format!("{m:?} is reducible over F_{p}")));
                }
                m
            }
            None => default_modulus(p, d),
        };
        let mut gf = Gf { p, d, size: size as u32, modulus, tables: None };
        if d > 1 {
            gf.tables = Some(gf.build_tables());
        }
        Ok(gf)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.d == 1 {
            let s = a as u64 + b as u64;
            (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
        } else if self.p == 2 {
            a ^ b
        } else {
            let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
            for _ in 0..self.d {
                let s = (a % self.p + b % self.p) % self.p;
                out += s * place;
                a /= self.p;
                b /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.d == 1 {
            if a == 0 { 0 } else { self.p - a }
        } else {
            let (mut a, mut out, mut place) = (a, 0u32, 1u32);
            for _ in 0..self.d {
                let digit = a % self.p;
                out += ((self.p - digit) % self.p) * place;
                a /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            None => ((a as u64 * b as u64) % self.p as u64) as u32,
            Some(t) => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let order = self.size - 1;
                let e = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % order as u64;
                t.exp[e as usize]
            }
        }
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_q");
        match &self.tables {
            None => self.pow(a, self.p as u64 - 2),
            Some(t) => {
                let order = self.size - 1;
                t.exp[((order - t.log[a as usize]) % order) as usize]
            }
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let order = (self.size - 1) as u64;
            let le = (t.log[a as usize] as u64 * (e % order)) % order;
            return t.exp[le as usize];
        }
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^p`.
    #[inline]
    pub fn frobenius(&self, a: u32) -> u32 {
        if self.d == 1 { a } else { self.pow(a, self.p as u64) }
    }

    /// The unique `b` with `b^p = a`, i.e. `a^{p^{d-1}}`.
    #[inline]
    pub fn frobenius_inv(&self, a: u32) -> u32 {
        if self.d == 1 {
            a
        } else {
            self.pow(a, (self.p as u64).pow(self.d as u32 - 1))
        }
    }

    /// Embeds an integer through `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Base-`p` digits of an element (coefficients of `1, w, ..., w^{d-1}`).
    pub fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0u32, |acc, &c| acc * self.p + c % self.p)
    }

    /// The generator `w` of a proper extension.
    pub fn generator(&self) -> Option<u32> {
        if self.d > 1 { Some(self.p) } else { None }
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * self.d];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi as u64 * yj as u64) % p;
            }
        }
        for deg in (self.d..2 * self.d).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for k in 0..self.d {
                let sub = c * self.modulus[k] as u64 % p;
                prod[deg - self.d + k] = (prod[deg - self.d + k] + p - sub) % p;
            }
        }
        let low: Vec<u32> = prod[..self.d].iter().map(|&c| c as u32).collect();
        self.from_digits(&low)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> Tables {
        let order = (self.size - 1) as u64;
        let factors = prime_factors(order);
        let g = (2..self.size)
            .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; self.size as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = self.slow_mul(cur, g);
        }
        Tables { exp, log }
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.modulus == other.modulus
    }
}

impl Eq for Gf {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo `b` over `F_p`; both low-to-high, `b` monic.
fn poly_rem_modp(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (k, &bk) in b.iter().enumerate() {
                r[shift + k] = (r[shift + k] + p - c * bk as u64 % p) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=d/2`.
fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let d = modulus.len() - 1;
    for deg in 1..=d / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(deg + 1);
            let mut c = code;
            for _ in 0..deg {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if poly_rem_modp(p, modulus, &divisor).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// The first monic irreducible polynomial of degree `d`, ordering the lower coefficients
/// as a base-`p` number.
pub fn default_modulus(p: u32, d: usize) -> Vec<u32> {
    let count = (p as u64).pow(d as u32);
    for code in 0..count {
        let mut m = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            m.push((c % p as u64) as u32);
            c /= p as u64;
        }
        m.push(1);
        if d == 1 || is_irreducible(p, &m) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_default_modulus_is_w2_w_1() {
        assert_eq!(default_modulus(2, 2), vec![1, 1, 1]);
        let f4 = Gf::new(2, 2, None).unwrap();
        let w = f4.generator().unwrap();
        // w^2 = w + 1
        assert_eq!(f4.mul(w, w), f4.add(w, 1));
        assert_eq!(f4.frobenius(w), f4.add(w, 1));
        assert_eq!(f4.frobenius_inv(w), f4.mul(w, w));
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(Gf::new(2, 2, Some(vec![1, 0, 1])).is_err());
        assert!(Gf::new(4, 1, None).is_err());
    }

    #[test]
    fn table_field_matches_schoolbook() {
        for (p, d) in [(2u32, 3usize), (3, 2), (5, 2), (2, 4)] {
            let f = Gf::new(p, d, None).unwrap();
            for a in 0..f.size() {
                for b in 0..f.size() {
                    assert_eq!(f.mul(a, b), f.slow_mul(a, b));
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                assert_eq!(f.frobenius_inv(f.frobenius(a)), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn prime_field_basics() {
        let f3 = Gf::new(3, 1, None).unwrap();
        assert_eq!(f3.mul(2, 2), 1);
        assert_eq!(f3.inv(2), 2);
        assert_eq!(f3.from_int(-1), 2);
    }
}
