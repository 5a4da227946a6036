//! Witt structural polynomials.
//!
//! `S_n`, `P_n`, `N_n` are built over the integers by the ghost recursion
//! `Φ_n = (ghost_n − Σ_{j<n} p^j Φ_j^{p^{n−j}}) / p^n`, where `ghost_n` is
//! `w_n(X) + w_n(Y)`, `w_n(X)·w_n(Y)` or `−w_n(X)`. Variables are interleaved:
//! `X_j` is variable `2j`, `Y_j` is variable `2j + 1`. The digit-`n` polynomial only
//! involves `X_0..X_n, Y_0..Y_n` and does not depend on the ring length.
//!
//! Results are cached per `(p, op)` in a process-wide store. Readers always see fully
//! built lists; two threads may build the same list concurrently, and since the
//! construction is deterministic the longer list simply wins.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::fields::{Field, Poly, RatFn};

pub type IMono = SmallVec<[u32; 8]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructOp {
    Add,
    Mul,
    Neg,
}

/// A polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    nvars: usize,
    terms: HashMap<IMono, BigInt>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly { nvars, terms: HashMap::new() }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = IMono::from_elem(0, nvars);
        m[i] = 1;
        IntPoly { nvars, terms: HashMap::from([(m, BigInt::one())]) }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IMono, &BigInt)> {
        self.terms.iter()
    }

    /// Same polynomial viewed in more variables.
    pub fn pad(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = m.clone();
                m2.resize(nvars, 0);
                (m2, c.clone())
            })
            .collect();
        IntPoly { nvars, terms }
    }

    fn add_term(terms: &mut HashMap<IMono, BigInt>, m: IMono, c: BigInt) {
        use std::collections::hash_map::Entry;
        match terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::add_term(&mut terms, m.clone(), c.clone());
        }
        IntPoly { nvars: self.nvars, terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        IntPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: IMono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                Self::add_term(&mut terms, m, ca * cb);
            }
        }
        IntPoly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = IntPoly { nvars: self.nvars, terms: HashMap::from([(IMono::from_elem(0, self.nvars), BigInt::one())]) };
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if !(c % d).is_zero() {
                return None;
            }
            terms.insert(m.clone(), c / d);
        }
        Some(IntPoly { nvars: self.nvars, terms })
    }

    /// Coefficients reduced into `[0, p)`, zeros dropped, sorted for determinism.
    pub fn reduce_mod(&self, p: u32) -> StructPoly {
        let pb = BigInt::from(p);
        let mut terms: Vec<(IMono, u32)> = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let r = ((c % &pb) + &pb) % &pb;
                let r = r.to_u32().unwrap();
                (r != 0).then(|| (m.clone(), r))
            })
            .collect();
        terms.sort();
        StructPoly::new(self.nvars, terms)
    }

    /// Largest absolute coefficient, for diagnostics.
    pub fn height(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

/// Ghost component `w_n` of the tuple whose `j`-th entry is `vals[j]`.
pub fn ghost_of(p: u32, vals: &[IntPoly], n: usize) -> IntPoly {
    let nvars = vals[0].nvars;
    let mut acc = IntPoly::zero(nvars);
    for (j, v) in vals.iter().enumerate().take(n + 1) {
        let pj = BigInt::from(p).pow(j as u32);
        let e = (p as u64).pow((n - j) as u32);
        acc = acc.add(&v.pow(e).scale(&pj));
    }
    acc
}

/// `w_n(X)` in the interleaved variables, padded to `nvars`.
fn ghost_var(p: u32, n: usize, y: bool, nvars: usize) -> IntPoly {
    let vals: Vec<IntPoly> = (0..=n).map(|j| IntPoly::var(nvars, 2 * j + y as usize)).collect();
    ghost_of(p, &vals, n)
}

/// Integral structural polynomials for digits `0..len`.
pub fn integral(p: u32, op: StructOp, len: usize) -> Vec<IntPoly> {
    let mut out: Vec<IntPoly> = Vec::with_capacity(len);
    for n in 0..len {
        let nvars = 2 * (n + 1);
        let target = match op {
            StructOp::Add => ghost_var(p, n, false, nvars).add(&ghost_var(p, n, true, nvars)),
            StructOp::Mul => ghost_var(p, n, false, nvars).mul(&ghost_var(p, n, true, nvars)),
            StructOp::Neg => ghost_var(p, n, false, nvars).scale(&BigInt::from(-1)),
        };
        let mut acc = target;
        for (j, prev) in out.iter().enumerate() {
            let pj = BigInt::from(p).pow(j as u32);
            let e = (p as u64).pow((n - j) as u32);
            acc = acc.sub(&prev.pad(nvars).pow(e).scale(&pj));
        }
        let pn = BigInt::from(p).pow(n as u32);
        out.push(acc.div_exact(&pn).expect("ghost recursion is integral"));
    }
    out
}

/// A structural polynomial reduced mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructPoly {
    nvars: usize,
    terms: Vec<(IMono, u32)>,
    max_exp: Vec<u32>,
}

impl StructPoly {
    fn new(nvars: usize, terms: Vec<(IMono, u32)>) -> Self {
        let mut max_exp = vec![0u32; nvars];
        for (m, _) in &terms {
            for (v, &e) in m.iter().enumerate() {
                max_exp[v] = max_exp[v].max(e);
            }
        }
        StructPoly { nvars, terms, max_exp }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(IMono, u32)] {
        &self.terms
    }

    /// Evaluates at field values, clearing denominators once:
    /// with `E_v` the top exponent of variable `v`, each term becomes a polynomial
    /// after multiplying by `D = Π den_v^{E_v}`.
    pub fn evaluate(&self, k: &Field, vals: &[&RatFn]) -> RatFn {
        assert_eq!(vals.len(), self.nvars, "wrong number of arguments");
        let gf = k.gf();
        let fractions = vals.iter().any(|v| !v.is_polynomial());
        let mut num_pows: Vec<Vec<Poly>> = vals.iter().map(|v| vec![Poly::one(k.r()), v.numerator().clone()]).collect();
        let mut den_pows: Vec<Vec<Poly>> = vals.iter().map(|v| vec![Poly::one(k.r()), v.denominator().clone()]).collect();
        fn power(gf: &crate::fields::Gf, cache: &mut Vec<Poly>, e: usize) -> Poly {
            while cache.len() <= e {
                let next = cache.last().unwrap().mul(gf, &cache[1]);
                cache.push(next);
            }
            cache[e].clone()
        }
        let mut sum = Poly::zero(k.r());
        'terms: for (m, c) in &self.terms {
            let mut term = Poly::constant(k.r(), gf.from_int(*c as i64));
            for (v, &e) in m.iter().enumerate() {
                if e > 0 {
                    if vals[v].is_zero() {
                        continue 'terms;
                    }
                    term = term.mul(gf, &power(gf, &mut num_pows[v], e as usize));
                }
                if fractions {
                    let rest = self.max_exp[v] - e;
                    if rest > 0 && !vals[v].is_polynomial() {
                        term = term.mul(gf, &power(gf, &mut den_pows[v], rest as usize));
                    }
                }
            }
            sum = sum.add(gf, &term);
        }
        if !fractions {
            return k.from_poly(sum);
        }
        let mut den = Poly::one(k.r());
        for (v, &e) in self.max_exp.iter().enumerate() {
            if e > 0 && !vals[v].is_polynomial() {
                den = den.mul(gf, &power(gf, &mut den_pows[v], e as usize));
            }
        }
        k.fraction(sum, den).expect("denominators are nonzero")
    }
}

struct Entry {
    integral: Vec<IntPoly>,
    reduced: Vec<Arc<StructPoly>>,
}

type Cache = RwLock<HashMap<(u32, StructOp), Arc<Entry>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn entry(p: u32, op: StructOp, len: usize) -> Arc<Entry> {
    if let Some(e) = cache().read().unwrap().get(&(p, op)) {
        if e.reduced.len() >= len {
            return e.clone();
        }
    }
    let integral = integral(p, op, len);
    let reduced = integral.iter().map(|f| Arc::new(f.reduce_mod(p))).collect();
    let built = Arc::new(Entry { integral, reduced });
    let mut guard = cache().write().unwrap();
    let slot = guard.entry((p, op)).or_insert_with(|| built.clone());
    if slot.reduced.len() < built.reduced.len() {
        *slot = built;
    }
    slot.clone()
}

/// Reduced structural polynomials for digits `0..len`, built once per `(p, op)`.
pub fn reduced(p: u32, op: StructOp, len: usize) -> Vec<Arc<StructPoly>> {
    entry(p, op, len).reduced[..len].to_vec()
}

/// Cached integral structural polynomials for digits `0..len`.
pub fn integral_cached(p: u32, op: StructOp, len: usize) -> Vec<IntPoly> {
    entry(p, op, len).integral[..len].to_vec()
}
