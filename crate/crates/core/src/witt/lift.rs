//! Witt arithmetic by evaluating the ghost recursion at integral lifts.
//!
//! Digits are lifted to `GR[t1..tr]`, where `GR = (Z/p^m)[w]/(M~)` is the Galois ring
//! lifting `F_{p^d}`. For `Φ ∈ {S, P, N}` and `Δ_n = Π_{i≤n} (den x_i · den y_i)^{p^{n−i}}`
//! the polynomial `Δ_n Φ_n` reduces mod `p` to the digit numerator, and
//!
//! `p^n Δ_n Φ_n ≡ Δ_n ghost_n − Σ_{j<n} p^j Ñ_j^{p^{n−j}} Π_{j<i≤n} (den x_i den y_i)^{p^{n−i}}`
//!
//! modulo `p^{n+1}`, where `Ñ_j` is any lift of the previous digit numerator. This
//! needs no expanded polynomials and works for every length.

use smallvec::SmallVec;

use super::structural::StructOp;
use crate::fields::{grlex, Field, Gf, Mono, Poly, RatFn};

type GrElem = SmallVec<[u64; 2]>;

/// `(Z/p^N)[w]/(M~)` with `M~` the defining modulus read as integers.
struct Gr {
    p: u64,
    q: u64,
    d: usize,
    modulus: Vec<u64>,
}

impl Gr {
    fn new(gf: &Gf, n: u32) -> Option<Self> {
        let p = gf.p() as u64;
        let q = p.checked_pow(n)?;
        if q > (1u64 << 62) {
            return None;
        }
        Some(Gr { p, q, d: gf.degree(), modulus: gf.modulus().iter().map(|&c| c as u64).collect() })
    }

    #[inline]
    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    fn zero(&self) -> GrElem {
        SmallVec::from_elem(0, self.d)
    }

    fn is_zero(a: &GrElem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.q).collect()
    }

    fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        a.iter().zip(b).map(|(&x, &y)| (x + self.q - y) % self.q).collect()
    }

    fn neg(&self, a: &GrElem) -> GrElem {
        a.iter().map(|&x| (self.q - x) % self.q).collect()
    }

    fn scale(&self, a: &GrElem, c: u64) -> GrElem {
        a.iter().map(|&x| self.mulmod(x, c)).collect()
    }

    fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        if self.d == 1 {
            return SmallVec::from_elem(self.mulmod(a[0], b[0]), 1);
        }
        let d = self.d;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + self.mulmod(x, y)) % self.q;
            }
        }
        for deg in (d..2 * d - 1).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for k in 0..d {
                let s = self.mulmod(c, self.modulus[k]);
                prod[deg - d + k] = (prod[deg - d + k] + self.q - s) % self.q;
            }
        }
        prod.truncate(d);
        prod.into_iter().collect()
    }

    fn lift(&self, gf: &Gf, c: u32) -> GrElem {
        gf.digits(c).into_iter().map(|x| x as u64).collect()
    }

    /// Reduction mod `p` of `a / p^n`; the caller guarantees divisibility.
    fn reduce_div(&self, gf: &Gf, a: &GrElem, n: u32) -> u32 {
        let pn = self.p.pow(n);
        let digits: Vec<u32> = a
            .iter()
            .map(|&x| {
                debug_assert_eq!(x % pn, 0, "ghost recursion lost integrality");
                ((x / pn) % self.p) as u32
            })
            .collect();
        gf.from_digits(&digits)
    }
}

/// Sparse polynomial over the Galois ring, terms sorted by graded-lex order.
#[derive(Clone, Debug)]
struct LPoly {
    terms: Vec<(Mono, GrElem)>,
}

impl LPoly {
    fn zero() -> Self {
        LPoly { terms: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lift(gr: &Gr, gf: &Gf, p: &Poly) -> Self {
        LPoly { terms: p.terms().iter().map(|(m, c)| (m.clone(), gr.lift(gf, *c))).collect() }
    }

    fn combine(&self, gr: &Gr, other: &Self, negate: bool) -> Self {
        use std::cmp::Ordering;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        let sgn = |c: &GrElem| if negate { gr.neg(c) } else { c.clone() };
        while i < a.len() && j < b.len() {
            match grlex(&a[i].0, &b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), sgn(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = gr.add(&a[i].1, &sgn(&b[j].1));
                    if !Gr::is_zero(&c) {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sgn(c))));
        LPoly { terms: out }
    }

    fn add(&self, gr: &Gr, other: &Self) -> Self {
        self.combine(gr, other, false)
    }

    fn sub(&self, gr: &Gr, other: &Self) -> Self {
        self.combine(gr, other, true)
    }

    fn scale(&self, gr: &Gr, c: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, x)| {
                let y = gr.scale(x, c);
                (!Gr::is_zero(&y)).then(|| (m.clone(), y))
            })
            .collect();
        LPoly { terms }
    }

    fn mul(&self, gr: &Gr, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut terms: Vec<(Mono, GrElem)> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = gr.mul(ca, cb);
                if !Gr::is_zero(&c) {
                    terms.push((ma.iter().zip(mb).map(|(x, y)| x + y).collect(), c));
                }
            }
        }
        terms.sort_unstable_by(|a, b| grlex(&a.0, &b.0));
        let mut out: Vec<(Mono, GrElem)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = gr.add(lc, &c),
                _ => out.push((m, c)),
            }
            if out.last().is_some_and(|(_, c)| Gr::is_zero(c)) {
                out.pop();
            }
        }
        LPoly { terms: out }
    }

    fn reduce_div(&self, gr: &Gr, gf: &Gf, nvars: usize, n: u32) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), gr.reduce_div(gf, c, n))).collect();
        Poly::from_terms(gf, nvars, terms)
    }
}

/// Arithmetic on lifted values: Galois-ring scalars when `r = 0`, polynomials otherwise.
trait LiftAlg {
    type E: Clone;
    fn gr(&self) -> &Gr;
    fn zero(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn scale(&self, a: &Self::E, c: u64) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn lift(&self, p: &Poly) -> Self::E;
    /// Reduction mod `p` of `a / p^n`.
    fn reduce_div(&self, a: &Self::E, n: u32) -> Poly;

    fn pow_p(&self, a: &Self::E) -> Self::E {
        let mut e = self.gr().p;
        let mut acc: Option<Self::E> = None;
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(x) => self.mul(&x, &base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc.unwrap()
    }

    fn mul_opt(&self, a: &Self::E, b: Option<&Self::E>) -> Self::E {
        match b {
            None => a.clone(),
            Some(b) => self.mul(a, b),
        }
    }

    fn prod_opt(&self, a: Option<Self::E>, b: Option<&Self::E>) -> Option<Self::E> {
        match (a, b) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(self.mul(&a, b)),
        }
    }
}

struct ScalarAlg<'a> {
    gr: Gr,
    gf: &'a Gf,
}

impl LiftAlg for ScalarAlg<'_> {
    type E = GrElem;
    fn gr(&self) -> &Gr {
        &self.gr
    }
    fn zero(&self) -> GrElem {
        self.gr.zero()
    }
    fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        self.gr.add(a, b)
    }
    fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        self.gr.sub(a, b)
    }
    fn scale(&self, a: &GrElem, c: u64) -> GrElem {
        self.gr.scale(a, c)
    }
    fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        self.gr.mul(a, b)
    }
    fn lift(&self, p: &Poly) -> GrElem {
        self.gr.lift(self.gf, p.constant_value())
    }
    fn reduce_div(&self, a: &GrElem, n: u32) -> Poly {
        Poly::constant(0, self.gr.reduce_div(self.gf, a, n))
    }
}

struct PolyAlg<'a> {
    gr: Gr,
    gf: &'a Gf,
    nvars: usize,
}

impl LiftAlg for PolyAlg<'_> {
    type E = LPoly;
    fn gr(&self) -> &Gr {
        &self.gr
    }
    fn zero(&self) -> LPoly {
        LPoly::zero()
    }
    fn add(&self, a: &LPoly, b: &LPoly) -> LPoly {
        a.add(&self.gr, b)
    }
    fn sub(&self, a: &LPoly, b: &LPoly) -> LPoly {
        a.sub(&self.gr, b)
    }
    fn scale(&self, a: &LPoly, c: u64) -> LPoly {
        a.scale(&self.gr, c)
    }
    fn mul(&self, a: &LPoly, b: &LPoly) -> LPoly {
        a.mul(&self.gr, b)
    }
    fn lift(&self, p: &Poly) -> LPoly {
        LPoly::lift(&self.gr, self.gf, p)
    }
    fn reduce_div(&self, a: &LPoly, n: u32) -> Poly {
        a.reduce_div(&self.gr, self.gf, self.nvars, n)
    }
}

/// Lifted digits of one Witt vector with their iterated p-th powers.
struct Lifted<E> {
    /// `num[j][k] = a_j^{p^k}`
    num: Vec<Vec<E>>,
    /// `den[j][k] = b_j^{p^k}`, `None` when `b_j = 1`
    den: Vec<Option<Vec<E>>>,
}

impl<E: Clone> Lifted<E> {
    fn new<A: LiftAlg<E = E>>(alg: &A, digits: &[RatFn]) -> Self {
        let m = digits.len();
        let powers = |base: E, count: usize| {
            let mut v = vec![base];
            for _ in 1..count {
                let next = alg.pow_p(v.last().unwrap());
                v.push(next);
            }
            v
        };
        let mut num = Vec::with_capacity(m);
        let mut den = Vec::with_capacity(m);
        for (j, x) in digits.iter().enumerate() {
            num.push(powers(alg.lift(x.numerator()), m - j));
            den.push((!x.is_polynomial()).then(|| powers(alg.lift(x.denominator()), m - j)));
        }
        Lifted { num, den }
    }

    fn den_pow(&self, j: usize, k: usize) -> Option<&E> {
        self.den[j].as_ref().map(|v| &v[k])
    }

    /// `Δ_n w_n(x)` and `Δ_n = Π_{i≤n} b_i^{p^{n−i}}`.
    fn cleared_ghost<A: LiftAlg<E = E>>(&self, alg: &A, n: usize) -> (E, Option<E>) {
        let p = alg.gr().p;
        let mut g = alg.zero();
        for j in 0..=n {
            let mut term = alg.scale(&self.num[j][n - j], p.pow(j as u32));
            for i in (0..=n).filter(|&i| i != j) {
                if let Some(d) = self.den_pow(i, n - i) {
                    term = alg.mul(&term, d);
                }
            }
            g = alg.add(&g, &term);
        }
        let mut delta = None;
        for i in 0..=n {
            delta = alg.prod_opt(delta, self.den_pow(i, n - i));
        }
        (g, delta)
    }
}

fn run<A: LiftAlg>(alg: &A, k: &Field, op: StructOp, x: &[RatFn], y: &[RatFn]) -> Vec<RatFn> {
    let m = x.len();
    let (p, q) = (alg.gr().p, alg.gr().q);
    let lx = Lifted::new(alg, x);
    let ly = (op != StructOp::Neg).then(|| Lifted::new(alg, y));

    let mut out = Vec::with_capacity(m);
    // prev[j] = Ñ_j^{p^{n-1-j}}, raised once per step
    let mut prev: Vec<A::E> = Vec::with_capacity(m);
    for n in 0..m {
        let (gx, dx) = lx.cleared_ghost(alg, n);
        let (target, delta) = match &ly {
            None => (alg.scale(&gx, q - 1), dx),
            Some(ly) => {
                let (gy, dy) = ly.cleared_ghost(alg, n);
                let t = match op {
                    StructOp::Add => alg.add(&alg.mul_opt(&gx, dy.as_ref()), &alg.mul_opt(&gy, dx.as_ref())),
                    StructOp::Mul => alg.mul(&gx, &gy),
                    StructOp::Neg => unreachable!(),
                };
                (t, alg.prod_opt(dx, dy.as_ref()))
            }
        };
        let mut acc = target;
        for (j, pj) in prev.iter_mut().enumerate() {
            *pj = alg.pow_p(pj);
            let mut term = alg.scale(pj, p.pow(j as u32));
            for i in j + 1..=n {
                if let Some(d) = lx.den_pow(i, n - i) {
                    term = alg.mul(&term, d);
                }
                if let Some(d) = ly.as_ref().and_then(|ly| ly.den_pow(i, n - i)) {
                    term = alg.mul(&term, d);
                }
            }
            acc = alg.sub(&acc, &term);
        }
        let numer = alg.reduce_div(&acc, n as u32);
        let denom = match &delta {
            None => Poly::one(k.r()),
            Some(d) => alg.reduce_div(d, 0),
        };
        prev.push(alg.lift(&numer));
        out.push(k.fraction(numer, denom).expect("denominator is a product of nonzero polynomials"));
    }
    out
}

/// The same recursion over `F_p` itself: lifts are integers mod `p^m` and there are no
/// denominators.
fn run_prime(k: &Field, gr: &Gr, op: StructOp, x: &[RatFn], y: &[RatFn]) -> Vec<RatFn> {
    let (p, q) = (gr.p, gr.q);
    let digit = |d: &RatFn| if d.is_zero() { 0 } else { d.numerator().constant_value() as u64 };
    let pow_p = |a: u64| {
        let (mut acc, mut base, mut e) = (1u64, a, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = gr.mulmod(acc, base);
            }
            base = gr.mulmod(base, base);
            e >>= 1;
        }
        acc
    };
    let ghost = |powers: &[u64]| {
        let mut pj = 1u64;
        powers.iter().fold(0u64, |acc, &a| {
            let t = gr.mulmod(a, pj);
            pj = pj.wrapping_mul(p);
            (acc + t) % q
        })
    };
    let m = x.len();
    let (mut xs, mut ys, mut prev) = (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
    let mut out = Vec::with_capacity(m);
    for n in 0..m {
        for v in xs.iter_mut().chain(ys.iter_mut()).chain(prev.iter_mut()) {
            *v = pow_p(*v);
        }
        xs.push(digit(&x[n]));
        let gx = ghost(&xs);
        let target = match op {
            StructOp::Neg => gr.mulmod(gx, q - 1),
            StructOp::Add | StructOp::Mul => {
                ys.push(digit(&y[n]));
                let gy = ghost(&ys);
                if op == StructOp::Add { (gx + gy) % q } else { gr.mulmod(gx, gy) }
            }
        };
        let acc = (target + q - ghost(&prev)) % q;
        let c = (acc / p.pow(n as u32)) % p;
        prev.push(c);
        out.push(k.constant(c as u32));
    }
    out
}

/// Digits of `x op y` (`y` ignored for negation), or `None` if `p^m` overflows.
pub fn ghost_lift(k: &Field, op: StructOp, x: &[RatFn], y: &[RatFn]) -> Option<Vec<RatFn>> {
    let gf = k.gf();
    let gr = Gr::new(gf, x.len() as u32)?;
    if k.r() == 0 && gf.degree() == 1 {
        return Some(run_prime(k, &gr, op, x, y));
    }
    Some(if k.r() == 0 {
        run(&ScalarAlg { gr, gf }, k, op, x, y)
    } else {
        run(&PolyAlg { gr, gf, nvars: k.r() }, k, op, x, y)
    })
}
