//! Multi-indices, p-independence and λ-decompositions.
//!
//! For a tuple `β = (β_1, ..., β_ν)` and a level `m`, every `α` in `k^{p^m}(β)` has a
//! unique expansion `α = Σ_I β^I λ_I(α)^{p^m}` over multi-indices `I` with entries in
//! `[0, p^m)`. When `β` is a permutation of the variables of `F_q(t1..tr)` the
//! coefficients are read off exponent digits; otherwise they come from a linear system
//! over `k` built from the variable expansion.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::fields::{Field, Mono, Poly, RatFn};

/// An exponent tuple with entries in `[0, p^level)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    p: u32,
    level: u32,
    exps: SmallVec<[u32; 4]>,
}

impl MultiIndex {
    pub fn new(p: u32, level: u32, exps: &[u32]) -> Result<Self> {
        let bound = (p as u64).pow(level);
        if let Some(&e) = exps.iter().find(|&&e| e as u64 >= bound) {
            return Err(Error::IndexMismatch(format!("exponent {e} out of range [0, {bound})")));
        }
        Ok(MultiIndex { p, level, exps: exps.iter().copied().collect() })
    }

    pub fn zero(p: u32, level: u32, nu: usize) -> Self {
        MultiIndex { p, level, exps: SmallVec::from_elem(0, nu) }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Non-zero entries as `(position, exponent)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps.iter().copied().enumerate().filter(|&(_, e)| e != 0)
    }

    /// Coordinate-wise reduction modulo `p^l`.
    pub fn reduce(&self, l: u32) -> Result<Self> {
        if l > self.level {
            return Err(Error::LevelError { requested: l, available: self.level });
        }
        let q = self.p.pow(l);
        Ok(MultiIndex { p: self.p, level: l, exps: self.exps.iter().map(|&e| e % q).collect() })
    }

    /// `I ⊕ J = (i_μ + p^l j_μ)` where `l` is the level of `self`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.exps.len() != other.exps.len() {
            return Err(Error::IndexMismatch(format!("cannot combine {self} and {other}")));
        }
        let shift = self.p.pow(self.level);
        Ok(MultiIndex {
            p: self.p,
            level: self.level + other.level,
            exps: self.exps.iter().zip(&other.exps).map(|(&i, &j)| i + shift * j).collect(),
        })
    }

    /// Position in the enumeration of [`MultiIndex::all`].
    pub fn linear(&self) -> usize {
        let q = self.p.pow(self.level) as usize;
        self.exps.iter().rev().fold(0, |acc, &e| acc * q + e as usize)
    }

    pub fn from_linear(p: u32, level: u32, nu: usize, mut idx: usize) -> Self {
        let q = p.pow(level) as usize;
        let exps = (0..nu)
            .map(|_| {
                let e = idx % q;
                idx /= q;
                e as u32
            })
            .collect();
        MultiIndex { p, level, exps }
    }

    /// Number of multi-indices of length `nu` at `level`: `p^{level·nu}`.
    pub fn count(p: u32, level: u32, nu: usize) -> usize {
        (p as usize).pow(level * nu as u32)
    }

    /// All of `P_{ν,level}`, first entry varying fastest.
    pub fn all(p: u32, level: u32, nu: usize) -> impl Iterator<Item = MultiIndex> {
        (0..Self::count(p, level, nu)).map(move |i| Self::from_linear(p, level, nu, i))
    }

    /// Parses `(i,j,...)`.
    pub fn parse(p: u32, level: u32, s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::IndexMismatch(format!("bad multi-index {s:?}")))?;
        let exps = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|x| x.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::IndexMismatch(format!("bad multi-index {s:?}")))?
        };
        Self::new(p, level, &exps)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `β^I`.
pub fn monomial(field: &Field, beta: &[RatFn], index: &MultiIndex) -> Result<RatFn> {
    if beta.len() != index.len() {
        return Err(Error::IndexMismatch(format!(
            "tuple of length {} against multi-index {index}",
            beta.len()
        )));
    }
    Ok(index.support().fold(field.one(), |acc, (mu, e)| field.mul(&acc, &field.pow(&beta[mu], e as u64))))
}

/// A certified p-independent tuple.
#[derive(Clone, Debug)]
pub struct PBasisTuple {
    field: Field,
    beta: Vec<RatFn>,
    certified_level: u32,
    /// `perm[μ] = i` when `β_μ = t_i` and `β` is a permutation of the variables.
    perm: Option<Vec<usize>>,
}

impl PartialEq for PBasisTuple {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.beta == other.beta
    }
}

impl PBasisTuple {
    pub fn new(field: &Field, beta: Vec<RatFn>) -> Result<Self> {
        for b in &beta {
            field.validate(b)?;
        }
        if !is_p_independent(field, &beta, 1) {
            return Err(Error::NotPIndependent);
        }
        let perm = variable_permutation(field, &beta);
        Ok(PBasisTuple { field: field.clone(), beta, certified_level: 1, perm })
    }

    /// `(t1, ..., tr)`.
    pub fn variables(field: &Field) -> Self {
        PBasisTuple {
            field: field.clone(),
            beta: field.vars(),
            certified_level: 1,
            perm: Some((0..field.r()).collect()),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn elements(&self) -> &[RatFn] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn certified_level(&self) -> u32 {
        self.certified_level
    }

    /// Re-checks independence at level `m` through the full linear system.
    pub fn certify(&mut self, m: u32) -> bool {
        if is_p_independent(&self.field, &self.beta, m) {
            self.certified_level = self.certified_level.max(m);
            true
        } else {
            false
        }
    }

    /// A p-basis of the whole field (then every decomposition exists).
    pub fn is_p_basis(&self) -> bool {
        self.beta.len() == self.field.r()
    }

    pub fn is_variables(&self) -> bool {
        self.perm.as_ref().is_some_and(|p| p.iter().enumerate().all(|(i, &j)| i == j))
    }

    pub fn monomial(&self, index: &MultiIndex) -> Result<RatFn> {
        monomial(&self.field, &self.beta, index)
    }
}

fn variable_permutation(field: &Field, beta: &[RatFn]) -> Option<Vec<usize>> {
    if beta.len() != field.r() {
        return None;
    }
    let vars = field.vars();
    let perm: Vec<usize> = beta.iter().map(|b| vars.iter().position(|v| v == b)).collect::<Option<_>>()?;
    let mut seen = vec![false; perm.len()];
    for &i in &perm {
        if std::mem::replace(&mut seen[i], true) {
            return None;
        }
    }
    Some(perm)
}

/// Coefficients `λ_I(α)` for all `I ∈ P_{ν,m}`, with zeros omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaDecomposition {
    level: u32,
    nu: usize,
    p: u32,
    coefficients: BTreeMap<MultiIndex, RatFn>,
}

impl LambdaDecomposition {
    fn from_dense(p: u32, level: u32, nu: usize, dense: Vec<RatFn>) -> Self {
        let coefficients = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (MultiIndex::from_linear(p, level, nu, i), c))
            .collect();
        LambdaDecomposition { level, nu, p, coefficients }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiIndex, RatFn> {
        &self.coefficients
    }

    /// `λ_I(α)`, zero when absent.
    pub fn get(&self, field: &Field, index: &MultiIndex) -> RatFn {
        self.coefficients.get(index).cloned().unwrap_or_else(|| field.zero())
    }

    /// Dense coefficient vector in [`MultiIndex::all`] order.
    pub fn to_dense(&self, field: &Field) -> Vec<RatFn> {
        let mut out = vec![field.zero(); MultiIndex::count(self.p, self.level, self.nu)];
        for (i, c) in &self.coefficients {
            out[i.linear()] = c.clone();
        }
        out
    }

    /// `Σ_I β^I λ_I^{p^m}`.
    pub fn reconstruct(&self, beta: &PBasisTuple) -> Result<RatFn> {
        let k = beta.field();
        let mut acc = k.zero();
        for (i, c) in &self.coefficients {
            acc = k.add(&acc, &k.mul(&beta.monomial(i)?, &k.frobenius_pow(c, self.level)));
        }
        Ok(acc)
    }

    /// JSON object keyed by `(i,j,...)`.
    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        let map = self
            .coefficients
            .iter()
            .map(|(i, c)| (i.to_string(), serde_json::Value::String(field.format(c))))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Expansion against the variables: `α = Σ_E t^E μ_E(α)^{p^m}`, dense in
/// [`MultiIndex::all`] order over `r` positions.
pub fn variable_expansion(field: &Field, m: u32, alpha: &RatFn) -> Vec<RatFn> {
    let gf = field.gf();
    let r = field.r();
    let q = field.p().pow(m);
    let (num, den) = (alpha.numerator(), alpha.denominator());
    // α = f g^{q-1} / g^q
    let h = if den.is_one() { num.clone() } else { num.mul(gf, &den.pow(gf, q as u64 - 1)) };
    let count = MultiIndex::count(field.p(), m, r);
    let mut buckets: Vec<Vec<(Mono, u32)>> = vec![Vec::new(); count];
    for (mono, c) in h.terms() {
        let mut idx = 0usize;
        for &e in mono.iter().rev() {
            idx = idx * q as usize + (e % q) as usize;
        }
        let quot: Mono = mono.iter().map(|&e| e / q).collect();
        let mut root = *c;
        for _ in 0..m {
            root = gf.frobenius_inv(root);
        }
        buckets[idx].push((quot, root));
    }
    buckets
        .into_iter()
        .map(|terms| {
            let poly = Poly::from_terms(gf, r, terms);
            field.fraction(poly, den.clone()).expect("denominator is nonzero")
        })
        .collect()
}

/// Unique `λ^β_I(α)` at level `m`, or [`Error::NotInSpan`].
pub fn lambda_decompose(beta: &PBasisTuple, m: u32, alpha: &RatFn) -> Result<LambdaDecomposition> {
    let k = beta.field();
    k.validate(alpha)?;
    Ok(LambdaDecomposition::from_dense(k.p(), m, beta.len(), lambda_dense(beta, m, alpha)?))
}

/// Dense λ-coefficients in [`MultiIndex::all`] order.
pub fn lambda_dense(beta: &PBasisTuple, m: u32, alpha: &RatFn) -> Result<Vec<RatFn>> {
    let k = beta.field();
    if let Some(perm) = &beta.perm {
        let by_var = variable_expansion(k, m, alpha);
        if beta.is_variables() {
            return Ok(by_var);
        }
        let p = k.p();
        let nu = beta.len();
        return Ok((0..by_var.len())
            .map(|i| {
                let ib = MultiIndex::from_linear(p, m, nu, i);
                let mut ev = SmallVec::<[u32; 4]>::from_elem(0, nu);
                for (mu, &v) in perm.iter().enumerate() {
                    ev[v] = ib.exps[mu];
                }
                by_var[MultiIndex { p, level: m, exps: ev }.linear()].clone()
            })
            .collect());
    }
    let order: Vec<usize> = (0..MultiIndex::count(k.p(), m, beta.len())).collect();
    lambda_dense_by_elimination(beta, m, alpha, &order)
}

/// Solves the coordinate system with unknowns taken in the given column order.
pub fn lambda_dense_by_elimination(beta: &PBasisTuple, m: u32, alpha: &RatFn, order: &[usize]) -> Result<Vec<RatFn>> {
    let k = beta.field();
    let matrix = coordinate_matrix(k, beta.elements(), m)?;
    let rhs = variable_expansion(k, m, alpha);
    let permuted: Vec<Vec<RatFn>> =
        matrix.iter().map(|row| order.iter().map(|&j| row[j].clone()).collect()).collect();
    let sol = solve(k, permuted, rhs)?.ok_or(Error::NotInSpan)?;
    let mut out = vec![k.zero(); order.len()];
    for (pos, &j) in order.iter().enumerate() {
        out[j] = sol[pos].clone();
    }
    Ok(out)
}

/// `A[J][I] = μ_J(β^I)`, a `p^{rm} × p^{νm}` matrix over `k`.
fn coordinate_matrix(k: &Field, beta: &[RatFn], m: u32) -> Result<Vec<Vec<RatFn>>> {
    let p = k.p();
    let rows = MultiIndex::count(p, m, k.r());
    let mut matrix = vec![Vec::new(); rows];
    for idx in MultiIndex::all(p, m, beta.len()) {
        let col = variable_expansion(k, m, &monomial(k, beta, &idx)?);
        for (row, entry) in matrix.iter_mut().zip(col) {
            row.push(entry);
        }
    }
    Ok(matrix)
}

fn weight(x: &RatFn) -> usize {
    x.numerator().len() + x.denominator().len()
}

/// Row reduction. Returns `Ok(None)` for an inconsistent system and
/// [`Error::NotPIndependent`] when the columns are dependent.
fn solve(k: &Field, mut a: Vec<Vec<RatFn>>, mut b: Vec<RatFn>) -> Result<Option<Vec<RatFn>>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut row = 0;
    let mut pivots = Vec::with_capacity(cols);
    for col in 0..cols {
        let pivot = (row..rows).filter(|&i| !a[i][col].is_zero()).min_by_key(|&i| weight(&a[i][col]));
        let Some(pr) = pivot else {
            return Err(Error::NotPIndependent);
        };
        a.swap(row, pr);
        b.swap(row, pr);
        let inv = k.inv(&a[row][col])?;
        for j in col..cols {
            a[row][j] = k.mul(&a[row][j], &inv);
        }
        b[row] = k.mul(&b[row], &inv);
        for i in 0..rows {
            if i == row || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in col..cols {
                if !a[row][j].is_zero() {
                    let t = k.mul(&f, &a[row][j]);
                    a[i][j] = k.sub(&a[i][j], &t);
                }
            }
            let t = k.mul(&f, &b[row]);
            b[i] = k.sub(&b[i], &t);
        }
        pivots.push(row);
        row += 1;
    }
    if b[row..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    Ok(Some(pivots.into_iter().map(|r| b[r].clone()).collect()))
}

fn rank(k: &Field, mut a: Vec<Vec<RatFn>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).filter(|&i| !a[i][col].is_zero()).min_by_key(|&i| weight(&a[i][col])) else {
            continue;
        };
        a.swap(row, pr);
        let inv = k.inv(&a[row][col]).expect("pivot is nonzero");
        for i in row + 1..rows {
            if a[i][col].is_zero() {
                continue;
            }
            let f = k.mul(&a[i][col], &inv);
            for j in col..cols {
                if !a[row][j].is_zero() {
                    let t = k.mul(&f, &a[row][j]);
                    a[i][j] = k.sub(&a[i][j], &t);
                }
            }
        }
        row += 1;
    }
    row
}

/// True iff the `p^{νm}` monomials `β^I` are linearly independent over `k^{p^m}`.
///
/// Decided as a full-column-rank check of the coordinate matrix against the variables.
pub fn is_p_independent(field: &Field, beta: &[RatFn], m: u32) -> bool {
    if beta.is_empty() {
        return true;
    }
    if beta.len() > field.r() || beta.iter().any(|b| b.is_zero()) {
        return false;
    }
    if m == 0 {
        return true;
    }
    if variable_permutation(field, beta).is_some() {
        return true;
    }
    match coordinate_matrix(field, beta, m) {
        Ok(matrix) => rank(field, matrix) == MultiIndex::count(field.p(), m, beta.len()),
        Err(_) => false,
    }
}
