//! The Cohen–Witt ring `C_m(k) ⊂ W_m(k)`.
//!
//! A model fixes a p-basis `β` of `k` and representatives `s(β_μ)` with residue `β_μ`.
//! The λ-representative of `α` is `S(α) = Σ_I s(β)^I [λ_I(α)^{p^m}]`, and every member
//! of `C_m(k)` has a unique digit expansion `a = Σ_i p^i S(α_i)`. Elements are plain
//! Witt vectors; membership is decided by [`CohenRingModel::digitize`].

use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::{Field, RatFn};
use crate::pbasis::{lambda_dense, MultiIndex, PBasisTuple};
use crate::witt::{WittRing, WittVector};

/// Digit expansion `(α_0, ..., α_{m−1})` of a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohenDigits(pub Vec<RatFn>);

impl CohenDigits {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        serde_json::Value::from(self.0.iter().map(|d| field.format(d)).collect::<Vec<_>>())
    }
}

struct Inner {
    ring: WittRing,
    pbasis: PBasisTuple,
    reps: Vec<WittVector>,
    teichmuller_reps: bool,
    /// `s(β)^I`, indexed by [`MultiIndex::linear`].
    rep_monomials: Vec<OnceLock<WittVector>>,
    lower: OnceLock<Option<CohenRingModel>>,
}

#[derive(Clone)]
pub struct CohenRingModel(Arc<Inner>);

impl std::fmt::Debug for CohenRingModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let reps: Vec<Vec<String>> = self.0.reps.iter().map(|r| self.0.ring.format(r)).collect();
        write!(f, "C_{}({:?}; reps {:?})", self.len(), self.field(), reps)
    }
}

impl PartialEq for CohenRingModel {
    fn eq(&self, other: &Self) -> bool {
        self.0.ring == other.0.ring && self.0.pbasis == other.0.pbasis && self.0.reps == other.0.reps
    }
}

impl CohenRingModel {
    /// Checks that `pbasis` is a p-basis of the whole field, that each representative
    /// has the right residue, and that the representatives lie in `C_m(k)`.
    pub fn new(ring: &WittRing, pbasis: PBasisTuple, reps: Vec<WittVector>) -> Result<Self> {
        if pbasis.field() != ring.field() {
            return Err(Error::InvalidModel("p-basis lives in a different field".into()));
        }
        if !pbasis.is_p_basis() {
            return Err(Error::InvalidModel(format!(
                "a tuple of length {} is not a p-basis of a field of imperfection degree {}",
                pbasis.len(),
                ring.field().r()
            )));
        }
        if reps.len() != pbasis.len() {
            return Err(Error::InvalidModel("one representative per p-basis element is required".into()));
        }
        for (rep, b) in reps.iter().zip(pbasis.elements()) {
            ring.check(rep).map_err(|_| Error::InvalidModel("representative has the wrong length".into()))?;
            if rep.res() != b {
                return Err(Error::InvalidModel(format!(
                    "representative {:?} has residue {} instead of {}",
                    ring.format(rep),
                    ring.field().format(rep.res()),
                    ring.field().format(b)
                )));
            }
        }
        let standard = Self::build(ring, pbasis.clone(), pbasis.elements().iter().map(|b| ring.teichmuller(b)).collect());
        if reps.iter().any(|r| standard.digitize(r).is_err()) {
            return Err(Error::InvalidModel("representatives must lie in the Cohen–Witt subring".into()));
        }
        Ok(Self::build(ring, pbasis, reps))
    }

    fn build(ring: &WittRing, pbasis: PBasisTuple, reps: Vec<WittVector>) -> Self {
        let count = MultiIndex::count(ring.p(), ring.len() as u32, pbasis.len());
        let teichmuller_reps = reps.iter().all(|r| r.digits()[1..].iter().all(|d| d.is_zero()));
        CohenRingModel(Arc::new(Inner {
            ring: ring.clone(),
            pbasis,
            reps,
            teichmuller_reps,
            rep_monomials: (0..count).map(|_| OnceLock::new()).collect(),
            lower: OnceLock::new(),
        }))
    }

    /// Variables as p-basis with Teichmüller representatives.
    pub fn standard(field: &Field, m: usize) -> Result<Self> {
        let ring = WittRing::new(field, m)?;
        Self::with_teichmuller_reps(&ring, PBasisTuple::variables(field))
    }

    pub fn with_teichmuller_reps(ring: &WittRing, pbasis: PBasisTuple) -> Result<Self> {
        let reps = pbasis.elements().iter().map(|b| ring.teichmuller(b)).collect();
        if !pbasis.is_p_basis() {
            return Err(Error::InvalidModel("tuple is not a p-basis of the field".into()));
        }
        Ok(Self::build(ring, pbasis, reps))
    }

    /// Same p-basis, new representatives.
    pub fn with_reps(&self, reps: Vec<WittVector>) -> Result<Self> {
        Self::new(&self.0.ring, self.0.pbasis.clone(), reps)
    }

    pub fn ring(&self) -> &WittRing {
        &self.0.ring
    }

    pub fn field(&self) -> &Field {
        self.0.ring.field()
    }

    pub fn len(&self) -> usize {
        self.0.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn p(&self) -> u32 {
        self.0.ring.p()
    }

    pub fn pbasis(&self) -> &PBasisTuple {
        &self.0.pbasis
    }

    pub fn reps(&self) -> &[WittVector] {
        &self.0.reps
    }

    /// The model of length `n ≤ m` with truncated representatives.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.len() || n == 0 {
            return Err(Error::LevelError { requested: n as u32, available: self.len() as u32 });
        }
        let mut cur = self.clone();
        while cur.len() > n {
            cur = cur.lower().expect("length above one").clone();
        }
        Ok(cur)
    }

    fn lower(&self) -> Option<&CohenRingModel> {
        self.0
            .lower
            .get_or_init(|| {
                let n = self.len() - 1;
                if n == 0 {
                    return None;
                }
                let ring = self.0.ring.with_len(n).ok()?;
                let reps = self.0.reps.iter().map(|r| self.0.ring.truncate(r, n).unwrap()).collect();
                Some(Self::build(&ring, self.0.pbasis.clone(), reps))
            })
            .as_ref()
    }

    /// `s(β)^I`, cached.
    pub fn rep_monomial(&self, index: &MultiIndex) -> &WittVector {
        self.0.rep_monomials[index.linear()].get_or_init(|| {
            let ring = &self.0.ring;
            if self.0.teichmuller_reps {
                return ring.teichmuller(&self.0.pbasis.monomial(index).unwrap());
            }
            index
                .support()
                .fold(ring.one(), |acc, (mu, e)| ring.mul(&acc, &ring.pow(&self.0.reps[mu], e as u64)))
        })
    }

    /// `S(α)` at the full length.
    pub fn lambda_representative(&self, alpha: &RatFn) -> Result<WittVector> {
        let ring = &self.0.ring;
        let k = ring.field();
        let m = ring.len() as u32;
        let coeffs = lambda_dense(&self.0.pbasis, m, alpha)?;
        let nu = self.0.pbasis.len();
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = MultiIndex::from_linear(self.p(), m, nu, i);
            terms.push(ring.mul_teichmuller(&k.frobenius_pow(c, m), self.rep_monomial(&idx)));
        }
        Ok(ring.sum(&terms))
    }

    /// Digits `α_i` with `a = Σ_i p^i S(α_i)`, or [`Error::NotMember`].
    pub fn digitize(&self, a: &WittVector) -> Result<CohenDigits> {
        let full = &self.0.ring;
        full.check(a)?;
        let m = self.len();
        let mut digits = Vec::with_capacity(m);
        let mut cur = a.clone();
        for i in 0..m {
            let ring = full.with_len(m - i)?;
            let alpha = cur.res().clone();
            let rep = full.truncate(&self.lambda_representative(&alpha)?, m - i)?;
            let rest = ring.sub(&cur, &rep);
            digits.push(alpha);
            if i + 1 < m {
                cur = ring.div_by_p(&rest).map_err(|_| Error::NotMember)?;
            }
        }
        Ok(CohenDigits(digits))
    }

    pub fn is_member(&self, a: &WittVector) -> bool {
        self.digitize(a).is_ok()
    }

    /// `Σ_i p^i S(α_i)`.
    pub fn undigitize(&self, digits: &CohenDigits) -> Result<WittVector> {
        let ring = &self.0.ring;
        let m = self.len();
        if digits.len() != m {
            return Err(Error::LevelError { requested: digits.len() as u32, available: m as u32 });
        }
        let mut terms = Vec::with_capacity(m);
        for (i, alpha) in digits.0.iter().enumerate() {
            if !alpha.is_zero() {
                terms.push(ring.times_p_pow(&self.lambda_representative(alpha)?, i));
            }
        }
        Ok(ring.sum(&terms))
    }

    /// `[α]` for `α` in the perfect core `k^{p^∞}`, which for `F_q(t1..tr)` is `F_q`.
    /// Computed as `lift(α^{p^{−m}})^{p^m}`.
    pub fn multiplicative_representative(&self, alpha: &RatFn) -> Result<WittVector> {
        let ring = &self.0.ring;
        let k = ring.field();
        if !alpha.is_constant() {
            return Err(Error::NotInPerfectCore);
        }
        let root = k.pth_root_iter(alpha, ring.len() as u32).ok_or(Error::NotInPerfectCore)?;
        Ok(ring.pow(&ring.teichmuller(&root), (self.p() as u64).pow(ring.len() as u32)))
    }

    /// `{field, m, pbasis, reps}`.
    pub fn to_json(&self) -> serde_json::Value {
        let k = self.field();
        serde_json::json!({
            "field": k.descriptor(),
            "m": self.len(),
            "pbasis": self.pbasis().elements().iter().map(|b| k.format(b)).collect::<Vec<_>>(),
            "reps": self.reps().iter().map(|r| self.ring().to_json(r)).collect::<Vec<_>>(),
        })
    }

    /// Random member from random digits.
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: u32, max_terms: usize) -> WittVector {
        let k = self.field();
        let digits = (0..self.len()).map(|_| k.random(rng, max_deg, max_terms, true)).collect();
        self.undigitize(&CohenDigits(digits)).expect("digit count matches")
    }
}

/// `𝒮(b, α) = Σ_I b^I [λ_I(α)^{p^n}]` in `W_n(k)` for an arbitrary tuple `b` whose
/// residues are p-independent; [`Error::NotInSpan`] outside `k^{p^n}(res b)`.
pub fn lambda_rep_for(ring: &WittRing, b: &[WittVector], alpha: &RatFn) -> Result<WittVector> {
    let k = ring.field();
    let beta = PBasisTuple::new(k, b.iter().map(|x| x.res().clone()).collect())?;
    let n = ring.len() as u32;
    let coeffs = lambda_dense(&beta, n, alpha)?;
    Ok(lambda_sum(ring, b, &coeffs))
}

/// `Σ_I b^I [c_I^{p^n}]` for dense coefficients `c`.
pub fn lambda_sum(ring: &WittRing, b: &[WittVector], coeffs: &[RatFn]) -> WittVector {
    let k = ring.field();
    let n = ring.len() as u32;
    let mut terms = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let idx = MultiIndex::from_linear(k.p(), n, b.len(), i);
        let mono = idx.support().fold(ring.one(), |acc, (mu, e)| ring.mul(&acc, &ring.pow(&b[mu], e as u64)));
        terms.push(ring.mul_teichmuller(&k.frobenius_pow(c, n), &mono));
    }
    ring.sum(&terms)
}

/// The family `C_1(k), ..., C_M(k)` with truncation maps.
#[derive(Clone, Debug)]
pub struct CohenTower {
    models: Vec<CohenRingModel>,
}

impl CohenTower {
    /// Truncations of a top model.
    pub fn from_top(top: &CohenRingModel) -> Self {
        let models = (1..=top.len()).map(|n| top.truncated(n).unwrap()).collect();
        CohenTower { models }
    }

    /// An explicit family; entry `i` must have length `i + 1`.
    pub fn from_models(models: Vec<CohenRingModel>) -> Result<Self> {
        for (i, m) in models.iter().enumerate() {
            if m.len() != i + 1 {
                return Err(Error::InvalidModel(format!("tower entry {i} has length {}", m.len())));
            }
            if m.field() != models[0].field() || m.pbasis() != models[0].pbasis() {
                return Err(Error::InvalidModel("tower entries must share field and p-basis".into()));
            }
        }
        Ok(CohenTower { models })
    }

    pub fn models(&self) -> &[CohenRingModel] {
        &self.models
    }

    pub fn level(&self, n: usize) -> &CohenRingModel {
        &self.models[n - 1]
    }

    /// Checks `res_{n,l}(S_n(α)) = S_l(α)` for all `l < n` and every sample.
    pub fn verify(&self, samples: &[RatFn]) -> Result<()> {
        for alpha in samples {
            for (ui, upper) in self.models.iter().enumerate() {
                let rep = upper.lambda_representative(alpha)?;
                for lower in &self.models[..ui] {
                    let truncated = upper.ring().truncate(&rep, lower.len())?;
                    if truncated != lower.lambda_representative(alpha)? {
                        return Err(Error::TowerIncompatible {
                            upper: upper.len(),
                            lower: lower.len(),
                            alpha: upper.field().format(alpha),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2t() -> Field {
        Field::new(2, 1, 1).unwrap()
    }

    #[test]
    fn representative_examples() {
        let k = f2t();
        let c = CohenRingModel::standard(&k, 2).unwrap();
        let w = c.ring();
        let rep = |s: &str| w.format(&c.lambda_representative(&k.parse(s).unwrap()).unwrap());
        assert_eq!(rep("t"), ["t", "0"]);
        assert_eq!(rep("t+1"), ["1+t", "t"]);
        assert_eq!(rep("1"), ["1", "0"]);
        assert_eq!(rep("0"), ["0", "0"]);
    }

    #[test]
    fn digit_examples() {
        let k = f2t();
        let c = CohenRingModel::standard(&k, 2).unwrap();
        let w = c.ring();
        let d = c.digitize(&w.parse(&["t", "1"]).unwrap()).unwrap();
        assert_eq!(d.to_json(&k), serde_json::json!(["t", "1"]));
        assert_eq!(c.digitize(&w.parse(&["0", "t"]).unwrap()), Err(Error::NotMember));
        let d = c.digitize(&w.parse(&["0", "1"]).unwrap()).unwrap();
        assert_eq!(d.to_json(&k), serde_json::json!(["0", "1"]));
        assert_eq!(w.format(&c.undigitize(&d).unwrap()), ["0", "1"]);
        assert_eq!(c.undigitize(&CohenDigits(vec![k.zero(), k.zero()])).unwrap(), w.zero());
        assert_eq!(c.undigitize(&CohenDigits(vec![k.one(), k.zero()])).unwrap(), w.one());
    }

    #[test]
    fn roundtrip_and_closure() {
        let k = f2t();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=3 {
            let c = CohenRingModel::standard(&k, m).unwrap();
            for _ in 0..10 {
                let a = c.random_member(&mut rng, 2, 2);
                let b = c.random_member(&mut rng, 2, 2);
                let d = c.digitize(&a).unwrap();
                assert_eq!(c.undigitize(&d).unwrap(), a);
                assert!(c.is_member(&c.ring().add(&a, &b)));
                assert!(c.is_member(&c.ring().mul(&a, &b)));
            }
        }
    }

    #[test]
    fn multiplicative_representatives() {
        let f4 = Field::new(2, 2, 0).unwrap();
        let c = CohenRingModel::standard(&f4, 2).unwrap();
        let w = f4.generator().unwrap();
        let r = c.multiplicative_representative(&w).unwrap();
        assert_eq!(r, c.ring().teichmuller(&w));
        let root = c.ring().teichmuller(&f4.pth_root(&w).unwrap());
        assert_eq!(c.ring().mul(&root, &root), r);
        assert_eq!(c.multiplicative_representative(&f4.one()).unwrap(), c.ring().one());

        let k = f2t();
        let c = CohenRingModel::standard(&k, 2).unwrap();
        assert_eq!(c.multiplicative_representative(&k.var(0)), Err(Error::NotInPerfectCore));
    }

    #[test]
    fn tower_checks() {
        let k = f2t();
        let top = CohenRingModel::standard(&k, 3).unwrap();
        let tower = CohenTower::from_top(&top);
        assert_eq!(tower.level(1).len(), 1);
        let polys: Vec<RatFn> = ["t", "1+t", "t^3+t", "t^5+t^2"].iter().map(|s| k.parse(s).unwrap()).collect();
        tower.verify(&polys).unwrap();

        // Two nonzero coefficients in one residue class mod p^2 break the truncation law.
        let mixed = vec![k.parse("(1)/(1+t)").unwrap()];
        assert!(matches!(tower.verify(&mixed), Err(Error::TowerIncompatible { upper: 3, lower: 2, .. })));

        let mut models = tower.models().to_vec();
        let w2 = models[1].ring().clone();
        let bent = w2.add(&w2.teichmuller(&k.var(0)), &w2.from_int(2));
        models[1] = models[1].with_reps(vec![bent]).unwrap();
        let err = CohenTower::from_models(models).unwrap().verify(&polys[..1]).unwrap_err();
        assert!(matches!(err, Error::TowerIncompatible { .. }));
    }

    #[test]
    fn rejects_bad_models() {
        let k = f2t();
        let w = WittRing::new(&k, 2).unwrap();
        let beta = PBasisTuple::variables(&k);
        let wrong_residue = vec![w.teichmuller(&k.one())];
        assert!(CohenRingModel::new(&w, beta.clone(), wrong_residue).is_err());
        let outside = vec![w.parse(&["t", "t"]).unwrap()];
        assert!(CohenRingModel::new(&w, beta, outside).is_err());
    }
}
