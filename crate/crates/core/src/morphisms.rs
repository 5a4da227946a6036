//! Morphisms of Cohen–Witt rings built from generator data.
//!
//! A morphism is stored as a residue-field homomorphism `φ_k` plus images `r_μ` of the
//! source representatives. It is evaluated by digitizing in the source and sending
//! `Σ_i p^i S(α_i)` to `Σ_i p^i Σ_I r^I [φ_k(λ_I(α_i))^{p^m}]`.

use std::sync::{Arc, OnceLock};

use crate::cohen::{lambda_rep_for, CohenRingModel};
use crate::error::{Error, Result};
use crate::fields::{Field, FieldHom, RatFn};
use crate::pbasis::{is_p_independent, lambda_dense, MultiIndex, PBasisTuple};
use crate::witt::{WittRing, WittVector};

struct Inner {
    source: CohenRingModel,
    target: CohenRingModel,
    residue_map: FieldHom,
    rep_images: Vec<WittVector>,
    monomials: Vec<OnceLock<WittVector>>,
}

#[derive(Clone)]
pub struct CohenMorphism(Arc<Inner>);

impl std::fmt::Debug for CohenMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CohenMorphism({:?} -> {:?})", self.0.source, self.0.target)
    }
}

impl CohenMorphism {
    /// Residues of `rep_images` must be the `φ_k`-images of the source p-basis, and the
    /// images must lie in the target Cohen–Witt ring.
    pub fn new(
        source: &CohenRingModel,
        target: &CohenRingModel,
        residue_map: FieldHom,
        rep_images: Vec<WittVector>,
    ) -> Result<Self> {
        if residue_map.source() != source.field() || residue_map.target() != target.field() {
            return Err(Error::ModelMismatch("residue map does not connect the two residue fields".into()));
        }
        if source.len() != target.len() {
            return Err(Error::ModelMismatch(format!("lengths {} and {} differ", source.len(), target.len())));
        }
        if rep_images.len() != source.pbasis().len() {
            return Err(Error::ModelMismatch("one image per source representative is required".into()));
        }
        for (r, b) in rep_images.iter().zip(source.pbasis().elements()) {
            target.ring().check(r).map_err(|_| Error::ModelMismatch("image has the wrong length".into()))?;
            if *r.res() != residue_map.apply(b)? {
                return Err(Error::ModelMismatch("image residue differs from the residue-field image".into()));
            }
            if !target.is_member(r) {
                return Err(Error::ModelMismatch("image is outside the target Cohen–Witt ring".into()));
            }
        }
        let count = MultiIndex::count(source.p(), source.len() as u32, source.pbasis().len());
        Ok(CohenMorphism(Arc::new(Inner {
            source: source.clone(),
            target: target.clone(),
            residue_map,
            rep_images,
            monomials: (0..count).map(|_| OnceLock::new()).collect(),
        })))
    }

    pub fn identity(model: &CohenRingModel) -> Self {
        Self::new(model, model, FieldHom::identity(model.field()), model.reps().to_vec()).expect("identity data is valid")
    }

    pub fn source(&self) -> &CohenRingModel {
        &self.0.source
    }

    pub fn target(&self) -> &CohenRingModel {
        &self.0.target
    }

    pub fn residue_map(&self) -> &FieldHom {
        &self.0.residue_map
    }

    pub fn rep_images(&self) -> &[WittVector] {
        &self.0.rep_images
    }

    fn image_monomial(&self, idx: &MultiIndex) -> &WittVector {
        self.0.monomials[idx.linear()].get_or_init(|| {
            let ring = self.0.target.ring();
            idx.support().fold(ring.one(), |acc, (mu, e)| ring.mul(&acc, &ring.pow(&self.0.rep_images[mu], e as u64)))
        })
    }

    /// Image of `S_source(α)`.
    pub fn apply_representative(&self, alpha: &RatFn) -> Result<WittVector> {
        let src = &self.0.source;
        let ring = self.0.target.ring();
        let k2 = ring.field();
        let m = src.len() as u32;
        let coeffs = lambda_dense(src.pbasis(), m, alpha)?;
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = MultiIndex::from_linear(src.p(), m, src.pbasis().len(), i);
            let image = k2.frobenius_pow(&self.0.residue_map.apply(c)?, m);
            terms.push(ring.mul_teichmuller(&image, self.image_monomial(&idx)));
        }
        Ok(ring.sum(&terms))
    }

    /// [`Error::NotMember`] if `a` is outside the source Cohen–Witt ring.
    pub fn apply(&self, a: &WittVector) -> Result<WittVector> {
        let digits = self.0.source.digitize(a)?;
        let ring = self.0.target.ring();
        let mut terms = Vec::new();
        for (i, alpha) in digits.0.iter().enumerate() {
            if !alpha.is_zero() {
                terms.push(ring.times_p_pow(&self.apply_representative(alpha)?, i));
            }
        }
        Ok(ring.sum(&terms))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CohenMorphism) -> Result<CohenMorphism> {
        if self.0.target != other.0.source {
            return Err(Error::ModelMismatch("target and source of the composed maps differ".into()));
        }
        let residue_map = self.0.residue_map.then(&other.0.residue_map)?;
        let images = self.0.rep_images.iter().map(|r| other.apply(r)).collect::<Result<Vec<_>>>()?;
        CohenMorphism::new(&self.0.source, &other.0.target, residue_map, images)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let k2 = self.0.target.field();
        serde_json::json!({
            "source": self.0.source.to_json(),
            "target": self.0.target.to_json(),
            "residue_map": self.0.residue_map.images().iter().map(|x| k2.format(x)).collect::<Vec<_>>(),
            "rep_images": self.0.rep_images.iter().map(|r| self.0.target.ring().to_json(r)).collect::<Vec<_>>(),
        })
    }
}

/// The unique isomorphism between two models of `C_m(k)` over the same p-basis that is
/// the identity on `k` and sends `s_1(β)` to `s_2(β)`.
pub fn structure_isomorphism(m1: &CohenRingModel, m2: &CohenRingModel) -> Result<CohenMorphism> {
    if m1.field() != m2.field() {
        return Err(Error::ModelMismatch("residue fields differ".into()));
    }
    if m1.len() != m2.len() {
        return Err(Error::ModelMismatch(format!("lengths {} and {} differ", m1.len(), m2.len())));
    }
    if m1.pbasis() != m2.pbasis() {
        return Err(Error::ModelMismatch("p-bases differ".into()));
    }
    CohenMorphism::new(m1, m2, FieldHom::identity(m1.field()), m2.reps().to_vec())
}

/// A model over a subfield `k_0` together with its residue embedding into `k_1`.
#[derive(Clone, Debug)]
pub struct BaseModel {
    pub model: CohenRingModel,
    pub inclusion: FieldHom,
}

/// Extends `phi_k: k_1 → k_2` to `m1 → m2`, sending `s_1(β_μ)` to `S_2(φ_k(β_μ))`.
///
/// `relative` witnesses separability of `k_1` over the base: together with the image of
/// the base p-basis it must be p-independent in `k_1`. The result is checked to agree
/// on base members with the base embedding into `m2`.
pub fn embedding_over_base(
    base: &BaseModel,
    m1: &CohenRingModel,
    m2: &CohenRingModel,
    phi_k: &FieldHom,
    relative: &[RatFn],
) -> Result<CohenMorphism> {
    let k0 = base.model.field();
    let k1 = m1.field();
    if base.inclusion.source() != k0 || base.inclusion.target() != k1 {
        return Err(Error::ModelMismatch("base inclusion does not land in the source field".into()));
    }
    if base.model.len() != m1.len() {
        return Err(Error::ModelMismatch("base model has a different length".into()));
    }
    let mut witness = base
        .model
        .pbasis()
        .elements()
        .iter()
        .map(|b| base.inclusion.apply(b))
        .collect::<Result<Vec<_>, _>>()?;
    witness.extend(relative.iter().cloned());
    if !is_p_independent(k1, &witness, 1) {
        let shown: Vec<String> = witness.iter().map(|x| k1.format(x)).collect();
        return Err(Error::SeparabilityWitnessInvalid(format!("({}) is p-dependent", shown.join(", "))));
    }
    let images = m1
        .pbasis()
        .elements()
        .iter()
        .map(|b| m2.lambda_representative(&phi_k.apply(b)?))
        .collect::<Result<Vec<_>>>()?;
    let phi = CohenMorphism::new(m1, m2, phi_k.clone(), images)?;

    let into_m1 = base_embedding(&base.model, m1, &base.inclusion)?;
    let into_m2 = base_embedding(&base.model, m2, &base.inclusion.then(phi_k)?)?;
    for r in base.model.reps() {
        if phi.apply(&into_m1.apply(r)?)? != into_m2.apply(r)? {
            return Err(Error::ModelMismatch("extension does not fix the base".into()));
        }
    }
    Ok(phi)
}

fn base_embedding(base: &CohenRingModel, model: &CohenRingModel, inclusion: &FieldHom) -> Result<CohenMorphism> {
    let images = base
        .pbasis()
        .elements()
        .iter()
        .map(|b| model.lambda_representative(&inclusion.apply(b)?))
        .collect::<Result<Vec<_>>>()?;
    CohenMorphism::new(base, model, inclusion.clone(), images)
}

/// Stage `n` of formally adjoining `p^n`-th roots of the variables.
#[derive(Clone, Debug)]
pub struct TeichmullerEmbedding {
    pub morphism: CohenMorphism,
    pub stage: u32,
    /// `[u_μ]` with `[u_μ]^{p^n}` equal to the image of `s(t_μ)`.
    pub witnesses: Vec<WittVector>,
}

/// Embeds a model over `k = F_q(t_1..t_r)` into the standard model over
/// `F_q(u_1..u_r)` with `t_i = u_i^{p^n}`, sending `s(t_μ)` to `[u_μ]^{p^n}`.
pub fn tep_embed(model: &CohenRingModel, stage: u32) -> Result<TeichmullerEmbedding> {
    let m = model.len();
    if stage as usize > m {
        return Err(Error::StageError { stage: stage as usize, len: m });
    }
    if !model.pbasis().is_variables() {
        return Err(Error::InvalidModel("stage embedding needs the variables as p-basis".into()));
    }
    let k = model.field();
    let k_n = k.clone();
    let phi_k = FieldHom::frobenius_twist(k, stage);
    let target = CohenRingModel::standard(&k_n, m)?;
    let ring = target.ring();
    let witnesses: Vec<WittVector> = (0..k.r()).map(|i| ring.teichmuller(&k_n.var(i))).collect();
    let q = (k.p() as u64).pow(stage);
    let images = witnesses.iter().map(|w| ring.pow(w, q)).collect();
    let morphism = CohenMorphism::new(model, &target, phi_k, images)?;
    Ok(TeichmullerEmbedding { morphism, stage, witnesses })
}

/// A sample `(b, α)` for the enrichment law: `b` has p-independent residues and
/// `α ∈ k^{p^m}(res b)`.
#[derive(Clone, Debug)]
pub struct EnrichmentSample {
    pub b: Vec<WittVector>,
    pub alpha: RatFn,
}

#[derive(Clone, Debug)]
pub struct Discrepancy {
    pub index: usize,
    pub lhs: WittVector,
    pub rhs: WittVector,
}

#[derive(Clone, Debug, Default)]
pub struct EnrichmentReport {
    pub checked: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl EnrichmentReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Right side `S_2(φ(b), φ_k(α))` of the enrichment law.
///
/// When `φ_k(res b)` is p-independent in the target this is the target's own
/// λ-representative. Otherwise (stage embeddings, Frobenius twists) the decomposition is
/// taken inside the image subfield: coefficients `φ_k(λ_I(α))`.
pub fn enrichment_rhs(
    target: &WittRing,
    phi_k: &FieldHom,
    b_image: &[WittVector],
    source_field: &Field,
    sample: &EnrichmentSample,
) -> Result<WittVector> {
    let m = target.len() as u32;
    let k2 = target.field();
    let res_image: Vec<RatFn> = b_image.iter().map(|x| x.res().clone()).collect();
    if is_p_independent(k2, &res_image, m) {
        return lambda_rep_for(target, b_image, &phi_k.apply(&sample.alpha)?);
    }
    let beta = PBasisTuple::new(source_field, sample.b.iter().map(|x| x.res().clone()).collect())?;
    let coeffs = lambda_dense(&beta, m, &sample.alpha)?
        .iter()
        .map(|c| phi_k.apply(c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(crate::cohen::lambda_sum(target, b_image, &coeffs))
}

/// Compares `map(S_1(b, α))` with `S_2(map(b), φ_k(α))` on every sample.
pub fn check_enrichment_with<F>(
    map: F,
    source: &CohenRingModel,
    target: &CohenRingModel,
    phi_k: &FieldHom,
    samples: &[EnrichmentSample],
) -> EnrichmentReport
where
    F: Fn(&WittVector) -> Result<WittVector>,
{
    let mut report = EnrichmentReport::default();
    for (index, sample) in samples.iter().enumerate() {
        let outcome = (|| -> Result<(WittVector, WittVector)> {
            let lhs = map(&lambda_rep_for(source.ring(), &sample.b, &sample.alpha)?)?;
            let b_image = sample.b.iter().map(&map).collect::<Result<Vec<_>>>()?;
            let rhs = enrichment_rhs(target.ring(), phi_k, &b_image, source.field(), sample)?;
            Ok((lhs, rhs))
        })();
        report.checked += 1;
        match outcome {
            Ok((lhs, rhs)) if lhs == rhs => {}
            Ok((lhs, rhs)) => report.discrepancies.push(Discrepancy { index, lhs, rhs }),
            Err(_) => {
                let zero = target.ring().zero();
                report.discrepancies.push(Discrepancy { index, lhs: zero.clone(), rhs: zero });
            }
        }
    }
    report
}

pub fn check_enrichment(phi: &CohenMorphism, samples: &[EnrichmentSample]) -> EnrichmentReport {
    check_enrichment_with(|a| phi.apply(a), phi.source(), phi.target(), phi.residue_map(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::enrichment_samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Field, CohenRingModel, CohenRingModel) {
        let k = Field::new(2, 1, 1).unwrap();
        let m1 = CohenRingModel::standard(&k, 2).unwrap();
        let w = m1.ring();
        let m2 = m1.with_reps(vec![w.parse(&["t", "1"]).unwrap()]).unwrap();
        (k, m1, m2)
    }

    #[test]
    fn structure_isomorphism_examples() {
        let (k, m1, m2) = setup();
        let w = m1.ring().clone();
        let phi = structure_isomorphism(&m1, &m2).unwrap();
        assert_eq!(w.format(&phi.apply(&w.parse(&["t", "0"]).unwrap()).unwrap()), ["t", "1"]);
        assert_eq!(phi.apply(&w.one()).unwrap(), w.one());
        assert_eq!(w.format(&phi.apply(&w.parse(&["t", "1"]).unwrap()).unwrap()), ["t", "0"]);
        let x = w.parse(&["t", "0"]).unwrap();
        let fx = phi.apply(&x).unwrap();
        assert_eq!(phi.apply(&w.mul(&x, &x)).unwrap(), w.mul(&fx, &fx));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let back = structure_isomorphism(&m2, &m1).unwrap();
        for _ in 0..10 {
            let a = m1.random_member(&mut rng, 2, 2);
            let b = m1.random_member(&mut rng, 2, 2);
            let (fa, fb) = (phi.apply(&a).unwrap(), phi.apply(&b).unwrap());
            assert_eq!(phi.apply(&w.add(&a, &b)).unwrap(), w.add(&fa, &fb));
            assert_eq!(phi.apply(&w.mul(&a, &b)).unwrap(), w.mul(&fa, &fb));
            assert_eq!(fa.res(), a.res());
            assert_eq!(back.apply(&fa).unwrap(), a);
        }
        let k3 = Field::new(3, 1, 1).unwrap();
        assert!(matches!(
            structure_isomorphism(&m1, &CohenRingModel::standard(&k3, 2).unwrap()),
            Err(Error::ModelMismatch(_))
        ));
        let _ = k;
    }

    #[test]
    fn enrichment_and_negative_control() {
        let (_, m1, m2) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = enrichment_samples(&m1, &mut rng, 20);
        assert!(check_enrichment(&CohenMorphism::identity(&m1), &samples).is_clean());
        let phi = structure_isomorphism(&m1, &m2).unwrap();
        assert!(check_enrichment(&phi, &samples).is_clean());

        let w = m1.ring().clone();
        let corrupted = |a: &WittVector| {
            let mut d = phi.apply(a)?.into_digits();
            let last = d.len() - 1;
            d[last] = w.field().add(&d[last], &w.field().one());
            w.from_digits(d)
        };
        let report = check_enrichment_with(corrupted, &m1, &m2, phi.residue_map(), &samples);
        assert!(!report.is_clean());
    }

    #[test]
    fn embeddings_over_base() {
        let (k, m1, m2) = setup();
        let s = Field::new(2, 1, 1).unwrap();
        let square = FieldHom::new(&s, &k, vec![k.parse("t^2").unwrap()]).unwrap();
        let base = BaseModel { model: CohenRingModel::standard(&s, 2).unwrap(), inclusion: square };
        let id = FieldHom::identity(&k);
        let err = embedding_over_base(&base, &m1, &m1, &id, &[k.var(0)]).unwrap_err();
        assert!(matches!(err, Error::SeparabilityWitnessInvalid(_)));

        let prime = Field::new(2, 1, 0).unwrap();
        let base = BaseModel {
            model: CohenRingModel::standard(&prime, 2).unwrap(),
            inclusion: FieldHom::new(&prime, &k, vec![]).unwrap(),
        };
        let phi = embedding_over_base(&base, &m1, &m2, &id, &[k.var(0)]).unwrap();
        let direct = structure_isomorphism(&m1, &m2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..8 {
            let a = m1.random_member(&mut rng, 2, 2);
            assert_eq!(phi.apply(&a).unwrap(), direct.apply(&a).unwrap());
        }

        let twist = FieldHom::frobenius_twist(&k, 1);
        let phi = embedding_over_base(&base, &m1, &m1, &twist, &[k.var(0)]).unwrap();
        let image = phi.apply(&m1.reps()[0]).unwrap();
        assert_eq!(image, m1.lambda_representative(&k.parse("t^2").unwrap()).unwrap());
        let w = m1.ring();
        for _ in 0..8 {
            let a = m1.random_member(&mut rng, 2, 2);
            let b = m1.random_member(&mut rng, 2, 2);
            let (fa, fb) = (phi.apply(&a).unwrap(), phi.apply(&b).unwrap());
            assert_eq!(phi.apply(&w.mul(&a, &b)).unwrap(), w.mul(&fa, &fb));
            assert_eq!(phi.apply(&w.add(&a, &b)).unwrap(), w.add(&fa, &fb));
            assert_eq!(*fa.res(), k.frobenius(a.res()));
        }
    }

    #[test]
    fn stage_embeddings() {
        let (k, m1, _) = setup();
        let tep = tep_embed(&m1, 1).unwrap();
        let phi = &tep.morphism;
        let w = phi.target().ring();
        let image = phi.apply(&m1.reps()[0]).unwrap();
        assert_eq!(w.format(&image), ["t^2", "0"]);
        assert_eq!(w.pow(&tep.witnesses[0], 2), image);

        let id = tep_embed(&m1, 0).unwrap().morphism;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples = enrichment_samples(&m1, &mut rng, 10);
        assert!(check_enrichment(phi, &samples).is_clean());
        for _ in 0..8 {
            let a = m1.random_member(&mut rng, 2, 2);
            let b = m1.random_member(&mut rng, 2, 2);
            assert_eq!(id.apply(&a).unwrap(), a);
            let (fa, fb) = (phi.apply(&a).unwrap(), phi.apply(&b).unwrap());
            assert_eq!(fa == fb, a == b);
            assert_eq!(phi.apply(&m1.ring().mul(&a, &b)).unwrap(), w.mul(&fa, &fb));
        }
        assert!(matches!(tep_embed(&m1, 3), Err(Error::StageError { stage: 3, len: 2 })));
        let _ = k;
    }

    #[test]
    fn composition_matches_direct() {
        let (_, m1, m2) = setup();
        let w = m1.ring();
        let m3 = m1.with_reps(vec![w.add(&w.teichmuller(&m1.field().var(0)), &w.from_int(2))]).unwrap();
        let direct = structure_isomorphism(&m1, &m3).unwrap();
        let composed = structure_isomorphism(&m1, &m2).unwrap().then(&structure_isomorphism(&m2, &m3).unwrap()).unwrap();
        let round = structure_isomorphism(&m1, &m2).unwrap().then(&structure_isomorphism(&m2, &m1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..8 {
            let a = m1.random_member(&mut rng, 2, 2);
            assert_eq!(composed.apply(&a).unwrap(), direct.apply(&a).unwrap());
            assert_eq!(round.apply(&a).unwrap(), a);
        }
    }
}
