//! Seeded random inputs for property checks.

use rand::Rng;

use crate::cohen::CohenRingModel;
use crate::fields::{Field, RatFn};
use crate::morphisms::EnrichmentSample;
use crate::pbasis::is_p_independent;
use crate::witt::WittVector;

/// Random p-independent tuple of length `len ≤ r`, by rejection.
pub fn random_p_independent<R: Rng + ?Sized>(field: &Field, rng: &mut R, len: usize, max_deg: u32) -> Vec<RatFn> {
    assert!(len <= field.r(), "a p-independent tuple is at most as long as the imperfection degree");
    loop {
        let beta: Vec<RatFn> = (0..len)
            .map(|_| {
                let fraction = rng.gen_bool(0.3);
                field.random(rng, max_deg, 2, fraction)
            })
            .collect();
        if is_p_independent(field, &beta, 1) {
            return beta;
        }
    }
}

/// Random lift of `alpha` inside the model: `S(α) + p·c` for a random member `c`.
pub fn random_lift<R: Rng + ?Sized>(model: &CohenRingModel, rng: &mut R, alpha: &RatFn) -> WittVector {
    let ring = model.ring();
    let base = model.lambda_representative(alpha).expect("the model's p-basis spans the field");
    let noise = model.random_member(rng, 1, 2);
    ring.add(&base, &ring.times_p(&noise))
}

/// Pairs `(b, α)` with `res b` a random p-basis and `α` random.
pub fn enrichment_samples<R: Rng + ?Sized>(model: &CohenRingModel, rng: &mut R, count: usize) -> Vec<EnrichmentSample> {
    let k = model.field();
    (0..count)
        .map(|_| {
            let beta = random_p_independent(k, rng, k.r(), 2);
            let b = beta.iter().map(|x| random_lift(model, rng, x)).collect();
            EnrichmentSample { b, alpha: k.random(rng, 3, 3, true) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_well_formed() {
        let k = Field::new(3, 1, 2).unwrap();
        let model = CohenRingModel::standard(&k, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in enrichment_samples(&model, &mut rng, 5) {
            let res: Vec<RatFn> = s.b.iter().map(|x| x.res().clone()).collect();
            assert!(is_p_independent(&k, &res, 2));
            assert!(s.b.iter().all(|x| model.is_member(x)));
        }
    }
}
