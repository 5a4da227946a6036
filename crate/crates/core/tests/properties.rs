use cohen_core::cohen::{CohenDigits, CohenRingModel};
use cohen_core::fields::Field;
use cohen_core::morphisms::{check_enrichment, structure_isomorphism, tep_embed};
use cohen_core::pbasis::{lambda_decompose, PBasisTuple};
use cohen_core::sampling::enrichment_samples;
use cohen_core::valued::ValuedField;
use cohen_core::witt::{Engine, WittRing};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(idx: usize) -> Field {
    match idx % 3 {
        0 => Field::new(2, 1, 1).unwrap(),
        1 => Field::new(3, 1, 1).unwrap(),
        _ => Field::new(2, 1, 2).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn field_operations_are_canonical(seed: u64, idx in 0usize..3) {
        let k = field(idx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = k.random(&mut rng, 3, 3, true);
        let b = k.random_nonzero(&mut rng, 3, 3, true);
        let c = k.random(&mut rng, 2, 2, true);
        prop_assert_eq!(k.mul(&k.add(&a, &c), &b), k.add(&k.mul(&a, &b), &k.mul(&c, &b)));
        prop_assert_eq!(k.mul(&k.div(&a, &b).unwrap(), &b), a.clone());
        prop_assert_eq!(k.parse(&k.format(&a)).unwrap(), a.clone());
        prop_assert_eq!(k.pth_root(&k.frobenius(&a)), Some(a));
    }

    #[test]
    fn witt_engines_agree(seed: u64) {
        let k = Field::new(2, 1, 1).unwrap();
        let s = WittRing::with_engine(&k, 3, Engine::Structural).unwrap();
        let g = WittRing::with_engine(&k, 3, Engine::GhostLift).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = s.random(&mut rng, 2, 2, true);
        let y = s.random(&mut rng, 2, 2, true);
        prop_assert_eq!(s.add(&x, &y), g.add(&x, &y));
        prop_assert_eq!(s.mul(&x, &y), g.mul(&x, &y));
        prop_assert_eq!(s.neg(&x), g.neg(&x));
    }

    #[test]
    fn frobenius_and_verschiebung_compose_to_p(seed: u64, idx in 0usize..2) {
        let k = field(idx);
        let ring = WittRing::new(&k, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ring.random(&mut rng, 2, 2, true);
        prop_assert_eq!(ring.verschiebung(&ring.frobenius(&x)), ring.times_p(&x));
        prop_assert_eq!(ring.frobenius(&ring.verschiebung(&x)), ring.times_p(&x));
        if ring.is_unit(&x) {
            prop_assert_eq!(ring.mul(&x, &ring.inv(&x).unwrap()), ring.one());
        }
    }

    #[test]
    fn digits_round_trip(seed: u64, idx in 0usize..3, m in 1usize..3) {
        let k = field(idx);
        let model = CohenRingModel::standard(&k, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let digits = CohenDigits((0..m).map(|_| k.random(&mut rng, 3, 2, true)).collect());
        let a = model.undigitize(&digits).unwrap();
        prop_assert!(model.is_member(&a));
        prop_assert_eq!(model.digitize(&a).unwrap(), digits);
    }

    #[test]
    fn lambda_decomposition_reconstructs(seed: u64, idx in 0usize..3, m in 1u32..3) {
        let k = field(idx);
        let beta = PBasisTuple::variables(&k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = k.random(&mut rng, 4, 3, true);
        let dec = lambda_decompose(&beta, m, &alpha).unwrap();
        prop_assert_eq!(dec.reconstruct(&beta).unwrap(), alpha);
    }

    #[test]
    fn structure_isomorphisms_are_ring_maps(seed: u64) {
        let k = Field::new(2, 1, 1).unwrap();
        let source = CohenRingModel::standard(&k, 2).unwrap();
        let ring = source.ring();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = source.random_member(&mut rng, 2, 2);
        let shifted = ring.add(&ring.teichmuller(&k.var(0)), &ring.times_p(&rep));
        let target = source.with_reps(vec![shifted]).unwrap();
        let phi = structure_isomorphism(&source, &target).unwrap();
        let back = structure_isomorphism(&target, &source).unwrap();
        let x = source.random_member(&mut rng, 2, 2);
        let y = source.random_member(&mut rng, 2, 2);
        let fx = phi.apply(&x).unwrap();
        prop_assert_eq!(phi.apply(&ring.mul(&x, &y)).unwrap(), ring.mul(&fx, &phi.apply(&y).unwrap()));
        prop_assert_eq!(back.apply(&fx).unwrap(), x);
        prop_assert!(check_enrichment(&phi, &enrichment_samples(&source, &mut rng, 3)).is_clean());
    }

    #[test]
    fn stage_embeddings_are_ring_maps(seed: u64, stage in 1u32..3) {
        let k = Field::new(2, 1, 1).unwrap();
        let model = CohenRingModel::standard(&k, 2).unwrap();
        let tep = tep_embed(&model, stage).unwrap();
        let ring = model.ring();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = model.random_member(&mut rng, 2, 2);
        let y = model.random_member(&mut rng, 2, 2);
        let phi = &tep.morphism;
        let image = phi.target().ring();
        prop_assert_eq!(
            phi.apply(&ring.add(&x, &y)).unwrap(),
            image.add(&phi.apply(&x).unwrap(), &phi.apply(&y).unwrap())
        );
        prop_assert_eq!(
            phi.apply(&ring.mul(&x, &y)).unwrap(),
            image.mul(&phi.apply(&x).unwrap(), &phi.apply(&y).unwrap())
        );
    }

    #[test]
    fn valuation_is_additive(seed: u64) {
        let k = Field::new(2, 1, 1).unwrap();
        let v = ValuedField::new(CohenRingModel::standard(&k, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = v.random(&mut rng, 3, 2);
        let y = v.random(&mut rng, 3, 2);
        let xy = v.mul(&x, &y);
        match (x.val(), y.val()) {
            (Some(a), Some(b)) => prop_assert_eq!(xy.val(), Some(a + b)),
            _ => prop_assert!(xy.is_zero()),
        }
        prop_assert_eq!(v.from_json(&v.to_json(&x)).unwrap(), x);
    }
}
