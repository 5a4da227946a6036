//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::io::Write;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cohen_core::cohen::{lambda_rep_for, CohenDigits, CohenRingModel};
use cohen_core::fields::{Field, FieldHom};
use cohen_core::lang::audit::{audit_ac, enumerate_valued, lifted_representative};
use cohen_core::lang::{
    audit_axioms, check_morphism_preserves_qf, formula_battery, random_assignments, AxiomSet, Binding, LambdaImpl,
    Status, ThetaImpl,
};
use cohen_core::morphisms::{check_enrichment, structure_isomorphism, tep_embed, CohenMorphism, TeichmullerEmbedding};
use cohen_core::pbasis::{lambda_dense, lambda_dense_by_elimination, MultiIndex, PBasisTuple};
use cohen_core::sampling::{enrichment_samples, random_lift, random_p_independent};
use cohen_core::valued::ValuedField;
use cohen_core::witt::{WittRing, WittVector};
use cohen_core::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

/// Wall-clock budgets.
const WITT_ORACLE_BUDGET: Duration = Duration::from_secs(10);
const LAMBDA_BUDGET: Duration = Duration::from_secs(30);

const LAMBDA_SAMPLES: usize = 500;
const COMPOSITION_SAMPLES: usize = 200;
const BINOMIAL_SAMPLES: usize = 200;
const LIFT_SAMPLES: usize = 200;
const DIGIT_SAMPLES: usize = 500;
const HOM_PAIRS: usize = 300;
const ENRICHMENT_SAMPLES: usize = 200;
const TEP_SAMPLES: usize = 200;
const TOWER_SAMPLES: usize = 200;
const AC_RANDOM_SAMPLES: usize = 500;
const AUDIT_SAMPLES: usize = 40;
const QF_ASSIGNMENTS: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn check(failures: &[String], checked: usize) -> Self {
        match failures.first() {
            None => Outcome { pass: true, detail: format!("{checked} checks") },
            Some(first) => Outcome {
                pass: false,
                detail: format!("{} of {checked} checks failed; first: {first}", failures.len()),
            },
        }
    }
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ tag)
}

fn f2t() -> Field {
    Field::new(2, 1, 1).unwrap()
}

fn fmt(ring: &WittRing, x: &WittVector) -> String {
    format!("({})", ring.format(x).join(","))
}

fn pow_mod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    acc
}

/// `(x_i) ↦ Σ p^i τ(x_i)` with `τ` the Teichmüller lift to `Z/p^m`.
fn witt_to_int(x: &WittVector, p: u64, m: u32) -> u64 {
    let n = p.pow(m);
    let tau_exp = p.pow(m - 1);
    x.digits().iter().enumerate().fold(0, |acc, (i, d)| {
        let digit = if d.is_zero() { 0 } else { d.numerator().constant_value() as u64 };
        (acc + p.pow(i as u32) * pow_mod(digit, tau_exp, n)) % n
    })
}

fn witt_integer_oracle() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [2u64, 3, 5] {
        let mut m = 1;
        while p.pow(m) <= 625 {
            let k = Field::new(p as u32, 1, 0).unwrap();
            let ring = WittRing::new(&k, m as usize).unwrap();
            let n = p.pow(m);
            let all: Vec<WittVector> = (0..n)
                .map(|v| {
                    let digits = (0..m).map(|i| k.constant(((v / p.pow(i)) % p) as u32)).collect();
                    ring.from_digits(digits).unwrap()
                })
                .collect();
            let ints: Vec<u64> = all.iter().map(|x| witt_to_int(x, p, m)).collect();
            let mut seen = vec![false; n as usize];
            for &v in &ints {
                seen[v as usize] = true;
            }
            if seen.iter().any(|s| !s) {
                failures.push(format!("W_{m}(F_{p}) -> Z/{n} is not bijective"));
            }
            for (x, &a) in all.iter().zip(&ints) {
                for (y, &b) in all.iter().zip(&ints) {
                    checked += 2;
                    if witt_to_int(&ring.add(x, y), p, m) != (a + b) % n {
                        failures.push(format!("p={p} m={m}: {a}+{b}"));
                    }
                    if witt_to_int(&ring.mul(x, y), p, m) != a * b % n {
                        failures.push(format!("p={p} m={m}: {a}*{b}"));
                    }
                }
            }
            m += 1;
        }
    }
    let elapsed = start.elapsed();
    if elapsed > WITT_ORACLE_BUDGET {
        failures.push(format!("took {elapsed:?}, budget {WITT_ORACLE_BUDGET:?}"));
    }
    let mut out = Outcome::check(&failures, checked);
    out.detail = format!("{} in {elapsed:.2?}", out.detail);
    out
}

fn lambda_reconstruction() -> Outcome {
    let start = Instant::now();
    let fields = [Field::new(2, 1, 1).unwrap(), Field::new(3, 1, 1).unwrap(), Field::new(2, 1, 2).unwrap()];
    let mut failures = Vec::new();
    let mut checked = 0;
    for (fi, k) in fields.iter().enumerate() {
        let mut rng = rng(200 + fi as u64);
        for s in 0..LAMBDA_SAMPLES {
            let m = 1 + (s % 3) as u32;
            let alpha = k.random(&mut rng, 4, 3, true);
            // Alternate the variables and a random p-basis; elimination stays small for one variable.
            let beta = if s % 2 == 0 || k.r() > 1 {
                PBasisTuple::variables(k)
            } else {
                PBasisTuple::new(k, random_p_independent(k, &mut rng, k.r(), 3)).unwrap()
            };
            checked += 1;
            let coeffs = match lambda_dense(&beta, m, &alpha) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("{}: {e}", k.format(&alpha)));
                    continue;
                }
            };
            let rebuilt = MultiIndex::all(k.p(), m, beta.len()).zip(&coeffs).fold(k.zero(), |acc, (idx, c)| {
                k.add(&acc, &k.mul(&beta.monomial(&idx).unwrap(), &k.frobenius_pow(c, m)))
            });
            if rebuilt != alpha {
                failures.push(format!("reconstruction of {} at m={m}", k.format(&alpha)));
            }
            if k.r() > 1 && m == 3 {
                // 64 unknowns over F_2(t1,t2): permuted elimination only on a subsample.
                if s % 25 != 2 {
                    continue;
                }
            }
            let mut order: Vec<usize> = (0..coeffs.len()).collect();
            order.shuffle(&mut rng);
            match lambda_dense_by_elimination(&beta, m, &alpha, &order) {
                Ok(again) if again == coeffs => {}
                _ => failures.push(format!("permuted solve of {} at m={m}", k.format(&alpha))),
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > LAMBDA_BUDGET {
        failures.push(format!("took {elapsed:?}, budget {LAMBDA_BUDGET:?}"));
    }
    let mut out = Outcome::check(&failures, checked);
    out.detail = format!("{} in {elapsed:.2?}", out.detail);
    out
}

fn lambda_composition() -> Outcome {
    let fields = [Field::new(2, 1, 1).unwrap(), Field::new(3, 1, 1).unwrap(), Field::new(2, 1, 2).unwrap()];
    let mut rng = rng(300);
    let mut failures = Vec::new();
    for s in 0..COMPOSITION_SAMPLES {
        let k = &fields[s % fields.len()];
        let beta = if k.r() == 1 && s % 2 == 1 {
            PBasisTuple::new(k, random_p_independent(k, &mut rng, 1, 2)).unwrap()
        } else {
            PBasisTuple::variables(k)
        };
        let (l, m) = (rng.gen_range(1..=2u32), rng.gen_range(1..=2u32));
        let nu = beta.len();
        let i = MultiIndex::from_linear(k.p(), l, nu, rng.gen_range(0..MultiIndex::count(k.p(), l, nu)));
        let j = MultiIndex::from_linear(k.p(), m, nu, rng.gen_range(0..MultiIndex::count(k.p(), m, nu)));
        let alpha = k.random(&mut rng, 5, 3, true);
        let inner = &lambda_dense(&beta, l, &alpha).unwrap()[i.linear()];
        let lhs = lambda_dense(&beta, m, inner).unwrap()[j.linear()].clone();
        let ij = i.oplus(&j).unwrap();
        let rhs = lambda_dense(&beta, l + m, &alpha).unwrap()[ij.linear()].clone();
        if lhs != rhs {
            failures.push(format!("alpha={} I={i} J={j}", k.format(&alpha)));
        }
    }
    Outcome::check(&failures, COMPOSITION_SAMPLES)
}

fn random_vector<R: Rng>(ring: &WittRing, rng: &mut R) -> WittVector {
    let k = ring.field();
    ring.from_digits((0..ring.len()).map(|_| k.random(rng, 2, 2, true)).collect()).unwrap()
}

fn binomial_congruence() -> Outcome {
    let fields = [f2t(), Field::new(2, 2, 0).unwrap()];
    let mut rng = rng(400);
    let mut failures = Vec::new();
    for s in 0..BINOMIAL_SAMPLES {
        let k = &fields[s % 2];
        let m = rng.gen_range(1..=3usize);
        let n = rng.gen_range(1..=m);
        let ring = WittRing::new(k, m).unwrap();
        let (a, b) = (random_vector(&ring, &mut rng), random_vector(&ring, &mut rng));
        let e = (k.p() as u64).pow(n as u32);
        let lhs = ring.pow(&ring.add(&a, &b), e);
        let rhs = ring.add(&ring.pow(&a, e), &ring.pow(&b, e));
        let diff = ring.sub(&lhs, &rhs);
        if diff.digits()[..n].iter().any(|d| !d.is_zero()) {
            failures.push(format!("n={n} m={m} a={} b={}", fmt(&ring, &a), fmt(&ring, &b)));
        }
    }
    Outcome::check(&failures, BINOMIAL_SAMPLES)
}

fn lift_independence() -> Outcome {
    let (f2t2, f3t) = (Field::new(2, 1, 2).unwrap(), Field::new(3, 1, 1).unwrap());
    let configs = [(f2t(), 1), (f2t(), 2), (f2t(), 3), (f2t2.clone(), 1), (f2t2, 2), (f3t.clone(), 1), (f3t.clone(), 2), (f3t, 3)];
    let mut rng = rng(500);
    let mut failures = Vec::new();
    for s in 0..LIFT_SAMPLES {
        let (k, m) = (&configs[s % configs.len()].0, configs[s % configs.len()].1);
        let model = CohenRingModel::standard(k, m).unwrap();
        let binding = Binding::two_sorted(model.clone());
        let beta = random_p_independent(k, &mut rng, k.r(), 2);
        let b: Vec<WittVector> = beta.iter().map(|x| random_lift(&model, &mut rng, x)).collect();
        let alpha = k.random(&mut rng, 3, 2, true);
        let canonical = lambda_rep_for(model.ring(), &b, &alpha).unwrap();
        for _ in 0..2 {
            let lifted = lifted_representative(&binding, &beta, &b, &alpha, &mut rng).unwrap();
            if lifted != canonical {
                failures.push(format!("m={m} alpha={}", k.format(&alpha)));
            }
        }
    }
    Outcome::check(&failures, 2 * LIFT_SAMPLES)
}

fn digits_and_membership() -> Outcome {
    let k = f2t();
    let mut rng = rng(600);
    let mut failures = Vec::new();
    let models: Vec<CohenRingModel> = (1..=3).map(|m| CohenRingModel::standard(&k, m).unwrap()).collect();
    for s in 0..DIGIT_SAMPLES {
        let model = &models[s % 3];
        let digits = CohenDigits((0..model.len()).map(|_| k.random(&mut rng, 3, 3, true)).collect());
        let a = model.undigitize(&digits).unwrap();
        if !model.is_member(&a) {
            failures.push(format!("undigitize output {} rejected", fmt(model.ring(), &a)));
        }
        match model.digitize(&a) {
            Ok(back) if back == digits => {}
            _ => failures.push(format!("round trip of {}", fmt(model.ring(), &a))),
        }
    }
    let c2 = &models[1];
    let ring = c2.ring();
    let bad = ring.from_digits(vec![k.zero(), k.var(0)]).unwrap();
    if !matches!(c2.digitize(&bad), Err(Error::NotMember)) || c2.is_member(&bad) {
        failures.push("(0,t) accepted".into());
    }
    for (name, x) in [("[t]", ring.teichmuller(&k.var(0))), ("p", ring.from_int(2))] {
        if !c2.is_member(&x) {
            failures.push(format!("{name} rejected"));
        }
    }
    Outcome::check(&failures, DIGIT_SAMPLES + 3)
}

/// `C_m(F_2(t))` with `s_2(t)` each of `[t]+p`, `[t]+p[t]`, `[t]+p(1+[t])`.
fn alternative_models(m: usize) -> Vec<(String, CohenRingModel)> {
    let k = f2t();
    let std = CohenRingModel::standard(&k, m).unwrap();
    let ring = std.ring().clone();
    let t = ring.teichmuller(&k.var(0));
    let p = ring.from_int(2);
    [
        ("[t]+p", ring.add(&t, &p)),
        ("[t]+p[t]", ring.add(&t, &ring.mul(&p, &t))),
        ("[t]+p(1+[t])", ring.add(&t, &ring.mul(&p, &ring.add(&ring.one(), &t)))),
    ]
    .into_iter()
    .map(|(name, rep)| (name.to_owned(), std.with_reps(vec![rep]).unwrap()))
    .collect()
}

fn criterion_seven_morphisms() -> Vec<(String, CohenMorphism)> {
    let std = CohenRingModel::standard(&f2t(), 2).unwrap();
    alternative_models(2)
        .into_iter()
        .map(|(name, model)| (format!("iso to {name}"), structure_isomorphism(&std, &model).unwrap()))
        .collect()
}

fn tep_embeddings() -> Vec<TeichmullerEmbedding> {
    let std = CohenRingModel::standard(&f2t(), 2).unwrap();
    [1, 2].into_iter().map(|n| tep_embed(&std, n).unwrap()).collect()
}

fn homomorphism_failures<R: Rng>(phi: &CohenMorphism, rng: &mut R, pairs: usize, label: &str) -> Vec<String> {
    let (src, dst) = (phi.source(), phi.target());
    let (r1, r2) = (src.ring(), dst.ring());
    let mut failures = Vec::new();
    for _ in 0..pairs {
        let x = src.random_member(rng, 3, 2);
        let y = src.random_member(rng, 3, 2);
        let (fx, fy) = (phi.apply(&x).unwrap(), phi.apply(&y).unwrap());
        if phi.apply(&r1.add(&x, &y)).unwrap() != r2.add(&fx, &fy) {
            failures.push(format!("{label}: additivity at {}, {}", fmt(r1, &x), fmt(r1, &y)));
        }
        if phi.apply(&r1.mul(&x, &y)).unwrap() != r2.mul(&fx, &fy) {
            failures.push(format!("{label}: multiplicativity at {}, {}", fmt(r1, &x), fmt(r1, &y)));
        }
        if fx.res() != &phi.residue_map().apply(x.res()).unwrap() {
            failures.push(format!("{label}: residue square at {}", fmt(r1, &x)));
        }
    }
    failures
}

fn structure_isomorphisms() -> Outcome {
    let mut rng = rng(700);
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in [2, 3] {
        let std = CohenRingModel::standard(&f2t(), m).unwrap();
        let k = std.field().clone();
        for (name, model) in alternative_models(m) {
            let label = format!("m={m} {name}");
            let phi = structure_isomorphism(&std, &model).unwrap();
            let psi = structure_isomorphism(&model, &std).unwrap();
            failures.extend(homomorphism_failures(&phi, &mut rng, HOM_PAIRS, &label));
            checked += 3 * HOM_PAIRS;
            if !phi.residue_map().is_identity() {
                failures.push(format!("{label}: residue map is not the identity"));
            }
            if phi.apply(&std.reps()[0]).unwrap() != model.reps()[0] {
                failures.push(format!("{label}: s_1(t) not sent to s_2(t)"));
            }
            for _ in 0..HOM_PAIRS / 10 {
                let alpha = k.random(&mut rng, 3, 2, true);
                let x = std.random_member(&mut rng, 3, 2);
                let y = model.random_member(&mut rng, 3, 2);
                checked += 3;
                if phi.apply(&std.lambda_representative(&alpha).unwrap()).unwrap()
                    != model.lambda_representative(&alpha).unwrap()
                {
                    failures.push(format!("{label}: representative of {}", k.format(&alpha)));
                }
                if psi.apply(&phi.apply(&x).unwrap()).unwrap() != x || phi.apply(&psi.apply(&y).unwrap()).unwrap() != y {
                    failures.push(format!("{label}: inverse round trip"));
                }
                let id = phi.then(&psi).unwrap();
                if id.apply(&x).unwrap() != x {
                    failures.push(format!("{label}: composite is not the identity"));
                }
            }
        }
    }
    Outcome::check(&failures, checked)
}

fn enrichment_lemma() -> Outcome {
    let mut rng = rng(800);
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut morphisms = criterion_seven_morphisms();
    morphisms.extend(tep_embeddings().into_iter().map(|t| (format!("tep n={}", t.stage), t.morphism)));
    for (name, phi) in morphisms {
        let samples = enrichment_samples(phi.source(), &mut rng, ENRICHMENT_SAMPLES);
        let report = check_enrichment(&phi, &samples);
        checked += report.checked;
        let ring = phi.target().ring();
        for d in &report.discrepancies {
            failures.push(format!("{name}: sample {} lhs {} rhs {}", d.index, fmt(ring, &d.lhs), fmt(ring, &d.rhs)));
        }
    }
    Outcome::check(&failures, checked)
}

fn tep_finite_stage() -> Outcome {
    let mut rng = rng(900);
    let mut failures = Vec::new();
    let mut checked = 0;
    for tep in tep_embeddings() {
        let phi = &tep.morphism;
        let label = format!("n={}", tep.stage);
        failures.extend(homomorphism_failures(phi, &mut rng, TEP_SAMPLES, &label));
        checked += 3 * TEP_SAMPLES;
        let (src, ring) = (phi.source(), phi.target().ring());
        for _ in 0..TEP_SAMPLES {
            let x = src.random_member(&mut rng, 3, 2);
            let y = src.random_member(&mut rng, 3, 2);
            checked += 1;
            if x != y && phi.apply(&x).unwrap() == phi.apply(&y).unwrap() {
                failures.push(format!("{label}: not injective at {}, {}", fmt(src.ring(), &x), fmt(src.ring(), &y)));
            }
        }
        let image = phi.apply(&src.reps()[0]).unwrap();
        let q = 2u64.pow(tep.stage);
        checked += 1;
        if ring.pow(&tep.witnesses[0], q) != image {
            failures.push(format!("{label}: witness^(p^n) differs from the image of s(t)"));
        }
        let expected = FieldHom::frobenius_twist(src.field(), tep.stage);
        if phi.residue_map() != &expected {
            failures.push(format!("{label}: residue map is not t -> t^(p^n)"));
        }
    }
    Outcome::check(&failures, checked)
}

fn tower_compatibility() -> Outcome {
    let fields = [f2t(), Field::new(3, 1, 1).unwrap()];
    let mut rng = rng(1000);
    let mut failures = Vec::new();
    for s in 0..TOWER_SAMPLES {
        let k = &fields[s % 2];
        let n = rng.gen_range(2..=3usize);
        let m = rng.gen_range(1..n);
        let upper = CohenRingModel::standard(k, n).unwrap();
        let lower = upper.ring().with_len(m).unwrap();
        let beta = random_p_independent(k, &mut rng, 1, 2);
        let b: Vec<WittVector> = beta.iter().map(|x| random_lift(&upper, &mut rng, x)).collect();
        let alpha = k.random(&mut rng, 3, 2, true);
        let top = lambda_rep_for(upper.ring(), &b, &alpha).unwrap();
        let b_low: Vec<WittVector> = b.iter().map(|x| upper.ring().truncate(x, m).unwrap()).collect();
        let low = lambda_rep_for(&lower, &b_low, &alpha).unwrap();
        if upper.ring().truncate(&top, m).unwrap() != low {
            failures.push(format!(
                "p={} levels {n}->{m}, b={}, alpha={}",
                k.p(),
                fmt(upper.ring(), &b[0]),
                k.format(&alpha)
            ));
        }
    }
    Outcome::check(&failures, TOWER_SAMPLES)
}

fn report_failures(report: &cohen_core::lang::AuditReport, label: &str, failures: &mut Vec<String>) {
    for r in &report.results {
        if let Status::Fail(w) = &r.status {
            failures.push(format!("{label} {}: {w}", r.axiom));
        }
    }
}

fn angular_components() -> Outcome {
    let k = f2t();
    let mut failures = Vec::new();
    let v2 = ValuedField::new(CohenRingModel::standard(&k, 2).unwrap());
    let linear = [k.zero(), k.one(), k.var(0), k.parse("1+t").unwrap()];
    let elems = enumerate_valued(&v2, 2, &linear);
    let exhaustive = audit_ac(&v2, &elems);
    report_failures(&exhaustive, "M=2", &mut failures);
    let v3 = ValuedField::new(CohenRingModel::standard(&k, 3).unwrap());
    let mut rng = rng(1100);
    let random: Vec<_> = (0..AC_RANDOM_SAMPLES).map(|_| v3.random(&mut rng, 3, 2)).collect();
    let sampled = audit_ac(&v3, &random);
    report_failures(&sampled, "M=3", &mut failures);
    let checked: usize = exhaustive.results.iter().chain(&sampled.results).map(|r| r.checked).sum();
    let mut out = Outcome::check(&failures, checked);
    out.detail = format!("{} ({} enumerated elements)", out.detail, elems.len());
    out
}

fn language_audits() -> Outcome {
    let k = f2t();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut notes = Vec::new();
    for n in 1..=3 {
        let model = CohenRingModel::standard(&k, n).unwrap();
        let binding = Binding::two_sorted(model.clone());
        let report = audit_axioms(&binding, AxiomSet::T2, AUDIT_SAMPLES, SEED);
        checked += report.results.len();
        report_failures(&report, &format!("T2({n})"), &mut failures);
        let mut controls = vec![("constant Theta", binding.clone().with_theta(ThetaImpl::ConstantTrue))];
        // At n = 1 every representative is the Teichmüller one, so this control coincides with the standard binding.
        if n > 1 {
            controls.push(("Teichmuller S", binding.clone().with_lambda(LambdaImpl::Teichmuller)));
        }
        for (name, control) in controls {
            checked += 1;
            let bad = audit_axioms(&control, AxiomSet::T2, AUDIT_SAMPLES, SEED);
            let witness = bad.results.iter().find_map(|r| match &r.status {
                Status::Fail(w) if !w.is_empty() => Some(format!("{} {w}", r.axiom)),
                _ => None,
            });
            match witness {
                Some(w) if n == 2 => notes.push(format!("{name} control at n=2 fails {w}")),
                Some(_) => {}
                None => failures.push(format!("{name} control at n={n} passed")),
            }
        }
    }
    let battery = formula_battery();
    let mut morphisms = criterion_seven_morphisms();
    morphisms.extend(tep_embeddings().into_iter().map(|t| (format!("tep n={}", t.stage), t.morphism)));
    for (name, phi) in morphisms {
        let source = Binding::two_sorted(phi.source().clone());
        let assignments = random_assignments(&source, QF_ASSIGNMENTS, SEED);
        let report = check_morphism_preserves_qf(&phi, &battery, &assignments);
        checked += report.checked;
        if let Some(d) = report.discrepancies.first() {
            failures.push(format!(
                "{name}: {} discrepancies ({} without Theta/S), e.g. {} under {:?}: {} vs {}",
                report.discrepancies.len(),
                report.ring_discrepancies(),
                d.formula,
                d.assignment,
                d.source_truth,
                d.target_truth
            ));
        }
    }
    let mut out = Outcome::check(&failures, checked);
    out.detail = format!("{}; {}", out.detail, notes.join("; "));
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Witt-integer oracle", witt_integer_oracle),
        ("lambda reconstruction and uniqueness", lambda_reconstruction),
        ("lambda composition law", lambda_composition),
        ("binomial congruence", binomial_congruence),
        ("representative lift independence", lift_independence),
        ("digit round trip and membership", digits_and_membership),
        ("structure isomorphism", structure_isomorphisms),
        ("enrichment lemma", enrichment_lemma),
        ("Teichmuller embedding finite stage", tep_finite_stage),
        ("tower compatibility", tower_compatibility),
        ("angular-component axioms", angular_components),
        ("language audits", language_audits),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|n| n.trim().parse().ok()).collect());
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!out.pass);
        println!("{tag} {:>2} {name}: {} [{:.1?}]", i + 1, out.detail, start.elapsed());
        std::io::stdout().flush().ok();
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
