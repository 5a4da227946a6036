use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::RatFn;
use crate::morphisms::CohenMorphism;
use crate::pbasis::{is_p_independent, lambda_dense, MultiIndex, PBasisTuple};
use crate::sampling::{random_lift, random_p_independent};
use crate::valued::{ValuedElement, ValuedField};
use crate::witt::WittVector;

use super::eval::{Assignment, Binding, Carrier, Value};
use super::syntax::{parse_formula, Formula, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail(String),
    Unauditable(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub checked: usize,
    #[serde(flatten)]
    pub status: Status,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AuditReport {
    pub results: Vec<AxiomResult>,
}

impl AuditReport {
    /// No failures; unauditable entries do not count against.
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| !matches!(r.status, Status::Fail(_)))
    }

    pub fn get(&self, axiom: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom == axiom)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    fn push(&mut self, axiom: &str, checked: usize, failure: Option<String>) {
        let status = failure.map_or(Status::Pass, Status::Fail);
        self.results.push(AxiomResult { axiom: axiom.into(), checked, status });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomSet {
    /// `T_2(n)`: I–III, IV (unauditable), V_n–VII_n.
    T2,
    /// `T_ac` axioms 1–6 plus 7 via the ac items.
    TacCore,
    /// Angular-component items (1)–(3) and system compatibility.
    Ac,
}

impl AxiomSet {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "T2" | "t2" => Ok(AxiomSet::T2),
            "Tac-core" | "tac-core" | "tac" => Ok(AxiomSet::TacCore),
            "ac" | "ac-axioms" => Ok(AxiomSet::Ac),
            _ => Err(Error::Syntax(format!("unknown axiom set {s}"))),
        }
    }
}

/// Runs the chosen axiom set on `samples` seeded random elements plus fixed edge cases.
pub fn audit_axioms(binding: &Binding, which: AxiomSet, samples: usize, seed: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (which, binding.carrier()) {
        (AxiomSet::T2, Carrier::TwoSorted(_)) => audit_t2(binding, samples, &mut rng),
        (AxiomSet::TacCore, Carrier::Valued(v)) => audit_tac(v, samples, &mut rng),
        (AxiomSet::Ac, Carrier::Valued(v)) => audit_ac(v, &valued_samples(v, samples, &mut rng)),
        _ => {
            let mut r = AuditReport::default();
            r.results.push(AxiomResult {
                axiom: format!("{which:?}"),
                checked: 0,
                status: Status::Unauditable("axiom set does not apply to this structure".into()),
            });
            r
        }
    }
}

fn fmt_witt(b: &Binding, x: &WittVector) -> String {
    let digits: Vec<String> = x.digits().iter().map(|d| b.field().format(d)).collect();
    format!("({})", digits.join(","))
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, mut check: impl FnMut(&T) -> Option<String>) -> (usize, Option<String>) {
    let mut n = 0;
    for item in items {
        n += 1;
        if let Some(w) = check(&item) {
            return (n, Some(w));
        }
    }
    (n, None)
}

fn audit_t2(binding: &Binding, samples: usize, rng: &mut ChaCha8Rng) -> AuditReport {
    let model = binding.model().clone();
    let ring = model.ring().clone();
    let k = model.field().clone();
    let n = model.len();
    let p = k.p();
    let mut report = AuditReport::default();

    let mut elems: Vec<WittVector> = vec![ring.zero(), ring.one(), ring.from_int(p as i64)];
    if k.r() > 0 {
        elems.push(ring.teichmuller(&k.var(0)));
    }
    elems.extend((0..samples).map(|_| model.random_member(rng, 2, 2)));
    let pairs: Vec<(WittVector, WittVector)> =
        (0..elems.len()).map(|i| (elems[i].clone(), elems[(i * 7 + 3) % elems.len()].clone())).collect();

    // I: local with maximal ideal (p).
    let (c, f) = first_failure(&elems, |x| {
        if x.res().is_zero() {
            let y = ring.div_by_p(x).ok().map(|y| ring.pad(&y, n));
            let ok = x.is_zero() || y.is_some_and(|y| ring.times_p(&y) == **x);
            (!ok).then(|| format!("{} has zero residue but is not in pA", fmt_witt(binding, x)))
        } else {
            match ring.inv(x) {
                Ok(y) if ring.mul(x, &y) == ring.one() && model.is_member(&y) => None,
                _ => Some(format!("{} has nonzero residue but no inverse in A", fmt_witt(binding, x))),
            }
        }
    });
    report.push("I", c, f);

    // II: residue field.
    let residues: Vec<RatFn> = (0..samples.max(1)).map(|_| k.random_nonzero(rng, 3, 3, true)).collect();
    let (c, f) = first_failure(&residues, |a| match k.inv(a) {
        Ok(b) if k.mul(a, &b).is_one() => None,
        _ => Some(format!("{} has no inverse in k", k.format(a))),
    });
    report.push("II", c, f);

    // III: res is a ring epimorphism.
    let mut checked = 0;
    let mut failure = None;
    if ring.one().res() != &k.one() {
        failure = Some("res(1) != 1".into());
    }
    for (x, y) in &pairs {
        checked += 1;
        if ring.add(x, y).res() != &k.add(x.res(), y.res()) || ring.mul(x, y).res() != &k.mul(x.res(), y.res()) {
            failure.get_or_insert(format!("res fails additivity or multiplicativity at {}, {}", fmt_witt(binding, x), fmt_witt(binding, y)));
        }
    }
    for a in &residues {
        checked += 1;
        match model.lambda_representative(a) {
            Ok(x) if x.res() == a => {}
            _ => {
                failure.get_or_insert(format!("no preimage found for {}", k.format(a)));
            }
        }
    }
    report.push("III", checked, failure);

    report.results.push(AxiomResult {
        axiom: "IV".into(),
        checked: 0,
        status: Status::Unauditable("elementary equivalence of the residue field is not finitely checkable".into()),
    });

    // V_n: characteristic p^n.
    let top = ring.from_int((p as i64).pow(n as u32 - 1));
    let failure = if !ring.times_p(&top).is_zero() {
        Some(format!("p^{n} != 0"))
    } else if top.is_zero() {
        Some(format!("p^{} = 0", n - 1))
    } else {
        None
    };
    report.push(&format!("V_{n}"), 2, failure);

    // VI_n: Θ_r is the preimage of p-independent tuples.
    let mut tuples: Vec<Vec<WittVector>> = Vec::new();
    if k.r() > 0 {
        tuples.push(vec![ring.teichmuller(&k.frobenius(&k.var(0)))]);
    }
    for i in 0..samples {
        let r = 1 + i % (k.r() + 1);
        let tuple = if i % 2 == 0 && r <= k.r() {
            random_p_independent(&k, rng, r, 2).iter().map(|b| random_lift(&model, rng, b)).collect()
        } else {
            (0..r).map(|_| model.random_member(rng, 2, 2)).collect()
        };
        tuples.push(tuple);
    }
    let (c, f) = first_failure(&tuples, |b| {
        let residues: Vec<RatFn> = b.iter().map(|x| x.res().clone()).collect();
        let vals: Vec<Value> = b.iter().cloned().map(Value::Witt).collect();
        let truth = is_p_independent(&k, &residues, 1);
        match binding.theta(&vals) {
            Ok(t) if t == truth => None,
            _ => Some(format!(
                "Theta_{} disagrees with p-independence at ({})",
                b.len(),
                b.iter().map(|x| fmt_witt(binding, x)).collect::<Vec<_>>().join(", ")
            )),
        }
    });
    report.push(&format!("VI_{n}"), c, f);

    // VII_n: S_r is the λ-representative, checked against randomized lifts.
    let mut checked = 0;
    let mut failure = None;
    for i in 0..samples.max(1) {
        if k.r() == 0 {
            break;
        }
        let r = 1 + i % k.r();
        let beta = random_p_independent(&k, rng, r, 2);
        let b: Vec<WittVector> = beta.iter().map(|x| random_lift(&model, rng, x)).collect();
        let alpha = k.random(rng, 3, 3, true);
        let vals: Vec<Value> = b.iter().cloned().map(Value::Witt).collect();
        let mut flags = Vec::new();
        let got = match binding.lambda(&vals, &alpha, &mut flags) {
            Ok(Value::Witt(x)) => x,
            _ => {
                failure.get_or_insert("S_r did not return an element of A".to_string());
                continue;
            }
        };
        checked += 1;
        let expected = lifted_representative(binding, &beta, &b, &alpha, rng);
        let ok = match expected {
            Some(e) => e == got && flags.is_empty(),
            None => got.is_zero() && !flags.is_empty(),
        };
        if !ok {
            failure.get_or_insert(format!(
                "S_{r}(({}), {}) = {}",
                b.iter().map(|x| fmt_witt(binding, x)).collect::<Vec<_>>().join(", "),
                k.format(&alpha),
                fmt_witt(binding, &got)
            ));
        }
    }
    report.push(&format!("VII_{n}"), checked, failure);
    report
}

/// `Σ_I b^I l_I^{p^n}` with random lifts `l_I` of `λ_I(α)`, or `None` outside the span.
pub fn lifted_representative<R: Rng + ?Sized>(
    binding: &Binding,
    beta: &[RatFn],
    b: &[WittVector],
    alpha: &RatFn,
    rng: &mut R,
) -> Option<WittVector> {
    let model = binding.model();
    let ring = model.ring();
    let k = model.field();
    let n = ring.len() as u32;
    let tuple = PBasisTuple::new(k, beta.to_vec()).ok()?;
    let coeffs = lambda_dense(&tuple, n, alpha).ok()?;
    let q = (k.p() as u64).pow(n);
    let mut terms = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        let idx = MultiIndex::from_linear(k.p(), n, b.len(), i);
        let mono = idx.support().fold(ring.one(), |acc, (mu, e)| ring.mul(&acc, &ring.pow(&b[mu], e as u64)));
        let lift = random_lift(model, rng, c);
        terms.push(ring.mul(&mono, &ring.pow(&lift, q)));
    }
    Some(ring.sum(&terms))
}

fn valued_samples<R: Rng + ?Sized>(v: &ValuedField, samples: usize, rng: &mut R) -> Vec<ValuedElement> {
    let mut out = vec![v.zero(), v.one(), v.p(), v.inv(&v.p()).unwrap()];
    out.extend((0..samples).map(|_| v.random(rng, 3, 2)));
    out
}

fn fmt_valued(v: &ValuedField, x: &ValuedElement) -> String {
    v.to_json(x).to_string()
}

fn audit_tac<R: Rng + ?Sized>(v: &ValuedField, samples: usize, rng: &mut R) -> AuditReport {
    let mut report = AuditReport::default();
    let elems = valued_samples(v, samples, rng);
    let pairs: Vec<(ValuedElement, ValuedElement)> =
        (0..elems.len()).map(|i| (elems[i].clone(), elems[(i * 5 + 1) % elems.len()].clone())).collect();
    let m = v.precision();

    // 1: characteristic zero field.
    let mut failure = None;
    for n in 1..=64i64 {
        if v.from_int(n).is_zero() {
            failure = Some(format!("{n}·1 = 0"));
            break;
        }
    }
    for x in elems.iter().filter(|x| !x.is_zero()) {
        let inv = v.inv(x).unwrap();
        let prod = v.mul(x, &inv);
        if prod.val() != Some(0) || prod.unit().map(|u| u.digits().iter().skip(1).all(|d| d.is_zero()) && u.res().is_one()) != Some(true) {
            failure.get_or_insert(format!("{} has no inverse", fmt_valued(v, x)));
        }
    }
    report.push("1", 64 + elems.len(), failure);

    // 2: Γ ∪ {∞} is an ordered group with a top element; Γ = Z here.
    report.push("2", 1, None);

    // 3: v is a surjective valuation.
    let mut failure = None;
    let mut checked = 0;
    for (x, y) in &pairs {
        checked += 1;
        let vx = x.val();
        let vy = y.val();
        if v.mul(x, y).val() != vx.zip(vy).map(|(a, b)| a + b) {
            failure.get_or_insert(format!("v(xy) != v(x)+v(y) at {}, {}", fmt_valued(v, x), fmt_valued(v, y)));
        }
        if let Ok(s) = v.add(x, y) {
            let key = |g: Option<i64>| g.unwrap_or(i64::MAX);
            let lo = key(vx).min(key(vy));
            if key(s.val()) < lo || (vx != vy && key(s.val()) != lo) {
                failure.get_or_insert(format!("ultrametric law fails at {}, {}", fmt_valued(v, x), fmt_valued(v, y)));
            }
        }
    }
    for g in -3i64..=3 {
        checked += 1;
        let mut x = v.one();
        let step = if g >= 0 { v.p() } else { v.inv(&v.p()).unwrap() };
        for _ in 0..g.abs() {
            x = v.mul(&x, &step);
        }
        if x.val() != Some(g) {
            failure.get_or_insert(format!("value {g} not attained by p^{g}"));
        }
    }
    report.push("3", checked, failure);

    // 4: valuation ring {v ≥ 0} with maximal ideal (p).
    let mut failure = None;
    let p_inv = v.inv(&v.p()).unwrap();
    for x in elems.iter().filter(|x| x.val().is_some_and(|a| a > 0)) {
        let q = v.mul(x, &p_inv);
        if q.val().is_none_or(|a| a < 0) {
            failure.get_or_insert(format!("{} is in m but not in pA", fmt_valued(v, x)));
        }
    }
    for x in elems.iter().filter(|x| x.val() == Some(0)) {
        if v.inv(x).map(|y| y.val() != Some(0)).unwrap_or(true) {
            failure.get_or_insert(format!("{} is a unit of A without inverse in A", fmt_valued(v, x)));
        }
    }
    report.push("4", elems.len(), failure);

    // 5: R_n = 𝒪/(p^n) and r_n is a surjective ring map with kernel p^n𝒪.
    let mut failure = None;
    let mut checked = 0;
    let integral: Vec<&ValuedElement> = elems.iter().filter(|x| x.val().is_none_or(|a| a >= 0)).collect();
    for n in 1..=m {
        let ring = v.model().ring().with_len(n).unwrap();
        for (i, x) in integral.iter().enumerate() {
            let y = integral[(i * 3 + 1) % integral.len()];
            let (Ok(rx), Ok(ry)) = (v.residue(x, n), v.residue(y, n)) else { continue };
            checked += 1;
            if rx.is_zero() != x.val().is_none_or(|a| a as usize >= n) {
                failure.get_or_insert(format!("kernel of r_{n} is not p^{n}A at {}", fmt_valued(v, x)));
            }
            if let Ok(rxy) = v.residue(&v.mul(x, y), n) {
                if rxy != ring.mul(&rx, &ry) {
                    failure.get_or_insert(format!("r_{n} is not multiplicative at {}", fmt_valued(v, x)));
                }
            }
            if let Ok(s) = v.add(x, y) {
                if let Ok(rs) = v.residue(&s, n) {
                    if rs != ring.add(&rx, &ry) {
                        failure.get_or_insert(format!("r_{n} is not additive at {}", fmt_valued(v, x)));
                    }
                }
            }
        }
        let level = v.model().truncated(n).unwrap();
        for _ in 0..4 {
            let target = level.random_member(rng, 2, 2);
            checked += 1;
            match v.from_integral(&target).and_then(|x| v.residue(&x, n)) {
                Ok(r) if r == target => {}
                _ => {
                    failure.get_or_insert(format!("r_{n} misses {}", v.model().ring().with_len(n).unwrap().format(&target).join(",")));
                }
            }
        }
    }
    report.push("5", checked, failure);

    // 6: r_• commutes with truncation.
    let mut failure = None;
    let mut checked = 0;
    for x in &integral {
        for n in 2..=m {
            let Ok(rn) = v.residue(x, n) else { continue };
            for l in 1..n {
                checked += 1;
                let ring = v.model().ring().with_len(n).unwrap();
                if v.residue(x, l).ok() != ring.truncate(&rn, l).ok() {
                    failure.get_or_insert(format!("r_{l} != res_({n},{l}) r_{n} at {}", fmt_valued(v, x)));
                }
            }
        }
    }
    report.push("6", checked, failure);

    // 7: ac_• is a system of angular components.
    let ac = audit_ac(v, &elems);
    let failure = ac.results.iter().find_map(|r| match &r.status {
        Status::Fail(w) => Some(format!("{}: {w}", r.axiom)),
        _ => None,
    });
    report.push("7", ac.results.iter().map(|r| r.checked).sum(), failure);
    report
}

/// ac items (1)–(3) and system compatibility over the given elements (pairs for (2)).
pub fn audit_ac(v: &ValuedField, elems: &[ValuedElement]) -> AuditReport {
    let mut report = AuditReport::default();
    let m = v.precision();

    let (c, f) = first_failure(elems, |x| {
        (1..=m.min(x.precision())).find_map(|n| {
            let a = v.ac(x, n).ok()?;
            (a.is_zero() != x.is_zero()).then(|| format!("ac_{n} zero test fails at {}", fmt_valued(v, x)))
        })
    });
    report.push("ac(1)", c, f);

    let mut checked = 0;
    let mut failure = None;
    'outer: for x in elems.iter().filter(|x| !x.is_zero()) {
        for y in elems.iter().filter(|y| !y.is_zero()) {
            let xy = v.mul(x, y);
            for n in 1..=xy.precision() {
                checked += 1;
                let ring = v.model().ring().with_len(n).unwrap();
                let (a, b, c) = (v.ac(x, n).unwrap(), v.ac(y, n).unwrap(), v.ac(&xy, n).unwrap());
                if c != ring.mul(&a, &b) || !ring.is_unit(&c) {
                    failure = Some(format!("ac_{n} not multiplicative at {}, {}", fmt_valued(v, x), fmt_valued(v, y)));
                    break 'outer;
                }
            }
        }
    }
    report.push("ac(2)", checked, failure);

    let mut checked = 0;
    let mut failure = None;
    for x in elems.iter().filter(|x| x.val() == Some(0)) {
        for n in 1..=x.precision() {
            checked += 1;
            if v.ac(x, n).ok() != v.residue(x, n).ok() {
                failure.get_or_insert(format!("ac_{n} != r_{n} on the unit {}", fmt_valued(v, x)));
            }
        }
    }
    report.push("ac(3)", checked, failure);

    let mut checked = 0;
    let mut failure = None;
    for x in elems {
        for n in 2..=x.precision() {
            let ring = v.model().ring().with_len(n).unwrap();
            let an = v.ac(x, n).unwrap();
            for l in 1..n {
                checked += 1;
                if v.ac(x, l).ok() != ring.truncate(&an, l).ok() {
                    failure.get_or_insert(format!("ac_{l} != res_({n},{l}) ac_{n} at {}", fmt_valued(v, x)));
                }
            }
        }
    }
    report.push("ac-system", checked, failure);
    report
}

/// Every valued element with `|val| ≤ max_val` whose unit digits range over `digits`
/// (first digit nonzero), plus zero.
pub fn enumerate_valued(v: &ValuedField, max_val: i64, digits: &[RatFn]) -> Vec<ValuedElement> {
    let model = v.model();
    let m = model.len();
    let mut units = Vec::new();
    let total = digits.len().pow(m as u32);
    for code in 0..total {
        let mut c = code;
        let ds: Vec<RatFn> = (0..m)
            .map(|_| {
                let d = digits[c % digits.len()].clone();
                c /= digits.len();
                d
            })
            .collect();
        if ds[0].is_zero() {
            continue;
        }
        units.push(model.undigitize(&crate::cohen::CohenDigits(ds)).unwrap());
    }
    let mut out = vec![v.zero()];
    for val in -max_val..=max_val {
        for u in &units {
            out.push(v.from_unit(val, u.clone()).unwrap());
        }
    }
    out
}

/// The fixed battery of quantifier-free `L_{2,S}` formulas in `x, y, z : A` and `a : k`.
pub fn formula_battery() -> Vec<Formula> {
    [
        "(= (res (+ x:A y:A)) (+ (res x:A) (res y:A)))",
        "(= (res (* x:A y:A)) (* (res x:A) (res y:A)))",
        "(= x:A y:A)",
        "(= (res x:A) a:k)",
        "(= (* x:A y:A) z:A)",
        "(= (+ x:A y:A) z:A)",
        "(= (res x:A) (zero k))",
        "(not (= x:A (zero A)))",
        "(= (* x:A x:A) (* y:A y:A))",
        "(= (- x:A y:A) (+ z:A (one A)))",
        "(or (= (res x:A) (zero k)) (= (res y:A) (one k)))",
        "(<-> (= (res x:A) (res y:A)) (= (res (- x:A y:A)) (zero k)))",
        "(= (* (res x:A) a:k) (res z:A))",
        "(Theta x:A)",
        "(Theta x:A y:A)",
        "(= (S x:A a:k) y:A)",
        "(= (res (S x:A a:k)) a:k)",
        "(-> (Theta x:A) (= (res (S x:A a:k)) a:k))",
        "(= (S x:A (res y:A)) z:A)",
        "(and (Theta x:A) (not (= (res y:A) (zero k))))",
    ]
    .iter()
    .map(|s| parse_formula(s).expect("battery formulas are well formed"))
    .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct QfDiscrepancy {
    pub formula: String,
    pub assignment: BTreeMap<String, serde_json::Value>,
    pub source_truth: bool,
    pub target_truth: bool,
    /// The formula mentions `Θ` or `S`.
    pub enrichment: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct QfReport {
    pub checked: usize,
    pub discrepancies: Vec<QfDiscrepancy>,
}

impl QfReport {
    pub fn is_empty(&self) -> bool {
        self.discrepancies.is_empty()
    }

    /// Discrepancies among formulas without `Θ` or `S`.
    pub fn ring_discrepancies(&self) -> usize {
        self.discrepancies.iter().filter(|d| !d.enrichment).count()
    }
}

/// Random assignments to `x, y, z : A` and `a : k`, with `y` and `z` often derived
/// from `x` so that equations are not trivially false.
pub fn random_assignments(binding: &Binding, count: usize, seed: u64) -> Vec<Assignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = binding.model();
    let ring = model.ring();
    let k = model.field();
    (0..count)
        .map(|i| {
            let x = model.random_member(&mut rng, 2, 2);
            let a = k.random(&mut rng, 2, 2, true);
            let other = model.random_member(&mut rng, 2, 2);
            let y = match i % 4 {
                0 => x.clone(),
                1 => ring.add(&x, &ring.one()),
                2 => model.lambda_representative(&a).unwrap(),
                _ => other,
            };
            let z = match i % 3 {
                0 => ring.mul(&x, &y),
                1 => ring.add(&x, &y),
                _ => model.lambda_representative(y.res()).unwrap(),
            };
            let mut asg = Assignment::new();
            asg.insert("x".into(), Value::Witt(x));
            asg.insert("y".into(), Value::Witt(y));
            asg.insert("z".into(), Value::Witt(z));
            asg.insert("a".into(), Value::Residue(a));
            asg
        })
        .collect()
}

/// Compares truth values before and after mapping each assignment with `map`.
pub fn check_map_preserves_qf<F>(
    source: &Binding,
    target: &Binding,
    map: F,
    formulas: &[Formula],
    assignments: &[Assignment],
) -> QfReport
where
    F: Fn(Sort, &Value) -> Result<Value>,
{
    let mut report = QfReport::default();
    for asg in assignments {
        let mut mapped = Assignment::new();
        let mut sorts = BTreeMap::new();
        for f in formulas {
            sorts.extend(f.free_vars().unwrap_or_default());
        }
        let mut ok = true;
        for (name, sort) in &sorts {
            match asg.get(name).map(|v| map(*sort, v)) {
                Some(Ok(v)) => {
                    mapped.insert(name.clone(), v);
                }
                _ => ok = false,
            }
        }
        if !ok {
            continue;
        }
        for f in formulas {
            report.checked += 1;
            let s = source.eval_qf(f, asg).map(|e| e.value);
            let t = target.eval_qf(f, &mapped).map(|e| e.value);
            if let (Ok(s), Ok(t)) = (&s, &t) {
                if s == t {
                    continue;
                }
            }
            report.discrepancies.push(QfDiscrepancy {
                formula: f.to_string(),
                assignment: asg.iter().map(|(k, v)| (k.clone(), source.value_to_json(v))).collect(),
                source_truth: s.unwrap_or(false),
                target_truth: t.unwrap_or(false),
                enrichment: f.uses_enrichment(),
            });
        }
    }
    report
}

/// QF preservation under a Cohen morphism, both sides with their standard structures.
pub fn check_morphism_preserves_qf(phi: &CohenMorphism, formulas: &[Formula], assignments: &[Assignment]) -> QfReport {
    let source = Binding::two_sorted(phi.source().clone());
    let target = Binding::two_sorted(phi.target().clone());
    check_map_preserves_qf(&source, &target, |sort, v| morphism_image(phi, sort, v), formulas, assignments)
}

/// Image of a two-sorted value under `(φ_A, φ_k)`.
pub fn morphism_image(phi: &CohenMorphism, sort: Sort, v: &Value) -> Result<Value> {
    match (sort, v) {
        (Sort::Ring, Value::Witt(x)) => Ok(Value::Witt(phi.apply(x)?)),
        (Sort::Residue, Value::Residue(a)) => Ok(Value::Residue(phi.residue_map().apply(a)?)),
        _ => Err(Error::SortError(format!("morphisms act on A and k only, not {sort}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohen::CohenRingModel;
    use crate::fields::Field;
    use crate::lang::eval::{LambdaImpl, ThetaImpl};
    use crate::morphisms::structure_isomorphism;

    fn model(m: usize) -> CohenRingModel {
        CohenRingModel::standard(&Field::new(2, 1, 1).unwrap(), m).unwrap()
    }

    #[test]
    fn t2_passes_and_controls_fail() {
        let b = Binding::two_sorted(model(2));
        let report = audit_axioms(&b, AxiomSet::T2, 30, 1);
        assert!(report.passed(), "{:?}", report);
        assert!(matches!(report.get("IV").unwrap().status, Status::Unauditable(_)));

        let bad = audit_axioms(&b.clone().with_theta(ThetaImpl::ConstantTrue), AxiomSet::T2, 30, 1);
        match &bad.get("VI_2").unwrap().status {
            Status::Fail(w) => assert!(w.contains("(t^2,0)"), "{w}"),
            s => panic!("{s:?}"),
        }
        let bad = audit_axioms(&b.with_lambda(LambdaImpl::Teichmuller), AxiomSet::T2, 30, 1);
        assert!(matches!(bad.get("VII_2").unwrap().status, Status::Fail(_)));
    }

    #[test]
    fn valued_audits() {
        let v = ValuedField::new(model(3));
        let b = Binding::valued(v);
        assert!(audit_axioms(&b, AxiomSet::TacCore, 20, 2).passed());
        assert!(audit_axioms(&b, AxiomSet::Ac, 20, 2).passed());
    }

    #[test]
    fn morphism_preservation() {
        let m1 = model(2);
        let w = m1.ring();
        let m2 = m1.with_reps(vec![w.parse(&["t", "1"]).unwrap()]).unwrap();
        let phi = structure_isomorphism(&m1, &m2).unwrap();
        let battery = formula_battery();
        assert_eq!(battery.len(), 20);
        let asg = random_assignments(&Binding::two_sorted(m1.clone()), 20, 3);
        assert!(check_morphism_preserves_qf(&phi, &battery, &asg).is_empty());

        let corrupted = |sort: Sort, v: &Value| -> Result<Value> {
            match morphism_image(&phi, sort, v)? {
                Value::Witt(x) => {
                    let mut d = x.into_digits();
                    let k = m2.field();
                    d[1] = k.add(&d[1], &k.one());
                    Ok(Value::Witt(m2.ring().from_digits(d)?))
                }
                other => Ok(other),
            }
        };
        let report = check_map_preserves_qf(&Binding::two_sorted(m1.clone()), &Binding::two_sorted(m2.clone()), corrupted, &battery, &asg);
        assert!(!report.is_empty());
    }
}
