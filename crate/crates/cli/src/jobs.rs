use cohen_core::cohen::{CohenDigits, CohenRingModel, CohenTower};
use cohen_core::fields::{Field, FieldDescriptor, RatFn};
use cohen_core::lang::{self, AxiomSet, Binding, LambdaImpl, Sort, ThetaImpl};
use cohen_core::morphisms::{check_enrichment, structure_isomorphism, tep_embed, CohenMorphism};
use cohen_core::pbasis::{lambda_decompose, PBasisTuple};
use cohen_core::sampling::enrichment_samples;
use cohen_core::valued::ValuedField;
use cohen_core::witt::{WittRing, WittVector};
use cohen_core::{Error, FieldError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::{CohenOp, FieldArgs, LangOp, MorphismOp, ValuedOp, WittOp};

#[derive(Debug)]
pub enum CliError {
    /// Malformed input: exit 64.
    Schema(String),
    /// Library error: exit 2 for markers, 1 otherwise.
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Field(f) => f.into(),
            Error::Syntax(msg) => CliError::Schema(msg),
            Error::SortError(msg) => CliError::Schema(format!("sort error: {msg}")),
            Error::UnboundVariable(v) => CliError::Schema(format!("unbound variable {v}")),
            other => CliError::Core(other),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::DivisionByZero | FieldError::FieldMismatch | FieldError::NotAnEmbedding(_) => {
                CliError::Core(Error::Field(e))
            }
            other => CliError::Schema(other.to_string()),
        }
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Debug)]
pub enum Job {
    Lambda,
    Witt(WittOp),
    Cohen(CohenOp),
    Morphism(MorphismOp),
    Valued(ValuedOp),
    Lang(LangOp),
}

pub fn run(job: &Job, args: &FieldArgs, payload: &Json) -> Res<Json> {
    if !payload.is_object() {
        return Err(CliError::Schema("payload must be a JSON object".into()));
    }
    let field = Field::from_descriptor(&FieldDescriptor { p: args.p, d: args.d, modulus: args.modulus.clone(), r: args.r })?;
    let ctx = Ctx { field, args, payload };
    match job {
        Job::Lambda => ctx.lambda(),
        Job::Witt(op) => ctx.witt(*op),
        Job::Cohen(op) => ctx.cohen(*op),
        Job::Morphism(op) => ctx.morphism(*op),
        Job::Valued(op) => ctx.valued(*op),
        Job::Lang(op) => ctx.lang(*op),
    }
}

struct Ctx<'a> {
    field: Field,
    args: &'a FieldArgs,
    payload: &'a Json,
}

fn missing(key: &str) -> CliError {
    CliError::Schema(format!("missing or ill-typed field \"{key}\""))
}

fn strings(v: &Json, key: &str) -> Res<Vec<String>> {
    v.as_array()
        .ok_or_else(|| missing(key))?
        .iter()
        .map(|d| d.as_str().map(str::to_owned).ok_or_else(|| missing(key)))
        .collect()
}

impl Ctx<'_> {
    fn get(&self, key: &str) -> Res<&Json> {
        self.payload.get(key).ok_or_else(|| missing(key))
    }

    fn level(&self, default: usize) -> usize {
        self.args.m.unwrap_or(default)
    }

    fn elem(&self, key: &str) -> Res<RatFn> {
        let s = self.get(key)?.as_str().ok_or_else(|| missing(key))?;
        Ok(self.field.parse(s)?)
    }

    fn digits(&self, key: &str) -> Res<Vec<String>> {
        strings(self.get(key)?, key)
    }

    fn usize(&self, key: &str) -> Res<usize> {
        self.get(key)?.as_u64().map(|n| n as usize).ok_or_else(|| missing(key))
    }

    fn vector(&self, ring: &WittRing, key: &str) -> Res<WittVector> {
        let ds = self.digits(key)?;
        if ds.len() != ring.len() {
            return Err(CliError::Schema(format!("\"{key}\" must have {} digits", ring.len())));
        }
        let refs: Vec<&str> = ds.iter().map(String::as_str).collect();
        Ok(ring.parse(&refs)?)
    }

    fn ring(&self, m: usize) -> Res<WittRing> {
        Ok(WittRing::new(&self.field, m)?)
    }

    /// `{"pbasis": [..], "reps": [[..], ..]}`; both optional.
    fn model_from(&self, spec: Option<&Json>, m: usize) -> Res<CohenRingModel> {
        let Some(spec) = spec else {
            return Ok(CohenRingModel::standard(&self.field, m)?);
        };
        let ring = self.ring(m)?;
        let pbasis = match spec.get("pbasis") {
            Some(b) => {
                let elems = strings(b, "pbasis")?
                    .iter()
                    .map(|s| self.field.parse(s))
                    .collect::<Result<Vec<_>, _>>()?;
                PBasisTuple::new(&self.field, elems)?
            }
            None => PBasisTuple::variables(&self.field),
        };
        match spec.get("reps") {
            Some(reps) => {
                let reps = reps
                    .as_array()
                    .ok_or_else(|| missing("reps"))?
                    .iter()
                    .map(|r| {
                        let ds = strings(r, "reps")?;
                        let refs: Vec<&str> = ds.iter().map(String::as_str).collect();
                        Ok(ring.parse(&refs)?)
                    })
                    .collect::<Res<Vec<_>>>()?;
                Ok(CohenRingModel::new(&ring, pbasis, reps)?)
            }
            None => Ok(CohenRingModel::with_teichmuller_reps(&ring, pbasis)?),
        }
    }

    fn model(&self) -> Res<CohenRingModel> {
        self.model_from(self.payload.get("model"), self.level(2))
    }

    fn lambda(&self) -> Res<Json> {
        let alpha = self.elem("alpha")?;
        let beta = match self.payload.get("pbasis") {
            Some(b) => {
                let elems = strings(b, "pbasis")?
                    .iter()
                    .map(|s| self.field.parse(s))
                    .collect::<Result<Vec<_>, _>>()?;
                PBasisTuple::new(&self.field, elems)?
            }
            None => PBasisTuple::variables(&self.field),
        };
        let m = self.level(1) as u32;
        Ok(lambda_decompose(&beta, m, &alpha)?.to_json(&self.field))
    }

    fn witt(&self, op: WittOp) -> Res<Json> {
        let m = match (self.args.m, self.payload.get("x")) {
            (Some(m), _) => m,
            (None, Some(x)) => strings(x, "x")?.len(),
            (None, None) => 2,
        };
        let ring = self.ring(m)?;
        let x = || self.vector(&ring, "x");
        let y = || self.vector(&ring, "y");
        let result = match op {
            WittOp::Add => ring.add(&x()?, &y()?),
            WittOp::Sub => ring.sub(&x()?, &y()?),
            WittOp::Mul => ring.mul(&x()?, &y()?),
            WittOp::Neg => ring.neg(&x()?),
            WittOp::Inv => ring.inv(&x()?)?,
            WittOp::Frobenius => ring.frobenius(&x()?),
            WittOp::Verschiebung => ring.verschiebung(&x()?),
            WittOp::DivByP => ring.div_by_p(&x()?)?,
            WittOp::Teichmuller => ring.teichmuller(&self.elem("alpha")?),
            WittOp::Truncate => {
                let n = self.usize("n")?;
                let t = ring.truncate(&x()?, n)?;
                return Ok(json!({ "result": ring.with_len(n)?.to_json(&t) }));
            }
        };
        Ok(json!({ "result": ring.to_json(&result) }))
    }

    fn cohen(&self, op: CohenOp) -> Res<Json> {
        let model = self.model()?;
        let ring = model.ring();
        Ok(match op {
            CohenOp::Digitize => json!({ "digits": model.digitize(&self.vector(ring, "x")?)?.to_json(&self.field) }),
            CohenOp::Undigitize => {
                let digits = self
                    .digits("digits")?
                    .iter()
                    .map(|s| self.field.parse(s))
                    .collect::<Result<Vec<_>, _>>()?;
                if digits.len() != model.len() {
                    return Err(CliError::Schema(format!("\"digits\" must have {} entries", model.len())));
                }
                json!({ "result": ring.to_json(&model.undigitize(&CohenDigits(digits))?) })
            }
            CohenOp::Member => json!({ "member": model.is_member(&self.vector(ring, "x")?) }),
            CohenOp::Rep => json!({ "result": ring.to_json(&model.lambda_representative(&self.elem("alpha")?)?) }),
            CohenOp::MultRep => {
                json!({ "result": ring.to_json(&model.multiplicative_representative(&self.elem("alpha")?)?) })
            }
            CohenOp::Tower => {
                let samples = self
                    .digits("alpha")?
                    .iter()
                    .map(|s| self.field.parse(s))
                    .collect::<Result<Vec<_>, _>>()?;
                match CohenTower::from_top(&model).verify(&samples) {
                    Ok(()) => json!({ "compatible": true, "checked": samples.len() }),
                    Err(Error::TowerIncompatible { upper, lower, alpha }) => json!({
                        "compatible": false,
                        "upper": upper,
                        "lower": lower,
                        "alpha": alpha,
                    }),
                    Err(e) => return Err(e.into()),
                }
            }
        })
    }

    fn apply_optional(&self, phi: &CohenMorphism, out: &mut Json) -> Res<()> {
        if self.payload.get("x").is_some() {
            let x = self.vector(phi.source().ring(), "x")?;
            out["image"] = phi.target().ring().to_json(&phi.apply(&x)?);
        }
        Ok(())
    }

    fn morphism_from_payload(&self) -> Res<(CohenMorphism, Option<Vec<WittVector>>)> {
        let m = self.level(2);
        if let Some(stage) = self.payload.get("stage") {
            let stage = stage.as_u64().ok_or_else(|| missing("stage"))? as u32;
            let model = self.model_from(self.payload.get("source"), m)?;
            let tep = tep_embed(&model, stage)?;
            return Ok((tep.morphism, Some(tep.witnesses)));
        }
        let m1 = self.model_from(self.payload.get("source"), m)?;
        let m2 = self.model_from(self.payload.get("target"), m)?;
        Ok((structure_isomorphism(&m1, &m2)?, None))
    }

    fn morphism(&self, op: MorphismOp) -> Res<Json> {
        match op {
            MorphismOp::StructureIso => {
                let m = self.level(2);
                let m1 = self.model_from(self.payload.get("source"), m)?;
                let m2 = self.model_from(self.payload.get("target"), m)?;
                let phi = structure_isomorphism(&m1, &m2)?;
                let mut out = json!({ "morphism": phi.to_json() });
                self.apply_optional(&phi, &mut out)?;
                Ok(out)
            }
            MorphismOp::Tep => {
                if self.payload.get("stage").is_none() {
                    return Err(missing("stage"));
                }
                let (phi, witnesses) = self.morphism_from_payload()?;
                let ring = phi.target().ring();
                let witnesses: Vec<Json> = witnesses.unwrap_or_default().iter().map(|w| ring.to_json(w)).collect();
                let mut out = json!({ "morphism": phi.to_json(), "witnesses": witnesses });
                self.apply_optional(&phi, &mut out)?;
                Ok(out)
            }
            MorphismOp::CheckEnrichment => {
                let (phi, _) = self.morphism_from_payload()?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.args.seed);
                let samples = enrichment_samples(phi.source(), &mut rng, self.args.samples);
                let report = check_enrichment(&phi, &samples);
                let ring = phi.target().ring();
                let discrepancies: Vec<Json> = report
                    .discrepancies
                    .iter()
                    .map(|d| json!({ "index": d.index, "lhs": ring.to_json(&d.lhs), "rhs": ring.to_json(&d.rhs) }))
                    .collect();
                Ok(json!({ "checked": report.checked, "clean": report.is_clean(), "discrepancies": discrepancies }))
            }
        }
    }

    fn valued_field(&self) -> Res<ValuedField> {
        Ok(ValuedField::new(CohenRingModel::standard(&self.field, self.level(2))?))
    }

    fn valued(&self, op: ValuedOp) -> Res<Json> {
        let v = self.valued_field()?;
        let x = v.from_json(self.get("x")?)?;
        Ok(match op {
            ValuedOp::V => json!({ "val": x.val().map(Json::from).unwrap_or_else(|| "inf".into()) }),
            ValuedOp::Res => {
                let n = self.usize("n")?;
                json!({ "result": v.model().ring().with_len(n)?.to_json(&v.residue(&x, n)?) })
            }
            ValuedOp::Ac => {
                let n = self.usize("n")?;
                json!({ "result": v.model().ring().with_len(n)?.to_json(&v.ac(&x, n)?) })
            }
            ValuedOp::Arith => {
                let op = self.get("op")?.as_str().ok_or_else(|| missing("op"))?;
                let y = v.from_json(self.get("y")?)?;
                json!({ "result": v.to_json(&v.arith(op, &x, &y)?) })
            }
        })
    }

    fn binding(&self) -> Res<Binding> {
        let structure = self.payload.get("structure").and_then(Json::as_str).unwrap_or("two-sorted");
        let binding = match structure {
            "two-sorted" => Binding::two_sorted(self.model()?),
            "valued" => Binding::valued(self.valued_field()?),
            other => return Err(CliError::Schema(format!("unknown structure {other}"))),
        };
        let theta = match self.payload.get("theta").and_then(Json::as_str).unwrap_or("standard") {
            "standard" => ThetaImpl::Standard,
            "constant-true" => ThetaImpl::ConstantTrue,
            other => return Err(CliError::Schema(format!("unknown theta interpretation {other}"))),
        };
        let lambda = match self.payload.get("lambda").and_then(Json::as_str).unwrap_or("standard") {
            "standard" => LambdaImpl::Standard,
            "teichmuller" => LambdaImpl::Teichmuller,
            other => return Err(CliError::Schema(format!("unknown lambda interpretation {other}"))),
        };
        Ok(binding.with_theta(theta).with_lambda(lambda))
    }

    fn lang(&self, op: LangOp) -> Res<Json> {
        let binding = self.binding()?;
        match op {
            LangOp::Eval => {
                let empty = json!({});
                let asg_json = self.payload.get("assignment").unwrap_or(&empty);
                let asg_obj = asg_json.as_object().ok_or_else(|| missing("assignment"))?;
                let read = |vars: std::collections::BTreeMap<String, Sort>| -> Res<lang::Assignment> {
                    let mut asg = lang::Assignment::new();
                    for (name, sort) in vars {
                        let raw = asg_obj.get(&name).ok_or_else(|| missing(&format!("assignment.{name}")))?;
                        asg.insert(name, binding.value_from_json(sort, raw)?);
                    }
                    Ok(asg)
                };
                if let Some(src) = self.payload.get("formula") {
                    let f = lang::parse_formula(src.as_str().ok_or_else(|| missing("formula"))?)?;
                    let asg = read(f.free_vars()?)?;
                    let out = binding.eval_qf(&f, &asg)?;
                    Ok(json!({ "value": out.value, "flags": out.flags }))
                } else {
                    let t = lang::parse_term(self.get("term")?.as_str().ok_or_else(|| missing("term"))?)?;
                    let asg = read(t.free_vars()?)?;
                    let out = binding.eval_term(&t, &asg)?;
                    Ok(json!({ "value": binding.value_to_json(&out.value), "flags": out.flags }))
                }
            }
            LangOp::Audit => {
                let which = AxiomSet::parse(self.payload.get("axioms").and_then(Json::as_str).unwrap_or("T2"))?;
                let report = lang::audit_axioms(&binding, which, self.args.samples, self.args.seed);
                let mut out = report.to_json();
                out["passed"] = report.passed().into();
                Ok(out)
            }
        }
    }
}
