//! Python bindings. Field elements travel as strings, Witt vectors as lists of digit
//! strings, valued elements as `{"val", "unit", "precision"}` dicts.

use std::collections::HashMap;

use cohen_core::cohen::{CohenDigits, CohenRingModel, CohenTower};
use cohen_core::fields::{Field, FieldDescriptor, RatFn};
use cohen_core::lang::{self, AxiomSet, Binding, LambdaImpl, ThetaImpl};
use cohen_core::morphisms::{self, check_enrichment};
use cohen_core::pbasis::{is_p_independent, lambda_decompose, PBasisTuple};
use cohen_core::sampling::enrichment_samples;
use cohen_core::valued::{ValuedElement, ValuedField};
use cohen_core::witt::{WittRing, WittVector};
use cohen_core::{Error, FieldError};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

create_exception!(cohen_py, CohenError, PyValueError, "Raised for library errors; the message starts with the error kind.");

fn err(e: Error) -> PyErr {
    CohenError::new_err(format!("{}: {e}", e.kind()))
}

fn ferr(e: FieldError) -> PyErr {
    err(Error::Field(e))
}

fn to_py<'py>(py: Python<'py>, value: &Json) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<Json> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `F_{p^d}(t1..tr)`.
#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: Field,
}

impl PyField {
    fn parse(&self, s: &str) -> PyResult<RatFn> {
        self.inner.parse(s).map_err(ferr)
    }

    fn parse_all(&self, items: &[String]) -> PyResult<Vec<RatFn>> {
        items.iter().map(|s| self.parse(s)).collect()
    }

    fn fmt(&self, x: &RatFn) -> String {
        self.inner.format(x)
    }
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, d = 1, r = 1, modulus = None))]
    fn new(p: u32, d: usize, r: usize, modulus: Option<Vec<u32>>) -> PyResult<Self> {
        let inner = Field::from_descriptor(&FieldDescriptor { p, d, modulus, r }).map_err(ferr)?;
        Ok(PyField { inner })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    /// Canonical string form.
    fn normalize(&self, a: &str) -> PyResult<String> {
        Ok(self.fmt(&self.parse(a)?))
    }

    fn add(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(&self.inner.add(&self.parse(a)?, &self.parse(b)?)))
    }

    fn sub(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(&self.inner.sub(&self.parse(a)?, &self.parse(b)?)))
    }

    fn mul(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(&self.inner.mul(&self.parse(a)?, &self.parse(b)?)))
    }

    fn div(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.fmt(&self.inner.div(&self.parse(a)?, &self.parse(b)?).map_err(ferr)?))
    }

    fn frobenius(&self, a: &str) -> PyResult<String> {
        Ok(self.fmt(&self.inner.frobenius(&self.parse(a)?)))
    }

    /// `None` when `a` is not a p-th power.
    fn pth_root(&self, a: &str) -> PyResult<Option<String>> {
        Ok(self.inner.pth_root(&self.parse(a)?).map(|x| self.fmt(&x)))
    }

    #[pyo3(signature = (elems, m = 1))]
    fn is_p_independent(&self, elems: Vec<String>, m: u32) -> PyResult<bool> {
        Ok(is_p_independent(&self.inner, &self.parse_all(&elems)?, m))
    }

    /// λ-decomposition of `alpha` at level `m`, keyed by multi-index.
    #[pyo3(signature = (alpha, m, pbasis = None))]
    fn lambda_decompose<'py>(
        &self,
        py: Python<'py>,
        alpha: &str,
        m: u32,
        pbasis: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let beta = match pbasis {
            Some(b) => PBasisTuple::new(&self.inner, self.parse_all(&b)?).map_err(err)?,
            None => PBasisTuple::variables(&self.inner),
        };
        let dec = lambda_decompose(&beta, m, &self.parse(alpha)?).map_err(err)?;
        to_py(py, &dec.to_json(&self.inner))
    }

    fn __repr__(&self) -> String {
        let d = self.inner.descriptor();
        format!("Field(p={}, d={}, r={})", d.p, d.d, d.r)
    }
}

/// `W_m(k)`.
#[pyclass(name = "WittRing", frozen)]
struct PyWittRing {
    inner: WittRing,
}

impl PyWittRing {
    fn read(&self, x: &[String]) -> PyResult<WittVector> {
        read_vector(&self.inner, x)
    }

    fn show(&self, x: &WittVector) -> Vec<String> {
        self.inner.format(x)
    }
}

fn read_vector(ring: &WittRing, x: &[String]) -> PyResult<WittVector> {
    if x.len() != ring.len() {
        return Err(PyValueError::new_err(format!("expected {} digits, got {}", ring.len(), x.len())));
    }
    let refs: Vec<&str> = x.iter().map(String::as_str).collect();
    ring.parse(&refs).map_err(err)
}

#[pymethods]
impl PyWittRing {
    #[new]
    fn new(field: &PyField, m: usize) -> PyResult<Self> {
        Ok(PyWittRing { inner: WittRing::new(&field.inner, m).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn from_int(&self, n: i64) -> Vec<String> {
        self.show(&self.inner.from_int(n))
    }

    fn add(&self, x: Vec<String>, y: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.add(&self.read(&x)?, &self.read(&y)?)))
    }

    fn sub(&self, x: Vec<String>, y: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.sub(&self.read(&x)?, &self.read(&y)?)))
    }

    fn mul(&self, x: Vec<String>, y: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.mul(&self.read(&x)?, &self.read(&y)?)))
    }

    fn neg(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.neg(&self.read(&x)?)))
    }

    fn inv(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.inv(&self.read(&x)?).map_err(err)?))
    }

    fn frobenius(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.frobenius(&self.read(&x)?)))
    }

    fn verschiebung(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.verschiebung(&self.read(&x)?)))
    }

    fn div_by_p(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(self.show(&self.inner.div_by_p(&self.read(&x)?).map_err(err)?))
    }

    fn teichmuller(&self, alpha: &str) -> PyResult<Vec<String>> {
        let a = self.inner.field().parse(alpha).map_err(ferr)?;
        Ok(self.show(&self.inner.teichmuller(&a)))
    }

    fn truncate(&self, x: Vec<String>, n: usize) -> PyResult<Vec<String>> {
        let t = self.inner.truncate(&self.read(&x)?, n).map_err(err)?;
        Ok(t.digits().iter().map(|d| self.inner.field().format(d)).collect())
    }
}

/// The Cohen–Witt ring `C_m(k)` with a choice of p-basis and representatives.
#[pyclass(name = "CohenRing", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCohenRing {
    inner: CohenRingModel,
}

impl PyCohenRing {
    fn ring(&self) -> &WittRing {
        self.inner.ring()
    }
}

#[pymethods]
impl PyCohenRing {
    #[new]
    #[pyo3(signature = (field, m, pbasis = None, reps = None))]
    fn new(field: &PyField, m: usize, pbasis: Option<Vec<String>>, reps: Option<Vec<Vec<String>>>) -> PyResult<Self> {
        let ring = WittRing::new(&field.inner, m).map_err(err)?;
        let beta = match pbasis {
            Some(b) => PBasisTuple::new(&field.inner, field.parse_all(&b)?).map_err(err)?,
            None => PBasisTuple::variables(&field.inner),
        };
        let inner = match reps {
            Some(reps) => {
                let reps = reps.iter().map(|r| read_vector(&ring, r)).collect::<PyResult<Vec<_>>>()?;
                CohenRingModel::new(&ring, beta, reps)
            }
            None => CohenRingModel::with_teichmuller_reps(&ring, beta),
        }
        .map_err(err)?;
        Ok(PyCohenRing { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn is_member(&self, x: Vec<String>) -> PyResult<bool> {
        Ok(self.inner.is_member(&read_vector(self.ring(), &x)?))
    }

    fn digitize(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        let digits = self.inner.digitize(&read_vector(self.ring(), &x)?).map_err(err)?;
        Ok(digits.0.iter().map(|d| self.inner.field().format(d)).collect())
    }

    fn undigitize(&self, digits: Vec<String>) -> PyResult<Vec<String>> {
        let k = self.inner.field();
        let ds = digits.iter().map(|s| k.parse(s)).collect::<Result<Vec<_>, _>>().map_err(ferr)?;
        Ok(self.ring().format(&self.inner.undigitize(&CohenDigits(ds)).map_err(err)?))
    }

    /// λ-representative of `alpha`.
    fn representative(&self, alpha: &str) -> PyResult<Vec<String>> {
        let a = self.inner.field().parse(alpha).map_err(ferr)?;
        Ok(self.ring().format(&self.inner.lambda_representative(&a).map_err(err)?))
    }

    fn multiplicative_representative(&self, alpha: &str) -> PyResult<Vec<String>> {
        let a = self.inner.field().parse(alpha).map_err(ferr)?;
        Ok(self.ring().format(&self.inner.multiplicative_representative(&a).map_err(err)?))
    }

    /// `None` when the truncation tower agrees on every sample, else the first failure.
    fn verify_tower(&self, alphas: Vec<String>) -> PyResult<Option<(usize, usize, String)>> {
        let k = self.inner.field();
        let samples = alphas.iter().map(|s| k.parse(s)).collect::<Result<Vec<_>, _>>().map_err(ferr)?;
        match CohenTower::from_top(&self.inner).verify(&samples) {
            Ok(()) => Ok(None),
            Err(Error::TowerIncompatible { upper, lower, alpha }) => Ok(Some((upper, lower, alpha))),
            Err(e) => Err(err(e)),
        }
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }
}

#[pyclass(name = "CohenMorphism", frozen)]
struct PyCohenMorphism {
    inner: morphisms::CohenMorphism,
}

#[pymethods]
impl PyCohenMorphism {
    fn apply(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        let a = read_vector(self.inner.source().ring(), &x)?;
        Ok(self.inner.target().ring().format(&self.inner.apply(&a).map_err(err)?))
    }

    fn apply_residue(&self, a: &str) -> PyResult<String> {
        let k = self.inner.source().field();
        let image = self.inner.residue_map().apply(&k.parse(a).map_err(ferr)?).map_err(ferr)?;
        Ok(self.inner.target().field().format(&image))
    }

    /// `other ∘ self`.
    fn then(&self, other: &PyCohenMorphism) -> PyResult<PyCohenMorphism> {
        Ok(PyCohenMorphism { inner: self.inner.then(&other.inner).map_err(err)? })
    }

    #[getter]
    fn source(&self) -> PyCohenRing {
        PyCohenRing { inner: self.inner.source().clone() }
    }

    #[getter]
    fn target(&self) -> PyCohenRing {
        PyCohenRing { inner: self.inner.target().clone() }
    }

    #[pyo3(signature = (samples = 50, seed = 0))]
    fn check_enrichment<'py>(&self, py: Python<'py>, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = enrichment_samples(self.inner.source(), &mut rng, samples);
        let report = check_enrichment(&self.inner, &samples);
        let ring = self.inner.target().ring();
        let discrepancies: Vec<Json> = report
            .discrepancies
            .iter()
            .map(|d| serde_json::json!({ "index": d.index, "lhs": ring.to_json(&d.lhs), "rhs": ring.to_json(&d.rhs) }))
            .collect();
        to_py(py, &serde_json::json!({ "checked": report.checked, "discrepancies": discrepancies }))
    }

    /// Runs the fixed formula battery on `count` seeded assignments.
    #[pyo3(signature = (count = 20, seed = 0))]
    fn check_qf<'py>(&self, py: Python<'py>, count: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let source = Binding::two_sorted(self.inner.source().clone());
        let assignments = lang::random_assignments(&source, count, seed);
        let report = lang::check_morphism_preserves_qf(&self.inner, &lang::formula_battery(), &assignments);
        to_py(py, &serde_json::to_value(&report).map_err(|e| PyValueError::new_err(e.to_string()))?)
    }

    fn to_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json())
    }
}

#[pyfunction]
fn structure_isomorphism(source: &PyCohenRing, target: &PyCohenRing) -> PyResult<PyCohenMorphism> {
    Ok(PyCohenMorphism { inner: morphisms::structure_isomorphism(&source.inner, &target.inner).map_err(err)? })
}

/// Stage embedding and the witnesses `[u_i]` whose `p^n`-th powers are the images of `s(t_i)`.
#[pyfunction]
fn tep_embed(model: &PyCohenRing, stage: u32) -> PyResult<(PyCohenMorphism, Vec<Vec<String>>)> {
    let tep = morphisms::tep_embed(&model.inner, stage).map_err(err)?;
    let ring = tep.morphism.target().ring().clone();
    let witnesses = tep.witnesses.iter().map(|w| ring.format(w)).collect();
    Ok((PyCohenMorphism { inner: tep.morphism }, witnesses))
}

/// Finite-precision model of the unramified valued field over `k`.
#[pyclass(name = "ValuedField", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyValuedField {
    inner: ValuedField,
}

impl PyValuedField {
    fn read(&self, x: &Bound<'_, PyAny>) -> PyResult<ValuedElement> {
        self.inner.from_json(&from_py(x)?).map_err(err)
    }

    fn show<'py>(&self, py: Python<'py>, x: &ValuedElement) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_json(x))
    }
}

#[pymethods]
impl PyValuedField {
    #[new]
    fn new(field: &PyField, precision: usize) -> PyResult<Self> {
        let model = CohenRingModel::standard(&field.inner, precision).map_err(err)?;
        Ok(PyValuedField { inner: ValuedField::new(model) })
    }

    fn from_int<'py>(&self, py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
        self.show(py, &self.inner.from_int(n))
    }

    /// `op` is one of `add`, `sub`, `mul`, `div`.
    fn arith<'py>(&self, py: Python<'py>, op: &str, x: &Bound<'py, PyAny>, y: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let z = self.inner.arith(op, &self.read(x)?, &self.read(y)?).map_err(err)?;
        self.show(py, &z)
    }

    /// `None` for zero.
    fn valuation(&self, x: &Bound<'_, PyAny>) -> PyResult<Option<i64>> {
        Ok(self.read(x)?.val())
    }

    fn residue(&self, x: &Bound<'_, PyAny>, n: usize) -> PyResult<Vec<String>> {
        let r = self.inner.residue(&self.read(x)?, n).map_err(err)?;
        Ok(r.digits().iter().map(|d| self.inner.model().field().format(d)).collect())
    }

    fn ac(&self, x: &Bound<'_, PyAny>, n: usize) -> PyResult<Vec<String>> {
        let r = self.inner.ac(&self.read(x)?, n).map_err(err)?;
        Ok(r.digits().iter().map(|d| self.inner.model().field().format(d)).collect())
    }
}

/// A structure for the two-sorted or valued language.
#[pyclass(name = "Structure", frozen)]
struct PyStructure {
    inner: Binding,
}

fn interpretations(theta: &str, lambda: &str) -> PyResult<(ThetaImpl, LambdaImpl)> {
    let theta = match theta {
        "standard" => ThetaImpl::Standard,
        "constant-true" => ThetaImpl::ConstantTrue,
        other => return Err(PyValueError::new_err(format!("unknown theta interpretation {other}"))),
    };
    let lambda = match lambda {
        "standard" => LambdaImpl::Standard,
        "teichmuller" => LambdaImpl::Teichmuller,
        other => return Err(PyValueError::new_err(format!("unknown lambda interpretation {other}"))),
    };
    Ok((theta, lambda))
}

#[pymethods]
impl PyStructure {
    #[staticmethod]
    #[pyo3(signature = (model, theta = "standard", lambda_ = "standard"))]
    fn two_sorted(model: &PyCohenRing, theta: &str, lambda_: &str) -> PyResult<Self> {
        let (t, l) = interpretations(theta, lambda_)?;
        Ok(PyStructure { inner: Binding::two_sorted(model.inner.clone()).with_theta(t).with_lambda(l) })
    }

    #[staticmethod]
    fn valued(field: &PyValuedField) -> Self {
        PyStructure { inner: Binding::valued(field.inner.clone()) }
    }

    /// Truth value of a quantifier-free formula and the partiality flags raised.
    fn eval(&self, formula: &str, assignment: &Bound<'_, PyAny>) -> PyResult<(bool, Vec<String>)> {
        let f = lang::parse_formula(formula).map_err(err)?;
        let raw = from_py(assignment)?;
        let mut asg = HashMap::new();
        for (name, sort) in f.free_vars().map_err(err)? {
            let v = raw.get(&name).ok_or_else(|| PyValueError::new_err(format!("no value for {name}")))?;
            asg.insert(name, self.inner.value_from_json(sort, v).map_err(err)?);
        }
        let out = self.inner.eval_qf(&f, &asg).map_err(err)?;
        Ok((out.value, out.flags))
    }

    /// `axioms` is `T2`, `tac-core` or `ac`.
    #[pyo3(signature = (axioms = "T2", samples = 50, seed = 0))]
    fn audit<'py>(&self, py: Python<'py>, axioms: &str, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let which = AxiomSet::parse(axioms).map_err(err)?;
        let report = lang::audit_axioms(&self.inner, which, samples, seed);
        let mut out = report.to_json();
        out["passed"] = report.passed().into();
        to_py(py, &out)
    }
}

#[pymodule]
pub fn cohen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CohenError", m.py().get_type::<CohenError>())?;
    m.add_class::<PyField>()?;
    m.add_class::<PyWittRing>()?;
    m.add_class::<PyCohenRing>()?;
    m.add_class::<PyCohenMorphism>()?;
    m.add_class::<PyValuedField>()?;
    m.add_class::<PyStructure>()?;
    m.add_function(wrap_pyfunction!(structure_isomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(tep_embed, m)?)?;
    Ok(())
}
