use std::collections::HashMap;

use crate::cohen::{lambda_rep_for, CohenRingModel};
use crate::error::{Error, Result};
use crate::fields::{Field, RatFn};
use crate::pbasis::is_p_independent;
use crate::valued::{ValuedElement, ValuedField};
use crate::witt::{WittRing, WittVector};

use super::syntax::{Formula, Sort, Term};

/// A value in some carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    /// `A` in the two-sorted binding, `R_n` (`n ≥ 2`) in the valued one.
    Witt(WittVector),
    Residue(RatFn),
    /// `K`, and `A` as the valuation ring, in the valued binding.
    Valued(ValuedElement),
    /// `None` is `∞`.
    Gamma(Option<i64>),
}

pub type Assignment = HashMap<String, Value>;

/// Interpretation of `Θ_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaImpl {
    Standard,
    ConstantTrue,
}

/// Interpretation of `S_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaImpl {
    Standard,
    Teichmuller,
}

#[derive(Clone, Debug)]
pub enum Carrier {
    /// `(C_n(k), k)` for `L_{2,S}`.
    TwoSorted(CohenRingModel),
    /// `(K, 𝒪, Z ∪ {∞}, R_•)` for `L_{ac,S}` at precision `M`.
    Valued(ValuedField),
}

/// A concrete structure: carriers plus interpretations of `Θ` and `S`.
#[derive(Clone, Debug)]
pub struct Binding {
    carrier: Carrier,
    theta: ThetaImpl,
    lambda: LambdaImpl,
}

/// A value together with the partiality flags raised while computing it.
#[derive(Clone, Debug)]
pub struct Evaluated<T> {
    pub value: T,
    pub flags: Vec<String>,
}

impl Binding {
    pub fn two_sorted(model: CohenRingModel) -> Self {
        Binding { carrier: Carrier::TwoSorted(model), theta: ThetaImpl::Standard, lambda: LambdaImpl::Standard }
    }

    pub fn valued(field: ValuedField) -> Self {
        Binding { carrier: Carrier::Valued(field), theta: ThetaImpl::Standard, lambda: LambdaImpl::Standard }
    }

    pub fn with_theta(mut self, theta: ThetaImpl) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_lambda(mut self, lambda: LambdaImpl) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn theta_impl(&self) -> ThetaImpl {
        self.theta
    }

    pub fn lambda_impl(&self) -> LambdaImpl {
        self.lambda
    }

    /// The Cohen–Witt model interpreting `A` (two-sorted) or `R_M` (valued).
    pub fn model(&self) -> &CohenRingModel {
        match &self.carrier {
            Carrier::TwoSorted(m) => m,
            Carrier::Valued(v) => v.model(),
        }
    }

    pub fn field(&self) -> &Field {
        self.model().field()
    }

    /// `n` for `C_n(k)`, or the precision `M`.
    pub fn level(&self) -> usize {
        self.model().len()
    }

    fn ring_at(&self, n: usize) -> Result<WittRing> {
        self.model().ring().with_len(n)
    }

    pub fn has_sort(&self, sort: Sort) -> bool {
        match (&self.carrier, sort) {
            (_, Sort::Ring | Sort::Residue) => true,
            (Carrier::TwoSorted(_), _) => false,
            (Carrier::Valued(v), Sort::Quotient(n)) => (n as usize) <= v.precision(),
            (Carrier::Valued(_), _) => true,
        }
    }

    /// Whether `value` lies in the carrier of `sort`.
    pub fn accepts(&self, sort: Sort, value: &Value) -> bool {
        match (&self.carrier, sort, value) {
            (_, Sort::Residue, Value::Residue(x)) => self.field().validate(x).is_ok(),
            (Carrier::TwoSorted(m), Sort::Ring, Value::Witt(x)) => x.len() == m.len() && m.is_member(x),
            (Carrier::Valued(_), Sort::Ring, Value::Valued(x)) => x.val().is_none_or(|v| v >= 0),
            (Carrier::Valued(_), Sort::Field, Value::Valued(_)) => true,
            (Carrier::Valued(_), Sort::Value, Value::Gamma(_)) => true,
            (Carrier::Valued(v), Sort::Quotient(n), Value::Witt(x)) => {
                x.len() == n as usize && (n as usize) <= v.precision() && self.model().truncated(n as usize).is_ok_and(|c| c.is_member(x))
            }
            _ => false,
        }
    }

    fn check_sort(&self, sort: Sort) -> Result<()> {
        if self.has_sort(sort) {
            Ok(())
        } else {
            Err(Error::SortError(format!("sort {sort} is not interpreted in this structure")))
        }
    }

    fn zero(&self, sort: Sort) -> Result<Value> {
        self.check_sort(sort)?;
        Ok(match (&self.carrier, sort) {
            (_, Sort::Residue) => Value::Residue(self.field().zero()),
            (Carrier::TwoSorted(m), _) => Value::Witt(m.ring().zero()),
            (Carrier::Valued(v), Sort::Ring | Sort::Field) => Value::Valued(v.zero()),
            (Carrier::Valued(_), Sort::Value) => Value::Gamma(Some(0)),
            (Carrier::Valued(_), Sort::Quotient(n)) => Value::Witt(self.ring_at(n as usize)?.zero()),
        })
    }

    fn one(&self, sort: Sort) -> Result<Value> {
        self.check_sort(sort)?;
        Ok(match (&self.carrier, sort) {
            (_, Sort::Residue) => Value::Residue(self.field().one()),
            (Carrier::TwoSorted(m), _) => Value::Witt(m.ring().one()),
            (Carrier::Valued(v), Sort::Ring | Sort::Field) => Value::Valued(v.one()),
            (Carrier::Valued(_), Sort::Quotient(n)) => Value::Witt(self.ring_at(n as usize)?.one()),
            (Carrier::Valued(_), Sort::Value) => return Err(Error::SortError("no constant 1 in G".into())),
        })
    }

    fn literal(&self, sort: Sort, parts: &[String]) -> Result<Value> {
        self.check_sort(sort)?;
        let value = match (&self.carrier, sort) {
            (_, Sort::Residue) => {
                if parts.len() != 1 {
                    return Err(Error::Syntax("a residue literal has one part".into()));
                }
                Value::Residue(self.field().parse(&parts[0])?)
            }
            (Carrier::TwoSorted(m), _) => {
                let strs: Vec<&str> = parts.iter().map(String::as_str).collect();
                Value::Witt(m.ring().parse(&strs)?)
            }
            (Carrier::Valued(_), Sort::Value) => {
                let [g] = parts else { return Err(Error::Syntax("a value-group literal has one part".into())) };
                Value::Gamma(if g == "inf" {
                    None
                } else {
                    Some(g.parse().map_err(|_| Error::Syntax(format!("bad value {g}")))?)
                })
            }
            (Carrier::Valued(v), Sort::Ring | Sort::Field) => {
                let (val, digits) = parts.split_first().unwrap();
                let json = serde_json::json!({
                    "val": val.parse::<i64>().map(serde_json::Value::from).unwrap_or_else(|_| val.as_str().into()),
                    "unit": digits,
                    "precision": digits.len().max(1),
                });
                Value::Valued(v.from_json(&json)?)
            }
            (Carrier::Valued(_), Sort::Quotient(n)) => {
                let strs: Vec<&str> = parts.iter().map(String::as_str).collect();
                Value::Witt(self.ring_at(n as usize)?.parse(&strs)?)
            }
        };
        if !self.accepts(sort, &value) {
            return Err(Error::NotMember);
        }
        Ok(value)
    }

    fn ring_op(&self, op: char, sort: Sort, a: Value, b: Option<Value>) -> Result<Value> {
        let k = self.field();
        match (a, b) {
            (Value::Residue(x), Some(Value::Residue(y))) => Ok(Value::Residue(match op {
                '+' => k.add(&x, &y),
                '-' => k.sub(&x, &y),
                _ => k.mul(&x, &y),
            })),
            (Value::Residue(x), None) => Ok(Value::Residue(k.neg(&x))),
            (Value::Witt(x), y) => {
                let ring = self.ring_at(x.len())?;
                Ok(Value::Witt(match (op, y) {
                    ('+', Some(Value::Witt(y))) => ring.add(&x, &y),
                    ('-', Some(Value::Witt(y))) => ring.sub(&x, &y),
                    ('*', Some(Value::Witt(y))) => ring.mul(&x, &y),
                    ('-', None) => ring.neg(&x),
                    _ => return Err(Error::SortError(format!("bad operands in {sort}"))),
                }))
            }
            (Value::Valued(x), y) => {
                let Carrier::Valued(v) = &self.carrier else { unreachable!() };
                Ok(Value::Valued(match (op, y) {
                    ('+', Some(Value::Valued(y))) => v.add(&x, &y)?,
                    ('-', Some(Value::Valued(y))) => v.sub(&x, &y)?,
                    ('*', Some(Value::Valued(y))) => v.mul(&x, &y),
                    ('-', None) => v.neg(&x),
                    _ => return Err(Error::SortError(format!("bad operands in {sort}"))),
                }))
            }
            (Value::Gamma(x), y) => Ok(Value::Gamma(match (op, y) {
                ('+', Some(Value::Gamma(y))) => x.zip(y).map(|(a, b)| a + b),
                ('-', Some(Value::Gamma(Some(b)))) => x.map(|a| a - b),
                ('-', None) if x.is_some() => x.map(|a| -a),
                _ => return Err(Error::Unsupported("this operation on ∞".into())),
            })),
            _ => Err(Error::SortError(format!("bad operands in {sort}"))),
        }
    }

    /// `A`-values as vectors of `C_n(k)` (two-sorted) or `C_M(k)` via `r_M` (valued).
    fn as_witt(&self, a: &Value) -> Result<WittVector> {
        match (&self.carrier, a) {
            (Carrier::TwoSorted(_), Value::Witt(x)) => Ok(x.clone()),
            (Carrier::Valued(v), Value::Valued(x)) => v.residue(x, v.precision()),
            _ => Err(Error::SortError("expected a value of sort A".into())),
        }
    }

    fn from_witt(&self, x: WittVector) -> Result<Value> {
        match &self.carrier {
            Carrier::TwoSorted(_) => Ok(Value::Witt(x)),
            Carrier::Valued(v) => Ok(Value::Valued(v.from_integral(&x)?)),
        }
    }

    /// `Θ_r(b)`.
    pub fn theta(&self, b: &[Value]) -> Result<bool> {
        let residues = b.iter().map(|x| self.as_witt(x).map(|w| w.res().clone())).collect::<Result<Vec<_>>>()?;
        Ok(match self.theta {
            ThetaImpl::ConstantTrue => true,
            ThetaImpl::Standard => is_p_independent(self.field(), &residues, 1),
        })
    }

    /// `S_r(b, α)`; outside `Θ_r × k^{p^n}(res b)` the default `0` with a flag.
    pub fn lambda(&self, b: &[Value], alpha: &RatFn, flags: &mut Vec<String>) -> Result<Value> {
        let ring = self.model().ring();
        if self.lambda == LambdaImpl::Teichmuller {
            return self.from_witt(ring.teichmuller(alpha));
        }
        let bw = b.iter().map(|x| self.as_witt(x)).collect::<Result<Vec<_>>>()?;
        if !self.theta(b)? {
            flags.push(format!("S_{} applied outside Theta", b.len()));
            return self.zero(Sort::Ring);
        }
        match lambda_rep_for(ring, &bw, alpha) {
            Ok(x) => self.from_witt(x),
            Err(Error::NotInSpan | Error::NotPIndependent) => {
                flags.push(format!("S_{} applied outside k^(p^n)(res b)", b.len()));
                self.zero(Sort::Ring)
            }
            Err(e) => Err(e),
        }
    }

    fn residue_n(&self, n: u32, a: Value) -> Result<Value> {
        match (&self.carrier, a) {
            (Carrier::TwoSorted(_), Value::Witt(x)) if n == 1 => Ok(Value::Residue(x.res().clone())),
            (Carrier::TwoSorted(_), _) => Err(Error::SortError(format!("r_{n} is not interpreted in this structure"))),
            (Carrier::Valued(v), Value::Valued(x)) => {
                let r = v.residue(&x, n as usize)?;
                Ok(if n == 1 { Value::Residue(r.res().clone()) } else { Value::Witt(r) })
            }
            _ => Err(Error::SortError("r_n expects sort A".into())),
        }
    }

    pub fn eval_term(&self, term: &Term, assignment: &Assignment) -> Result<Evaluated<Value>> {
        let mut flags = Vec::new();
        let value = self.term(term, assignment, &mut flags)?;
        Ok(Evaluated { value, flags })
    }

    fn term(&self, t: &Term, asg: &Assignment, flags: &mut Vec<String>) -> Result<Value> {
        Ok(match t {
            Term::Var { name, sort } => {
                self.check_sort(*sort)?;
                let v = asg.get(name).ok_or_else(|| Error::UnboundVariable(name.clone()))?;
                if !self.accepts(*sort, v) {
                    return Err(Error::SortError(format!("value of {name} is not in the carrier of {sort}")));
                }
                v.clone()
            }
            Term::Zero(s) => self.zero(*s)?,
            Term::One(s) => self.one(*s)?,
            Term::Infinity => {
                self.check_sort(Sort::Value)?;
                Value::Gamma(None)
            }
            Term::Lit { sort, parts } => self.literal(*sort, parts)?,
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                let op = match t {
                    Term::Add(..) => '+',
                    Term::Sub(..) => '-',
                    _ => '*',
                };
                let sort = a.sort()?;
                let (x, y) = (self.term(a, asg, flags)?, self.term(b, asg, flags)?);
                self.ring_op(op, sort, x, Some(y))?
            }
            Term::Neg(a) => {
                let sort = a.sort()?;
                let x = self.term(a, asg, flags)?;
                self.ring_op('-', sort, x, None)?
            }
            Term::Res(a) => {
                let x = self.term(a, asg, flags)?;
                self.residue_n(1, x)?
            }
            Term::ResN(n, a) => {
                let x = self.term(a, asg, flags)?;
                self.residue_n(*n, x)?
            }
            Term::Lambda { b, alpha } => {
                let bs = b.iter().map(|x| self.term(x, asg, flags)).collect::<Result<Vec<_>>>()?;
                let Value::Residue(alpha) = self.term(alpha, asg, flags)? else { unreachable!() };
                self.lambda(&bs, &alpha, flags)?
            }
            Term::Val(a) => {
                let Value::Valued(x) = self.term(a, asg, flags)? else {
                    return Err(Error::SortError("v expects sort K".into()));
                };
                Value::Gamma(x.val())
            }
            Term::Ac(n, a) => {
                let Carrier::Valued(v) = &self.carrier else {
                    return Err(Error::SortError("ac_n is not interpreted in this structure".into()));
                };
                let Value::Valued(x) = self.term(a, asg, flags)? else {
                    return Err(Error::SortError("ac_n expects sort K".into()));
                };
                let r = v.ac(&x, *n as usize)?;
                if *n == 1 {
                    Value::Residue(r.res().clone())
                } else {
                    Value::Witt(r)
                }
            }
        })
    }

    /// Equality in a carrier; valued elements compare at their common precision.
    pub fn equal(&self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Valued(x), Value::Valued(y)) => match (x.unit(), y.unit()) {
                (None, None) => true,
                (Some(u), Some(w)) if x.val() == y.val() => {
                    let n = u.len().min(w.len());
                    u.digits()[..n] == w.digits()[..n]
                }
                _ => false,
            },
            _ => a == b,
        }
    }

    pub fn eval_qf(&self, formula: &Formula, assignment: &Assignment) -> Result<Evaluated<bool>> {
        let mut flags = Vec::new();
        let value = self.formula(formula, assignment, &mut flags)?;
        Ok(Evaluated { value, flags })
    }

    fn formula(&self, f: &Formula, asg: &Assignment, flags: &mut Vec<String>) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => {
                let (x, y) = (self.term(a, asg, flags)?, self.term(b, asg, flags)?);
                self.equal(&x, &y)
            }
            Formula::Theta(args) => {
                let vals = args.iter().map(|a| self.term(a, asg, flags)).collect::<Result<Vec<_>>>()?;
                self.theta(&vals)?
            }
            Formula::Le(a, b) | Formula::Lt(a, b) => {
                let (Value::Gamma(x), Value::Gamma(y)) = (self.term(a, asg, flags)?, self.term(b, asg, flags)?) else {
                    return Err(Error::SortError("order expects sort G".into()));
                };
                // ∞ is the largest element.
                let key = |g: Option<i64>| g.map_or((1, 0), |v| (0, v));
                if matches!(f, Formula::Le(..)) {
                    key(x) <= key(y)
                } else {
                    key(x) < key(y)
                }
            }
            Formula::Not(g) => !self.formula(g, asg, flags)?,
            Formula::And(gs) => {
                let mut all = true;
                for g in gs {
                    all &= self.formula(g, asg, flags)?;
                }
                all
            }
            Formula::Or(gs) => {
                let mut any = false;
                for g in gs {
                    any |= self.formula(g, asg, flags)?;
                }
                any
            }
            Formula::Implies(a, b) => !self.formula(a, asg, flags)? || self.formula(b, asg, flags)?,
            Formula::Iff(a, b) => self.formula(a, asg, flags)? == self.formula(b, asg, flags)?,
        })
    }

    pub fn value_to_json(&self, v: &Value) -> serde_json::Value {
        match (v, &self.carrier) {
            (Value::Witt(x), _) => serde_json::Value::from(x.digits().iter().map(|d| self.field().format(d)).collect::<Vec<_>>()),
            (Value::Residue(x), _) => self.field().format(x).into(),
            (Value::Valued(x), Carrier::Valued(v)) => v.to_json(x),
            (Value::Valued(_), _) => serde_json::Value::Null,
            (Value::Gamma(g), _) => g.map(serde_json::Value::from).unwrap_or_else(|| "inf".into()),
        }
    }

    /// Reads a JSON value at `sort`: digit arrays, residue strings, valued-element
    /// objects, integers or `"inf"`.
    pub fn value_from_json(&self, sort: Sort, json: &serde_json::Value) -> Result<Value> {
        self.check_sort(sort)?;
        let value = match (sort, json) {
            (Sort::Residue, serde_json::Value::String(s)) => Value::Residue(self.field().parse(s)?),
            (Sort::Value, serde_json::Value::String(s)) if s == "inf" => Value::Gamma(None),
            (Sort::Value, g) => Value::Gamma(Some(g.as_i64().ok_or_else(|| Error::Syntax("expected an integer".into()))?)),
            (Sort::Ring | Sort::Field, obj @ serde_json::Value::Object(_)) => {
                let Carrier::Valued(v) = &self.carrier else {
                    return Err(Error::SortError("valued elements need the valued structure".into()));
                };
                Value::Valued(v.from_json(obj)?)
            }
            (_, serde_json::Value::Array(items)) => {
                let strs = items
                    .iter()
                    .map(|d| d.as_str().ok_or_else(|| Error::Syntax("digits must be strings".into())))
                    .collect::<Result<Vec<_>>>()?;
                Value::Witt(self.ring_at(strs.len())?.parse(&strs)?)
            }
            _ => return Err(Error::Syntax(format!("cannot read {json} at sort {sort}"))),
        };
        if !self.accepts(sort, &value) {
            return Err(Error::SortError(format!("{json} is not in the carrier of {sort}")));
        }
        Ok(value)
    }
}
