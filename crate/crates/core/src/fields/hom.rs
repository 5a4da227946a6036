use super::{Field, RatFn};
use crate::error::FieldError;

/// A field map `F_q(t1..tr) -> F_q(u1..us)` fixing `F_q`, given by the images of the
/// variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldHom {
    source: Field,
    target: Field,
    images: Vec<RatFn>,
}

impl FieldHom {
    pub fn new(source: &Field, target: &Field, images: Vec<RatFn>) -> Result<Self, FieldError> {
        if source.gf() != target.gf() {
            return Err(FieldError::NotAnEmbedding("coefficient fields differ".into()));
        }
        if images.len() != source.r() {
            return Err(FieldError::NotAnEmbedding(format!(
                "expected {} generator images, got {}",
                source.r(),
                images.len()
            )));
        }
        for img in &images {
            target.validate(img)?;
            if img.is_constant() {
                return Err(FieldError::NotAnEmbedding(format!(
                    "variable mapped to the constant {}",
                    target.format(img)
                )));
            }
        }
        Ok(FieldHom { source: source.clone(), target: target.clone(), images })
    }

    pub fn identity(field: &Field) -> Self {
        FieldHom { source: field.clone(), target: field.clone(), images: field.vars() }
    }

    /// Sends `t_i` to `t_i^{p^n}`.
    pub fn frobenius_twist(field: &Field, n: u32) -> Self {
        let images = field.vars().iter().map(|t| field.frobenius_pow(t, n)).collect();
        FieldHom { source: field.clone(), target: field.clone(), images }
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn images(&self) -> &[RatFn] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.images == self.source.vars()
    }

    pub fn apply(&self, x: &RatFn) -> Result<RatFn, FieldError> {
        let k = &self.target;
        let eval = |p: &super::Poly| {
            p.evaluate(
                k.zero(),
                |c| k.constant(c),
                |i, e| k.pow(&self.images[i], e as u64),
                |a, b| k.add(a, b),
                |a, b| k.mul(a, b),
            )
        };
        let num = eval(x.numerator());
        let den = eval(x.denominator());
        if den.is_zero() {
            return Err(FieldError::NotAnEmbedding(format!(
                "denominator of {} vanishes",
                self.source.format(x)
            )));
        }
        k.div(&num, &den)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FieldHom) -> Result<FieldHom, FieldError> {
        if self.target != other.source {
            return Err(FieldError::FieldMismatch);
        }
        let images = self.images.iter().map(|x| other.apply(x)).collect::<Result<_, _>>()?;
        Ok(FieldHom { source: self.source.clone(), target: other.target.clone(), images })
    }
}
