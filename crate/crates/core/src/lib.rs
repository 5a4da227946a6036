//! Exact arithmetic in truncated Witt rings and Cohen rings over fields of
//! characteristic `p`, including imperfect fields `F_{p^d}(t1, ..., tr)`.
//!
//! Layers, bottom up:
//! - [`fields`]: the residue fields, with Frobenius and partial p-th roots;
//! - [`pbasis`]: multi-indices, p-independence and λ-decompositions;
//! - [`witt`]: truncated Witt rings `W_m(k)`;
//! - [`cohen`]: the Cohen–Witt subring `C_m(k)` with λ-representatives and digits;
//! - [`morphisms`]: structure isomorphisms, embeddings over a base, and Teichmüller
//!   embeddings into fields with adjoined p-th roots;
//! - [`valued`]: a finite-precision model of the unramified valued field;
//! - [`lang`]: quantifier-free terms and formulas, evaluation, and axiom audits.

pub mod cohen;
pub mod error;
pub mod fields;
pub mod lang;
pub mod morphisms;
pub mod pbasis;
pub mod sampling;
pub mod valued;
pub mod witt;

pub use error::{Error, FieldError, Result};
