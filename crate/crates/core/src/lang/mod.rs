//! Quantifier-free first-order syntax for the two-sorted and valued languages, with
//! evaluation in concrete Cohen–Witt structures and axiom audits.
//!
//! Formulas use an S-expression syntax; variables carry their sort, as in `x:A`, `a:k`,
//! `z:K`, `g:G` or `r:R2`.

pub mod audit;
pub mod eval;
pub mod syntax;

pub use audit::{
    audit_axioms, check_map_preserves_qf, check_morphism_preserves_qf, formula_battery, random_assignments, AuditReport,
    AxiomSet, QfReport, Status,
};
pub use eval::{Assignment, Binding, Carrier, Evaluated, LambdaImpl, ThetaImpl, Value};
pub use syntax::{parse_formula, parse_term, Formula, Sort, Term};
