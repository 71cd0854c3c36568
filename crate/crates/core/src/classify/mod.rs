//! Deciding whether a reduced polynomial is an `n`-application, syntactically
//! via `tpl ∩ dpl` and semantically from the definition, plus the
//! non-homogeneous examples and the small-space correspondence checks.

mod counterexample;
mod demo;
mod semantic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldError;
use crate::forms::FormsError;
use crate::polarize::{comb_degree, PolarizeError};
use crate::poly::{PolyError, SparsePolynomial};

pub use counterexample::{construct_counterexample, counterexample_digits};
pub use demo::{correspondence_dimension_check, quadratic_correspondence_demo, DimensionReport, QuadraticDemoReport};
pub use semantic::{
    semantic_napp_check, table_napp_check, CheckMode, SemanticCheck, SemanticProperty, SemanticWitness,
    DEFAULT_SEMANTIC_BUDGET, HOMOGENEITY_POINT_CAP, SAMPLES,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Polarize(#[from] PolarizeError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error("{0}")]
    Precondition(String),
    #[error("{what} needs {needed} steps, over the budget of {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub field: String,
    pub d: usize,
    pub n: u64,
    pub polynomial: String,
    pub degree: i64,
    pub comb_degree: i64,
    pub pl: bool,
    pub tpl: bool,
    /// Exponents of a monomial keeping the polynomial out of `tpl`.
    pub tpl_violation: Option<Vec<u32>>,
    pub dpl: bool,
    pub dpl_violation: Option<Vec<u32>>,
    pub is_n_application: bool,
    pub homogeneous_of_degree_n: bool,
    pub semantic_check: SemanticCheck,
    pub seed: u64,
}

/// Knobs for [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub budget: u64,
    pub seed: u64,
    /// Run the semantic cross-check.
    pub semantic: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { budget: DEFAULT_SEMANTIC_BUDGET, seed: 0, semantic: true }
    }
}

/// Classifies a reduced polynomial without constant term. The verdict is
/// `tpl ∧ dpl`; the semantic check, when it runs, must agree.
pub fn classify(f: &SparsePolynomial, n: u64, opts: ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    if n == 0 {
        return Err(ClassifyError::Precondition("arity n must be at least 1".into()));
    }
    f.require_reduced()?;
    f.require_no_constant()?;
    let tpl_violation = f.tpl_violation(n)?;
    let dpl_violation = f.dpl_violation(n)?;
    let (tpl, dpl) = (tpl_violation.is_none(), dpl_violation.is_none());
    let semantic_check = if opts.semantic {
        semantic_napp_check(f, n as usize, opts.budget, opts.seed)?
    } else {
        SemanticCheck::Skipped { reason: "not requested".into() }
    };
    let report = ClassificationReport {
        field: f.field().to_string(),
        d: f.nvars(),
        n,
        polynomial: f.to_string(),
        degree: f.degree(),
        comb_degree: comb_degree(f)?,
        pl: f.pl_member(n)?,
        tpl,
        tpl_violation: tpl_violation.map(|m| m.as_slice().to_vec()),
        dpl,
        dpl_violation: dpl_violation.map(|m| m.as_slice().to_vec()),
        is_n_application: tpl && dpl,
        homogeneous_of_degree_n: f.is_homogeneous_of_degree(n),
        semantic_check,
        seed: opts.seed,
    };
    if let Some(verdict) = report.semantic_check.verdict() {
        debug_assert_eq!(verdict, report.is_n_application, "syntactic and semantic verdicts disagree for {f}");
    }
    Ok(report)
}
