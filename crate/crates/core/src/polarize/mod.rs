//! Polarization defects `Δ^n`: on tables, on formal polynomials, and through
//! the chain formula for monomials, plus the combinatorial degree.

mod chains;
mod formal;
mod table;

use thiserror::Error;

use crate::poly::PolyError;

pub use chains::{
    last_link_profile, longest_regular_chains, lucas_binom, multi_binom_nonzero, p_weight, ChainReport, LastLink,
    RegularChain,
};
pub use formal::{
    comb_degree, comb_degree_oracle, expansion_size, formal_defect, formal_defect_budgeted, formal_defect_recurrence, formal_defect_via_chains,
    FormalDefect, DEFAULT_EXPANSION_BUDGET,
};
pub use table::{
    defect_at, defect_at_points, defect_field, defect_on_tuples, defect_table, defect_table_recurrence, recurrence_at,
    recurrence_on_tuples, DefectEntry, DefectTable,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolarizeError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("the map is nonzero at the origin")]
    NonzeroAtOrigin,
    #[error("the polynomial has a nonzero constant term")]
    ConstantTerm,
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("the zero multiexponent has no regular chains")]
    ZeroExponent,
    #[error("expected a single monomial, got {0} terms")]
    NotMonomial(usize),
    #[error("argument tuples must all have length {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("point index {index} out of range for a space of {size} points")]
    PointOutOfRange { index: usize, size: usize },
    #[error("{what} needs {needed} entries, over the budget of {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },
}
