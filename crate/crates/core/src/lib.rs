//! Combinatorial degree, polarization defects and the classification of
//! `n`-applications over finite fields and the rationals.
//!
//! With the default `parallel` feature the table and sweep loops run on
//! rayon; building without it gives the same results sequentially.

pub mod classify;
pub mod field;
pub mod forms;
pub mod par;
pub mod polarize;
pub mod poly;

pub use field::{Characteristic, Field, FieldElement, FieldError};
pub use poly::{parse_poly, FunctionTable, MultiExponent, PolyError, SparsePolynomial};
