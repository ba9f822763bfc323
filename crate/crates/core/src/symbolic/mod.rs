//! Symbolic multivector fields.
//!
//! A [`SymField`] is a sum of blades with [`ScalarExpr`] coefficients in
//! the coordinates `x1..xn`. Coefficients are kept in a canonical
//! sum-of-products form so that identities can be checked by plain
//! equality. The Dirac operator `∇ = Σ e_i ∂_i` splits into its
//! grade-lowering (interior) and grade-raising (exterior) parts.

mod expr;
mod field;
mod parse;
pub mod verify;

pub use expr::{Atom, Dependencies, Monomial, Rational, ScalarExpr};
pub use field::SymField;
pub use parse::{parse_field, parse_scalar};

use crate::clifford::CliffordError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: &'static str },
    #[error("index {index} at byte {pos} is outside 1..={dim}")]
    IndexOutOfRange { pos: usize, index: usize, dim: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("field dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("not a single invertible blade term")]
    NotABlade,
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}
