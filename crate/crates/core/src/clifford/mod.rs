//! Real Clifford algebras `Cl(p, q)` over an orthonormal basis.

mod blade;
mod multivector;
mod signature;
pub(crate) mod text;

pub use blade::Blade;
pub use multivector::{Multivector, DEFAULT_PRUNE_TOL};
pub use signature::{Signature, MAX_GENERATORS};

pub(crate) use text::wedge_of;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliffordError {
    #[error("signature Cl({p},{q}) exceeds the {MAX_GENERATORS}-generator cap")]
    SignatureTooLarge { p: usize, q: usize },
    #[error("cannot combine {left} with {right}")]
    SignatureMismatch { left: Signature, right: Signature },
    #[error("blade {blade} is not part of {signature}")]
    BladeOutOfRange { blade: Blade, signature: Signature },
    #[error("not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: &'static str },
}
