//! Geometric-algebra machinery for Dirac operators.
//!
//! The crate is `no_std` (it needs `alloc`) and purely computational:
//!
//! * [`clifford`]: multivector arithmetic in `Cl(p, q)`.
//! * [`symbolic`]: symbolic multivector fields, a canonicalising rewriter and
//!   the symbolic Dirac operator with its interior/exterior split.
//! * [`grid`]: multivector fields sampled on uniform grids, discrete Dirac,
//!   Laplace and gauge operators, Cauchy-kernel reconstruction.
//! * [`topo`]: winding numbers, argument-principle zero counts, loop
//!   integrals of the action gradient and Betti numbers from harmonic kernels.
//! * [`bohm`]: polar decomposition, quantum potential, Crank–Nicolson
//!   evolution, Bohm trajectories and plane-wave dispersion checks.
//!
//! File formats and the command line live in the companion `monogen` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bohm;
pub mod check;
pub mod clifford;
pub mod grid;
pub mod symbolic;
pub mod topo;

pub use check::Check;
pub use clifford::{Blade, Multivector, Signature};
pub use num_complex::Complex64;
