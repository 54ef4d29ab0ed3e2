//! Quantum-group invariant spin chains and their metric operators.
//!
//! The crate is organised bottom-up:
//!
//! * [`qalgebra`] builds the `U_q(sl_2)` spin-`S` module, coproducts, Casimirs,
//!   projectors and R-matrices.
//! * [`chain`] assembles nearest-neighbour Hamiltonians from projector couplings.
//! * [`spectral`] computes spectra, minimal polynomials and reality boundaries.
//! * [`metric`] constructs positive metrics, including the universal R-matrix ones.
//! * [`relations`] checks the algebraic identities numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod qalgebra;
pub mod relations;
mod serde_nan;
pub mod spectral;

pub use error::{Error, Result};
pub use qalgebra::{Spin, SpinRep};
