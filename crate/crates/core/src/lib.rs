//! Energy-constrained operator norms and energy-constrained diamond norms on
//! truncated Hilbert spaces, together with constructors for unitary, Gaussian
//! and GKLS quantum dynamical semigroups and a harness that checks norm bounds
//! for them numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod enorm;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod random;
pub mod semigroups;
pub mod superop;
pub mod verify;

pub use enorm::{enorm, family_norm, max_linear_objective, NormResult};
pub use error::{Error, Result};
pub use linalg::{CMat, CVec, DensityOperator, MatrixOperator, C64};
pub use operators::{DiscreteOperator, Family};
pub use superop::{ecd::EcdOptions, Superoperator};

