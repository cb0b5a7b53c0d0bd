//! Exact computations with finite-dimensional Leibniz algebras over Q(i):
//! structure tensors, derivations, solvable extensions of quasi-filiform
//! nilradicals and the invariants used to tell the resulting families apart.

pub mod algebra;
pub mod catalog;
pub mod derivations;
pub mod error;
pub mod extensions;
pub mod invariants;
pub mod symbolic;
pub mod linalg;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;
