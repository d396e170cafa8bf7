//! Transpose factorization `Q = PᵀP` of complex symmetric matrices and
//! explicit elements of the orthogonal group of a non-degenerate form that
//! carry one isotropic subspace onto another.

pub mod cli;
pub mod error;
pub mod factor;
pub mod isotropic;
pub mod matcore;
pub mod transport;

pub use error::{Error, Result};
pub use matcore::{Matrix, Tolerance, C64};
