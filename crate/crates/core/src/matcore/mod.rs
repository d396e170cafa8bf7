//! Dense complex matrix substrate.

mod elim;
pub mod io;
mod matrix;
pub mod random;
mod subspace;

pub use elim::{inverse, kernel, min_norm_solve, rank, rank_with_scale, solve};
pub use matrix::{Matrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use subspace::{cayley_orthogonal, span_distance};

use crate::error::{Error, Result};

/// Thresholds that stand in for exact-arithmetic decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Pivots at or below `rank_rel_tol × ‖a‖_max` count as zero.
    pub rank_rel_tol: f64,
    /// Bound on scaled residuals for an identity to count as satisfied.
    pub residual_rel_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel_tol: 1e-10,
            residual_rel_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel_tol: f64, residual_rel_tol: f64) -> Result<Self> {
        for (name, value) in [
            ("rank_rel_tol", rank_rel_tol),
            ("residual_rel_tol", residual_rel_tol),
        ] {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(Tolerance {
            rank_rel_tol,
            residual_rel_tol,
        })
    }
}
