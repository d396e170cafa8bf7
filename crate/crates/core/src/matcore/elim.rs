//! Gaussian elimination kernels: rank and null space by full pivoting,
//! square solves by partial pivoting, minimum-norm solves.

use super::matrix::{Matrix, ONE, ZERO};
use super::Tolerance;
use crate::error::{Error, Result};

/// Outcome of a Gauss-Jordan sweep with full pivoting.
struct FullPivot {
    /// Row-reduced copy: the leading `rank` rows hold `[I | R]` in permuted columns.
    reduced: Matrix,
    /// `col_perm[t]` is the original column sitting at position `t`.
    col_perm: Vec<usize>,
    rank: usize,
}

fn full_pivot(a: &Matrix, scale: f64, tol: &Tolerance) -> FullPivot {
    let (rows, cols) = a.shape();
    let threshold = tol.rank_rel_tol * scale;
    let mut m = a.clone();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;

    for s in 0..rows.min(cols) {
        let mut best = (s, s, 0.0f64);
        for i in s..rows {
            for j in s..cols {
                let mag = m[(i, j)].norm();
                if mag > best.2 {
                    best = (i, j, mag);
                }
            }
        }
        if best.2 <= threshold || best.2 == 0.0 {
            break;
        }
        m.swap_rows(s, best.0);
        m.swap_cols(s, best.1);
        col_perm.swap(s, best.1);

        let inv = ONE / m[(s, s)];
        for z in m.row_mut(s) {
            *z *= inv;
        }
        let pivot_row = m.row(s).to_vec();
        for i in 0..rows {
            if i == s {
                continue;
            }
            let factor = m[(i, s)];
            if factor == ZERO {
                continue;
            }
            for (z, &p) in m.row_mut(i).iter_mut().zip(&pivot_row) {
                *z -= factor * p;
            }
        }
        rank += 1;
    }

    FullPivot {
        reduced: m,
        col_perm,
        rank,
    }
}

/// Number of full-pivot elimination pivots exceeding
/// `rank_rel_tol × ‖a‖_max`. The zero matrix has rank 0.
pub fn rank(a: &Matrix, tol: &Tolerance) -> usize {
    full_pivot(a, a.norm_max(), tol).rank
}

/// Like [`rank`], but pivots are compared against `rank_rel_tol × scale`.
/// Useful when `a` is a sum whose terms may cancel.
pub fn rank_with_scale(a: &Matrix, scale: f64, tol: &Tolerance) -> usize {
    full_pivot(a, scale, tol).rank
}

/// Basis of `{x : a·x = 0}` as the columns of a `cols(a) × (cols(a) − rank)` matrix.
pub fn kernel(a: &Matrix, tol: &Tolerance) -> Matrix {
    let cols = a.cols();
    let FullPivot {
        reduced,
        col_perm,
        rank,
    } = full_pivot(a, a.norm_max(), tol);
    let nullity = cols - rank;
    let mut basis = Matrix::zeros(cols, nullity);
    for f in 0..nullity {
        let free = rank + f;
        basis[(col_perm[free], f)] = ONE;
        for p in 0..rank {
            basis[(col_perm[p], f)] = -reduced[(p, free)];
        }
    }
    basis
}

/// Solves `a·x = b` for square `a` by partial-pivot elimination.
///
/// Fails with [`Error::SingularMatrix`] as soon as a pivot falls to or below
/// `rank_rel_tol × ‖a‖_max`.
pub fn solve(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: a is {}x{}, b has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let n = a.rows();
    let nrhs = b.cols();
    let threshold = tol.rank_rel_tol * a.norm_max();
    let mut lu = a.clone();
    let mut x = b.clone();

    for s in 0..n {
        let (p, mag) = (s..n)
            .map(|i| (i, lu[(i, s)].norm()))
            .fold((s, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if mag <= threshold || mag == 0.0 {
            return Err(Error::SingularMatrix {
                pivot: mag,
                threshold,
            });
        }
        lu.swap_rows(s, p);
        x.swap_rows(s, p);
        let inv = ONE / lu[(s, s)];
        for i in (s + 1)..n {
            let factor = lu[(i, s)] * inv;
            if factor == ZERO {
                continue;
            }
            for j in s..n {
                let v = lu[(s, j)];
                lu[(i, j)] -= factor * v;
            }
            for j in 0..nrhs {
                let v = x[(s, j)];
                x[(i, j)] -= factor * v;
            }
        }
    }

    for s in (0..n).rev() {
        for j in 0..nrhs {
            let mut acc = x[(s, j)];
            for t in (s + 1)..n {
                acc -= lu[(s, t)] * x[(t, j)];
            }
            x[(s, j)] = acc / lu[(s, s)];
        }
    }
    Ok(x)
}

pub fn inverse(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.rows()), tol)
}

/// Minimum-Euclidean-norm solution of the underdetermined system `a·x = b`,
/// `x = aᴴ (a aᴴ)⁻¹ b`. Requires full row rank.
pub fn min_norm_solve(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "min_norm_solve: a has {} rows, b has {}",
            a.rows(),
            b.rows()
        )));
    }
    let r = rank(a, tol);
    if r < a.rows() || a.rows() > a.cols() {
        return Err(Error::RankDeficient {
            rank: r,
            required: a.rows(),
        });
    }
    let ah = a.conj_transpose();
    let gram = a.matmul(&ah);
    let y = solve(&gram, b, tol).map_err(|_| Error::RankDeficient {
        rank: r,
        required: a.rows(),
    })?;
    Ok(ah.matmul(&y))
}
