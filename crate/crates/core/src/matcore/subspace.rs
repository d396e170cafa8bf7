use super::elim::{inverse, rank, solve};
use super::matrix::Matrix;
use super::Tolerance;
use crate::error::{Error, Result};

/// Unitary orthogonal projector `b (bᴴb)⁻¹ bᴴ` onto the column span of `b`.
fn projector(b: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let bh = b.conj_transpose();
    let gram = bh.matmul(b);
    let coeffs = solve(&gram, &bh, tol).map_err(|_| Error::RankDeficient {
        rank: rank(b, tol),
        required: b.cols(),
    })?;
    Ok(b.matmul(&coeffs))
}

/// Frobenius distance between the orthogonal projectors onto the column
/// spans of `b1` and `b2`. Zero exactly when the spans agree.
pub fn span_distance(b1: &Matrix, b2: &Matrix, tol: &Tolerance) -> Result<f64> {
    if b1.shape() != b2.shape() {
        return Err(Error::DimensionMismatch(format!(
            "span_distance: {}x{} vs {}x{}",
            b1.rows(),
            b1.cols(),
            b2.rows(),
            b2.cols()
        )));
    }
    for b in [b1, b2] {
        let r = rank(b, tol);
        if r < b.cols() {
            return Err(Error::RankDeficient {
                rank: r,
                required: b.cols(),
            });
        }
    }
    let p1 = projector(b1, tol)?;
    let p2 = projector(b2, tol)?;
    Ok((&p1 - &p2).norm_fro())
}

/// Cayley transform `(I − s)(I + s)⁻¹` of a skew-symmetric `s`; the result
/// satisfies `AᵀA = I` without conjugation.
pub fn cayley_orthogonal(s: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let skew_defect = (&s.transpose() + s).norm_max();
    if skew_defect > 1e-12 * s.norm_max().max(1.0) {
        return Err(Error::NotSkewSymmetric(skew_defect));
    }
    let n = s.rows();
    let id = Matrix::identity(n);
    let plus = &id + s;
    let minus = &id - s;
    let plus_inv = inverse(&plus, tol)?;
    // (I - s) and (I + s)^{-1} commute.
    Ok(minus.matmul(&plus_inv))
}
