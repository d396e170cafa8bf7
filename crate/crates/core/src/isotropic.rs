//! Isotropic subspaces of a non-degenerate form: membership test, the
//! `k ≤ m/2` bound, seeded sampling and the block normal form `[I_k; M₁; M₂]`.

use crate::error::{Error, Result};
use crate::factor::{transpose_factor, SymmetricForm};
use crate::matcore::random::{random_matrix, random_skew, seeded};
use crate::matcore::{cayley_orthogonal, rank, solve, Matrix, Tolerance, C64};
use crate::transport::swap_generator;

/// Threshold-pivoting ratio: a row already in its natural position is kept as
/// pivot unless some other candidate is larger by more than this factor.
const NATURAL_PIVOT_RATIO: f64 = 1e-3;

/// A `k`-dimensional subspace of `ℂ^m`, given by a full-column-rank basis
/// whose columns have unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    basis: Matrix,
}

impl Plane {
    pub fn new(basis: Matrix, tol: &Tolerance) -> Result<Self> {
        let (m, k) = basis.shape();
        if k == 0 || k > m {
            return Err(Error::DimensionMismatch(format!(
                "plane basis must be m x k with 1 <= k <= m, got {m}x{k}"
            )));
        }
        let r = rank(&basis, tol);
        if r < k {
            return Err(Error::RankDeficient {
                rank: r,
                required: k,
            });
        }
        Ok(Plane {
            basis: basis.normalize_columns(),
        })
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn m(&self) -> usize {
        self.basis.rows()
    }

    pub fn k(&self) -> usize {
        self.basis.cols()
    }
}

/// `‖Bᵀ·q·B‖_max / max(‖q‖_max, 1)` for the plane's basis `B`.
pub fn isotropy_residual(q: &SymmetricForm, p: &Plane) -> Result<f64> {
    if q.dim() != p.m() {
        return Err(Error::DimensionMismatch(format!(
            "form has dimension {}, plane lives in dimension {}",
            q.dim(),
            p.m()
        )));
    }
    let gram = p.basis().congruence(q.matrix());
    Ok(gram.norm_max() / q.matrix().norm_max().max(1.0))
}

pub(crate) fn require_isotropic(q: &SymmetricForm, p: &Plane) -> Result<()> {
    let residual = isotropy_residual(q, p)?;
    let tol = q.tol().residual_rel_tol;
    if residual > tol {
        return Err(Error::NotIsotropic { residual, tol });
    }
    Ok(())
}

/// Largest dimension of an isotropic subspace of a non-degenerate form on `ℂ^m`.
pub fn max_isotropic_dim(m: usize) -> usize {
    m / 2
}

/// Columns `(e_{2j−1} + i·e_{2j})/√2`, `j = 1..k`: isotropic for the identity form.
pub fn standard_isotropic_frame(m: usize, k: usize) -> Matrix {
    assert!(2 * k <= m, "standard frame needs 2k <= m");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut f = Matrix::zeros(m, k);
    for j in 0..k {
        f[(2 * j, j)] = C64::new(h, 0.0);
        f[(2 * j + 1, j)] = C64::new(0.0, h);
    }
    f
}

/// Draws an isotropic `k`-plane of `q`, reproducibly from `seed`.
pub fn sample_isotropic(q: &SymmetricForm, k: usize, seed: u64) -> Result<Plane> {
    let m = q.dim();
    let max = max_isotropic_dim(m);
    if k == 0 || k > max {
        return Err(Error::DimensionBound { k, m, max });
    }
    q.require_non_degenerate()?;
    let tol = q.tol();
    let mut rng = seeded(seed);

    let rotation = loop {
        let s = random_skew(&mut rng, m, 1.0 / (m as f64).sqrt());
        if let Ok(a) = cayley_orthogonal(&s, tol) {
            break a;
        }
    };
    let mix = loop {
        let g = &random_matrix(&mut rng, k, k) + &Matrix::identity(k);
        if rank(&g, tol) == k {
            break g;
        }
    };
    let in_identity_coords = rotation
        .matmul(&standard_isotropic_frame(m, k))
        .matmul(&mix);
    // q = pᵀp, so B = p⁻¹·X has BᵀqB = XᵀX.
    let p = transpose_factor(q)?.p;
    let basis = solve(&p, &in_identity_coords, tol)?;
    Plane::new(basis, tol)
}

/// The normal form `Π·Λ ~ [I_k; M₁; M₂]` of an isotropic plane for the
/// identity form, with `Π` a product of coordinate swaps.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPlane {
    order: Vec<usize>,
    swaps: Vec<(usize, usize)>,
    m1: Matrix,
    m2: Matrix,
}

impl NormalizedPlane {
    pub fn m(&self) -> usize {
        self.order.len()
    }

    pub fn k(&self) -> usize {
        self.m1.rows()
    }

    pub fn m1(&self) -> &Matrix {
        &self.m1
    }

    pub fn m2(&self) -> &Matrix {
        &self.m2
    }

    /// `order[pos]` is the original coordinate moved to position `pos`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Coordinate swaps `(i, j)`, 0-based, applied first to last.
    pub fn swaps(&self) -> &[(usize, usize)] {
        &self.swaps
    }

    /// `Π = S_n ⋯ S_1`, built from the swap generators, so that `(Π·x)[pos] = x[order[pos]]`.
    pub fn permutation_matrix(&self) -> Matrix {
        let m = self.m();
        let mut pi = Matrix::identity(m);
        for &(i, j) in &self.swaps {
            let g = swap_generator(i, j, m).expect("swap indices are in range by construction");
            pi = g.matmul(&pi);
        }
        pi
    }

    /// `[I_k; M₁; M₂]` in the permuted coordinates.
    pub fn stacked(&self) -> Matrix {
        Matrix::vstack(&[&Matrix::identity(self.k()), &self.m1, &self.m2])
    }

    /// `[M₁; M₂]`.
    pub fn lower(&self) -> Matrix {
        Matrix::vstack(&[&self.m1, &self.m2])
    }

    /// Basis in the original coordinates, `Πᵀ·[I_k; M₁; M₂]`.
    pub fn reassembled(&self) -> Matrix {
        let stacked = self.stacked();
        let mut out = Matrix::zeros(self.m(), self.k());
        for (pos, &row) in self.order.iter().enumerate() {
            for j in 0..self.k() {
                out[(row, j)] = stacked[(pos, j)];
            }
        }
        out
    }

    /// `‖I_k + M₁ᵀM₁ + M₂ᵀM₂‖_max`.
    pub fn isotropy_defect(&self) -> f64 {
        let k = self.k();
        let sum = &(&Matrix::identity(k) + &self.m1.transpose().matmul(&self.m1))
            + &self.m2.transpose().matmul(&self.m2);
        sum.norm_max()
    }
}

/// Greedy row selection by threshold-pivoted elimination on `c[candidates]`.
/// Returns the chosen rows (as indices into `c`) in pivot order.
fn select_rows(c: &Matrix, candidates: &[usize], k: usize, tol: &Tolerance) -> Option<Vec<usize>> {
    let mut work = c.select_rows(candidates);
    let n = candidates.len();
    let threshold = tol.rank_rel_tol * work.norm_max();
    let mut used = vec![false; n];
    let mut chosen = Vec::with_capacity(k);

    for col in 0..k {
        let mut best = (usize::MAX, 0.0f64);
        for r in (0..n).filter(|&r| !used[r]) {
            let mag = work[(r, col)].norm();
            if mag > best.1 {
                best = (r, mag);
            }
        }
        if best.0 == usize::MAX || best.1 <= threshold {
            return None;
        }
        let natural = (0..n).find(|&r| !used[r])?;
        let piv = if work[(natural, col)].norm() >= NATURAL_PIVOT_RATIO * best.1 {
            natural
        } else {
            best.0
        };
        used[piv] = true;
        chosen.push(candidates[piv]);

        let pivot_row: Vec<C64> = work.row(piv).to_vec();
        for r in (0..n).filter(|&r| !used[r]) {
            let factor = work[(r, col)] / pivot_row[col];
            for j in col..k {
                work[(r, j)] -= factor * pivot_row[j];
            }
        }
    }
    Some(chosen)
}

/// Swap sequence that rearranges the identity ordering into `order`.
fn swaps_for(order: &[usize]) -> Vec<(usize, usize)> {
    let mut current: Vec<usize> = (0..order.len()).collect();
    let mut swaps = Vec::new();
    for (pos, &want) in order.iter().enumerate() {
        let at = current
            .iter()
            .position(|&r| r == want)
            .expect("order is a permutation");
        if at != pos {
            current.swap(pos, at);
            swaps.push((pos, at));
        }
    }
    swaps
}

/// Right-multiplies `basis[order]` so the top `k` rows become `I_k`.
fn blocks_under(basis: &Matrix, order: &[usize], tol: &Tolerance) -> Result<(Matrix, Matrix)> {
    let k = basis.cols();
    let permuted = basis.select_rows(order);
    let top = permuted.block(0, 0, k, k);
    let scaled = solve(&top.transpose(), &permuted.transpose(), tol)
        .map_err(|_| {
            Error::NotNormalizable("identity block is singular under this permutation".into())
        })?
        .transpose();
    let m1 = scaled.block(k, 0, k, k);
    let m2 = scaled.block(2 * k, 0, basis.rows() - 2 * k, k);
    Ok((m1, m2))
}

pub(crate) fn normalize_unchecked(basis: &Matrix, tol: &Tolerance) -> Result<NormalizedPlane> {
    let (m, k) = basis.shape();
    if 2 * k >= m {
        return Err(Error::NotNormalizable(format!(
            "k = {k} leaves no M2 block in dimension m = {m} (need k < m/2)"
        )));
    }
    let all: Vec<usize> = (0..m).collect();
    let top = select_rows(basis, &all, k, tol)
        .ok_or_else(|| Error::NotNormalizable("basis has no invertible k x k row block".into()))?;

    let top_block = basis.select_rows(&top);
    let scaled = solve(&top_block.transpose(), &basis.transpose(), tol)
        .map_err(|_| Error::NotNormalizable("selected identity block is singular".into()))?
        .transpose();
    let rest: Vec<usize> = all.iter().copied().filter(|r| !top.contains(r)).collect();
    let m1_rows = select_rows(&scaled, &rest, k, tol).ok_or_else(|| {
        Error::NotNormalizable("no invertible M1 block among the remaining rows".into())
    })?;
    let m2_rows: Vec<usize> = rest
        .iter()
        .copied()
        .filter(|r| !m1_rows.contains(r))
        .collect();

    let order: Vec<usize> = top
        .iter()
        .chain(&m1_rows)
        .chain(&m2_rows)
        .copied()
        .collect();
    Ok(NormalizedPlane {
        swaps: swaps_for(&order),
        m1: scaled.select_rows(&m1_rows),
        m2: scaled.select_rows(&m2_rows),
        order,
    })
}

/// Normal form `[I_k; M₁; M₂]` with `M₁` invertible, for a plane that is
/// isotropic for the identity form and has `k < m/2`.
pub fn normalize_plane(p: &Plane, tol: &Tolerance) -> Result<NormalizedPlane> {
    let id = SymmetricForm::identity(p.m(), *tol);
    require_isotropic(&id, p)?;
    normalize_unchecked(p.basis(), tol)
}

/// Normalizes `p` under the coordinate order already chosen for `reference`.
/// Isotropy of `p` is not checked.
pub fn normalize_with_permutation(
    p: &Plane,
    reference: &NormalizedPlane,
    tol: &Tolerance,
) -> Result<NormalizedPlane> {
    if p.m() != reference.m() || p.k() != reference.k() {
        return Err(Error::DimensionMismatch(format!(
            "plane is {}x{}, reference normal form is {}x{}",
            p.m(),
            p.k(),
            reference.m(),
            reference.k()
        )));
    }
    let (m1, m2) = blocks_under(p.basis(), reference.order(), tol)?;
    if rank(&m1, tol) < p.k() {
        return Err(Error::NotNormalizable(
            "M1 is singular under the reference permutation".into(),
        ));
    }
    Ok(NormalizedPlane {
        order: reference.order.clone(),
        swaps: reference.swaps.clone(),
        m1,
        m2,
    })
}
