//! Congruence reduction of a complex symmetric form to `diag(I_l, 0)` and
//! the resulting factorization `Q = PᵀP`.
//!
//! The reduction repeatedly picks a vector `u` with `Q(u, u) ≠ 0` in the
//! current subspace `H`, normalizes it to `v = u / √Q(u, u)` and replaces `H`
//! by `{w ∈ H : Q(v, w) = 0}`. The collected `v`s together with the
//! surviving basis of the last `H` form the columns of `A` with
//! `AᵀQA = diag(I_l, 0)`, and `P = diag(I_l, 0)·A⁻¹`.

use crate::error::{Error, Result};
use crate::matcore::{self, cayley_orthogonal, inverse, Matrix, Tolerance, C64, ZERO};

/// A symmetric bilinear form, stored as its (exactly symmetric) Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm {
    q: Matrix,
    tol: Tolerance,
    rank: usize,
    asymmetry: f64,
}

impl SymmetricForm {
    /// Symmetrizes `q ← (q + qᵀ)/2`. The relative asymmetry of the input is
    /// kept for reporting.
    pub fn new(q: Matrix, tol: Tolerance) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::NotSquare {
                rows: q.rows(),
                cols: q.cols(),
            });
        }
        let scale = q.norm_max();
        let asymmetry = if scale > 0.0 {
            q.asymmetry() / scale
        } else {
            0.0
        };
        let q = q.symmetrized();
        let rank = matcore::rank(&q, &tol);
        Ok(SymmetricForm {
            q,
            tol,
            rank,
            asymmetry,
        })
    }

    pub fn identity(m: usize, tol: Tolerance) -> Self {
        SymmetricForm {
            q: Matrix::identity(m),
            tol,
            rank: m,
            asymmetry: 0.0,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    /// `‖q − qᵀ‖_max / ‖q‖_max` of the matrix handed to [`SymmetricForm::new`].
    pub fn input_asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn is_non_degenerate(&self) -> bool {
        self.rank == self.dim()
    }

    pub(crate) fn require_non_degenerate(&self) -> Result<()> {
        if self.is_non_degenerate() {
            Ok(())
        } else {
            Err(Error::DegenerateForm {
                rank: self.rank,
                m: self.dim(),
            })
        }
    }

    /// An element of the orthogonal group of this form: the Cayley transform
    /// of `s` conjugated into the form's coordinates, `P⁻¹·A·P` with `Q = PᵀP`.
    pub fn cayley_orthogonal(&self, s: &Matrix) -> Result<Matrix> {
        self.require_non_degenerate()?;
        if s.shape() != self.q.shape() {
            return Err(Error::DimensionMismatch(format!(
                "skew matrix is {}x{}, form is {m}x{m}",
                s.rows(),
                s.cols(),
                m = self.dim()
            )));
        }
        let a = cayley_orthogonal(s, &self.tol)?;
        let p = transpose_factor(self)?.p;
        let p_inv = inverse(&p, &self.tol)?;
        Ok(p_inv.matmul(&a).matmul(&p))
    }
}

/// Which vector of the working basis becomes the next pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PivotChoice {
    /// `u = w_i`.
    Diagonal(usize),
    /// `u = w_i + sign·w_j` with `sign = ±1`, chosen so that
    /// `|Q(u, u)| ≥ 2·|g_ij|`.
    Sum { i: usize, j: usize, sign: f64 },
    /// The restricted form vanishes within tolerance.
    ZeroForm,
}

impl PivotChoice {
    /// `Q(u, u)` for this pivot under the Gram matrix `g`.
    pub fn value(&self, g: &Matrix) -> Option<C64> {
        match *self {
            PivotChoice::Diagonal(i) => Some(g[(i, i)]),
            PivotChoice::Sum { i, j, sign } => {
                Some(g[(i, i)] + g[(j, j)] + g[(i, j)] * (2.0 * sign))
            }
            PivotChoice::ZeroForm => None,
        }
    }
}

/// Deterministic pivot rule on a symmetric Gram matrix `g`.
///
/// `scale` is `‖Q‖_max` of the original form; entries at or below
/// `rank_rel_tol × scale` count as zero.
pub fn pivot_select(g: &Matrix, scale: f64, tol: &Tolerance) -> PivotChoice {
    let d = g.rows();
    let mut diag = (0, 0.0f64);
    let mut off = (0, 0, 0.0f64);
    for i in 0..d {
        let mag = g[(i, i)].norm();
        if mag > diag.1 {
            diag = (i, mag);
        }
        for j in (i + 1)..d {
            let mag = g[(i, j)].norm();
            if mag > off.2 {
                off = (i, j, mag);
            }
        }
    }
    if diag.1.max(off.2) <= tol.rank_rel_tol * scale || diag.1.max(off.2) == 0.0 {
        return PivotChoice::ZeroForm;
    }
    if diag.1 >= off.2 {
        return PivotChoice::Diagonal(diag.0);
    }
    let (i, j, _) = off;
    let base = g[(i, i)] + g[(j, j)];
    let cross = g[(i, j)] * 2.0;
    let sign = if (base + cross).norm() >= (base - cross).norm() {
        1.0
    } else {
        -1.0
    };
    PivotChoice::Sum { i, j, sign }
}

/// Change of basis `a` with `aᵀ·q·a = diag(I_l, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub a: Matrix,
    pub l: usize,
}

impl Reduction {
    /// `‖aᵀ·q·a − diag(I_l, 0)‖_max`.
    pub fn residual(&self, q: &SymmetricForm) -> f64 {
        let target = Matrix::partial_identity(q.dim(), self.l);
        (&self.a.congruence(q.matrix()) - &target).norm_max()
    }
}

/// Reduces `q` to `diag(I_l, 0)` by congruence.
pub fn symmetric_reduce(q: &SymmetricForm) -> Reduction {
    let m = q.dim();
    let tol = q.tol();
    let scale = q.matrix().norm_max();

    // Working basis of the current subspace H and its Gram matrix.
    let mut basis: Vec<Vec<C64>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO })
                .collect()
        })
        .collect();
    let mut gram = q.matrix().clone();
    let mut pivots: Vec<Vec<C64>> = Vec::new();

    loop {
        let choice = pivot_select(&gram, scale, tol);
        let (p, u, coupling, value) = match choice {
            PivotChoice::ZeroForm => break,
            PivotChoice::Diagonal(i) => {
                let coupling: Vec<C64> = gram.row(i).to_vec();
                (i, basis[i].clone(), coupling, gram[(i, i)])
            }
            PivotChoice::Sum { i, j, sign } => {
                let u: Vec<C64> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(&x, &y)| x + y * sign)
                    .collect();
                let coupling: Vec<C64> = gram
                    .row(i)
                    .iter()
                    .zip(gram.row(j))
                    .map(|(&x, &y)| x + y * sign)
                    .collect();
                let value = choice.value(&gram).unwrap_or(ZERO);
                (i, u, coupling, value)
            }
        };

        let root = value.sqrt();
        pivots.push(u.iter().map(|&x| x / root).collect());

        // Project the other basis vectors onto the Q-complement of u, which
        // drops coordinate p from H.
        let keep: Vec<usize> = (0..basis.len()).filter(|&t| t != p).collect();
        let mut next_basis = Vec::with_capacity(keep.len());
        for &t in &keep {
            let c = coupling[t] / value;
            next_basis.push(basis[t].iter().zip(&u).map(|(&w, &x)| w - c * x).collect());
        }
        let next_gram = Matrix::from_fn(keep.len(), keep.len(), |s, t| {
            let (s, t) = (keep[s], keep[t]);
            gram[(s, t)] - coupling[s] * coupling[t] / value
        });
        basis = next_basis;
        gram = next_gram;
    }

    let l = pivots.len();
    let mut a = Matrix::zeros(m, m);
    for (col, v) in pivots.iter().chain(basis.iter()).enumerate() {
        for (row, &x) in v.iter().enumerate() {
            a[(row, col)] = x;
        }
    }
    Reduction { a, l }
}

/// `p` with `pᵀ·p = q` (plain transpose) and `rank(p) = l = rank(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransposeFactor {
    pub p: Matrix,
    pub l: usize,
}

impl TransposeFactor {
    /// `‖pᵀ·p − q‖_F`.
    pub fn residual(&self, q: &SymmetricForm) -> f64 {
        (&self.p.transpose().matmul(&self.p) - q.matrix()).norm_fro()
    }
}

/// `p = diag(I_l, 0)·a⁻¹` from the congruence reduction of `q`.
///
/// Fails only if the accumulated change of basis is numerically singular.
pub fn transpose_factor(q: &SymmetricForm) -> Result<TransposeFactor> {
    let Reduction { a, l } = symmetric_reduce(q);
    let a_inv = inverse(&a, q.tol())?;
    let m = q.dim();
    let mut p = Matrix::zeros(m, m);
    p.set_block(0, 0, &a_inv.block(0, 0, l, m));
    Ok(TransposeFactor { p, l })
}
