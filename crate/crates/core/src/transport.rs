//! Elements of the orthogonal group `G = {A : AᵀQA = Q}` that carry one
//! isotropic plane onto another.
//!
//! Two constructions are provided. The generic one works in identity-form
//! coordinates on planes in normal form `[I_k; M₁; M₂]` and solves for a map
//! of block shape `[[I, 0, 0], [0, A₁, A₂], [0, B₁, B₂]]`; it needs `N₁`
//! invertible and `X` of full rank. The frame construction completes each
//! plane to a hyperbolic frame `F` with `FᵀQF = S` and returns `F′F⁻¹`; it
//! works for every pair, including `k = m/2`.

use std::fmt;

use crate::error::{Error, Result};
use crate::factor::{symmetric_reduce, transpose_factor, SymmetricForm};
use crate::isotropic::{
    normalize_unchecked, normalize_with_permutation, require_isotropic, NormalizedPlane, Plane,
};
use crate::matcore::{
    inverse, kernel, min_norm_solve, rank_with_scale, solve, span_distance, Matrix, Tolerance, C64,
    ONE,
};

/// The permutation matrix exchanging coordinates `i` and `j` (0-based),
/// `I + E_ij + E_ji − E_ii − E_jj`.
pub fn swap_generator(i: usize, j: usize, m: usize) -> Result<Matrix> {
    if !(i < j && j < m) {
        return Err(Error::IndexOutOfRange { i, j, m });
    }
    let mut g = Matrix::identity(m);
    g[(i, i)] = C64::new(0.0, 0.0);
    g[(j, j)] = C64::new(0.0, 0.0);
    g[(i, j)] = ONE;
    g[(j, i)] = ONE;
    Ok(g)
}

/// `‖aᵀqa − q‖_F / max(‖q‖_F, 1)`.
pub fn group_membership(q: &SymmetricForm, a: &Matrix) -> Result<f64> {
    if a.shape() != q.matrix().shape() {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, form is {m}x{m}",
            a.rows(),
            a.cols(),
            m = q.dim()
        )));
    }
    let defect = (&a.congruence(q.matrix()) - q.matrix()).norm_fro();
    Ok(defect / q.matrix().norm_fro().max(1.0))
}

/// How `transport` should build its map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Generic construction first, hyperbolic frames when it does not apply.
    Auto,
    GenericOnly,
    FrameOnly,
}

/// The construction that actually produced a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Generic,
    Frame,
    /// Built by composing or inverting other maps.
    Derived,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Generic => "generic",
            Route::Frame => "frame",
            Route::Derived => "derived",
        })
    }
}

/// A certified element of the orthogonal group of a form.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMap {
    pub a: Matrix,
    pub group_residual: f64,
    /// `span_distance(a·Λ, Λ′)`; present when the map came out of a transport.
    pub transport_residual: Option<f64>,
    pub route: Route,
}

impl OrthogonalMap {
    /// Measures group membership of `a` and rejects it above `residual_rel_tol`.
    pub fn certify(q: &SymmetricForm, a: Matrix) -> Result<Self> {
        let group_residual = group_membership(q, &a)?;
        check("group membership", group_residual, q.tol())?;
        Ok(OrthogonalMap {
            a,
            group_residual,
            transport_residual: None,
            route: Route::Derived,
        })
    }

    /// `self ∘ other`, re-certified.
    pub fn compose(&self, other: &OrthogonalMap, q: &SymmetricForm) -> Result<Self> {
        Self::certify(q, self.a.matmul(&other.a))
    }

    /// Group inverse, re-certified.
    pub fn inverse(&self, q: &SymmetricForm) -> Result<Self> {
        Self::certify(q, inverse(&self.a, q.tol())?)
    }
}

fn check(what: &'static str, residual: f64, tol: &Tolerance) -> Result<()> {
    if residual.is_finite() && residual <= tol.residual_rel_tol {
        Ok(())
    } else {
        Err(Error::Uncertified {
            what,
            residual,
            tol: tol.residual_rel_tol,
        })
    }
}

fn certify_transport(
    q: &SymmetricForm,
    a: Matrix,
    source: &Matrix,
    target: &Matrix,
    route: Route,
) -> Result<OrthogonalMap> {
    let tol = q.tol();
    let group_residual = group_membership(q, &a)?;
    check("group membership", group_residual, tol)?;
    let transport_residual =
        span_distance(&a.matmul(source), target, tol).map_err(|_| Error::Uncertified {
            what: "span transport",
            residual: f64::INFINITY,
            tol: tol.residual_rel_tol,
        })?;
    check("span transport", transport_residual, tol)?;
    Ok(OrthogonalMap {
        a,
        group_residual,
        transport_residual: Some(transport_residual),
        route,
    })
}

/// Intermediate matrices of the generic construction, kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericWitness {
    pub n1: Matrix,
    pub n2: Matrix,
    pub mm: Matrix,
    pub x: Matrix,
    pub y: Matrix,
    pub z: Matrix,
    pub w: Matrix,
    pub a1: Matrix,
    pub a2: Matrix,
    pub b1: Matrix,
    pub b2: Matrix,
}

impl GenericWitness {
    /// `‖N₁ᵀN₁ + N₂ᵀN₂ − I − MᵀM‖_max`.
    pub fn consistency_residual(&self) -> f64 {
        consistency_defect(&self.n1, &self.n2, &self.mm).0
    }

    /// `‖N₁ᵀA₂ + N₂ᵀB₂ − Mᵀ‖_F`.
    pub fn first_equation_residual(&self) -> f64 {
        let lhs = &self.n1.transpose().matmul(&self.a2) + &self.n2.transpose().matmul(&self.b2);
        (&lhs - &self.mm.transpose()).norm_fro()
    }

    /// `‖A₂ᵀA₂ + B₂ᵀB₂ − I‖_F`.
    pub fn second_equation_residual(&self) -> f64 {
        let lhs = &self.a2.transpose().matmul(&self.a2) + &self.b2.transpose().matmul(&self.b2);
        (&lhs - &Matrix::identity(lhs.rows())).norm_fro()
    }

    /// `‖A₁ᵀA₁ + B₁ᵀB₁ − I‖_F`, implied by the other two and the consistency identity.
    pub fn redundant_equation_residual(&self) -> f64 {
        let lhs = &self.a1.transpose().matmul(&self.a1) + &self.b1.transpose().matmul(&self.b1);
        (&lhs - &Matrix::identity(lhs.rows())).norm_fro()
    }
}

/// Returns `(‖N₁ᵀN₁ + N₂ᵀN₂ − I − MᵀM‖_max, ‖I + MᵀM‖_max)`.
fn consistency_defect(n1: &Matrix, n2: &Matrix, mm: &Matrix) -> (f64, f64) {
    let k = n1.rows();
    let lhs = &n1.transpose().matmul(n1) + &n2.transpose().matmul(n2);
    let rhs = &Matrix::identity(k) + &mm.transpose().matmul(mm);
    ((&lhs - &rhs).norm_max(), rhs.norm_max())
}

fn require_common_permutation(np: &NormalizedPlane, np2: &NormalizedPlane) -> Result<()> {
    if np.m() != np2.m() || np.k() != np2.k() {
        return Err(Error::DimensionMismatch(format!(
            "normal forms of shapes {}x{} and {}x{}",
            np.m(),
            np.k(),
            np2.m(),
            np2.k()
        )));
    }
    if np.order() != np2.order() {
        return Err(Error::NotGeneric(
            "planes are normalized under different permutations".into(),
        ));
    }
    Ok(())
}

/// The quantities `N₁ = M₁′M₁⁻¹`, `N₂ = M₂′M₁⁻¹`, `M = M₂M₁⁻¹`.
fn ratios(
    np: &NormalizedPlane,
    np2: &NormalizedPlane,
    tol: &Tolerance,
) -> Result<(Matrix, Matrix, Matrix)> {
    let m1_inv = inverse(np.m1(), tol).map_err(|_| Error::NotGeneric("M1 is singular".into()))?;
    Ok((
        np2.m1().matmul(&m1_inv),
        np2.m2().matmul(&m1_inv),
        np.m2().matmul(&m1_inv),
    ))
}

/// Scaled residual of `N₁ᵀN₁ + N₂ᵀN₂ = I_k + MᵀM`, which holds whenever both
/// normal forms describe isotropic planes.
pub fn consistency_identity(
    np: &NormalizedPlane,
    np2: &NormalizedPlane,
    tol: &Tolerance,
) -> Result<f64> {
    require_common_permutation(np, np2)?;
    let (n1, n2, mm) = ratios(np, np2, tol)?;
    let (defect, scale) = consistency_defect(&n1, &n2, &mm);
    Ok(defect / scale.max(1.0))
}

/// Generic construction of `A` with `AᵀA = I` and `A·Λ = Λ′`, in identity-form
/// coordinates, for two planes normalized under a common permutation.
pub fn transport_generic(
    np: &NormalizedPlane,
    np2: &NormalizedPlane,
    tol: &Tolerance,
) -> Result<(OrthogonalMap, GenericWitness)> {
    require_common_permutation(np, np2)?;
    let m = np.m();
    let k = np.k();
    let rest = m - 2 * k;
    let id_rest = Matrix::identity(rest);

    let (n1, n2, mm) = ratios(np, np2, tol)?;
    let n1_inv = inverse(&n1, tol).map_err(|_| Error::NotGeneric("N1 is singular".into()))?;
    let gram_inv = n1_inv.matmul(&n1_inv.transpose());

    let x_term = n2.matmul(&gram_inv).matmul(&n2.transpose());
    let x = (&id_rest + &x_term).symmetrized();
    let y = n2.matmul(&gram_inv).matmul(&mm.transpose());
    let z = mm.matmul(&gram_inv).matmul(&mm.transpose()).symmetrized();

    // X = I + (terms) may cancel, so its rank is judged against the size of the terms.
    let x_rank = rank_with_scale(&x, x_term.norm_max().max(1.0), tol);
    if x_rank < rest {
        return Err(Error::NotGeneric(format!(
            "rank(X) = {x_rank} < m - 2k = {rest}"
        )));
    }
    let x_form = SymmetricForm::new(x.clone(), *tol)?;
    let p = transpose_factor(&x_form)?.p;
    let p_inv =
        inverse(&p, tol).map_err(|_| Error::NotGeneric("factor of X is singular".into()))?;
    let x_inv_y = solve(&x, &y, tol).map_err(|_| Error::NotGeneric("X is singular".into()))?;

    let w = (&(&id_rest - &z) + &y.transpose().matmul(&x_inv_y)).symmetrized();
    let v = transpose_factor(&SymmetricForm::new(w.clone(), *tol)?)?.p;

    let b2 = &p_inv.matmul(&v) + &x_inv_y;
    let a2 = solve(
        &n1.transpose(),
        &(&mm.transpose() - &n2.transpose().matmul(&b2)),
        tol,
    )
    .map_err(|_| Error::NotGeneric("N1 is singular".into()))?;
    let a1 = &n1 - &a2.matmul(&mm);
    let b1 = &n2 - &b2.matmul(&mm);

    let mut blocks = Matrix::identity(m);
    blocks.set_block(k, k, &a1);
    blocks.set_block(k, 2 * k, &a2);
    blocks.set_block(2 * k, k, &b1);
    blocks.set_block(2 * k, 2 * k, &b2);

    // Undo the coordinate permutation: A = Πᵀ·blocks·Π.
    let order = np.order();
    let mut a = Matrix::zeros(m, m);
    for (pi, &ri) in order.iter().enumerate() {
        for (pj, &rj) in order.iter().enumerate() {
            a[(ri, rj)] = blocks[(pi, pj)];
        }
    }

    let id = SymmetricForm::identity(m, *tol);
    let map = certify_transport(
        &id,
        a,
        &np.reassembled(),
        &np2.reassembled(),
        Route::Generic,
    )?;
    let witness = GenericWitness {
        n1,
        n2,
        mm,
        x,
        y,
        z,
        w,
        a1,
        a2,
        b1,
        b2,
    };
    Ok((map, witness))
}

/// Basis `f = [a₁…a_k | b₁…b_k | w₁…w_{m−2k}]` with `fᵀqf = S`, whose first
/// `k` columns are a Hermitian-orthonormal basis of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicFrame {
    pub f: Matrix,
    pub k: usize,
    pub structure_residual: f64,
}

/// Standard Gram matrix `[[0, I_k, 0], [I_k, 0, 0], [0, 0, I_{m−2k}]]`.
pub fn standard_structure(m: usize, k: usize) -> Matrix {
    let mut s = Matrix::zeros(m, m);
    for i in 0..k {
        s[(i, k + i)] = ONE;
        s[(k + i, i)] = ONE;
    }
    for i in 2 * k..m {
        s[(i, i)] = ONE;
    }
    s
}

/// Completes an isotropic plane to a hyperbolic frame of `q`.
pub fn complete_hyperbolic_frame(q: &SymmetricForm, p: &Plane) -> Result<HyperbolicFrame> {
    q.require_non_degenerate()?;
    require_isotropic(q, p)?;
    let tol = q.tol();
    let (m, k) = (p.m(), p.k());
    // An ill-conditioned basis would inflate the dual vectors below.
    let orthonormal = p.basis().orthonormalize_columns();
    let lambda = &orthonormal;
    let qm = q.matrix();

    // Dual vectors: (ΛᵀQ)·C = I_k.
    let pairing = lambda.transpose().matmul(qm);
    let c = min_norm_solve(&pairing, &Matrix::identity(k), tol)?;
    // B = C − ½·Λ·(CᵀQC) makes the b's isotropic while keeping Q(a_i, b_j) = δ_ij.
    let cqc = c.congruence(qm);
    let b = &c - &lambda.matmul(&cqc).scale(C64::new(0.5, 0.0));

    let ab = Matrix::hstack(&[lambda, &b]);
    let complement = kernel(&ab.transpose().matmul(qm), tol);
    if complement.cols() != m - 2 * k {
        return Err(Error::DegenerateForm {
            rank: m - complement.cols(),
            m,
        });
    }
    let w = if complement.cols() > 0 {
        let gram = SymmetricForm::new(complement.congruence(qm), *tol)?;
        let red = symmetric_reduce(&gram);
        if red.l < complement.cols() {
            return Err(Error::DegenerateForm {
                rank: 2 * k + red.l,
                m,
            });
        }
        complement.matmul(&red.a)
    } else {
        complement
    };

    let f = Matrix::hstack(&[lambda, &b, &w]);
    let structure_residual = (&f.congruence(qm) - &standard_structure(m, k)).norm_max();
    check("hyperbolic frame structure", structure_residual, tol)?;
    Ok(HyperbolicFrame {
        f,
        k,
        structure_residual,
    })
}

/// `(p, p⁻¹)` with `q = pᵀp`: `p` carries `q` to the identity form.
fn identity_coordinates(q: &SymmetricForm) -> Result<(Matrix, Matrix)> {
    let to_identity = transpose_factor(q)?.p;
    let from_identity = inverse(&to_identity, q.tol())?;
    Ok((to_identity, from_identity))
}

// Frames are completed for the identity form, where the dual block of an
// orthonormal isotropic basis is its conjugate and the frame is near-unitary.
fn transport_frame(q: &SymmetricForm, p: &Plane, p2: &Plane) -> Result<OrthogonalMap> {
    let tol = q.tol();
    let (to_identity, from_identity) = identity_coordinates(q)?;
    let identity = SymmetricForm::identity(q.dim(), *tol);
    let lambda = Plane::new(to_identity.matmul(p.basis()), tol)?;
    let lambda2 = Plane::new(to_identity.matmul(p2.basis()), tol)?;
    let f = complete_hyperbolic_frame(&identity, &lambda)?;
    let f2 = complete_hyperbolic_frame(&identity, &lambda2)?;
    let inner = f2.f.matmul(&inverse(&f.f, tol)?);
    let a = from_identity.matmul(&inner).matmul(&to_identity);
    certify_transport(q, a, p.basis(), p2.basis(), Route::Frame)
}

fn transport_via_generic(q: &SymmetricForm, p: &Plane, p2: &Plane) -> Result<OrthogonalMap> {
    let tol = q.tol();
    let m = q.dim();
    if 2 * p.k() >= m {
        return Err(Error::NotGeneric(format!(
            "k = {} leaves no M2 block in dimension {m}",
            p.k()
        )));
    }
    let (to_identity, from_identity) = identity_coordinates(q)?;
    let not_generic = |e: Error| match e {
        Error::NotNormalizable(msg) => Error::NotGeneric(msg),
        Error::RankDeficient { .. } => {
            Error::NotGeneric("plane degenerates in identity coordinates".into())
        }
        other => other,
    };
    let lambda = Plane::new(to_identity.matmul(p.basis()), tol).map_err(not_generic)?;
    let lambda2 = Plane::new(to_identity.matmul(p2.basis()), tol).map_err(not_generic)?;
    let np = normalize_unchecked(lambda.basis(), tol).map_err(not_generic)?;
    let np2 = normalize_with_permutation(&lambda2, &np, tol).map_err(not_generic)?;
    let (inner, _) = transport_generic(&np, &np2, tol)?;
    let a = from_identity.matmul(&inner.a).matmul(&to_identity);
    certify_transport(q, a, p.basis(), p2.basis(), Route::Generic)
}

/// An element `A` of the orthogonal group of `q` with `A·Λ = Λ′`.
pub fn transport(
    q: &SymmetricForm,
    p: &Plane,
    p2: &Plane,
    strategy: Strategy,
) -> Result<OrthogonalMap> {
    if p.m() != q.dim() || p2.m() != q.dim() || p.k() != p2.k() {
        return Err(Error::DimensionMismatch(format!(
            "form of dimension {}, planes of shapes {}x{} and {}x{}",
            q.dim(),
            p.m(),
            p.k(),
            p2.m(),
            p2.k()
        )));
    }
    q.require_non_degenerate()?;
    require_isotropic(q, p)?;
    require_isotropic(q, p2)?;
    match strategy {
        Strategy::FrameOnly => transport_frame(q, p, p2),
        Strategy::GenericOnly => transport_via_generic(q, p, p2),
        Strategy::Auto => match transport_via_generic(q, p, p2) {
            Err(Error::NotGeneric(_))
            | Err(Error::Uncertified { .. })
            | Err(Error::SingularMatrix { .. }) => transport_frame(q, p, p2),
            other => other,
        },
    }
}
