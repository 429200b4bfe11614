//! Consistent initial values.
//!
//! `IV = {u ; M₁u ∈ R(M₀)}`. For a regular pencil this is the graph of the
//! coupling `−B⁻¹C : N(M₀)⊥ → N(M₀)`, so `dim IV = rank M₀` and
//! `K = ι*_{N⊥} ι_IV` is an isomorphism. On IV the equation becomes the ODE
//! `x′ = −Gx` with `G = (ι*_R M₀ ι_IV)⁻¹ (ι*_R M₁ ι_IV)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::pencil::BlockFactorization;
use crate::subspaces::SubspaceBasis;

/// The space of consistent initial values of a regular pencil.
#[derive(Clone, Debug)]
pub struct IvSpace {
    pub basis: SubspaceBasis,
    pub b: CMatrix,
    pub c: CMatrix,
    /// `−B⁻¹C`, from `N(M₀)⊥` coordinates to `N(M₀)` coordinates.
    pub coupling: CMatrix,
    pub generator_g: CMatrix,
    /// `K = ι*_{N⊥} ι_IV`.
    pub iso_k: CMatrix,
    /// Condition number of `ι*_R M₀ ι_IV`.
    pub m0_iv_condition: f64,
    /// `ι_{N⊥} + ι_N·coupling`, the (non-orthonormal) graph embedding of `N(M₀)⊥`.
    pub embedding: CMatrix,
    /// `ι*_{N⊥}` as a matrix.
    pub conull_adjoint: CMatrix,
    m1_rperp: CMatrix,
    m1_norm: f64,
    // singular value range of ι*_{R⊥}M₁ on IV⊥
    residual_gain: (f64, f64),
}

pub fn compute_iv(f: &BlockFactorization) -> Result<IvSpace> {
    let n = f.n();
    let d = &f.decomp;
    let coupling = -(&f.b_inv * &f.c);
    let embedding = d.conull_m0.basis() + d.null_m0.basis() * &coupling;
    let q = linalg::orthonormalize(&embedding);
    let basis = SubspaceBasis::new(q.clone(), "IV")?;
    let iso_k = d.conull_m0.basis().adjoint() * &q;

    let m0_iv = d.range_m0.basis().adjoint() * f.pencil.m0() * &q;
    let m1_iv = d.range_m0.basis().adjoint() * f.pencil.m1() * &q;
    let m0_iv_condition = linalg::condition_number(&m0_iv);
    let m0_iv_inv = linalg::inverse(&m0_iv)
        .ok_or_else(|| Error::InternalInconsistency("compression of M0 to IV is singular".into()))?;
    let generator_g = m0_iv_inv * m1_iv;

    let m1_rperp = d.corange_m0.basis().adjoint() * f.pencil.m1();
    let complement = CMatrix::identity(n, n) - &q * q.adjoint();
    let gains = linalg::singular_values(&(&m1_rperp * complement));
    let k = n - basis.dim();
    let residual_gain = if k == 0 {
        (0.0, 0.0)
    } else {
        (gains[k - 1], gains[0])
    };

    Ok(IvSpace {
        basis,
        b: f.b.clone(),
        c: f.c.clone(),
        coupling,
        generator_g,
        iso_k,
        m0_iv_condition,
        embedding,
        conull_adjoint: d.conull_m0.basis().adjoint(),
        m1_rperp,
        m1_norm: f.m1_norm,
        residual_gain,
    })
}

impl IvSpace {
    pub fn ambient_dim(&self) -> usize {
        self.basis.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `‖ι*_{R⊥} M₁ u‖`; zero exactly on IV.
    pub fn constraint_residual(&self, u: &CVector) -> f64 {
        (&self.m1_rperp * u).norm()
    }

    pub fn m1_norm(&self) -> f64 {
        self.m1_norm
    }

    /// Orthogonal projection of `u` onto IV.
    pub fn project(&self, u: &CVector) -> CVector {
        self.basis.embed(&self.basis.coordinates(u))
    }
}

/// Distance-based IV membership, cross-checked against `M₁u ∈ R(M₀)`.
///
/// Writing `u = v + w` with `v ∈ IV` and `w ⊥ IV`, the constraint residual
/// `‖ι*_{R⊥}M₁u‖` lies between `s_min·‖w‖` and `s_max·‖w‖`, where `s` are the
/// singular values of `ι*_{R⊥}M₁` on `IV⊥`. A residual outside that window
/// means the two descriptions of IV disagree.
pub fn iv_membership(iv: &IvSpace, u0: &CVector, tol: f64) -> Result<bool> {
    if u0.len() != iv.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for IV in dimension {}",
            u0.len(),
            iv.ambient_dim()
        )));
    }
    let norm = u0.norm();
    if norm == 0.0 {
        return Ok(true);
    }
    let dist = (u0 - iv.project(u0)).norm();
    let residual = iv.constraint_residual(u0);
    let (lo, hi) = iv.residual_gain;
    let slack = 1e-12 * iv.m1_norm * norm;
    if residual > hi * dist * (1.0 + 1e-6) + slack || residual < lo * dist * (1.0 - 1e-6) - slack {
        return Err(Error::InternalInconsistency(format!(
            "IV distance {dist:.3e} and constraint residual {residual:.3e} disagree"
        )));
    }
    Ok(dist <= tol * norm)
}

/// Structure of IV relative to `N(M₀)⊥`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructurePredicates {
    /// `C = 0`, equivalently `N(M₀)⊥ ⊆ IV`.
    pub nbot_subset_iv: bool,
    /// `C` injective, equivalently `IV ∩ N(M₀)⊥ = {0}`.
    pub iv_meets_nbot_trivially: bool,
}

/// Decides both predicates relative to `tol·‖M₁‖`. An empty `C` counts as
/// both zero and injective.
pub fn iv_structure_predicates(f: &BlockFactorization, tol: f64) -> StructurePredicates {
    let c = &f.c;
    if c.nrows() == 0 || c.ncols() == 0 {
        return StructurePredicates { nbot_subset_iv: true, iv_meets_nbot_trivially: true };
    }
    let thresh = tol * f.m1_norm.max(f64::MIN_POSITIVE);
    let s = linalg::singular_values(c);
    let injective = c.nrows() >= c.ncols() && s[c.ncols() - 1] > thresh;
    StructurePredicates { nbot_subset_iv: s[0] <= thresh, iv_meets_nbot_trivially: injective }
}
