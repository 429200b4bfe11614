//! Orthonormal bases for subspaces and the four fundamental subspaces of `M₀`.
//!
//! A [`SubspaceBasis`] with basis matrix `Q` (orthonormal columns) represents
//! both the canonical embedding `ι = Q` and its adjoint `ι* = Qᴴ`, which is
//! the orthogonal projection onto the subspace expressed in coordinates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Orthonormality tolerance accepted for a basis.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Default relative rank cutoff for an `n × n` matrix.
pub fn default_rank_tol(n: usize) -> f64 {
    n.max(1) as f64 * f64::EPSILON * 32.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    basis: CMatrix,
    label: String,
}

impl SubspaceBasis {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn new(basis: CMatrix, label: impl Into<String>) -> Result<Self> {
        let k = basis.ncols();
        if k > basis.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{k} basis vectors in dimension {}",
                basis.nrows()
            )));
        }
        if !linalg::is_finite(&basis) {
            return Err(Error::NonFinite("subspace basis"));
        }
        let gram = basis.adjoint() * &basis - CMatrix::identity(k, k);
        let err = gram.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "basis columns are not orthonormal (deviation {err:.3e})"
            )));
        }
        Ok(Self { ambient_dim: basis.nrows(), basis, label: label.into() })
    }

    /// Orthonormal basis of the column span of a full-column-rank matrix.
    pub fn spanned_by(columns: &CMatrix, label: impl Into<String>) -> Result<Self> {
        Self::new(linalg::orthonormalize(columns), label)
    }

    /// The zero subspace of `ℂⁿ`.
    pub fn zero(n: usize, label: impl Into<String>) -> Self {
        Self { ambient_dim: n, basis: CMatrix::zeros(n, 0), label: label.into() }
    }

    /// The whole space `ℂⁿ` with the standard basis.
    pub fn full(n: usize, label: impl Into<String>) -> Self {
        Self { ambient_dim: n, basis: CMatrix::identity(n, n), label: label.into() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The embedding `ι` as an `n × k` matrix.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `ι*v`: coordinates of the orthogonal projection of `v`.
    pub fn coordinates(&self, v: &CVector) -> CVector {
        self.basis.adjoint() * v
    }

    /// `ιx`: the vector with coordinates `x`.
    pub fn embed(&self, x: &CVector) -> CVector {
        &self.basis * x
    }

    /// `ιι*`, the orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `‖(I − ιι*)v‖`.
    pub fn distance(&self, v: &CVector) -> f64 {
        (v - self.embed(&self.coordinates(v))).norm()
    }
}

/// Orthonormal bases of `N(M₀)`, `N(M₀)⊥`, `R(M₀)` and `R(M₀)⊥`.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalDecomposition {
    pub null_m0: SubspaceBasis,
    pub conull_m0: SubspaceBasis,
    pub range_m0: SubspaceBasis,
    pub corange_m0: SubspaceBasis,
    pub rank: usize,
    pub tolerance_used: f64,
    pub singular_values: Vec<f64>,
}

impl FundamentalDecomposition {
    pub fn n(&self) -> usize {
        self.null_m0.ambient_dim()
    }
}

/// Computes the fundamental subspaces of `m0` from its SVD. Singular values
/// `<= tol·σ_max` count as zero; a cutoff that lands within a factor 10 of
/// singular values on both sides is rejected as ambiguous.
pub fn fundamental_decomposition(m0: &CMatrix, tol: f64) -> Result<FundamentalDecomposition> {
    let (n, cols) = m0.shape();
    if n != cols {
        return Err(Error::NonSquare { rows: n, cols });
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance {tol} must lie in (0, 1)")));
    }
    if !linalg::is_finite(m0) {
        return Err(Error::NonFinite("M0"));
    }
    if n == 0 {
        let z = |l: &str| SubspaceBasis::zero(0, l);
        return Ok(FundamentalDecomposition {
            null_m0: z("N(M0)"),
            conull_m0: z("N(M0)^perp"),
            range_m0: z("R(M0)"),
            corange_m0: z("R(M0)^perp"),
            rank: 0,
            tolerance_used: tol,
            singular_values: Vec::new(),
        });
    }

    let linalg::Svd { u, singular_values: sigma, v } = linalg::svd(m0);

    let smax = sigma[0];
    let cutoff = tol * smax;
    let rank = if smax == 0.0 { 0 } else { sigma.iter().take_while(|&&s| s > cutoff).count() };
    if rank > 0 && rank < n {
        let kept = sigma[rank - 1];
        let dropped = sigma[rank];
        if kept <= 10.0 * cutoff && dropped >= cutoff / 10.0 {
            return Err(Error::DegenerateTolerance { cutoff, kept, dropped });
        }
    }

    let block = |m: &CMatrix, start: usize, len: usize| {
        let mut b = m.columns(start, len).clone_owned();
        linalg::normalize_phases(&mut b);
        b
    };
    Ok(FundamentalDecomposition {
        null_m0: SubspaceBasis::new(block(&v, rank, n - rank), "N(M0)")?,
        conull_m0: SubspaceBasis::new(block(&v, 0, rank), "N(M0)^perp")?,
        range_m0: SubspaceBasis::new(block(&u, 0, rank), "R(M0)")?,
        corange_m0: SubspaceBasis::new(block(&u, rank, n - rank), "R(M0)^perp")?,
        rank,
        tolerance_used: tol,
        singular_values: sigma,
    })
}

/// The block `ι*_left T ι_right`, i.e. `leftᴴ · t · right`.
pub fn compress(t: &CMatrix, left: &SubspaceBasis, right: &SubspaceBasis) -> Result<CMatrix> {
    if t.nrows() != left.ambient_dim() || t.ncols() != right.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compress {}x{} operator between subspaces of C^{} and C^{}",
            t.nrows(),
            t.ncols(),
            left.ambient_dim(),
            right.ambient_dim()
        )));
    }
    Ok(left.basis().adjoint() * t * right.basis())
}

/// `‖(I − P_S)v‖ <= tol·‖v‖`; the zero vector lies in every subspace.
pub fn subspace_contains(s: &SubspaceBasis, v: &CVector, tol: f64) -> bool {
    if v.len() != s.ambient_dim() {
        return false;
    }
    let nv = v.norm();
    nv == 0.0 || s.distance(v) <= tol * nv
}
