//! Stability and exponential dichotomy.
//!
//! Both the strong and the mild problem admit an exponential dichotomy iff
//! `σ(M)` avoids the imaginary axis, and are exponentially stable iff
//! `σ(M) ⊆ {Re < 0}`. The splitting is computed on the reduced generator
//! `A` in `N(M₀)⊥` coordinates and carried to IV through `K⁻¹`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::consistent_iv::{compute_iv, IvSpace};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix, CVector};
use crate::pencil::{block_factorize, BlockFactorization, Pencil, SpectrumReport, DEFAULT_REGULARITY_TOL};
use crate::solvers::{solve_mild, uniform_grid};
use crate::subspaces::SubspaceBasis;

/// Relative factor of the default margin tolerance `1e-8·‖A‖`.
pub const DEFAULT_MARGIN_TOL_FACTOR: f64 = 1e-8;

/// Above this eigenvector condition number the envelope constant comes from
/// the Schur form instead of the eigenbasis.
pub const DEFECTIVE_CONDITION: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExponentiallyStable,
    Dichotomy,
    Marginal,
    UnstableNoDichotomy,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ExponentiallyStable => "exponentially_stable",
            Verdict::Dichotomy => "dichotomy",
            Verdict::Marginal => "marginal",
            Verdict::UnstableNoDichotomy => "unstable_no_dichotomy",
        }
    }

    pub fn has_dichotomy(self) -> bool {
        matches!(self, Verdict::ExponentiallyStable | Verdict::Dichotomy)
    }
}

/// Verdict from a list of eigenvalues. An empty spectrum is stable; a
/// spectrum strictly off the axis on the unstable side only is a dichotomy
/// with trivial stable part.
pub fn verdict_from_spectrum(eigenvalues: &[Complex64], margin_tol: f64) -> Verdict {
    let abscissa = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let margin = eigenvalues.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    if abscissa < -margin_tol {
        Verdict::ExponentiallyStable
    } else if margin > margin_tol {
        Verdict::Dichotomy
    } else if abscissa > margin_tol {
        Verdict::UnstableNoDichotomy
    } else {
        Verdict::Marginal
    }
}

pub fn default_margin_tol(a: &CMatrix) -> f64 {
    DEFAULT_MARGIN_TOL_FACTOR * linalg::norm2(a)
}

#[derive(Clone, Debug)]
pub struct DichotomyReport {
    pub spectrum: SpectrumReport,
    pub verdict: Verdict,
    pub margin: f64,
    pub margin_tol: f64,
    /// Dunford projection of `A` onto its stable part (`N(M₀)⊥` coordinates).
    pub projector_p: Option<CMatrix>,
    /// `range P`, `N(M₀)⊥` coordinates.
    pub s_basis: Option<SubspaceBasis>,
    /// `range (I − P)`, `N(M₀)⊥` coordinates.
    pub t_basis: Option<SubspaceBasis>,
    pub decay_rate: f64,
    /// `C` in `|u(t)| ≤ C e^{−ρt} |u₀|` on `S` (and for the reversed pencil on `T`).
    pub nonnormality_constant: f64,
    /// Whether `C` came from the Schur bound because the eigenbasis was too
    /// ill-conditioned; the decay rate is then halved.
    pub defective_fallback: bool,
}

impl DichotomyReport {
    pub fn dim_s(&self) -> Option<usize> {
        self.s_basis.as_ref().map(SubspaceBasis::dim)
    }

    pub fn dim_t(&self) -> Option<usize> {
        self.t_basis.as_ref().map(SubspaceBasis::dim)
    }
}

pub fn classify(p: &Pencil, margin_tol: Option<f64>) -> Result<DichotomyReport> {
    let f = block_factorize(p, DEFAULT_REGULARITY_TOL)?;
    let iv = compute_iv(&f)?;
    classify_factorized(&f, &iv, margin_tol)
}

pub fn classify_factorized(f: &BlockFactorization, iv: &IvSpace, margin_tol: Option<f64>) -> Result<DichotomyReport> {
    let a = &f.reduced_generator_a;
    let r = a.nrows();
    let spectrum = f.spectrum()?;
    let margin_tol = margin_tol.unwrap_or_else(|| default_margin_tol(a));
    if !(margin_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("margin tolerance {margin_tol} must be non-negative")));
    }
    let verdict = verdict_from_spectrum(&spectrum.eigenvalues, margin_tol);
    let margin = spectrum.imag_axis_margin;

    let (projector_p, s_basis, t_basis) = if verdict.has_dichotomy() {
        let p = dunford_projection(a, margin_tol)?;
        let s = range_basis(&p, "S")?;
        let t = range_basis(&(CMatrix::identity(r, r) - &p), "T")?;
        (Some(p), Some(s), Some(t))
    } else {
        (None, None, None)
    };
    let env = envelope(a, &iv.embedding, margin, verdict.has_dichotomy())?;
    Ok(DichotomyReport {
        spectrum,
        verdict,
        margin,
        margin_tol,
        projector_p,
        s_basis,
        t_basis,
        decay_rate: env.rate,
        nonnormality_constant: env.constant,
        defective_fallback: env.defective,
    })
}

/// Orthonormal basis of the range of a projector.
fn range_basis(p: &CMatrix, label: &str) -> Result<SubspaceBasis> {
    let n = p.nrows();
    if n == 0 {
        return Ok(SubspaceBasis::zero(0, label));
    }
    let svd = linalg::svd(p);
    // a projector's nonzero singular values are >= 1
    let k = svd.singular_values.iter().filter(|&&s| s > 0.5).count();
    let mut basis = svd.u.columns(0, k).into_owned();
    linalg::normalize_phases(&mut basis);
    SubspaceBasis::new(basis, label)
}

/// Dunford projection of `a` onto its spectral part in `{Re < 0}`, from an
/// ordered Schur form `a = Q [[T₁₁, T₁₂], [0, T₂₂]] Qᴴ` and the Sylvester
/// equation `T₁₁X − XT₂₂ = −T₁₂`: `P = Q [[I, −X], [0, 0]] Qᴴ`.
pub fn dunford_projection(a: &CMatrix, margin_tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::NonSquare { rows: n, cols: a.ncols() });
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let mut s = linalg::schur(a).ok_or(Error::EigenFailure)?;
    let margin = s.eigenvalues().iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    if margin <= margin_tol {
        return Err(Error::SpectrumTooCloseToAxis { margin, tol: margin_tol });
    }
    let k = linalg::reorder_schur(&mut s, |z| z.re < 0.0);
    let t11 = s.t.view((0, 0), (k, k)).into_owned();
    let t12 = s.t.view((0, k), (k, n - k)).into_owned();
    let t22 = s.t.view((k, k), (n - k, n - k)).into_owned();
    let x = linalg::triangular_sylvester(&t11, &t22, &-t12);
    let mut core = CMatrix::zeros(n, n);
    core.view_mut((0, 0), (k, k)).copy_from(&CMatrix::identity(k, k));
    core.view_mut((0, k), (k, n - k)).copy_from(&-x);
    Ok(&s.q * core * s.q.adjoint())
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Dunford projection by contour quadrature: `(2πi)⁻¹ ∮ (z − a)⁻¹ dz` over
/// the rectangle with right edge on the imaginary axis enclosing the stable
/// eigenvalues, using composite 16-point Gauss–Legendre panels no longer
/// than `margin/2`. Intended as a cross-check for small matrices.
pub fn dunford_projection_contour(a: &CMatrix, margin_tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    let eig = linalg::eigenvalues(a).ok_or(Error::EigenFailure)?;
    let margin = eig.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    if margin <= margin_tol {
        return Err(Error::SpectrumTooCloseToAxis { margin, tol: margin_tol });
    }
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1.0;
    let corners = [c64(0.0, -radius), c64(0.0, radius), c64(-radius, radius), c64(-radius, -radius)];
    let (nodes, weights) = gauss_legendre(16);
    let id = CMatrix::identity(n, n);
    let mut acc = CMatrix::zeros(n, n);
    for side in 0..4 {
        let (z0, z1) = (corners[side], corners[(side + 1) % 4]);
        let len = (z1 - z0).norm();
        let panels = (len / (0.5 * margin)).ceil().max(1.0) as usize;
        for j in 0..panels {
            let a0 = z0 + (z1 - z0) * (j as f64 / panels as f64);
            let a1 = z0 + (z1 - z0) * ((j + 1) as f64 / panels as f64);
            let half = (a1 - a0) * 0.5;
            for (x, w) in nodes.iter().zip(&weights) {
                let z = a0 + half * (1.0 + x);
                let res = (&id * z - a).lu().try_inverse().ok_or(Error::SpectrumHit { z })?;
                acc += res * (half * *w);
            }
        }
    }
    Ok(acc / c64(0.0, 2.0 * PI))
}

struct Envelope {
    rate: f64,
    constant: f64,
    defective: bool,
}

/// Decay rate and constant of `t ↦ E exp(tA)` on the stable part and of
/// `t ↦ E exp(−tA)` on the unstable part. `E` embeds `N(M₀)⊥` coordinates
/// into the state space, so `|x₀| ≤ |u₀|` turns the bound into one on `u`.
fn envelope(a: &CMatrix, e: &CMatrix, margin: f64, split: bool) -> Result<Envelope> {
    let r = a.nrows();
    if r == 0 {
        return Ok(Envelope { rate: f64::INFINITY, constant: 1.0, defective: false });
    }
    let s = linalg::schur(a).ok_or(Error::EigenFailure)?;
    let v = linalg::eigenvectors(&s);
    let kappa = linalg::condition_number(&v);
    if kappa <= DEFECTIVE_CONDITION {
        let lambda = s.eigenvalues();
        if !split {
            let vinv = linalg::inverse(&v).ok_or(Error::EigenFailure)?;
            let constant = linalg::norm2(&(e * &v)) * linalg::norm2(&vinv);
            return Ok(Envelope { rate: margin, constant, defective: false });
        }
        let mut constant = 0.0f64;
        for stable in [true, false] {
            let cols: Vec<_> = (0..r)
                .filter(|&j| (lambda[j].re < 0.0) == stable)
                .map(|j| v.column(j).into_owned())
                .collect();
            if cols.is_empty() {
                continue;
            }
            let vs = CMatrix::from_columns(&cols);
            constant = constant.max(linalg::norm2(&(e * &vs)) / linalg::sigma_min(&vs));
        }
        return Ok(Envelope { rate: margin, constant, defective: false });
    }
    if !split {
        return Ok(Envelope { rate: margin, constant: f64::INFINITY, defective: true });
    }
    let delta = 0.5 * margin;
    let mut constant = 0.0f64;
    for sign in [1.0, -1.0] {
        let mut sch = linalg::schur(&(a * c64(sign, 0.0))).ok_or(Error::EigenFailure)?;
        let k = linalg::reorder_schur(&mut sch, |z| z.re < 0.0);
        if k == 0 {
            continue;
        }
        let mut strict = sch.t.view((0, 0), (k, k)).into_owned();
        for i in 0..k {
            strict[(i, i)] = c64(0.0, 0.0);
        }
        constant = constant.max(van_loan_constant(linalg::norm2(&strict), delta, k));
    }
    Ok(Envelope { rate: delta, constant: constant * linalg::norm2(e), defective: true })
}

/// `|u(t)| ≤ constant · e^{rate·t}` for `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthBound {
    pub rate: f64,
    pub constant: f64,
}

impl GrowthBound {
    pub fn at(&self, t: f64) -> f64 {
        if self.constant == 0.0 {
            0.0
        } else {
            self.constant * (self.rate * t).exp()
        }
    }

    /// The bound for a trajectory started at `|u₀| = norm`.
    pub fn scaled(self, norm: f64) -> Self {
        Self { rate: self.rate, constant: self.constant * norm }
    }
}

/// Bound on `‖E exp(tA)‖`. With a well-conditioned eigenbasis `V` the rate
/// is the spectral abscissa `α` and the constant `‖EV‖‖V⁻¹‖`; otherwise the
/// rate is `α + slack` with the Schur-form constant.
pub fn growth_bound(a: &CMatrix, e: &CMatrix, slack: f64) -> Result<GrowthBound> {
    let r = a.nrows();
    if r == 0 {
        return Ok(GrowthBound { rate: f64::NEG_INFINITY, constant: 0.0 });
    }
    let s = linalg::schur(a).ok_or(Error::EigenFailure)?;
    let alpha = s.eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let v = linalg::eigenvectors(&s);
    if linalg::condition_number(&v) <= DEFECTIVE_CONDITION {
        let vinv = linalg::inverse(&v).ok_or(Error::EigenFailure)?;
        let constant = linalg::norm2(&(e * &v)) * linalg::norm2(&vinv);
        return Ok(GrowthBound { rate: alpha, constant });
    }
    if !(slack > 0.0) {
        return Err(Error::InvalidArgument("defective generator needs a positive rate slack".into()));
    }
    let mut strict = s.t.clone();
    for i in 0..r {
        strict[(i, i)] = c64(0.0, 0.0);
    }
    let constant = linalg::norm2(e) * van_loan_constant(linalg::norm2(&strict), slack, r);
    Ok(GrowthBound { rate: alpha + slack, constant })
}

/// `Σ_{k<m} sup_t e^{−δt}(νt)^k/k! = Σ_{k<m} (ν/δ)^k k^k e^{−k}/k!`, which bounds
/// `‖exp(tT)‖ e^{(μ−δ)t}` for triangular `T` with `max Re σ(T) ≤ −μ` and
/// strictly upper part of norm `ν`.
fn van_loan_constant(nu: f64, delta: f64, m: usize) -> f64 {
    let mut total = 1.0;
    let mut log_fact = 0.0;
    for k in 1..m {
        log_fact += (k as f64).ln();
        let kf = k as f64;
        if nu > 0.0 {
            total += (kf * (nu / delta).ln() + kf * kf.ln() - kf - log_fact).exp();
        }
    }
    total
}

/// The dichotomy splitting in the three coordinate systems.
#[derive(Clone, Debug)]
pub struct Split {
    /// `S`, `T` in `N(M₀)⊥` coordinates (mild dichotomy).
    pub s_mild: SubspaceBasis,
    pub t_mild: SubspaceBasis,
    /// `K⁻¹S`, `K⁻¹T` in IV coordinates (strong dichotomy).
    pub s_strong: SubspaceBasis,
    pub t_strong: SubspaceBasis,
    /// `S` and `T` as subspaces of IV inside the state space.
    pub s_state: SubspaceBasis,
    pub t_state: SubspaceBasis,
    /// `max(‖Ps − s‖, ‖Pt‖)` over the basis columns.
    pub direct_sum_residual: f64,
    /// Smallest singular value of `[S T]`; positive iff the sum is direct.
    pub direct_sum_sigma_min: f64,
    /// Largest distance of `M(z)⁻¹M₀ s` (resp. `t`) to `S` (resp. `T`) over
    /// the sampled `z` and basis columns.
    pub invariance_residual: f64,
}

pub const INVARIANCE_SAMPLES: usize = 20;

pub fn split_subspaces(report: &DichotomyReport, f: &BlockFactorization, iv: &IvSpace) -> Result<Split> {
    let (Some(p), Some(s), Some(t)) = (&report.projector_p, &report.s_basis, &report.t_basis) else {
        return Err(Error::NoDichotomy(report.verdict.as_str().to_owned()));
    };
    let r = f.rank();
    let k_inv = linalg::inverse(&iv.iso_k)
        .ok_or_else(|| Error::InternalInconsistency("K is singular".into()))?;
    let to_strong = |b: &SubspaceBasis, label: &str| -> Result<SubspaceBasis> {
        if b.dim() == 0 {
            return Ok(SubspaceBasis::zero(r, label));
        }
        SubspaceBasis::spanned_by(&(&k_inv * b.basis()), label)
    };
    let to_state = |b: &SubspaceBasis, label: &str| -> Result<SubspaceBasis> {
        if b.dim() == 0 {
            return Ok(SubspaceBasis::zero(f.n(), label));
        }
        SubspaceBasis::spanned_by(&(&iv.embedding * b.basis()), label)
    };
    let s_state = to_state(s, "S")?;
    let t_state = to_state(t, "T")?;

    let mut direct_sum_residual = 0.0f64;
    for j in 0..s.dim() {
        let col = s.basis().column(j).into_owned();
        direct_sum_residual = direct_sum_residual.max((p * &col - col).norm());
    }
    for j in 0..t.dim() {
        direct_sum_residual = direct_sum_residual.max((p * t.basis().column(j)).norm());
    }
    let mut both = CMatrix::zeros(r, s.dim() + t.dim());
    both.view_mut((0, 0), (r, s.dim())).copy_from(s.basis());
    both.view_mut((0, s.dim()), (r, t.dim())).copy_from(t.basis());
    let direct_sum_sigma_min = if both.ncols() != r {
        0.0
    } else if r == 0 {
        f64::INFINITY
    } else {
        linalg::sigma_min(&both)
    };

    let invariance_residual = invariance_residual(f, &[&s_state, &t_state])?;
    Ok(Split {
        s_strong: to_strong(s, "S")?,
        t_strong: to_strong(t, "T")?,
        s_mild: s.clone(),
        t_mild: t.clone(),
        s_state,
        t_state,
        direct_sum_residual,
        direct_sum_sigma_min,
        invariance_residual,
    })
}

/// Samples `z` on the circle of radius `2(max|σ(M)| + 1)` and measures how far
/// `M(z)⁻¹M₀` moves the basis columns of each subspace out of it.
pub fn invariance_residual(f: &BlockFactorization, spaces: &[&SubspaceBasis]) -> Result<f64> {
    let spec = f.spectrum()?;
    let radius = 2.0 * (spec.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1.0);
    let m0 = f.pencil.m0();
    let mut worst = 0.0f64;
    for k in 0..INVARIANCE_SAMPLES {
        let theta = 2.0 * PI * (k as f64 + 0.5) / INVARIANCE_SAMPLES as f64;
        let res = f.resolvent(Complex64::from_polar(radius, theta))?;
        let map = res * m0;
        for space in spaces {
            if space.dim() == 0 {
                continue;
            }
            let image = &map * space.basis();
            for col in image.column_iter() {
                worst = worst.max(space.distance(&col.into_owned()));
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `u₀ ∈ S`: forward decay.
    Stable,
    /// `u₀ ∈ T`: decay of the reversed pencil, i.e. forward growth.
    Unstable,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayCheck {
    /// Least-squares slope of `−log|u(t)|`; `None` for the zero trajectory.
    pub fitted_rate: Option<f64>,
    pub envelope_ok: bool,
    /// `max_t |u(t)| / (C e^{−ρt} |u₀|)`.
    pub worst_ratio: f64,
}

/// Simulates from `u0` (forward on `S`, reversed pencil on `T`) and checks
/// `|u(t)| ≤ 1.01·C·e^{−ρt}|u₀|` on a uniform grid over `[0, horizon]`.
pub fn verify_decay(
    p: &Pencil,
    report: &DichotomyReport,
    split: &Split,
    u0: &CVector,
    side: Side,
    horizon: f64,
    grid: usize,
) -> Result<DecayCheck> {
    let space = match side {
        Side::Stable => &split.s_state,
        Side::Unstable => &split.t_state,
    };
    let norm0 = u0.norm();
    if norm0 == 0.0 {
        return Ok(DecayCheck { fitted_rate: None, envelope_ok: true, worst_ratio: 0.0 });
    }
    if space.distance(u0) > 1e-8 * norm0 {
        return Err(Error::InvalidArgument(format!("initial value is not in {}", space.label())));
    }
    let pencil = match side {
        Side::Stable => p.clone(),
        Side::Unstable => p.reversed(),
    };
    let f = block_factorize(&pencil, DEFAULT_REGULARITY_TOL)?;
    let iv = compute_iv(&f)?;
    let times = uniform_grid(horizon, grid)?;
    let traj = solve_mild(&f, &iv, u0, &times)?;
    let (rho, c) = (report.decay_rate, report.nonnormality_constant);
    let mut worst_ratio = 0.0f64;
    let mut fit = Vec::new();
    for (t, u) in traj.times.iter().zip(&traj.states) {
        let bound = c * (-rho * t).exp() * norm0;
        let nu = u.norm();
        worst_ratio = worst_ratio.max(if bound > 0.0 { nu / bound } else if nu > 0.0 { f64::INFINITY } else { 0.0 });
        if nu > 0.0 {
            fit.push((*t, -nu.ln()));
        }
    }
    let fitted_rate = (fit.len() >= 2).then(|| {
        let m = fit.len() as f64;
        let (st, sy) = fit.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
        let (mt, my) = (st / m, sy / m);
        let (num, den) = fit.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt).powi(2)));
        num / den
    });
    Ok(DecayCheck { fitted_rate, envelope_ok: worst_ratio <= 1.01, worst_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, real_matrix, real_vector};
    use crate::pencil::generate_regular;

    fn diag_pencil() -> Pencil {
        Pencil::new(CMatrix::identity(2, 2), real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap()
    }

    #[test]
    fn verdict_examples() {
        let r = classify(&diag_pencil(), None).unwrap();
        assert_eq!(r.verdict, Verdict::Dichotomy);
        assert!((r.margin - 1.0).abs() < 1e-14);
        let s = r.s_basis.as_ref().unwrap();
        let t = r.t_basis.as_ref().unwrap();
        assert_eq!((s.dim(), t.dim()), (1, 1));

        let ex = Pencil::new(
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            real_matrix(&[&[3.0, 1.0], &[2.0, 1.0]]),
        )
        .unwrap();
        assert_eq!(classify(&ex, None).unwrap().verdict, Verdict::ExponentiallyStable);

        let rot = Pencil::new(real_matrix(&[&[1.0]]), CMatrix::from_element(1, 1, c64(0.0, -2.0))).unwrap();
        let r = classify(&rot, None).unwrap();
        assert_eq!(r.verdict, Verdict::Marginal);
        assert!(r.projector_p.is_none());
    }

    #[test]
    fn verdict_rule() {
        let v = |e: &[(f64, f64)]| {
            let z: Vec<_> = e.iter().map(|&(a, b)| c64(a, b)).collect();
            verdict_from_spectrum(&z, 1e-8)
        };
        assert_eq!(v(&[]), Verdict::ExponentiallyStable);
        assert_eq!(v(&[(-1.0, 0.0), (-0.5, 3.0)]), Verdict::ExponentiallyStable);
        assert_eq!(v(&[(-1.0, 0.0), (2.0, 0.0)]), Verdict::Dichotomy);
        assert_eq!(v(&[(1.0, 0.0)]), Verdict::Dichotomy);
        assert_eq!(v(&[(-1.0, 0.0), (0.0, 1.0)]), Verdict::Marginal);
        assert_eq!(v(&[(1.0, 0.0), (1e-10, 1.0)]), Verdict::UnstableNoDichotomy);
    }

    #[test]
    fn dunford_examples() {
        let p = dunford_projection(&real_matrix(&[&[-1.0, 0.0], &[0.0, 2.0]]), 1e-8).unwrap();
        assert!(norm2(&(p - real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]))) < 1e-14);
        let a = real_matrix(&[&[-1.0, 5.0], &[0.0, 2.0]]);
        let p = dunford_projection(&a, 1e-8).unwrap();
        assert!(norm2(&(&p - real_matrix(&[&[1.0, -5.0 / 3.0], &[0.0, 0.0]]))) < 1e-14);
        assert!(norm2(&(&p * &p - &p)) < 1e-14);
        assert!(norm2(&(&p * &a - &a * &p)) < 1e-13);
        let q = dunford_projection_contour(&a, 1e-8).unwrap();
        assert!(norm2(&(q - p)) < 1e-10);
        assert!(matches!(
            dunford_projection(&real_matrix(&[&[0.0, 1.0], &[-1.0, 0.0]]), 1e-8),
            Err(Error::SpectrumTooCloseToAxis { .. })
        ));
    }

    #[test]
    fn dunford_rank_from_hint() {
        let hint = [c64(-1.0, 1.0), c64(-1.0, -1.0), c64(0.5, 0.0)];
        let p = generate_regular(5, 3, 2, Some(&hint)).unwrap();
        let r = classify(&p, None).unwrap();
        assert_eq!(r.verdict, Verdict::Dichotomy);
        assert_eq!(r.dim_s(), Some(2));
        assert_eq!(r.dim_t(), Some(1));
        let proj = r.projector_p.unwrap();
        let tr: Complex64 = (0..3).map(|i| proj[(i, i)]).sum();
        assert!((tr - c64(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((integral - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn splits() {
        let p = diag_pencil();
        let f = block_factorize(&p, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        let sp = split_subspaces(&r, &f, &iv).unwrap();
        assert!(sp.direct_sum_residual < 1e-14);
        assert!(sp.invariance_residual < 1e-14);
        assert!(sp.s_state.distance(&real_vector(&[1.0, 0.0])) < 1e-14);
        assert!(sp.t_state.distance(&real_vector(&[0.0, 1.0])) < 1e-14);

        let hint = [c64(-2.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0)];
        let p = generate_regular(4, 4, 5, Some(&hint)).unwrap();
        let f = block_factorize(&p, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        let sp = split_subspaces(&r, &f, &iv).unwrap();
        assert_eq!((sp.s_mild.dim(), sp.t_mild.dim()), (2, 2));
        assert!(sp.direct_sum_residual < 1e-10, "{}", sp.direct_sum_residual);
        assert!(sp.direct_sum_sigma_min > 1e-3);
        assert!(sp.invariance_residual < 1e-9);

        let ex = Pencil::new(
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            real_matrix(&[&[3.0, 1.0], &[2.0, 1.0]]),
        )
        .unwrap();
        let f = block_factorize(&ex, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        let sp = split_subspaces(&r, &f, &iv).unwrap();
        assert_eq!((sp.s_mild.dim(), sp.t_mild.dim()), (1, 0));

        let rot = Pencil::new(real_matrix(&[&[1.0]]), CMatrix::from_element(1, 1, c64(0.0, -2.0))).unwrap();
        let f = block_factorize(&rot, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        assert!(matches!(split_subspaces(&r, &f, &iv), Err(Error::NoDichotomy(_))));
    }

    #[test]
    fn decay_examples() {
        let scalar = Pencil::new(real_matrix(&[&[1.0]]), real_matrix(&[&[1.0]])).unwrap();
        let f = block_factorize(&scalar, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        let sp = split_subspaces(&r, &f, &iv).unwrap();
        let d = verify_decay(&scalar, &r, &sp, &real_vector(&[1.0]), Side::Stable, 10.0, 101).unwrap();
        assert!(d.envelope_ok);
        assert!((d.fitted_rate.unwrap() - 1.0).abs() < 1e-10);
        let d = verify_decay(&scalar, &r, &sp, &real_vector(&[0.0]), Side::Stable, 10.0, 101).unwrap();
        assert!(d.envelope_ok && d.fitted_rate.is_none());

        let p = diag_pencil();
        let f = block_factorize(&p, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        let sp = split_subspaces(&r, &f, &iv).unwrap();
        let d = verify_decay(&p, &r, &sp, &real_vector(&[0.0, 1.0]), Side::Unstable, 10.0, 101).unwrap();
        assert!(d.envelope_ok);
        assert!((d.fitted_rate.unwrap() - 1.0).abs() < 1e-10);
        assert!(verify_decay(&p, &r, &sp, &real_vector(&[0.0, 1.0]), Side::Stable, 10.0, 11).is_err());
    }

    #[test]
    fn defective_envelope() {
        // A = [[-1, 1], [0, -1]] is a Jordan block
        let p = Pencil::new(CMatrix::identity(2, 2), real_matrix(&[&[1.0, -1.0], &[0.0, 1.0]])).unwrap();
        let f = block_factorize(&p, 1e-10).unwrap();
        let iv = compute_iv(&f).unwrap();
        let r = classify_factorized(&f, &iv, None).unwrap();
        assert!(r.defective_fallback);
        assert!((r.decay_rate - 0.5).abs() < 1e-12);
        let sp = split_subspaces(&r, &f, &iv).unwrap();
        for u0 in [real_vector(&[0.0, 1.0]), real_vector(&[1.0, 1.0])] {
            let d = verify_decay(&p, &r, &sp, &u0, Side::Stable, 20.0, 401).unwrap();
            assert!(d.envelope_ok, "{d:?}");
        }
    }
}
