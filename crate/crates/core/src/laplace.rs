//! Weighted `L₂` norms and the Fourier–Laplace check of mild solutions.
//!
//! For `ρ > max(s₀, 0)` the mild solution satisfies
//!
//! ```text
//! (L_ρ u)(ω) = (2π)^{-1/2} ∫₀^∞ e^{−(iω+ρ)s} u(s) ds = (2π)^{-1/2} M(iω+ρ)⁻¹ M₀ u₀.
//! ```
//!
//! The left side is computed by quadrature of the time-domain trajectory up
//! to a horizon `T` where the exponential tail is provably below the
//! quadrature tolerance, and compared with the resolvent on the right.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{growth_bound, GrowthBound};
use crate::consistent_iv::{compute_iv, IvSpace};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, CVector};
use crate::pencil::{block_factorize, BlockFactorization, Pencil, DEFAULT_REGULARITY_TOL};
use crate::quadrature::{adaptive_simpson, adaptive_simpson_real};
use crate::solvers::MildSolver;

/// Largest integration horizon the checks will use.
pub const MAX_TRUNCATION: f64 = 5000.0;

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

pub const DEFAULT_FREQUENCIES: [f64; 5] = [-10.0, -1.0, 0.0, 1.0, 10.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceConfig {
    pub rho: f64,
    /// Integration horizon; chosen from the tail bound when `None`.
    pub truncation_t: Option<f64>,
    pub frequencies: Vec<f64>,
    pub quad_tol: f64,
}

impl LaplaceConfig {
    /// `ρ = max(0, s₀) + 1` with the default frequencies.
    pub fn for_abscissa(s0: f64) -> Self {
        Self {
            rho: default_rho(s0),
            truncation_t: None,
            frequencies: DEFAULT_FREQUENCIES.to_vec(),
            quad_tol: DEFAULT_QUAD_TOL,
        }
    }
}

pub fn default_rho(s0: f64) -> f64 {
    s0.max(0.0) + 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceCheckReport {
    pub rho: f64,
    pub rho_prime: f64,
    pub truncation_t: f64,
    pub frequencies: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub residuals_rho_prime: Vec<f64>,
    /// Largest residual of the same trajectory checked at `ρ′ = ρ + 1`.
    pub rho_pair_discrepancy: f64,
}

/// `(∫₀^∞ |u(t)|² e^{−2ρt} dt)^{1/2}`.
///
/// `envelope` must bound `|u(t)|`; the integral is truncated at the first
/// horizon (at most `truncation_t`) where the envelope's tail contribution
/// drops below `tol`, and refused if it never does.
pub fn weighted_l2_norm<F>(mut u: F, rho: f64, truncation_t: f64, envelope: GrowthBound, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<CVector>,
{
    if !(truncation_t > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation {truncation_t} must be positive")));
    }
    let horizon = if envelope.constant == 0.0 {
        truncation_t.min(1.0)
    } else {
        if !(rho > envelope.rate) {
            return Err(Error::RhoTooSmall { rho, bound: envelope.rate });
        }
        let gap = rho - envelope.rate;
        // tail: C² e^{−2 gap T} / (2 gap) < tol
        let needed = ((envelope.constant.powi(2) / (2.0 * gap * tol)).ln() / (2.0 * gap)).max(1.0);
        if needed > truncation_t {
            let tail = envelope.constant.powi(2) * (-2.0 * gap * truncation_t).exp() / (2.0 * gap);
            return Err(Error::NonConvergent(format!(
                "tail bound {tail:.3e} at truncation {truncation_t} exceeds {tol:.3e}"
            )));
        }
        needed
    };
    let (value, _) = adaptive_simpson_real(|t| Ok(u(t)?.norm_squared() * (-2.0 * rho * t).exp()), 0.0, horizon, tol)?;
    Ok(value.max(0.0).sqrt())
}

/// Horizon `T` with `C e^{(α−ρ)T} / (ρ − α) < tol` for the envelope `C e^{αt}`.
pub fn truncation_horizon(envelope: GrowthBound, rho: f64, tol: f64) -> Result<f64> {
    if envelope.constant == 0.0 {
        return Ok(1.0);
    }
    let gap = rho - envelope.rate;
    if !(gap > 0.0) {
        return Err(Error::RhoTooSmall { rho, bound: envelope.rate });
    }
    let t = ((envelope.constant / (gap * tol)).ln() / gap).max(1.0);
    if t > MAX_TRUNCATION {
        return Err(Error::NonConvergent(format!("tail needs horizon {t:.3e} > {MAX_TRUNCATION}")));
    }
    Ok(t)
}

fn residuals_at(
    f: &BlockFactorization,
    solver: &MildSolver,
    u0: &CVector,
    rho: f64,
    horizon: f64,
    frequencies: &[f64],
    quad_tol: f64,
) -> Result<Vec<f64>> {
    let n = f.n();
    let nf = frequencies.len();
    if nf == 0 {
        return Ok(Vec::new());
    }
    let zs: Vec<Complex64> = frequencies.iter().map(|&w| c64(rho, w)).collect();
    let integrand = |s: f64| -> Result<CMatrix> {
        let u = solver.state_at(s, u0)?;
        let mut m = CMatrix::zeros(n, nf);
        for (k, z) in zs.iter().enumerate() {
            m.set_column(k, &(&u * (-z * s).exp()));
        }
        Ok(m)
    };
    let scale = 1.0 / (2.0 * PI).sqrt();
    let q = adaptive_simpson(integrand, 0.0, horizon, quad_tol)?;
    let m0u0 = f.pencil.m0() * u0;
    zs.iter()
        .enumerate()
        .map(|(k, &z)| {
            let exact = f.resolvent(z)? * &m0u0;
            Ok(((q.value.column(k) - exact) * c64(scale, 0.0)).norm())
        })
        .collect()
}

pub fn transform_residual(p: &Pencil, u0: &CVector, cfg: &LaplaceConfig) -> Result<LaplaceCheckReport> {
    let f = block_factorize(p, DEFAULT_REGULARITY_TOL)?;
    let iv = compute_iv(&f)?;
    transform_residual_with(&f, &iv, u0, cfg)
}

pub fn transform_residual_with(
    f: &BlockFactorization,
    iv: &IvSpace,
    u0: &CVector,
    cfg: &LaplaceConfig,
) -> Result<LaplaceCheckReport> {
    if u0.len() != f.n() {
        return Err(Error::DimensionMismatch(format!("initial value has length {}, expected {}", u0.len(), f.n())));
    }
    if !(cfg.quad_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance {} must be positive", cfg.quad_tol)));
    }
    let s0 = f.spectrum()?.s0;
    let bound = s0.max(0.0);
    if !(cfg.rho > bound) {
        return Err(Error::RhoTooSmall { rho: cfg.rho, bound });
    }
    let rho_prime = cfg.rho + 1.0;
    // only used when the eigenbasis is too ill-conditioned for rate = s₀
    let slack = if s0.is_finite() { (0.5 * (cfg.rho - s0)).min(1.0) } else { 1.0 };
    let envelope = growth_bound(&f.reduced_generator_a, &iv.embedding, slack)?.scaled(u0.norm());
    let horizon = match cfg.truncation_t {
        Some(t) => t,
        None => truncation_horizon(envelope, cfg.rho, 0.1 * cfg.quad_tol)?,
    };
    let solver = MildSolver::new(f, iv)?;
    let residuals = residuals_at(f, &solver, u0, cfg.rho, horizon, &cfg.frequencies, cfg.quad_tol)?;
    let residuals_rho_prime = residuals_at(f, &solver, u0, rho_prime, horizon, &cfg.frequencies, cfg.quad_tol)?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(LaplaceCheckReport {
        rho: cfg.rho,
        rho_prime,
        truncation_t: horizon,
        frequencies: cfg.frequencies.clone(),
        max_residual: max(&residuals),
        rho_pair_discrepancy: max(&residuals_rho_prime),
        residuals,
        residuals_rho_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{real_matrix, real_vector};

    fn scalar_fn(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<CVector> {
        move |t| Ok(real_vector(&[f(t)]))
    }

    #[test]
    fn weighted_norm_examples() {
        let env = GrowthBound { rate: -1.0, constant: 1.0 };
        let v = weighted_l2_norm(scalar_fn(|t| (-t).exp()), 1.0, 100.0, env, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        let zero = GrowthBound { rate: 0.0, constant: 0.0 };
        assert_eq!(weighted_l2_norm(scalar_fn(|_| 0.0), 1.0, 100.0, zero, 1e-12).unwrap(), 0.0);
        let one = GrowthBound { rate: 0.0, constant: 1.0 };
        let v = weighted_l2_norm(scalar_fn(|_| 1.0), 1.0, 100.0, one, 1e-12).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn weighted_norm_refusals() {
        let one = GrowthBound { rate: 0.0, constant: 1.0 };
        assert!(matches!(
            weighted_l2_norm(scalar_fn(|_| 1.0), 1.0, 2.0, one, 1e-12),
            Err(Error::NonConvergent(_))
        ));
        assert!(matches!(
            weighted_l2_norm(scalar_fn(|_| 1.0), 0.0, 100.0, one, 1e-12),
            Err(Error::RhoTooSmall { .. })
        ));
    }

    #[test]
    fn weighted_norm_decreases_in_rho() {
        let env = GrowthBound { rate: 0.5, constant: 2.0 };
        let u = |t: f64| 2.0 * (0.5 * t).exp() * (3.0 * t).cos().abs();
        let mut last = f64::INFINITY;
        for rho in [1.0, 1.5, 2.0, 4.0] {
            let v = weighted_l2_norm(scalar_fn(u), rho, 500.0, env, 1e-10).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn scalar_transform() {
        let p = Pencil::new(real_matrix(&[&[1.0]]), real_matrix(&[&[1.0]])).unwrap();
        let cfg = LaplaceConfig { rho: 1.0, truncation_t: None, frequencies: vec![0.0], quad_tol: 1e-10 };
        let r = transform_residual(&p, &real_vector(&[1.0]), &cfg).unwrap();
        assert!(r.max_residual < 1e-10, "{r:?}");
        assert!(r.rho_pair_discrepancy < 1e-10);
    }

    #[test]
    fn example_transform() {
        let p = Pencil::new(
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            real_matrix(&[&[3.0, 1.0], &[2.0, 1.0]]),
        )
        .unwrap();
        let cfg = LaplaceConfig { rho: 1.0, truncation_t: None, frequencies: vec![0.0, 1.0, 5.0], quad_tol: 1e-9 };
        let r = transform_residual(&p, &real_vector(&[1.0, 0.0]), &cfg).unwrap();
        assert!(r.residuals.iter().all(|&x| x <= 1e-6), "{r:?}");
        let r = transform_residual(&p, &real_vector(&[0.0, 1.0]), &cfg).unwrap();
        assert!(r.max_residual == 0.0);
        let low = LaplaceConfig { rho: 0.0, ..cfg };
        assert!(matches!(
            transform_residual(&p, &real_vector(&[1.0, 0.0]), &low),
            Err(Error::RhoTooSmall { .. })
        ));
    }

    #[test]
    fn unstable_pencil_needs_larger_rho() {
        let p = Pencil::new(CMatrix::identity(2, 2), real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap();
        let u0 = real_vector(&[0.6, 0.8]);
        let bad = LaplaceConfig { rho: 1.0, ..LaplaceConfig::for_abscissa(1.0) };
        assert!(matches!(transform_residual(&p, &u0, &bad), Err(Error::RhoTooSmall { .. })));
        let cfg = LaplaceConfig::for_abscissa(1.0);
        let r = transform_residual(&p, &u0, &cfg).unwrap();
        assert!(r.max_residual < 1e-6 && r.rho_pair_discrepancy < 1e-6, "{r:?}");
    }
}
