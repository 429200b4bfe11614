//! Strong and mild solutions of `M₀u′ + M₁u = 0`.
//!
//! Strong solutions start in IV and evolve by `exp(−tG)` in IV coordinates.
//! Mild solutions accept any `u₀`: the `N(M₀)⊥` component evolves by
//! `x′ = Ax` and the `N(M₀)` component is slaved to it through the IV graph,
//! `y = −B⁻¹Cx`. For `t > 0` the mild solution therefore lies in IV, and it
//! generally jumps at `t = 0`; only `M₀u(0⁺) = M₀u₀` is guaranteed.

mod expm;

pub use expm::{expm, ExpmResult, Propagator, EIGEN_PATH_MAX_CONDITION};

use serde::Serialize;

use crate::consistent_iv::{compute_iv, iv_membership, IvSpace};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::pencil::{block_factorize, BlockFactorization, Pencil, DEFAULT_REGULARITY_TOL};
use crate::quadrature::adaptive_simpson;

/// Relative distance to IV tolerated for strong initial values.
pub const STRONG_IV_TOL: f64 = 1e-9;

/// Internal error target of the integrated-identity quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Strong,
    Mild,
}

/// The given initial value and the right limit `u(0⁺)` of a mild solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub u0_given: CVector,
    pub u0_plus: CVector,
}

impl Jump {
    pub fn size(&self) -> f64 {
        (&self.u0_plus - &self.u0_given).norm()
    }
}

/// Samples of a solution on a time grid.
///
/// For mild solutions `states[0]` is the given `u₀`; the continuous
/// representative for `t > 0` extends to `jump.u0_plus` at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub kind: SolutionKind,
    pub jump: Option<Jump>,
}

impl Trajectory {
    pub fn max_norm(&self) -> f64 {
        self.states.iter().map(|u| u.norm()).fold(0.0, f64::max)
    }

    /// `max_k ‖self.states[k] − other.states[k]‖` over matching grids.
    pub fn distance(&self, other: &Trajectory) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::DimensionMismatch("trajectories use different time grids".into()));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `points` equally spaced times from `0` to `t_max`.
pub fn uniform_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs t_max > 0 and at least 2 points (got {t_max}, {points})"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|k| if k + 1 == points { t_max } else { t_max * k as f64 / last }).collect())
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.first() {
        Some(&0.0) => {}
        _ => return Err(Error::InvalidArgument("time grid must start at 0".into())),
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn check_len(u0: &CVector, n: usize) -> Result<()> {
    if u0.len() != n {
        return Err(Error::DimensionMismatch(format!("initial value has length {}, expected {n}", u0.len())));
    }
    if u0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("initial value"));
    }
    Ok(())
}

/// `u(t) = ι_IV exp(−tG) ι*_IV u₀`.
#[derive(Clone, Debug)]
pub struct StrongSolver {
    basis: CMatrix,
    generator_g: CMatrix,
    propagator: Propagator,
}

impl StrongSolver {
    pub fn new(iv: &IvSpace) -> Result<Self> {
        Ok(Self {
            basis: iv.basis.basis().clone(),
            generator_g: iv.generator_g.clone(),
            propagator: Propagator::new(&-&iv.generator_g)?,
        })
    }

    pub fn state_at(&self, t: f64, u0: &CVector) -> Result<CVector> {
        Ok(&self.basis * (self.propagator.at(t)? * (self.basis.adjoint() * u0)))
    }

    /// `u′ = −ι_IV G ι*_IV u` for `u ∈ IV`.
    pub fn derivative(&self, u: &CVector) -> CVector {
        -(&self.basis * (&self.generator_g * (self.basis.adjoint() * u)))
    }
}

pub fn solve_strong(iv: &IvSpace, u0: &CVector, times: &[f64]) -> Result<Trajectory> {
    check_len(u0, iv.ambient_dim())?;
    check_times(times)?;
    if !iv_membership(iv, u0, STRONG_IV_TOL)? {
        let projection = iv.project(u0);
        return Err(Error::InconsistentInitialValue {
            distance: (u0 - &projection).norm(),
            projection: projection.iter().copied().collect(),
        });
    }
    let solver = StrongSolver::new(iv)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(u0.clone());
    for &t in &times[1..] {
        states.push(solver.state_at(t, u0)?);
    }
    Ok(Trajectory { times: times.to_vec(), states, kind: SolutionKind::Strong, jump: None })
}

/// The continuous representative of the mild solution,
/// `u(t) = (ι_{N⊥} + ι_N·coupling) exp(tA) ι*_{N⊥} u₀` for `t ≥ 0`.
#[derive(Clone, Debug)]
pub struct MildSolver {
    embedding: CMatrix,
    conull_adjoint: CMatrix,
    propagator: Propagator,
}

impl MildSolver {
    pub fn new(f: &BlockFactorization, iv: &IvSpace) -> Result<Self> {
        Ok(Self {
            embedding: iv.embedding.clone(),
            conull_adjoint: iv.conull_adjoint.clone(),
            propagator: Propagator::new(&f.reduced_generator_a)?,
        })
    }

    pub fn n(&self) -> usize {
        self.embedding.nrows()
    }

    /// `u(t)` for every column of `u0s`; at `t = 0` this is `u(0⁺)`.
    pub fn evolve(&self, t: f64, u0s: &CMatrix) -> Result<CMatrix> {
        Ok(&self.embedding * (self.propagator.at(t)? * (&self.conull_adjoint * u0s)))
    }

    pub fn state_at(&self, t: f64, u0: &CVector) -> Result<CVector> {
        Ok(&self.embedding * (self.propagator.at(t)? * (&self.conull_adjoint * u0)))
    }

    pub fn right_limit(&self, u0: &CVector) -> CVector {
        &self.embedding * (&self.conull_adjoint * u0)
    }
}

pub fn solve_mild(f: &BlockFactorization, iv: &IvSpace, u0: &CVector, times: &[f64]) -> Result<Trajectory> {
    check_len(u0, f.n())?;
    check_times(times)?;
    let solver = MildSolver::new(f, iv)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(u0.clone());
    for &t in &times[1..] {
        states.push(solver.state_at(t, u0)?);
    }
    let jump = Jump { u0_given: u0.clone(), u0_plus: solver.right_limit(u0) };
    Ok(Trajectory { times: times.to_vec(), states, kind: SolutionKind::Mild, jump: Some(jump) })
}

/// Mild solution of the reversed pencil `(M₀, −M₁)`, i.e. `M₀w′ − M₁w = 0`.
/// `f` and `iv` must belong to the reversed pencil.
pub fn solve_backward(f: &BlockFactorization, iv: &IvSpace, w0: &CVector, times: &[f64]) -> Result<Trajectory> {
    solve_mild(f, iv, w0, times)
}

/// Runs `u` forward on `[0, T]`, then the reversed pencil from `u(T)`, and
/// returns `max ‖w(t) − u(T − t)‖` over the interior grid points.
pub fn duality_check(p: &Pencil, u0: &CVector, big_t: f64, grid: usize) -> Result<f64> {
    let f = block_factorize(p, DEFAULT_REGULARITY_TOL)?;
    let iv = compute_iv(&f)?;
    let rf = block_factorize(&p.reversed(), DEFAULT_REGULARITY_TOL)?;
    let riv = compute_iv(&rf)?;
    duality_check_with(&f, &iv, &rf, &riv, u0, big_t, grid)
}

pub fn duality_check_with(
    f: &BlockFactorization,
    iv: &IvSpace,
    rf: &BlockFactorization,
    riv: &IvSpace,
    u0: &CVector,
    big_t: f64,
    grid: usize,
) -> Result<f64> {
    let times = uniform_grid(big_t, grid)?;
    let u = solve_mild(f, iv, u0, &times)?;
    let w = solve_backward(rf, riv, &u.states[grid - 1], &times)?;
    Ok((1..grid - 1)
        .map(|k| (&w.states[k] - &u.states[grid - 1 - k]).norm())
        .fold(0.0, f64::max))
}

/// Largest `‖M₀u′(t) + M₁u(t)‖ / (‖M₁‖·‖u(t)‖)` over a strong trajectory.
pub fn strong_residual(p: &Pencil, iv: &IvSpace, traj: &Trajectory) -> Result<f64> {
    let solver = StrongSolver::new(iv)?;
    let m1n = linalg::norm2(p.m1());
    Ok(traj
        .states
        .iter()
        .map(|u| {
            let scale = m1n * u.norm();
            if scale == 0.0 {
                return 0.0;
            }
            (p.m0() * solver.derivative(u) + p.m1() * u).norm() / scale
        })
        .fold(0.0, f64::max))
}

/// For each column `u₀` of `u0s`, the largest
/// `‖M₀u(t) + ∫₀ᵗ M₁u(s) ds − M₀u₀‖` over the grid, with the integral
/// accumulated interval by interval by adaptive Simpson with total error
/// target `quad_tol`.
pub fn integrated_identity_residuals(
    p: &Pencil,
    solver: &MildSolver,
    u0s: &CMatrix,
    times: &[f64],
    quad_tol: f64,
) -> Result<Vec<f64>> {
    check_times(times)?;
    let m = u0s.ncols();
    let t_end = *times.last().expect("non-empty grid");
    let target = p.m0() * u0s;
    let mut integral = CMatrix::zeros(p.n(), m);
    let mut worst = vec![0.0f64; m];
    let record = |t: f64, integral: &CMatrix, worst: &mut Vec<f64>| -> Result<()> {
        let lhs = p.m0() * solver.evolve(t, u0s)? + integral - &target;
        for (j, w) in worst.iter_mut().enumerate() {
            *w = w.max(lhs.column(j).norm());
        }
        Ok(())
    };
    // at t = 0 only the attainment M₀u(0⁺) = M₀u₀ is tested
    record(0.0, &integral, &mut worst)?;
    for win in times.windows(2) {
        let (a, b) = (win[0], win[1]);
        let tol = quad_tol * (b - a) / t_end;
        let q = adaptive_simpson(|s| Ok(p.m1() * solver.evolve(s, u0s)?), a, b, tol)?;
        integral += q.value;
        record(b, &integral, &mut worst)?;
    }
    Ok(worst)
}

/// Largest relative distance of the states of `traj` (after `t = 0` for
/// mild ones) to IV.
pub fn iv_invariance_residual(iv: &IvSpace, traj: &Trajectory) -> f64 {
    let skip = usize::from(traj.kind == SolutionKind::Mild);
    traj.states
        .iter()
        .skip(skip)
        .filter(|u| u.norm() > 0.0)
        .map(|u| iv.basis.distance(u) / u.norm())
        .fold(0.0, f64::max)
}

/// `‖ι*_{R⊥}M₁u(t)‖ / (‖M₁‖·‖u(t)‖)` over the grid times `t > 0` of a mild trajectory.
pub fn mild_constraint_residual(iv: &IvSpace, traj: &Trajectory) -> f64 {
    traj.states
        .iter()
        .skip(1)
        .filter(|u| u.norm() > 0.0)
        .map(|u| iv.constraint_residual(u) / (iv.m1_norm().max(f64::MIN_POSITIVE) * u.norm()))
        .fold(0.0, f64::max)
}

/// `‖M₀u(0⁺) − M₀u₀‖` for a mild trajectory.
pub fn attainment_residual(p: &Pencil, traj: &Trajectory) -> f64 {
    match &traj.jump {
        Some(j) => (p.m0() * (&j.u0_plus - &j.u0_given)).norm(),
        None => 0.0,
    }
}

/// Largest `‖exp(−(s+t)G) − exp(−sG)exp(−tG)‖` relative to `‖exp(−(s+t)G)‖`
/// over the given pairs.
pub fn semigroup_residual(iv: &IvSpace, pairs: &[(f64, f64)]) -> Result<f64> {
    let g = -&iv.generator_g;
    let mut worst = 0.0f64;
    for &(s, t) in pairs {
        let whole = expm(&g, s + t)?.value;
        let split = expm(&g, s)?.value * expm(&g, t)?.value;
        let scale = linalg::norm2(&whole).max(f64::MIN_POSITIVE);
        worst = worst.max(linalg::norm2(&(whole - split)) / scale);
    }
    Ok(worst)
}

/// A vector as a one-column matrix.
pub fn column(u: &CVector) -> CMatrix {
    CMatrix::from_column_slice(u.len(), 1, u.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::linalg::{real_matrix, real_vector};
    use crate::pencil::generate_regular;

    fn example() -> Pencil {
        Pencil::new(
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            real_matrix(&[&[3.0, 1.0], &[2.0, 1.0]]),
        )
        .unwrap()
    }

    fn setup(p: &Pencil) -> (BlockFactorization, IvSpace) {
        let f = block_factorize(p, DEFAULT_REGULARITY_TOL).unwrap();
        let iv = compute_iv(&f).unwrap();
        (f, iv)
    }

    #[test]
    fn strong_scalar() {
        let p = Pencil::new(real_matrix(&[&[1.0]]), real_matrix(&[&[1.0]])).unwrap();
        let (_, iv) = setup(&p);
        let times = uniform_grid(3.0, 31).unwrap();
        let tr = solve_strong(&iv, &real_vector(&[1.0]), &times).unwrap();
        for (t, u) in tr.times.iter().zip(&tr.states) {
            assert!((u[0] - c64((-t).exp(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn strong_example() {
        let p = example();
        let (_, iv) = setup(&p);
        let times = uniform_grid(5.0, 11).unwrap();
        let tr = solve_strong(&iv, &real_vector(&[1.0, -2.0]), &times).unwrap();
        for (t, u) in tr.times.iter().zip(&tr.states) {
            let e = (-t).exp();
            assert!((u - real_vector(&[e, -2.0 * e])).norm() < 1e-14);
        }
        assert!(strong_residual(&p, &iv, &tr).unwrap() < 1e-14);
        assert!(iv_invariance_residual(&iv, &tr) < 1e-14);
        let e = solve_strong(&iv, &real_vector(&[1.0, 0.0]), &times).unwrap_err();
        match e {
            Error::InconsistentInitialValue { distance, projection } => {
                assert!((distance - 2.0 / 5f64.sqrt()).abs() < 1e-14);
                assert!((projection[0] - c64(0.2, 0.0)).norm() < 1e-14);
                assert!((projection[1] - c64(-0.4, 0.0)).norm() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mild_example() {
        let p = example();
        let (f, iv) = setup(&p);
        let times = uniform_grid(5.0, 101).unwrap();
        let u0 = real_vector(&[1.0, 0.0]);
        let tr = solve_mild(&f, &iv, &u0, &times).unwrap();
        assert_eq!(tr.states[0], u0);
        let jump = tr.jump.as_ref().unwrap();
        assert!((&jump.u0_plus - real_vector(&[1.0, -2.0])).norm() < 1e-14);
        for (t, u) in tr.times.iter().zip(&tr.states).skip(1) {
            let e = (-t).exp();
            assert!((u - real_vector(&[e, -2.0 * e])).norm() < 1e-14);
        }
        assert!(attainment_residual(&p, &tr) < 1e-15);
        assert!(mild_constraint_residual(&iv, &tr) < 1e-14);
        let solver = MildSolver::new(&f, &iv).unwrap();
        let r = integrated_identity_residuals(&p, &solver, &column(&u0), &times, 1e-9).unwrap();
        assert!(r[0] < 1e-9);
    }

    #[test]
    fn mild_null_space_is_zero() {
        let p = example();
        let (f, iv) = setup(&p);
        let times = uniform_grid(2.0, 5).unwrap();
        let tr = solve_mild(&f, &iv, &real_vector(&[0.0, 1.0]), &times).unwrap();
        assert!(tr.states.iter().skip(1).all(|u| u.norm() == 0.0));
    }

    #[test]
    fn mild_matches_strong_on_iv() {
        for seed in 0..10 {
            let p = generate_regular(5, 3, seed, None).unwrap();
            let (f, iv) = setup(&p);
            let times = uniform_grid(5.0, 50).unwrap();
            for j in 0..3 {
                let u0 = iv.basis.basis().column(j).into_owned();
                let s = solve_strong(&iv, &u0, &times).unwrap();
                let m = solve_mild(&f, &iv, &u0, &times).unwrap();
                assert!(s.distance(&m).unwrap() <= 1e-9 * s.max_norm().max(1.0));
            }
        }
    }

    #[test]
    fn backward_scalar() {
        let p = Pencil::new(real_matrix(&[&[1.0]]), real_matrix(&[&[1.0]])).unwrap();
        let (rf, riv) = setup(&p.reversed());
        let times = uniform_grid(1.0, 11).unwrap();
        let w = solve_backward(&rf, &riv, &real_vector(&[1.0]), &times).unwrap();
        for (t, u) in w.times.iter().zip(&w.states) {
            assert!((u[0] - c64(t.exp(), 0.0)).norm() < 1e-14);
        }
        let (rrf, rriv) = setup(&p.reversed().reversed());
        let (f, iv) = setup(&p);
        let a = solve_mild(&rrf, &rriv, &real_vector(&[1.0]), &times).unwrap();
        let b = solve_mild(&f, &iv, &real_vector(&[1.0]), &times).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-10);
    }

    #[test]
    fn duality_examples() {
        let scalar = Pencil::new(real_matrix(&[&[1.0]]), real_matrix(&[&[1.0]])).unwrap();
        assert!(duality_check(&scalar, &real_vector(&[1.0]), 1.0, 64).unwrap() < 1e-14);
        assert!(duality_check(&example(), &real_vector(&[1.0, 0.0]), 2.0, 64).unwrap() < 1e-9);
        assert_eq!(duality_check(&example(), &real_vector(&[0.0, 1.0]), 2.0, 64).unwrap(), 0.0);
    }

    #[test]
    fn semigroup_law() {
        let p = generate_regular(4, 3, 11, None).unwrap();
        let (_, iv) = setup(&p);
        let r = semigroup_residual(&iv, &[(0.5, 1.5), (2.0, 3.0), (4.9, 0.1)]).unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn grid_validation() {
        assert!(uniform_grid(0.0, 5).is_err());
        assert!(uniform_grid(1.0, 1).is_err());
        let p = example();
        let (f, iv) = setup(&p);
        let u0 = real_vector(&[1.0, 0.0]);
        assert!(solve_mild(&f, &iv, &u0, &[0.5, 1.0]).is_err());
        assert!(solve_mild(&f, &iv, &u0, &[0.0, 1.0, 1.0]).is_err());
        assert!(solve_mild(&f, &iv, &real_vector(&[1.0]), &[0.0, 1.0]).is_err());
    }
}
