//! Randomized property suites over seeded pencil families.
//!
//! Every suite draws its instances from a fixed seed, runs one check per
//! instance (in parallel) and reports the worst value of each measured
//! quantity next to the threshold it has to stay under.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{classify_factorized, split_subspaces, verify_decay, Side, Verdict};
use crate::consistent_iv::{compute_iv, IvSpace};
use crate::error::{Error, Result};
use crate::laplace::{transform_residual_with, LaplaceConfig};
use crate::linalg::{self, c64, CMatrix, CVector};
use crate::pencil::{
    block_factorize, generate_regular, is_regular, BlockFactorization, Pencil, DEFAULT_REGULARITY_TOL,
};
use crate::solvers::{
    duality_check_with, integrated_identity_residuals, iv_invariance_residual, solve_mild, solve_strong,
    strong_residual, uniform_grid, MildSolver, DEFAULT_QUAD_TOL,
};
use crate::subspaces::default_rank_tol;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_COUNT: usize = 100;
pub const LAPLACE_COUNT: usize = 20;
pub const DICHOTOMY_COUNT: usize = 50;
pub const MAX_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Spectrum,
    IvSpectrum,
    Strong,
    Mild,
    Coincidence,
    Duality,
    Laplace,
    Dichotomy,
    Negative,
    Resolvent,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Spectrum,
        Suite::IvSpectrum,
        Suite::Strong,
        Suite::Mild,
        Suite::Coincidence,
        Suite::Duality,
        Suite::Laplace,
        Suite::Dichotomy,
        Suite::Negative,
        Suite::Resolvent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Spectrum => "spectrum",
            Suite::IvSpectrum => "iv-spectrum",
            Suite::Strong => "strong",
            Suite::Mild => "mild",
            Suite::Coincidence => "coincidence",
            Suite::Duality => "duality",
            Suite::Laplace => "laplace",
            Suite::Dichotomy => "dichotomy",
            Suite::Negative => "negative",
            Suite::Resolvent => "resolvent",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Spectrum => "block-reduction spectrum equals the roots of det(zM0 + M1)",
            Suite::IvSpectrum => "spectrum of -G on IV equals spectrum of A, and K intertwines them",
            Suite::Strong => "strong solutions solve the equation and stay in IV",
            Suite::Mild => "mild solutions satisfy the integrated identity",
            Suite::Coincidence => "mild and strong solutions coincide for consistent data",
            Suite::Duality => "backward solve from u(T) retraces the forward trajectory",
            Suite::Laplace => "Fourier-Laplace transform of the mild solution equals the resolvent formula",
            Suite::Dichotomy => "planted verdicts, Dunford projection and dichotomy envelopes",
            Suite::Negative => "index-2 and singular pencils are rejected everywhere",
            Suite::Resolvent => "resolvent norm does not grow between radius R and 4R",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// A named quantity and the largest value it may take.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Measurement {
    pub fn new(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, value, threshold }
    }

    /// A boolean check: value 0 when it holds, 1 otherwise.
    pub fn flag(name: &'static str, ok: bool) -> Self {
        Self { name, value: if ok { 0.0 } else { 1.0 }, threshold: 0.0 }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceOutcome {
    pub id: usize,
    pub n: usize,
    pub rank: usize,
    pub measurements: Vec<Measurement>,
    pub error: Option<String>,
}

impl InstanceOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.measurements.iter().all(Measurement::passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub suite: Suite,
    pub description: &'static str,
    pub instances: usize,
    pub passed: bool,
    /// Worst value of each measurement over all instances.
    pub worst: Vec<Measurement>,
    pub failed_ids: Vec<usize>,
    pub errors: Vec<(usize, String)>,
}

impl PropertyReport {
    fn from_outcomes(suite: Suite, outcomes: Vec<InstanceOutcome>) -> Self {
        let mut worst: Vec<Measurement> = Vec::new();
        for m in outcomes.iter().flat_map(|o| &o.measurements) {
            match worst.iter_mut().find(|w| w.name == m.name) {
                Some(w) => {
                    // NaN counts as the worst possible value
                    if m.value > w.value || m.value.is_nan() {
                        w.value = m.value;
                    }
                }
                None => worst.push(m.clone()),
            }
        }
        let failed_ids: Vec<usize> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id).collect();
        let errors = outcomes.iter().filter_map(|o| o.error.clone().map(|e| (o.id, e))).collect();
        Self {
            suite,
            description: suite.description(),
            instances: outcomes.len(),
            passed: failed_ids.is_empty() && !outcomes.is_empty(),
            worst,
            failed_ids,
            errors,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub count: usize,
    pub all_passed: bool,
    pub properties: Vec<PropertyReport>,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Size of the main family; the Laplace and dichotomy families have
    /// their own sizes.
    pub count: usize,
    pub suites: Vec<Suite>,
    /// Corrupts the spectrum oracle comparison so the harness can be seen failing.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, count: DEFAULT_COUNT, suites: Suite::ALL.to_vec(), inject_fault: false }
    }
}

/// A generated pencil together with how it was made.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: usize,
    pub pencil: Pencil,
    pub rank: usize,
    pub hint: Vec<Complex64>,
}

#[derive(Clone, Copy)]
enum Family {
    Main,
    Stable,
    Split,
}

fn family_rng(seed: u64, family: Family, id: usize) -> ChaCha8Rng {
    let tag = match family {
        Family::Main => 0x9e37_79b9_7f4a_7c15u64,
        Family::Stable => 0xc2b2_ae3d_27d4_eb4f,
        Family::Split => 0x1656_67b1_9e37_79f9,
    };
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(id as u64 + 1))
}

/// `count` points in the box `re × im`, pairwise at least `sep` apart.
fn separated_points(
    rng: &mut ChaCha8Rng,
    count: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Complex64,
    sep: f64,
) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = Vec::with_capacity(count);
    while pts.len() < count {
        let z = draw(rng);
        if pts.iter().all(|w| (w - z).norm() >= sep) {
            pts.push(z);
        }
    }
    pts
}

fn make_instance(rng: &mut ChaCha8Rng, id: usize, min_rank: usize, hint: impl Fn(&mut ChaCha8Rng, usize) -> Vec<Complex64>) -> Result<Instance> {
    let n = rng.random_range(min_rank.max(1)..=MAX_N);
    let rank = rng.random_range(min_rank..=n);
    let hint = hint(rng, rank);
    let pencil = generate_regular(n, rank, rng.random(), Some(&hint))?;
    Ok(Instance { id, pencil, rank, hint })
}

/// The main family: sizes up to 8, all ranks, spectra in
/// `[−2, 1] × [−2, 2]` with separation 0.2.
pub fn main_instances(seed: u64, count: usize) -> Result<Vec<Instance>> {
    (0..count)
        .map(|id| {
            let mut rng = family_rng(seed, Family::Main, id);
            make_instance(&mut rng, id, 0, |rng, r| {
                separated_points(rng, r, |g| c64(g.random_range(-2.0..1.0), g.random_range(-2.0..2.0)), 0.2)
            })
        })
        .collect()
}

/// Exponentially stable pencils: spectra in `[−2, −0.2] × [−2, 2]`.
pub fn stable_instances(seed: u64, count: usize) -> Result<Vec<Instance>> {
    (0..count)
        .map(|id| {
            let mut rng = family_rng(seed, Family::Stable, id);
            make_instance(&mut rng, id, 1, |rng, r| {
                separated_points(rng, r, |g| c64(g.random_range(-2.0..-0.2), g.random_range(-2.0..2.0)), 0.2)
            })
        })
        .collect()
}

/// Pencils with `|Re λ| ∈ [0.5, 2]` for every eigenvalue, both signs.
pub fn split_instances(seed: u64, count: usize) -> Result<Vec<Instance>> {
    (0..count)
        .map(|id| {
            let mut rng = family_rng(seed, Family::Split, id);
            make_instance(&mut rng, id, 1, |rng, r| {
                let draw = |g: &mut ChaCha8Rng| {
                    let sign = if g.random_bool(0.5) { 1.0 } else { -1.0 };
                    c64(sign * g.random_range(0.5..2.0), g.random_range(-2.0..2.0))
                };
                separated_points(rng, r, draw, 0.2)
            })
        })
        .collect()
}

pub fn planted_verdict(hint: &[Complex64]) -> Verdict {
    if hint.iter().all(|z| z.re < 0.0) {
        Verdict::ExponentiallyStable
    } else {
        Verdict::Dichotomy
    }
}

/// A reproducible random vector of unit length.
pub fn random_unit_vector(seed: u64, n: usize) -> CVector {
    random_unit(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let norm = v.norm();
    if norm == 0.0 {
        v
    } else {
        v / c64(norm, 0.0)
    }
}

// --- determinant-root oracle -------------------------------------------------

/// Roots of `det(zM₀ + M₁)`, computed without the block reduction.
///
/// The determinant (a polynomial of degree `rank M₀` for a regular pencil)
/// is sampled at `n + 1` points of a circle, its coefficients recovered by a
/// discrete Fourier transform, the roots found by Aberth iteration and then
/// polished by Newton's method on the determinant itself, using
/// `(log det M(z))′ = tr(M(z)⁻¹M₀)`.
pub fn determinant_roots(p: &Pencil) -> Result<Vec<Complex64>> {
    let n = p.n();
    let s = linalg::singular_values(p.m0());
    let cut = default_rank_tol(n) * s.first().copied().unwrap_or(0.0);
    let degree = s.iter().filter(|&&x| x > cut).count();
    if degree == 0 {
        return Ok(Vec::new());
    }
    let nodes = n + 1;
    let radius = 2.0;
    let samples: Vec<Complex64> = (0..nodes)
        .map(|k| linalg::determinant(&p.eval(Complex64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64))))
        .collect();
    let coeffs: Vec<Complex64> = (0..=degree)
        .map(|j| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, &d)| d * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / nodes as f64))
                .sum();
            sum / (nodes as f64 * radius.powi(j as i32))
        })
        .collect();
    let mut roots = aberth(&coeffs)?;
    for z in &mut roots {
        *z = newton_on_determinant(p, *z);
    }
    crate::pencil::sort_spectrum(&mut roots);
    Ok(roots)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = c64(0.0, 0.0);
    let mut deriv = c64(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// Simultaneous Aberth–Ehrlich iteration; `coeffs[j]` multiplies `z^j`.
fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    if lead.norm() == 0.0 {
        return Err(Error::NonConvergent("determinant has lower degree than rank M0".into()));
    }
    // Cauchy-style radius for the initial circle
    let r0 = coeffs[..d].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max).clamp(1e-3, 1e6);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(r0, 2.0 * PI * (k as f64 + 0.25) / d as f64 + 0.4)).collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = horner(coeffs, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-14 {
            break;
        }
    }
    Ok(z)
}

fn newton_on_determinant(p: &Pencil, mut z: Complex64) -> Complex64 {
    for _ in 0..50 {
        let Some(x) = p.eval(z).lu().solve(p.m0()) else { break };
        let tr = x.trace();
        if tr.norm() == 0.0 || !tr.re.is_finite() {
            break;
        }
        let step = 1.0 / tr;
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

// --- per-instance checks ------------------------------------------------------

struct Prepared {
    f: BlockFactorization,
    iv: IvSpace,
}

fn prepare(p: &Pencil) -> Result<Prepared> {
    let f = block_factorize(p, DEFAULT_REGULARITY_TOL)?;
    let iv = compute_iv(&f)?;
    Ok(Prepared { f, iv })
}

fn check_spectrum(inst: &Instance, inject_fault: bool) -> Result<Vec<Measurement>> {
    let spec = prepare(&inst.pencil)?.f.spectrum()?;
    let mut oracle = determinant_roots(&inst.pencil)?;
    if inject_fault {
        if let Some(z) = oracle.first_mut() {
            *z += 1e-3;
        } else {
            oracle.push(c64(0.0, 0.0));
        }
    }
    Ok(vec![
        Measurement::new("oracle_distance", linalg::matching_distance(&spec.eigenvalues, &oracle), 1e-7),
        Measurement::new("hint_distance", linalg::matching_distance(&spec.eigenvalues, &inst.hint), 1e-7),
    ])
}

fn check_iv_spectrum(inst: &Instance) -> Result<Vec<Measurement>> {
    let Prepared { f, iv } = prepare(&inst.pencil)?;
    let a = &f.reduced_generator_a;
    let sigma_a = linalg::eigenvalues(a).ok_or(Error::EigenFailure)?;
    let sigma_g: Vec<Complex64> =
        linalg::eigenvalues(&-&iv.generator_g).ok_or(Error::EigenFailure)?.into_iter().collect();
    let lhs = -(&iv.iso_k * &iv.generator_g);
    let rhs = a * &iv.iso_k;
    let scale = (linalg::norm2(a) * linalg::norm2(&iv.iso_k)).max(f64::MIN_POSITIVE);
    Ok(vec![
        Measurement::new("spectral_distance", linalg::matching_distance(&sigma_a, &sigma_g), 1e-8),
        Measurement::new("intertwining_relative", linalg::norm2(&(lhs - rhs)) / scale, 1e-10),
    ])
}

fn check_strong(inst: &Instance) -> Result<Vec<Measurement>> {
    let Prepared { iv, .. } = prepare(&inst.pencil)?;
    let times = uniform_grid(5.0, 50)?;
    let mut residual = 0.0f64;
    let mut invariance = 0.0f64;
    for j in 0..iv.dim() {
        let u0 = iv.basis.basis().column(j).into_owned();
        let traj = solve_strong(&iv, &u0, &times)?;
        residual = residual.max(strong_residual(&inst.pencil, &iv, &traj)?);
        invariance = invariance.max(iv_invariance_residual(&iv, &traj));
    }
    Ok(vec![
        Measurement::new("equation_residual_relative", residual, 1e-9),
        Measurement::new("iv_distance_relative", invariance, 1e-9),
    ])
}

fn check_mild(inst: &Instance, seed: u64) -> Result<Vec<Measurement>> {
    let Prepared { f, iv } = prepare(&inst.pencil)?;
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (inst.id as u64).wrapping_mul(0x2545_f491_4f6c_dd1d));
    let null = f.decomp.null_m0.basis();
    let null_u0 = if null.ncols() == 0 {
        CVector::zeros(n)
    } else {
        let coeffs = random_unit(&mut rng, null.ncols());
        null * coeffs
    };
    let mut u0s = CMatrix::zeros(n, 10);
    u0s.set_column(0, &null_u0);
    for j in 1..10 {
        let scale = rng.random_range(0.1..3.0);
        u0s.set_column(j, &(random_unit(&mut rng, n) * c64(scale, 0.0)));
    }
    let solver = MildSolver::new(&f, &iv)?;
    let times = uniform_grid(5.0, 21)?;
    let residuals = integrated_identity_residuals(&inst.pencil, &solver, &u0s, &times, DEFAULT_QUAD_TOL)?;
    let identity = residuals
        .iter()
        .enumerate()
        .map(|(j, r)| r / (1.0 + u0s.column(j).norm()))
        .fold(0.0, f64::max);
    let zero = solve_mild(&f, &iv, &null_u0, &times)?;
    let zero_max = zero.states.iter().skip(1).map(|u| u.norm()).fold(0.0, f64::max);
    Ok(vec![
        Measurement::new("integrated_identity_scaled", identity, 1e-7),
        Measurement::new("null_space_trajectory", zero_max, 1e-12),
    ])
}

fn check_coincidence(inst: &Instance, seed: u64) -> Result<Vec<Measurement>> {
    let Prepared { f, iv } = prepare(&inst.pencil)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (inst.id as u64).wrapping_mul(0x9e37_79b9));
    let times = uniform_grid(5.0, 50)?;
    let mut starts: Vec<CVector> = (0..iv.dim()).map(|j| iv.basis.basis().column(j).into_owned()).collect();
    if iv.dim() > 0 {
        starts.push(iv.basis.embed(&random_unit(&mut rng, iv.dim())));
    }
    let mut worst = 0.0f64;
    for u0 in &starts {
        let strong = solve_strong(&iv, u0, &times)?;
        let mild = solve_mild(&f, &iv, u0, &times)?;
        worst = worst.max(strong.distance(&mild)?);
    }
    Ok(vec![Measurement::new("trajectory_distance", worst, 1e-9)])
}

fn check_duality(inst: &Instance, seed: u64) -> Result<Vec<Measurement>> {
    let Prepared { f, iv } = prepare(&inst.pencil)?;
    let Prepared { f: rf, iv: riv } = prepare(&inst.pencil.reversed())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (inst.id as u64).wrapping_mul(0x6a09_e667));
    let u0 = random_unit(&mut rng, f.n());
    let times = uniform_grid(2.0, 64)?;
    let scale = solve_mild(&f, &iv, &u0, &times)?.states.iter().skip(1).map(|u| u.norm()).fold(0.0, f64::max);
    let gap = duality_check_with(&f, &iv, &rf, &riv, &u0, 2.0, 64)?;
    let relative = if scale == 0.0 { gap } else { gap / scale };
    Ok(vec![Measurement::new("duality_relative", relative, 1e-8)])
}

fn check_laplace(inst: &Instance, seed: u64) -> Result<Vec<Measurement>> {
    let Prepared { f, iv } = prepare(&inst.pencil)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (inst.id as u64).wrapping_mul(0xbb67_ae85));
    let u0 = random_unit(&mut rng, f.n());
    let s0 = f.spectrum()?.s0;
    let report = transform_residual_with(&f, &iv, &u0, &LaplaceConfig::for_abscissa(s0))?;
    Ok(vec![
        Measurement::new("transform_residual", report.max_residual, 1e-6),
        Measurement::new("transform_residual_rho_plus_one", report.rho_pair_discrepancy, 1e-6),
    ])
}

fn check_dichotomy(inst: &Instance) -> Result<Vec<Measurement>> {
    let Prepared { f, iv } = prepare(&inst.pencil)?;
    let report = classify_factorized(&f, &iv, None)?;
    let planted = planted_verdict(&inst.hint);
    let mut out = vec![Measurement::flag("verdict_matches", report.verdict == planted)];
    let split = split_subspaces(&report, &f, &iv)?;
    let p = report.projector_p.as_ref().expect("dichotomy report carries P");
    let a = &f.reduced_generator_a;
    out.push(Measurement::new("projector_idempotence", linalg::norm2(&(p * p - p)), 1e-10));
    out.push(Measurement::new("projector_commutator", linalg::norm2(&(p * a - a * p)), 1e-10));
    out.push(Measurement::new("invariance_residual", split.invariance_residual, 1e-9));

    let mut worst_s = 0.0f64;
    let mut worst_t = 0.0f64;
    for (space, side, worst) in
        [(&split.s_state, Side::Stable, &mut worst_s), (&split.t_state, Side::Unstable, &mut worst_t)]
    {
        for j in 0..space.dim() {
            let u0 = space.basis().column(j).into_owned();
            let check = verify_decay(&inst.pencil, &report, &split, &u0, side, 10.0, 101)?;
            *worst = worst.max(check.worst_ratio);
        }
    }
    out.push(Measurement::new("stable_envelope_ratio", worst_s, 1.01));
    out.push(Measurement::new("unstable_envelope_ratio", worst_t, 1.01));
    Ok(out)
}

fn check_resolvent(inst: &Instance) -> Result<Vec<Measurement>> {
    let Prepared { f, .. } = prepare(&inst.pencil)?;
    let rmax = f.spectrum()?.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let r = 2.0 * (rmax + 1.0);
    let near = f.resolvent_bound_probe(r, 32)?;
    let far = f.resolvent_bound_probe(4.0 * r, 32)?;
    Ok(vec![Measurement::new("far_over_near", far / near, 4.0)])
}

/// The two textbook non-regular pencils.
pub fn negative_controls() -> Vec<(&'static str, Pencil)> {
    let m = |rows: &[&[f64]]| linalg::real_matrix(rows);
    vec![
        (
            "index-2",
            Pencil::new(m(&[&[0.0, 1.0], &[0.0, 0.0]]), CMatrix::identity(2, 2)).expect("square"),
        ),
        (
            "singular",
            Pencil::new(m(&[&[1.0, 0.0], &[0.0, 0.0]]), m(&[&[0.0, 1.0], &[0.0, 0.0]])).expect("square"),
        ),
    ]
}

/// Every entry point that needs a regular pencil must refuse `p`.
fn check_negative(p: &Pencil) -> Vec<Measurement> {
    let refused = |r: Result<()>| matches!(r, Err(Error::NotRegular { .. }));
    let u0 = CVector::from_element(p.n(), c64(1.0, 0.0));
    vec![
        Measurement::flag("is_regular_false", !is_regular(p, DEFAULT_REGULARITY_TOL).regular),
        Measurement::flag("factorization_refused", refused(block_factorize(p, DEFAULT_REGULARITY_TOL).map(|_| ()))),
        Measurement::flag("spectrum_refused", refused(crate::pencil::spectrum(p).map(|_| ()))),
        Measurement::flag("resolvent_refused", refused(crate::pencil::resolvent(p, c64(1.0, 1.0)).map(|_| ()))),
        Measurement::flag("classify_refused", refused(crate::asymptotics::classify(p, None).map(|_| ()))),
        Measurement::flag("duality_refused", refused(crate::solvers::duality_check(p, &u0, 1.0, 8).map(|_| ()))),
        Measurement::flag(
            "laplace_refused",
            refused(crate::laplace::transform_residual(p, &u0, &LaplaceConfig::for_abscissa(0.0)).map(|_| ())),
        ),
    ]
}

fn outcome(inst: &Instance, r: Result<Vec<Measurement>>) -> InstanceOutcome {
    let (measurements, error) = match r {
        Ok(m) => (m, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    InstanceOutcome { id: inst.id, n: inst.pencil.n(), rank: inst.rank, measurements, error }
}

fn over<F>(instances: &[Instance], check: F) -> Vec<InstanceOutcome>
where
    F: Fn(&Instance) -> Result<Vec<Measurement>> + Sync,
{
    let mut out: Vec<InstanceOutcome> = instances.par_iter().map(|i| outcome(i, check(i))).collect();
    out.sort_by_key(|o| o.id);
    out
}

/// Per-instance outcomes of one suite.
pub fn run_suite_outcomes(suite: Suite, opts: &VerifyOptions) -> Result<Vec<InstanceOutcome>> {
    let seed = opts.seed;
    Ok(match suite {
        Suite::Laplace => over(&stable_instances(seed, LAPLACE_COUNT)?, |i| check_laplace(i, seed)),
        Suite::Dichotomy => over(&split_instances(seed, DICHOTOMY_COUNT)?, check_dichotomy),
        Suite::Negative => negative_controls()
            .into_iter()
            .enumerate()
            .map(|(id, (_, p))| InstanceOutcome {
                id,
                n: p.n(),
                rank: linalg::singular_values(p.m0()).iter().filter(|&&s| s > 1e-12).count(),
                measurements: check_negative(&p),
                error: None,
            })
            .collect(),
        _ => {
            let instances = main_instances(seed, opts.count)?;
            match suite {
                Suite::Spectrum => over(&instances, |i| check_spectrum(i, opts.inject_fault)),
                Suite::IvSpectrum => over(&instances, check_iv_spectrum),
                Suite::Strong => over(&instances, check_strong),
                Suite::Mild => over(&instances, |i| check_mild(i, seed)),
                Suite::Coincidence => over(&instances, |i| check_coincidence(i, seed)),
                Suite::Duality => over(&instances, |i| check_duality(i, seed)),
                Suite::Resolvent => over(&instances, check_resolvent),
                Suite::Laplace | Suite::Dichotomy | Suite::Negative => unreachable!(),
            }
        }
    })
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<PropertyReport> {
    Ok(PropertyReport::from_outcomes(suite, run_suite_outcomes(suite, opts)?))
}

pub fn run_verification(opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut suites = opts.suites.clone();
    suites.sort();
    suites.dedup();
    let properties = suites.iter().map(|&s| run_suite(s, opts)).collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        seed: opts.seed,
        count: opts.count,
        all_passed: properties.iter().all(|p| p.passed),
        properties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;

    #[test]
    fn oracle_on_example() {
        let p = Pencil::new(real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), real_matrix(&[&[3.0, 1.0], &[2.0, 1.0]])).unwrap();
        let roots = determinant_roots(&p).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - c64(-1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn oracle_on_diagonal() {
        let p = Pencil::new(CMatrix::identity(3, 3), real_matrix(&[&[1.0, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, 3.0]]))
            .unwrap();
        let roots = determinant_roots(&p).unwrap();
        let expected = [c64(-3.0, 0.0), c64(-1.0, 0.0), c64(2.0, 0.0)];
        assert!(linalg::matching_distance(&roots, &expected) < 1e-12);
    }

    #[test]
    fn oracle_on_rank_zero() {
        let p = Pencil::new(CMatrix::zeros(2, 2), CMatrix::identity(2, 2)).unwrap();
        assert!(determinant_roots(&p).unwrap().is_empty());
    }

    #[test]
    fn families_are_deterministic() {
        let a = main_instances(7, 5).unwrap();
        let b = main_instances(7, 5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.pencil, y.pencil);
        }
        assert!(stable_instances(7, 5).unwrap().iter().all(|i| i.hint.iter().all(|z| z.re <= -0.2)));
        assert!(split_instances(7, 5).unwrap().iter().all(|i| i.hint.iter().all(|z| z.re.abs() >= 0.5)));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn negative_controls_refused() {
        let opts = VerifyOptions::default();
        assert!(run_suite(Suite::Negative, &opts).unwrap().passed);
    }

    #[test]
    fn injected_fault_is_caught() {
        let opts = VerifyOptions { count: 3, inject_fault: true, ..VerifyOptions::default() };
        let r = run_suite(Suite::Spectrum, &opts).unwrap();
        assert!(!r.passed);
        let opts = VerifyOptions { count: 3, ..VerifyOptions::default() };
        assert!(run_suite(Suite::Spectrum, &opts).unwrap().passed);
    }
}
