//! The linear pencil `M(z) = zM₀ + M₁`.
//!
//! Regularity (index 0) is decided through the block
//! `B = ι*_{R(M₀)⊥} M₁ ι_{N(M₀)}`: the pencil is regular exactly when `B` is
//! invertible. In that case
//!
//! ```text
//! M(z) = U₁ᴴ V₁ diag(zM̃₀ + M̃₁, B) V₀ U₀
//! ```
//!
//! with unitary `U₀ = [ι*_{N⊥}; ι*_N]`, `U₁ = [ι*_R; ι*_{R⊥}]` and unit
//! triangular couplers `V₀`, `V₁`, so the finite spectrum of the pencil is the
//! spectrum of the reduced generator `A = −M̃₀⁻¹M̃₁`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix};
use crate::subspaces::{self, compress, FundamentalDecomposition};

/// Default relative threshold on `σ_min(B)/‖M₁‖` for regularity.
pub const DEFAULT_REGULARITY_TOL: f64 = 1e-10;

/// Relative singularity threshold of `zM̃₀ + M̃₁` used by the resolvent.
pub const SPECTRUM_HIT_TOL: f64 = 1e-12;

/// A pair `(M₀, M₁)` of square complex matrices of equal size.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    m0: CMatrix,
    m1: CMatrix,
}

impl Pencil {
    pub fn new(m0: CMatrix, m1: CMatrix) -> Result<Self> {
        for m in [&m0, &m1] {
            if m.nrows() != m.ncols() {
                return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
            }
        }
        if m0.nrows() != m1.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "M0 is {0}x{0} but M1 is {1}x{1}",
                m0.nrows(),
                m1.nrows()
            )));
        }
        if !linalg::is_finite(&m0) {
            return Err(Error::NonFinite("M0"));
        }
        if !linalg::is_finite(&m1) {
            return Err(Error::NonFinite("M1"));
        }
        Ok(Self { m0, m1 })
    }

    pub fn n(&self) -> usize {
        self.m0.nrows()
    }

    pub fn m0(&self) -> &CMatrix {
        &self.m0
    }

    pub fn m1(&self) -> &CMatrix {
        &self.m1
    }

    /// `M(z) = zM₀ + M₁`.
    pub fn eval(&self, z: Complex64) -> CMatrix {
        &self.m0 * z + &self.m1
    }

    /// The pencil `N` of `(M₀, −M₁)`; `N(z) = −M(−z)`.
    pub fn reversed(&self) -> Pencil {
        Pencil { m0: self.m0.clone(), m1: -&self.m1 }
    }
}

/// Verdict of [`is_regular`] together with the quantity it was based on.
#[derive(Clone, Debug, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub criterion: &'static str,
    pub rank_m0: Option<usize>,
    /// `σ_min(B)`; `+inf` when `B` is empty (invertible `M₀`).
    pub sigma_min_b: f64,
    /// `tol·‖M₁‖`, the bound `σ_min(B)` has to exceed.
    pub threshold: f64,
    pub note: Option<String>,
}

pub fn is_regular(p: &Pencil, tol: f64) -> Regularity {
    is_regular_with(p, subspaces::default_rank_tol(p.n()), tol)
}

pub fn is_regular_with(p: &Pencil, rank_tol: f64, tol: f64) -> Regularity {
    const CRITERION: &str = "B = P_{R(M0)^perp} M1 |_{N(M0)} invertible";
    let decomp = match subspaces::fundamental_decomposition(&p.m0, rank_tol) {
        Ok(d) => d,
        Err(e) => {
            return Regularity {
                regular: false,
                criterion: CRITERION,
                rank_m0: None,
                sigma_min_b: f64::NAN,
                threshold: f64::NAN,
                note: Some(e.to_string()),
            }
        }
    };
    let b = compress(&p.m1, &decomp.corange_m0, &decomp.null_m0).expect("shapes agree");
    let sigma_min_b = linalg::sigma_min(&b);
    let threshold = tol * linalg::norm2(&p.m1);
    let regular = sigma_min_b > threshold;
    let note = match decomp.rank {
        r if r == p.n() => Some("M0 invertible: B is empty".to_owned()),
        0 => Some("M0 = 0: regular iff M1 invertible".to_owned()),
        _ => None,
    };
    Regularity {
        regular,
        criterion: CRITERION,
        rank_m0: Some(decomp.rank),
        sigma_min_b,
        threshold,
        note,
    }
}

/// Block factorization of a regular pencil.
#[derive(Clone, Debug)]
pub struct BlockFactorization {
    pub pencil: Pencil,
    pub decomp: FundamentalDecomposition,
    /// `M̃₀ = ι*_R M₀ ι_{N⊥}` (r × r).
    pub m0_tilde: CMatrix,
    /// `M̃₁ = ι*_R M₁ ι_{N⊥} − (ι*_R M₁ ι_N) B⁻¹ C` (r × r).
    pub m1_tilde: CMatrix,
    /// `B = ι*_{R⊥} M₁ ι_N`.
    pub b: CMatrix,
    pub b_inv: CMatrix,
    /// `C = ι*_{R⊥} M₁ ι_{N⊥}`.
    pub c: CMatrix,
    /// `ι*_R M₁ ι_N`, the upper-right block of `U₁ M₁ U₀ᴴ`.
    pub m1_range_null: CMatrix,
    /// `A = −M̃₀⁻¹ M̃₁`.
    pub reduced_generator_a: CMatrix,
    pub m0_norm: f64,
    pub m1_norm: f64,
}

pub fn block_factorize(p: &Pencil, tol: f64) -> Result<BlockFactorization> {
    block_factorize_with(p, subspaces::default_rank_tol(p.n()), tol)
}

pub fn block_factorize_with(p: &Pencil, rank_tol: f64, tol: f64) -> Result<BlockFactorization> {
    let decomp = subspaces::fundamental_decomposition(&p.m0, rank_tol)?;
    let (null, conull) = (&decomp.null_m0, &decomp.conull_m0);
    let (range, corange) = (&decomp.range_m0, &decomp.corange_m0);

    let b = compress(&p.m1, corange, null)?;
    let m1_norm = linalg::norm2(&p.m1);
    let sigma_min_b = linalg::sigma_min(&b);
    if sigma_min_b <= tol * m1_norm {
        return Err(Error::NotRegular { sigma_min_b });
    }
    let b_inv = linalg::inverse(&b).ok_or(Error::NotRegular { sigma_min_b })?;
    let c = compress(&p.m1, corange, conull)?;
    let m1_range_null = compress(&p.m1, range, null)?;
    let m0_tilde = compress(&p.m0, range, conull)?;
    let m1_tilde = compress(&p.m1, range, conull)? - &m1_range_null * &b_inv * &c;
    let m0_tilde_inv = linalg::inverse(&m0_tilde)
        .ok_or_else(|| Error::InternalInconsistency("reduced M0 is singular".into()))?;
    let reduced_generator_a = -(m0_tilde_inv * &m1_tilde);

    Ok(BlockFactorization {
        pencil: p.clone(),
        m0_norm: linalg::norm2(&p.m0),
        m1_norm,
        decomp,
        m0_tilde,
        m1_tilde,
        b,
        b_inv,
        c,
        m1_range_null,
        reduced_generator_a,
    })
}

impl BlockFactorization {
    pub fn n(&self) -> usize {
        self.decomp.n()
    }

    pub fn rank(&self) -> usize {
        self.decomp.rank
    }

    /// `U₀ = [ι*_{N⊥}; ι*_N]`.
    pub fn u0(&self) -> CMatrix {
        stack_rows(
            &self.decomp.conull_m0.basis().adjoint(),
            &self.decomp.null_m0.basis().adjoint(),
        )
    }

    /// `U₁ = [ι*_R; ι*_{R⊥}]`.
    pub fn u1(&self) -> CMatrix {
        stack_rows(
            &self.decomp.range_m0.basis().adjoint(),
            &self.decomp.corange_m0.basis().adjoint(),
        )
    }

    /// `V₀ = [[I, 0], [B⁻¹C, I]]`.
    pub fn v0(&self) -> CMatrix {
        let (n, r) = (self.n(), self.rank());
        let mut v = CMatrix::identity(n, n);
        v.view_mut((r, 0), (n - r, r)).copy_from(&(&self.b_inv * &self.c));
        v
    }

    /// `V₁ = [[I, (ι*_R M₁ ι_N) B⁻¹], [0, I]]`.
    pub fn v1(&self) -> CMatrix {
        let (n, r) = (self.n(), self.rank());
        let mut v = CMatrix::identity(n, n);
        v.view_mut((0, r), (r, n - r)).copy_from(&(&self.m1_range_null * &self.b_inv));
        v
    }

    /// `diag(zM̃₀ + M̃₁, B)`.
    pub fn middle(&self, z: Complex64) -> CMatrix {
        let (n, r) = (self.n(), self.rank());
        let mut d = CMatrix::zeros(n, n);
        d.view_mut((0, 0), (r, r)).copy_from(&(&self.m0_tilde * z + &self.m1_tilde));
        d.view_mut((r, r), (n - r, n - r)).copy_from(&self.b);
        d
    }

    /// `U₁ᴴ V₁ diag(zM̃₀ + M̃₁, B) V₀ U₀`, which equals `M(z)`.
    pub fn reconstruct(&self, z: Complex64) -> CMatrix {
        self.u1().adjoint() * self.v1() * self.middle(z) * self.v0() * self.u0()
    }

    /// `M(z)⁻¹` through the factorization.
    pub fn resolvent(&self, z: Complex64) -> Result<CMatrix> {
        let (n, r) = (self.n(), self.rank());
        let w = &self.m0_tilde * z + &self.m1_tilde;
        let w_inv = if r == 0 {
            CMatrix::zeros(0, 0)
        } else {
            let s = linalg::singular_values(&w);
            if s[r - 1] < SPECTRUM_HIT_TOL * s[0] || s[0] == 0.0 {
                return Err(Error::SpectrumHit { z });
            }
            linalg::inverse(&w).ok_or(Error::SpectrumHit { z })?
        };
        let mut mid = CMatrix::zeros(n, n);
        mid.view_mut((0, 0), (r, r)).copy_from(&w_inv);
        mid.view_mut((r, r), (n - r, n - r)).copy_from(&self.b_inv);
        let mut v0_inv = CMatrix::identity(n, n);
        v0_inv.view_mut((r, 0), (n - r, r)).copy_from(&-(&self.b_inv * &self.c));
        let mut v1_inv = CMatrix::identity(n, n);
        v1_inv.view_mut((0, r), (r, n - r)).copy_from(&-(&self.m1_range_null * &self.b_inv));
        Ok(self.u0().adjoint() * v0_inv * mid * v1_inv * self.u1())
    }

    pub fn spectrum(&self) -> Result<SpectrumReport> {
        let mut eigenvalues =
            linalg::eigenvalues(&self.reduced_generator_a).ok_or(Error::EigenFailure)?;
        sort_spectrum(&mut eigenvalues);
        Ok(SpectrumReport::from_eigenvalues(eigenvalues))
    }

    /// Largest `‖M(z)⁻¹‖` over `samples` points on each of the circles
    /// `|z| ∈ {R, 2R, 4R}`.
    pub fn resolvent_bound_probe(&self, radius: f64, samples: usize) -> Result<f64> {
        let spec = self.spectrum()?;
        let rmax = spec.eigenvalues.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if !(radius > rmax + 1.0) || samples == 0 {
            return Err(Error::InvalidArgument(format!(
                "probe radius {radius} must exceed max|σ(M)| + 1 = {}",
                rmax + 1.0
            )));
        }
        let mut best = 0.0f64;
        for scale in [1.0, 2.0, 4.0] {
            for k in 0..samples {
                // half-step offset keeps the real axis out of the sample set
                let theta = 2.0 * PI * (k as f64 + 0.5) / samples as f64;
                let z = Complex64::from_polar(scale * radius, theta);
                best = best.max(linalg::norm2(&self.resolvent(z)?));
            }
        }
        Ok(best)
    }
}

fn stack_rows(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    let cols = top.ncols().max(bottom.ncols());
    let mut m = CMatrix::zeros(top.nrows() + bottom.nrows(), cols);
    m.view_mut((0, 0), top.shape()).copy_from(top);
    m.view_mut((top.nrows(), 0), bottom.shape()).copy_from(bottom);
    m
}

/// Sorts eigenvalues by real part, then imaginary part.
pub fn sort_spectrum(ev: &mut [Complex64]) {
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Finite spectrum of a regular pencil with derived quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    /// `max Re λ`; `−inf` for an empty spectrum.
    pub spectral_abscissa: f64,
    /// Growth bound; equals the spectral abscissa for finite-dimensional pencils.
    pub s0: f64,
    /// `min |Re λ|`; `+inf` for an empty spectrum.
    pub imag_axis_margin: f64,
}

impl SpectrumReport {
    pub fn from_eigenvalues(eigenvalues: Vec<Complex64>) -> Self {
        let spectral_abscissa = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let imag_axis_margin = eigenvalues.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        Self { eigenvalues, spectral_abscissa, s0: spectral_abscissa, imag_axis_margin }
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

pub fn resolvent(p: &Pencil, z: Complex64) -> Result<CMatrix> {
    block_factorize(p, DEFAULT_REGULARITY_TOL)?.resolvent(z)
}

pub fn spectrum(p: &Pencil) -> Result<SpectrumReport> {
    block_factorize(p, DEFAULT_REGULARITY_TOL)?.spectrum()
}

pub fn resolvent_bound_probe(p: &Pencil, radius: f64, samples: usize) -> Result<f64> {
    block_factorize(p, DEFAULT_REGULARITY_TOL)?.resolvent_bound_probe(radius, samples)
}

pub fn reversed(p: &Pencil) -> Pencil {
    p.reversed()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    loop {
        let g = random_matrix(rng, n, n);
        if linalg::sigma_min(&g) > 1e-3 {
            return linalg::orthonormalize(&g);
        }
    }
}

/// Generates a regular pencil of size `n` with `rank M₀ = rank`.
///
/// `M₀ = Q diag(D, 0) Qᴴ` with `D` Hermitian positive definite, and the
/// `N(M₀)` block of `M₁` is shifted so its Hermitian part is `>= ½`; such
/// pencils are always regular. With a spectrum hint (one entry per unit of
/// rank) the `R(M₀)` block of `M₁` is solved for so that `σ(M)` is exactly
/// the hint. Output depends only on the arguments.
pub fn generate_regular(
    n: usize,
    rank: usize,
    seed: u64,
    spectrum_hint: Option<&[Complex64]>,
) -> Result<Pencil> {
    if n == 0 || rank > n {
        return Err(Error::BadRank { n, rank });
    }
    if let Some(h) = spectrum_hint {
        if h.len() != rank {
            return Err(Error::BadSpectrumHint { expected: rank, got: h.len() });
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("spectrum hint"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = n - rank;
    let q = random_unitary(&mut rng, n);

    let l = random_matrix(&mut rng, rank, rank);
    let d = &l * l.adjoint() / c64(rank.max(1) as f64, 0.0) + CMatrix::identity(rank, rank) * c64(0.5, 0.0);

    let mut p22 = random_matrix(&mut rng, k, k);
    if k > 0 {
        let herm = (&p22 + p22.adjoint()) * c64(0.5, 0.0);
        let lmin = linalg::eigenvalues(&herm)
            .ok_or(Error::EigenFailure)?
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        p22 += CMatrix::identity(k, k) * c64(0.5 - lmin, 0.0);
    }
    let p21 = random_matrix(&mut rng, k, rank);
    let p12 = random_matrix(&mut rng, rank, k);
    let p11 = match spectrum_hint {
        None => random_matrix(&mut rng, rank, rank),
        Some(hint) => {
            let mut tri = CMatrix::from_fn(rank, rank, |i, j| {
                if i < j {
                    c64(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))
                } else {
                    c64(0.0, 0.0)
                }
            });
            for (i, &lam) in hint.iter().enumerate() {
                tri[(i, i)] = lam;
            }
            let u = random_unitary(&mut rng, rank);
            let a_target = &u * tri * u.adjoint();
            let p22_inv = linalg::inverse(&p22).expect("accretive block is invertible");
            -(&d * a_target) + &p12 * p22_inv * &p21
        }
    };

    let mut m0_local = CMatrix::zeros(n, n);
    m0_local.view_mut((0, 0), (rank, rank)).copy_from(&d);
    let mut m1_local = CMatrix::zeros(n, n);
    m1_local.view_mut((0, 0), (rank, rank)).copy_from(&p11);
    m1_local.view_mut((0, rank), (rank, k)).copy_from(&p12);
    m1_local.view_mut((rank, 0), (k, rank)).copy_from(&p21);
    m1_local.view_mut((rank, rank), (k, k)).copy_from(&p22);
    let mut m0 = &q * m0_local * q.adjoint();
    // exact Hermitian symmetry for M₀
    m0 = (&m0 + m0.adjoint()) * c64(0.5, 0.0);
    let m1 = &q * m1_local * q.adjoint();
    Pencil::new(m0, m1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matching_distance, norm2, real_matrix};

    fn example() -> Pencil {
        Pencil::new(
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            real_matrix(&[&[3.0, 1.0], &[2.0, 1.0]]),
        )
        .unwrap()
    }

    fn scalar(m0: f64, m1: Complex64) -> Pencil {
        Pencil::new(CMatrix::from_element(1, 1, c64(m0, 0.0)), CMatrix::from_element(1, 1, m1)).unwrap()
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        norm2(&(a - b)) <= tol
    }

    #[test]
    fn construction_validates_shapes() {
        let e = Pencil::new(CMatrix::zeros(2, 2), CMatrix::zeros(3, 3));
        assert!(matches!(e, Err(Error::DimensionMismatch(_))));
        let e = Pencil::new(CMatrix::zeros(2, 3), CMatrix::zeros(2, 3));
        assert!(matches!(e, Err(Error::NonSquare { .. })));
        let mut bad = CMatrix::zeros(1, 1);
        bad[(0, 0)] = c64(f64::NAN, 0.0);
        assert!(matches!(Pencil::new(bad, CMatrix::zeros(1, 1)), Err(Error::NonFinite(_))));
    }

    #[test]
    fn regularity_examples() {
        let r = is_regular(&example(), DEFAULT_REGULARITY_TOL);
        assert!(r.regular);
        assert!((r.sigma_min_b - 1.0).abs() < 1e-14);

        let singular = Pencil::new(
            real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]),
            real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]),
        )
        .unwrap();
        let r = is_regular(&singular, DEFAULT_REGULARITY_TOL);
        assert!(!r.regular);
        assert!(r.sigma_min_b < 1e-15);

        // det(zM0 + M1) = 1 for all z, yet the resolvent grows like |z|
        let index2 = Pencil::new(real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]), CMatrix::identity(2, 2)).unwrap();
        let r = is_regular(&index2, DEFAULT_REGULARITY_TOL);
        assert!(!r.regular);
        assert!(r.sigma_min_b < 1e-15);
        assert!(matches!(block_factorize(&index2, DEFAULT_REGULARITY_TOL), Err(Error::NotRegular { .. })));
    }

    #[test]
    fn regularity_degenerate_shapes() {
        let r = is_regular(&Pencil::new(CMatrix::identity(2, 2), CMatrix::zeros(2, 2)).unwrap(), 1e-10);
        assert!(r.regular);
        assert!(r.sigma_min_b.is_infinite());
        let zero_m0 = Pencil::new(CMatrix::zeros(2, 2), real_matrix(&[&[1.0, 2.0], &[0.0, 1.0]])).unwrap();
        assert!(is_regular(&zero_m0, 1e-10).regular);
        let zero_both = Pencil::new(CMatrix::zeros(2, 2), real_matrix(&[&[1.0, 2.0], &[2.0, 4.0]])).unwrap();
        assert!(!is_regular(&zero_both, 1e-10).regular);
    }

    #[test]
    fn factorization_of_example() {
        let f = block_factorize(&example(), DEFAULT_REGULARITY_TOL).unwrap();
        let one = |m: &CMatrix, v: f64| (m[(0, 0)] - c64(v, 0.0)).norm() < 1e-14;
        assert!(one(&f.m0_tilde, 1.0));
        assert!(one(&f.m1_tilde, 1.0));
        assert!(one(&f.b, 1.0));
        assert!(one(&f.c, 2.0));
        assert!(one(&f.reduced_generator_a, -1.0));
    }

    #[test]
    fn factorization_identity_m0() {
        let m1 = real_matrix(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let f = block_factorize(&Pencil::new(CMatrix::identity(2, 2), m1.clone()).unwrap(), 1e-10).unwrap();
        assert_eq!(f.b.shape(), (0, 0));
        assert_eq!(f.c.shape(), (0, 2));
        assert!(close(&f.m0_tilde, &CMatrix::identity(2, 2), 1e-14));
        assert!(close(&f.m1_tilde, &m1, 1e-13));
        assert!(close(&f.reduced_generator_a, &-m1, 1e-13));
    }

    #[test]
    fn factorization_diag_m0_identity_m1() {
        let p = Pencil::new(real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), CMatrix::identity(2, 2)).unwrap();
        let f = block_factorize(&p, 1e-10).unwrap();
        assert!((f.m0_tilde[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((f.m1_tilde[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((f.b[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(f.c[(0, 0)].norm() < 1e-15);
        assert!((f.reduced_generator_a[(0, 0)] + c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn factorization_reconstructs_pencil() {
        for seed in 0..10 {
            let p = generate_regular(5, 3, seed, None).unwrap();
            let f = block_factorize(&p, 1e-10).unwrap();
            let scale = f.m0_norm + f.m1_norm;
            for k in 0..10 {
                let z = Complex64::from_polar(k as f64, 0.7 * k as f64);
                let err = norm2(&(p.eval(z) - f.reconstruct(z)));
                assert!(err <= 1e-10 * (1.0 + z.norm()) * scale);
            }
        }
    }

    #[test]
    fn resolvent_examples() {
        let r = resolvent(&scalar(1.0, c64(1.0, 0.0)), c64(1.0, 0.0)).unwrap();
        assert!((r[(0, 0)] - c64(0.5, 0.0)).norm() < 1e-15);
        let r = resolvent(&example(), c64(0.0, 0.0)).unwrap();
        assert!(close(&r, &real_matrix(&[&[1.0, -1.0], &[-2.0, 3.0]]), 1e-13));
        assert!(matches!(resolvent(&example(), c64(-1.0, 0.0)), Err(Error::SpectrumHit { .. })));
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&example()).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert!((s.eigenvalues[0] - c64(-1.0, 0.0)).norm() < 1e-14);
        assert!((s.spectral_abscissa + 1.0).abs() < 1e-14);

        let p = Pencil::new(CMatrix::identity(2, 2), real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap();
        let s = spectrum(&p).unwrap();
        assert!(matching_distance(&s.eigenvalues, &[c64(-1.0, 0.0), c64(1.0, 0.0)]) < 1e-14);
        assert!((s.spectral_abscissa - 1.0).abs() < 1e-14);
        assert!((s.imag_axis_margin - 1.0).abs() < 1e-14);

        let s = spectrum(&scalar(1.0, c64(0.0, -2.0))).unwrap();
        assert!((s.eigenvalues[0] - c64(0.0, 2.0)).norm() < 1e-15);
        assert!(s.spectral_abscissa.abs() < 1e-15);
        assert!(s.imag_axis_margin < 1e-15);
    }

    #[test]
    fn empty_spectrum_sentinels() {
        let p = Pencil::new(CMatrix::zeros(2, 2), CMatrix::identity(2, 2)).unwrap();
        let s = spectrum(&p).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.spectral_abscissa, f64::NEG_INFINITY);
        assert_eq!(s.imag_axis_margin, f64::INFINITY);
    }

    #[test]
    fn resolvent_probe_examples() {
        let v = resolvent_bound_probe(&scalar(1.0, c64(1.0, 0.0)), 10.0, 64).unwrap();
        assert!(v <= 1.0 / 9.0 + 1e-15);
        let p = Pencil::new(CMatrix::identity(2, 2), real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap();
        assert!(resolvent_bound_probe(&p, 10.0, 64).unwrap() <= 1.0 / 9.0 + 1e-15);
        let near = resolvent_bound_probe(&example(), 100.0, 64).unwrap();
        let far = resolvent_bound_probe(&example(), 400.0, 64).unwrap();
        assert!(near.is_finite() && far <= 2.0 * near);
        assert!(resolvent_bound_probe(&example(), 1.5, 8).is_err());
    }

    #[test]
    fn reversal() {
        let p = example();
        assert_eq!(p.reversed().reversed(), p);
        let s = spectrum(&p.reversed()).unwrap();
        assert!((s.eigenvalues[0] - c64(1.0, 0.0)).norm() < 1e-14);
        let id = Pencil::new(CMatrix::identity(2, 2), real_matrix(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
        assert_eq!(id.reversed().m1(), &-id.m1());
    }

    #[test]
    fn generator_contract() {
        assert!(matches!(generate_regular(2, 3, 0, None), Err(Error::BadRank { .. })));
        assert!(matches!(
            generate_regular(3, 2, 0, Some(&[c64(-1.0, 0.0)])),
            Err(Error::BadSpectrumHint { .. })
        ));
        let p = generate_regular(1, 1, 4, None).unwrap();
        assert!(is_regular(&p, 1e-10).regular);
        for seed in 0..20 {
            assert!(is_regular(&generate_regular(5, 3, seed, None).unwrap(), 1e-10).regular);
        }
        assert_eq!(generate_regular(4, 2, 9, None).unwrap(), generate_regular(4, 2, 9, None).unwrap());
        let p = generate_regular(2, 1, 1, Some(&[c64(-1.0, 0.0)])).unwrap();
        let s = spectrum(&p).unwrap();
        assert!((s.eigenvalues[0] - c64(-1.0, 0.0)).norm() < 1e-12);
        // independent check: det(zM0 + M1) vanishes at the planted eigenvalue
        let det = linalg::determinant(&p.eval(c64(-1.0, 0.0)));
        assert!(det.norm() < 1e-12);
    }
}
