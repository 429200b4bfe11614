//! Adaptive Simpson quadrature for matrix-valued integrands.

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix};

const MAX_DEPTH: usize = 48;
const MIN_DEPTH: usize = 3;

#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: CMatrix,
    /// Sum of the local `|S₂ − S₁|/15` estimates (max-entry norm).
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

struct Simpson<'a, F> {
    f: &'a mut F,
    evaluations: usize,
    error: f64,
}

impl<F: FnMut(f64) -> Result<CMatrix>> Simpson<'_, F> {
    fn eval(&mut self, x: f64) -> Result<CMatrix> {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: &CMatrix,
        fm: &CMatrix,
        fb: &CMatrix,
        whole: CMatrix,
        tol: f64,
        depth: usize,
    ) -> Result<CMatrix> {
        let m = 0.5 * (a + b);
        let h = b - a;
        let flm = self.eval(0.5 * (a + m))?;
        let frm = self.eval(0.5 * (m + b))?;
        let left = (fa + &flm * c64(4.0, 0.0) + fm) * c64(h / 12.0, 0.0);
        let right = (fm + &frm * c64(4.0, 0.0) + fb) * c64(h / 12.0, 0.0);
        let halves = &left + &right;
        let delta = max_abs(&(&halves - &whole));
        if depth >= MIN_DEPTH && delta <= 15.0 * tol {
            self.error += delta / 15.0;
            return Ok(&halves + (&halves - &whole) * c64(1.0 / 15.0, 0.0));
        }
        if depth >= MAX_DEPTH || m <= a || m >= b {
            return Err(Error::NonConvergent(format!(
                "Simpson refinement stalled on [{a:.6e}, {b:.6e}] with error {:.3e} > {tol:.3e}",
                delta / 15.0
            )));
        }
        let l = self.recurse(a, m, fa, &flm, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.recurse(m, b, fm, &frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }
}

/// `∫_a^b f(s) ds` with absolute error target `tol` in the max-entry norm.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<CMatrix>,
{
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidArgument(format!("bad integration interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance {tol} must be positive")));
    }
    let mut s = Simpson { f: &mut f, evaluations: 0, error: 0.0 };
    let fa = s.eval(a)?;
    if a == b {
        let value = CMatrix::zeros(fa.nrows(), fa.ncols());
        return Ok(Quadrature { value, error_estimate: 0.0, evaluations: 1 });
    }
    let fb = s.eval(b)?;
    let fm = s.eval(0.5 * (a + b))?;
    let whole = (&fa + &fm * c64(4.0, 0.0) + &fb) * c64((b - a) / 6.0, 0.0);
    let value = s.recurse(a, b, &fa, &fm, &fb, whole, tol, 0)?;
    Ok(Quadrature { value, error_estimate: s.error, evaluations: s.evaluations })
}

/// Scalar convenience wrapper around [`adaptive_simpson`].
pub fn adaptive_simpson_real<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let q = adaptive_simpson(|x| Ok(CMatrix::from_element(1, 1, c64(f(x)?, 0.0))), a, b, tol)?;
    Ok((q.value[(0, 0)].re, q.error_estimate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let (v, _) = adaptive_simpson_real(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn exponential() {
        let (v, err) = adaptive_simpson_real(|x| Ok((-4.0 * x).exp()), 0.0, 10.0, 1e-12).unwrap();
        assert!((v - (1.0 - (-40f64).exp()) / 4.0).abs() < 1e-12);
        assert!(err < 1e-11);
    }

    #[test]
    fn oscillatory_matrix_integrand() {
        let q = adaptive_simpson(
            |x| Ok(CMatrix::from_fn(1, 2, |_, j| c64(0.0, (j + 1) as f64 * x).exp())),
            0.0,
            std::f64::consts::PI,
            1e-11,
        )
        .unwrap();
        // ∫ e^{ix} = 2i, ∫ e^{2ix} = 0
        assert!((q.value[(0, 0)] - c64(0.0, 2.0)).norm() < 1e-10);
        assert!(q.value[(0, 1)].norm() < 1e-10);
    }

    #[test]
    fn singular_integrand_fails() {
        let r = adaptive_simpson_real(|x| Ok(1.0 / x.max(1e-300)), 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }

    #[test]
    fn degenerate_interval() {
        assert_eq!(adaptive_simpson_real(|_| Ok(1.0), 1.0, 1.0, 1e-9).unwrap().0, 0.0);
        assert!(adaptive_simpson_real(|_| Ok(1.0), 1.0, 0.0, 1e-9).is_err());
    }
}
