//! Matrix exponential.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMatrix};

/// `exp(t·a)` together with the number of squarings used.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpmResult {
    pub value: CMatrix,
    pub scaling_squaring_order: usize,
}

#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        _ => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
    }
}

fn norm1(a: &CMatrix) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn scaled(a: &CMatrix, s: f64) -> CMatrix {
    a * c64(s, 0.0)
}

/// `[m/m]` Padé approximant of `exp(a)`.
fn pade(a: &CMatrix, m: usize) -> Option<CMatrix> {
    let n = a.nrows();
    let b = pade_coefficients(m);
    let id = CMatrix::identity(n, n);
    let a2 = a * a;
    let (u, v) = if m == 13 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner_u = &a6 * (scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]))
            + scaled(&a6, b[7])
            + scaled(&a4, b[5])
            + scaled(&a2, b[3])
            + scaled(&id, b[1]);
        let u = a * inner_u;
        let v = &a6 * (scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]))
            + scaled(&a6, b[6])
            + scaled(&a4, b[4])
            + scaled(&a2, b[2])
            + scaled(&id, b[0]);
        (u, v)
    } else {
        let mut power = id.clone();
        let mut odd = CMatrix::zeros(n, n);
        let mut even = CMatrix::zeros(n, n);
        for k in 0..=m / 2 {
            even += scaled(&power, b[2 * k]);
            odd += scaled(&power, b[2 * k + 1]);
            power = &power * &a2;
        }
        (a * odd, even)
    };
    let q = &v - &u;
    q.lu().solve(&(v + u))
}

/// `exp(t·a)` by scaling and squaring with diagonal Padé approximants.
pub fn expm(a: &CMatrix, t: f64) -> Result<ExpmResult> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    if !linalg::is_finite(a) {
        return Err(Error::NonFinite("matrix exponential argument"));
    }
    let ta = scaled(a, t);
    let nrm = norm1(&ta);
    for &(m, theta) in &THETA[..4] {
        if nrm <= theta {
            let value = pade(&ta, m).ok_or(Error::Overflow)?;
            return finite(ExpmResult { value, scaling_squaring_order: 0 });
        }
    }
    let s = (nrm / THETA[4].1).log2().ceil().max(0.0) as usize;
    let mut value = pade(&scaled(&ta, 0.5f64.powi(s as i32)), 13).ok_or(Error::Overflow)?;
    for _ in 0..s {
        value = &value * &value;
    }
    finite(ExpmResult { value, scaling_squaring_order: s })
}

fn finite(r: ExpmResult) -> Result<ExpmResult> {
    if linalg::is_finite(&r.value) {
        Ok(r)
    } else {
        Err(Error::Overflow)
    }
}

/// Eigenvector condition number above which [`Propagator`] falls back to Padé.
pub const EIGEN_PATH_MAX_CONDITION: f64 = 1e6;

/// Repeated evaluation of `t ↦ exp(t·a)`.
///
/// Diagonalizable matrices with well-conditioned eigenvectors are
/// decomposed once; each evaluation is then `V diag(e^{tλ}) V⁻¹`.
#[derive(Clone, Debug)]
pub struct Propagator {
    a: CMatrix,
    eigen: Option<(CMatrix, Vec<Complex64>, CMatrix)>,
}

impl Propagator {
    pub fn new(a: &CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NonSquare { rows: a.nrows(), cols: a.ncols() });
        }
        let eigen = linalg::schur(a).and_then(|s| {
            let v = linalg::eigenvectors(&s);
            if linalg::condition_number(&v) >= EIGEN_PATH_MAX_CONDITION {
                return None;
            }
            let v_inv = linalg::inverse(&v)?;
            Some((v, s.eigenvalues(), v_inv))
        });
        Ok(Self { a: a.clone(), eigen })
    }

    pub fn uses_eigen_path(&self) -> bool {
        self.eigen.is_some()
    }

    pub fn generator(&self) -> &CMatrix {
        &self.a
    }

    /// `exp(t·a)`.
    pub fn at(&self, t: f64) -> Result<CMatrix> {
        match &self.eigen {
            Some((v, lambda, v_inv)) => {
                if !t.is_finite() {
                    return Err(Error::InvalidArgument(format!("time {t} is not finite")));
                }
                let mut scaled_v = v.clone();
                for (j, &l) in lambda.iter().enumerate() {
                    let e = (l * t).exp();
                    for x in scaled_v.column_mut(j).iter_mut() {
                        *x *= e;
                    }
                }
                let value = scaled_v * v_inv;
                if linalg::is_finite(&value) {
                    Ok(value)
                } else {
                    Err(Error::Overflow)
                }
            }
            None => expm(&self.a, t).map(|r| r.value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm2, real_matrix};

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        norm2(&(a - b)) / norm2(b).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn examples() {
        let z = expm(&CMatrix::zeros(3, 3), 7.0).unwrap();
        assert_eq!(z.value, CMatrix::identity(3, 3));
        let d = expm(&real_matrix(&[&[-1.0, 0.0], &[0.0, 2.0]]), 1.0).unwrap();
        let expect = real_matrix(&[&[(-1f64).exp(), 0.0], &[0.0, 2f64.exp()]]);
        assert!(rel(&d.value, &expect) < 1e-14);
        let j = expm(&real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]), 1.0).unwrap();
        assert!(rel(&j.value, &real_matrix(&[&[1.0, 1.0], &[0.0, 1.0]])) < 1e-15);
    }

    #[test]
    fn large_norm_uses_squaring() {
        let a = real_matrix(&[&[-3.0, 1.0], &[0.0, -4.0]]);
        let r = expm(&a, 10.0).unwrap();
        assert!(r.scaling_squaring_order > 0);
        let (e3, e4) = ((-30f64).exp(), (-40f64).exp());
        let expect = real_matrix(&[&[e3, e3 - e4], &[0.0, e4]]);
        assert!(norm2(&(r.value - expect)) < 1e-12 * e3);
    }

    #[test]
    fn rotation_generator() {
        let a = real_matrix(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let t = 20.0;
        let r = expm(&a, t).unwrap();
        let expect = real_matrix(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
        assert!(rel(&r.value, &expect) < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let a = real_matrix(&[&[1.0]]);
        assert_eq!(expm(&a, 1000.0), Err(Error::Overflow));
        let p = Propagator::new(&a).unwrap();
        assert_eq!(p.at(1000.0), Err(Error::Overflow));
    }

    #[test]
    fn propagator_paths_agree() {
        let a = real_matrix(&[&[-1.0, 5.0, 0.0], &[0.0, 2.0, 1.0], &[0.3, 0.0, -0.5]]);
        let p = Propagator::new(&a).unwrap();
        assert!(p.uses_eigen_path());
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            assert!(rel(&p.at(t).unwrap(), &expm(&a, t).unwrap().value) < 1e-12);
        }
        let jordan = real_matrix(&[&[-1.0, 1.0], &[0.0, -1.0]]);
        let p = Propagator::new(&jordan).unwrap();
        assert!(!p.uses_eigen_path());
        let e = (-2f64).exp();
        assert!(rel(&p.at(2.0).unwrap(), &real_matrix(&[&[e, 2.0 * e], &[0.0, e]])) < 1e-14);
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(expm(&CMatrix::zeros(0, 0), 1.0).unwrap().value.shape(), (0, 0));
        assert_eq!(Propagator::new(&CMatrix::zeros(0, 0)).unwrap().at(1.0).unwrap().shape(), (0, 0));
    }
}
