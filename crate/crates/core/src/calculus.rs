//! Spectral calculus: `f(A) = U diag(f(lambda)) U*`.

use std::fmt;
use std::sync::Arc;

use crate::eig::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, PsdMatrix};

/// Closed interval `[lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const REAL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const NON_NEGATIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of a real variable with a declared domain.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    domain: Domain,
    eval: Eval,
}

impl ScalarFunction {
    pub fn new(name: impl Into<String>, domain: Domain, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            domain,
            eval: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        Self::new("x", Domain::REAL, |x| x)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), Domain::REAL, move |_| c)
    }

    /// `x^p` with `0^p = 0` for `p > 0` and `x^0 = 1`.
    ///
    /// Non-negative integer exponents are defined on all of R; anything else
    /// is restricted to `[0, inf)`.
    pub fn power(p: f64) -> Self {
        let integral = p >= 0.0 && p.fract() == 0.0 && p <= i32::MAX as f64;
        let domain = if integral { Domain::REAL } else { Domain::NON_NEGATIVE };
        Self::new(format!("x^{p}"), domain, move |x| power_of(x, p))
    }

    /// `a x + b`.
    pub fn affine(a: f64, b: f64) -> Self {
        Self::new(format!("{a}x{b:+}"), Domain::REAL, move |x| a * x + b)
    }

    pub fn exp() -> Self {
        Self::new("exp(x)", Domain::REAL, f64::exp)
    }

    /// `x -> f(x) + c`, same domain.
    pub fn shifted(&self, c: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        Self {
            name: format!("({}){c:+}", self.name),
            domain: self.domain,
            eval: Arc::new(move |x| inner(x) + c),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

pub(crate) fn power_of(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Evaluates `f` on each eigenvalue. Eigenvalues that miss the domain by
/// less than the PSD roundoff band are snapped onto its boundary.
fn eval_on_spectrum(d: &SpectralDecomposition, f: &ScalarFunction) -> Result<Vec<f64>> {
    let band = d.psd_tolerance();
    let dom = f.domain();
    d.eigenvalues()
        .iter()
        .map(|&l| {
            let x = if dom.contains(l) {
                l
            } else if l < dom.lo && l >= dom.lo - band {
                dom.lo
            } else if l > dom.hi && l <= dom.hi + band {
                dom.hi
            } else {
                return Err(Error::DomainViolation {
                    function: f.name().to_owned(),
                    eigenvalue: l,
                });
            };
            let y = f.eval(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::DomainViolation {
                    function: f.name().to_owned(),
                    eigenvalue: l,
                })
            }
        })
        .collect()
}

/// `f(A)` from a spectral decomposition of `A`.
pub fn matrix_function(d: &SpectralDecomposition, f: &ScalarFunction) -> Result<HermitianMatrix> {
    let values = eval_on_spectrum(d, f)?;
    Ok(HermitianMatrix::from_hermitian_part(&d.synthesize(&values)))
}

/// `f` evaluated at each eigenvalue, in ascending eigenvalue order.
pub fn spectrum_values(d: &SpectralDecomposition, f: &ScalarFunction) -> Result<Vec<f64>> {
    eval_on_spectrum(d, f)
}

/// `T^p` for `p >= 0`, with `0^p = 0` (`p > 0`) and `0^0 = 1`.
pub fn fractional_power(t: &PsdMatrix, p: f64) -> Result<PsdMatrix> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    let d = t.decomposition();
    let tol = d.psd_tolerance();
    let min = d.min_eigenvalue();
    if min < -tol {
        return Err(Error::NegativeEigenvalue { value: min, tol });
    }
    let powered: Vec<f64> = d.eigenvalues().iter().map(|&l| power_of(l.max(0.0), p)).collect();
    let herm = HermitianMatrix::from_hermitian_part(&d.synthesize(&powered));
    // x -> x^p is non-decreasing on [0, inf), so the ascending order survives.
    let decomp = SpectralDecomposition::from_parts(powered, d.eigenvectors().clone());
    PsdMatrix::with_decomposition(herm, decomp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;

    fn rel_err(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.sub(b).unwrap().max_abs() / b.max_abs().max(f64::MIN_POSITIVE)
    }

    fn psd_sample() -> PsdMatrix {
        let g = ComplexMatrix::from_parts(
            &[
                vec![0.3, -1.2, 0.5, 0.9],
                vec![1.1, 0.4, -0.7, 0.2],
                vec![-0.6, 0.8, 1.3, -0.1],
                vec![0.2, -0.3, 0.6, 1.0],
            ],
            &[
                vec![0.7, 0.1, -0.4, 0.3],
                vec![-0.2, 0.9, 0.6, -1.1],
                vec![0.5, -0.5, 0.2, 0.4],
                vec![-0.8, 0.3, 0.1, -0.6],
            ],
        )
        .unwrap();
        PsdMatrix::from_matrix(g.matmul(&g.adjoint()).unwrap()).unwrap()
    }

    #[test]
    fn identity_function_reconstructs() {
        let t = psd_sample();
        let back = matrix_function(t.decomposition(), &ScalarFunction::identity()).unwrap();
        assert!(rel_err(back.matrix(), t.matrix()) <= 1e-11);
    }

    #[test]
    fn zeroth_power_is_identity() {
        let t = psd_sample();
        let id = matrix_function(t.decomposition(), &ScalarFunction::power(0.0)).unwrap();
        assert!(id.matrix().sub(&ComplexMatrix::identity(4)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn square_of_diagonal() {
        let t = PsdMatrix::from_diag(&[1.0, 2.0, 3.0]).unwrap();
        let sq = matrix_function(t.decomposition(), &ScalarFunction::power(2.0)).unwrap();
        assert_eq!(sq.matrix(), &ComplexMatrix::from_diag(&[1.0, 4.0, 9.0]));
    }

    #[test]
    fn domain_violation_names_eigenvalue() {
        let h = HermitianMatrix::from_real_diag(&[-2.0, 1.0]);
        let d = h.eig().unwrap();
        let err = matrix_function(&d, &ScalarFunction::power(0.5)).unwrap_err();
        assert_eq!(
            err,
            Error::DomainViolation {
                function: "x^0.5".into(),
                eigenvalue: -2.0
            }
        );
        // integer powers live on all of R
        assert!(matrix_function(&d, &ScalarFunction::power(2.0)).is_ok());
    }

    #[test]
    fn fractional_power_basics() {
        let id = PsdMatrix::identity(3);
        for p in [0.0, 0.3, 1.0, 2.5] {
            let r = fractional_power(&id, p).unwrap();
            assert!(r.matrix().sub(&ComplexMatrix::identity(3)).unwrap().max_abs() < 1e-15);
        }
        let t = PsdMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let root = fractional_power(&t, 0.5).unwrap();
        assert_eq!(root.matrix(), &ComplexMatrix::from_diag(&[1.0, 2.0]));

        let t = psd_sample();
        let root = fractional_power(&t, 0.5).unwrap();
        let sq = root.matrix().matmul(root.matrix()).unwrap();
        assert!(rel_err(&sq, t.matrix()) <= 1e-10);
        let one = fractional_power(&t, 1.0).unwrap();
        assert!(rel_err(one.matrix(), t.matrix()) <= 1e-11);
    }

    #[test]
    fn zero_eigenvalue_conventions() {
        let t = PsdMatrix::from_diag(&[0.0, 4.0]).unwrap();
        let half = fractional_power(&t, 0.5).unwrap();
        assert_eq!(half.matrix(), &ComplexMatrix::from_diag(&[0.0, 2.0]));
        let zeroth = fractional_power(&t, 0.0).unwrap();
        assert_eq!(zeroth.matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn rejects_bad_exponent() {
        let t = PsdMatrix::identity(2);
        assert_eq!(fractional_power(&t, -1.0).unwrap_err(), Error::InvalidExponent(-1.0));
        assert!(fractional_power(&t, f64::NAN).is_err());
    }

    #[test]
    fn powers_compose() {
        let t = psd_sample();
        let d = t.decomposition();
        assert!(d.min_eigenvalue() >= 1e-6);
        for (a, b) in [(0.25, 0.5), (1.0 / 3.0, 2.0 / 3.0), (1.5, 0.7)] {
            let pa = matrix_function(d, &ScalarFunction::power(a)).unwrap();
            let pb = matrix_function(d, &ScalarFunction::power(b)).unwrap();
            let pab = matrix_function(d, &ScalarFunction::power(a + b)).unwrap();
            let prod = pa.matrix().matmul(pb.matrix()).unwrap();
            assert!(rel_err(&prod, pab.matrix()) <= 1e-10);
        }
    }
}
