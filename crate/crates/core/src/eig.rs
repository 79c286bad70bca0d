//! Hermitian eigendecomposition by cyclic complex Jacobi sweeps.
//!
//! Each rotation first removes the phase of the pivot `a_pq = |a_pq| e^{i phi}`
//! with `diag(1, e^{-i phi})`, then applies the real symmetric Jacobi rotation
//! to the now-real 2x2 block. The accumulated unitary holds the eigenvectors.

use num_complex::Complex64;

use crate::matrix::{ComplexMatrix, HermitianMatrix, PSD_TOL};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

/// Convergence threshold on the off-diagonal Frobenius mass, relative to `|M|_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub(crate) fn from_parts(eigenvalues: Vec<f64>, eigenvectors: ComplexMatrix) -> Self {
        debug_assert_eq!(eigenvalues.len(), eigenvectors.dim());
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors `|psi_i>`.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// The i-th eigenvector as a column.
    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|r| self.eigenvectors[(r, i)]).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()))
    }

    /// Roundoff band below zero still accepted as PSD.
    pub fn psd_tolerance(&self) -> f64 {
        PSD_TOL * self.spectral_radius()
    }

    /// `U diag(values) U*` for a caller-supplied diagonal.
    pub fn synthesize(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &v) in values.iter().enumerate() {
                    if v != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * v;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    /// `U diag(lambda) U*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.synthesize(&self.eigenvalues)
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Sweeps over all pairs `(p, q)` in row order until the off-diagonal
/// Frobenius mass drops to `1e-14 |M|_F`, for at most 100 sweeps.
/// Output is deterministic for a fixed input.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let mut a = m.matrix().clone();
    let mut u = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut u, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = u[(r, src)];
        }
    }
    Ok(SpectralDecomposition::from_parts(eigenvalues, vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation `A <- V* A V`, `U <- U V` annihilating `a_pq`.
fn rotate(a: &mut ComplexMatrix, u: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // phase = e^{-i phi}
    let phase = apq.conj() / abs;

    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau.is_infinite() {
        0.0
    } else {
        let t = 1.0 / (tau.abs() + (1.0 + tau * tau).sqrt());
        if tau >= 0.0 { t } else { -t }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on rows/cols (p, q).
    let vpp = Complex64::new(c, 0.0);
    let vpq = Complex64::new(s, 0.0);
    let vqp = -phase * s;
    let vqq = phase * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp * vpp + ukq * vqp;
        u[(k, q)] = ukp * vpq + ukq * vqq;
    }
}
