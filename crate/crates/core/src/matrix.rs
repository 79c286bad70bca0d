//! Dense complex square matrices and the Hermitian / positive semidefinite
//! wrappers used throughout the crate.
//!
//! Storage is row-major `Vec<Complex64>`. Every size that shows up here is
//! tiny (n <= 64), so all kernels are straightforward triple loops.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::{hermitian_eig, SpectralDecomposition};
use crate::error::{Error, Result};

/// Largest supported matrix order.
pub const MAX_DIM: usize = 64;

/// Relative Hermitian tolerance: `|M - M*|_max <= HERM_TOL * |M|_max`.
pub const HERM_TOL: f64 = 1e-12;

/// Relative PSD tolerance: `lambda_min >= -PSD_TOL * spectral_radius`.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let dim = re.len();
        if im.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: im.len(),
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, (re_row, im_row)) in re.iter().zip(im).enumerate() {
            if re_row.len() != dim || im_row.len() != dim {
                return Err(Error::Format(format!(
                    "row {r} has {} real / {} imaginary entries, expected {dim}",
                    re_row.len(),
                    im_row.len()
                )));
            }
            data.extend(re_row.iter().zip(im_row).map(|(&a, &b)| Complex64::new(a, b)));
        }
        Self::new(dim, data)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let zeros: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        Self::from_parts(rows, &zeros)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn re_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.re).collect()).collect()
    }

    pub fn im_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.iter().map(|z| z.im).collect()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = &rhs.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `M^k` by repeated multiplication (`M^0 = I`).
    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = out.matmul(self).expect("same dimension");
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Max-abs-entry norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M - M*|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(M + M*) / 2`, Hermitian up to exact equality.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `|U*U - I|_max`.
    pub fn unitary_deviation(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("square");
        gram.sub(&Self::identity(self.dim)).expect("square").max_abs()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixFile::from(self)).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.try_into()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// On-disk matrix layout: `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim,
            re: m.re_rows(),
            im: m.im_rows(),
        }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(file: MatrixFile) -> Result<Self> {
        let m = ComplexMatrix::from_parts(&file.re, &file.im)?;
        if m.dim != file.dim {
            return Err(Error::Format(format!(
                "declared dim {} but rows describe a {}x{} matrix",
                file.dim, m.dim, m.dim
            )));
        }
        Ok(m)
    }
}

/// A complex matrix equal to its conjugate transpose.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `|M - M*|_max <= 1e-12 |M|_max`, then symmetrizes exactly.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let tol = HERM_TOL * m.max_abs();
        let deviation = m.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Projects onto the Hermitian part without a tolerance check. Meant for
    /// products that are Hermitian in exact arithmetic.
    pub fn from_hermitian_part(m: &ComplexMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self(ComplexMatrix::from_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        hermitian_eig(self)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(Complex64::new(c, 0.0)))
    }
}

impl AsRef<HermitianMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        self
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

/// A Hermitian matrix whose spectrum is non-negative up to
/// `PSD_TOL * spectral_radius`. The spectral decomposition computed during
/// validation is kept, so fractional powers never re-diagonalize.
#[derive(Clone)]
pub struct PsdMatrix {
    herm: HermitianMatrix,
    decomp: SpectralDecomposition,
}

impl PsdMatrix {
    pub fn new(herm: HermitianMatrix) -> Result<Self> {
        let decomp = herm.eig()?;
        Self::with_decomposition(herm, decomp)
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Diagonal PSD matrix; entries must be non-negative.
    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim]).expect("identity is PSD")
    }

    pub(crate) fn with_decomposition(herm: HermitianMatrix, decomp: SpectralDecomposition) -> Result<Self> {
        let tol = decomp.psd_tolerance();
        let min = decomp.min_eigenvalue();
        if min < -tol {
            return Err(Error::NegativeEigenvalue { value: min, tol });
        }
        Ok(Self { herm, decomp })
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.herm.matrix()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    /// Smallest eigenvalue after clamping roundoff negatives to zero.
    pub fn min_eigenvalue(&self) -> f64 {
        self.decomp.min_eigenvalue().max(0.0)
    }

    /// `c * T` for `c >= 0`, reusing the eigenvectors.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParameter(format!("PSD scale factor must be >= 0, got {c}")));
        }
        let decomp = SpectralDecomposition::from_parts(
            self.decomp.eigenvalues().iter().map(|l| l * c).collect(),
            self.decomp.eigenvectors().clone(),
        );
        Ok(Self {
            herm: self.herm.scale(c),
            decomp,
        })
    }
}

impl AsRef<HermitianMatrix> for PsdMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.herm
    }
}

impl fmt::Debug for PsdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Psd{:?}", self.herm.matrix())
    }
}

/// `Tr[M]`.
pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// `A * B`, failing on mismatched dimensions.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

/// Left-to-right product of a non-empty sequence of matrices.
pub fn product<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty matrix product".into()))?;
    iter.try_fold(first.clone(), |acc, m| acc.matmul(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(seed: u64) -> ComplexMatrix {
        // small LCG; keeps these tests independent of the sampling module
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let data = (0..9).map(|_| c(next(), next())).collect();
        ComplexMatrix::new(3, data).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_bad_shape() {
        assert!(matches!(
            ComplexMatrix::new(2, vec![c(0.0, 0.0); 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut data = vec![c(1.0, 0.0); 4];
        data[3] = c(f64::NAN, 0.0);
        assert_eq!(
            ComplexMatrix::new(2, data).unwrap_err(),
            Error::NonFinite { row: 1, col: 1 }
        );
        assert!(matches!(ComplexMatrix::new(0, vec![]), Err(Error::UnsupportedDimension(0))));
    }

    #[test]
    fn trace_of_simple_matrices() {
        assert_eq!(trace(&ComplexMatrix::identity(3)), c(3.0, 0.0));
        assert_eq!(trace(&ComplexMatrix::from_diag(&[1.0, 2.0, 3.0])), c(6.0, 0.0));
    }

    #[test]
    fn identity_is_neutral() {
        let a = sample(1);
        let i = ComplexMatrix::identity(3);
        assert_eq!(matmul(&a, &i).unwrap(), a);
        assert_eq!(matmul(&i, &a).unwrap(), a);
    }

    #[test]
    fn matmul_dimension_mismatch() {
        let err = matmul(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn trace_is_cyclic_and_product_associative() {
        for seed in 0..20 {
            let (a, b, cm) = (sample(seed), sample(seed + 100), sample(seed + 200));
            let ab = trace(&matmul(&a, &b).unwrap());
            let ba = trace(&matmul(&b, &a).unwrap());
            assert!((ab - ba).norm() <= 1e-12 * ab.norm().max(1.0));

            let left = matmul(&matmul(&a, &b).unwrap(), &cm).unwrap();
            let right = matmul(&a, &matmul(&b, &cm).unwrap()).unwrap();
            assert!(left.sub(&right).unwrap().max_abs() <= 1e-12 * left.max_abs().max(1.0));
        }
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let mut m = ComplexMatrix::from_parts(
            &[vec![1.0, 2.0], vec![2.0, 3.0]],
            &[vec![0.0, 1.0], vec![-1.0, 0.0]],
        )
        .unwrap();
        m[(1, 0)] += c(1e-15, 0.0);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);

        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(HermitianMatrix::new(bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_rejects_indefinite() {
        let h = HermitianMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(PsdMatrix::new(h), Err(Error::NegativeEigenvalue { .. })));
        // roundoff-level negatives are clamped
        let h = HermitianMatrix::from_real_diag(&[1.0, -1e-14]);
        let p = PsdMatrix::new(h).unwrap();
        assert_eq!(p.min_eigenvalue(), 0.0);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let a = sample(7);
        let back = ComplexMatrix::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn json_rejects_inconsistent_dim() {
        let text = r#"{"dim": 3, "re": [[1,0],[0,1]], "im": [[0,0],[0,0]]}"#;
        assert!(matches!(ComplexMatrix::from_json(text), Err(Error::Format(_))));
        let text = r#"{"dim": 2, "re": [[1,0],[0,1]], "im": [[0,0],[0,0]], "extra": 1}"#;
        assert!(ComplexMatrix::from_json(text).is_err());
    }
}
