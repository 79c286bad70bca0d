//! Seeded generation of Hermitian and PSD matrices and weight vectors.
//!
//! Streams are fully specified so that other implementations can replicate
//! them bit for bit:
//!
//! * A [`Seed`] is split with [`Seed::derive`]: `splitmix64(seed ^ splitmix64(j))`,
//!   where `splitmix64` is the standard finalizer
//!   (`z += 0x9E3779B97F4A7C15; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ z>>27) * 0x94D049BB133111EB; z ^ z>>31`).
//! * Each generator call seeds `ChaCha8Rng::seed_from_u64(seed)` (rand_core's
//!   PCG32-based seed expansion) and draws uniforms as
//!   `(next_u64 >> 11) * 2^-53`.
//! * Standard normals use the cosine branch of Box-Muller:
//!   `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`, consuming two uniforms per variate.
//! * Exponentials are `-ln(1 - u)`.
//!
//! Complex Gaussian entries are drawn row-major, real part first.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checkers::WeightVector;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, PsdMatrix, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent sub-seed for item `j` of a batch.
    pub fn derive(self, j: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(j)))
    }

    /// Sub-seed along a path of indices, e.g. `[stream, dim, sample]`.
    pub fn derive_path(self, path: &[u64]) -> Seed {
        path.iter().fold(self, |s, &j| s.derive(j))
    }

    pub fn rng(self) -> Gaussian {
        Gaussian {
            rng: ChaCha8Rng::seed_from_u64(self.0),
        }
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Seed {
    type Err = Error;

    /// Decimal or `0x`-prefixed hexadecimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => s.parse::<u64>(),
        };
        parsed
            .map(Seed)
            .map_err(|e| Error::InvalidParameter(format!("bad seed `{s}`: {e}")))
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform / normal / exponential variates from one ChaCha8 stream.
pub struct Gaussian {
    rng: ChaCha8Rng,
}

impl Gaussian {
    pub fn uniform(&mut self) -> f64 {
        (self.rng.gen::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.uniform()).ln()
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.normal();
        let im = self.normal();
        Complex64::new(re, im)
    }

    /// Integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((self.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
    }
}

fn check_sample_dim(n: usize) {
    assert!((2..=MAX_DIM).contains(&n), "sample dimension {n} outside 2..={MAX_DIM}");
}

/// Square Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre(n: usize, cols: usize, seed: Seed) -> Vec<Complex64> {
    let mut g = seed.rng();
    (0..n * cols).map(|_| g.complex_normal()).collect()
}

/// `(G + G*) / 2` for a square Ginibre `G`.
pub fn sample_hermitian(n: usize, seed: Seed) -> HermitianMatrix {
    check_sample_dim(n);
    let g = ComplexMatrix::new(n, ginibre(n, n, seed)).expect("finite normals");
    HermitianMatrix::from_hermitian_part(&g)
}

/// `G G*` for a square Ginibre `G`.
pub fn sample_psd(n: usize, seed: Seed) -> PsdMatrix {
    sample_psd_with_rank(n, n, seed)
}

/// `G G* + eps I`.
pub fn sample_psd_shifted(n: usize, seed: Seed, eps: f64) -> PsdMatrix {
    let t = sample_psd(n, seed);
    if eps == 0.0 {
        return t;
    }
    let shifted = t
        .matrix()
        .add(&ComplexMatrix::identity(n).scale(Complex64::new(eps, 0.0)))
        .expect("same dim");
    PsdMatrix::new(HermitianMatrix::from_hermitian_part(&shifted)).expect("shifted PSD")
}

/// `G G*` with `G` of shape `n x rank`, so the result has rank `<= rank`.
pub fn sample_psd_with_rank(n: usize, rank: usize, seed: Seed) -> PsdMatrix {
    check_sample_dim(n);
    assert!(rank >= 1 && rank <= n, "rank {rank} outside 1..={n}");
    let g = ginibre(n, rank, seed);
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z: Complex64 = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    PsdMatrix::new(HermitianMatrix::from_hermitian_part(&m)).expect("Gram matrix is PSD")
}

/// Haar-like unitary: eigenvectors of a sampled Hermitian matrix.
pub fn sample_unitary(n: usize, seed: Seed) -> ComplexMatrix {
    sample_hermitian(n, seed)
        .eig()
        .expect("Jacobi converges on sampled matrices")
        .eigenvectors()
        .clone()
}

/// `U diag(lambda) U*` with log-uniform eigenvalues in `[1/max_ratio, 1]`.
pub fn sample_psd_ill_conditioned(n: usize, seed: Seed, max_ratio: f64) -> PsdMatrix {
    check_sample_dim(n);
    assert!(max_ratio >= 1.0, "condition ratio must be >= 1");
    let u = sample_unitary(n, seed.derive(0));
    let mut g = seed.derive(1).rng();
    let log_span = max_ratio.ln();
    let lambdas: Vec<f64> = (0..n).map(|_| (-log_span * g.uniform()).exp()).collect();
    let diag = ComplexMatrix::from_diag(&lambdas);
    let m = u.matmul(&diag).and_then(|x| x.matmul(&u.adjoint())).expect("same dim");
    PsdMatrix::new(HermitianMatrix::from_hermitian_part(&m)).expect("positive spectrum")
}

/// Normalized i.i.d. exponentials.
pub fn sample_weights(m: usize, seed: Seed) -> WeightVector {
    assert!(m >= 1, "weight count must be >= 1");
    if m == 1 {
        return WeightVector::uniform(1);
    }
    let mut g = seed.rng();
    let raw: Vec<f64> = (0..m).map(|_| g.exponential().max(f64::MIN_POSITIVE)).collect();
    let total: f64 = raw.iter().sum();
    WeightVector::new(raw.iter().map(|x| x / total).collect()).expect("normalized exponentials")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse_decimal_and_hex() {
        assert_eq!("42".parse::<Seed>().unwrap(), Seed(42));
        assert_eq!("0x2a".parse::<Seed>().unwrap(), Seed(42));
        assert_eq!("0XFF".parse::<Seed>().unwrap(), Seed(255));
        assert!("-1".parse::<Seed>().is_err());
        assert!("0xzz".parse::<Seed>().is_err());
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs of the reference SplitMix64 generator seeded with 0
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn hermitian_is_deterministic_and_exact() {
        let a = sample_hermitian(2, Seed(42));
        let b = sample_hermitian(2, Seed(42));
        assert_eq!(a, b);
        assert_eq!(a.matrix().hermitian_deviation(), 0.0);
        assert_ne!(a, sample_hermitian(2, Seed(43)));
    }

    #[test]
    fn hermitian_diagonal_mean_is_zero() {
        let mut sum = 0.0;
        let mut count = 0.0;
        for j in 0..10_000 {
            let h = sample_hermitian(2, Seed(5).derive(j));
            sum += h.matrix()[(0, 0)].re + h.matrix()[(1, 1)].re;
            count += 2.0;
        }
        assert!((sum / count).abs() < 0.05);
    }

    #[test]
    fn psd_samples_are_invertible() {
        for j in 0..1000 {
            let t = sample_psd(3, Seed(9).derive(j));
            assert!(t.decomposition().min_eigenvalue() > 0.0);
        }
        assert_eq!(sample_psd(3, Seed(1)).matrix(), sample_psd(3, Seed(1)).matrix());
    }

    #[test]
    fn low_rank_and_ill_conditioned() {
        let a = sample_psd_with_rank(4, 2, Seed(3));
        let ev = a.decomposition().eigenvalues();
        assert!(ev[0].abs() < 1e-12 * ev[3] && ev[1].abs() < 1e-12 * ev[3]);

        let t = sample_psd_ill_conditioned(3, Seed(3), 1e6);
        let ev = t.decomposition().eigenvalues();
        assert!(ev[0] >= 0.9e-6 && ev[2] <= 1.0 + 1e-12);
    }

    #[test]
    fn weights_are_normalized() {
        assert_eq!(sample_weights(1, Seed(0)).as_slice(), &[1.0]);
        let mut mean = 0.0;
        for j in 0..10_000 {
            let w = sample_weights(4, Seed(11).derive(j));
            assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(w.as_slice().iter().all(|&p| p > 0.0));
            mean += w.as_slice()[0];
        }
        mean /= 10_000.0;
        assert!((mean - 0.25).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn derive_is_order_sensitive() {
        let s = Seed(7);
        assert_ne!(s.derive_path(&[1, 2]), s.derive_path(&[2, 1]));
        assert_eq!(s.derive_path(&[1, 2]), s.derive(1).derive(2));
    }
}
