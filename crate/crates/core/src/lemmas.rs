//! Cyclic binary index sequences and the matrix-element products they index.
//!
//! For a cycle `(i_1, .., i_m)` over `{0, 1}` the predecessor map is
//! `pi(1) = m, pi(j) = j - 1`. Positions where `i_j = i_{pi(j)}` form `S`;
//! the rest are the "different-edge arcs" whose count is always even.

use num_complex::Complex64;

use crate::checkers::basis_elements;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, PsdMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexCycle(Vec<u8>);

impl IndexCycle {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("index cycle must be non-empty".into()));
        }
        if let Some((position, &value)) = indices.iter().enumerate().find(|(_, v)| **v > 1) {
            return Err(Error::InvalidIndex { position, value });
        }
        Ok(Self(indices))
    }

    /// Cycle of length `m` whose j-th entry (0-based) is bit j of `bits`.
    pub fn from_bits(bits: u64, m: usize) -> Self {
        assert!((1..=64).contains(&m));
        Self((0..m).map(|j| ((bits >> j) & 1) as u8).collect())
    }

    /// Every cycle of length `m`, in `from_bits` order.
    pub fn all(m: usize) -> impl Iterator<Item = IndexCycle> {
        assert!((1..=24).contains(&m), "exhaustive enumeration limited to m <= 24");
        (0..1u64 << m).map(move |b| Self::from_bits(b, m))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    /// 0-based predecessor position: `pi(0) = m - 1`, `pi(j) = j - 1`.
    fn predecessor(&self, j: usize) -> usize {
        if j == 0 {
            self.0.len() - 1
        } else {
            j - 1
        }
    }
}

/// Split of the cycle positions into equal-edge (`S`) and different-edge arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDecomposition {
    /// 1-based positions `j` with `i_j = i_{pi(j)}`.
    pub same_positions: Vec<usize>,
    pub same_count: usize,
    pub diff_count: usize,
}

impl ArcDecomposition {
    pub fn diff_positions(&self) -> Vec<usize> {
        let m = self.same_count + self.diff_count;
        (1..=m).filter(|j| !self.same_positions.contains(j)).collect()
    }
}

pub fn arc_parity(c: &IndexCycle) -> ArcDecomposition {
    let idx = c.indices();
    let same_positions: Vec<usize> = (0..idx.len())
        .filter(|&j| idx[j] == idx[c.predecessor(j)])
        .map(|j| j + 1)
        .collect();
    let same_count = same_positions.len();
    let diff_count = idx.len() - same_count;
    debug_assert!(diff_count.is_multiple_of(2), "odd number of different-edge arcs in {idx:?}");
    ArcDecomposition {
        same_positions,
        same_count,
        diff_count,
    }
}

/// Different-edge count using the successor orientation `j -> j + 1`.
pub fn diff_count_successor(c: &IndexCycle) -> usize {
    let idx = c.indices();
    let m = idx.len();
    (0..m).filter(|&j| idx[j] != idx[(j + 1) % m]).count()
}

fn basis_matrix_elements(a: &PsdMatrix, basis: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    if a.dim() != 2 {
        return Err(Error::DimensionViolation {
            expected: 2,
            found: a.dim(),
        });
    }
    if basis.dim() != 2 {
        return Err(Error::DimensionViolation {
            expected: 2,
            found: basis.dim(),
        });
    }
    let deviation = basis.unitary_deviation();
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    basis_elements(a.matrix(), basis)
}

/// `prod_j <psi_{i_pi(j)}|A|psi_{i_j}>` for a 2x2 PSD `A` and an orthonormal
/// basis given as the columns of `basis`.
pub fn chain_phase_product(a: &PsdMatrix, basis: &ComplexMatrix, c: &IndexCycle) -> Result<Complex64> {
    let el = basis_matrix_elements(a, basis)?;
    let idx = c.indices();
    Ok((0..idx.len())
        .map(|j| el[idx[c.predecessor(j)] as usize][idx[j] as usize])
        .product())
}

/// The same product split as `(equal-edge part, |<psi_0|A|psi_1>|^diff_count)`.
/// The equal-edge part is a product of diagonal elements, each real and >= 0.
pub fn factorized_phase_product(a: &PsdMatrix, basis: &ComplexMatrix, c: &IndexCycle) -> Result<(f64, f64)> {
    let el = basis_matrix_elements(a, basis)?;
    let arcs = arc_parity(c);
    let idx = c.indices();
    let same: f64 = arcs
        .same_positions
        .iter()
        .map(|&j| el[idx[j - 1] as usize][idx[j - 1] as usize].re)
        .product();
    let off = el[0][1].norm().powi(arcs.diff_count as i32);
    Ok((same, off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_psd, sample_unitary, Seed};

    #[test]
    fn worked_example() {
        let c = IndexCycle::new(vec![0, 0, 1, 1, 0, 1, 0]).unwrap();
        let arcs = arc_parity(&c);
        assert_eq!(arcs.same_positions, vec![1, 2, 4]);
        assert_eq!(arcs.diff_positions(), vec![3, 5, 6, 7]);
        assert_eq!(arcs.diff_count, 4);
    }

    #[test]
    fn trivial_cycles() {
        for m in 1..10 {
            assert_eq!(arc_parity(&IndexCycle::new(vec![0; m]).unwrap()).diff_count, 0);
        }
        assert_eq!(arc_parity(&IndexCycle::new(vec![0, 1]).unwrap()).diff_count, 2);
        assert_eq!(arc_parity(&IndexCycle::new(vec![1]).unwrap()).diff_count, 0);
    }

    #[test]
    fn rejects_non_binary() {
        assert_eq!(
            IndexCycle::new(vec![0, 2]).unwrap_err(),
            Error::InvalidIndex { position: 1, value: 2 }
        );
        assert!(IndexCycle::new(vec![]).is_err());
    }

    #[test]
    fn orientations_agree() {
        for m in 1..=10 {
            for c in IndexCycle::all(m) {
                assert_eq!(arc_parity(&c).diff_count, diff_count_successor(&c));
            }
        }
    }

    #[test]
    fn identity_in_standard_basis() {
        let a = PsdMatrix::identity(2);
        let basis = ComplexMatrix::identity(2);
        for c in IndexCycle::all(5) {
            let z = chain_phase_product(&a, &basis, &c).unwrap();
            let uniform = c.indices().iter().all(|&i| i == c.indices()[0]);
            assert_eq!(z, Complex64::new(if uniform { 1.0 } else { 0.0 }, 0.0));
        }
    }

    #[test]
    fn worked_example_factorization() {
        let a = sample_psd(2, Seed(21));
        let basis = sample_unitary(2, Seed(22));
        let c = IndexCycle::new(vec![0, 0, 1, 1, 0, 1, 0]).unwrap();
        let el = basis_elements(a.matrix(), &basis).unwrap();
        let want = el[0][0].re.powi(2) * el[1][1].re * el[0][1].norm().powi(4);
        let z = chain_phase_product(&a, &basis, &c).unwrap();
        assert!((z.re - want).abs() <= 1e-12 * want && z.im.abs() <= 1e-12 * want);
        let (same, off) = factorized_phase_product(&a, &basis, &c).unwrap();
        assert!((same * off - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a3 = sample_psd(3, Seed(1));
        let c = IndexCycle::new(vec![0, 1]).unwrap();
        assert!(matches!(
            chain_phase_product(&a3, &ComplexMatrix::identity(2), &c),
            Err(Error::DimensionViolation { .. })
        ));
        let a = sample_psd(2, Seed(1));
        let skew = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(chain_phase_product(&a, &skew, &c), Err(Error::NotUnitary { .. })));
    }
}
