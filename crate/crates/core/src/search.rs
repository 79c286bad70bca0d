//! Randomized falsification of the two open chain conjectures and the 3x3
//! complex-trace instance.
//!
//! For PSD `T`, `A` and weights `p`, with `chain = Tr[T^{p_1}A..T^{p_m}A]`:
//!
//! * (i)  `Tr[(T^{1/m}A)^m] <= Re(chain)`
//! * (ii) `|chain| <= Tr[T A^m]`
//!
//! Both hold for 2x2 inputs. A violation found for larger `n` is a result in
//! its own right; the report carries the full instance so it can be replayed.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::checkers::{power_chain_lower, power_chain_upper, trace_chain, ComplexValue, WeightVector, DEFAULT_REL_TOL};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, MatrixFile, PsdMatrix};
use crate::sampling::{
    sample_hermitian, sample_psd, sample_psd_ill_conditioned, sample_psd_with_rank, sample_weights, Seed,
};

pub const GOLDEN_RE: f64 = 116.037;
pub const GOLDEN_IM: f64 = 0.002_603_06;
pub const GOLDEN_RE_TOL: f64 = 5e-3;
pub const GOLDEN_IM_TOL: f64 = 5e-8;

/// Largest eigenvalue ratio of `T` in stress mode.
pub const STRESS_CONDITION: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conjecture {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conjecture::I => "i",
            Conjecture::II => "ii",
        })
    }
}

impl FromStr for Conjecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Conjecture::I),
            "ii" | "2" => Ok(Conjecture::II),
            other => Err(Error::InvalidParameter(format!("unknown conjecture `{other}` (expected i or ii)"))),
        }
    }
}

/// Slack of one conjecture instance together with the terms it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackEvaluation {
    pub slack: f64,
    pub chain: Complex64,
    /// `Tr[(T^{1/m}A)^m]` for (i), `Tr[T A^m]` for (ii).
    pub bound: Complex64,
}

impl SlackEvaluation {
    /// Tolerance band `rel * max(|chain|, |bound|, 1)`.
    pub fn tol(&self, rel: f64) -> f64 {
        rel * self.chain.norm().max(self.bound.norm()).max(1.0)
    }

    pub fn violates(&self, rel: f64) -> bool {
        self.slack < -self.tol(rel)
    }
}

pub fn evaluate_conjecture(
    which: Conjecture,
    t: &PsdMatrix,
    a: &HermitianMatrix,
    w: &WeightVector,
) -> Result<SlackEvaluation> {
    let chain = trace_chain(t, a, w)?;
    let m = w.len() as u32;
    Ok(match which {
        Conjecture::I => {
            let bound = power_chain_lower(t, a, m)?;
            SlackEvaluation {
                slack: chain.re - bound.re,
                chain,
                bound,
            }
        }
        Conjecture::II => {
            let bound = power_chain_upper(t, a, m)?;
            SlackEvaluation {
                slack: bound.re - chain.norm(),
                chain,
                bound,
            }
        }
    })
}

/// (i): `Re(chain) - Tr[(T^{1/m}A)^m]`; (ii): `Tr[TA^m] - |chain|`.
pub fn conjecture_slack(which: Conjecture, t: &PsdMatrix, a: &HermitianMatrix, w: &WeightVector) -> Result<f64> {
    evaluate_conjecture(which, t, a, w).map(|e| e.slack)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// `T`, `A` both `G G*` with square Ginibre `G`.
    #[default]
    Ginibre,
    /// `T` with log-uniform spectrum spanning `1e6`, `A` of rank `n - 1`
    /// plus a `1e-8` relative ridge.
    Stress,
    /// `T = I`; every slack is zero. Used to exercise the harness itself.
    IdentityT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub mode: SamplingMode,
    /// Sample `A` as a Hermitian rather than PSD matrix. Outside the stated
    /// hypotheses; exploratory only.
    pub relax_a_hermitian: bool,
    pub rel_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mode: SamplingMode::Ginibre,
            relax_a_hermitian: false,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

/// A fully specified search instance.
pub struct Instance {
    pub t: PsdMatrix,
    pub a: HermitianMatrix,
    pub w: WeightVector,
}

/// Instance `j` of the stream `(seed, n, m, config)`.
pub fn sample_instance(n: usize, m: usize, seed: Seed, j: u64, config: &SearchConfig) -> Instance {
    let s = seed.derive(j);
    let t = match config.mode {
        SamplingMode::Ginibre => sample_psd(n, s.derive(0)),
        SamplingMode::Stress => sample_psd_ill_conditioned(n, s.derive(0), STRESS_CONDITION),
        SamplingMode::IdentityT => PsdMatrix::identity(n),
    };
    let a = if config.relax_a_hermitian {
        sample_hermitian(n, s.derive(1))
    } else if config.mode == SamplingMode::Stress {
        let low = sample_psd_with_rank(n, n - 1, s.derive(1));
        let ridge = 1e-8 * low.matrix().max_abs();
        let m = low
            .matrix()
            .add(&ComplexMatrix::identity(n).scale(Complex64::new(ridge, 0.0)))
            .expect("same dim");
        HermitianMatrix::from_hermitian_part(&m)
    } else {
        sample_psd(n, s.derive(1)).hermitian().clone()
    };
    Instance {
        t,
        a,
        w: sample_weights(m, s.derive(2)),
    }
}

/// A replayable instance: the worst sample of a search, or a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub conjecture: Conjecture,
    pub seed: Seed,
    pub sample_index: u64,
    #[serde(rename = "T")]
    pub t: MatrixFile,
    #[serde(rename = "A")]
    pub a: MatrixFile,
    pub weights: WeightVector,
    pub slack: f64,
    pub chain: ComplexValue,
}

impl InstanceRecord {
    pub fn matrices(&self) -> Result<(PsdMatrix, HermitianMatrix)> {
        let t = PsdMatrix::from_matrix(ComplexMatrix::try_from(self.t.clone())?)?;
        let a = HermitianMatrix::new(ComplexMatrix::try_from(self.a.clone())?)?;
        Ok((t, a))
    }

    /// Re-evaluates the slack from the stored matrices.
    pub fn replay(&self) -> Result<SlackEvaluation> {
        let (t, a) = self.matrices()?;
        evaluate_conjecture(self.conjecture, &t, &a, &self.weights)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub conjecture: Conjecture,
    pub n: usize,
    pub m: usize,
    pub seed: Seed,
    pub mode: SamplingMode,
    pub relax_a_hermitian: bool,
    pub rel_tol: f64,
    pub samples: u64,
    pub violations: u64,
    /// Samples that raised a numerical error; excluded from the statistics.
    pub errors: u64,
    pub min_slack: f64,
    pub worst_instance: Option<InstanceRecord>,
    /// Wall-clock time; the only field that varies between identical runs.
    pub elapsed: f64,
}

impl SearchReport {
    /// Equality ignoring `elapsed`.
    pub fn same_outcome(&self, other: &Self) -> bool {
        Self { elapsed: 0.0, ..self.clone() } == Self { elapsed: 0.0, ..other.clone() }
    }
}

enum Outcome {
    Ok(SlackEvaluation),
    Err,
}

fn evaluate_sample(which: Conjecture, n: usize, m: usize, seed: Seed, j: u64, config: &SearchConfig) -> Outcome {
    let inst = sample_instance(n, m, seed, j, config);
    match evaluate_conjecture(which, &inst.t, &inst.a, &inst.w) {
        Ok(e) if e.slack.is_finite() => Outcome::Ok(e),
        _ => Outcome::Err,
    }
}

#[cfg(feature = "parallel")]
fn evaluate_all(which: Conjecture, n: usize, m: usize, samples: u64, seed: Seed, config: &SearchConfig) -> Vec<Outcome> {
    use rayon::prelude::*;
    (0..samples)
        .into_par_iter()
        .map(|j| evaluate_sample(which, n, m, seed, j, config))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_all(which: Conjecture, n: usize, m: usize, samples: u64, seed: Seed, config: &SearchConfig) -> Vec<Outcome> {
    (0..samples)
        .map(|j| evaluate_sample(which, n, m, seed, j, config))
        .collect()
}

/// Evaluates `samples` independent instances and reports the minimum slack,
/// the number of violations beyond tolerance, and the worst instance.
pub fn run_search(
    which: Conjecture,
    n: usize,
    m: usize,
    samples: u64,
    seed: Seed,
    config: &SearchConfig,
) -> Result<SearchReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    if !(2..=crate::matrix::MAX_DIM).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("chain length m must be >= 1".into()));
    }
    let start = Instant::now();
    let outcomes = evaluate_all(which, n, m, samples, seed, config);

    let mut violations = 0;
    let mut errors = 0;
    let mut worst: Option<(u64, SlackEvaluation)> = None;
    for (j, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Outcome::Err => errors += 1,
            Outcome::Ok(e) => {
                if e.violates(config.rel_tol) {
                    violations += 1;
                }
                if worst.is_none_or(|(_, w)| e.slack < w.slack) {
                    worst = Some((j as u64, e));
                }
            }
        }
    }

    let worst_instance = worst.map(|(j, e)| {
        let inst = sample_instance(n, m, seed, j, config);
        InstanceRecord {
            conjecture: which,
            seed,
            sample_index: j,
            t: MatrixFile::from(inst.t.matrix()),
            a: MatrixFile::from(inst.a.matrix()),
            weights: inst.w,
            slack: e.slack,
            chain: e.chain.into(),
        }
    });

    Ok(SearchReport {
        conjecture: which,
        n,
        m,
        seed,
        mode: config.mode,
        relax_a_hermitian: config.relax_a_hermitian,
        rel_tol: config.rel_tol,
        samples,
        violations,
        errors,
        min_slack: worst.map_or(f64::NAN, |(_, e)| e.slack),
        worst_instance,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// `T = diag(1, 2, 3)`, `A = [[2, i, i], [-i, 2, i], [-i, -i, 2]]`,
/// `p = (1/6, 1/3, 1/2)`: a PSD chain with a non-real trace.
pub fn counterexample_instance() -> (PsdMatrix, PsdMatrix, WeightVector) {
    let t = PsdMatrix::from_diag(&[1.0, 2.0, 3.0]).expect("diagonal PSD");
    let a = ComplexMatrix::from_parts(
        &[vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 2.0]],
        &[vec![0.0, 1.0, 1.0], vec![-1.0, 0.0, 1.0], vec![-1.0, -1.0, 0.0]],
    )
    .and_then(PsdMatrix::from_matrix)
    .expect("eigenvalues 2 - sqrt 3, 2, 2 + sqrt 3");
    let w = WeightVector::new(vec![1.0 / 6.0, 1.0 / 3.0, 0.5]).expect("sums to one");
    (t, a, w)
}

/// Compares a chain value against `116.037 + 0.00260306 i` at the printed
/// precision.
pub fn check_golden(z: Complex64) -> Result<Complex64> {
    if (z.re - GOLDEN_RE).abs() > GOLDEN_RE_TOL || (z.im - GOLDEN_IM).abs() > GOLDEN_IM_TOL {
        return Err(Error::GoldenMismatch {
            re: z.re,
            im: z.im,
            golden_re: GOLDEN_RE,
            golden_im: GOLDEN_IM,
        });
    }
    Ok(z)
}

pub fn reproduce_counterexample() -> Result<Complex64> {
    let (t, a, w) = counterexample_instance();
    check_golden(trace_chain(&t, a.hermitian(), &w)?)
}
