//! Seeded property suite that drives every checker over random instances.

use serde::{Deserialize, Serialize};

use crate::calculus::{spectrum_values, ScalarFunction};
use crate::checkers::{
    alignment, check_alpha_interp, check_araki, check_bourin_fujii, check_ordered_fg, check_p1, check_p2,
    check_power_chain_m, check_rhs_order, check_thm_2x2, InequalityReport, Verdict, DEFAULT_REL_TOL,
};
use crate::error::Result;
use crate::lemmas::{arc_parity, chain_phase_product, IndexCycle};
use crate::matrix::HermitianMatrix;
use crate::sampling::{sample_hermitian, sample_psd, sample_unitary, sample_weights, Gaussian, Seed};
use num_complex::Complex64;

/// Checker rows in canonical (alphabetical) order.
pub const CHECKERS: [&str; 10] = [
    "alpha_interp",
    "araki",
    "bourin_fujii",
    "ordered_fg",
    "p1",
    "p2",
    "phase_product",
    "power_chain_m",
    "rhs_order",
    "thm_2x2",
];

/// Checkers whose statement is specific to 2x2 matrices.
pub fn two_by_two_only(checker: &str) -> bool {
    matches!(checker, "thm_2x2" | "phase_product")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub samples: u64,
    pub seed: Seed,
    /// Fixed chain length; random per sample when `None`.
    pub m: Option<usize>,
    pub rel_tol: f64,
    /// Exhaustive parity check covers every cycle up to this length.
    pub parity_max_m: usize,
    /// Restrict to these checkers; all when empty.
    pub only: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4],
            samples: 1000,
            seed: Seed(0),
            m: None,
            rel_tol: DEFAULT_REL_TOL,
            parity_max_m: 16,
            only: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub checker: String,
    pub dim: usize,
    pub sample_index: u64,
    pub report: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteError {
    pub checker: String,
    pub dim: usize,
    pub sample_index: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub name: String,
    pub samples: u64,
    pub fails: u64,
    pub degenerate: u64,
    pub min_slack: f64,
    pub min_relative_slack: f64,
    pub max_imag_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityCheck {
    pub max_m: usize,
    pub cycles: u64,
    pub odd_found: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub entries: Vec<SuiteEntry>,
    pub errors: Vec<SuiteError>,
    pub parity: ParityCheck,
}

impl SuiteOutcome {
    pub fn fail_count(&self) -> usize {
        self.entries.iter().filter(|e| e.report.failed()).count() + self.errors.len()
    }

    pub fn all_passed(&self) -> bool {
        self.fail_count() == 0 && self.parity.odd_found == 0
    }

    pub fn reports(&self) -> Vec<InequalityReport> {
        self.entries.iter().map(|e| e.report.clone()).collect()
    }

    /// One row per checker that ran, in canonical order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for name in CHECKERS {
            let mine: Vec<&SuiteEntry> = self.entries.iter().filter(|e| e.checker == name).collect();
            let errors = self.errors.iter().filter(|e| e.checker == name).count() as u64;
            if mine.is_empty() && errors == 0 {
                continue;
            }
            let judged = mine.iter().filter(|e| e.report.verdict != Verdict::Degenerate);
            rows.push(SummaryRow {
                name: name.to_owned(),
                samples: mine.iter().map(|e| (e.dim, e.sample_index)).collect::<std::collections::BTreeSet<_>>().len() as u64,
                fails: mine.iter().filter(|e| e.report.failed()).count() as u64 + errors,
                degenerate: mine.iter().filter(|e| e.report.verdict == Verdict::Degenerate).count() as u64,
                min_slack: judged.clone().map(|e| e.report.slack).fold(f64::INFINITY, f64::min),
                min_relative_slack: judged.map(|e| e.report.relative_slack()).fold(f64::INFINITY, f64::min),
                max_imag_residual: mine.iter().map(|e| e.report.imag_residual).fold(0.0, f64::max),
            });
        }
        rows
    }
}

/// Draws from `{x, x^2, x^{1/2}, a x + b}`; the square root only when the
/// spectrum is known to be non-negative.
pub fn family_function(g: &mut Gaussian, psd_spectrum: bool) -> ScalarFunction {
    let choices = if psd_spectrum { 4 } else { 3 };
    match g.int_in(0, choices - 1) {
        0 => ScalarFunction::identity(),
        1 => ScalarFunction::power(2.0),
        2 => {
            let a = 4.0 * g.uniform() - 2.0;
            let b = 2.0 * g.uniform() - 1.0;
            ScalarFunction::affine(a, b)
        }
        _ => ScalarFunction::power(0.5),
    }
}

/// A test matrix whose spectrum is PSD with probability 1/2.
fn spectrum_matrix(g: &mut Gaussian, n: usize, seed: Seed) -> (HermitianMatrix, bool) {
    if g.uniform() < 0.5 {
        (sample_psd(n, seed).hermitian().clone(), true)
    } else {
        (sample_hermitian(n, seed), false)
    }
}

fn run_one(checker: &str, n: usize, seed: Seed, fixed_m: Option<usize>) -> Result<Vec<InequalityReport>> {
    let mut g = seed.derive(0).rng();
    let s1 = seed.derive(1);
    let s2 = seed.derive(2);
    Ok(match checker {
        "p1" | "p2" | "rhs_order" => {
            let (a, psd) = spectrum_matrix(&mut g, n, s1);
            let f = family_function(&mut g, psd);
            let h = family_function(&mut g, psd);
            match checker {
                "p1" => vec![check_p1(&f, &h, &sample_psd(n, s2), &a)?],
                "p2" => vec![check_p2(&f, &h, &sample_hermitian(n, s2), &a)?],
                _ => vec![check_rhs_order(&f, &h, &sample_hermitian(n, s2), &a)?],
            }
        }
        "ordered_fg" => {
            let (a, psd) = spectrum_matrix(&mut g, n, s1);
            let f = family_function(&mut g, psd);
            let mut h = family_function(&mut g, psd);
            let d = a.eig()?;
            let fv = spectrum_values(&d, &f)?;
            let hv = spectrum_values(&d, &h)?;
            let ordered = fv.iter().zip(&hv).all(|(x, y)| x <= y) || fv.iter().zip(&hv).all(|(x, y)| x >= y);
            if !ordered {
                // lift h above f on the realized spectrum
                let gap = fv.iter().zip(&hv).map(|(x, y)| x - y).fold(f64::NEG_INFINITY, f64::max);
                h = h.shifted(gap + 0.1 + g.uniform());
            }
            vec![check_ordered_fg(&f, &h, &sample_hermitian(n, s2), &a)?]
        }
        "araki" => {
            let x = sample_psd(n, s1);
            let y = sample_psd(n, s2);
            let r = g.uniform();
            let p = 0.25 + 3.75 * g.uniform();
            vec![check_araki(&x, &y, r, p)?]
        }
        "power_chain_m" => {
            let m = fixed_m.unwrap_or_else(|| g.int_in(1, 6));
            vec![check_power_chain_m(&sample_psd(n, s1), &sample_psd(n, s2), m as u32)?]
        }
        "alpha_interp" => {
            let alpha = g.uniform();
            let (low, up) = check_alpha_interp(&sample_psd(n, s1), &sample_hermitian(n, s2), alpha)?;
            vec![low, up]
        }
        "bourin_fujii" => {
            let a = sample_psd(n, s1);
            let f = family_function(&mut g, true);
            let h = family_function(&mut g, true);
            let aligned = alignment(&f, &h, a.hermitian())?.unwrap_or(true);
            vec![check_bourin_fujii(&f, &h, a.hermitian(), &sample_hermitian(n, s2), aligned)?]
        }
        "thm_2x2" => {
            let m = fixed_m.unwrap_or_else(|| g.int_in(2, 8));
            let w = sample_weights(m, seed.derive(3));
            let (low, up) = check_thm_2x2(&sample_psd(2, s1), &sample_psd(2, s2), &w)?;
            vec![low, up]
        }
        "phase_product" => {
            let m = fixed_m.unwrap_or_else(|| g.int_in(1, 8)).min(63);
            let bits = (g.uniform() * (1u64 << m) as f64) as u64;
            let cycle = IndexCycle::from_bits(bits, m);
            let a = sample_psd(2, s1);
            let z = chain_phase_product(&a, &sample_unitary(2, s2), &cycle)?;
            vec![InequalityReport::new("phase_product", Complex64::new(0.0, 0.0), z)]
        }
        other => panic!("unknown checker {other}"),
    })
}

/// Exhaustively counts cycles with an odd number of different-edge arcs.
pub fn parity_sweep(max_m: usize) -> ParityCheck {
    let mut cycles = 0;
    let mut odd_found = 0;
    for m in 1..=max_m {
        for c in IndexCycle::all(m) {
            cycles += 1;
            if !arc_parity(&c).diff_count.is_multiple_of(2) {
                odd_found += 1;
            }
        }
    }
    ParityCheck {
        max_m,
        cycles,
        odd_found,
    }
}

type Job = (usize, usize, u64);

fn execute(job: &Job, config: &SuiteConfig) -> std::result::Result<Vec<SuiteEntry>, SuiteError> {
    let &(k, n, j) = job;
    let checker = CHECKERS[k];
    let seed = config.seed.derive_path(&[k as u64, n as u64, j]);
    match run_one(checker, n, seed, config.m) {
        Ok(reports) => Ok(reports
            .into_iter()
            .map(|mut report| {
                report.rejudge(config.rel_tol);
                SuiteEntry {
                    checker: checker.to_owned(),
                    dim: n,
                    sample_index: j,
                    report,
                }
            })
            .collect()),
        Err(e) => Err(SuiteError {
            checker: checker.to_owned(),
            dim: n,
            sample_index: j,
            message: e.to_string(),
        }),
    }
}

pub fn run_suite(config: &SuiteConfig) -> SuiteOutcome {
    let mut jobs: Vec<Job> = Vec::new();
    for (k, name) in CHECKERS.iter().enumerate() {
        if !config.only.is_empty() && !config.only.iter().any(|o| o == name) {
            continue;
        }
        let mut dims: Vec<usize> = config.dims.clone();
        dims.sort_unstable();
        dims.dedup();
        if two_by_two_only(name) {
            dims.retain(|&d| d == 2);
        }
        for n in dims {
            jobs.extend((0..config.samples).map(|j| (k, n, j)));
        }
    }

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|job| execute(job, config)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = jobs.iter().map(|job| execute(job, config)).collect();

    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(e) => entries.extend(e),
            Err(e) => errors.push(e),
        }
    }
    entries.sort_by(|a, b| {
        (a.report.name.as_str(), a.dim, a.sample_index).cmp(&(b.report.name.as_str(), b.dim, b.sample_index))
    });
    SuiteOutcome {
        entries,
        errors,
        parity: parity_sweep(config.parity_max_m),
    }
}
