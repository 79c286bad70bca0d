//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//! Run with `cargo test -p trace-ineq --test acceptance --release`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use trace_ineq::checkers::{check_araki, check_power_chain_m, check_thm_2x2, trace_chain_spectral_sum};
use trace_ineq::lemmas::{arc_parity, chain_phase_product, factorized_phase_product, IndexCycle};
use trace_ineq::sampling::{sample_hermitian, sample_psd, sample_unitary, sample_weights, Seed};
use trace_ineq::search::{reproduce_counterexample, run_search, Conjecture, SearchConfig};
use trace_ineq::suite::{run_suite, SuiteConfig, SuiteOutcome};
use trace_ineq::{fractional_power, hermitian_eig, trace_chain, Complex64, PsdMatrix, WeightVector};

type Criterion = (&'static str, fn() -> Outcome);

const SEED: Seed = Seed(20_240_601);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel_close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn suite(only: &[&str], dims: &[usize], samples: u64) -> SuiteOutcome {
    run_suite(&SuiteConfig {
        dims: dims.to_vec(),
        samples,
        seed: SEED,
        parity_max_m: 1,
        only: only.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    })
}

fn suite_detail(out: &SuiteOutcome) -> (bool, String) {
    let rows = out.summary();
    let pass = out.errors.is_empty() && rows.iter().all(|r| r.fails == 0);
    let text = rows
        .iter()
        .map(|r| format!("{}: {} samples, {} fails, {} degenerate, min rel slack {:.3e}", r.name, r.samples, r.fails, r.degenerate, r.min_relative_slack))
        .collect::<Vec<_>>()
        .join("; ");
    (pass, format!("{text}; {} errors", out.errors.len()))
}

fn golden() -> Outcome {
    let start = Instant::now();
    let z = reproduce_counterexample();
    let t = start.elapsed();
    match z {
        Ok(z) => outcome(t < Duration::from_secs(1), format!("{:.10} + {:.10}i in {t:?}", z.re, z.im)),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn theorem_2x2() -> Outcome {
    let start = Instant::now();
    let out = suite(&["thm_2x2"], &[2], 10_000);
    let t = start.elapsed();
    let (mut pass, detail) = suite_detail(&out);
    let min_rel = out.entries.iter().map(|e| e.report.relative_slack()).fold(f64::INFINITY, f64::min);
    let max_imag = out
        .entries
        .iter()
        .map(|e| e.report.imag_residual / e.report.scale())
        .fold(0.0, f64::max);
    pass &= out.entries.len() == 20_000 && min_rel >= -1e-9 && max_imag <= 1e-10 && t < Duration::from_secs(30);
    outcome(pass, format!("{detail}; max rel imag {max_imag:.2e}; {t:?}"))
}

fn equality_case() -> Outcome {
    let slacks = |t: &PsdMatrix, a: &PsdMatrix, w: &WeightVector| {
        let (low, up) = check_thm_2x2(t, a, w).expect("2x2 inputs");
        let scale = low.scale().max(up.scale());
        (low.slack, up.slack, scale)
    };
    let a = PsdMatrix::from_matrix(
        trace_ineq::ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).expect("finite"),
    )
    .expect("rank one");
    let w = WeightVector::new(vec![1.0 / 3.0, 2.0 / 3.0]).expect("sums to one");
    let t_scalar = PsdMatrix::from_diag(&[2.0, 2.0]).expect("PSD");
    let (l0, u0, _) = slacks(&t_scalar, &a, &w);
    let fixed = l0.abs().max(u0.abs());
    // random A and w with T = 2I, judged relative to the chain magnitude
    let mut random_rel: f64 = 0.0;
    for j in 0..100 {
        let s = SEED.derive_path(&[3, j]);
        let m = 2 + (j as usize % 7);
        let (l, u, scale) = slacks(&t_scalar, &sample_psd(2, s.derive(0)), &sample_weights(m, s.derive(1)));
        random_rel = random_rel.max(l.abs().max(u.abs()) / scale);
    }
    let (l, u, _) = slacks(&PsdMatrix::from_diag(&[1.0, 2.0]).expect("PSD"), &a, &w);
    outcome(
        fixed < 1e-10 && random_rel < 1e-10 && l.max(u) > 1e-6,
        format!(
            "T=2I slacks {l0:.2e} / {u0:.2e}, random A max rel {random_rel:.2e}; T=diag(1,2) slacks {l:.6} / {u:.6}"
        ),
    )
}

fn parity() -> Outcome {
    let start = Instant::now();
    let mut cycles = 0u64;
    let mut odd = 0u64;
    for m in 1..=16 {
        for c in IndexCycle::all(m) {
            cycles += 1;
            if !arc_parity(&c).diff_count.is_multiple_of(2) {
                odd += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        odd == 0 && cycles == (1 << 17) - 2 && t < Duration::from_secs(10),
        format!("{cycles} cycles, {odd} odd, {t:?}"),
    )
}

fn phase_products() -> Outcome {
    let mut worst_im: f64 = 0.0;
    let mut worst_neg: f64 = 0.0;
    let mut worst_fact: f64 = 0.0;
    let mut count = 0u64;
    for j in 0..100 {
        let s = SEED.derive_path(&[5, j]);
        let a = sample_psd(2, s.derive(0));
        let basis = sample_unitary(2, s.derive(1));
        for m in 1..=8 {
            let scale = a.matrix().max_abs().powi(m as i32);
            for c in IndexCycle::all(m) {
                let z = chain_phase_product(&a, &basis, &c).expect("2x2 unitary basis");
                let (same, off) = factorized_phase_product(&a, &basis, &c).expect("2x2 unitary basis");
                let f = same * off;
                worst_im = worst_im.max(z.im.abs() / scale);
                worst_neg = worst_neg.max(-z.re / scale);
                worst_fact = worst_fact.max((z.re - f).abs() / z.norm().max(f.abs()).max(f64::MIN_POSITIVE));
                count += 1;
            }
        }
    }
    outcome(
        worst_im <= 1e-12 && worst_neg <= 1e-10 && worst_fact <= 1e-10,
        format!("{count} products; max |Im|/scale {worst_im:.2e}; max -Re/scale {worst_neg:.2e}; factorized rel {worst_fact:.2e}"),
    )
}

fn proof_replay() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for j in 0..1000 {
        let s = SEED.derive_path(&[6, j]);
        let m = 1 + (j as usize % 8);
        let t = sample_psd(2, s.derive(0));
        let a = sample_psd(2, s.derive(1));
        let w = sample_weights(m, s.derive(2));
        let x = trace_chain(&t, a.hermitian(), &w).expect("chain");
        let y = trace_chain_spectral_sum(&t, a.hermitian(), &w).expect("spectral sum");
        ok &= rel_close(x, y, 1e-10);
        worst = worst.max((x - y).norm() / x.norm().max(y.norm()).max(f64::MIN_POSITIVE));
    }
    outcome(ok, format!("1000 instances, max rel diff {worst:.2e}"))
}

fn power_chain_suites() -> Outcome {
    let out = suite(&["power_chain_m", "alpha_interp", "araki"], &[2, 3, 4], 1000);
    let (mut pass, detail) = suite_detail(&out);
    let mut worst: f64 = 0.0;
    for j in 0..1000 {
        let s = SEED.derive_path(&[7, j]);
        let n = 2 + j as usize % 3;
        let m = 1 + j as u32 % 6;
        let t = sample_psd(n, s.derive(0));
        let a = sample_psd(n, s.derive(1));
        let chain = check_power_chain_m(&t, &a, m).expect("power chain");
        let x = fractional_power(&a, m as f64).expect("PSD power");
        let araki = check_araki(&x, &t, 1.0 / m as f64, m as f64).expect("araki");
        for (p, q) in [(chain.lhs, araki.lhs), (chain.rhs, araki.rhs)] {
            let (p, q): (Complex64, Complex64) = (p.into(), q.into());
            pass &= rel_close(p, q, 1e-10);
            worst = worst.max((p - q).norm() / p.norm().max(q.norm()).max(f64::MIN_POSITIVE));
        }
    }
    outcome(pass, format!("{detail}; substitution max rel diff {worst:.2e}"))
}

fn function_suites() -> Outcome {
    let out = suite(&["p1", "p2", "rhs_order", "ordered_fg", "bourin_fujii"], &[2, 3, 4], 1000);
    let (pass, detail) = suite_detail(&out);
    outcome(pass, detail)
}

fn searches() -> Outcome {
    let start = Instant::now();
    let config = SearchConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for which in [Conjecture::I, Conjecture::II] {
        for m in [3, 4] {
            let a = run_search(which, 3, m, 10_000, SEED, &config);
            let b = run_search(which, 3, m, 10_000, SEED, &config);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    pass &= a.same_outcome(&b) && a.violations == 0 && a.errors == 0;
                    parts.push(format!(
                        "({}) m={m}: {} violations, min slack {:.3e}",
                        serde_json::to_string(&which).unwrap_or_default().trim_matches('"'),
                        a.violations,
                        a.min_slack
                    ));
                }
                (Err(e), _) | (_, Err(e)) => {
                    pass = false;
                    parts.push(e.to_string());
                }
            }
        }
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(120);
    outcome(pass, format!("{}; deterministic reruns; {t:?}", parts.join("; ")))
}

fn spectral_core() -> Outcome {
    let mut worst_rec: f64 = 0.0;
    for n in 2..=8 {
        for j in 0..200 {
            let m = sample_hermitian(n, SEED.derive_path(&[10, n as u64, j]));
            let d = hermitian_eig(&m).expect("converges");
            let err = d.reconstruct().sub(m.matrix()).expect("same dim").max_abs();
            worst_rec = worst_rec.max(err / m.matrix().max_abs());
        }
    }
    let mut worst_sqrt: f64 = 0.0;
    for j in 0..1000 {
        let n = 2 + j as usize % 7;
        let t = sample_psd(n, SEED.derive_path(&[10, 0, j]));
        let r = fractional_power(&t, 0.5).expect("PSD root");
        let sq = r.matrix().matmul(r.matrix()).expect("same dim");
        worst_sqrt = worst_sqrt.max(sq.sub(t.matrix()).expect("same dim").max_abs() / t.matrix().max_abs());
    }
    outcome(
        worst_rec <= 1e-11 && worst_sqrt <= 1e-10,
        format!("reconstruction max rel {worst_rec:.2e}; square root max rel {worst_sqrt:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("counterexample golden", golden),
        ("2x2 theorem suite", theorem_2x2),
        ("equality characterization", equality_case),
        ("parity lemma exhaustive", parity),
        ("phase-product lemma", phase_products),
        ("proof-replay equivalence", proof_replay),
        ("power-chain, interpolation and Araki suites", power_chain_suites),
        ("function-pair suites", function_suites),
        ("conjecture searches", searches),
        ("spectral core", spectral_core),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("[{tag}] criterion {}: {name}: {}", i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
