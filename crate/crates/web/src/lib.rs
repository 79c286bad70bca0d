//! WebAssembly bindings for the browser demo. Every function returns a JSON
//! string; failures come back as `{"error": "..."}` so the page never has to
//! catch exceptions.

use serde::Serialize;
use serde_json::json;
use trace_ineq::checkers::{check_alpha_interp, power_chain_lower, power_chain_upper};
use trace_ineq::sampling::{sample_hermitian, sample_psd};
use trace_ineq::search::{
    check_golden, counterexample_instance, evaluate_conjecture, sample_instance, Conjecture, SearchConfig,
    GOLDEN_IM, GOLDEN_RE,
};
use trace_ineq::{trace_chain, Seed, WeightVector};
use wasm_bindgen::prelude::wasm_bindgen;

const MAX_SAMPLES: u32 = 20_000;
const MAX_POINTS: u32 = 401;
const MAX_BINS: u32 = 200;

fn error_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(error_json)
}

fn parse_weights(text: &str) -> Result<WeightVector, String> {
    let values = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            match s.split_once('/') {
                Some((n, d)) => match (n.trim().parse::<f64>(), d.trim().parse::<f64>()) {
                    (Ok(n), Ok(d)) => Ok(n / d),
                    _ => Err(format!("bad weight `{s}`")),
                },
                None => s.parse::<f64>().map_err(|_| format!("bad weight `{s}`")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    WeightVector::new(values).map_err(|e| e.to_string())
}

/// The 3x3 chain `T = diag(1,2,3)`, `A = [[2,i,i],[-i,2,i],[-i,-i,2]]` for
/// user weights such as `"1/6,1/3,1/2"`, with both power-chain brackets.
#[wasm_bindgen]
pub fn counterexample_chain(weights: &str) -> String {
    let w = match parse_weights(weights) {
        Ok(w) => w,
        Err(e) => return error_json(e),
    };
    let (t, a, _) = counterexample_instance();
    let m = w.len() as u32;
    let values = trace_chain(&t, a.hermitian(), &w).and_then(|z| {
        Ok((
            z,
            power_chain_lower(&t, a.hermitian(), m)?,
            power_chain_upper(&t, a.hermitian(), m)?,
        ))
    });
    match values {
        Ok((z, low, up)) => json!({
            "weights": w,
            "re": z.re,
            "im": z.im,
            "lower": low.re,
            "upper": up.re,
            "golden_re": GOLDEN_RE,
            "golden_im": GOLDEN_IM,
            "matches_golden": check_golden(z).is_ok(),
        })
        .to_string(),
        Err(e) => error_json(e),
    }
}

#[derive(Serialize)]
struct AlphaCurve {
    n: usize,
    seed: u64,
    alpha: Vec<f64>,
    lower: f64,
    middle: Vec<f64>,
    upper: f64,
    max_imag: f64,
    all_passed: bool,
}

/// `Tr[T^a A T^{1-a} A]` over `points` values of `a` in `[0, 1]`, for seeded
/// PSD `T` and Hermitian `A`, against the constant lower and upper bounds.
#[wasm_bindgen]
pub fn alpha_curve(n: u32, seed: u64, points: u32) -> String {
    let n = n as usize;
    if !(2..=8).contains(&n) {
        return error_json("n must be between 2 and 8");
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return error_json(format!("points must be between 2 and {MAX_POINTS}"));
    }
    let s = Seed(seed);
    let t = sample_psd(n, s.derive(0));
    let a = sample_hermitian(n, s.derive(1));
    let mut curve = AlphaCurve {
        n,
        seed,
        alpha: Vec::with_capacity(points as usize),
        lower: 0.0,
        middle: Vec::with_capacity(points as usize),
        upper: 0.0,
        max_imag: 0.0,
        all_passed: true,
    };
    for k in 0..points {
        let alpha = k as f64 / (points - 1) as f64;
        let (low, up) = match check_alpha_interp(&t, &a, alpha) {
            Ok(r) => r,
            Err(e) => return error_json(e),
        };
        curve.alpha.push(alpha);
        curve.lower = low.lhs.re;
        curve.middle.push(low.rhs.re);
        curve.upper = up.rhs.re;
        curve.max_imag = curve.max_imag.max(low.imag_residual).max(up.imag_residual);
        curve.all_passed &= low.passed() && up.passed();
    }
    to_json(&curve)
}

#[derive(Serialize)]
struct Histogram {
    conjecture: Conjecture,
    n: usize,
    m: usize,
    samples: u32,
    min_slack: f64,
    max_slack: f64,
    violations: u32,
    /// Histogram of `slack / max(|chain|, |bound|, 1)`.
    edges: Vec<f64>,
    counts: Vec<u32>,
}

/// Relative slack distribution of conjecture `"i"` or `"ii"` over seeded
/// random instances.
#[wasm_bindgen]
pub fn slack_histogram(conjecture: &str, n: u32, m: u32, samples: u32, seed: u64, bins: u32) -> String {
    let which: Conjecture = match conjecture.parse() {
        Ok(c) => c,
        Err(e) => return error_json(e),
    };
    let (n, m) = (n as usize, m as usize);
    if !(2..=6).contains(&n) || !(1..=12).contains(&m) {
        return error_json("n must be in 2..=6 and m in 1..=12");
    }
    if !(1..=MAX_SAMPLES).contains(&samples) || !(1..=MAX_BINS).contains(&bins) {
        return error_json(format!("samples must be in 1..={MAX_SAMPLES}, bins in 1..={MAX_BINS}"));
    }
    let config = SearchConfig::default();
    let mut rel = Vec::with_capacity(samples as usize);
    let mut violations = 0;
    for j in 0..samples as u64 {
        let inst = sample_instance(n, m, Seed(seed), j, &config);
        match evaluate_conjecture(which, &inst.t, &inst.a, &inst.w) {
            Ok(e) => {
                if e.violates(config.rel_tol) {
                    violations += 1;
                }
                rel.push(e.slack / e.tol(1.0));
            }
            Err(e) => return error_json(e),
        }
    }
    let lo = rel.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u32; bins as usize];
    for r in &rel {
        let k = (((r - lo) / width) as usize).min(bins as usize - 1);
        counts[k] += 1;
    }
    to_json(&Histogram {
        conjecture: which,
        n,
        m,
        samples,
        min_slack: lo,
        max_slack: hi,
        violations,
        edges: (0..=bins).map(|k| lo + k as f64 * width).collect(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn default_weights_match_golden() {
        let v = parse(&counterexample_chain("1/6, 1/3, 1/2"));
        assert_eq!(v["matches_golden"], true);
        assert!((v["re"].as_f64().unwrap() - 116.037).abs() < 5e-3);
        assert!((v["upper"].as_f64().unwrap() - 120.0).abs() < 1e-9);
    }

    #[test]
    fn bad_weights_are_reported() {
        assert!(parse(&counterexample_chain("0.5,0.4"))["error"].is_string());
        assert!(parse(&counterexample_chain("a,b"))["error"].is_string());
    }

    #[test]
    fn alpha_curve_is_symmetric_and_bracketed() {
        let v = parse(&alpha_curve(3, 5, 11));
        assert_eq!(v["all_passed"], true);
        let mid: Vec<f64> = v["middle"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(mid.len(), 11);
        for k in 0..11 {
            assert!((mid[k] - mid[10 - k]).abs() <= 1e-9 * mid[k].abs().max(1.0));
        }
        // alpha = 1/2 is the lower bound itself
        assert!((mid[5] - v["lower"].as_f64().unwrap()).abs() <= 1e-9 * mid[5].abs().max(1.0));
        assert!((mid[0] - v["upper"].as_f64().unwrap()).abs() <= 1e-9 * mid[0].abs().max(1.0));
        assert!(parse(&alpha_curve(1, 0, 11))["error"].is_string());
    }

    #[test]
    fn histogram_counts_every_sample() {
        let v = parse(&slack_histogram("ii", 3, 3, 300, 7, 20));
        let counts: u64 = v["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
        assert_eq!(counts, 300);
        assert_eq!(v["edges"].as_array().unwrap().len(), 21);
        assert_eq!(v["violations"], 0);
        assert!(parse(&slack_histogram("iii", 3, 3, 10, 0, 5))["error"].is_string());
    }

    #[test]
    fn histogram_is_deterministic() {
        assert_eq!(slack_histogram("i", 3, 4, 200, 1, 10), slack_histogram("i", 3, 4, 200, 1, 10));
    }
}
