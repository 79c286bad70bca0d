use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trace_ineq::checkers::{power_chain_lower, power_chain_upper, ComplexValue, InequalityReport, DEFAULT_REL_TOL};
use trace_ineq::search::{
    check_golden, counterexample_instance, run_search, Conjecture, InstanceRecord, SamplingMode, SearchConfig,
    SearchReport, GOLDEN_IM, GOLDEN_RE,
};
use trace_ineq::suite::{run_suite, SuiteConfig, SuiteOutcome};
use trace_ineq::{trace_chain, ComplexMatrix, HermitianMatrix, PsdMatrix, Seed, WeightVector};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_FINDING: u8 = 3;

#[derive(Parser)]
#[command(name = "trace-ineq", version, about = "Numerical checks of trace inequalities for products of matrix powers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every checker on seeded random instances and print a summary.
    Verify(VerifyArgs),
    /// Evaluate the non-real 3x3 chain and compare it with the known value.
    Counterexample(CounterexampleArgs),
    /// Sample instances and look for violations of conjecture (i) or (ii).
    Search(SearchArgs),
    /// Evaluate Tr[T^{p_1} A ... T^{p_m} A] for matrices read from files.
    Chain(ChainArgs),
}

#[derive(Args)]
struct Common {
    /// Seed, decimal or 0x-prefixed hex.
    #[arg(long, env = "TRACE_INEQ_SEED", default_value = "0", value_parser = parse_seed)]
    seed: Seed,
    /// Relative tolerance factor for verdicts.
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated matrix dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
    dims: Vec<usize>,
    /// Fixed chain length for the chain checkers; random when omitted.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// JSON matrix file replacing the default T.
    #[arg(long)]
    matrix_t: Option<PathBuf>,
    /// JSON matrix file replacing the default A.
    #[arg(long)]
    matrix_a: Option<PathBuf>,
    /// Comma-separated weights (decimals or fractions like 1/3) replacing the defaults.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<WeightVector>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_parser = parse_conjecture)]
    conjecture: Conjecture,
    /// Matrix dimension.
    #[arg(long = "n", visible_alias = "dims")]
    n: usize,
    /// Chain length.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    /// Ill-conditioned T and near-singular A.
    #[arg(long)]
    stress: bool,
    /// Sample A Hermitian instead of PSD (outside the conjecture's hypotheses).
    #[arg(long)]
    relax_hermitian_a: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long)]
    matrix_t: PathBuf,
    #[arg(long)]
    matrix_a: PathBuf,
    /// Comma-separated weights (decimals or fractions like 1/3) summing to 1.
    #[arg(long, value_parser = parse_weights)]
    weights: WeightVector,
    #[command(flatten)]
    common: Common,
}

/// Exit status plus the message explaining it.
struct Failure {
    code: u8,
    message: String,
}

fn config_error(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.to_string(),
    }
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    s.parse().map_err(|e: trace_ineq::Error| e.to_string())
}

fn parse_conjecture(s: &str) -> Result<Conjecture, String> {
    s.parse().map_err(|e: trace_ineq::Error| e.to_string())
}

fn parse_weight(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad weight `{s}`"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad weight `{s}`"))?;
            num / den
        }
        None => s.parse().map_err(|_| format!("bad weight `{s}`"))?,
    };
    Ok(value)
}

fn parse_weights(s: &str) -> Result<WeightVector, String> {
    let values = s.split(',').map(parse_weight).collect::<Result<Vec<_>, _>>()?;
    WeightVector::new(values).map_err(|e| e.to_string())
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    ComplexMatrix::from_json(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn read_psd(path: &Path) -> Result<PsdMatrix, Failure> {
    PsdMatrix::from_matrix(read_matrix(path)?).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn read_hermitian(path: &Path) -> Result<HermitianMatrix, Failure> {
    HermitianMatrix::new(read_matrix(path)?).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(config_error(format!("--tol must be a non-negative number, got {tol}")))
    }
}

fn check_samples(samples: u64) -> Result<(), Failure> {
    if samples == 0 {
        Err(config_error("--samples must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_dim(n: usize) -> Result<(), Failure> {
    if (2..=trace_ineq::matrix::MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(config_error(format!(
            "dimension {n} outside 2..={}",
            trace_ineq::matrix::MAX_DIM
        )))
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.output {
        Some(path) => fs::write(path, text).map_err(|e| config_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn csv_report_header() -> &'static str {
    "name,dim,sample_index,lhs_re,lhs_im,rhs_re,rhs_im,slack,imag_residual,tol,verdict\n"
}

fn verdict_str(r: &InequalityReport) -> String {
    serde_json::to_value(r.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn complex_str(re: f64, im: f64) -> String {
    if im.is_sign_negative() {
        format!("{re} - {}i", -im)
    } else {
        format!("{re} + {im}i")
    }
}

fn verify_text(out: &SuiteOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:>8} {:>6} {:>10} {:>24} {:>24} {:>24}",
        "inequality", "samples", "fails", "degenerate", "min_slack", "min_rel_slack", "max_imag_residual"
    );
    for row in out.summary() {
        let _ = writeln!(
            s,
            "{:<14} {:>8} {:>6} {:>10} {:>24e} {:>24e} {:>24e}",
            row.name,
            row.samples,
            row.fails,
            row.degenerate,
            row.min_slack,
            row.min_relative_slack,
            row.max_imag_residual
        );
    }
    let p = &out.parity;
    let _ = writeln!(
        s,
        "parity: {} cycles up to m = {}, {} with odd different-edge count",
        p.cycles, p.max_m, p.odd_found
    );
    for e in &out.errors {
        let _ = writeln!(s, "error: {} n={} sample {}: {}", e.checker, e.dim, e.sample_index, e.message);
    }
    let _ = writeln!(s, "result: {}", if verify_passed(out) { "pass" } else { "fail" });
    s
}

fn verify_csv(out: &SuiteOutcome) -> String {
    let mut s = csv_report_header().to_owned();
    for e in &out.entries {
        let r = &e.report;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.name,
            e.dim,
            e.sample_index,
            r.lhs.re,
            r.lhs.im,
            r.rhs.re,
            r.rhs.im,
            r.slack,
            r.imag_residual,
            r.tol,
            verdict_str(r)
        );
    }
    s
}

fn verify_passed(out: &SuiteOutcome) -> bool {
    out.all_passed() && out.errors.is_empty() && out.parity.odd_found == 0
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    check_samples(args.samples)?;
    check_tol(args.common.tol)?;
    if args.dims.is_empty() {
        return Err(config_error("--dims needs at least one dimension"));
    }
    for &n in &args.dims {
        check_dim(n)?;
    }
    if args.m == Some(0) {
        return Err(config_error("--m must be at least 1"));
    }
    let config = SuiteConfig {
        dims: args.dims,
        samples: args.samples,
        seed: args.common.seed,
        m: args.m,
        rel_tol: args.common.tol,
        ..Default::default()
    };
    let out = run_suite(&config);
    let text = match args.common.format {
        Format::Text => verify_text(&out),
        Format::Json => to_json(&out.reports()),
        Format::Csv => verify_csv(&out),
    };
    emit(&args.common, &text)?;
    if args.common.format != Format::Text {
        for e in &out.errors {
            eprintln!("error: {} n={} sample {}: {}", e.checker, e.dim, e.sample_index, e.message);
        }
    }
    Ok(if verify_passed(&out) { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct GoldenComparison {
    re: f64,
    im: f64,
    golden_re: f64,
    golden_im: f64,
    pass: bool,
}

fn cmd_counterexample(args: CounterexampleArgs) -> Result<u8, Failure> {
    let (mut t, a, mut w) = counterexample_instance();
    let mut a = a.hermitian().clone();
    if let Some(path) = &args.matrix_t {
        t = read_psd(path)?;
    }
    if let Some(path) = &args.matrix_a {
        a = read_hermitian(path)?;
    }
    if let Some(weights) = args.weights {
        w = weights;
    }
    let z = trace_chain(&t, &a, &w).map_err(config_error)?;
    let pass = check_golden(z).is_ok();
    let cmp = GoldenComparison {
        re: z.re,
        im: z.im,
        golden_re: GOLDEN_RE,
        golden_im: GOLDEN_IM,
        pass,
    };
    let text = match args.common.format {
        Format::Json => to_json(&cmp),
        Format::Csv => format!(
            "re,im,golden_re,golden_im,pass\n{},{},{},{},{}\n",
            cmp.re, cmp.im, cmp.golden_re, cmp.golden_im, cmp.pass
        ),
        Format::Text => format!(
            "chain: {}\ngolden: {}\nresult: {}\n",
            complex_str(cmp.re, cmp.im),
            complex_str(cmp.golden_re, cmp.golden_im),
            if pass { "pass" } else { "mismatch" }
        ),
    };
    emit(&args.common, &text)?;
    Ok(if pass { EXIT_PASS } else { EXIT_FAIL })
}

fn search_text(r: &SearchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "conjecture: {}", r.conjecture);
    let _ = writeln!(s, "n: {}", r.n);
    let _ = writeln!(s, "m: {}", r.m);
    let _ = writeln!(s, "seed: {}", r.seed);
    let _ = writeln!(s, "mode: {}", serde_json::to_value(r.mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default());
    let _ = writeln!(s, "relax_a_hermitian: {}", r.relax_a_hermitian);
    let _ = writeln!(s, "rel_tol: {}", r.rel_tol);
    let _ = writeln!(s, "samples: {}", r.samples);
    let _ = writeln!(s, "violations: {}", r.violations);
    let _ = writeln!(s, "errors: {}", r.errors);
    let _ = writeln!(s, "min_slack: {}", r.min_slack);
    if let Some(w) = &r.worst_instance {
        let _ = writeln!(s, "worst_sample_index: {}", w.sample_index);
        let _ = writeln!(s, "worst_chain: {}", complex_str(w.chain.re, w.chain.im));
    }
    let _ = writeln!(s, "elapsed_seconds: {}", r.elapsed);
    s
}

fn search_csv(r: &SearchReport) -> String {
    format!(
        "conjecture,n,m,seed,samples,violations,errors,min_slack\n{},{},{},{},{},{},{},{}\n",
        r.conjecture, r.n, r.m, r.seed, r.samples, r.violations, r.errors, r.min_slack
    )
}

fn weights_arg(w: &WeightVector) -> String {
    w.as_slice().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes the instance record and its two matrix files; returns the replay
/// command.
fn persist_instance(dir: &Path, record: &InstanceRecord) -> Result<String, Failure> {
    let stem = format!("violation-{}-seed{}-{}", record.conjecture, record.seed, record.sample_index);
    let io = |path: &Path, text: String| fs::write(path, text).map_err(|e| config_error(format!("{}: {e}", path.display())));
    let instance = dir.join(format!("{stem}.json"));
    let t_path = dir.join(format!("{stem}-T.json"));
    let a_path = dir.join(format!("{stem}-A.json"));
    io(&instance, to_json(record))?;
    io(&t_path, to_json(&record.t))?;
    io(&a_path, to_json(&record.a))?;
    Ok(format!(
        "trace-ineq chain --matrix-t {} --matrix-a {} --weights {}",
        t_path.display(),
        a_path.display(),
        weights_arg(&record.weights)
    ))
}

fn cmd_search(args: SearchArgs) -> Result<u8, Failure> {
    check_samples(args.samples)?;
    check_tol(args.common.tol)?;
    check_dim(args.n)?;
    if args.m == 0 {
        return Err(config_error("--m must be at least 1"));
    }
    let config = SearchConfig {
        mode: if args.stress { SamplingMode::Stress } else { SamplingMode::Ginibre },
        relax_a_hermitian: args.relax_hermitian_a,
        rel_tol: args.common.tol,
    };
    let report = run_search(args.conjecture, args.n, args.m, args.samples, args.common.seed, &config)
        .map_err(config_error)?;
    let text = match args.common.format {
        Format::Json => to_json(&report),
        Format::Csv => search_csv(&report),
        Format::Text => search_text(&report),
    };
    emit(&args.common, &text)?;
    if report.violations > 0 {
        let dir = args
            .common
            .output
            .as_deref()
            .and_then(Path::parent)
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if let Some(record) = &report.worst_instance {
            let replay = persist_instance(dir, record)?;
            eprintln!("violation found; replay with:\n  {replay}");
        }
        return Ok(EXIT_FINDING);
    }
    Ok(if report.errors > 0 { EXIT_FAIL } else { EXIT_PASS })
}

#[derive(Serialize)]
struct ChainOutput {
    m: usize,
    weights: WeightVector,
    chain: ComplexValue,
    /// `Tr[(T^{1/m}A)^m]`, present when `A` is PSD.
    lower: Option<ComplexValue>,
    /// `Tr[T A^m]`, present when `A` is PSD.
    upper: Option<ComplexValue>,
}

fn cmd_chain(args: ChainArgs) -> Result<u8, Failure> {
    let t = read_psd(&args.matrix_t)?;
    let a = read_hermitian(&args.matrix_a)?;
    if t.dim() != a.dim() {
        return Err(config_error(format!("T is {0}x{0} but A is {1}x{1}", t.dim(), a.dim())));
    }
    let w = args.weights;
    let m = w.len();
    let chain = trace_chain(&t, &a, &w).map_err(config_error)?;
    let (lower, upper) = if PsdMatrix::new(a.clone()).is_ok() {
        let low = power_chain_lower(&t, &a, m as u32).map_err(config_error)?;
        let up = power_chain_upper(&t, &a, m as u32).map_err(config_error)?;
        (Some(low.into()), Some(up.into()))
    } else {
        (None, None)
    };
    let out = ChainOutput {
        m,
        weights: w,
        chain: chain.into(),
        lower,
        upper,
    };
    let text = match args.common.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let opt = |v: Option<ComplexValue>| v.map_or(",".to_owned(), |v| format!("{},{}", v.re, v.im));
            format!(
                "m,chain_re,chain_im,lower_re,lower_im,upper_re,upper_im\n{},{},{},{},{}\n",
                out.m,
                out.chain.re,
                out.chain.im,
                opt(out.lower),
                opt(out.upper)
            )
        }
        Format::Text => {
            let mut s = format!("m: {}\nchain: {}\n", out.m, complex_str(out.chain.re, out.chain.im));
            if let (Some(l), Some(u)) = (out.lower, out.upper) {
                let _ = writeln!(s, "lower Tr[(T^(1/m) A)^m]: {}", complex_str(l.re, l.im));
                let _ = writeln!(s, "upper Tr[T A^m]: {}", complex_str(u.re, u.im));
            }
            s
        }
    };
    emit(&args.common, &text)?;
    Ok(EXIT_PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Search(a) => cmd_search(a),
        Command::Chain(a) => cmd_chain(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
