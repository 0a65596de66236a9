use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::admm::{multistart, solve, uniform_sampler, OutcomeClass, SolveOutcome, SolveStatus, SolverConfig};
use crate::document::{load_problem, write_trace_csv, ResultDocument, RunRecord};
use crate::error::{Error, Result};
use crate::model::{verify_eigenpair, Eigenpair};
use crate::reproduce::{self, RowCheck, ITERATION_BUDGET};
use crate::spectrum::{enumerate_pareto_spectrum, Completeness, Method};
use crate::tensor::set_size_guard;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ZERO: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_VERIFY_FAIL: i32 = 4;

pub const SIZE_GUARD_ENV: &str = "THEICP_SIZE_GUARD";

#[derive(Debug, Parser)]
#[command(name = "theicp", version, about = "Tensor higher-degree eigenvalue complementarity problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the linearized ADMM solver (requires C = -I)
    Solve(SolveArgs),
    /// Enumerate Pareto eigenvalues by support
    Enumerate(EnumerateArgs),
    /// Check a candidate eigenpair
    Verify(VerifyArgs),
    /// Rerun the reference table for a bundled example
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("start").required(true).args(["u0", "random"])))]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Starting u as comma-separated values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u0: Option<Vec<f64>>,
    /// Starting v (defaults to u0)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v0: Option<Vec<f64>>,
    /// Draw u0 = v0 from U(0,1)^n using --seed
    #[arg(long)]
    random: bool,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    zero_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write per-iteration CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write a result document here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value_t = 1)]
    max_support: usize,
    /// Newton starts per support and restart round
    #[arg(long, default_value_t = 20)]
    attempts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    x: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    example: u8,
    /// `all` or a row number
    #[arg(long, default_value = "all")]
    rows: String,
    /// Also run this many seeded random starts
    #[arg(long)]
    multistart: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn one_based(s: &[usize]) -> Vec<usize> {
    s.iter().map(|i| i + 1).collect()
}

fn fmt_support(s: &[usize]) -> String {
    let parts: Vec<String> = one_based(s).iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn print_pair(pair: &Eigenpair) {
    println!("lambda    = {:.6}", pair.lambda);
    println!("x         = {}", fmt_vec(&pair.x));
    println!("x (e'x=1) = {}", fmt_vec(&pair.simplex_normalized_x()));
    println!("rho       = {}", fmt_vec(&pair.rho));
    let r = &pair.residuals;
    println!(
        "residuals: primal {:.3e}  dual {:.3e}  compl {:.3e}  (tol {:.1e}; at |x|inf = 1: {:.3e}) {}",
        r.primal_neg,
        r.dual_neg,
        r.compl,
        pair.tol,
        pair.normalized.max(),
        if pair.passed { "PASS" } else { "FAIL" }
    );
}

fn record_from(outcome: &SolveOutcome, start: &[f64], label: Option<String>) -> RunRecord {
    let mut rec = RunRecord {
        label,
        initial_point: Some(start.to_vec()),
        status: outcome.status.label().into(),
        iterations: Some(outcome.iterations),
        time_secs: Some(outcome.elapsed_secs),
        note: outcome.note.clone(),
        ..RunRecord::default()
    };
    if let Some(pair) = &outcome.eigenpair {
        rec.lambda = Some(pair.lambda);
        rec.x = Some(pair.x.clone());
        rec.x_simplex = Some(pair.simplex_normalized_x());
        rec.rho = Some(pair.rho.clone());
        rec.residuals = Some(pair.residuals);
        rec.tol = Some(pair.tol);
        rec.passed = Some(pair.passed);
        rec.support = Some(one_based(&pair.support(1e-6)));
    }
    rec
}

fn status_code(status: SolveStatus) -> i32 {
    match status.class() {
        OutcomeClass::Nonzero => EXIT_OK,
        OutcomeClass::Zero => EXIT_ZERO,
        OutcomeClass::Diverged => EXIT_DIVERGED,
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let problem = load_problem(&args.problem)?;
    let n = problem.dim();
    let mut config = SolverConfig::for_problem(&problem);
    config.seed = args.seed;
    config.trace = args.trace.is_some();
    if let Some(v) = args.beta {
        config.beta = v;
    }
    if let Some(v) = args.gamma1 {
        config.gamma1 = v;
    }
    if let Some(v) = args.gamma2 {
        config.gamma2 = v;
    }
    if let Some(v) = args.tol {
        config.tol = v;
    }
    if let Some(v) = args.max_iter {
        config.max_iter = v;
    }
    if let Some(v) = args.zero_tol {
        config.zero_tol = v;
    }
    config.validate()?;
    let u0 = match args.u0 {
        Some(u) => u,
        None => uniform_sampler(&mut ChaCha8Rng::seed_from_u64(args.seed), n),
    };
    let v0 = args.v0.unwrap_or_else(|| u0.clone());
    let outcome = solve(&problem, &u0, &v0, &config)?;

    println!(
        "status    = {} ({} iterations, {:.3} s)",
        outcome.status.label(),
        outcome.iterations,
        outcome.elapsed_secs
    );
    println!("u0        = {}", fmt_vec(&u0));
    println!("relerr    = {:.3e}", outcome.state.last_relerr);
    if let Some(pair) = &outcome.eigenpair {
        print_pair(pair);
    }
    if let Some(note) = &outcome.note {
        println!("note: {note}");
    }
    if let Some(path) = &args.trace {
        write_trace_csv(BufWriter::new(File::create(path)?), &outcome.state.trace)?;
    }
    if let Some(path) = &args.out {
        let mut doc = ResultDocument::new("solve", Some(args.problem.display().to_string()));
        doc.records.push(record_from(&outcome, &u0, None));
        doc.write(path)?;
    }
    Ok(status_code(outcome.status))
}

fn method_label(m: Method) -> &'static str {
    match m {
        Method::ClosedFormUnivariate => "closed_form_univariate",
        Method::NewtonMultistart => "newton_multistart",
    }
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<i32> {
    let problem = load_problem(&args.problem)?;
    let result = enumerate_pareto_spectrum(&problem, args.max_support, args.attempts, args.seed)?;
    println!("{:>12}  {:<10} {:<36} {:<40} method", "lambda", "support", "w", "off-support margins");
    for e in &result.entries {
        let w: Vec<f64> = e.support.iter().map(|&i| e.x[i]).collect();
        let margins: Vec<String> = e.margins.iter().map(|(i, g)| format!("{}:{g:.4}", i + 1)).collect();
        println!(
            "{:>12.6}  {:<10} {:<36} {:<40} {}",
            e.lambda,
            fmt_support(&e.support),
            fmt_vec(&w),
            margins.join(" "),
            method_label(e.method)
        );
    }
    let bound = result.bound.map_or_else(|| "overflow".to_string(), |b| b.to_string());
    let completeness = match result.completeness {
        Completeness::ExactForSingletons => "exact_for_singletons",
        Completeness::Heuristic => "heuristic",
    };
    println!(
        "{} distinct eigenvalues (bound n*m^n = {bound}); {} supports explored; completeness: {completeness}",
        result.eigenvalues.len(),
        result.supports_explored
    );
    for s in &result.boundary_ambiguous {
        println!("boundary-ambiguous: lambda {:.6} support {}", s.lambda, fmt_support(&s.support));
    }
    for i in &result.degenerate {
        println!("degenerate singleton polynomial at index {}", i + 1);
    }
    if let Some(path) = &args.out {
        let mut doc = ResultDocument::new("enumerate", Some(args.problem.display().to_string()));
        doc.completeness = Some(completeness.into());
        doc.count_bound = Some(bound);
        for e in &result.entries {
            let pair = verify_eigenpair(&problem, e.lambda, &e.x, 1e-6)?;
            doc.records.push(RunRecord {
                status: "converged_nonzero".into(),
                lambda: Some(e.lambda),
                x: Some(e.x.clone()),
                x_simplex: Some(pair.simplex_normalized_x()),
                rho: Some(pair.rho.clone()),
                residuals: Some(pair.residuals),
                tol: Some(pair.tol),
                passed: Some(pair.passed),
                support: Some(one_based(&e.support)),
                method: Some(method_label(e.method).into()),
                ..RunRecord::default()
            });
        }
        doc.write(path)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let problem = load_problem(&args.problem)?;
    match verify_eigenpair(&problem, args.lambda, &args.x, args.tol) {
        Ok(pair) => {
            print_pair(&pair);
            Ok(if pair.passed { EXIT_OK } else { EXIT_VERIFY_FAIL })
        }
        Err(Error::ZeroVector) => {
            println!("x = 0 is not an eigenvector: FAIL");
            Ok(EXIT_VERIFY_FAIL)
        }
        Err(e) => Err(e),
    }
}

fn print_check(c: &RowCheck) {
    let r = &c.reference;
    println!("Example {} row {}  u0 = {}", r.example, r.row, fmt_vec(r.start));
    match &c.outcome.eigenpair {
        Some(pair) => {
            println!("  lambda     ref   {:<10.4} computed {:<10.6} |d| {:.1e}", r.lambda, pair.lambda, c.lambda_err);
            println!("  x          ref   {} computed {} |d| {:.1e}", fmt_vec(r.x), fmt_vec(&pair.x), c.x_err);
            println!("  rho        ref   {} computed {} |d| {:.1e}", fmt_vec(r.rho), fmt_vec(&pair.rho), c.rho_err);
        }
        None => println!("  status {} (no eigenpair)", c.outcome.status.label()),
    }
    println!(
        "  iterations ref   {:<10} computed {:<10} budget {}{}",
        r.iterations,
        c.outcome.iterations,
        ITERATION_BUDGET,
        if c.within_budget { "" } else { " EXCEEDED" }
    );
    println!(
        "  time       ref   {:<10.2} computed {:.3} s",
        r.time_secs, c.outcome.elapsed_secs
    );
    println!(
        "  eigen {}  rho {}  budget {}  => {}",
        ok(c.eigen_ok()),
        ok(c.rho_ok()),
        ok(c.within_budget),
        if c.passed() { "PASS" } else { "FAIL" }
    );
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "no"
    }
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<i32> {
    let example = args.example as usize;
    let rows = match args.rows.as_str() {
        "all" => None,
        k => {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("--rows must be `all` or a row number, got {k:?}")))?;
            if reproduce::rows_of(example).iter().all(|r| r.row != k) {
                return Err(Error::InvalidParameter(format!("example {example} has no row {k}")));
            }
            Some(k)
        }
    };
    let checks = reproduce::reproduce_example(example, rows)?;
    let mut all_ok = true;
    let mut doc = ResultDocument::new("reproduce", Some(format!("example{example}")));
    for c in &checks {
        print_check(c);
        all_ok &= c.passed();
        doc.records.push(record_from(
            &c.outcome,
            c.reference.start,
            Some(format!("example {} row {}", example, c.reference.row)),
        ));
    }
    if let Some(runs) = args.multistart {
        let problem = crate::document::bundled_problem(example)?;
        let mut cfg = reproduce::reference_config(example);
        cfg.seed = args.seed;
        let report = multistart(&problem, runs, &cfg, uniform_sampler)?;
        let verified = report
            .runs
            .iter()
            .filter(|r| r.outcome.status == SolveStatus::ConvergedNonzero)
            .all(|r| r.outcome.eigenpair.as_ref().is_some_and(|p| p.passed));
        println!(
            "multistart: {runs} runs, seed {}: diverged {:.2}  zero {:.2}  nonzero {:.2}; nonzero outcomes verified: {}",
            args.seed,
            report.rates.diverged,
            report.rates.zero,
            report.rates.nonzero,
            if verified { "yes" } else { "NO" }
        );
        all_ok &= verified;
        for r in &report.runs {
            doc.records
                .push(record_from(&r.outcome, &r.start, Some(format!("multistart run {} seed {}", r.index, r.seed))));
        }
    }
    if let Some(path) = &args.out {
        doc.write(path)?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_VERIFY_FAIL })
}

fn apply_env() -> Result<()> {
    if let Some(raw) = std::env::var_os(SIZE_GUARD_ENV) {
        let value = raw
            .to_str()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("{SIZE_GUARD_ENV} must be a positive integer")))?;
        set_size_guard(value);
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = apply_env() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })
}

