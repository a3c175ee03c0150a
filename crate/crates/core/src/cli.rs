//! Command-line harness: `table` runs convergence studies and renders the
//! error/order tables, `plot-data` emits loglog-ready CSV, and `verify`
//! runs the operator-level property suites.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 verification failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{
    double_mesh_error, max_pointwise_error, run_convergence, solve_double_mesh, solve_problem,
    ConvergenceReport, ErrorMode,
};
use crate::error::Error;
use crate::mesh::DEFAULT_TAU0;
use crate::problem::{example1, example2, validate, ProblemSpec};
use crate::scheme::SchemeKind;
use crate::solver::{residual, row_scale};
use crate::verify::{run_verify, VerifyConfig};

/// Default epsilon grid: the ten decades 1e0 .. 1e-9.
pub fn default_epsilons() -> Vec<f64> {
    (0..=9).map(|k| 10f64.powi(-k)).collect()
}

/// Dyadic epsilon set {2^-12, 2^-16}.
pub fn dyadic_epsilons() -> Vec<f64> {
    vec![2f64.powi(-12), 2f64.powi(-16)]
}

/// Default mesh-size grid: 16, 32, ..., 1024.
pub fn default_ns() -> Vec<usize> {
    (4..=10).map(|k| 1usize << k).collect()
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::Cell { source, .. } => match source.as_ref() {
                Error::InvalidGrid(_) | Error::InvalidMesh(_) | Error::InvalidEpsilon(_) => {
                    CliError::Config(e.to_string())
                }
                _ => CliError::Numerical(e.to_string()),
            },
            Error::InvalidGrid(_)
            | Error::InvalidMesh(_)
            | Error::InvalidEpsilon(_)
            | Error::MissingExactSolution(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "layerfd",
    about = "Fitted-mesh hybrid finite differences for turning-point boundary layer problems",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a convergence study and print the error/order table.
    Table(TableArgs),
    /// Emit per-n error columns with 1/N and 1/N^2 reference slopes.
    PlotData(PlotArgs),
    /// Run the operator property suites over a grid.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Hybrid,
    Upwind,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Hybrid => SchemeKind::Hybrid,
            SchemeArg::Upwind => SchemeKind::Upwind,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ErrorModeArg {
    Exact,
    DoubleMesh,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Built-in problem id (example1 | example2).
    #[arg(long, conflicts_with = "config")]
    problem: Option<String>,
    /// TOML config file defining a polynomial-coefficient problem and
    /// optional grid/output sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated epsilon list; accepts 1e-8 and 2^-16 forms.
    /// Defaults to the ten decades 1e0..1e-9.
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated mesh sizes (each divisible by 4).
    #[arg(long)]
    n: Option<String>,
    /// Transition-parameter multiplier.
    #[arg(long)]
    tau0: Option<f64>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = SchemeArg::Hybrid)]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Error measurement override (defaults to exact when available).
    #[arg(long, value_enum)]
    error_mode: Option<ErrorModeArg>,
    /// Report cells whose monotonicity hypotheses fail (stderr).
    #[arg(long)]
    check_assumptions: bool,
    /// Recompute and bound the algebraic residual of every solve.
    #[arg(long)]
    residual_check: bool,
    /// Additionally emit plot data (requires exactly one epsilon).
    #[arg(long)]
    emit_plot_data: bool,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Schemes to include: hybrid, upwind, or both.
    #[arg(long, default_value = "both")]
    schemes: String,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    error_mode: Option<ErrorModeArg>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Treat hypothesis (assumption) failures as fatal.
    #[arg(long)]
    strict: bool,
    /// Random draws per cell for the behavioral checks.
    #[arg(long, default_value_t = 100)]
    draws: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

/// Fully resolved run configuration shared by the commands.
#[derive(Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub scheme: SchemeKind,
    pub epsilons: Vec<f64>,
    pub ns: Vec<usize>,
    pub tau0: f64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub error_mode: Option<ErrorMode>,
    pub check_assumptions: bool,
    pub residual_check: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

/// Parses an epsilon token: plain floats plus the `B^-E` power form.
pub fn parse_epsilon(tok: &str) -> Result<f64, CliError> {
    let tok = tok.trim();
    let value = if let Some((base, exp)) = tok.split_once('^') {
        let base: f64 = base
            .parse()
            .map_err(|_| CliError::Config(format!("bad epsilon `{tok}`")))?;
        let exp: f64 = exp
            .parse()
            .map_err(|_| CliError::Config(format!("bad epsilon `{tok}`")))?;
        base.powf(exp)
    } else {
        tok.parse()
            .map_err(|_| CliError::Config(format!("bad epsilon `{tok}`")))?
    };
    if !(value > 0.0 && value <= 1.0) {
        return Err(CliError::Config(format!(
            "epsilon {value} out of range (0, 1]"
        )));
    }
    Ok(value)
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_epsilon)
        .collect()
}

fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    let ns: Result<Vec<usize>, _> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad mesh size `{t}`")))
        })
        .collect();
    let ns = ns?;
    for &n in &ns {
        if !n.is_multiple_of(4) {
            return Err(CliError::Config(format!("n must be divisible by 4, got {n}")));
        }
        if n < 8 {
            return Err(CliError::Config(format!("n must be at least 8, got {n}")));
        }
    }
    Ok(ns)
}

// ---------------------------------------------------------------- config file

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: Option<FileProblem>,
    grid: Option<FileGrid>,
    output: Option<FileOutput>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileProblem {
    /// Built-in id; mutually exclusive with the coefficient fields.
    id: Option<String>,
    name: Option<String>,
    /// Polynomial coefficients, constant term first.
    a: Option<Vec<f64>>,
    b: Option<Vec<f64>>,
    f: Option<Vec<f64>>,
    domain: Option<[f64; 2]>,
    bc: Option<[f64; 2]>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    /// Epsilon tokens: numbers or strings such as "2^-16".
    eps: Option<Vec<toml::Value>>,
    n: Option<Vec<usize>>,
    tau0: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    format: Option<String>,
    path: Option<String>,
}

fn polynomial(coeffs: Vec<f64>) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    Arc::new(move |x| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c))
}

fn builtin(id: &str) -> Result<ProblemSpec, CliError> {
    match id {
        "example1" => Ok(example1()),
        "example2" => Ok(example2()),
        other => Err(CliError::Config(format!(
            "unknown problem `{other}` (expected example1 or example2)"
        ))),
    }
}

fn problem_from_file(fp: &FileProblem) -> Result<ProblemSpec, CliError> {
    if let Some(id) = &fp.id {
        return builtin(id);
    }
    let a = fp
        .a
        .clone()
        .ok_or_else(|| CliError::Config("config [problem] is missing `a`".into()))?;
    let b = fp
        .b
        .clone()
        .ok_or_else(|| CliError::Config("config [problem] is missing `b`".into()))?;
    let f = fp.f.clone().unwrap_or_else(|| vec![0.0]);
    let domain = fp.domain.unwrap_or([0.0, 1.0]);
    let bc = fp.bc.unwrap_or([0.0, 0.0]);
    if domain[0].is_nan() || domain[1].is_nan() || domain[0] >= domain[1] {
        return Err(CliError::Config(format!(
            "config domain {domain:?} must satisfy x_l < x_r"
        )));
    }
    let name = fp.name.clone().unwrap_or_else(|| "user".to_string());
    let mut p = ProblemSpec::new(
        name,
        (domain[0], domain[1]),
        polynomial(a),
        polynomial(b),
        polynomial(f),
        (bc[0], bc[1]),
    );
    if let Some(alpha) = fp.alpha {
        p = p.with_alpha(alpha);
    }
    if let Some(beta) = fp.beta {
        p = p.with_beta(beta);
    }
    let violations = validate(&p, 101);
    if !violations.is_empty() {
        eprintln!(
            "warning: problem `{}` fails {} admissibility check(s); first: {}",
            p.name(),
            violations.len(),
            violations[0].detail
        );
    }
    Ok(p)
}

fn resolve(
    args: &ProblemArgs,
    format: Option<FormatArg>,
    output: Option<PathBuf>,
) -> Result<RunConfig, CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let problem = if let Some(id) = &args.problem {
        builtin(id)?
    } else if let Some(fp) = &file.problem {
        problem_from_file(fp)?
    } else {
        example1()
    };

    let epsilons = if let Some(s) = &args.eps {
        parse_eps_list(s)?
    } else if let Some(vals) = file.grid.as_ref().and_then(|g| g.eps.as_ref()) {
        let mut out = Vec::with_capacity(vals.len());
        for v in vals {
            let e = match v {
                toml::Value::Float(f) => {
                    if *f > 0.0 && *f <= 1.0 {
                        *f
                    } else {
                        return Err(CliError::Config(format!("epsilon {f} out of range (0, 1]")));
                    }
                }
                toml::Value::Integer(i) => parse_epsilon(&i.to_string())?,
                toml::Value::String(s) => parse_epsilon(s)?,
                other => {
                    return Err(CliError::Config(format!(
                        "bad epsilon entry in config: {other}"
                    )))
                }
            };
            out.push(e);
        }
        out
    } else {
        default_epsilons()
    };
    if epsilons.is_empty() {
        return Err(CliError::Config("empty epsilon list".into()));
    }

    let ns = if let Some(s) = &args.n {
        parse_n_list(s)?
    } else if let Some(ns) = file.grid.as_ref().and_then(|g| g.n.clone()) {
        for &n in &ns {
            if !n.is_multiple_of(4) || n < 8 {
                return Err(CliError::Config(format!(
                    "n must be >= 8 and divisible by 4, got {n}"
                )));
            }
        }
        ns
    } else {
        default_ns()
    };
    if ns.is_empty() {
        return Err(CliError::Config("empty n list".into()));
    }

    let tau0 = args
        .tau0
        .or(file.grid.as_ref().and_then(|g| g.tau0))
        .unwrap_or(DEFAULT_TAU0);
    if tau0.is_nan() || tau0 <= 0.0 {
        return Err(CliError::Config(format!("tau0 must be positive, got {tau0}")));
    }

    let format = match format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Markdown) => OutputFormat::Markdown,
        None => match file.output.as_ref().and_then(|o| o.format.as_deref()) {
            Some("csv") | None => OutputFormat::Csv,
            Some("markdown") | Some("md") => OutputFormat::Markdown,
            Some(other) => {
                return Err(CliError::Config(format!("unknown output format `{other}`")))
            }
        },
    };
    let output = output.or_else(|| {
        file.output
            .as_ref()
            .and_then(|o| o.path.as_ref())
            .map(PathBuf::from)
    });

    Ok(RunConfig {
        problem,
        scheme: SchemeKind::Hybrid,
        epsilons,
        ns,
        tau0,
        format,
        output,
        error_mode: None,
        check_assumptions: false,
        residual_check: false,
    })
}

// ---------------------------------------------------------------- rendering

fn fmt_err(v: f64) -> String {
    format!("{v:.4E}")
}

fn fmt_eps(v: f64) -> String {
    format!("{v:E}")
}

fn fmt_order(v: f64) -> String {
    format!("{v:.4}")
}

fn render_table_csv(report: &ConvergenceReport) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["epsilon".to_string()];
    header.extend(report.ns.iter().map(|n| format!("N={n}")));
    wtr.write_record(&header).expect("csv write");
    for &eps in &report.epsilons {
        let mut errs = vec![fmt_eps(eps)];
        let mut ords = vec![String::new()];
        for (k, &n) in report.ns.iter().enumerate() {
            let entry = report.entry(eps, n).expect("entry exists");
            errs.push(fmt_err(entry.error));
            ords.push(if k + 1 < report.ns.len() {
                entry.order.map(fmt_order).unwrap_or_default()
            } else {
                String::new()
            });
        }
        wtr.write_record(&errs).expect("csv write");
        wtr.write_record(&ords).expect("csv write");
    }
    let mut uniform = vec!["uniform".to_string()];
    for n in &report.ns {
        uniform.push(fmt_err(report.uniform_rows[n]));
    }
    wtr.write_record(&uniform).expect("csv write");
    String::from_utf8(wtr.into_inner().expect("csv flush")).expect("utf8")
}

fn render_table_markdown(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Problem `{}`, scheme {}, tau0 = {}, error mode {}.",
        report.problem, report.scheme, report.tau0, report.mode
    );
    let _ = writeln!(out);
    let mut header = String::from("| epsilon |");
    let mut rule = String::from("|---|");
    for n in &report.ns {
        let _ = write!(header, " N={n} |");
        rule.push_str("---|");
    }
    let _ = writeln!(out, "{header}");
    let _ = writeln!(out, "{rule}");
    for &eps in &report.epsilons {
        let mut errs = format!("| {} |", fmt_eps(eps));
        let mut ords = String::from("|  |");
        for (k, &n) in report.ns.iter().enumerate() {
            let entry = report.entry(eps, n).expect("entry exists");
            let _ = write!(errs, " {} |", fmt_err(entry.error));
            let cell = if k + 1 < report.ns.len() {
                entry.order.map(fmt_order).unwrap_or_default()
            } else {
                String::new()
            };
            let _ = write!(ords, " {cell} |");
        }
        let _ = writeln!(out, "{errs}");
        let _ = writeln!(out, "{ords}");
    }
    let mut uniform = String::from("| uniform |");
    for n in &report.ns {
        let _ = write!(uniform, " {} |", fmt_err(report.uniform_rows[n]));
    }
    let _ = writeln!(out, "{uniform}");
    out
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- commands

pub fn cmd_table(config: &RunConfig) -> Result<String, CliError> {
    let mode = config.error_mode;
    let report = run_convergence(
        &config.problem,
        config.scheme,
        &config.epsilons,
        &config.ns,
        config.tau0,
        mode,
    )?;

    if config.check_assumptions {
        let failing: Vec<_> = report
            .entries
            .iter()
            .filter(|e| !e.assumptions.passed())
            .map(|e| format!("(eps={:.3e}, n={})", e.epsilon, e.n))
            .collect();
        if failing.is_empty() {
            eprintln!("assumption check: all cells satisfy the monotonicity hypotheses");
        } else {
            eprintln!(
                "assumption check: {} cell(s) fail the monotonicity hypotheses: {}",
                failing.len(),
                failing.join(", ")
            );
        }
    }
    if config.residual_check {
        let mut worst = 0.0f64;
        for &eps in &config.epsilons {
            for &n in &config.ns {
                let sol = solve_problem(&config.problem, eps, n, config.tau0, config.scheme)?;
                let system = rebuild_system(config, eps, n)?;
                let r = residual(&system, &sol);
                let scale = row_scale(&system) * sol.max_abs();
                if scale > 0.0 {
                    worst = worst.max(r / scale);
                }
                if r > 1e-11 * scale {
                    return Err(CliError::Numerical(format!(
                        "residual check failed at (eps={eps:e}, n={n}): {r:e} > 1e-11 * {scale:e}"
                    )));
                }
            }
        }
        eprintln!("residual check: worst residual {worst:.3e} of row scale");
    }

    let text = match config.format {
        OutputFormat::Csv => render_table_csv(&report),
        OutputFormat::Markdown => render_table_markdown(&report),
    };
    write_output(&config.output, &text)?;
    Ok(text)
}

fn rebuild_system(
    config: &RunConfig,
    eps: f64,
    n: usize,
) -> Result<crate::scheme::TridiagonalSystem, CliError> {
    use crate::mesh::{build_mesh, MeshConfig};
    use crate::problem::Epsilon;
    let e = Epsilon::new(eps)?;
    let mesh = build_mesh(MeshConfig::new(n, e, config.problem.domain()).with_tau0(config.tau0))?;
    Ok(match config.scheme {
        SchemeKind::Hybrid => crate::scheme::assemble(&config.problem, &mesh, e),
        SchemeKind::Upwind => crate::scheme::assemble_upwind(&config.problem, &mesh, e),
    })
}

/// Per-scheme errors for one epsilon over the n list, with 1/N and 1/N^2
/// reference columns.
pub fn cmd_plot_data(
    config: &RunConfig,
    include_hybrid: bool,
    include_upwind: bool,
) -> Result<String, CliError> {
    if config.epsilons.len() != 1 {
        return Err(CliError::Config(format!(
            "plot data needs exactly one epsilon, got {}",
            config.epsilons.len()
        )));
    }
    if config.ns.len() < 2 {
        return Err(CliError::Config("need at least two N values".into()));
    }
    let eps = config.epsilons[0];
    let use_exact = match config.error_mode {
        Some(ErrorMode::Exact) => {
            if !config.problem.has_exact() {
                return Err(CliError::Config(format!(
                    "problem `{}` has no exact solution",
                    config.problem.name()
                )));
            }
            true
        }
        Some(ErrorMode::DoubleMesh) => false,
        None => config.problem.has_exact(),
    };

    let error_for = |scheme: SchemeKind, n: usize| -> Result<f64, CliError> {
        if use_exact {
            let sol = solve_problem(&config.problem, eps, n, config.tau0, scheme)?;
            let exact = config.problem.exact_fn().expect("checked above");
            Ok(max_pointwise_error(&sol, exact.as_ref()))
        } else {
            let (coarse, fine) = solve_double_mesh(&config.problem, eps, n, config.tau0, scheme)?;
            Ok(double_mesh_error(&coarse, &fine)?)
        }
    };

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["n".to_string()];
    if include_hybrid {
        header.push("error_hybrid".into());
    }
    if include_upwind {
        header.push("error_upwind".into());
    }
    header.push("ref_1_over_n".into());
    header.push("ref_1_over_n2".into());
    wtr.write_record(&header).expect("csv write");
    for &n in &config.ns {
        let mut rec = vec![n.to_string()];
        if include_hybrid {
            rec.push(fmt_err(error_for(SchemeKind::Hybrid, n)?));
        }
        if include_upwind {
            rec.push(fmt_err(error_for(SchemeKind::Upwind, n)?));
        }
        rec.push(fmt_err(1.0 / n as f64));
        rec.push(fmt_err(1.0 / (n * n) as f64));
        wtr.write_record(&rec).expect("csv write");
    }
    let text = String::from_utf8(wtr.into_inner().expect("csv flush")).expect("utf8");
    write_output(&config.output, &text)?;
    Ok(text)
}

/// Runs the verification suites and renders one pass/fail line per check.
pub fn cmd_verify(config: &RunConfig, strict: bool, draws: usize, seed: u64) -> (String, i32) {
    let mut vc = VerifyConfig::new(config.epsilons.clone(), config.ns.clone(), config.tau0);
    vc.rhs_draws = draws;
    vc.seed = seed;
    let report = match run_verify(&config.problem, &vc) {
        Ok(r) => r,
        Err(e) => return (format!("verify failed to run: {e}\n"), 2),
    };
    let mut out = String::new();
    for c in &report.checks {
        let _ = writeln!(
            out,
            "check {:<24} {}  worst margin {:+.3e}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.worst,
            c.detail
        );
    }
    if report.assumption_flags.is_empty() {
        let _ = writeln!(out, "assumptions: all cells satisfy the hypotheses");
    } else {
        for f in &report.assumption_flags {
            let _ = writeln!(out, "assumption flag: {f}");
        }
    }
    let failed = !report.all_passed() || (strict && !report.assumption_flags.is_empty());
    (out, if failed { 3 } else { 0 })
}

// ---------------------------------------------------------------- entry point

/// Parses arguments, dispatches and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap renders its own help/version/usage output
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match cli.command {
        Command::Table(args) => {
            let mut config = match resolve(&args.problem, args.format, args.output.clone()) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            config.scheme = args.scheme.into();
            config.error_mode = args.error_mode.map(|m| match m {
                ErrorModeArg::Exact => ErrorMode::Exact,
                ErrorModeArg::DoubleMesh => ErrorMode::DoubleMesh,
            });
            config.check_assumptions = args.check_assumptions;
            config.residual_check = args.residual_check;
            if let Err(e) = cmd_table(&config) {
                return fail(e);
            }
            if args.emit_plot_data {
                let mut plot_config = config.clone();
                plot_config.output = args.output.as_ref().map(|p| {
                    let mut q = p.clone();
                    q.set_extension("plot.csv");
                    q
                });
                let include_hybrid = config.scheme == SchemeKind::Hybrid;
                if let Err(e) = cmd_plot_data(&plot_config, include_hybrid, !include_hybrid) {
                    return fail(e);
                }
            }
            0
        }
        Command::PlotData(args) => {
            let (hybrid, upwind) = match args.schemes.as_str() {
                "both" => (true, true),
                "hybrid" => (true, false),
                "upwind" => (false, true),
                other => {
                    return fail(CliError::Config(format!(
                        "unknown schemes selection `{other}` (hybrid | upwind | both)"
                    )))
                }
            };
            let mut config = match resolve(&args.problem, None, args.output.clone()) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            config.error_mode = args.error_mode.map(|m| match m {
                ErrorModeArg::Exact => ErrorMode::Exact,
                ErrorModeArg::DoubleMesh => ErrorMode::DoubleMesh,
            });
            match cmd_plot_data(&config, hybrid, upwind) {
                Ok(_) => 0,
                Err(e) => fail(e),
            }
        }
        Command::Verify(args) => {
            let mut config = match resolve(&args.problem, None, None) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            // verify defaults to the smaller grid unless sizes were given
            if args.problem.n.is_none() {
                config.ns = vec![16, 32, 64, 128, 256];
            }
            let (text, code) = cmd_verify(&config, args.strict, args.draws, args.seed);
            print!("{text}");
            code
        }
    }
}

fn fail(e: CliError) -> i32 {
    eprintln!("error: {}", e.message());
    e.exit_code()
}
