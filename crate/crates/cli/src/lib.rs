//! `sbsurf` command line: runs identity suites, Chern numbers and theorem
//! diagnostics, prints a fixed-width table and writes a JSON report.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use sbsurf_core::error::Error;
use sbsurf_core::geometry::term;
use sbsurf_core::metrics::{JetMode, MetricField, BUILTIN};
use sbsurf_core::quadrature::{DensityIntegrals, QuadratureGrid};
use sbsurf_core::registry::{
    chern_summary_from, estimate_a_from, integral_ids, integral_reports_from, pointwise_ids,
    theorem_report, verify_pointwise_suite, ChernFormula, ChernValue, PointwiseConfig, Status,
    Theorem, TheoremReport, VerificationReport, INTEGRAL_TOL, POINTWISE_FD_TOL, POINTWISE_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const MAX_GRID: usize = 256;
const MAX_POINTS: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "sbsurf", version, about = "Numerical verification of curvature identities on Hermitian surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the builtin metric families and their parameters.
    ListMetrics(OutputArgs),
    /// Verify identity suites on one metric.
    Verify(VerifyArgs),
    /// Integrate volume, torsion and defect densities.
    Integrate(GridArgs),
    /// First Chern number from one or all of the four formulas.
    Chern(ChernArgs),
    /// Evaluate theorem hypotheses on a quadrature grid.
    Theorem(TheoremArgs),
    /// The torsion constant ‖𝓡_ij + 𝓡_ji − 3T_iT_j‖² / ‖∂̄*ω‖⁴.
    EstimateA(GridArgs),
    /// Print the table of a saved JSON report.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// JSON report path; `-` writes JSON to stdout instead of the table.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Keep per-identity runtimes in the JSON report.
    #[arg(long)]
    timings: bool,
    /// Worker threads [env: SBSURF_JOBS; default: available cores].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Metric spec, e.g. `hopf-standard` or `torus-perturbed:eps=0.1`.
    #[arg(long)]
    metric: String,
    /// Quadrature nodes per axis.
    #[arg(long, default_value_t = 24)]
    grid: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    metric: String,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 24)]
    grid: usize,
    /// Seeded sample points for the pointwise suite.
    #[arg(long, default_value_t = 32)]
    points: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Relative tolerance of pointwise identities [default: 1e-8 analytic, 1e-5 fd].
    #[arg(long)]
    tol_pointwise: Option<f64>,
    #[arg(long, default_value_t = INTEGRAL_TOL)]
    tol_integral: f64,
    #[arg(long, value_enum, default_value_t = Jets::Analytic)]
    jet_mode: Jets,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ChernArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// sb1, sb2, sb3 or chern-weil; all four when omitted.
    #[arg(long)]
    formula: Option<String>,
}

#[derive(Args, Debug)]
struct TheoremArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Theorem name (ric2, ric34, ...); all when omitted.
    #[arg(long)]
    theorem: Option<String>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    path: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pointwise,
    Integral,
    Chern,
    Theorem,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Jets {
    Analytic,
    Fd,
}

impl From<Jets> for JetMode {
    fn from(j: Jets) -> Self {
        match j {
            Jets::Analytic => JetMode::Analytic,
            Jets::Fd => JetMode::Fd,
        }
    }
}

/// The validated configuration echoed into the report. Worker count and
/// output path are excluded so the report does not depend on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metric: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub suite: Option<Suite>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol_pointwise: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol_integral: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jet_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theorem: Option<String>,
}

impl RunConfig {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            metric: None,
            suite: None,
            grid: None,
            points: None,
            seed: None,
            tol_pointwise: None,
            tol_integral: None,
            jet_mode: None,
            formula: None,
            theorem: None,
        }
    }
}

/// Computed values that are not pass/fail identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Quantity {
    Metric { name: String, parameters: String, description: String },
    Integral { name: String, metric: String, value: f64, error: f64, n: usize, n_ref: usize },
    Chern { metric: String, c1_squared: f64, #[serde(flatten)] chern: ChernValue },
    EstimateA { metric: String, value: f64, n: usize },
    Theorem(TheoremReport),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub config: RunConfig,
    pub results: Vec<VerificationReport>,
    pub quantities: Vec<Quantity>,
    pub summary: Summary,
}

impl Report {
    fn new(config: RunConfig, results: Vec<VerificationReport>, quantities: Vec<Quantity>) -> Self {
        let mut summary = Summary::default();
        for r in &results {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Self { tool_version: env!("CARGO_PKG_VERSION").into(), config, results, quantities, summary }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            EXIT_FAILURE
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A failure that ends the run before a report exists.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn check_range<T: PartialOrd + std::fmt::Display>(flag: &str, v: T, lo: T, hi: T) -> Result<T, Usage> {
    if v < lo || v > hi {
        Err(Usage(format!("--{flag} {v} is out of range [{lo}, {hi}]")))
    } else {
        Ok(v)
    }
}

fn check_tol(flag: &str, v: f64) -> Result<f64, Usage> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Usage(format!("--{flag} {v} must lie in (0, 1)")))
    }
}

fn jobs(arg: Option<usize>) -> Result<Option<usize>, Usage> {
    let n = match arg {
        Some(n) => Some(n),
        None => match std::env::var("SBSURF_JOBS") {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim().parse().map_err(|_| Usage(format!("SBSURF_JOBS=`{v}` is not a positive integer")))?,
            ),
            _ => None,
        },
    };
    match n {
        Some(0) => Err(Usage("job count must be at least 1".into())),
        n => Ok(n),
    }
}

fn grid_setup(a: &GridArgs, command: &str) -> Result<(MetricField, usize, RunConfig), Usage> {
    let m = MetricField::parse(&a.metric)?;
    let n = check_range("grid", a.grid, 4, MAX_GRID)?;
    let mut cfg = RunConfig::new(command);
    cfg.metric = Some(m.descriptor());
    cfg.grid = Some(n);
    Ok((m, n, cfg))
}

fn chern_quantity(m: &MetricField, c: ChernValue) -> Quantity {
    Quantity::Chern { metric: m.descriptor(), c1_squared: c.c1_squared(), chern: c }
}

fn run_verify(a: &VerifyArgs) -> Result<Report, Usage> {
    let m = MetricField::parse(&a.metric)?;
    let mode = JetMode::from(a.jet_mode);
    let default_tol = if mode == JetMode::Fd { POINTWISE_FD_TOL } else { POINTWISE_TOL };
    let tol_pw = check_tol("tol-pointwise", a.tol_pointwise.unwrap_or(default_tol))?;
    let tol_in = check_tol("tol-integral", a.tol_integral)?;
    let points = check_range("points", a.points, 1, MAX_POINTS)?;
    let n = check_range("grid", a.grid, 4, MAX_GRID)?;

    let mut cfg = RunConfig::new("verify");
    cfg.metric = Some(m.descriptor());
    cfg.suite = Some(a.suite);
    let pointwise = matches!(a.suite, Suite::Pointwise | Suite::All);
    let gridded = a.suite != Suite::Pointwise;
    if pointwise {
        cfg.points = Some(points);
        cfg.seed = Some(a.seed);
        cfg.tol_pointwise = Some(tol_pw);
        cfg.jet_mode = Some(mode.as_str().into());
    }
    if gridded {
        cfg.grid = Some(n);
    }
    if matches!(a.suite, Suite::Integral | Suite::Chern | Suite::All) {
        cfg.tol_integral = Some(tol_in);
    }

    let mut results = Vec::new();
    let mut quantities = Vec::new();
    if pointwise {
        let pc = PointwiseConfig { n_points: points, seed: a.seed, tol: tol_pw, mode };
        results.extend(verify_pointwise_suite(&pointwise_ids(), &m, &pc)?);
    }
    if matches!(a.suite, Suite::Integral | Suite::Chern | Suite::All) {
        let ids: Vec<&str> = if a.suite == Suite::Chern {
            vec!["IN-12", "IN-13", "IN-14", "IN-15", "IN-16"]
        } else {
            integral_ids()
        };
        let x = DensityIntegrals::compute(&m, n)?;
        let grid = QuadratureGrid::build(m.model(), n)?;
        results.extend(integral_reports_from(&ids, &m, &grid, &x.fine, tol_in)?);
        for c in chern_summary_from(&x).values {
            quantities.push(chern_quantity(&m, c));
        }
    }
    if matches!(a.suite, Suite::Theorem | Suite::All) {
        let grid = QuadratureGrid::build(m.model(), n)?;
        for th in Theorem::ALL {
            quantities.push(Quantity::Theorem(theorem_report(&m, &grid, th)?));
        }
    }
    Ok(Report::new(cfg, results, quantities))
}

fn run_integrate(a: &GridArgs) -> Result<Report, Usage> {
    let (m, n, cfg) = grid_setup(a, "integrate")?;
    let x = DensityIntegrals::compute(&m, n)?;
    let named = [
        ("volume", term::ONE),
        ("torsion-l2", term::T2),
        ("torsion-l4", term::T4),
        ("lambda-dbar-dbar-star", term::LAM),
        ("kahler-defect", term::D_OMEGA2),
        ("dbar-dbar-star-l2", term::DDBAR2),
    ];
    let quantities = named
        .iter()
        .map(|&(name, k)| Quantity::Integral {
            name: name.into(),
            metric: m.descriptor(),
            value: x.fine.v[k].re,
            error: (x.fine.v[k] - x.coarse.v[k]).norm(),
            n: x.n,
            n_ref: x.n_ref,
        })
        .collect();
    Ok(Report::new(cfg, Vec::new(), quantities))
}

fn run_chern(a: &ChernArgs) -> Result<Report, Usage> {
    let (m, n, mut cfg) = grid_setup(&a.grid, "chern")?;
    let only = a.formula.as_deref().map(ChernFormula::parse).transpose()?;
    cfg.formula = only.map(|f| f.name().into());
    let x = DensityIntegrals::compute(&m, n)?;
    let quantities = chern_summary_from(&x)
        .values
        .into_iter()
        .filter(|c| only.is_none_or(|f| f == c.formula))
        .map(|c| chern_quantity(&m, c))
        .collect();
    Ok(Report::new(cfg, Vec::new(), quantities))
}

fn run_theorem(a: &TheoremArgs) -> Result<Report, Usage> {
    let (m, n, mut cfg) = grid_setup(&a.grid, "theorem")?;
    let only = a.theorem.as_deref().map(Theorem::parse).transpose()?;
    cfg.theorem = only.map(|t| t.name().into());
    let grid = QuadratureGrid::build(m.model(), n)?;
    let quantities = Theorem::ALL
        .into_iter()
        .filter(|t| only.is_none_or(|o| o == *t))
        .map(|t| theorem_report(&m, &grid, t).map(Quantity::Theorem))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(cfg, Vec::new(), quantities))
}

fn run_estimate_a(a: &GridArgs) -> Result<Report, Usage> {
    let (m, n, cfg) = grid_setup(a, "estimate-a")?;
    let grid = QuadratureGrid::build(m.model(), n)?;
    let x = sbsurf_core::quadrature::integrate_densities(&grid, &m)?;
    let q = Quantity::EstimateA { metric: m.descriptor(), value: estimate_a_from(&x), n };
    Ok(Report::new(cfg, Vec::new(), vec![q]))
}

fn run_list_metrics() -> Report {
    let quantities = BUILTIN
        .iter()
        .map(|&(name, params, desc)| Quantity::Metric {
            name: name.into(),
            parameters: params.into(),
            description: desc.into(),
        })
        .collect();
    Report::new(RunConfig::new("list-metrics"), Vec::new(), quantities)
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// The human-readable fixed-width summary.
pub fn render_table(r: &Report) -> String {
    let mut s = String::new();
    if !r.results.is_empty() {
        let _ = writeln!(s, "{:<6} {:<16} {:<28} {:<8} {:>11} {:>11} {:>9}", "ID", "KIND", "METRIC", "STATUS", "ABS", "REL", "TOL");
        for v in &r.results {
            let kind = serde_json::to_value(v.kind).ok().and_then(|k| k.as_str().map(String::from)).unwrap_or_default();
            let status = match v.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            let _ = writeln!(
                s,
                "{:<6} {:<16} {:<28} {:<8} {:>11} {:>11} {:>9}",
                v.id,
                kind,
                v.metric,
                status,
                sci(v.abs_residual),
                sci(v.rel_residual),
                format!("{:.0e}", v.tolerance)
            );
            if let Some(why) = &v.skip_reason {
                let _ = writeln!(s, "       skipped: {why}");
            }
        }
    }
    for q in &r.quantities {
        match q {
            Quantity::Metric { name, parameters, description } => {
                let p = if parameters.is_empty() { "-" } else { parameters };
                let _ = writeln!(s, "{name:<16} {p:<22} {description}");
            }
            Quantity::Integral { name, metric, value, error, n, n_ref } => {
                let _ = writeln!(s, "{name:<22} {metric:<28} {value:>18.10} ± {} (N={n} vs {n_ref})", sci(*error));
            }
            Quantity::Chern { metric, c1_squared, chern } => {
                let _ = writeln!(
                    s,
                    "chern {:<10} {:<28} 4π²c1² = {:>16.6} ± {}  c1² = {:.6} (N={} vs {})",
                    chern.formula.name(),
                    metric,
                    chern.value,
                    sci(chern.error),
                    c1_squared,
                    chern.n,
                    chern.n_ref
                );
            }
            Quantity::EstimateA { metric, value, n } => {
                let _ = writeln!(s, "estimate-a {metric:<28} a = {value:.12} (N={n})");
            }
            Quantity::Theorem(t) => {
                let _ = writeln!(s, "theorem {:<24} {:<28} {}", t.theorem.name(), t.metric, t.verdict);
                for h in &t.hypotheses {
                    let _ = writeln!(s, "    {:<26} {:>11} {}", h.name, sci(h.value), if h.holds { "holds" } else { "fails" });
                }
                let _ = writeln!(s, "    {:<26} {:>11}", "kahler defect", sci(t.kahler_defect));
            }
        }
    }
    if !r.results.is_empty() {
        let _ = writeln!(s, "pass {}  fail {}  skipped {}", r.summary.pass, r.summary.fail, r.summary.skipped);
    }
    s
}

fn strip_timings(r: &mut Report) {
    for v in &mut r.results {
        v.runtime_ms = None;
    }
}

fn emit(mut r: Report, out: &OutputArgs, stdout: &mut dyn Write) -> Result<i32, Usage> {
    if !out.timings {
        strip_timings(&mut r);
    }
    let json = r.to_json();
    match out.output.as_deref() {
        Some(p) if p.as_os_str() == "-" => {
            let _ = stdout.write_all(json.as_bytes());
        }
        Some(p) => {
            fs::write(p, &json).map_err(|e| Usage(format!("cannot write {}: {e}", p.display())))?;
            let _ = stdout.write_all(render_table(&r).as_bytes());
        }
        None => {
            let _ = stdout.write_all(render_table(&r).as_bytes());
        }
    }
    Ok(r.exit_code())
}

fn run_report(a: &ReportArgs, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let text = fs::read_to_string(&a.path).map_err(|e| Usage(format!("cannot read {}: {e}", a.path.display())))?;
    let r: Report =
        serde_json::from_str(&text).map_err(|e| Usage(format!("{} is not a report: {e}", a.path.display())))?;
    let _ = stdout.write_all(render_table(&r).as_bytes());
    Ok(r.exit_code())
}

fn with_jobs<T: Send>(n: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Usage> {
    match n {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let out = match cmd {
        Command::ListMetrics(o) => o,
        Command::Verify(a) => &a.out,
        Command::Integrate(a) | Command::EstimateA(a) => &a.out,
        Command::Chern(a) => &a.grid.out,
        Command::Theorem(a) => &a.grid.out,
        Command::Report(a) => return run_report(a, stdout),
    };
    let n = jobs(out.jobs)?;
    let report = with_jobs(n, || match cmd {
        Command::ListMetrics(_) => Ok(run_list_metrics()),
        Command::Verify(a) => run_verify(a),
        Command::Integrate(a) => run_integrate(a),
        Command::Chern(a) => run_chern(a),
        Command::Theorem(a) => run_theorem(a),
        Command::EstimateA(a) => run_estimate_a(a),
        Command::Report(_) => unreachable!("handled above"),
    })??;
    emit(report, out, stdout)
}

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli.command, stdout) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "sbsurf: {msg}");
            EXIT_USAGE
        }
    }
}
