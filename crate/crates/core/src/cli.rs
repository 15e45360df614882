//! Command-line front end: `approximate`, `sweep`, `verify` and `bound`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, default_grid, ErrorReport};
use crate::bernstein;
use crate::error::{Error, Result};
use crate::function::{FunctionSpec, ModulusSpec, ModulusTable, BOUNDARY_TOLERANCE};
use crate::quantizer::{self, choose_t, CutoffMode, LatticeApproximant, QuantizerOptions, RoundingRule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_IN_CLASS: i32 = 3;
pub const EXIT_STRUCTURAL: i32 = 4;

pub const SWEEP_HEADER: &str = "n,t,sup_error,bernstein_error,bound_main,bound_simple,grid_points,wall_time_ms";
pub const BOUND_HEADER: &str = "n,rho,t_star,t_default,t_hoelder";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BoundaryNotInteger { .. } => EXIT_NOT_IN_CLASS,
        Error::StructuralViolation(_) | Error::Overflow(_) => EXIT_STRUCTURAL,
        _ => EXIT_USAGE,
    }
}

/// 17 significant digits, '.' decimal point.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Parser)]
#[command(name = "bernlat", version, about = "Integer-coefficient approximation through the Bernstein lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build Q_n for one degree and report its error against the bounds.
    Approximate(ApproximateArgs),
    /// Tabulate errors and bounds over a list of degrees as CSV.
    Sweep(SweepArgs),
    /// Check the basis identities and the S_{n,t} bound numerically.
    Verify(VerifyArgs),
    /// Tabulate rho(f, n) and its minimizing cutoff for an analytic modulus.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Function of x, e.g. "sin(pi*x)".
    #[arg(long = "f", value_name = "EXPR")]
    pub expr: Option<String>,
    /// CSV with header "x,f", strictly increasing x from 0 to 1.
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    #[command(flatten)]
    pub source: Source,
    /// lipschitz:<L>[,<cap>] | hoelder:<C>,<alpha> | empirical:<m> | table:<csv path>
    #[arg(long, value_name = "SPEC")]
    pub modulus: Option<String>,
    #[arg(long = "boundary-tol", default_value_t = BOUNDARY_TOLERANCE)]
    pub boundary_tol: f64,
    /// nearest-ties-even | nearest-ties-away | nearest-ties-up
    #[arg(long, default_value = "nearest-ties-even")]
    pub rounding: String,
}

#[derive(Debug, Args)]
pub struct ApproximateArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long)]
    pub n: usize,
    /// Cutoff; defaults to floor(n^(2/3)/2).
    #[arg(long)]
    pub t: Option<usize>,
    /// Grid size for sup-norm estimates; defaults to max(2049, 8n+1).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Where to write the JSON approximant document.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pin the document timestamp (SOURCE_DATE_EPOCH or the Unix epoch).
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct Degrees {
    /// Comma-separated degrees.
    #[arg(long = "n-list", value_name = "N,N,...")]
    pub n_list: Option<String>,
    /// Geometric progression start,factor,count.
    #[arg(long = "n-geom", value_name = "START,FACTOR,COUNT")]
    pub n_geom: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub degrees: Degrees,
    #[arg(long)]
    pub grid: Option<usize>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write 0 for wall_time_ms so output is byte-reproducible.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "n-max", default_value_t = 256)]
    pub n_max: usize,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Seed for the extra random abscissae.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random abscissae added per degree.
    #[arg(long, default_value_t = 8)]
    pub random_points: usize,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub modulus: String,
    #[command(flatten)]
    pub degrees: Degrees,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Serialized form of a lattice approximant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximantDocument {
    pub schema_version: u32,
    pub n: usize,
    pub t: usize,
    pub epsilon_n: f64,
    pub q: Vec<i64>,
    pub f0: i64,
    pub f1: i64,
    pub function_text: String,
    pub rounding_rule: String,
    pub created: String,
}

impl ApproximantDocument {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new(f: &FunctionSpec, a: &LatticeApproximant, rule: RoundingRule, created: String) -> Self {
        ApproximantDocument {
            schema_version: Self::SCHEMA_VERSION,
            n: a.n,
            t: a.t,
            epsilon_n: a.epsilon_n,
            q: a.q.clone(),
            f0: f.f0(),
            f1: f.f1(),
            function_text: f.label().to_string(),
            rounding_rule: rule.name().to_string(),
            created,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != Self::SCHEMA_VERSION {
            return Err(Error::domain(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.q.len() != self.n + 1 {
            return Err(Error::LengthMismatch { expected: self.n + 1, got: self.q.len() });
        }
        Ok(())
    }

    pub fn approximant(&self) -> LatticeApproximant {
        LatticeApproximant { n: self.n, t: self.t, q: self.q.clone(), epsilon_n: self.epsilon_n }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ApproximantDocument = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// One line of `sweep` output.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub t: usize,
    pub sup_error: f64,
    pub bernstein_error: f64,
    pub bound_main: f64,
    pub bound_simple: f64,
    pub grid_points: usize,
    pub wall_time_ms: u64,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.t,
            fmt_float(self.sup_error),
            fmt_float(self.bernstein_error),
            fmt_float(self.bound_main),
            fmt_float(self.bound_simple),
            self.grid_points,
            self.wall_time_ms
        )
    }
}

fn timestamp(deterministic: bool) -> String {
    use chrono::{DateTime, SecondsFormat, Utc};
    let pinned = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse::<i64>().ok());
    let when = match pinned {
        Some(secs) => DateTime::<Utc>::from_timestamp(secs, 0).unwrap_or_default(),
        None if deterministic => DateTime::<Utc>::UNIX_EPOCH,
        None => Utc::now(),
    };
    when.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::InvalidModulus(format!("{what}: '{s}' is not a number")))
}

/// Parses `lipschitz:<L>[,<cap>]`, `hoelder:<C>,<alpha>`, `empirical:<m>`
/// or `table:<path>`.
pub fn parse_modulus(spec: &str) -> Result<ModulusSpec> {
    let (kind, params) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidModulus(format!("'{spec}': expected <kind>:<parameters>")))?;
    let parts: Vec<&str> = params.split(',').collect();
    let m = match (kind.trim().to_ascii_lowercase().as_str(), parts.as_slice()) {
        ("lipschitz", [l]) => ModulusSpec::lipschitz(parse_f64(l, "Lipschitz constant")?),
        ("lipschitz", [l, cap]) => ModulusSpec::Lipschitz {
            constant: parse_f64(l, "Lipschitz constant")?,
            cap: Some(parse_f64(cap, "modulus cap")?),
        },
        ("hoelder" | "holder", [c, a]) => ModulusSpec::hoelder(parse_f64(c, "Hoelder constant")?, parse_f64(a, "alpha")?),
        ("empirical", [g]) => ModulusSpec::Empirical {
            grid: g.trim().parse().map_err(|_| Error::InvalidModulus(format!("grid '{g}'")))?,
        },
        ("table", _) => ModulusSpec::Table(read_modulus_table(Path::new(params))?),
        _ => return Err(Error::InvalidModulus(format!("unrecognized modulus '{spec}'"))),
    };
    m.validate()?;
    Ok(m)
}

fn read_two_column_csv(path: &Path, header: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Table(format!("{}: header must be '{}'", path.display(), header.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Table(format!("{}: expected two columns", path.display())));
        }
        let a = record[0].parse::<f64>().map_err(|_| Error::Table(format!("bad number '{}'", &record[0])))?;
        let b = record[1].parse::<f64>().map_err(|_| Error::Table(format!("bad number '{}'", &record[1])))?;
        rows.push((a, b));
    }
    Ok(rows)
}

pub fn read_function_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    read_two_column_csv(path, ["x", "f"])
}

pub fn read_modulus_table(path: &Path) -> Result<ModulusTable> {
    ModulusTable::new(read_two_column_csv(path, ["delta", "omega"])?)
}

fn load_function(args: &FunctionArgs) -> Result<(FunctionSpec, RoundingRule)> {
    let rule = RoundingRule::from_name(&args.rounding)
        .ok_or_else(|| Error::domain(format!("unknown rounding rule '{}'", args.rounding)))?;
    let mut f = match (&args.source.expr, &args.source.table) {
        (Some(text), _) => FunctionSpec::from_expr(text, args.boundary_tol)?,
        (None, Some(path)) => {
            FunctionSpec::from_table(read_function_table(path)?, args.boundary_tol)?.with_label(path.display().to_string())
        }
        (None, None) => return Err(Error::domain("one of --f or --table is required")),
    };
    if let Some(m) = &args.modulus {
        f = f.with_modulus(parse_modulus(m)?)?;
    }
    Ok((f, rule))
}

/// Degrees from `--n-list` or `--n-geom`.
pub fn parse_degrees(d: &Degrees) -> Result<Vec<usize>> {
    let bad = |s: &str| Error::domain(format!("invalid degree list '{s}'"));
    let list = match (&d.n_list, &d.n_geom) {
        (Some(s), None) => s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad(s)))
            .collect::<Result<Vec<_>>>()?,
        (None, Some(s)) => {
            let p: Vec<usize> = s
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|_| bad(s)))
                .collect::<Result<_>>()?;
            let [start, factor, count] = p[..] else {
                return Err(bad(s));
            };
            let mut out = Vec::with_capacity(count);
            let mut n = start;
            for _ in 0..count {
                out.push(n);
                n = n.checked_mul(factor).ok_or_else(|| bad(s))?;
            }
            out
        }
        _ => return Err(Error::domain("exactly one of --n-list or --n-geom is required")),
    };
    if list.is_empty() || list.contains(&0) {
        return Err(Error::domain("degrees must be positive"));
    }
    Ok(list)
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_approximate(args: &ApproximateArgs, out: &mut dyn Write) -> Result<(ApproximantDocument, ErrorReport)> {
    let (f, rule) = load_function(&args.function)?;
    if args.n == 0 {
        return Err(Error::domain("--n must be at least 1"));
    }
    let t = match args.t {
        Some(t) => t,
        None => choose_t(args.n, CutoffMode::Default)?,
    };
    let options = QuantizerOptions { rule, ..QuantizerOptions::default() };
    let (a, _) = quantizer::quantize_function_with(&f, args.n, t, options)?;
    let m = args.grid.unwrap_or_else(|| default_grid(args.n));
    let report = ErrorReport::measure(&f, &a, m)?;
    let doc = ApproximantDocument::new(&f, &a, rule, timestamp(args.deterministic));
    if let Some(path) = &args.out {
        doc.write(path)?;
    }
    out.write_all(report.render().as_bytes())?;
    Ok((doc, report))
}

pub fn sweep_rows(f: &FunctionSpec, rule: RoundingRule, degrees: &[usize], grid: Option<usize>, timed: bool) -> Result<Vec<SweepRow>> {
    let options = QuantizerOptions { rule, ..QuantizerOptions::default() };
    degrees
        .iter()
        .map(|&n| {
            let start = Instant::now();
            let t = choose_t(n, CutoffMode::Default)?;
            let (a, _) = quantizer::quantize_function_with(f, n, t, options)?;
            let report = ErrorReport::measure(f, &a, grid.unwrap_or_else(|| default_grid(n)))?;
            Ok(SweepRow {
                n,
                t,
                sup_error: report.sup_error,
                bernstein_error: report.bernstein_error,
                bound_main: report.bound_main,
                bound_simple: report.bound_simple,
                grid_points: report.grid_points,
                wall_time_ms: if timed { start.elapsed().as_millis() as u64 } else { 0 },
            })
        })
        .collect()
}

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_line());
        s.push('\n');
    }
    s
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<Vec<SweepRow>> {
    let (f, rule) = load_function(&args.function)?;
    let degrees = parse_degrees(&args.degrees)?;
    let rows = sweep_rows(&f, rule, &degrees, args.grid, !args.deterministic)?;
    write_output(args.out.as_deref(), &render_sweep(&rows), out)?;
    Ok(rows)
}

/// Outcome of one identity suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub threshold: String,
}

fn abscissae(grid: usize, extra: &[f64]) -> Vec<f64> {
    let mut xs = bernstein::uniform_grid(grid.max(2));
    xs.extend_from_slice(extra);
    xs
}

/// Runs the five identity suites for degrees up to `n_max`.
pub fn verify_suites(n_max: usize, grid: usize, seed: u64, random_points: usize) -> Result<Vec<SuiteResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_degree: Vec<Vec<f64>> = (0..=n_max)
        .map(|_| {
            let extra: Vec<f64> = (0..random_points).map(|_| rng.gen::<f64>()).collect();
            abscissae(grid, &extra)
        })
        .collect();

    let mut basis_worst = 0.0f64;
    let mut basis_ok = true;
    let mut moment_worst = 0.0f64;
    let mut diff_worst = 0.0f64;
    let mut diff_ok = true;
    let mut snt_worst = f64::NEG_INFINITY;
    for n in 1..=n_max {
        for &x in &per_degree[n] {
            let row = bernstein::basis_row(n, x)?;
            let dev = (row.sum() - 1.0).abs();
            basis_worst = basis_worst.max(dev / (n + 1) as f64);
            if dev > 1e-12 * (n + 1) as f64 || row.values.iter().any(|&v| v < -1e-15) {
                basis_ok = false;
            }
            moment_worst = moment_worst.max(bernstein::moment_residuals(n, x)?.max_scaled(n));
            let worst = bernstein::difference_identity_residuals(n, x)?.into_iter().fold(0.0, f64::max);
            diff_worst = diff_worst.max(worst / n as f64);
            if worst > 1e-12 * n as f64 {
                diff_ok = false;
            }
            if n >= 2 {
                let v = analysis::snt_violations_all_cutoffs(n, x)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
                snt_worst = snt_worst.max(v);
            }
        }
    }
    let mono_max = n_max.min(12);
    let mono_ok = (0..=mono_max).all(|n| (0..=n).all(|k| analysis::monomial_membership_check(n, k)));

    Ok(vec![
        SuiteResult {
            name: "basis_partition",
            passed: basis_ok,
            max_residual: basis_worst,
            threshold: "|sum p - 1| <= 1e-12 (n+1), p >= -1e-15".into(),
        },
        SuiteResult {
            name: "moments",
            passed: moment_worst <= 1e-9,
            max_residual: moment_worst,
            threshold: "scaled residual <= 1e-9".into(),
        },
        SuiteResult {
            name: "difference_identity",
            passed: diff_ok,
            max_residual: diff_worst,
            threshold: "residual <= 1e-12 n".into(),
        },
        SuiteResult {
            name: "snt_bound",
            passed: snt_worst <= 0.0 || n_max < 2,
            max_residual: if n_max < 2 { 0.0 } else { snt_worst },
            threshold: "S_{n,t} - x(1-x)/sqrt(t/2) <= 0".into(),
        },
        SuiteResult {
            name: "monomial_membership",
            passed: mono_ok,
            max_residual: 0.0,
            threshold: format!("exact for 0 <= k <= n <= {mono_max}"),
        },
    ])
}

pub fn render_verify(results: &[SuiteResult], args: &VerifyArgs) -> String {
    let mut s = format!(
        "verify n_max={} grid={} seed={} random_points={}\n",
        args.n_max, args.grid, args.seed, args.random_points
    );
    for r in results {
        let _ = writeln!(
            s,
            "{} {:<20} max_residual={:.6e}  [{}]",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.max_residual,
            r.threshold
        );
    }
    s
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let results = verify_suites(args.n_max, args.grid, args.seed, args.random_points)?;
    out.write_all(render_verify(&results, args).as_bytes())?;
    Ok(results.iter().all(|r| r.passed))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub rho: f64,
    pub t_star: usize,
    pub t_default: usize,
    pub t_hoelder: Option<usize>,
}

pub fn bound_rows(modulus: &ModulusSpec, degrees: &[usize]) -> Result<Vec<BoundRow>> {
    if !modulus.is_analytic() {
        return Err(Error::EstimateOnlyModulus);
    }
    let f = FunctionSpec::from_fn(|_| 0.0, BOUNDARY_TOLERANCE)?.with_modulus(modulus.clone())?;
    let alpha = match *modulus {
        ModulusSpec::Hoelder { exponent, .. } => Some(exponent),
        _ => None,
    };
    degrees
        .iter()
        .map(|&n| {
            let r = quantizer::rho(&f, n)?;
            Ok(BoundRow {
                n,
                rho: r.value,
                t_star: r.t,
                t_default: choose_t(n, CutoffMode::Default)?,
                t_hoelder: alpha.map(|a| choose_t(n, CutoffMode::Hoelder(a))).transpose()?,
            })
        })
        .collect()
}

pub fn render_bound(rows: &[BoundRow]) -> String {
    let mut s = String::from(BOUND_HEADER);
    s.push('\n');
    for r in rows {
        let th = r.t_hoelder.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{}", r.n, fmt_float(r.rho), r.t_star, r.t_default, th);
    }
    s
}

pub fn cmd_bound(args: &BoundArgs, out: &mut dyn Write) -> Result<Vec<BoundRow>> {
    let modulus = parse_modulus(&args.modulus)?;
    let rows = bound_rows(&modulus, &parse_degrees(&args.degrees)?)?;
    write_output(args.out.as_deref(), &render_bound(&rows), out)?;
    Ok(rows)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Approximate(a) => cmd_approximate(a, out).map(|_| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(a, out).map(|_| EXIT_OK),
        Command::Verify(a) => cmd_verify(a, out).map(|ok| if ok { EXIT_OK } else { EXIT_VERIFY_FAILED }),
        Command::Bound(a) => cmd_bound(a, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
