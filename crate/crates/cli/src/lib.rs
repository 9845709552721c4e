//! The `mixident` command line: evaluate kernels, invert characteristic
//! functions, verify accessibility mappings, build mixtures, sample, and emit
//! plot data for the Differentiated Error Function.
//!
//! Tabular output is CSV with a header row and values at 12 significant
//! digits. Exit codes: 0 success, 1 verification failure (or a numerical
//! procedure that did not converge), 2 invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mixident::accessibility::{
    lookup, transport_mixed_mgf, verify_default, verify_definition1, AccessibilityMapping, SGrid,
    VerificationReport,
};
use mixident::mixtures::{mixture_cdf, mixture_density, mixture_mgf, sample_mixture, MixingDensity, MixtureModel};
use mixident::transforms::gil_pelaez_pdf;
use mixident::{CharacteristicFunction, DifferentiatedErrorFunction, Error, KernelDistribution, QuadratureConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Inclusive grid `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    /// floor((stop − start)/step) + 1 points, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let n = (span + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| {
                let x = self.start + k as f64 * self.step;
                if k + 1 == n && (x - self.stop).abs() < 1e-9 * self.step {
                    self.stop
                } else {
                    x
                }
            })
            .collect()
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("`{s}`: expected start:stop:step"));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{t}` is not a finite number"))
    };
    let g = Grid {
        start: num(parts[0])?,
        stop: num(parts[1])?,
        step: num(parts[2])?,
    };
    if !(g.step > 0.0) {
        return Err(format!("`{s}`: step must be > 0"));
    }
    if g.start > g.stop {
        return Err(format!("`{s}`: start must not exceed stop"));
    }
    if (g.stop - g.start) / g.step > 1e8 {
        return Err(format!("`{s}`: more than 1e8 points"));
    }
    Ok(g)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}`: tolerance must be a positive number")),
    }
}

/// `%.12g`-style formatting.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= DIGITS {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Parser, Debug)]
#[command(name = "mixident", version, about = "Kernel transforms, accessibility mappings and continuous mixtures")]
struct Cli {
    /// Plain-text key=value file; its entries override flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Density (or probability mass) on a grid
    #[command(args_override_self = true)]
    Pdf(DistGrid),
    /// Cumulative distribution function on a grid
    #[command(args_override_self = true)]
    Cdf(DistGrid),
    /// Moment-generating function on a grid
    #[command(args_override_self = true)]
    Mgf(DistGrid),
    /// Characteristic function on a grid
    #[command(args_override_self = true)]
    Cf(DistGrid),
    /// Density recovered from the characteristic function (Gil-Pelaez)
    #[command(args_override_self = true)]
    Invert(InvertArgs),
    /// Check an accessibility mapping
    #[command(args_override_self = true)]
    VerifyMapping(VerifyArgs),
    /// Continuous mixture of a kernel over its free parameter
    #[command(args_override_self = true)]
    Mix(MixArgs),
    /// Seeded draws from a kernel or a mixture
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Differentiated Error Function density on a grid
    #[command(args_override_self = true)]
    Figure1(FigureArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DistGrid {
    /// Kernel spec, e.g. gamma:r=2,theta=1
    #[arg(long)]
    dist: String,
    /// start:stop:step, endpoints inclusive
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct InvertArgs {
    #[arg(long)]
    dist: String,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    /// Absolute and relative quadrature tolerance
    #[arg(long, value_parser = parse_tol, default_value = "1e-10")]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Built-in mapping name
    #[arg(long, conflicts_with = "mapping_file")]
    name: Option<String>,
    /// Mapping definition file (name, source, target, eta, eta_inv, xi, xi_inv, epsilon1)
    #[arg(long, value_name = "PATH")]
    mapping_file: Option<PathBuf>,
    #[arg(long, value_parser = parse_tol, default_value = "1e-10")]
    tol: f64,
    /// Explicit s points instead of the default 50 points on [0, 0.9·ε₁]
    #[arg(long, value_parser = parse_grid)]
    s_grid: Option<Grid>,
    /// Verify with source and target exchanged
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    swap: bool,
    /// Rebind a fixed parameter, e.g. --set r=5
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// Check the mixed-MGF transport identity under this mixing density
    #[arg(long)]
    mixing: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum MixWhat {
    Cdf,
    Pmf,
    Pdf,
    Mgf,
}

#[derive(Args, Debug)]
struct MixArgs {
    /// Kernel spec with exactly one free parameter
    #[arg(long)]
    dist: String,
    /// Mixing density spec, e.g. gamma:r=2,theta=1 or expr:2*x,lo=0,hi=1
    #[arg(long)]
    mixing: String,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[arg(long, value_enum, default_value = "cdf")]
    what: MixWhat,
    #[arg(long, value_parser = parse_tol, default_value = "1e-10")]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    dist: String,
    /// Mix the kernel's free parameter over this density
    #[arg(long)]
    mixing: Option<String>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Grid,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

struct Csv(String);

impl Csv {
    fn new(header: &[&str]) -> Self {
        Csv(format!("{}\n", header.join(",")))
    }

    fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_g(*v)).collect();
        let _ = writeln!(self.0, "{}", cells.join(","));
    }
}

/// Appends `--key=value` for every entry of a config file.
fn config_args(path: &PathBuf) -> Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read `{}`: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value, got `{line}`", path.display(), i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k == "config" {
            return Err(format!("{}:{}: nested `config`", path.display(), i + 1));
        }
        out.push(OsString::from(format!("--{k}={}", v.trim())));
    }
    Ok(out)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Runs one invocation; returns the exit code.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut args = args;
    if let Some(path) = find_config(&args) {
        match config_args(&path) {
            Ok(extra) => args.extend(extra),
            Err(msg) => {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_INPUT;
            }
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, out, passed)) => {
            if let Err(msg) = emit(&text, out.as_ref(), stdout) {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_INPUT;
            }
            if passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Convergence(_) => EXIT_FAILED,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write `{}`: {e}", p.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn kernel(spec: &str) -> Result<KernelDistribution, Failure> {
    Ok(spec.parse()?)
}

fn quad_cfg(tol: f64) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: tol,
        rel_tol: tol,
        ..QuadratureConfig::default()
    }
}

type Outcome = (String, Option<PathBuf>, bool);

fn execute(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Pdf(a) => tabulate(a, &["x", "pdf"], |k, x| Ok(vec![k.density(x)])),
        Command::Cdf(a) => tabulate(a, &["x", "cdf"], |k, x| Ok(vec![k.cdf(x)])),
        Command::Mgf(a) => tabulate(a, &["s", "mgf"], |k, s| Ok(vec![k.mgf(s)?])),
        Command::Cf(a) => tabulate(a, &["omega", "re", "im"], |k, w| {
            let c = k.cf(w);
            Ok(vec![c.re, c.im])
        }),
        Command::Invert(a) => {
            let k = kernel(&a.dist)?;
            let cf = CharacteristicFunction::of_kernel(&k);
            let cfg = quad_cfg(a.tol);
            let mut csv = Csv::new(&["y", "f", "abs_error", "clamped"]);
            for y in a.grid.points() {
                let d = gil_pelaez_pdf(&cf, y, &cfg)?;
                csv.row(&[y, d.value, d.abs_error, if d.clamped { 1.0 } else { 0.0 }]);
            }
            Ok((csv.0, a.output.out, true))
        }
        Command::VerifyMapping(a) => verify(a),
        Command::Mix(a) => {
            let mm = MixtureModel::new(kernel(&a.dist)?, MixingDensity::parse(&a.mixing)?)?;
            let cfg = quad_cfg(a.tol);
            let (col, label) = match a.what {
                MixWhat::Cdf => ("x", "cdf"),
                MixWhat::Pmf => ("x", "pmf"),
                MixWhat::Pdf => ("x", "pdf"),
                MixWhat::Mgf => ("s", "mgf"),
            };
            let mut csv = Csv::new(&[col, label]);
            for x in a.grid.points() {
                let v = match a.what {
                    MixWhat::Cdf => mixture_cdf(&mm, x, &cfg)?,
                    MixWhat::Pmf | MixWhat::Pdf => mixture_density(&mm, x, &cfg)?,
                    MixWhat::Mgf => mixture_mgf(&mm, x, &cfg)?,
                };
                csv.row(&[x, v]);
            }
            Ok((csv.0, a.output.out, true))
        }
        Command::Sample(a) => {
            let k = kernel(&a.dist)?;
            let xs = match &a.mixing {
                Some(m) => sample_mixture(&MixtureModel::new(k, MixingDensity::parse(m)?)?, a.n, a.seed)?,
                None => k.sample(a.n, a.seed)?,
            };
            let mut csv = Csv::new(&["x"]);
            for x in xs {
                csv.row(&[x]);
            }
            Ok((csv.0, a.output.out, true))
        }
        Command::Figure1(a) => {
            let d = DifferentiatedErrorFunction::new(a.a, a.b)?;
            let mut csv = Csv::new(&["y", "f"]);
            for y in a.grid.points() {
                csv.row(&[y, d.pdf(y)]);
            }
            Ok((csv.0, a.output.out, true))
        }
    }
}

fn tabulate<F>(a: DistGrid, header: &[&str], f: F) -> Result<Outcome, Failure>
where
    F: Fn(&KernelDistribution, f64) -> mixident::Result<Vec<f64>>,
{
    let k = kernel(&a.dist)?;
    let mut csv = Csv::new(header);
    for x in a.grid.points() {
        let mut row = vec![x];
        row.extend(f(&k, x)?);
        csv.row(&row);
    }
    Ok((csv.0, a.output.out, true))
}

fn verify(a: VerifyArgs) -> Result<Outcome, Failure> {
    let mut m = match (&a.name, &a.mapping_file) {
        (Some(n), None) => lookup(n)?,
        (None, Some(p)) => AccessibilityMapping::load(p)?,
        _ => return Err(Failure::Input("give exactly one of --name or --mapping-file".into())),
    };
    for s in &a.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("`{s}`: expected NAME=VALUE")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("`{s}`: `{v}` is not a number")))?;
        m = m.with_fixed(k.trim(), v)?;
    }
    if a.swap {
        m = m.swapped();
    }
    let explicit = a.s_grid.as_ref().map(|g| SGrid::Points(g.points()));
    let report: VerificationReport = match &a.mixing {
        Some(spec) => {
            let g = MixingDensity::parse(spec)?;
            let grid = explicit.unwrap_or(SGrid::Scaled {
                points: 20,
                fraction: 0.9,
            });
            transport_mixed_mgf(&m, &g, &grid, a.tol, &QuadratureConfig::default())?
        }
        None => match explicit {
            Some(grid) => verify_definition1(&m, &m.default_grid()?, &grid, a.tol)?,
            None => verify_default(&m, a.tol)?,
        },
    };
    let mut text = format!("{m}\n{report}\n");
    let _ = writeln!(text, "max residual: {:e}", report.max_abs_residual);
    Ok((text, a.output.out, report.passed))
}
