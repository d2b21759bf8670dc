//! Command-line driver.
//!
//! Exit codes: 0 success, 1 input or domain error, 2 a verification check
//! failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::canonical::{build_distribution, canonical_form, CanonicalQLogForm};
use crate::combinatorics::{tsallis_entropy, ProbabilityVector};
use crate::dynamics::{fig2_data, fig2_default_grid, FIG2_Q, FIG2_SCALES};
use crate::error::QError;
use crate::figure::{FigureTable, Grid};
use crate::qalgebra::{q_product, q_ratio};
use crate::qcore::{q_exp_with, q_log, DomainMode, EntropicIndex};
use crate::qgaussian::{fig3_data, fig3_default_grid, FIG3_Q, FIG3_SCALES};
use crate::verify::{run_suite, Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "QDEFORM_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "qdeform",
    version,
    about = "q-deformed calculus: evaluation, verification suites and figure data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a single function.
    Eval(EvalArgs),
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
    /// Emit curve data for the rescaling figures.
    Fig(FigArgs),
    /// Fit the canonical q-log form to data values read from a file.
    Canonicalize(CanonicalizeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvalFn {
    Qlog,
    Qexp,
    Qprod,
    Qratio,
    Tsallis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Figure {
    Fig2,
    Fig3,
}

#[derive(Debug, Args)]
struct EvalArgs {
    function: EvalFn,
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Probabilities for `tsallis`, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Tsallis cutoff: exp_q is 0 outside its domain when q < 1.
    #[arg(long)]
    cutoff_mode: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    /// Falls back to QDEFORM_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigArgs {
    which: Figure,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// Comma-separated scale constants.
    #[arg(long, value_delimiter = ',')]
    scales: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    grid_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    grid_max: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CanonicalizeArgs {
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Zero-based CSV column holding the data values.
    #[arg(long, default_value_t = 0)]
    column: usize,
    /// Skip the first non-comment line.
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::input(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::input(format!("json error: {e}"))
    }
}

/// Parse `args` (including the program name) and run one command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let usage = Cli::command().render_usage();
                    let _ = write!(stderr, "{}\n{usage}\n", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Fig(a) => cmd_fig(a, stdout),
        Command::Canonicalize(a) => cmd_canonicalize(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// Shortest round-trip decimal, in exponent form outside `[1e-5, 1e16)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn index(q: f64) -> Result<EntropicIndex, Failure> {
    Ok(EntropicIndex::new(q)?)
}

fn require(name: &str, v: Option<f64>) -> Result<f64, Failure> {
    let v = v.ok_or_else(|| Failure::input(format!("--{name} is required")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::input(format!("--{name} must be finite")))
    }
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let q = index(a.q)?;
    let mode = if a.cutoff_mode {
        DomainMode::Cutoff
    } else {
        DomainMode::Strict
    };
    let v = match a.function {
        EvalFn::Qlog => q_log(q, require("y", a.y)?)?,
        EvalFn::Qexp => q_exp_with(q, require("x", a.x)?, mode)?,
        EvalFn::Qprod => q_product(q, require("x", a.x)?, require("y", a.y)?)?,
        EvalFn::Qratio => q_ratio(q, require("x", a.x)?, require("y", a.y)?)?,
        EvalFn::Tsallis => {
            if a.p.is_empty() {
                return Err(Failure::input("--p is required"));
            }
            tsallis_entropy(q, &ProbabilityVector::new(a.p)?)
        }
    };
    writeln!(out, "{}", format_number(v))?;
    Ok(EXIT_OK)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(Failure::input(format!("{SEED_ENV}: {e}"))),
    }
}

fn emit(path: Option<&Path>, out: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut f = File::create(p)
                .map_err(|e| Failure::input(format!("cannot create {}: {e}", p.display())))?;
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn report_csv(r: &SuiteReport) -> Result<Vec<u8>, Failure> {
    let mut w = csv_writer();
    w.write_record([
        "suite",
        "seed",
        "name",
        "samples",
        "max_rel_err",
        "tolerance",
        "pass",
    ])?;
    for c in &r.cases {
        w.write_record([
            r.suite.clone(),
            r.seed.to_string(),
            c.name.clone(),
            c.samples.to_string(),
            format_number(c.max_rel_err),
            format_number(c.tolerance),
            c.pass.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Failure::input(e.to_string()))
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let seed = resolve_seed(a.seed)?;
    let report = run_suite(a.suite, seed)?;
    let bytes = match a.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => report_csv(&report)?,
    };
    emit(a.out.as_deref(), out, &bytes)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}

fn figure_csv(t: &FigureTable, label: &str) -> Result<Vec<u8>, Failure> {
    let mut w = csv_writer();
    w.write_record([
        "curve_id",
        "scale",
        "x_raw",
        "y_raw",
        "x_rescaled",
        "y_rescaled",
        "qlog_y",
    ])?;
    for r in &t.rows {
        w.write_record([
            format!("{label}={}", format_number(t.scales[r.curve])),
            format_number(r.scale),
            format_number(r.x_raw),
            format_number(r.y_raw),
            format_number(r.x_rescaled),
            format_number(r.y_rescaled),
            format_number(r.qlog_y),
        ])?;
    }
    w.into_inner().map_err(|e| Failure::input(e.to_string()))
}

fn cmd_fig(a: FigArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (q_default, scales_default, grid_default, label): (f64, &[f64], Grid, &str) = match a.which
    {
        Figure::Fig2 => (FIG2_Q, &FIG2_SCALES, fig2_default_grid(), "C"),
        Figure::Fig3 => (FIG3_Q, &FIG3_SCALES, fig3_default_grid(), "c"),
    };
    let q = index(a.q.unwrap_or(q_default))?;
    let scales = if a.scales.is_empty() {
        scales_default.to_vec()
    } else {
        a.scales
    };
    let grid = Grid::new(
        a.grid_min.unwrap_or(grid_default.min),
        a.grid_max.unwrap_or(grid_default.max),
        a.grid_points.unwrap_or(grid_default.points),
    )?;
    let table = match a.which {
        Figure::Fig2 => fig2_data(q, &scales, grid)?,
        Figure::Fig3 => fig3_data(q, &scales, grid)?,
    };
    let bytes = match a.format {
        Format::Csv => figure_csv(&table, label)?,
        Format::Json => json_bytes(&table)?,
    };
    emit(a.out.as_deref(), out, &bytes)?;
    Ok(EXIT_OK)
}

/// Data values with the 1-based file line each came from. Blank lines and
/// lines starting with `#` are skipped.
fn read_values(path: &Path, column: usize, header: bool) -> Result<Vec<(u64, f64)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut skip_header = header;
    for (i, raw) in text.lines().enumerate() {
        let line = i as u64 + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if skip_header {
            skip_header = false;
            continue;
        }
        let mut fields = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(trimmed.as_bytes());
        let record = fields
            .records()
            .next()
            .transpose()
            .map_err(|e| Failure::input(format!("line {line}: {e}")))?
            .unwrap_or_default();
        let field = record
            .get(column)
            .ok_or_else(|| Failure::input(format!("line {line}: no column {column}")))?;
        let x: f64 = field.parse().map_err(|_| {
            Failure::input(format!("line {line}: cannot parse {field:?} as a number"))
        })?;
        if !x.is_finite() {
            return Err(Failure::input(format!("line {line}: value must be finite")));
        }
        values.push((line, x));
    }
    if values.is_empty() {
        return Err(Failure::input(format!(
            "{}: no data values",
            path.display()
        )));
    }
    Ok(values)
}

#[derive(Serialize)]
struct CanonicalRow {
    line: u64,
    x: f64,
    frequency: f64,
    p: f64,
    lnq_p: f64,
}

#[derive(Serialize)]
struct CanonicalOutput {
    q: f64,
    c: f64,
    n: f64,
    slope: f64,
    intercept: f64,
    rows: Vec<CanonicalRow>,
}

fn cmd_canonicalize(a: CanonicalizeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let q = index(a.q)?;
    if !a.c.is_finite() {
        return Err(Failure::input("--c must be finite"));
    }
    let values = read_values(&a.input, a.column, a.header)?;
    let xs: Vec<f64> = values.iter().map(|v| v.1).collect();
    let dist = build_distribution(q, &xs, a.c).map_err(|e| match e {
        QError::DomainViolation {
            index: Some(i),
            constraint,
        } => Failure::input(format!(
            "line {}: domain violation: constraint value {constraint} must be > 0",
            values[i].0
        )),
        other => other.into(),
    })?;
    let CanonicalQLogForm {
        slope, intercept, ..
    } = canonical_form(&dist);
    let rows: Vec<CanonicalRow> = values
        .iter()
        .zip(dist.frequencies())
        .zip(dist.probabilities())
        .map(|((&(line, x), &frequency), &p)| CanonicalRow {
            line,
            x,
            frequency,
            p,
            lnq_p: slope * x + intercept,
        })
        .collect();
    let output = CanonicalOutput {
        q: q.value(),
        c: a.c,
        n: dist.total(),
        slope,
        intercept,
        rows,
    };
    let bytes = match a.format {
        Format::Json => json_bytes(&output)?,
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record([
                "line",
                "x",
                "frequency",
                "p",
                "lnq_p",
                "q",
                "c",
                "n",
                "slope",
                "intercept",
            ])?;
            for r in &output.rows {
                w.write_record([
                    r.line.to_string(),
                    format_number(r.x),
                    format_number(r.frequency),
                    format_number(r.p),
                    format_number(r.lnq_p),
                    format_number(output.q),
                    format_number(output.c),
                    format_number(output.n),
                    format_number(output.slope),
                    format_number(output.intercept),
                ])?;
            }
            w.into_inner().map_err(|e| Failure::input(e.to_string()))?
        }
    };
    emit(a.out.as_deref(), out, &bytes)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["qdeform"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(16.0), "16");
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(-2.5e20), "-2.5e20");
        assert_eq!(format_number(0.0), "0");
        let x = 0.1 + 0.2;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(call(&["eval", "qexp", "--q", "0.5", "--x", "6"]).1, "16\n");
        assert_eq!(call(&["eval", "qlog", "--q", "2", "--y", "2"]).1, "0.5\n");
        assert_eq!(call(&["eval", "qexp", "--q", "1.3", "--x", "-10"]).0, 0);
        let (code, _, err) = call(&["eval", "qexp", "--q", "1.3", "--x", "4"]);
        assert_eq!(code, 1);
        assert!(err.contains("-0.2"), "{err}");
        assert_eq!(
            call(&["eval", "qexp", "--q", "0.5", "--x", "-3", "--cutoff-mode"]).1,
            "0\n"
        );
        assert_eq!(
            call(&["eval", "tsallis", "--q", "2", "--p", "0.5,0.5"]).1,
            "0.5\n"
        );
        assert_eq!(
            call(&["eval", "qprod", "--q", "1", "--x", "2", "--y", "3"]).1,
            "6\n"
        );
        assert_eq!(call(&["eval", "qlog", "--q", "2"]).0, 1);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["verify", "bogus"]).0, 1);
        assert_eq!(call(&[]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }
}
