//! The subcommands as library functions. Each returns the text for stdout;
//! machine output goes only to the `--out` file.

use std::fmt::{self, Write as _};
use std::path::Path;

use bellbound_core::chsh::{self, Mode};
use bellbound_core::optimizer::{solve_with, ProblemSpec, Solved};
use bellbound_core::oracle::oracle_max;
use bellbound_core::rational::{parse_rational, Rational};
use bellbound_core::threshold::{threshold, Target, Threshold};
use bellbound_core::{Breakpoint, Error, ParamInterval};
use serde::Serialize;

use crate::curve::curve_csv;
use crate::files::{parse_rational_list, resolve_model, resolve_problem, FileError};
use crate::report::RunReport;
use crate::runner::Threads;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const PIPELINE: i32 = 3;
    pub const VERIFY: i32 = 4;
    pub const ORACLE: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    Parse(FileError),
    Pipeline(Error),
    Verify(Vec<String>),
    Oracle(Vec<String>),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Pipeline(_) => exit::PIPELINE,
            CliError::Verify(_) => exit::VERIFY,
            CliError::Oracle(_) => exit::ORACLE,
            CliError::Io(_) => exit::IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "parse error: {e}"),
            CliError::Pipeline(e) => write!(f, "{}: {e}", e.name()),
            CliError::Verify(failed) => write!(f, "verification failed: {}", failed.join(", ")),
            CliError::Oracle(pds) => write!(f, "oracle mismatch at PD = {}", pds.join(", ")),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io(e) => CliError::Parse(FileError::Io(e)),
            other => CliError::Parse(other),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Pipeline(e)
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    if let Some(path) = out {
        std::fs::write(path, text).map_err(CliError::Io)?;
    }
    Ok(())
}

/// `tsirelson`, `sqrt(r)`, or a rational.
pub fn parse_target(text: &str) -> Result<Target, CliError> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("tsirelson") {
        return Ok(Target::tsirelson());
    }
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
        return Ok(Target::SquareRoot(parse_rational(inner).map_err(FileError::from)?));
    }
    Ok(Target::Exact(parse_rational(t).map_err(FileError::from)?))
}

pub fn parse_pd(text: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(text).map_err(FileError::from)?)
}

/// Solves and locates the Tsirelson threshold when the bound reaches it.
pub fn solve_problem(spec: &ProblemSpec, workers: usize) -> Result<(Solved, Vec<(Target, Threshold)>), Error> {
    let solved = solve_with(spec, &Threads::new(workers))?;
    let target = Target::tsirelson();
    let thresholds = match threshold(&solved.bound, &target) {
        Ok(t) => vec![(target, t)],
        Err(Error::TargetOutOfRange(_)) => vec![],
        Err(e) => return Err(e),
    };
    Ok((solved, thresholds))
}

/// Machine report for `spec`; byte-identical for every worker count.
pub fn solve_report(spec: &ProblemSpec, workers: usize) -> Result<RunReport, Error> {
    let (solved, thresholds) = solve_problem(spec, workers)?;
    Ok(RunReport::new(spec, &solved, &thresholds))
}

fn point_text(b: &Breakpoint) -> String {
    match b {
        Breakpoint::Rational(r) => r.to_string(),
        Breakpoint::Root(_) => format!("≈{}", b.to_decimal(12)),
    }
}

fn interval_text(iv: &ParamInterval) -> String {
    format!("[{}, {}]", point_text(&iv.lo), point_text(&iv.hi))
}

pub fn bound_text(solved: &Solved) -> String {
    let mut out = String::new();
    for s in &solved.bound.segments {
        writeln!(out, "B(PD) = {} on {}", s.value.pretty(), interval_text(&s.interval)).unwrap();
    }
    out
}

fn threshold_text(target: &Target, t: &Threshold) -> String {
    format!(
        "B(PD) = {target} (≈{}) first at PD ≈ {} ({})",
        target.to_decimal(12),
        t.at.to_decimal(12),
        t.at
    )
}

pub fn cmd_solve(problem: &str, workers: usize, out: Option<&Path>) -> Result<String, CliError> {
    let spec = resolve_problem(problem)?;
    let (solved, thresholds) = solve_problem(&spec, workers)?;
    write_out(out, &RunReport::new(&spec, &solved, &thresholds).to_json())?;
    let mut text = bound_text(&solved);
    for (target, t) in &thresholds {
        writeln!(text, "{}", threshold_text(target, t)).unwrap();
    }
    Ok(text)
}

pub fn cmd_curve(
    problem: &str,
    workers: usize,
    samples: usize,
    quantum_line: bool,
    out: Option<&Path>,
) -> Result<String, CliError> {
    if samples < 2 {
        return Err(CliError::Parse(FileError::Schema(
            "--samples must be at least 2".into(),
        )));
    }
    let spec = resolve_problem(problem)?;
    let (solved, thresholds) = solve_problem(&spec, workers)?;
    let csv = curve_csv(&solved.bound, spec.domain(), samples, quantum_line, &thresholds);
    match out {
        Some(path) => {
            write_out(Some(path), &csv)?;
            Ok(format!("wrote {} rows to {}\n", samples, path.display()))
        }
        None => Ok(csv),
    }
}

pub fn cmd_thresholds(problem: &str, target: &str, workers: usize) -> Result<String, CliError> {
    let target = parse_target(target)?;
    let spec = resolve_problem(problem)?;
    let solved = solve_with(&spec, &Threads::new(workers))?;
    let t = threshold(&solved.bound, &target)?;
    Ok(format!(
        "{}\nPD ≈ {}\nexact: {} with {} = 0\n",
        threshold_text(&target, &t),
        t.at.to_decimal(12),
        t.at,
        t.equation
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub model: String,
    pub pd: String,
    pub symmetrized: bool,
    pub chsh_expression: String,
    pub chsh_value: String,
    pub od: String,
    pub pd_a_to_b: String,
    pub pd_b_to_a: String,
    pub pd_measure: String,
    pub no_signalling: bool,
    pub mode: String,
    pub bound_at_pd: String,
    pub saturates: bool,
    pub failed: Vec<String>,
}

/// Checks a model at `pd`: outcome independence, the `PD` band of its mode,
/// saturation of that mode's bound and, when symmetrized, no-signalling.
/// The mode is one-way when Bob's marginals ignore Alice's setting.
pub fn verify_model(model: &str, pd: &Rational, symmetrized: bool) -> Result<VerifyReport, CliError> {
    let mut h = resolve_model(model)?;
    if symmetrized {
        h = chsh::symmetrize(&h);
    }
    let expr = chsh::chsh_value(&h);
    let value = expr.eval_at(pd)?;
    let m = chsh::measures(&h, pd)?;
    let no_signalling = chsh::no_signalling_check(&h, pd)?;
    let mode = if chsh::band_check(&h, Mode::OneWay, pd)?.holds {
        Mode::OneWay
    } else {
        Mode::TwoWay
    };
    let band = chsh::band_check(&h, mode, pd)?;
    let bound = oracle_max(&chsh::build_problem(mode), pd)?.value;

    let mut failed = Vec::new();
    if m.od != Rational::default() {
        failed.push("outcome-independence".to_string());
    }
    if !band.holds {
        failed.push("pd-budget".to_string());
    }
    if value != bound {
        failed.push("saturation".to_string());
    }
    if symmetrized && !no_signalling {
        failed.push("no-signalling".to_string());
    }
    Ok(VerifyReport {
        model: model.to_string(),
        pd: pd.to_string(),
        symmetrized,
        chsh_expression: expr.to_string(),
        chsh_value: value.to_string(),
        od: m.od.to_string(),
        pd_a_to_b: m.pd_a_to_b.to_string(),
        pd_b_to_a: m.pd_b_to_a.to_string(),
        pd_measure: m.pd.to_string(),
        no_signalling,
        mode: match mode {
            Mode::OneWay => "oneway",
            Mode::TwoWay => "twoway",
        }
        .to_string(),
        saturates: value == bound,
        bound_at_pd: bound.to_string(),
        failed,
    })
}

pub fn cmd_verify_model(model: &str, pd: &str, symmetrized: bool, out: Option<&Path>) -> Result<String, CliError> {
    let pd = parse_pd(pd)?;
    let r = verify_model(model, &pd, symmetrized)?;
    write_out(out, &(serde_json::to_string_pretty(&r).expect("serializes") + "\n"))?;
    let mut text = String::new();
    let sym = if symmetrized { " (symmetrized)" } else { "" };
    writeln!(text, "model {}{sym} at PD = {}", r.model, r.pd).unwrap();
    writeln!(text, "chsh value: {} = {}", r.chsh_value, r.chsh_expression).unwrap();
    writeln!(text, "od: {}", r.od).unwrap();
    writeln!(
        text,
        "pd A->B: {}, pd B->A: {}, pd: {}",
        r.pd_a_to_b, r.pd_b_to_a, r.pd_measure
    )
    .unwrap();
    writeln!(text, "no-signalling: {}", r.no_signalling).unwrap();
    let verdict = if r.saturates { "saturated" } else { "not saturated" };
    writeln!(text, "{} bound at PD: {} ({verdict})", r.mode, r.bound_at_pd).unwrap();
    if r.failed.is_empty() {
        Ok(text)
    } else {
        eprint!("{text}");
        Err(CliError::Verify(r.failed))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleRow {
    pub pd: String,
    pub oracle: String,
    pub symbolic: String,
    pub equal: bool,
}

pub fn oracle_rows(spec: &ProblemSpec, pds: &[Rational], workers: usize) -> Result<Vec<OracleRow>, Error> {
    let solved = solve_with(spec, &Threads::new(workers))?;
    pds.iter()
        .map(|pd| {
            let o = oracle_max(spec, pd)?.value;
            let s = solved.bound.value_at(pd);
            Ok(OracleRow {
                pd: pd.to_string(),
                oracle: o.to_string(),
                symbolic: s.as_ref().map_or_else(|| "infeasible".to_string(), |v| v.to_string()),
                equal: s.as_ref() == Some(&o),
            })
        })
        .collect()
}

pub fn cmd_oracle(problem: &str, pd_list: &str, workers: usize, out: Option<&Path>) -> Result<String, CliError> {
    let pds = parse_rational_list(pd_list)?;
    let spec = resolve_problem(problem)?;
    let rows = oracle_rows(&spec, &pds, workers)?;
    write_out(out, &(serde_json::to_string_pretty(&rows).expect("serializes") + "\n"))?;
    let mut text = String::new();
    for r in &rows {
        let mark = if r.equal { "equal" } else { "MISMATCH" };
        writeln!(
            text,
            "PD = {}: oracle {} symbolic {} {mark}",
            r.pd, r.oracle, r.symbolic
        )
        .unwrap();
    }
    let bad: Vec<String> = rows.iter().filter(|r| !r.equal).map(|r| r.pd.clone()).collect();
    if bad.is_empty() {
        Ok(text)
    } else {
        eprint!("{text}");
        Err(CliError::Oracle(bad))
    }
}
