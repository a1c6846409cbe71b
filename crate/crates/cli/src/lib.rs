//! `gdist`: command-line access to the fidelity, overlap and optimality
//! computations of `gdist-core`.
//!
//! States are JSON documents, either `{"params": {"gamma", "s", "theta",
//! "alpha": [x, y]}}` or `{"cov": [[a, b], [b, c]], "mean": [x, y]}`. A state
//! argument is a file path, or the JSON itself when it starts with `{`.
//! Angles are radians. Exit codes: 0 success, 2 invalid input, 1 numeric
//! failure.

pub mod figure;
pub mod sweep;

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdist_core::io::state_from_str;
use gdist_core::{
    classify, fidelity_gaussian, minimize_overlap, minimize_overlap_scan, overlap_at, overlap_profile,
    solve_s2_for_optimality, GaussianParams, GdistError,
};
use rayon::prelude::*;
use serde::Serialize;

use figure::{emit_figure_data, Figure, FigureRequest};
use sweep::{default_sweep, random_sweep, run_sweep, write_csv, DimPolicy, OracleCase, BASE_DIM};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const TOL_ENV: &str = "GDIST_TOL";

/// Shortest representation that parses back to the same `f64`; integral
/// values print without a fractional part.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl From<GdistError> for CliError {
    fn from(e: GdistError) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "gdist", version, about = "Homodyne distinguishability of single-mode Gaussian states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Pair {
    /// First state: JSON file, or inline JSON starting with `{`.
    #[arg(long)]
    pub a: String,
    /// Second state.
    #[arg(long)]
    pub b: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Analytic,
    Scan,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Default,
    Random,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quantum fidelity of two states.
    Fidelity {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Homodyne overlap at one angle.
    Overlap {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_parser = parse_radians, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Overlap on a uniform grid of angles in [0, π), as CSV.
    Profile {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 360)]
        steps: usize,
    },
    /// Minimum of the overlap over the homodyne angle.
    MinOverlap {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = Method::Analytic)]
        method: Method,
    },
    /// Whether homodyne detection attains the fidelity, as JSON.
    Classify {
        #[command(flatten)]
        pair: Pair,
    },
    /// Values of s2 that make a mixed pair homodyne-optimal.
    SolveS2 {
        #[arg(long)]
        g1: f64,
        #[arg(long)]
        g2: f64,
        #[arg(long)]
        s1: f64,
        /// Relative squeezing angle.
        #[arg(long, value_parser = parse_radians, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Overlap surface over (s2, phi) for one of the fixed figure slices.
    Figure {
        #[arg(long, value_enum)]
        which: Figure,
        #[arg(long, default_value_t = 1.0)]
        s2_min: f64,
        #[arg(long, default_value_t = 5.0)]
        s2_max: f64,
        #[arg(long, default_value_t = 200)]
        s2_steps: usize,
        #[arg(long, default_value_t = 720)]
        phi_steps: usize,
    },
    /// Closed forms against the number-basis oracle and quadrature.
    OracleCheck {
        #[arg(long, value_enum, conflicts_with_all = ["a", "b"])]
        sweep: Option<SweepKind>,
        /// Pairs drawn by `--sweep random`.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, requires = "b")]
        a: Option<String>,
        #[arg(long, requires = "a")]
        b: Option<String>,
        /// Fixed truncation; by default it starts at 150 and doubles until
        /// the leakage target is met.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Minimum overlap of the squeezed-heterodyne family against squeezing.
    PovmScan {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 8.0)]
        r_max: f64,
        #[arg(long, default_value_t = 32)]
        r_steps: usize,
        #[arg(long, default_value_t = 180)]
        theta_steps: usize,
    },
}

/// Plain radians. Values tagged as degrees are refused rather than guessed.
fn parse_radians(s: &str) -> Result<f64, String> {
    let lower = s.to_ascii_lowercase();
    if lower.contains("deg") || s.contains('°') {
        return Err(format!("`{s}`: angles are radians; degrees are not accepted"));
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn tolerance() -> CliResult<f64> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::Input(format!("{TOL_ENV}={raw:?} must be a positive number"))),
        },
    }
}

fn load_state(arg: &str, tol: f64) -> CliResult<GaussianParams<f64>> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?
    };
    state_from_str(&text, tol).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn load_pair(pair: &Pair, tol: f64) -> CliResult<(GaussianParams<f64>, GaussianParams<f64>)> {
    Ok((load_state(&pair.a, tol)?, load_state(&pair.b, tol)?))
}

fn to_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Parses `args` (program name first) and runs the command. Diagnostics go to
/// `err`; the return value is the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "gdist: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult<i32> {
    let tol = tolerance()?;
    match command {
        Command::Fidelity { pair, json, csv } => {
            let (a, b) = load_pair(&pair, tol)?;
            let report = fidelity_gaussian(&a.covariance(), &b.covariance())?;
            if json {
                to_json(out, &report)?;
            } else {
                let fields = [
                    ("F", report.fidelity),
                    ("delta_cap", report.delta_cap),
                    ("delta_low", report.delta_low),
                    ("exponent", report.exponent),
                    ("bures_distance_sq", report.bures_distance_sq),
                    ("uhlmann_angle", report.uhlmann_angle),
                ];
                if csv {
                    let names: Vec<&str> = fields.iter().map(|f| f.0).collect();
                    let values: Vec<String> = fields.iter().map(|f| fmt_f64(f.1)).collect();
                    writeln!(out, "{}\n{}", names.join(","), values.join(","))?;
                } else {
                    for (name, v) in fields {
                        writeln!(out, "{name}={}", fmt_f64(v))?;
                    }
                }
            }
        }
        Command::Overlap { pair, phi } => {
            let (a, b) = load_pair(&pair, tol)?;
            writeln!(out, "I_phi={}", fmt_f64(overlap_at(&a, &b, phi)))?;
        }
        Command::Profile { pair, steps } => {
            let (a, b) = load_pair(&pair, tol)?;
            if steps == 0 {
                return Err(CliError::Input("--steps must be positive".into()));
            }
            let profile = overlap_profile(&a, &b, steps)?;
            writeln!(out, "phi,I_phi,F")?;
            for (phi, i) in &profile.samples {
                writeln!(out, "{},{},{}", fmt_f64(*phi), fmt_f64(*i), fmt_f64(profile.fidelity_ref))?;
            }
        }
        Command::MinOverlap { pair, method } => {
            let (a, b) = load_pair(&pair, tol)?;
            let f = fidelity_gaussian(&a.covariance(), &b.covariance())?.fidelity;
            writeln!(out, "method,phi,min_overlap,F,gap")?;
            let mut emit = |name: &str, m: gdist_core::OverlapMinimum<f64>| {
                writeln!(
                    out,
                    "{name},{},{},{},{}",
                    fmt_f64(m.phi),
                    fmt_f64(m.overlap),
                    fmt_f64(f),
                    fmt_f64(m.overlap - f)
                )
            };
            if matches!(method, Method::Analytic | Method::Both) {
                emit("analytic", minimize_overlap(&a, &b))?;
            }
            if matches!(method, Method::Scan | Method::Both) {
                emit("scan", minimize_overlap_scan(&a, &b, gdist_core::optimality::DEFAULT_SCAN_POINTS))?;
            }
        }
        Command::Classify { pair } => {
            let (a, b) = load_pair(&pair, tol)?;
            to_json(out, &classify(&a, &b, tol)?)?;
        }
        Command::SolveS2 { g1, g2, s1, theta } => {
            let roots = solve_s2_for_optimality(g1, g2, s1, theta)?;
            writeln!(out, "s2,theta_tilde,raw_s2")?;
            for r in roots {
                writeln!(out, "{},{},{}", fmt_f64(r.s2), fmt_f64(r.theta_tilde), fmt_f64(r.raw_s2))?;
            }
        }
        Command::Figure { which, s2_min, s2_max, s2_steps, phi_steps } => {
            if !(s2_min >= 1.0 && s2_max >= s2_min && s2_max.is_finite()) {
                return Err(CliError::Input(format!("s2 range [{s2_min}, {s2_max}] must satisfy 1 <= min <= max")));
            }
            if phi_steps == 0 {
                return Err(CliError::Input("--phi-steps must be positive".into()));
            }
            let req = FigureRequest { s2_range: (s2_min, s2_max, s2_steps), phi_steps, ..FigureRequest::new(which) };
            emit_figure_data(&req, out)?;
        }
        Command::OracleCheck { sweep, count, seed, a, b, dim } => {
            let cases = match (sweep, a, b) {
                (Some(SweepKind::Default), ..) => default_sweep(),
                (Some(SweepKind::Random), ..) => random_sweep(count, seed),
                (None, Some(a), Some(b)) => {
                    let (a, b) = (load_state(&a, tol)?, load_state(&b, tol)?);
                    vec![OracleCase { a, b, group: 0 }]
                }
                _ => return Err(CliError::Input("give --sweep, or both --a and --b".into())),
            };
            let policy = match dim {
                Some(0) => return Err(CliError::Input("--dim must be positive".into())),
                Some(d) => DimPolicy::Fixed(d),
                None => DimPolicy::Adaptive(BASE_DIM),
            };
            let rows = run_sweep(&cases, policy);
            let summary = write_csv(out, &rows)?;
            return Ok(if summary.passed() { 0 } else { 1 });
        }
        Command::PovmScan { pair, r_max, r_steps, theta_steps } => {
            let (a, b) = load_pair(&pair, tol)?;
            if !(r_max >= 0.0 && r_max.is_finite()) || r_steps == 0 || theta_steps == 0 {
                return Err(CliError::Input("need r_max >= 0 and positive step counts".into()));
            }
            let r_grid: Vec<f64> = (0..=r_steps).map(|k| r_max * k as f64 / r_steps as f64).collect();
            let theta_grid: Vec<f64> = (0..theta_steps).map(|k| PI * k as f64 / theta_steps as f64).collect();
            // One r per task; rows come back in grid order.
            let tables = r_grid
                .par_iter()
                .map(|&r| gdist_core::conjecture_scan(&a, &b, &[r], &theta_grid))
                .collect::<Result<Vec<_>, _>>()?;
            writeln!(out, "r,min_theta_overlap,homodyne_min,fidelity")?;
            for t in &tables {
                for row in &t.rows {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        fmt_f64(row.r),
                        fmt_f64(row.min_overlap),
                        fmt_f64(t.homodyne_min),
                        fmt_f64(t.fidelity)
                    )?;
                }
            }
        }
    }
    Ok(0)
}
