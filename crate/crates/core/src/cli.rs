//! The `sos-ggm` command line.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 bad parameters, 3 oracle
//! disagreement under `--strict`, 4 I/O, 5 unknown branch, 6 enumeration cap.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::branches::{period_count, solve, Census, PeriodCount, SolutionBranch, Threshold};
use crate::json::{sig17_vec, Sig17};
use crate::measure::{
    check_consistency, edge_gradient_distribution, marginal, FiniteSubtree, MarginalJson, Pin,
};
use crate::model::{critical_constants, ModelParams};
use crate::oracle::{oracle_solve, OracleJson};
use crate::sweep::{sweep, theta_grid};
use crate::verify::{run_verify, Level, VerifyOptions};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_BRANCH: i32 = 5;
pub const EXIT_SIZE: i32 = 6;

pub const SOLVE_SCHEMA: &str = "sos-ggm/solve/1";
pub const MEASURE_SCHEMA: &str = "sos-ggm/measure/1";
pub const CONSTANTS_SCHEMA: &str = "sos-ggm/constants/1";

#[derive(Debug, Parser)]
#[command(
    name = "sos-ggm",
    version,
    about = "Height-periodic boundary laws and gradient Gibbs measures on Cayley trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical values of theta for branching number k.
    Constants {
        #[arg(long)]
        k: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// All branches of one period at one theta, with the measure count.
    Solve {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Cross-check against the brute-force solver.
        #[arg(long)]
        with_oracle: bool,
        /// Exit with code 3 when the cross-check disagrees.
        #[arg(long, requires = "with_oracle")]
        strict: bool,
    },
    /// Branch coordinates and counts over a theta grid, as CSV.
    Sweep {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add a version comment line.
        #[arg(long)]
        stamp: bool,
    },
    /// Finite-volume gradient measure of one branch, as JSON.
    Measure {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        branch: String,
        #[arg(long)]
        depth: usize,
        /// A residue class, or `mixed`.
        #[arg(long, default_value = "mixed")]
        pin: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long)]
        k: i64,
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Unsupported(_) => EXIT_PARAMS,
            Error::Io(_) | Error::Json(_) => EXIT_IO,
            Error::SizeCap { .. } => EXIT_SIZE,
            Error::Numeric(_) | Error::Internal(_) => EXIT_VERIFY,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, Failure>;

fn params(k: i64, theta: f64) -> std::result::Result<ModelParams, Failure> {
    let k = u32::try_from(k).map_err(|_| Error::Domain(format!("k = {k} must be at least 2")))?;
    Ok(ModelParams::new(k, theta)?)
}

fn branching(k: i64) -> std::result::Result<u32, Failure> {
    Ok(params(k, 1.0)?.k())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARAMS } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Constants { k, format } => constants(k, format, out),
        Command::Solve {
            q,
            k,
            theta,
            format,
            with_oracle,
            strict,
        } => solve_cmd(q, params(k, theta)?, format, with_oracle, strict, out),
        Command::Sweep {
            q,
            k,
            min,
            max,
            steps,
            out: path,
            stamp,
        } => {
            let k = branching(k)?;
            let grid = theta_grid(min, max, steps)?;
            let s = sweep(q, k, &grid)?;
            with_output(path.as_ref(), out, |w| s.write_csv(w, stamp))?;
            Ok(EXIT_OK)
        }
        Command::Measure {
            q,
            k,
            theta,
            branch,
            depth,
            pin,
            out: path,
        } => measure_cmd(
            q,
            params(k, theta)?,
            &branch,
            depth,
            &pin,
            path.as_ref(),
            out,
        ),
        Command::Verify {
            k,
            level,
            format,
            inject_fault,
        } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = run_verify(branching(k)?, level, VerifyOptions { inject_fault });
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(Error::from)?
                )?,
                Format::Table => {
                    for s in &report.suites {
                        let status = format!("{:?}", s.status).to_uppercase();
                        write!(out, "{:<12} {:<5} {:>5} checks", s.name, status, s.checks)?;
                        if let Some(r) = s.reason {
                            write!(out, "  ({r})")?;
                        }
                        writeln!(out)?;
                        for f in &s.failures {
                            writeln!(out, "    {f}")?;
                        }
                    }
                    writeln!(
                        out,
                        "verify k={} {:?}: {}",
                        report.k,
                        report.level,
                        if report.passed { "PASS" } else { "FAIL" }
                    )?;
                }
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

/// Write to `path` if given, else to `out`.
fn with_output(
    path: Option<&PathBuf>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> crate::Result<()>,
) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("{}: {e}", p.display()),
            })?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(out)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantsJson {
    schema: &'static str,
    k: u32,
    theta_0: Sig17,
    theta_c: Sig17,
    theta_cr: Sig17,
    theta_c3: Option<Sig17>,
    theta_star2: Option<Sig17>,
}

fn constants(k: i64, format: Format, out: &mut dyn Write) -> CliResult {
    let c = critical_constants(branching(k)?)?;
    match format {
        Format::Json => {
            let j = ConstantsJson {
                schema: CONSTANTS_SCHEMA,
                k: c.k,
                theta_0: Sig17(c.theta_0),
                theta_c: Sig17(c.theta_c),
                theta_cr: Sig17(c.theta_cr),
                theta_c3: c.theta_c3.map(Sig17),
                theta_star2: c.theta_star2.map(Sig17),
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&j).map_err(Error::from)?
            )?;
        }
        Format::Table => {
            writeln!(out, "k           {}", c.k)?;
            writeln!(out, "theta_0     {}", c.theta_0)?;
            writeln!(out, "theta_cr    {}", c.theta_cr)?;
            writeln!(out, "theta_c     {}", c.theta_c)?;
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| v.to_string());
            writeln!(out, "theta_c3    {}", opt(c.theta_c3))?;
            writeln!(out, "theta_star2 {}", opt(c.theta_star2))?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BranchJson {
    label: String,
    case: &'static str,
    x: Sig17,
    y: Sig17,
    law: Vec<Sig17>,
    residual: Sig17,
    multiplicity: u32,
}

impl From<&SolutionBranch> for BranchJson {
    fn from(b: &SolutionBranch) -> Self {
        BranchJson {
            label: b.label.clone(),
            case: b.case.as_str(),
            x: Sig17(b.x),
            y: Sig17(b.y),
            law: sig17_vec(b.law.values()),
            residual: Sig17(b.residual),
            multiplicity: b.multiplicity,
        }
    }
}

#[derive(Serialize)]
struct SolveJson {
    schema: &'static str,
    q: usize,
    k: u32,
    theta: Sig17,
    branches: Vec<BranchJson>,
    census: Census,
    nu: usize,
    threshold: Option<Threshold>,
    lower_bound: bool,
    census_agrees: bool,
    oracle: Option<OracleJson>,
}

fn solve_cmd(
    q: usize,
    p: ModelParams,
    format: Format,
    with_oracle: bool,
    strict: bool,
    out: &mut dyn Write,
) -> CliResult {
    let branches = solve(q, &p)?;
    let count: PeriodCount = period_count(q, &p)?;
    let oracle = if with_oracle {
        let mut report = oracle_solve(q, &p)?;
        let laws: Vec<_> = branches.iter().map(|b| b.law.clone()).collect();
        let a = report.compare(&laws);
        Some((report, a))
    } else {
        None
    };
    match format {
        Format::Json => {
            let j = SolveJson {
                schema: SOLVE_SCHEMA,
                q,
                k: p.k(),
                theta: Sig17(p.theta()),
                branches: branches.iter().map(BranchJson::from).collect(),
                census: count.census,
                nu: count.nu,
                threshold: count.threshold,
                lower_bound: count.lower_bound,
                census_agrees: count.census_agrees(),
                oracle: oracle.as_ref().map(|(r, _)| r.to_json()),
            };
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&j).map_err(Error::from)?
            )?;
        }
        Format::Table => {
            writeln!(out, "q = {q}, k = {}, theta = {}", p.k(), p.theta())?;
            writeln!(
                out,
                "{:<16} {:>24} {:>24} {:>10} {:>4}",
                "branch", "x", "y", "residual", "mult"
            )?;
            for b in &branches {
                writeln!(
                    out,
                    "{:<16} {:>24} {:>24} {:>10.2e} {:>4}",
                    b.label, b.x, b.y, b.residual, b.multiplicity
                )?;
            }
            let c = count.census;
            writeln!(
                out,
                "census: raw = {}, identified = {}, orbit classes = {}",
                c.raw, c.identified, c.orbit_classes
            )?;
            let rel = if count.lower_bound { ">=" } else { "=" };
            write!(out, "nu_{q} {rel} {}", count.nu)?;
            if let Some(t) = count.threshold {
                write!(out, "  (exact-threshold rule at {} = {})", t.name, t.value)?;
            }
            if !count.census_agrees() {
                write!(out, "  [census differs]")?;
            }
            writeln!(out)?;
            if let Some((r, a)) = &oracle {
                writeln!(
                    out,
                    "oracle: agreement = {}, found = {}, missing = {}, extra = {}",
                    a.is_full(),
                    r.found_solutions.len(),
                    a.missing.len(),
                    a.extra.len()
                )?;
            }
        }
    }
    if strict && oracle.as_ref().is_some_and(|(_, a)| !a.is_full()) {
        return Ok(EXIT_ORACLE);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ConsistencyJson {
    against_depth: usize,
    deviation: Sig17,
}

#[derive(Serialize)]
struct MeasureJson {
    schema: &'static str,
    branch: String,
    k: u32,
    depth: usize,
    marginal: MarginalJson,
    edge_distributions: Vec<[Sig17; 3]>,
    consistency: Option<ConsistencyJson>,
}

fn measure_cmd(
    q: usize,
    p: ModelParams,
    label: &str,
    depth: usize,
    pin: &str,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> CliResult {
    let branches = solve(q, &p)?;
    let Some(b) = branches.iter().find(|b| b.label == label) else {
        let labels: Vec<&str> = branches.iter().map(|b| b.label.as_str()).collect();
        return Err(Failure {
            code: EXIT_BRANCH,
            message: format!(
                "no branch '{label}' at theta = {}; available: {}",
                p.theta(),
                labels.join(", ")
            ),
        });
    };
    let pin = match pin {
        "mixed" => Pin::Mixed,
        s => Pin::Class(
            s.parse()
                .map_err(|_| Error::Domain(format!("pin '{s}' is neither a class nor 'mixed'")))?,
        ),
    };
    let tree = FiniteSubtree::new(p.k(), depth)?;
    let m = marginal(&b.law, &tree, pin, &p)?;
    let consistency = if depth > 1 {
        let small = FiniteSubtree::new(p.k(), depth - 1)?;
        let d = check_consistency(&b.law, &small, &tree, &p, pin)?;
        Some(ConsistencyJson {
            against_depth: depth - 1,
            deviation: Sig17(d),
        })
    } else {
        None
    };
    let j = MeasureJson {
        schema: MEASURE_SCHEMA,
        branch: b.label.clone(),
        k: p.k(),
        depth,
        edge_distributions: edge_gradient_distribution(&m)
            .iter()
            .map(|d| d.map(Sig17))
            .collect(),
        marginal: m.to_json(),
        consistency,
    };
    with_output(path, out, |w| {
        serde_json::to_writer_pretty(&mut *w, &j)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}
