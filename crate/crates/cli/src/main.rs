//! Command-line front end.
//!
//! Subcommands: `certify`, `qualify`, `gradcheck`, `farkas`. Exit codes for
//! `certify`: 0 = certificate emitted, 1 = necessary condition refuted,
//! 2 = infeasible point (or a point outside the functions' domain),
//! 3 = input error.

use clap::{Parser, Subcommand, ValueEnum};
use fjkkt::engine::{EngineError, Tolerances};
use fjkkt::expr::Point;
use fjkkt::linalg::{farkas_decide, LinFunc};
use fjkkt::problem::{detect_active_set, load_problem, Problem, ProblemError};
use fjkkt::rational::parse_rat;
use fjkkt::report;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fjkkt",
    about = "First-order optimality certificates: Fritz John / KKT multipliers with exact cone decisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Active-set tolerance: |g_i(x)| <= tol marks the constraint saturated.
    #[arg(long = "tol-active", global = true, default_value_t = 1e-8)]
    tol_active: f64,
    /// Feasibility tolerance on constraint residuals.
    #[arg(long = "tol-feas", global = true, default_value_t = 1e-9)]
    tol_feas: f64,
    /// Stationarity tolerance for float-level verification.
    #[arg(long = "tol-stat", global = true, default_value_t = 1e-6)]
    tol_stat: f64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Candidate point override, e.g. --point "x = 1, y = 2".
    #[arg(long, global = true)]
    point: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Fritz John / KKT certificate at the candidate point.
    Certify { file: PathBuf },
    /// Run the constraint-qualification checks (LICQ, MFCQ) only.
    Qualify { file: PathBuf },
    /// Compare dual-number gradients against central differences and probe
    /// first-order behaviour.
    Gradcheck { file: PathBuf },
    /// Decide a raw cone-membership query from a matrix file.
    Farkas { file: PathBuf },
}

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_POINT: u8 = 2;
const EXIT_INPUT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tolerances = Tolerances {
        active: cli.tol_active,
        feasibility: cli.tol_feas,
        stationarity: cli.tol_stat,
    };
    if !(tolerances.active > 0.0 && tolerances.feasibility > 0.0 && tolerances.stationarity > 0.0)
    {
        eprintln!("error: tolerances must be positive");
        return ExitCode::from(EXIT_INPUT);
    }
    let code = match &cli.command {
        Command::Certify { file } => cmd_certify(file, &cli, &tolerances),
        Command::Qualify { file } => cmd_qualify(file, &cli, &tolerances),
        Command::Gradcheck { file } => cmd_gradcheck(file, &cli),
        Command::Farkas { file } => cmd_farkas(file, &cli),
    };
    ExitCode::from(code)
}

fn read_file(path: &PathBuf) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })
}

/// Load the problem and resolve the candidate point (file `point:` line or
/// the --point override, which wins).
fn load_with_point(path: &PathBuf, cli: &Cli) -> Result<(Problem, Point), u8> {
    let text = read_file(path)?;
    let (problem, embedded) = load_problem(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })?;
    let point = match &cli.point {
        Some(raw) => parse_point_flag(raw, &problem.variables).map_err(|msg| {
            eprintln!("error: {msg}");
            EXIT_INPUT
        })?,
        None => match embedded {
            Some(p) => p,
            None => {
                eprintln!(
                    "error: no candidate point: add a `point:` line or pass --point \"x = ..\""
                );
                return Err(EXIT_INPUT);
            }
        },
    };
    Ok((problem, point))
}

fn parse_point_flag(raw: &str, variables: &[String]) -> Result<Point, String> {
    let mut pairs = Vec::new();
    for part in raw.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `name = value` in --point, got `{}`", part.trim()))?;
        let name = name.trim().to_string();
        if !variables.contains(&name) {
            return Err(format!("--point names undeclared variable `{name}`"));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("invalid number `{}` in --point", value.trim()))?;
        pairs.push((name, value));
    }
    let mut ordered = Vec::with_capacity(variables.len());
    for var in variables {
        match pairs.iter().find(|(n, _)| n == var) {
            Some((n, v)) => ordered.push((n.clone(), *v)),
            None => return Err(format!("--point is missing variable `{var}`")),
        }
    }
    Point::new(ordered).map_err(|e| e.to_string())
}

fn engine_error_exit(e: &EngineError) -> u8 {
    match e {
        EngineError::Problem(ProblemError::Infeasible(..)) => EXIT_POINT,
        EngineError::Problem(ProblemError::Expr(_)) | EngineError::Expr(_) => EXIT_POINT,
        _ => EXIT_INPUT,
    }
}

fn cmd_certify(file: &PathBuf, cli: &Cli, tolerances: &Tolerances) -> u8 {
    let (problem, point) = match load_with_point(file, cli) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let outcome = match fjkkt::engine::full_certify(&problem, &point, tolerances) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return engine_error_exit(&e);
        }
    };
    let report = match report::certify_report(&problem, &point, &outcome, tolerances) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return engine_error_exit(&e);
        }
    };
    emit(cli, &report, report::render_certify_text(&report));
    match outcome {
        fjkkt::engine::CertifyOutcome::Certified(_) => EXIT_OK,
        fjkkt::engine::CertifyOutcome::Refuted(_) => EXIT_REFUTED,
    }
}

fn cmd_qualify(file: &PathBuf, cli: &Cli, tolerances: &Tolerances) -> u8 {
    let (problem, point) = match load_with_point(file, cli) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let active_set =
        match detect_active_set(&problem, &point, tolerances.active, tolerances.feasibility) {
            Ok(set) => set,
            Err(e) => {
                eprintln!("error: {e}");
                return match e {
                    ProblemError::Infeasible(..) | ProblemError::Expr(_) => EXIT_POINT,
                    _ => EXIT_INPUT,
                };
            }
        };
    let table = match fjkkt::engine::GradientTable::from_problem(&problem, &point, &active_set) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return engine_error_exit(&e);
        }
    };
    let qualification = match fjkkt::engine::qualification(&table) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return engine_error_exit(&e);
        }
    };
    let report = report::qualify_report(&problem, &point, &active_set, &qualification);
    emit(cli, &report, report::render_qualify_text(&report));
    EXIT_OK
}

fn cmd_gradcheck(file: &PathBuf, cli: &Cli) -> u8 {
    let (problem, point) = match load_with_point(file, cli) {
        Ok(v) => v,
        Err(code) => return code,
    };
    match report::gradcheck_report(&problem, &point, cli.seed, cli.tol_stat) {
        Ok(report) => {
            let pass = report.pass;
            emit(cli, &report, report::render_gradcheck_text(&report));
            if pass {
                EXIT_OK
            } else {
                EXIT_REFUTED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            engine_error_exit(&e)
        }
    }
}

/// Matrix file: any number of `phi:` rows and exactly one `a:` row, entries
/// as rationals (`p/q`) or decimals, separated by spaces or commas.
fn cmd_farkas(file: &PathBuf, cli: &Cli) -> u8 {
    let text = match read_file(file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let (phis, a) = match parse_farkas_file(&text) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
    };
    match farkas_decide(&phis, &a) {
        Ok(certificate) => {
            let report = report::farkas_report(&certificate);
            emit(cli, &report, report::render_farkas_text(&report));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn parse_farkas_file(text: &str) -> Result<(Vec<LinFunc>, LinFunc), String> {
    let mut phis: Vec<LinFunc> = Vec::new();
    let mut target: Option<LinFunc> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(format!("line {line_no}: expected `phi:` or `a:`"));
        };
        let entries: Result<Vec<_>, _> = value
            .split([',', ' ', '\t'])
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_rat(s).map_err(|e| format!("line {line_no}: {e}")))
            .collect();
        let row = LinFunc::new(entries?);
        if row.dim() == 0 {
            return Err(format!("line {line_no}: empty row"));
        }
        match key.trim() {
            "phi" => phis.push(row),
            "a" => {
                if target.replace(row).is_some() {
                    return Err(format!("line {line_no}: more than one `a:` row"));
                }
            }
            other => return Err(format!("line {line_no}: unknown key `{other}`")),
        }
    }
    let a = target.ok_or("missing `a:` row")?;
    for (i, phi) in phis.iter().enumerate() {
        if phi.dim() != a.dim() {
            return Err(format!(
                "ragged rows: phi row {} has {} entries, target has {}",
                i + 1,
                phi.dim(),
                a.dim()
            ));
        }
    }
    Ok((phis, a))
}

fn emit<T: serde::Serialize>(cli: &Cli, report: &T, text: String) {
    use std::io::Write;
    let payload = match cli.format {
        Format::Json => {
            let mut json =
                serde_json::to_string_pretty(report).expect("report serialization");
            json.push('\n');
            json
        }
        Format::Text => text,
    };
    // A closed pipe (e.g. `fjkkt ... | head`) is not an error worth a panic.
    let _ = std::io::stdout().write_all(payload.as_bytes());
}
