use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flatfold::gluing::parse_spec;
use flatfold::output::{check_document, result_document, svg};
use flatfold::pipeline::{check, solve, SolveError, SolveOptions};
use flatfold::Tolerances;

/// Decide whether a polygon gluing folds to a doubly covered convex polygon.
#[derive(Parser, Debug)]
#[command(name = "flatfold", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate the gluing conditions and list the cone points.
    Check {
        input: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run the full pipeline; exit 0 if flat, 1 if not flat, 2 on error.
    Solve {
        input: PathBuf,
        /// Write the result document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Compute shortest paths with the exhaustive unfolding oracle.
        #[arg(long)]
        oracle: bool,
        /// Log every rim search step to stderr.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_parser = positive, default_value_t = Tolerances::default().tie)]
        tie_tol: f64,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Angle tolerance in radians.
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().angle)]
    tolerance_angle: f64,
    /// Relative length tolerance.
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().length)]
    tolerance_length: f64,
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err("tolerance must be positive".into())
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("io: {}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("io: {}: {e}", path.display()))
}

/// Prints to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), String> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(format!("io: stdout: {e}")),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Check { input, tol } => {
            let tol = Tolerances { length: tol.tolerance_length, angle: tol.tolerance_angle, ..Tolerances::default() };
            let spec = parse_spec(&read(&input)?, &tol).map_err(|e| format!("gluing: {e}"))?;
            let (refined, report) = check(&spec, &tol).map_err(|e| format!("gluing: {e}"))?;
            let doc = check_document(&refined, &report, &tol);
            emit(&serde_json::to_string_pretty(&doc).expect("report serializes"))?;
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Solve { input, out, svg: svg_path, oracle, trace, tie_tol, tol } => {
            let tol = Tolerances { length: tol.tolerance_length, angle: tol.tolerance_angle, tie: tie_tol };
            let spec = parse_spec(&read(&input)?, &tol).map_err(|e| format!("gluing: {e}"))?;
            let opts = SolveOptions { tolerances: tol, oracle, ..SolveOptions::default() };
            let outcome = solve(&spec, &opts).map_err(|e| match e {
                SolveError::Invalid(report) => format!(
                    "gluing: instance fails the gluing conditions\n{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ),
                other => other.to_string(),
            })?;
            if trace {
                for event in &outcome.search.trace {
                    eprintln!("{event}");
                }
            }
            let doc = serde_json::to_string_pretty(&result_document(&outcome)).expect("result serializes");
            match out {
                Some(path) => write(&path, &(doc + "\n"))?,
                None => emit(&doc)?,
            }
            if let Some(path) = svg_path {
                write(&path, &svg(&spec, &outcome))?;
            }
            Ok(if outcome.is_flat() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
