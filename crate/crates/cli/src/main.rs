//! `ovi`: load, check, solve, verify and generate instances.
//!
//! JSON goes to stdout, a short human summary to stderr. Exit codes:
//! 0 ok, 2 hypothesis or verification failure, 3 no solution,
//! 4 invalid input, 5 generation failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ovi_core::generators::{
    fixture, gen_lemma41, gen_ovi, gen_satisfying, gen_unconstrained, GenerationError, SizeParams,
};
use ovi_core::hypotheses::{full_report, ProbeSet, ProbeSets, Verdict};
use ovi_core::model::{load_instance_with_cap, save_instance, Instance, ModelError};
use ovi_core::numerics::RationalVector;
use ovi_core::oracle::{verify_eq15, verify_lemma41, verify_ovi_reduction, verify_theorem32, OracleVerdict};
use ovi_core::orders::DEFAULT_MAX_POINTS;
use ovi_core::solver::{solve, SolveMethod};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;
const EXIT_INVALID: u8 = 4;
const EXIT_GENERATION: u8 = 5;

const MAX_POINTS_VAR: &str = "OVI_MAX_POINTS";

#[derive(Debug, Parser)]
#[command(name = "ovi", version, about = "Exact solver and verifier for split ordered variational inequalities")]
struct Cli {
    /// Accepted for scripts; JSON is the only output mode.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report every hypothesis with witnesses.
    Check {
        path: PathBuf,
        /// `default`, or a JSON file `{"f": [...], "g": [...]}` of probe vectors.
        #[arg(long, default_value = "default")]
        probes: String,
    },
    /// Enumerate solutions and run the ascent.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Run the brute-force verifiers.
    Verify {
        path: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "eq15,thm32,lemma41,ovi")]
        suite: Vec<Suite>,
    },
    /// Write a fixture or a seeded random instance.
    Gen {
        #[arg(long, conflicts_with_all = ["seed", "kind", "points", "dim"], required_unless_present = "seed")]
        preset: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Kind::Unconstrained)]
        kind: Kind,
        #[arg(long, default_value_t = SizeParams::default().points)]
        points: usize,
        #[arg(long, default_value_t = SizeParams::default().dim)]
        dim: usize,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Ascend,
    Enumerate,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Eq15,
    Thm32,
    Lemma41,
    Ovi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Unconstrained,
    Satisfying,
    Lemma41,
    Ovi,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Instance { path: PathBuf, source: ModelError },
    #[error("probe file {path}: {message}")]
    Probes { path: PathBuf, message: String },
    #[error("{MAX_POINTS_VAR} must be a positive integer, got {0:?}")]
    Cap(String),
    #[error(transparent)]
    Generation(#[from] GenerationError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Generation(GenerationError::BudgetExhausted { .. }) => EXIT_GENERATION,
            CliError::Generation(GenerationError::Model(_) | GenerationError::Numerics(_)) => EXIT_GENERATION,
            _ => EXIT_INVALID,
        }
    }
}

fn max_points() -> Result<usize, CliError> {
    match std::env::var(MAX_POINTS_VAR) {
        Ok(s) => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Cap(s)),
        },
        Err(_) => Ok(DEFAULT_MAX_POINTS),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load(path: &Path) -> Result<Instance, CliError> {
    let bytes = read(path)?;
    load_instance_with_cap(&bytes, max_points()?).map_err(|source| CliError::Instance { path: path.to_path_buf(), source })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeFile {
    f: Option<Vec<RationalVector>>,
    g: Option<Vec<RationalVector>>,
}

fn probe_sets(i: &Instance, spec: &str) -> Result<ProbeSets, CliError> {
    if spec == "default" {
        return Ok(ProbeSets { f: ProbeSet::default_f(i), g: ProbeSet::default_g(i) });
    }
    let path = PathBuf::from(spec);
    let bad = |message: String| CliError::Probes { path: path.clone(), message };
    let file: ProbeFile = serde_json::from_slice(&read(&path)?).map_err(|e| bad(e.to_string()))?;
    let f = match file.f {
        Some(v) => ProbeSet::new(v, i.x_space().dim()).map_err(|e| bad(format!("f: {e}")))?,
        None => ProbeSet::default_f(i),
    };
    let g = match file.g {
        Some(v) => ProbeSet::new(v, i.y_space().dim()).map_err(|e| bad(format!("g: {e}")))?,
        None => ProbeSet::default_g(i),
    };
    Ok(ProbeSets { f, g })
}

/// A closed stdout (e.g. piped into `head`) is not an error worth a panic.
fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Holds(_) => "holds",
        Verdict::Fails(_) => "FAILS",
        Verdict::NotApplicable(_) => "n/a",
    }
}

fn cmd_check(path: &Path, probes: &str) -> Result<u8, CliError> {
    let i = load(path)?;
    let sets = probe_sets(&i, probes)?;
    let report = full_report(&i, Some(&sets));
    print_json(&serde_json::to_value(&report).expect("reports serialize"));
    let summary: Vec<String> = report.entries().iter().map(|(k, v)| format!("{k} {}", verdict_word(v))).collect();
    eprintln!("{}", summary.join(", "));
    Ok(if report.all_applicable_hold() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_solve(path: &Path, method: Method) -> Result<u8, CliError> {
    let i = load(path)?;
    let method = match method {
        Method::Ascend => SolveMethod::Ascend,
        Method::Enumerate => SolveMethod::Enumerate,
        Method::Both => SolveMethod::Both,
    };
    let report = solve(&i, method);
    print_json(&report.to_json(&i));
    eprintln!("{} solution(s): {:?}", report.solutions.len(), report.solutions);
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(if report.consistent == Some(false) {
        eprintln!("ascent and enumeration disagree");
        EXIT_FAILED
    } else if report.solutions.is_empty() {
        EXIT_NO_SOLUTION
    } else {
        EXIT_OK
    })
}

fn cmd_verify(path: &Path, suite: &[Suite]) -> Result<u8, CliError> {
    let i = load(path)?;
    let mut out = Map::new();
    let mut failed = false;
    for s in [Suite::Eq15, Suite::Thm32, Suite::Lemma41, Suite::Ovi] {
        if !suite.contains(&s) {
            continue;
        }
        let (name, verdict) = match s {
            Suite::Eq15 => ("eq15", verify_eq15(&i)),
            Suite::Thm32 => ("thm32", verify_theorem32(&i)),
            Suite::Lemma41 => (
                "lemma41",
                verify_lemma41(&i).unwrap_or_else(|e| OracleVerdict::NotApplicable(e.to_string())),
            ),
            Suite::Ovi => ("ovi", verify_ovi_reduction(&i)),
        };
        failed |= verdict.fails();
        let word = match &verdict {
            OracleVerdict::Holds => "holds".to_string(),
            OracleVerdict::Fails(_) => "FAILS".to_string(),
            OracleVerdict::NotApplicable(r) => format!("not applicable ({r})"),
        };
        eprintln!("{name}: {word}");
        out.insert(name.to_string(), serde_json::to_value(&verdict).expect("verdicts serialize"));
    }
    print_json(&Value::Object(out));
    Ok(if failed { EXIT_FAILED } else { EXIT_OK })
}

fn cmd_gen(
    preset: Option<&str>,
    seed: Option<u64>,
    kind: Kind,
    params: SizeParams,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    let instance = match (preset, seed) {
        (Some(name), _) => fixture(name)?,
        (None, Some(seed)) => match kind {
            Kind::Unconstrained => gen_unconstrained(seed, &params)?,
            Kind::Satisfying => gen_satisfying(seed, &params)?,
            Kind::Lemma41 => gen_lemma41(seed, &params)?,
            Kind::Ovi => gen_ovi(seed, &params)?,
        },
        (None, None) => unreachable!("clap requires --preset or --seed"),
    };
    let bytes = save_instance(&instance);
    match output {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
            eprintln!("wrote {} (|C| = {}, |D| = {})", path.display(), instance.c().len(), instance.d().len());
        }
        None => {
            let _ = std::io::stdout().lock().write_all(&bytes);
        }
    }
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Check { path, probes } => cmd_check(&path, &probes),
        Command::Solve { path, method } => cmd_solve(&path, method),
        Command::Verify { path, suite } => cmd_verify(&path, &suite),
        Command::Gen { preset, seed, kind, points, dim, output } => {
            cmd_gen(preset.as_deref(), seed, kind, SizeParams { points, dim }, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            print_json(&json!({"error": e.to_string()}));
            ExitCode::from(e.exit_code())
        }
    }
}
