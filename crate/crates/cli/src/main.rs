use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use opalg::cb::{cb_lower_bound, cb_norm_structural};
use opalg::harness::{
    generate_instance, suite_conjecture, suite_cor_cp, suite_lifting_contract, suite_local_lifting,
    suite_stormer_roundtrip, suite_thm_main, suite_yeadon_roundtrip, ConjectureOptions, SuiteReport,
};
use opalg::jordan::{
    build_jordan, hxh_check, jordan_residual, split_hom_minimal, stormer_decompose, JordanSpec,
};
use opalg::yeadon::{build_positive_isometry, yeadon_factorize};
use opalg::{parse_exponent, tol, Error, LinMap};

/// Jordan *-homomorphisms, L^p isometries and cb norms on finite-dimensional
/// von Neumann algebras.
#[derive(Parser)]
#[command(name = "opalg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SeedArg {
    #[arg(long, env = "OPALG_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether a map is a Jordan *-homomorphism.
    CheckJordan {
        map: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Central decomposition J = π + σ and the kernel/faithful split.
    Stormer {
        map: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Lower bound for the cb norm over amplifications 1..=k-max.
    Cbnorm {
        map: PathBuf,
        #[arg(long, value_parser = exponent)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Positive isometries T = wbJ.
    Yeadon {
        #[command(subcommand)]
        action: YeadonAction,
    },
    /// Run a verification suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Counterexample search over builder isometries.
    Conjecture {
        #[arg(long, value_parser = exponent)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Emit a seeded random instance.
    Generate {
        kind: String,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum YeadonAction {
    /// Recover (w, b, J) from a positive isometry.
    Factorize {
        map: PathBuf,
        #[arg(long, value_parser = exponent)]
        p: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Build the positive isometry of a Jordan monomorphism.
    Build {
        jordan: PathBuf,
        #[arg(long, value_parser = exponent)]
        p: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    LocalLifting,
    CorCp,
    ThmMain,
    LiftingContract,
    Stormer,
    Yeadon,
}

fn exponent(s: &str) -> Result<f64, String> {
    parse_exponent(s).map_err(|e| e.to_string())
}

enum Failure {
    /// Exit 1: the input was valid but a check failed.
    Check(String),
    /// Exit 2: unreadable or malformed input.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidAlgebra(_)
            | Error::ShapeMismatch(_)
            | Error::InvalidExponent(_)
            | Error::HilbertExponent
            | Error::ZeroAmplification
            | Error::InvalidSpec(_)
            | Error::OverlappingTargets { .. }
            | Error::UnknownKind(_)
            | Error::Json(_) => Failure::Input(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

type CliResult = Result<bool, Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Accepts a bare map, a Jordan recipe, or a generated instance holding
/// either.
fn map_from_value(v: Value) -> Result<LinMap, Failure> {
    if v.get("matrix").is_some() {
        return Ok(serde_json::from_value(v).map_err(Error::from)?);
    }
    if v.get("embeddings").is_some() {
        let spec: JordanSpec = serde_json::from_value(v).map_err(Error::from)?;
        return Ok(build_jordan(&spec)?);
    }
    if let Some(m) = v.get("map") {
        return map_from_value(m.clone());
    }
    if let Some(s) = v.get("spec") {
        return map_from_value(s.clone());
    }
    Err(Failure::Input("expected a map, a Jordan recipe or an instance".into()))
}

fn load_map(path: &Path) -> Result<LinMap, Failure> {
    map_from_value(read_json(path)?)
}

/// Jordan inputs prefer the recipe over the map when both are present.
fn load_jordan(path: &Path) -> Result<LinMap, Failure> {
    let v = read_json(path)?;
    match v.get("spec") {
        Some(s) => map_from_value(s.clone()),
        None => map_from_value(v),
    }
}

fn emit(value: &impl Serialize, out: &Output) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Check(e.to_string()))?;
    match &out.output {
        Some(path) => fs::write(path, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            // a closed downstream pipe is not an error
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Check(e.to_string())),
            _ => Ok(()),
        },
    }
}

fn emit_suite(report: &SuiteReport, out: &Output) -> CliResult {
    emit(report, out)?;
    Ok(report.passed)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::CheckJordan { map, out } => {
            let j = load_map(&map)?;
            let residual = jordan_residual(&j);
            let holds = residual < tol::ALGEBRAIC;
            let hxh = hxh_check(&j, 10, 0, tol::ALGEBRAIC)?;
            emit(&json!({ "jordan": holds, "residual": residual, "hxh": hxh }), &out)?;
            Ok(holds)
        }
        Command::Stormer { map, out } => {
            let j = load_map(&map)?;
            let d = stormer_decompose(&j)?;
            let split = split_hom_minimal(&j)?;
            emit(&json!({ "decomposition": d, "residuals": d.residuals(), "split": split }), &out)?;
            Ok(true)
        }
        Command::Cbnorm { map, p, k_max, restarts, seed, out } => {
            let t = load_map(&map)?;
            let mut est = cb_lower_bound(&t, p, k_max, restarts, seed.seed)?;
            // at p = ∞ a Jordan map also has a certified structural value
            if p.is_infinite() && jordan_residual(&t) < tol::ALGEBRAIC {
                let s = cb_norm_structural(&stormer_decompose(&t)?)?;
                if s.lower > est.lower {
                    est.lower = s.lower;
                    est.level = s.level;
                    est.witness = s.witness;
                }
                est.upper = s.upper;
                est.certified = s.certified && s.upper.is_some_and(|u| (u - est.lower).abs() < tol::SEARCH);
            }
            emit(&est, &out)?;
            Ok(true)
        }
        Command::Yeadon { action: YeadonAction::Factorize { map, p, tol, out } } => {
            let t = load_map(&map)?;
            let triple = yeadon_factorize(&t, p, tol)?;
            emit(&triple, &out)?;
            Ok(true)
        }
        Command::Yeadon { action: YeadonAction::Build { jordan, p, out } } => {
            let j = load_jordan(&jordan)?;
            let (t, triple) = build_positive_isometry(&j, p)?;
            emit(&json!({ "map": t, "triple": triple }), &out)?;
            Ok(true)
        }
        Command::Verify { suite, trials, seed, out } => {
            let s = seed.seed;
            let report = match suite {
                Suite::LocalLifting => suite_local_lifting(s, trials),
                Suite::CorCp => suite_cor_cp(s, trials),
                Suite::ThmMain => suite_thm_main(s, trials),
                Suite::LiftingContract => suite_lifting_contract(s, trials),
                Suite::Stormer => suite_stormer_roundtrip(s, trials),
                Suite::Yeadon => suite_yeadon_roundtrip(s, trials),
            };
            emit_suite(&report, &out)
        }
        Command::Conjecture { p, trials, k_max, seed, out } => {
            let report = suite_conjecture(seed.seed, trials, ConjectureOptions::new(p, k_max))?;
            emit_suite(&report, &out)
        }
        Command::Generate { kind, seed, out } => {
            let inst = generate_instance(&kind, seed.seed)?;
            emit(&inst, &out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("opalg: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("opalg: {msg}");
            ExitCode::from(2)
        }
    }
}
