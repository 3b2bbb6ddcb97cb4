//! Command-line surface for the freespec toolkit: generate random bounded
//! pencils, optimize linear functionals over a level, classify the
//! optimizers, decompose members into free extreme points, run randomized
//! campaigns, and fit the resulting statistics.
//!
//! Exit codes: 0 success, 2 input or precondition failure, 3 numerical
//! failure, 64 usage error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use freespec::dilation;
use freespec::experiments::{self, CampaignConfig, FitResult};
use freespec::extremality::{self, Policies};
use freespec::matcore::MatrixTuple;
use freespec::pencil::{
    self, FunctionalKind, LinearFunctional, LinearPencil, PencilGenConfig,
};
use freespec::solver::{self, LmiProgram, SolveOptions, SolveStatus};

const EXIT_PRECONDITION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
enum CliError {
    Precondition(String),
    Numerical(String),
    Usage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Precondition(m) | CliError::Numerical(m) | CliError::Usage(m) => m,
        }
    }
}

/// Prints a line to stdout, ignoring a closed pipe.
fn emit(text: impl std::fmt::Display) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn precondition(msg: impl Into<String>) -> CliError {
    CliError::Precondition(msg.into())
}

fn numerical(msg: impl Into<String>) -> CliError {
    CliError::Numerical(msg.into())
}

#[derive(Parser)]
#[command(
    name = "freespec",
    about = "Optimization, extreme-point classification, and dilation decompositions over free spectrahedra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Default seed: --seed flag, else FREESPEC_SEED, else 0.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("FREESPEC_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

/// Tolerance overrides mirroring the tolerance-table rows.
#[derive(Args, Debug, Clone)]
struct TolArgs {
    #[arg(long, value_name = "EPS")]
    tol_kernel_e1: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_kernel_e2: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_free_e1: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_free_e2: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_euclidean_e1: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_euclidean_e2: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_irreducibility_e1: Option<f64>,
    #[arg(long, value_name = "EPS")]
    tol_irreducibility_e2: Option<f64>,
}

impl TolArgs {
    fn apply(&self, base: Policies) -> Policies {
        let mut p = base;
        if let Some(v) = self.tol_kernel_e1 {
            p.kernel.eps1 = v;
        }
        if let Some(v) = self.tol_kernel_e2 {
            p.kernel.eps2 = v;
        }
        if let Some(v) = self.tol_free_e1 {
            p.free_extreme.eps1 = v;
        }
        if let Some(v) = self.tol_free_e2 {
            p.free_extreme.eps2 = v;
        }
        if let Some(v) = self.tol_euclidean_e1 {
            p.euclidean.eps1 = v;
        }
        if let Some(v) = self.tol_euclidean_e2 {
            p.euclidean.eps2 = v;
        }
        if let Some(v) = self.tol_irreducibility_e1 {
            p.irreducibility.eps1 = v;
        }
        if let Some(v) = self.tol_irreducibility_e2 {
            p.irreducibility.eps2 = v;
        }
        p
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random irreducible bounded defining tuple.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        g: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        d: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 25)]
        entry_bound: i64,
        #[arg(long, default_value_t = 10.0)]
        scale_divisor: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report irreducibility and boundedness certificates for a pencil.
    Check {
        #[arg(long)]
        pencil: PathBuf,
    },
    /// Minimize a linear functional over one level and classify the optimizer.
    Optimize {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Load a serialized functional instead of generating one.
        #[arg(long, conflicts_with_all = ["seed", "kind"])]
        functional: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "rc")]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Classify a serialized point of a spectrahedron.
    Classify {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Decompose a member into a matrix convex combination of free
    /// extreme points via maximal 1-dilations.
    Dilate {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recheck the residuals of a serialized dilation certificate.
    Verify {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Run a randomized campaign from a JSON config.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Fit a histogram or series file.
    Fit {
        /// gaussian | gaussian-weighted | exponential
        #[arg(long)]
        model: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a serialized LMI program directly.
    Solve {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap distinguishes help/version from genuine usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| precondition(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| precondition(format!("malformed {what} file {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| precondition(format!("cannot write {}: {e}", path.display())))
}

fn parse_kind(kind: &str) -> Result<FunctionalKind, CliError> {
    match kind {
        "rc" => Ok(FunctionalKind::Rc),
        "rpt" => Ok(FunctionalKind::Rpt),
        other => Err(precondition(format!(
            "unknown functional kind '{other}' (expected rc or rpt)"
        ))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            g,
            d,
            seed,
            entry_bound,
            scale_divisor,
            out,
        } => {
            let cfg = PencilGenConfig {
                g: g as usize,
                d: d as usize,
                entry_bound,
                scale_divisor,
                seed: resolve_seed(seed),
                retry_cap: 1000,
            };
            let pencil = pencil::random_pencil(&cfg)
                .map_err(|e| precondition(format!("generation failed: {e}")))?;
            write_text(&out, &serde_json::to_string_pretty(&pencil).unwrap())?;
            emit(
                json!({
                    "g": pencil.var_count(),
                    "d": pencil.order(),
                    "irreducible": pencil.irreducible_flag(),
                    "bounded": pencil.bounded_flag(),
                    "out": out,
                }));
            Ok(())
        }
        Command::Check { pencil } => {
            let p: LinearPencil = read_json(&pencil, "pencil")?;
            let commutant = extremality::symmetric_commutant_dim(p.coefficients())
                .map_err(|e| numerical(e.to_string()))?;
            let bounded = p.is_bounded().map_err(|e| numerical(e.to_string()))?;
            emit(
                json!({
                    "g": p.var_count(),
                    "d": p.order(),
                    "commutant_dim": commutant,
                    "irreducible": commutant == 1,
                    "bounded": bounded,
                }));
            Ok(())
        }
        Command::Optimize {
            pencil,
            n,
            functional,
            seed,
            kind,
            out,
            tols,
        } => {
            let p: LinearPencil = read_json(&pencil, "pencil")?;
            let n = n as usize;
            if !p.is_bounded().map_err(|e| numerical(e.to_string()))? {
                return Err(precondition(
                    "pencil defines an unbounded spectrahedron; refusing to optimize",
                ));
            }
            let ell: LinearFunctional = match functional {
                Some(path) => read_json(&path, "functional")?,
                None => pencil::random_functional(
                    parse_kind(&kind)?,
                    &p,
                    n,
                    resolve_seed(seed),
                ),
            };
            if ell.level() != n {
                return Err(precondition(format!(
                    "functional level {} does not match --n {n}",
                    ell.level()
                )));
            }
            let (xhat, result) = solver::minimize_functional(&p, &ell, n)
                .map_err(|e| numerical(e.to_string()))?;
            if result.status != SolveStatus::Optimal {
                eprintln!(
                    "{}",
                    json!({
                        "status": result.status,
                        "rel_gap": result.rel_gap,
                        "primal_residual": result.primal_residual,
                        "iterations": result.iterations,
                    })
                );
                return Err(numerical(format!(
                    "solver finished with status {:?}",
                    result.status
                )));
            }
            let policies = tols.apply(Policies::default());
            let classification = extremality::classify_with(&p, &xhat, &policies)
                .map_err(|e| numerical(e.to_string()))?;
            let report = json!({
                "x_hat": xhat,
                "value": result.objective,
                "verdict": classification.verdict,
                "k": classification.kernel.dim,
                "commutant_dim": classification.commutant_dim,
                "status": result.status,
                "rel_gap": result.rel_gap,
            });
            let text = serde_json::to_string_pretty(&report).unwrap();
            match out {
                Some(path) => write_text(&path, &text)?,
                None => emit(&text),
            }
            Ok(())
        }
        Command::Classify {
            pencil,
            point,
            tols,
        } => {
            let p: LinearPencil = read_json(&pencil, "pencil")?;
            let x: MatrixTuple = read_json(&point, "point")?;
            if !p
                .is_member(&x, 1e-6)
                .map_err(|e| numerical(e.to_string()))?
            {
                return Err(precondition("point is not a member of the spectrahedron"));
            }
            let policies = tols.apply(Policies::default());
            let c = extremality::classify_with(&p, &x, &policies)
                .map_err(|e| numerical(e.to_string()))?;
            emit(serde_json::to_string_pretty(&c.to_record()).unwrap());
            Ok(())
        }
        Command::Dilate {
            pencil,
            point,
            seed,
            out,
        } => {
            let p: LinearPencil = read_json(&pencil, "pencil")?;
            let x: MatrixTuple = read_json(&point, "point")?;
            if !p
                .is_member(&x, 1e-7)
                .map_err(|e| numerical(e.to_string()))?
            {
                return Err(precondition("point is not a member of the spectrahedron"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
            let cert = dilation::decompose(&p, &x, &mut rng)
                .map_err(|e| numerical(format!("dilation failed: {e}")))?;
            emit(
                json!({
                    "steps": cert.step_count(),
                    "mu": cert.mu,
                    "summand_sizes": cert.summand_sizes(),
                    "sum_of_sizes": cert.summand_sizes().iter().sum::<usize>(),
                    "all_free_extreme": cert.all_summands_free_extreme(),
                    "partition_residual": cert.partition_residual,
                    "reconstruction_residual": cert.reconstruction_residual,
                }));
            if let Some(path) = out {
                write_text(&path, &serde_json::to_string_pretty(&cert).unwrap())?;
            }
            Ok(())
        }
        Command::Verify { pencil, cert } => {
            let p: LinearPencil = read_json(&pencil, "pencil")?;
            let c: dilation::DilationCertificate = read_json(&cert, "certificate")?;
            dilation::verify_certificate(&p, &c)
                .map_err(|e| numerical(format!("certificate check failed: {e}")))?;
            emit("pass");
            Ok(())
        }
        Command::Campaign {
            config,
            out_dir,
            tols,
        } => {
            // a config that does not parse or validate is a usage error
            let mut cfg: CampaignConfig = read_json(&config, "campaign config")
                .map_err(|e| CliError::Usage(e.message().to_string()))?;
            cfg.policies = tols.apply(cfg.policies.clone());
            cfg.validate()
                .map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
            // resume from a previous identical run in the same directory
            let fingerprint = serde_json::to_string(&cfg).unwrap();
            let fingerprint_path = out_dir.join("config.json");
            let jsonl_path = out_dir.join("records.jsonl");
            let mut checkpoint = Vec::new();
            if fingerprint_path.exists() && jsonl_path.exists() {
                let same = std::fs::read_to_string(&fingerprint_path)
                    .map(|old| old == fingerprint)
                    .unwrap_or(false);
                if same {
                    if let Ok(text) = std::fs::read_to_string(&jsonl_path) {
                        checkpoint = text
                            .lines()
                            .filter_map(|l| serde_json::from_str(l).ok())
                            .collect();
                    }
                }
            }
            let records = experiments::run_campaign_resuming(&cfg, &checkpoint)
                .map_err(|e| numerical(e.to_string()))?;
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| precondition(format!("cannot create {}: {e}", out_dir.display())))?;
            write_text(&fingerprint_path, &fingerprint)?;
            write_text(
                &out_dir.join("records.csv"),
                &experiments::records_to_csv(&records),
            )?;
            write_text(
                &out_dir.join("records.jsonl"),
                &experiments::records_to_jsonl(&records),
            )?;
            let stats = experiments::tally(&records);
            write_text(
                &out_dir.join("stats.json"),
                &serde_json::to_string_pretty(&stats).unwrap(),
            )?;

            // fits, where the data supports them
            let pooled = stats.pooled_k_frequencies();
            if pooled.len() >= 2 {
                if let Ok(fit) = experiments::fit_gaussian(&pooled, false) {
                    write_text(
                        &out_dir.join("fit_gaussian.json"),
                        &serde_json::to_string_pretty(&fit).unwrap(),
                    )?;
                    write_text(
                        &out_dir.join("fit_gaussian.csv"),
                        &experiments::gaussian_plot_csv(&pooled, &fit),
                    )?;
                }
            }
            let series = stats.reducible_series();
            if series.len() >= 3 {
                if let Ok(fit) = experiments::fit_exponential(&series) {
                    write_text(
                        &out_dir.join("fit_reducible.json"),
                        &serde_json::to_string_pretty(&fit).unwrap(),
                    )?;
                    write_text(
                        &out_dir.join("fit_reducible.csv"),
                        &experiments::exponential_plot_csv(&series, &fit),
                    )?;
                }
            }

            let clean = records.iter().filter(|r| r.is_clean()).count();
            emit(
                json!({
                    "runs": records.len(),
                    "clean": clean,
                    "out_dir": out_dir,
                }));
            if clean == 0 {
                return Err(numerical("no run in the campaign succeeded"));
            }
            Ok(())
        }
        Command::Fit { model, input, out } => {
            let fit: FitResult = match model.as_str() {
                "gaussian" | "gaussian-weighted" => {
                    let hist: BTreeMap<usize, f64> = read_json(&input, "histogram")?;
                    experiments::fit_gaussian(&hist, model == "gaussian-weighted")
                        .map_err(|e| precondition(e.to_string()))?
                }
                "exponential" => {
                    let series: Vec<(f64, f64)> = read_json(&input, "series")?;
                    experiments::fit_exponential(&series)
                        .map_err(|e| precondition(e.to_string()))?
                }
                other => {
                    return Err(precondition(format!(
                        "unknown model '{other}' (expected gaussian, gaussian-weighted, or exponential)"
                    )))
                }
            };
            let text = serde_json::to_string_pretty(&fit).unwrap();
            match out {
                Some(path) => write_text(&path, &text)?,
                None => emit(&text),
            }
            Ok(())
        }
        Command::Solve { program, out } => {
            let prog: LmiProgram = read_json(&program, "program")?;
            let result = solver::solve(&prog, &SolveOptions::default())
                .map_err(|e| numerical(e.to_string()))?;
            let text = serde_json::to_string_pretty(&result).unwrap();
            match out {
                Some(path) => write_text(&path, &text)?,
                None => emit(&text),
            }
            if result.status == SolveStatus::IllConditioned {
                return Err(numerical("solve finished ill conditioned"));
            }
            Ok(())
        }
    }
}
