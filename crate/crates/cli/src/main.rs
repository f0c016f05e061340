use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use spectral_obstacles::analytic::{annulus_table, write_annulus_table};
use spectral_obstacles::geometry::{
    default_eps_schedule, eps_schedule, outer_minkowski_content, Domain, Obstacle,
};
use spectral_obstacles::io::{write_json, write_trace, EigenSummary, RunSummary};
use spectral_obstacles::optimizer::{maximize, OptimizeConfig, RunStatus};
use spectral_obstacles::spectral::{
    assemble_with, smallest_eigenpair_with, BoundaryTreatment, EigenOptions, LinearSolver,
};
use spectral_obstacles::Error;

mod verify;

#[derive(Parser)]
#[command(name = "specobs", version, about = "Dirichlet eigenvalues with obstacles, Minkowski content, and eigenvalue maximization")]
struct Cli {
    /// Directory for the manifest and output files.
    #[arg(long, global = true, env = "SPECOBS_OUT_DIR", default_value = "specobs-out")]
    out_dir: PathBuf,
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed recorded in the manifest and used by randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Treatment {
    Masked,
    Corrected,
}

impl From<Treatment> for BoundaryTreatment {
    fn from(t: Treatment) -> Self {
        match t {
            Treatment::Masked => BoundaryTreatment::Masked,
            Treatment::Corrected => BoundaryTreatment::Corrected,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Cholesky,
    Cg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Disk,
    Annulus,
    Minkowski,
    Gradients,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// First Dirichlet eigenpair of a domain minus an optional obstacle.
    Eigen {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        obstacle: Option<PathBuf>,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "corrected")]
        treatment: Treatment,
        #[arg(long, value_enum, default_value = "cholesky")]
        solver: Solver,
        /// Also write the eigenfunction as `x,y,u` CSV.
        #[arg(long)]
        field_csv: bool,
    },
    /// Outer Minkowski content of an obstacle from an ε sweep.
    Minkowski {
        #[arg(long)]
        obstacle: PathBuf,
        #[arg(long)]
        h: f64,
        /// Largest ε; defaults to a quarter of the obstacle diameter.
        #[arg(long)]
        eps0: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        /// Smallest ε; defaults to 2h.
        #[arg(long)]
        floor: Option<f64>,
    },
    /// Maximize λ₁ under the perimeter budget from a JSON config.
    Optimize {
        config: PathBuf,
    },
    /// Recompute the reference checks and report pass/fail.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Annulus and half-annulus eigenvalues for radius pairs.
    AnnulusTable {
        /// Pairs `r_in:r_out`, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        pairs: Vec<String>,
    },
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    input: Option<PathBuf>,
    output_dir: PathBuf,
    seed: u64,
    version: &'static str,
    started_unix: u64,
    wall_clock_seconds: Option<f64>,
}

/// Optimizer config file: the domain plus the optimizer settings.
#[derive(Deserialize)]
struct OptimizeFile {
    domain: Domain,
    #[serde(flatten)]
    config: OptimizeConfig,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(Error::from)
        .with_context(|| format!("parsing {}", path.display()))
}

fn read_domain(path: &Path) -> Result<Domain> {
    let d: Domain = read_json(path)?;
    d.validate()?;
    Ok(d)
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl FnOnce()) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string(value)?);
    } else {
        human();
    }
    Ok(())
}

/// Exit status for a run that stopped with an error.
fn failure_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::DomainFullyBlocked) => 3,
        Some(Error::NoConvergence { .. } | Error::LinearSolver(_) | Error::Bracketing(_)) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let out = &cli.out_dir;
    match &cli.command {
        Command::Eigen {
            domain,
            obstacle,
            h,
            tol,
            treatment,
            solver,
            field_csv,
        } => {
            let domain = read_domain(domain)?;
            let obstacle: Option<Obstacle> = obstacle.as_deref().map(read_json).transpose()?;
            let problem = assemble_with(&domain, obstacle.as_ref(), *h, (*treatment).into())?;
            let opts = EigenOptions {
                tol: *tol,
                solver: match solver {
                    Solver::Cholesky => LinearSolver::Cholesky,
                    Solver::Cg => LinearSolver::ConjugateGradient,
                },
                ..EigenOptions::default()
            };
            let result = smallest_eigenpair_with(&problem, &opts, None)?;
            let summary = EigenSummary::from(&result);
            write_json(&out.join("eigen.json"), &summary)?;
            if *field_csv {
                let f = fs::File::create(out.join("field.csv"))?;
                result.u1.write_csv(std::io::BufWriter::new(f))?;
            }
            emit(cli.json, &summary, || {
                println!(
                    "lambda1 = {:.10}  (residual {:.2e}, {} iterations, {} unknowns)",
                    summary.lambda1, summary.residual, summary.iterations, summary.n_interior
                )
            })?;
            Ok(0)
        }
        Command::Minkowski {
            obstacle,
            h,
            eps0,
            ratio,
            floor,
        } => {
            let obstacle: Obstacle = read_json(obstacle)?;
            let schedule = match eps0 {
                Some(e0) => eps_schedule(*e0, *ratio, floor.unwrap_or(2.0 * h))?,
                None if floor.is_none() && *ratio == 0.5 => default_eps_schedule(&obstacle, *h)?,
                None => {
                    let diam = obstacle.diameter();
                    eps_schedule(diam / 4.0, *ratio, floor.unwrap_or(2.0 * h))?
                }
            };
            let est = outer_minkowski_content(&obstacle, *h, &schedule)?;
            est.write_csv(std::io::BufWriter::new(fs::File::create(out.join("minkowski.csv"))?))?;
            write_json(&out.join("minkowski.json"), &est)?;
            emit(cli.json, &est, || {
                println!("content = {:.8}  ({} eps samples, h = {})", est.content, est.eps_samples.len(), est.grid_h);
                for s in &est.eps_samples {
                    println!("  eps = {:<12.6e} quotient = {:.8}", s.eps, s.quotient);
                }
            })?;
            Ok(0)
        }
        Command::Optimize { config } => {
            let file: OptimizeFile = read_json(config)?;
            file.domain.validate()?;
            let result = maximize(&file.domain, &file.config)?;
            let summary = RunSummary::from(&result);
            write_json(&out.join("result.json"), &summary)?;
            write_trace(&result.history, fs::File::create(out.join("trace.csv"))?)?;
            emit(cli.json, &summary, || {
                println!(
                    "lambda1 = {:.8}  perimeter = {:.8}  mu = {:.6}  residual = {:.4}  status = {:?}",
                    summary.lambda1, summary.perimeter, summary.mu, summary.optimality_residual, summary.status
                );
                println!(
                    "radial deviation = {:.3e}  axial deviation = {:.3e} (axis {:.4} rad)",
                    summary.symmetry.radial_deviation,
                    summary.symmetry.axial_deviation,
                    summary.symmetry.best_axis_angle
                );
            })?;
            Ok(match result.status {
                RunStatus::Converged => 0,
                RunStatus::Stalled => 4,
                RunStatus::Touching => {
                    eprintln!("boundary contact — touching regime");
                    5
                }
            })
        }
        Command::Verify { suite } => {
            let report = verify::run(*suite, cli.seed)?;
            write_json(&out.join("verify.json"), &report)?;
            let all_pass = report.iter().all(|c| c.pass);
            emit(cli.json, &report, || {
                for c in &report {
                    println!(
                        "{} {}: got {:.6}, expected {:.6} ± {:.1e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.check,
                        c.got,
                        c.expected,
                        c.tol
                    );
                }
            })?;
            Ok(if all_pass { 0 } else { 1 })
        }
        Command::AnnulusTable { pairs } => {
            let parsed = pairs
                .iter()
                .map(|p| {
                    let (a, b) = p
                        .split_once(':')
                        .with_context(|| format!("pair {p:?} is not r_in:r_out"))?;
                    Ok((a.trim().parse::<f64>()?, b.trim().parse::<f64>()?))
                })
                .collect::<Result<Vec<_>>>()?;
            let rows = annulus_table(&parsed)?;
            write_annulus_table(&rows, fs::File::create(out.join("annulus_table.csv"))?)?;
            if cli.json {
                println!("{}", serde_json::to_string(&rows)?);
            } else {
                write_annulus_table(&rows, std::io::stdout())?;
            }
            Ok(0)
        }
    }
}

fn command_name(c: &Command) -> (&'static str, Option<PathBuf>) {
    match c {
        Command::Eigen { domain, .. } => ("eigen", Some(domain.clone())),
        Command::Minkowski { obstacle, .. } => ("minkowski", Some(obstacle.clone())),
        Command::Optimize { config } => ("optimize", Some(config.clone())),
        Command::Verify { .. } => ("verify", None),
        Command::AnnulusTable { .. } => ("annulus-table", None),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, input) = command_name(&cli.command);
    let started = Instant::now();
    let mut manifest = RunManifest {
        command: command.to_string(),
        input,
        output_dir: cli.out_dir.clone(),
        seed: cli.seed,
        version: env!("CARGO_PKG_VERSION"),
        started_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        wall_clock_seconds: None,
    };
    let manifest_path = cli.out_dir.join("manifest.json");
    let prepared = fs::create_dir_all(&cli.out_dir)
        .map_err(anyhow::Error::from)
        .and_then(|_| write_json(&manifest_path, &manifest).map_err(Into::into))
        .with_context(|| format!("output directory {} is not writable", cli.out_dir.display()));
    if let Err(e) = prepared {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            failure_code(&e)
        }
    };
    manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    if let Err(e) = write_json(&manifest_path, &manifest) {
        eprintln!("warning: could not update manifest: {e}");
    }
    ExitCode::from(code)
}
