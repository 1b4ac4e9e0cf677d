//! `schwarz` — batch driver for the Schwarz preconditioner experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver/runtime failure.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schwarz_cli::config::{ExperimentConfig, Profile, TestId};
use schwarz_cli::experiment::{
    alpha_sweep, assemble_only, emit_spectrum, run_test, sweep_hh, verify, RunError,
};

#[derive(Parser)]
#[command(
    name = "schwarz",
    about = "Two-level Schwarz preconditioner experiments for 1-D IPDG convection-diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// JSON experiment configuration; flags below override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Mesh preset: desk (h=1/64, H=1/16, J=4,8,16) or paper
    /// (h=1/256, H=1/64, J=4..64).
    #[arg(long)]
    profile: Option<String>,
    /// Penalty constant c_e.
    #[arg(long)]
    penalty: Option<f64>,
    /// Hybrid relaxation parameter.
    #[arg(long)]
    alpha: Option<f64>,
    /// GMRES relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Apply penalty and consistency terms only at the boundary points.
    #[arg(long)]
    boundary_only_penalty: bool,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the configured system and write matrix.csv / load.csv.
    Assemble {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run one test (test1..test4|custom) over the configured J list.
    RunTest {
        id: String,
        #[command(flatten)]
        common: CommonOpts,
        /// Also sweep the hybrid relaxation parameter over {0.25, 0.5, 1, 2}.
        #[arg(long)]
        alpha_sweep: bool,
    },
    /// Sweep kappa_A(P_ad) over (h, H) pairs at fixed J.
    SweepHh {
        id: String,
        #[arg(long = "J")]
        j: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Write eigenvalue CSVs for A and P_ad at each configured J.
    Spectrum {
        id: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the operator property suites and print one line per check.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn load_config(common: &CommonOpts) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| RunError::Config(format!("{path}: {e}")))?;
            ExperimentConfig::from_json(&text).map_err(RunError::Config)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(profile) = &common.profile {
        Profile::parse(profile)
            .map_err(RunError::Config)?
            .apply(&mut cfg);
    }
    if let Some(penalty) = common.penalty {
        cfg.problem.penalty_ce = penalty;
    }
    if let Some(alpha) = common.alpha {
        cfg.alpha = alpha;
    }
    if let Some(tol) = common.tol {
        cfg.gmres_tol = tol;
        cfg.mult_tol = tol;
    }
    if common.boundary_only_penalty {
        cfg.problem.boundary_only_penalty = true;
    }
    if let Some(out) = &common.out {
        cfg.outputs = out.clone();
    }
    cfg.validate().map_err(RunError::Config)?;
    Ok(cfg)
}

fn execute() -> Result<(), RunError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Assemble { common } => {
            let cfg = load_config(&common)?;
            let (n, matrix_path, load_path) = assemble_only(&cfg)?;
            println!("assembled {n} x {n} system");
            println!("matrix: {}", matrix_path.display());
            println!("load:   {}", load_path.display());
        }
        Command::RunTest {
            id,
            common,
            alpha_sweep: with_alpha_sweep,
        } => {
            let test = TestId::parse(&id).map_err(RunError::Config)?;
            let cfg = load_config(&common)?;
            let rows = run_test(&cfg, test)?;
            println!(
                "{:>4} {:>6} {:>6} {:>6} {:>6} {:>12} {:>12} {:>10} {:>10}",
                "J", "none", "ad", "hy", "mult", "kappa_ad", "kappa_hy", "|E|_A", "rho"
            );
            for r in &rows {
                println!(
                    "{:>4} {:>6} {:>6} {:>6} {:>6} {:>12.4} {:>12.4} {:>10.4} {:>10.3e}",
                    r.j,
                    r.gmres_iters_none,
                    r.gmres_iters_ad,
                    r.gmres_iters_hy,
                    r.mult_iters,
                    r.kappa_a_ad,
                    r.kappa_a_hy,
                    r.e_mu_norm_a,
                    r.rho_e_mu
                );
            }
            if with_alpha_sweep {
                for (alpha, kappa, iters) in alpha_sweep(&cfg, test)? {
                    println!("alpha={alpha:<5} kappa_A(P_hy)={kappa:<12.4} iters={iters}");
                }
            }
        }
        Command::SweepHh { id, j, common } => {
            let test = TestId::parse(&id).map_err(RunError::Config)?;
            let cfg = load_config(&common)?;
            let grid = sweep_hh(&cfg, test, j)?;
            for row in grid {
                println!("{}", row.join(","));
            }
        }
        Command::Spectrum { id, common } => {
            let test = TestId::parse(&id).map_err(RunError::Config)?;
            let cfg = load_config(&common)?;
            for path in emit_spectrum(&cfg, test)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Verify { common } => {
            let cfg = load_config(&common)?;
            let checks = verify(&cfg)?;
            let mut all_pass = true;
            for check in &checks {
                all_pass &= check.pass;
                println!(
                    "{} {} (value {:.3e}, threshold {:.3e})",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.value,
                    check.threshold
                );
            }
            if !all_pass {
                return Err(RunError::Solver("verification failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(3)
        }
    }
}
