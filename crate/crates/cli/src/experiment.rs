//! Experiment driver: the method-comparison tables, the `(h, H)` sweep of
//! `kappa_A(P_ad)`, spectrum dumps and the property-suite verifier.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use schwarz_core::analysis::{condition_number_a, operator_a_norm};
use schwarz_core::decomposition::{two_level_decomposition, verify_decomposition, Decomposition};
use schwarz_core::dg::{DGSystem, ProblemConfig};
use schwarz_core::krylov::{gmres, multiplicative_iterate, preconditioned_solve};
use schwarz_core::linalg::{norm2, singular_extremes, spectral_radius, sub_vec};
use schwarz_core::operators::{OperatorKind, SchwarzOperators};

use crate::config::{ExperimentConfig, TestId};
use crate::csvio::{write_csv, TableRow, TABLE_HEADER};

/// Failures the CLI maps to exit codes: config errors to 2, solver errors
/// and I/O problems to 3.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Solver(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

fn ensure_out_dir(cfg: &ExperimentConfig) -> RunResult<PathBuf> {
    let dir = PathBuf::from(&cfg.outputs);
    fs::create_dir_all(&dir).map_err(|e| RunError::Solver(format!("create {dir:?}: {e}")))?;
    Ok(dir)
}

fn solver_err(e: schwarz_core::Error) -> RunError {
    RunError::Solver(e.to_string())
}

fn io_err(msg: String) -> RunError {
    RunError::Solver(msg)
}

struct AssembledTest {
    system: DGSystem<f64>,
    problem: ProblemConfig<f64>,
}

fn assemble_test(cfg: &ExperimentConfig, test: TestId) -> RunResult<AssembledTest> {
    cfg.validate().map_err(RunError::Config)?;
    let problem = test.problem(cfg).map_err(RunError::Config)?;
    let system = DGSystem::assemble(&problem, cfg.h_inv).map_err(solver_err)?;
    Ok(AssembledTest { system, problem })
}

fn decompose(
    cfg: &ExperimentConfig,
    system: &DGSystem<f64>,
    j: usize,
) -> RunResult<Decomposition<f64>> {
    let (_, dec) = two_level_decomposition(&system.space, &system.matrix, cfg.coarse_inv, j)
        .map_err(solver_err)?;
    Ok(dec)
}

/// One row of the comparison table for subdomain count `j`.
fn run_row(
    cfg: &ExperimentConfig,
    system: &DGSystem<f64>,
    j: usize,
    unpreconditioned: (usize, f64),
) -> Result<TableRow, schwarz_core::Error> {
    let (_, dec) = two_level_decomposition(&system.space, &system.matrix, cfg.coarse_inv, j)?;
    let ops = SchwarzOperators::new(dec, cfg.alpha);
    let a = &system.matrix;
    let f = &system.load;

    let t_ad = Instant::now();
    let (_, stats_ad) =
        preconditioned_solve(a, |v| ops.apply_b(v), f, cfg.gmres_tol, cfg.gmres_max_iter)?;
    let secs_ad = t_ad.elapsed().as_secs_f64();

    let t_hy = Instant::now();
    let (_, stats_hy) = preconditioned_solve(
        a,
        |v| ops.apply_b_hybrid(v),
        f,
        cfg.gmres_tol,
        cfg.gmres_max_iter,
    )?;
    let secs_hy = t_hy.elapsed().as_secs_f64();

    let t_mu = Instant::now();
    let (_, stats_mu) = multiplicative_iterate(&ops, f, cfg.mult_tol, cfg.gmres_max_iter, false)?;
    let secs_mu = t_mu.elapsed().as_secs_f64();

    let add = ops.additive_operators()?;
    let kappa_a_ad = condition_number_a(a, &add.p_ad)?;
    let (p_hy, _) = ops.hybrid_operators()?;
    let kappa_a_hy = condition_number_a(a, &p_hy)?;
    let (e_mu, _) = ops.multiplicative_operators(false)?;
    let e_mu_norm_a = operator_a_norm(a, &e_mu)?;
    let rho_e_mu = spectral_radius(&e_mu)?;

    Ok(TableRow {
        j,
        gmres_iters_none: unpreconditioned.0,
        gmres_iters_ad: stats_ad.iterations,
        gmres_iters_hy: stats_hy.iterations,
        mult_iters: stats_mu.iterations,
        kappa_a_ad,
        kappa_a_hy,
        e_mu_norm_a,
        rho_e_mu,
        wall_times: [unpreconditioned.1, secs_ad, secs_hy, secs_mu],
    })
}

/// Run one named test over the configured `J` list, writing the table CSV and
/// a separate timings CSV. A failing row is logged and skipped.
pub fn run_test(cfg: &ExperimentConfig, test: TestId) -> RunResult<Vec<TableRow>> {
    let assembled = assemble_test(cfg, test)?;
    let out = ensure_out_dir(cfg)?;
    let system = &assembled.system;

    let t0 = Instant::now();
    let (_, stats_none) = gmres(
        |v| Ok(system.matrix.matvec(v)),
        &system.load,
        cfg.gmres_tol,
        cfg.gmres_max_iter,
    )
    .map_err(solver_err)?;
    let unpreconditioned = (stats_none.iterations, t0.elapsed().as_secs_f64());

    let mut rows = Vec::new();
    for &j in &cfg.j_list {
        match run_row(cfg, system, j, unpreconditioned) {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("row J={j} failed, continuing: {e}");
            }
        }
    }

    let table_path = out.join(format!("{}_table.csv", test.name()));
    write_csv(
        &table_path,
        &TABLE_HEADER,
        rows.iter().map(|r| r.data_record()),
    )
    .map_err(io_err)?;
    let timing_path = out.join(format!("{}_timings.csv", test.name()));
    write_csv(
        &timing_path,
        &[
            "J",
            "seconds_none",
            "seconds_ad",
            "seconds_hy",
            "seconds_mult",
        ],
        rows.iter().map(|r| {
            let mut rec = vec![r.j.to_string()];
            rec.extend(r.wall_times.iter().map(|t| format!("{t:.4}")));
            rec
        }),
    )
    .map_err(io_err)?;
    let _ = assembled.problem;
    Ok(rows)
}

/// Sweep `kappa_A(P_hy)` and hybrid iteration counts over the relaxation
/// parameter at the first configured `J`.
pub fn alpha_sweep(cfg: &ExperimentConfig, test: TestId) -> RunResult<Vec<(f64, f64, usize)>> {
    let assembled = assemble_test(cfg, test)?;
    let out = ensure_out_dir(cfg)?;
    let system = &assembled.system;
    let j = *cfg
        .j_list
        .first()
        .ok_or_else(|| RunError::Config("empty J_list".into()))?;
    let dec = decompose(cfg, system, j)?;

    let mut records = Vec::new();
    for alpha in [0.25, 0.5, 1.0, 2.0] {
        let ops = SchwarzOperators::new(dec.clone(), alpha);
        let (p_hy, _) = ops.hybrid_operators().map_err(solver_err)?;
        let kappa = condition_number_a(&system.matrix, &p_hy).map_err(solver_err)?;
        let (_, stats) = preconditioned_solve(
            &system.matrix,
            |v| ops.apply_b_hybrid(v),
            &system.load,
            cfg.gmres_tol,
            cfg.gmres_max_iter,
        )
        .map_err(solver_err)?;
        records.push((alpha, kappa, stats.iterations));
    }
    let path = out.join(format!("{}_alpha_sweep_J{j}.csv", test.name()));
    write_csv(
        &path,
        &["alpha", "kappa_A_hy", "gmres_iters_hy"],
        records
            .iter()
            .map(|(a, k, i)| vec![a.to_string(), k.to_string(), i.to_string()]),
    )
    .map_err(io_err)?;
    Ok(records)
}

/// Grid of `kappa_A(P_ad)` over mesh pairs around the configured sizes:
/// `1/h in {4J, 8J, 16J, 32J}`, `1/H in {J, 2J, 4J}`. Non-nested cells get
/// an `NA` sentinel.
pub fn sweep_hh(cfg: &ExperimentConfig, test: TestId, j: usize) -> RunResult<Vec<Vec<String>>> {
    cfg.validate().map_err(RunError::Config)?;
    if j == 0 {
        return Err(RunError::Config("J must be positive".into()));
    }
    let problem = test.problem(cfg).map_err(RunError::Config)?;
    let out = ensure_out_dir(cfg)?;

    let h_list: Vec<usize> = [4, 8, 16, 32].iter().map(|f| f * j).collect();
    let coarse_list: Vec<usize> = [1, 2, 4].iter().map(|f| f * j).collect();

    let mut grid = Vec::new();
    for &coarse_inv in &coarse_list {
        let mut row = vec![coarse_inv.to_string()];
        for &h_inv in &h_list {
            if coarse_inv % j != 0 || h_inv % coarse_inv != 0 {
                row.push("NA".into());
                continue;
            }
            let cell = (|| -> Result<f64, schwarz_core::Error> {
                let system = DGSystem::assemble(&problem, h_inv)?;
                let (_, dec) =
                    two_level_decomposition(&system.space, &system.matrix, coarse_inv, j)?;
                let ops = SchwarzOperators::new(dec, cfg.alpha);
                let add = ops.additive_operators()?;
                condition_number_a(&system.matrix, &add.p_ad)
            })();
            match cell {
                Ok(kappa) => row.push(kappa.to_string()),
                Err(e) => {
                    eprintln!("sweep cell h_inv={h_inv} H_inv={coarse_inv} failed: {e}");
                    row.push("NA".into());
                }
            }
        }
        grid.push(row);
    }

    let mut header: Vec<String> = vec!["H_inv".into()];
    header.extend(h_list.iter().map(|h| h.to_string()));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = out.join(format!("{}_sweep_J{j}.csv", test.name()));
    write_csv(&path, &header_refs, grid.clone()).map_err(io_err)?;
    Ok(grid)
}

/// Spectrum dumps: one `re,im` CSV for `A` and for `P_ad` at each `J`, plus a
/// summary with spectral radius and diameter per operator.
pub fn emit_spectrum(cfg: &ExperimentConfig, test: TestId) -> RunResult<Vec<PathBuf>> {
    let assembled = assemble_test(cfg, test)?;
    let out = ensure_out_dir(cfg)?;
    let system = &assembled.system;
    let mut written = Vec::new();
    let mut summary: Vec<Vec<String>> = Vec::new();

    let spectrum_a = schwarz_core::linalg::eigenvalues(&system.matrix).map_err(solver_err)?;
    let path_a = out.join(format!("{}_spectrum_A.csv", test.name()));
    write_eigenvalues(&path_a, &spectrum_a).map_err(io_err)?;
    written.push(path_a);
    summary.push(vec![
        "A".into(),
        "0".into(),
        spectrum_a.spectral_radius().to_string(),
        spectrum_a.diameter().to_string(),
    ]);

    for &j in &cfg.j_list {
        let dec = decompose(cfg, system, j)?;
        let ops = SchwarzOperators::new(dec, cfg.alpha);
        let p_ad = ops
            .materialize(OperatorKind::Additive)
            .map_err(solver_err)?
            .matrix;
        let spectrum = schwarz_core::linalg::eigenvalues(&p_ad).map_err(solver_err)?;
        let path = out.join(format!("{}_spectrum_Pad_J{j}.csv", test.name()));
        write_eigenvalues(&path, &spectrum).map_err(io_err)?;
        written.push(path);
        summary.push(vec![
            "P_ad".into(),
            j.to_string(),
            spectrum.spectral_radius().to_string(),
            spectrum.diameter().to_string(),
        ]);
    }

    let summary_path = out.join(format!("{}_spectrum_summary.csv", test.name()));
    write_csv(
        &summary_path,
        &["operator", "J", "rho", "diameter"],
        summary,
    )
    .map_err(io_err)?;
    written.push(summary_path);
    Ok(written)
}

fn write_eigenvalues(
    path: &Path,
    spectrum: &schwarz_core::linalg::Spectrum<f64>,
) -> Result<(), String> {
    write_csv(
        path,
        &["re", "im"],
        spectrum
            .eigenvalues()
            .iter()
            .map(|z| vec![z.re.to_string(), z.im.to_string()]),
    )
}

/// Assemble the configured problem and write the matrix and load vector.
pub fn assemble_only(cfg: &ExperimentConfig) -> RunResult<(usize, PathBuf, PathBuf)> {
    cfg.validate().map_err(RunError::Config)?;
    let problem = cfg.problem.to_problem().map_err(RunError::Config)?;
    let system = DGSystem::assemble(&problem, cfg.h_inv).map_err(solver_err)?;
    let out = ensure_out_dir(cfg)?;

    let matrix_path = out.join("matrix.csv");
    let n = system.ndofs();
    let header: Vec<String> = (0..n).map(|c| format!("c{c}")).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &matrix_path,
        &header_refs,
        (0..n).map(|i| system.matrix.row(i).iter().map(|v| v.to_string()).collect()),
    )
    .map_err(io_err)?;

    let load_path = out.join("load.csv");
    write_csv(
        &load_path,
        &["f"],
        system.load.iter().map(|v| vec![v.to_string()]),
    )
    .map_err(io_err)?;
    Ok((n, matrix_path, load_path))
}

/// One verification check: name, measured value, threshold, pass flag.
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn upper(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    fn flag(name: &str, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            pass,
        }
    }
}

/// Property suite over the configured problem: decomposition validity,
/// conjugacy, preconditioner identities, matrix-free agreement and the
/// two-path condition number.
pub fn verify(cfg: &ExperimentConfig) -> RunResult<Vec<Check>> {
    let assembled = assemble_test(cfg, TestId::Custom)?;
    let system = &assembled.system;
    let j = *cfg
        .j_list
        .first()
        .ok_or_else(|| RunError::Config("empty J_list".into()))?;
    let dec = decompose(cfg, system, j)?;
    let ops = SchwarzOperators::new(dec.clone(), cfg.alpha);
    let a = &system.matrix;
    let mut checks = Vec::new();

    let report = verify_decomposition(&dec);
    checks.push(Check::flag("decomposition invariants", report.pass));

    let a_scale = a.frobenius_norm();
    let mut worst_conjugacy = 0.0f64;
    for jj in 0..=ops.subdomain_count() {
        let (p, q) = ops.projection_matrices(jj).map_err(solver_err)?;
        let resid = a.matmul(&p).sub(&q.transpose().matmul(a)).frobenius_norm() / a_scale;
        worst_conjugacy = worst_conjugacy.max(resid);
    }
    checks.push(Check::upper(
        "conjugacy A P_j = Q_j^T A (rel)",
        worst_conjugacy,
        1e-11,
    ));

    let add = ops.additive_operators().map_err(solver_err)?;
    let p_ad_resid = add.p_ad.sub(&add.b.matmul(a)).frobenius_norm() / add.p_ad.frobenius_norm();
    checks.push(Check::upper("P_ad = B A (rel)", p_ad_resid, 1e-13));
    let b_adj_resid = add.b_adjoint.sub(&add.b.transpose()).max_abs();
    checks.push(Check::upper(
        "B_adj = B^T (abs)",
        b_adj_resid,
        1e-14 * add.b.max_abs(),
    ));

    let (p_hy, b_hy) = ops.hybrid_operators().map_err(solver_err)?;
    let hy_resid = p_hy.sub(&b_hy.matmul(a)).frobenius_norm() / p_hy.frobenius_norm();
    checks.push(Check::upper("P_hy = B_hy A (rel)", hy_resid, 1e-13));

    // Matrix-free vs materialized on seeded pseudo-random vectors.
    let mut state = cfg.seed.max(1);
    let mut rand_unit = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            })
            .collect()
    };
    let mut worst_action = 0.0f64;
    for _ in 0..5 {
        let v = rand_unit(ops.n());
        let bv = ops.apply_b(&v).map_err(solver_err)?;
        let bv_mat = add.b.matvec(&v);
        worst_action = worst_action.max(rel(&bv, &bv_mat));
        let hv = ops.apply_b_hybrid(&v).map_err(solver_err)?;
        let hv_mat = b_hy.matvec(&v);
        worst_action = worst_action.max(rel(&hv, &hv_mat));
    }
    checks.push(Check::upper(
        "matrix-free vs materialized (rel)",
        worst_action,
        1e-12,
    ));

    let route1 = condition_number_a(a, &add.p_ad).map_err(solver_err)?;
    let ab = a.matmul(&add.b);
    let (smax, smin) = singular_extremes(&ab).map_err(solver_err)?;
    let kappa_gap = (route1 - smax / smin).abs() / (smax / smin);
    checks.push(Check::upper(
        "two-path kappa agreement (rel)",
        kappa_gap,
        1e-8,
    ));

    Ok(checks)
}

fn rel(got: &[f64], want: &[f64]) -> f64 {
    let den = norm2(want);
    if den == 0.0 {
        norm2(got)
    } else {
        norm2(&sub_vec(got, want)) / den
    }
}
