use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use geneo::decomposition::ExchangeLedger;
use geneo::geneo::{build_preconditioner, write_eigen_report, EigenOptions, EigenSelection, GeneoOptions};
use geneo::krylov::{factorize, fgmres, pcg, FgmresOptions, IdentityOperator, LinearOperator, PcgOptions, SolveReport};
use geneo::materials::{load_spe10, SPE10_DIMS, SPE10_EXTENTS};
use geneo::mesh::decompose;
use geneo::postprocess::{
    camanho_field, failure_load, max_displacement, recover_stress, scan_failure, write_vtk, Allowables, VtkField,
};
use geneo::problems::{darcy_problem, plate_problem, Problem};
use geneo::sparse::norm2;
use log::info;

use crate::config::{Preconditioner, ProblemKind, RunConfig, SolverKind};
use crate::report::{ReportRow, StudyReport};
use crate::synthetic::generate_synthetic_contrast;
use crate::RunError;

/// Environment variable naming the SPE10 permeability file.
pub const SPE10_ENV: &str = "GENEO_SPE10";

fn core<T>(context: &str, r: geneo::Result<T>) -> Result<T, RunError> {
    r.map_err(|e| RunError::from_core(context, e))
}

fn io<T>(context: impl Into<String>, r: std::io::Result<T>) -> Result<T, RunError> {
    r.map_err(|source| RunError::Io {
        context: context.into(),
        source,
    })
}

/// The discretized problem plus the cell permeability for diffusion runs.
pub fn build_problem(cfg: &RunConfig) -> Result<(Problem, Option<Vec<f64>>), RunError> {
    match cfg.problem {
        ProblemKind::Plate1a | ProblemKind::Plate1b => Ok((
            core(
                "plate assembly",
                plate_problem(cfg.refinement, cfg.element, cfg.pressure),
            )?,
            None,
        )),
        ProblemKind::SyntheticContrast => {
            let field = generate_synthetic_contrast(cfg.cells, cfg.contrast, cfg.pattern, cfg.seed);
            let h = 1.0 / *cfg.cells.iter().max().expect("three axes") as f64;
            let extents = cfg.cells.map(|c| c as f64 * h);
            let p = core(
                "synthetic assembly",
                darcy_problem(&field, extents, cfg.element, cfg.source),
            )?;
            Ok((p, Some(field.kx)))
        }
        ProblemKind::Spe10 => {
            let path = cfg
                .spe10_path
                .clone()
                .or_else(|| std::env::var_os(SPE10_ENV).map(PathBuf::from))
                .ok_or_else(|| {
                    RunError::Config(format!(
                        "spe10 needs spe10_path or the {SPE10_ENV} environment variable"
                    ))
                })?;
            let full = core("reading SPE10 data", load_spe10(&path, SPE10_DIMS))?;
            let field = core("subsampling SPE10 data", full.subsample(cfg.stride))?;
            let mut extents = SPE10_EXTENTS;
            for a in 0..3 {
                extents[a] *= (field.dims[a] * cfg.stride) as f64 / SPE10_DIMS[a] as f64;
            }
            info!("SPE10 subsample {:?}, extents {:?}", field.dims, extents);
            let p = core(
                "SPE10 assembly",
                darcy_problem(&field, extents, cfg.element, cfg.source),
            )?;
            Ok((p, Some(field.kx)))
        }
    }
}

/// Everything one solve produces besides its report row.
struct Artifacts {
    history: SolveReport,
    selections: Vec<EigenSelection>,
    ledger: ExchangeLedger,
    u: Vec<f64>,
}

fn krylov(
    cfg: &RunConfig,
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    b: &[f64],
) -> Result<(Vec<f64>, SolveReport), RunError> {
    let (x, rep) = match cfg.solver {
        SolverKind::Pcg => core(
            "pcg",
            pcg(
                a,
                m,
                b,
                &PcgOptions {
                    tol: cfg.tol,
                    max_it: cfg.max_it,
                },
            ),
        )?,
        SolverKind::Fgmres => core(
            "fgmres",
            fgmres(
                a,
                |r: &[f64], z: &mut [f64]| m.apply(r, z),
                b,
                &FgmresOptions {
                    tol: cfg.tol,
                    restart: cfg.restart,
                    max_it: cfg.max_it,
                },
            ),
        )?,
    };
    if !rep.converged {
        return Err(RunError::NotConverged(format!(
            "solver stopped after {} iterations at relative residual {:e}",
            rep.iterations,
            rep.final_residual()
        )));
    }
    Ok((x, rep))
}

fn solve_one(
    cfg: &RunConfig,
    problem: &Problem,
    shape: [usize; 3],
    prec: Preconditioner,
) -> Result<(ReportRow, Artifacts), RunError> {
    let n_sub: usize = shape.iter().product();
    let sys = &problem.system;
    let mut row = ReportRow {
        n_subdomains: n_sub,
        shape,
        precond: prec.to_string(),
        iterations: 0,
        kappa: None,
        coarse_dim: 0,
        t_setup: 0.0,
        t_iterate: 0.0,
        qoi: 0.0,
    };
    let mut art = Artifacts {
        history: SolveReport::default(),
        selections: Vec::new(),
        ledger: ExchangeLedger::default(),
        u: Vec::new(),
    };
    let direct = cfg.problem == ProblemKind::Plate1a && n_sub == 1;
    let context = format!("{} run {}", cfg.problem, row.label());
    if direct {
        row.precond = "direct".into();
        let t = Instant::now();
        let f = core(&context, factorize(&sys.a))?;
        row.t_setup = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let u = f.solve(&sys.b);
        row.t_iterate = t.elapsed().as_secs_f64();
        let r: Vec<f64> = sys.a.mul_vec(&u).iter().zip(&sys.b).map(|(p, q)| q - p).collect();
        let b_norm = norm2(&sys.b);
        art.history.residual_history = vec![if b_norm > 0.0 { norm2(&r) / b_norm } else { 0.0 }];
        art.history.converged = true;
        art.u = u;
    } else {
        match prec {
            Preconditioner::Identity => {
                let (u, rep) = krylov(cfg, &sys.a, &IdentityOperator(sys.dof_count()), &sys.b)?;
                art.u = u;
                art.history = rep;
            }
            Preconditioner::Schwarz(kind) => {
                let decomp = core(&context, decompose(&problem.grid, shape, cfg.overlap))?;
                let opts = GeneoOptions {
                    rho: cfg.rho,
                    k_max: cfg.k_max,
                    eigen: EigenOptions {
                        shift: cfg.shift,
                        seed: cfg.seed,
                        ..EigenOptions::default()
                    },
                };
                let setup = core(
                    &context,
                    build_preconditioner(&problem.grid, problem.physics.as_ref(), sys, &decomp, kind, &opts),
                )?;
                row.t_setup = setup.setup_time;
                row.coarse_dim = setup.coarse_dim();
                let (u, rep) = krylov(cfg, &sys.a, &setup.preconditioner, &sys.b)?;
                art.ledger = setup.preconditioner.communicator().ledger();
                art.selections = setup.selections;
                art.u = u;
                art.history = rep;
            }
        }
        row.iterations = art.history.iterations;
        row.kappa = art.history.condition_estimate;
        row.t_iterate = art.history.wall_time;
    }
    row.qoi = quantity_of_interest(cfg, problem, &art.u)?;
    info!(
        "{}: {} iterations, coarse dim {}, qoi {:e}",
        row.label(),
        row.iterations,
        row.coarse_dim,
        row.qoi
    );
    Ok((row, art))
}

fn quantity_of_interest(cfg: &RunConfig, problem: &Problem, u: &[f64]) -> Result<f64, RunError> {
    let ncomp = problem.system.ncomp;
    match cfg.problem {
        ProblemKind::Plate1b => {
            let materials = problem.materials.as_ref().expect("plate problems carry materials");
            let stress = core("stress recovery", recover_stress(u, &problem.grid, materials))?;
            let scan = core(
                "failure scan",
                scan_failure(&stress, materials, &Allowables::reference()),
            )?;
            Ok(failure_load(cfg.pressure, scan.interface_max))
        }
        _ => Ok(max_displacement(u, ncomp)),
    }
}

fn write_artifacts(
    dir: &Path,
    cfg: &RunConfig,
    problem: &Problem,
    permeability: Option<&[f64]>,
    row: &ReportRow,
    art: &Artifacts,
) -> Result<(), RunError> {
    let label = row.label();
    let create = |name: String| -> Result<BufWriter<fs::File>, RunError> {
        let path = dir.join(&name);
        Ok(BufWriter::new(io(
            format!("creating {}", path.display()),
            fs::File::create(&path),
        )?))
    };
    io(
        "writing residual history",
        art.history.write_history_csv(create(format!("residual_{label}.csv"))?),
    )?;
    io(
        "writing eigen report",
        write_eigen_report(&art.selections, create(format!("eigen_{label}.csv"))?),
    )?;
    io(
        "writing exchange ledger",
        art.ledger.write_csv(create(format!("ledger_{label}.csv"))?),
    )?;
    if !cfg.vtk {
        return Ok(());
    }
    let out = create(format!("solution_{label}.vtk"))?;
    let grid = &problem.grid;
    let res = if let Some(materials) = &problem.materials {
        let stress = core("stress recovery", recover_stress(&art.u, grid, materials))?;
        let f = camanho_field(&stress, &Allowables::reference());
        let s33: Vec<f64> = stress.stress.iter().map(|s| s[2]).collect();
        write_vtk(
            grid,
            &[VtkField::vector("displacement", &art.u)],
            &[VtkField::scalar("camanho", &f), VtkField::scalar("sigma33", &s33)],
            out,
        )
    } else {
        let cells: Vec<VtkField> = permeability
            .map(|k| VtkField::scalar("permeability", k))
            .into_iter()
            .collect();
        write_vtk(grid, &[VtkField::scalar("pressure", &art.u)], &cells, out)
    };
    io("writing VTK", res)
}

/// Runs the configured sweep. Artifacts are written to a staging directory
/// and moved into `cfg.output` only when every row succeeded.
pub fn run(cfg: &RunConfig) -> Result<StudyReport, RunError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    let staging = staging_dir(&cfg.output);
    if staging.exists() {
        io("clearing stale staging directory", fs::remove_dir_all(&staging))?;
    }
    io(format!("creating {}", staging.display()), fs::create_dir_all(&staging))?;
    let result = pool.install(|| run_into(cfg, &staging));
    match result {
        Ok(report) => {
            io("publishing artifacts", publish(&staging, &cfg.output))?;
            Ok(report)
        }
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

fn run_into(cfg: &RunConfig, staging: &Path) -> Result<StudyReport, RunError> {
    let t = Instant::now();
    let (problem, permeability) = build_problem(cfg)?;
    info!(
        "{}: {} cells, {} dofs, assembled in {:.2}s",
        cfg.problem,
        problem.grid.n_cells(),
        problem.system.dof_count(),
        t.elapsed().as_secs_f64()
    );
    let mut report = StudyReport::default();
    let mut direct_done = false;
    for &shape in &cfg.partitions {
        for &prec in &cfg.preconditioners {
            let direct = cfg.problem == ProblemKind::Plate1a && shape.iter().product::<usize>() == 1;
            if direct && direct_done {
                continue;
            }
            direct_done |= direct;
            let (row, art) = solve_one(cfg, &problem, shape, prec)?;
            write_artifacts(staging, cfg, &problem, permeability.as_deref(), &row, &art)?;
            report.rows.push(row);
        }
    }
    let f = io("creating report", fs::File::create(staging.join("report.csv")))?;
    io("writing report", report.write_csv(BufWriter::new(f)))?;
    io("writing config", fs::write(staging.join("config.txt"), cfg.to_text()))?;
    Ok(report)
}

fn staging_dir(output: &Path) -> PathBuf {
    let name = output
        .file_name()
        .map_or("out".into(), |n| n.to_string_lossy().into_owned());
    output.with_file_name(format!(".{name}.staging-{}", std::process::id()))
}

fn publish(staging: &Path, output: &Path) -> std::io::Result<()> {
    if !output.exists() {
        return fs::rename(staging, output);
    }
    for entry in fs::read_dir(staging)? {
        let entry = entry?;
        fs::rename(entry.path(), output.join(entry.file_name()))?;
    }
    fs::remove_dir(staging)
}
