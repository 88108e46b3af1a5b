use std::fs;
use std::path::Path;

use eigprog::apps::{build_ellipsoid_feasibility, run_iep_campaign, CampaignConfig, CampaignRow, EllipsoidRun, IepCell};
use eigprog::{eigen_map, solve_feasibility, Error, MapOrdering, Termination};
use serde::Serialize;

use crate::format::sig;
use crate::schema;
use crate::{svg, CliError, EllipsoidArgs, IepArgs, SolveArgs, EXIT_ALL_STALLED, EXIT_RESTART_BUDGET};

const CSV_DIGITS: usize = 6;

fn solver_error(e: Error) -> CliError {
    match e {
        Error::InvalidConfig(_) | Error::InvalidAlgebra(_) | Error::NotPositiveDefinite { .. } => CliError::config(e),
        other => CliError::Solver(other),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn ordering_name(o: MapOrdering) -> &'static str {
    match o {
        MapOrdering::BlockWise => "blockwise",
        MapOrdering::GloballyOrdered => "ordered",
    }
}

pub fn iep(args: &IepArgs) -> Result<u8, CliError> {
    let cfg = args.solver.spec().config()?;
    if args.seeds == 0 {
        return Err(CliError::Config("--seeds must be positive".into()));
    }
    let ordering: MapOrdering = args.ordering.into();
    let cells = if args.d.is_empty() {
        args.rho
            .iter()
            .map(|&rho| IepCell::from_rho(args.l, args.m, args.n, rho, ordering))
            .collect::<Result<Vec<_>, _>>()
    } else {
        args.d
            .iter()
            .map(|&d| IepCell::new(args.l, args.m, args.n, d, ordering))
            .collect::<Result<Vec<_>, _>>()
    }
    .map_err(CliError::config)?;

    let campaign = CampaignConfig {
        seeds: args.seeds,
        master_seed: args.seed,
        solver: cfg,
        threads: None,
    };
    let mut rows = Vec::with_capacity(cells.len());
    for cell in &cells {
        let row = run_iep_campaign(cell, &campaign).map_err(solver_error)?;
        println!("{row}");
        rows.push(row);
    }

    ensure_dir(&args.out)?;
    let path = args.out.join("iep_results.csv");
    write_iep_csv(&path, &rows)?;
    let flagged: usize = rows.iter().map(|r| r.flagged).sum();
    if flagged > 0 {
        eprintln!("eigprog: {flagged} instance(s) exhausted the restart budget");
        return Ok(EXIT_RESTART_BUDGET);
    }
    Ok(0)
}

fn write_iep_csv(path: &Path, rows: &[CampaignRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record([
        "l",
        "m",
        "n",
        "d",
        "ordering",
        "iter_mean",
        "iter_max",
        "iter_min",
        "iter_std",
        "restart_mean",
        "restart_max",
        "restart_min",
        "restart_std",
        "flagged",
    ])
    .map_err(|e| CliError::io(path, e))?;
    for r in rows {
        let (i, s) = (&r.iterations, &r.restarts);
        let mut rec = vec![
            r.cell.l.to_string(),
            r.cell.m.to_string(),
            r.cell.n.to_string(),
            r.cell.d.to_string(),
            ordering_name(r.cell.ordering).to_string(),
        ];
        rec.extend([i.mean, i.max, i.min, i.std, s.mean, s.max, s.min, s.std].iter().map(|v| sig(*v, CSV_DIGITS)));
        rec.push(r.flagged.to_string());
        w.write_record(&rec).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn ellipsoids(args: &EllipsoidArgs) -> Result<u8, CliError> {
    let file = schema::read(&args.instance)?;
    let spec = file
        .ellipsoids
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `ellipsoids` section".into()))?;
    let inst = spec.instance(args.l)?;
    let cfg = file.solver.merged(&args.solver.spec()).config()?;
    let problem = build_ellipsoid_feasibility(&inst).map_err(solver_error)?;
    if file.starts.is_empty() {
        return Err(CliError::Config("`starts` must list at least one point".into()));
    }
    if let Some((i, s)) = file.starts.iter().enumerate().find(|(_, s)| s.len() != inst.n()) {
        return Err(CliError::Config(format!("starts[{i}] has {} coordinates, expected {}", s.len(), inst.n())));
    }

    ensure_dir(&args.out)?;
    let mut runs = Vec::with_capacity(file.starts.len());
    for (i, x0) in file.starts.iter().enumerate() {
        let run = problem.solve_from(x0, &cfg).map_err(solver_error)?;
        write_trajectory(&args.out.join(format!("trajectory_{i}.csv")), &run)?;
        let r = inst.residuals(&run.final_x);
        println!(
            "start {i} {}: {} after {} iterations, x = {}, residuals {}",
            fmt_point(x0),
            run.report.termination,
            run.report.iterations,
            fmt_point(&run.final_x),
            fmt_point(&r)
        );
        runs.push(run);
    }
    if args.svg {
        if inst.n() == 2 {
            let path = args.out.join("plot.svg");
            fs::write(&path, svg::plot(&inst, &runs)).map_err(|e| CliError::io(&path, e))?;
        } else {
            eprintln!("eigprog: --svg needs a planar instance, skipping the plot");
        }
    }
    if runs.iter().all(|r| r.report.termination == Termination::Stalled) {
        return Ok(EXIT_ALL_STALLED);
    }
    Ok(0)
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn write_trajectory(path: &Path, run: &EllipsoidRun) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let n = run.final_x.len();
    let mut header = vec!["k".to_string()];
    header.extend((1..=n).map(|j| format!("x{j}")));
    header.push("residual".into());
    w.write_record(&header).map_err(|e| CliError::io(path, e))?;
    for (k, x) in run.trajectory.iter().enumerate() {
        let residual = if k == 0 { run.report.initial_residual } else { run.report.residuals[k - 1] };
        let mut rec = vec![k.to_string()];
        rec.extend(x.iter().map(|v| v.to_string()));
        rec.push(residual.to_string());
        w.write_record(&rec).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct StartReport {
    index: usize,
    termination: String,
    iterations: usize,
    initial_residual: f64,
    final_residual: f64,
    residuals: Vec<f64>,
    final_point: Vec<f64>,
    spectrum: Vec<f64>,
}

#[derive(Serialize)]
struct SolveOutput {
    ordering: &'static str,
    rank: usize,
    affine_dim: usize,
    tolerance: f64,
    starts: Vec<StartReport>,
}

pub fn solve(args: &SolveArgs) -> Result<u8, CliError> {
    let file = schema::read(&args.instance)?;
    let problem = file.problem()?;
    let cfg = problem.solver.merged(&args.solver.spec()).config()?;
    let mut starts = Vec::with_capacity(problem.starts.len());
    for (i, x0) in problem.starts.iter().enumerate() {
        let rep = solve_feasibility(&problem.affine, &problem.constraint, x0, &cfg).map_err(solver_error)?;
        println!(
            "start {i}: {} after {} iterations, residual {:.3e}",
            rep.termination,
            rep.iterations,
            rep.final_residual()
        );
        starts.push(StartReport {
            index: i,
            termination: rep.termination.to_string(),
            iterations: rep.iterations,
            initial_residual: rep.initial_residual,
            final_residual: rep.final_residual(),
            spectrum: eigen_map(&rep.final_point).map_err(solver_error)?,
            residuals: rep.residuals,
            final_point: rep.final_point.into_data(),
        });
    }
    let out = SolveOutput {
        ordering: ordering_name(problem.algebra.ordering()),
        rank: problem.algebra.rank(),
        affine_dim: problem.affine.dim(),
        tolerance: cfg.tolerance,
        starts,
    };
    ensure_dir(&args.out)?;
    let path = args.out.join("solve_report.json");
    let text = serde_json::to_string_pretty(&out).map_err(CliError::config)?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(0)
}
