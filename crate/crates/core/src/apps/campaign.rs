//! Random inverse eigenvalue campaigns and their summary statistics.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ftvn::{Algebra, MapOrdering};
use crate::rng::{stream_rng, DATA_STREAM};
use crate::solver::{run_with_restarts, SolverConfig};
use std::sync::Arc;

use super::iep::{build_iep_feasibility, iep_algebra, iep_dimension, perturbed_start, IepInstance};

/// Environment variable capping campaign worker threads.
pub const THREADS_ENV: &str = "EIGPROG_THREADS";

/// One table cell: `SOC(n)ᵐ × SYM(n)ˡ` with a `d`-dimensional affine span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IepCell {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub ordering: MapOrdering,
}

impl IepCell {
    pub fn new(l: usize, m: usize, n: usize, d: usize, ordering: MapOrdering) -> Result<Self> {
        let cell = IepCell { l, m, n, d, ordering };
        let alg = cell.algebra()?;
        if d == 0 || d > alg.dim() {
            return Err(Error::InvalidConfig(format!("d = {d} must lie in 1..={}", alg.dim())));
        }
        Ok(cell)
    }

    /// Cell with `d = ⌊dim(𝓔)·ρ⌋`.
    pub fn from_rho(l: usize, m: usize, n: usize, rho: f64, ordering: MapOrdering) -> Result<Self> {
        let alg = iep_algebra(l, m, n, ordering)?;
        IepCell::new(l, m, n, iep_dimension(&alg, rho)?, ordering)
    }

    pub fn algebra(&self) -> Result<Arc<Algebra>> {
        iep_algebra(self.l, self.m, self.n, self.ordering)
    }
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub seeds: usize,
    pub master_seed: u64,
    pub solver: SolverConfig,
    /// Worker cap; `None` reads [`THREADS_ENV`] and falls back to all cores.
    pub threads: Option<usize>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seeds: 10,
            master_seed: 0,
            solver: SolverConfig::default(),
            threads: None,
        }
    }
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub index: usize,
    /// Iterations of the final run.
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub final_residual: f64,
    /// `‖λ(a₀ + Σ ĉᵢaᵢ) − λ*‖∞` for the least-squares coefficients `ĉ`.
    pub spectrum_error: f64,
    pub residuals: Vec<f64>,
}

/// Mean, max, min and sample standard deviation (`n − 1` denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub std: f64,
}

impl Stats {
    pub fn from_values(values: &[f64]) -> Stats {
        let n = values.len();
        if n == 0 {
            return Stats {
                mean: f64::NAN,
                max: f64::NAN,
                min: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Stats {
            mean,
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            std: var.sqrt(),
        }
    }

    pub fn from_counts(values: &[usize]) -> Stats {
        Stats::from_values(&values.iter().map(|&v| v as f64).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone)]
pub struct CampaignRow {
    pub cell: IepCell,
    pub iterations: Stats,
    pub restarts: Stats,
    /// Instances that exhausted the restart budget.
    pub flagged: usize,
    pub outcomes: Vec<InstanceOutcome>,
}

impl fmt::Display for CampaignRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, r) = (&self.iterations, &self.restarts);
        write!(
            f,
            "{} {} {} {} | {:.1} {} {} {:.1} | {:.1} {} {} {:.1}",
            self.cell.l, self.cell.m, self.cell.n, self.cell.d, i.mean, i.max, i.min, i.std, r.mean, r.max, r.min, r.std
        )?;
        if self.flagged > 0 {
            write!(f, " [{} over budget]", self.flagged)?;
        }
        Ok(())
    }
}

/// Generates instance `index` of the cell and solves it with restarts.
///
/// The instance data come from stream 0 of `(master_seed, index)` and the
/// starting point of restart `r` from stream `r + 1`, so results do not depend
/// on scheduling.
pub fn run_iep_instance(cell: &IepCell, master_seed: u64, index: usize, solver: &SolverConfig) -> Result<InstanceOutcome> {
    let alg = cell.algebra()?;
    let mut data_rng = stream_rng(master_seed, index as u64, DATA_STREAM);
    let inst = IepInstance::random(&alg, cell.d, &mut data_rng)?;
    let (affine, constraint) = build_iep_feasibility(&inst)?;
    let x_star = inst.planted_solution().expect("synthetic instances carry coefficients");
    let report = run_with_restarts(&affine, &constraint, solver, |r| {
        let mut rng = stream_rng(master_seed, index as u64, r as u64 + 1);
        Ok(perturbed_start(&x_star, r, &mut rng))
    })?;
    let c = inst.recover_coefficients(&report.final_point)?;
    Ok(InstanceOutcome {
        index,
        iterations: report.iterations,
        restarts: report.restarts,
        converged: report.converged(),
        final_residual: report.final_residual(),
        spectrum_error: inst.spectrum_error(&c)?,
        residuals: report.residuals,
    })
}

/// Runs `cfg.seeds` independent instances of `cell`, in parallel.
pub fn run_iep_campaign(cell: &IepCell, cfg: &CampaignConfig) -> Result<CampaignRow> {
    if cfg.seeds == 0 {
        return Err(Error::InvalidConfig("seeds must be positive".into()));
    }
    cfg.solver.validate(1.0)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads.or_else(threads_from_env) {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let outcomes: Vec<InstanceOutcome> = pool.install(|| {
        (0..cfg.seeds)
            .into_par_iter()
            .map(|i| run_iep_instance(cell, cfg.master_seed, i, &cfg.solver))
            .collect::<Result<_>>()
    })?;
    let iterations: Vec<usize> = outcomes.iter().map(|o| o.iterations).collect();
    let restarts: Vec<usize> = outcomes.iter().map(|o| o.restarts).collect();
    Ok(CampaignRow {
        cell: *cell,
        iterations: Stats::from_counts(&iterations),
        restarts: Stats::from_counts(&restarts),
        flagged: outcomes.iter().filter(|o| !o.converged).count(),
        outcomes,
    })
}
