//! Projected gradient over spectral sets and its feasibility specialization.
//!
//! Each iteration takes a gradient step `y = x − α∇f(x)` and then projects `y`
//! onto `λ⁻¹(𝓒)` by replacing the spectrum of `y` with its projection onto
//! `λ(𝓔) ∩ 𝓒`. With `f = ½dist(·, 𝓒̄)²` the step becomes
//! `y = (1−α)x + α·proj_𝓒̄(x)`.

use std::fmt;
use std::sync::Arc;

use crate::dense::{dot, norm2};
use crate::error::{Error, Result};
use crate::ftvn::Element;
use crate::spectral_sets::{project_spectral_set, SpectralConstraint};

/// Vectors whose residual after orthogonalization falls below this fraction
/// of their norm are treated as linearly dependent.
const DEPENDENCE_TOL: f64 = 1e-12;

/// `base + span{…}` with a cached orthonormal basis of the span.
#[derive(Debug, Clone)]
pub struct AffineSet {
    base: Element,
    span: Vec<Element>,
    basis: Vec<Vec<f64>>,
}

impl AffineSet {
    pub fn new(base: Element, span: Vec<Element>) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for a in &span {
            if a.algebra() != base.algebra() {
                return Err(Error::AlgebraMismatch);
            }
            let norm = a.norm();
            if norm == 0.0 {
                continue;
            }
            let mut w = a.data().to_vec();
            // modified Gram–Schmidt, twice
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let rest = norm2(&w);
            if rest < DEPENDENCE_TOL * norm {
                continue;
            }
            w.iter_mut().for_each(|wi| *wi /= rest);
            basis.push(w);
        }
        Ok(AffineSet { base, span, basis })
    }

    /// The affine set `{point}`.
    pub fn point(base: Element) -> Self {
        AffineSet {
            base,
            span: Vec::new(),
            basis: Vec::new(),
        }
    }

    pub fn base(&self) -> &Element {
        &self.base
    }

    pub fn span(&self) -> &[Element] {
        &self.span
    }

    /// Dimension of the span after dropping dependent vectors.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn project(&self, x: &Element) -> Result<Element> {
        let r = x.sub(&self.base)?;
        let mut out = self.base.data().to_vec();
        for b in &self.basis {
            let c = dot(b, r.data());
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        Ok(Element::from_raw(self.base.algebra().clone(), out))
    }

    pub fn distance(&self, x: &Element) -> Result<f64> {
        x.distance(&self.project(x)?)
    }
}

/// A smooth objective with `L`-Lipschitz gradient.
pub trait Objective {
    /// `(f(x), ∇f(x))`.
    fn evaluate(&self, x: &Element) -> Result<(f64, Element)>;
    fn lipschitz(&self) -> f64;
}

/// `f ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroObjective;

impl Objective for ZeroObjective {
    fn evaluate(&self, x: &Element) -> Result<(f64, Element)> {
        Ok((0.0, x.algebra().zeros()))
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }
}

/// `f = ½dist(·, 𝓒̄)²`, whose gradient `x − proj_𝓒̄(x)` is 1-Lipschitz.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityObjective<'a> {
    affine: &'a AffineSet,
}

impl<'a> FeasibilityObjective<'a> {
    pub fn new(affine: &'a AffineSet) -> Self {
        FeasibilityObjective { affine }
    }
}

impl Objective for FeasibilityObjective<'_> {
    fn evaluate(&self, x: &Element) -> Result<(f64, Element)> {
        let g = x.sub(&self.affine.project(x)?)?;
        let n = g.norm();
        Ok((0.5 * n * n, g))
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }
}

#[derive(Clone)]
pub enum StepSize {
    Constant(f64),
    /// Step size as a function of the iteration index.
    Schedule(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl StepSize {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            StepSize::Constant(a) => *a,
            StepSize::Schedule(f) => f(k),
        }
    }
}

impl fmt::Debug for StepSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSize::Constant(a) => f.debug_tuple("Constant").field(a).finish(),
            StepSize::Schedule(_) => write!(f, "Schedule(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub step: StepSize,
    pub max_iterations: usize,
    /// Stop once `‖∇f(x_k)‖` (for feasibility: `dist(x_k, 𝓒̄)`) is at most this.
    pub tolerance: f64,
    /// Restarts allowed by [`restart_loop`] after the first run.
    pub restart_cap: usize,
    /// Steps shorter than this without meeting the tolerance end the run as stalled.
    pub stall_threshold: f64,
    /// Keep every iterate in the report.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step: StepSize::Constant(0.99),
            max_iterations: 10_000,
            tolerance: 1e-3,
            restart_cap: 50,
            stall_threshold: 1e-14,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.step = StepSize::Constant(alpha);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_restart_cap(mut self, restart_cap: usize) -> Self {
        self.restart_cap = restart_cap;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    pub fn validate(&self, lipschitz: f64) -> Result<()> {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::InvalidConfig(format!("Lipschitz constant {lipschitz} must be positive")));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance {} must be nonnegative", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if let StepSize::Constant(a) = self.step {
            check_step(a, lipschitz)?;
        }
        Ok(())
    }
}

fn check_step(alpha: f64, lipschitz: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha * lipschitz < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "step size {alpha} must lie in (0, 1/L) with L = {lipschitz}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Converged,
    MaxIterations,
    Stalled,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Termination::Converged => "Converged",
            Termination::MaxIterations => "MaxIterations",
            Termination::Stalled => "Stalled",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub final_point: Element,
    pub iterations: usize,
    /// `‖∇f(x₀)‖`; `x₀` need not satisfy the spectral constraint.
    pub initial_residual: f64,
    pub initial_objective: f64,
    /// `‖∇f(x_k)‖` for `k = 1..=iterations`.
    pub residuals: Vec<f64>,
    /// `f(x_k)` for `k = 1..=iterations`.
    pub objective_values: Vec<f64>,
    /// `‖x_{k+1} − x_k‖` for `k = 0..iterations`.
    pub step_norms: Vec<f64>,
    pub restarts: usize,
    pub termination: Termination,
    /// `x₀, x₁, …` when the config asks for them.
    pub iterates: Vec<Element>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(self.initial_residual)
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Projected gradient: `x_{k+1} ∈ proj_{λ⁻¹(𝓒)}(x_k − α_k ∇f(x_k))`.
pub fn projected_gradient(
    objective: &dyn Objective,
    constraint: &SpectralConstraint,
    x0: &Element,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let lipschitz = objective.lipschitz();
    cfg.validate(lipschitz)?;
    if !x0.is_finite() {
        return Err(Error::NonFiniteValue("initial point".into()));
    }
    let (f0, mut grad) = checked_evaluate(objective, x0)?;
    let mut report = SolveReport {
        final_point: x0.clone(),
        iterations: 0,
        initial_residual: grad.norm(),
        initial_objective: f0,
        residuals: Vec::new(),
        objective_values: Vec::new(),
        step_norms: Vec::new(),
        restarts: 0,
        termination: Termination::MaxIterations,
        iterates: Vec::new(),
    };
    if cfg.record_iterates {
        report.iterates.push(x0.clone());
    }

    let mut x = x0.clone();
    for k in 0..cfg.max_iterations {
        let alpha = cfg.step.at(k);
        check_step(alpha, lipschitz)?;
        let mut y = x.clone();
        y.axpy(-alpha, &grad)?;
        let next = project_spectral_set(&y, constraint)?;
        if !next.is_finite() {
            return Err(Error::NonFiniteValue(format!("iterate {}", k + 1)));
        }
        let step = next.distance(&x)?;
        let (f, g) = checked_evaluate(objective, &next)?;
        let residual = g.norm();

        report.iterations = k + 1;
        report.step_norms.push(step);
        report.residuals.push(residual);
        report.objective_values.push(f);
        if cfg.record_iterates {
            report.iterates.push(next.clone());
        }
        x = next;
        grad = g;

        if residual <= cfg.tolerance {
            report.termination = Termination::Converged;
            break;
        }
        if step < cfg.stall_threshold {
            report.termination = Termination::Stalled;
            break;
        }
    }
    report.final_point = x;
    Ok(report)
}

fn checked_evaluate(objective: &dyn Objective, x: &Element) -> Result<(f64, Element)> {
    let (f, g) = objective.evaluate(x)?;
    if !f.is_finite() {
        return Err(Error::NonFiniteValue(format!("objective value {f}")));
    }
    if !g.is_finite() {
        return Err(Error::NonFiniteValue("gradient".into()));
    }
    Ok((f, g))
}

/// Finds `x ∈ 𝓒̄ ∩ λ⁻¹(𝓒)` by projected gradient on `½dist(·, 𝓒̄)²`.
pub fn solve_feasibility(
    affine: &AffineSet,
    constraint: &SpectralConstraint,
    x0: &Element,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    projected_gradient(&FeasibilityObjective::new(affine), constraint, x0, cfg)
}

/// Reruns [`solve_feasibility`] from `initial_point(r)` for `r = 0, 1, …`
/// until a run converges. The returned report carries the restart count.
pub fn restart_loop<F>(
    affine: &AffineSet,
    constraint: &SpectralConstraint,
    cfg: &SolverConfig,
    initial_point: F,
) -> Result<SolveReport>
where
    F: FnMut(usize) -> Result<Element>,
{
    let report = run_with_restarts(affine, constraint, cfg, initial_point)?;
    if report.converged() {
        Ok(report)
    } else {
        Err(Error::RestartBudgetExceeded {
            restarts: report.restarts,
        })
    }
}

/// Like [`restart_loop`], but an exhausted budget returns the last run
/// (not converged, `restarts == cfg.restart_cap`) instead of an error.
pub fn run_with_restarts<F>(
    affine: &AffineSet,
    constraint: &SpectralConstraint,
    cfg: &SolverConfig,
    mut initial_point: F,
) -> Result<SolveReport>
where
    F: FnMut(usize) -> Result<Element>,
{
    let mut r = 0;
    loop {
        let x0 = initial_point(r)?;
        let mut report = solve_feasibility(affine, constraint, &x0, cfg)?;
        report.restarts = r;
        if report.converged() || r >= cfg.restart_cap {
            return Ok(report);
        }
        r += 1;
    }
}
