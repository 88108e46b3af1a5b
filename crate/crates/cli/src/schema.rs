//! Problem file schema shared by the `solve` and `ellipsoids` commands.
//!
//! Flat arrays use the element layout of the core crate: blocks in order, a
//! second-order-cone block as `(x₁, …, x_n, t)`, matrix blocks row-major.

use std::path::Path;

use eigprog::algebra::sym::SymMatrix;
use eigprog::apps::EllipsoidInstance;
use eigprog::{AffineSet, Algebra, BlockKind, Element, MapOrdering, SolverConfig, SpectralConstraint};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub algebra: Option<AlgebraSpec>,
    pub affine: Option<AffineSpec>,
    pub constraint: Option<ConstraintSpec>,
    #[serde(default)]
    pub starts: Vec<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverSpec,
    pub ellipsoids: Option<EllipsoidSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub blocks: Vec<BlockSpec>,
    #[serde(default)]
    pub ordering: OrderingSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockSpec {
    Soc { n: usize },
    Sym { n: usize },
    Rect { m: usize, n: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OrderingSpec {
    #[default]
    Blockwise,
    Ordered,
}

impl From<OrderingSpec> for MapOrdering {
    fn from(o: OrderingSpec) -> Self {
        match o {
            OrderingSpec::Blockwise => MapOrdering::BlockWise,
            OrderingSpec::Ordered => MapOrdering::GloballyOrdered,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub base: Vec<f64>,
    #[serde(default)]
    pub span: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    Singleton { spectrum: Vec<f64> },
    VanishingTail { tight: usize },
    None,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub restart_cap: Option<usize>,
}

impl SolverSpec {
    /// Values present in `over` win.
    pub fn merged(&self, over: &SolverSpec) -> SolverSpec {
        SolverSpec {
            alpha: over.alpha.or(self.alpha),
            tol: over.tol.or(self.tol),
            max_iter: over.max_iter.or(self.max_iter),
            restart_cap: over.restart_cap.or(self.restart_cap),
        }
    }

    pub fn config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig::default();
        if let Some(a) = self.alpha {
            cfg = cfg.with_alpha(a);
        }
        if let Some(t) = self.tol {
            cfg = cfg.with_tolerance(t);
        }
        if let Some(k) = self.max_iter {
            cfg = cfg.with_max_iterations(k);
        }
        if let Some(r) = self.restart_cap {
            cfg = cfg.with_restart_cap(r);
        }
        cfg.validate(1.0).map_err(CliError::config)?;
        Ok(cfg)
    }
}

/// `(x − pᵢ)ᵀQᵢ(x − pᵢ) ≤ 1`, at least `tight` of them tight.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipsoidSpec {
    pub q: Vec<Vec<Vec<f64>>>,
    pub centers: Vec<Vec<f64>>,
    pub tight: usize,
}

impl EllipsoidSpec {
    pub fn instance(&self, tight_override: Option<usize>) -> Result<EllipsoidInstance, CliError> {
        let q = self
            .q
            .iter()
            .map(|rows| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Config("every Q must be square".into()));
                }
                SymMatrix::from_rows(rows).map_err(CliError::config)
            })
            .collect::<Result<Vec<_>, _>>()?;
        EllipsoidInstance::new(q, self.centers.clone(), tight_override.unwrap_or(self.tight)).map_err(CliError::config)
    }
}

pub fn read(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Typed problem for the generic `solve` command.
pub struct Problem {
    pub algebra: Arc<Algebra>,
    pub affine: AffineSet,
    pub constraint: SpectralConstraint,
    pub starts: Vec<Element>,
    pub solver: SolverSpec,
}

impl ProblemFile {
    pub fn problem(&self) -> Result<Problem, CliError> {
        let spec = self.algebra.as_ref().ok_or_else(|| CliError::Config("missing `algebra` section".into()))?;
        let blocks = spec
            .blocks
            .iter()
            .map(|b| match *b {
                BlockSpec::Soc { n } => BlockKind::Soc { n },
                BlockSpec::Sym { n } => BlockKind::Sym { n },
                BlockSpec::Rect { m, n } => BlockKind::Rect { m, n },
            })
            .collect();
        let algebra = Algebra::new(blocks, spec.ordering.into()).map_err(CliError::config)?;
        let element = |v: &[f64], what: &str| {
            algebra
                .element(v.to_vec())
                .map_err(|e| CliError::Config(format!("{what}: {e}")))
        };
        let affine_spec = self.affine.as_ref().ok_or_else(|| CliError::Config("missing `affine` section".into()))?;
        let base = element(&affine_spec.base, "affine.base")?;
        let span = affine_spec
            .span
            .iter()
            .enumerate()
            .map(|(i, v)| element(v, &format!("affine.span[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let affine = AffineSet::new(base, span).map_err(CliError::config)?;
        let constraint = match self.constraint.as_ref().unwrap_or(&ConstraintSpec::None) {
            ConstraintSpec::Singleton { spectrum } => {
                SpectralConstraint::singleton(&algebra, spectrum).map_err(CliError::config)?
            }
            ConstraintSpec::VanishingTail { tight } => {
                SpectralConstraint::vanishing_tail(&algebra, *tight).map_err(CliError::config)?
            }
            ConstraintSpec::None => SpectralConstraint::Unconstrained,
        };
        if self.starts.is_empty() {
            return Err(CliError::Config("`starts` must list at least one point".into()));
        }
        let starts = self
            .starts
            .iter()
            .enumerate()
            .map(|(i, v)| element(v, &format!("starts[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Problem {
            algebra,
            affine,
            constraint,
            starts,
            solver: self.solver.clone(),
        })
    }
}
