//! Eigenvalue programming over Fan–Theobald–von Neumann systems.
//!
//! An FTvN system pairs a Euclidean space `𝓔` with an eigenvalue map
//! `λ: 𝓔 → ℝʳ` that preserves norms, majorizes inner products, and admits
//! frame-aligned elements `U(c, μ)` for every target spectrum `μ`. This crate
//! provides three such systems (second-order cones, symmetric matrices,
//! rectangular matrices with singular values), products of them under blockwise
//! or globally ordered maps, projections onto spectral sets, a projected
//! gradient solver, and builders for inverse eigenvalue problems and vanishing
//! quadratic constraints.
//!
//! ```
//! use eigprog::{eigen_map, Algebra, BlockKind};
//!
//! let alg = Algebra::single(BlockKind::Sym { n: 2 }).unwrap();
//! let x = alg.element(vec![2.0, 1.0, 1.0, 2.0]).unwrap();
//! let lam = eigen_map(&x).unwrap();
//! assert!((lam[0] - 3.0).abs() < 1e-12 && (lam[1] - 1.0).abs() < 1e-12);
//! ```

pub mod algebra;
pub mod apps;
pub mod dense;
pub mod error;
pub mod ftvn;
pub mod rng;
pub mod solver;
pub mod spectral_sets;

pub use error::{Error, Result};
pub use ftvn::{
    eigen_map, rank, spectral_decompose, u_element, Algebra, BlockKind, Element, Frame, MapOrdering,
    SpectralDecomposition,
};
pub use solver::{
    projected_gradient, restart_loop, run_with_restarts, solve_feasibility, AffineSet, FeasibilityObjective, Objective, SolveReport,
    SolverConfig, StepSize, Termination,
};
pub use spectral_sets::{project_spectral_set, SpectralConstraint, SpectrumProjector};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
