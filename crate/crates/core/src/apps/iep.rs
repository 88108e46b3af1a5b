//! Inverse eigenvalue problems: find `c ∈ ℝᵈ` with `λ(a₀ + Σ cᵢaᵢ) = λ*`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ftvn::{eigen_map, Algebra, BlockKind, Element, MapOrdering};
use crate::rng::{uniform_element, unit_sphere_element};
use crate::solver::AffineSet;
use crate::spectral_sets::SpectralConstraint;

/// Singular values below this fraction of the largest are treated as zero in
/// coefficient recovery.
const LSTSQ_RCOND: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct IepInstance {
    base: Element,
    directions: Vec<Element>,
    target: Vec<f64>,
    coefficients: Option<Vec<f64>>,
}

impl IepInstance {
    pub fn new(base: Element, directions: Vec<Element>, target: Vec<f64>, coefficients: Option<Vec<f64>>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidConfig("an inverse eigenvalue problem needs d ≥ 1".into()));
        }
        if directions.iter().any(|a| a.algebra() != base.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        let target = base.algebra().validate_spectrum(&target)?;
        if let Some(c) = &coefficients {
            if c.len() != directions.len() {
                return Err(Error::DimensionMismatch {
                    expected: directions.len(),
                    found: c.len(),
                });
            }
        }
        Ok(IepInstance {
            base,
            directions,
            target,
            coefficients,
        })
    }

    /// Synthetic instance: `a₀, …, a_d` uniform on `[0, 1]`, `c` standard
    /// normal, and `λ* = λ(a₀ + Σ cᵢaᵢ)`.
    pub fn random<R: Rng + ?Sized>(algebra: &Arc<Algebra>, d: usize, rng: &mut R) -> Result<Self> {
        let base = uniform_element(algebra, rng);
        let directions: Vec<Element> = (0..d).map(|_| uniform_element(algebra, rng)).collect();
        let c: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut planted = base.clone();
        for (ci, a) in c.iter().zip(&directions) {
            planted.axpy(*ci, a)?;
        }
        let target = eigen_map(&planted)?;
        IepInstance::new(base, directions, target, Some(c))
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.base.algebra()
    }

    pub fn base(&self) -> &Element {
        &self.base
    }

    pub fn directions(&self) -> &[Element] {
        &self.directions
    }

    pub fn d(&self) -> usize {
        self.directions.len()
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    /// `a₀ + Σ cᵢaᵢ`.
    pub fn combination(&self, c: &[f64]) -> Result<Element> {
        if c.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: c.len(),
            });
        }
        let mut x = self.base.clone();
        for (ci, a) in c.iter().zip(&self.directions) {
            x.axpy(*ci, a)?;
        }
        Ok(x)
    }

    /// The planted solution `x*`, when ground-truth coefficients are known.
    pub fn planted_solution(&self) -> Option<Element> {
        self.coefficients.as_ref().map(|c| self.combination(c).expect("length checked at construction"))
    }

    /// Least-squares coefficients of `x − a₀` against `a₁, …, a_d`.
    pub fn recover_coefficients(&self, x: &Element) -> Result<Vec<f64>> {
        let r = x.sub(&self.base)?;
        let rows = r.data().len();
        let a = DMatrix::from_fn(rows, self.d(), |i, j| self.directions[j].data()[i]);
        let b = DVector::from_column_slice(r.data());
        let svd = a.svd(true, true);
        let eps = LSTSQ_RCOND * svd.singular_values.max();
        let c = svd.solve(&b, eps).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(c.iter().copied().collect())
    }

    /// `‖λ(a₀ + Σ cᵢaᵢ) − λ*‖∞`.
    pub fn spectrum_error(&self, c: &[f64]) -> Result<f64> {
        let lam = eigen_map(&self.combination(c)?)?;
        Ok(lam.iter().zip(&self.target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// `SOC(n)ᵐ × SYM(n)ˡ`, SOC blocks first.
pub fn iep_algebra(l: usize, m: usize, n: usize, ordering: MapOrdering) -> Result<Arc<Algebra>> {
    let mut blocks = vec![BlockKind::Soc { n }; m];
    blocks.extend(std::iter::repeat_n(BlockKind::Sym { n }, l));
    Algebra::new(blocks, ordering)
}

/// `d = ⌊dim(𝓔)·ρ⌋`, at least 1.
///
/// Symmetric blocks count `n(n+1)/2` dimensions. A `1e-9` guard absorbs
/// products such as `55 · 0.6` landing just below an integer.
pub fn iep_dimension(algebra: &Algebra, rho: f64) -> Result<usize> {
    if !(rho.is_finite() && rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidConfig(format!("rho = {rho} must lie in (0, 1]")));
    }
    Ok(((algebra.dim() as f64 * rho + 1e-9).floor() as usize).max(1))
}

/// `𝓒̄ = a₀ + span{aᵢ}` and `𝓒 = {λ*}`.
pub fn build_iep_feasibility(inst: &IepInstance) -> Result<(AffineSet, SpectralConstraint)> {
    let affine = AffineSet::new(inst.base.clone(), inst.directions.clone())?;
    let constraint = SpectralConstraint::singleton(inst.algebra(), &inst.target).map_err(|e| match e {
        Error::EmptyConstraint(msg) => Error::InvalidSpectrum(msg),
        other => other,
    })?;
    Ok((affine, constraint))
}

/// Restart rule `x₀ = x* + 100‖x*‖u/2ʳ` with `u` uniform on the unit sphere.
pub fn perturbed_start<R: Rng + ?Sized>(x_star: &Element, r: usize, rng: &mut R) -> Element {
    let u = unit_sphere_element(x_star.algebra(), rng);
    let radius = 100.0 * x_star.norm() / 2f64.powi(r.min(1023) as i32);
    let mut x0 = x_star.clone();
    x0.axpy(radius, &u).expect("same algebra");
    x0
}
