//! Constraint sets on the spectrum and projection onto their preimages.
//!
//! Projecting `x` onto `λ⁻¹(𝓒)` reduces to projecting `λ(x)` onto
//! `λ(𝓔) ∩ 𝓒` and placing the result on the frame of `x`.

use std::fmt;
use std::sync::Arc;

use crate::ftvn::{spectral_decompose, Algebra, BlockKind, Element, MapOrdering, SpectralDecomposition};
use crate::error::{Error, Result};

/// User-supplied projector onto `λ(𝓔) ∩ 𝓒`. Must be re-entrant and must
/// return a vector in `λ(𝓔)`.
pub trait SpectrumProjector: Send + Sync {
    fn project(&self, v: &[f64]) -> Vec<f64>;
}

impl<F> SpectrumProjector for F
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn project(&self, v: &[f64]) -> Vec<f64> {
        self(v)
    }
}

#[derive(Clone)]
pub enum SpectralConstraint {
    /// `𝓒 = ℝʳ`.
    Unconstrained,
    /// `𝓒 = {λ*}`.
    Singleton(Vec<f64>),
    /// `{u ≥ 0 | the last `tight` entries vanish}` over `2·blocks` entries.
    VanishingTail { blocks: usize, tight: usize },
    Custom(Arc<dyn SpectrumProjector>),
}

impl fmt::Debug for SpectralConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralConstraint::Unconstrained => write!(f, "Unconstrained"),
            SpectralConstraint::Singleton(v) => f.debug_tuple("Singleton").field(v).finish(),
            SpectralConstraint::VanishingTail { blocks, tight } => f
                .debug_struct("VanishingTail")
                .field("blocks", blocks)
                .field("tight", tight)
                .finish(),
            SpectralConstraint::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl SpectralConstraint {
    /// `{λ*}`, after checking that `λ*` is an attainable spectrum.
    pub fn singleton(algebra: &Algebra, target: &[f64]) -> Result<Self> {
        let target = algebra
            .validate_spectrum(target)
            .map_err(|e| Error::EmptyConstraint(format!("target spectrum not in λ(𝓔): {e}")))?;
        Ok(SpectralConstraint::Singleton(target))
    }

    /// Vanishing tail over a globally ordered product of second-order cones.
    /// `tight` may range over `0..=2m`.
    pub fn vanishing_tail(algebra: &Algebra, tight: usize) -> Result<Self> {
        if algebra.ordering() != MapOrdering::GloballyOrdered {
            return Err(Error::InvalidAlgebra(
                "vanishing-tail constraints need the globally ordered map".into(),
            ));
        }
        if !algebra.blocks().iter().all(|b| matches!(b, BlockKind::Soc { .. })) {
            return Err(Error::InvalidAlgebra(
                "vanishing-tail constraints need a product of second-order cones".into(),
            ));
        }
        let blocks = algebra.blocks().len();
        if tight > 2 * blocks {
            return Err(Error::EmptyConstraint(format!(
                "cannot force {tight} of {} eigenvalues to vanish",
                2 * blocks
            )));
        }
        Ok(SpectralConstraint::VanishingTail { blocks, tight })
    }

    pub fn custom(projector: impl SpectrumProjector + 'static) -> Self {
        SpectralConstraint::Custom(Arc::new(projector))
    }

    /// A nearest point of `λ(𝓔) ∩ 𝓒` to `v ∈ λ(𝓔)`.
    pub fn project_spectrum(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpectralConstraint::Unconstrained => Ok(v.to_vec()),
            SpectralConstraint::Singleton(target) => {
                if target.len() != v.len() {
                    return Err(Error::DimensionMismatch {
                        expected: target.len(),
                        found: v.len(),
                    });
                }
                Ok(target.clone())
            }
            SpectralConstraint::VanishingTail { blocks, tight } => {
                let r = 2 * blocks;
                if v.len() != r {
                    return Err(Error::DimensionMismatch {
                        expected: r,
                        found: v.len(),
                    });
                }
                let keep = r - tight;
                Ok(v
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| if i < keep { x.max(0.0) } else { 0.0 })
                    .collect())
            }
            SpectralConstraint::Custom(p) => Ok(p.project(v)),
        }
    }

    /// Whether `v` is (numerically) a fixed point of the spectrum projector.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        let p = self.project_spectrum(v)?;
        Ok(p.iter().zip(v).all(|(a, b)| (a - b).abs() <= tol))
    }
}

/// Projection of an already decomposed element onto `λ⁻¹(𝓒)`.
pub fn project_decomposed(d: &SpectralDecomposition, constraint: &SpectralConstraint) -> Result<Element> {
    let w = constraint.project_spectrum(&d.eigenvalues())?;
    if let SpectralConstraint::Custom(_) = constraint {
        debug_assert!(
            d.algebra().validate_spectrum(&w).is_ok(),
            "custom projector left λ(𝓔): {w:?}"
        );
    }
    d.u_element(&w)
}

/// One member of `proj_{λ⁻¹(𝓒)}(x)`: `U(x, proj_𝓒(λ(x)))`.
pub fn project_spectral_set(x: &Element, constraint: &SpectralConstraint) -> Result<Element> {
    project_decomposed(&spectral_decompose(x)?, constraint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftvn::eigen_map;

    fn soc_product(m: usize) -> Arc<Algebra> {
        Algebra::new(vec![BlockKind::Soc { n: 2 }; m], MapOrdering::GloballyOrdered).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let alg = soc_product(2);
        let c = SpectralConstraint::vanishing_tail(&alg, 1).unwrap();
        assert_eq!(c.project_spectrum(&[3.0, 2.0, 1.0, -1.0]).unwrap(), vec![3.0, 2.0, 1.0, 0.0]);
        let c = SpectralConstraint::vanishing_tail(&alg, 2).unwrap();
        assert_eq!(c.project_spectrum(&[3.0, 2.0, -1.0, -5.0]).unwrap(), vec![3.0, 2.0, 0.0, 0.0]);
        let c = SpectralConstraint::vanishing_tail(&alg, 0).unwrap();
        assert_eq!(c.project_spectrum(&[3.0, -2.0, -3.0, -5.0]).unwrap(), vec![3.0, 0.0, 0.0, 0.0]);

        let sym = Algebra::single(BlockKind::Sym { n: 2 }).unwrap();
        let s = SpectralConstraint::singleton(&sym, &[1.0, 0.0]).unwrap();
        assert_eq!(s.project_spectrum(&[7.0, -3.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn dense_sample_confirms_vanishing_tail_optimality() {
        // brute force over a grid of descending nonnegative vectors with a zero tail
        let v = [3.0, 2.0, 1.0, -1.0];
        let grid: Vec<f64> = (0..=16).map(|k| k as f64 * 0.25).collect();
        let mut best = f64::INFINITY;
        for &a in &grid {
            for &b in grid.iter().filter(|&&b| b <= a) {
                for &c in grid.iter().filter(|&&c| c <= b) {
                    let d2 = (v[0] - a).powi(2) + (v[1] - b).powi(2) + (v[2] - c).powi(2) + v[3] * v[3];
                    best = best.min(d2);
                }
            }
        }
        let alg = soc_product(2);
        let p = SpectralConstraint::vanishing_tail(&alg, 1)
            .unwrap()
            .project_spectrum(&v)
            .unwrap();
        let d2: f64 = p.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        assert!((d2 - best).abs() < 1e-12);
    }

    #[test]
    fn construction_errors() {
        let sym = Algebra::single(BlockKind::Sym { n: 2 }).unwrap();
        assert!(matches!(
            SpectralConstraint::singleton(&sym, &[0.0, 1.0]),
            Err(Error::EmptyConstraint(_))
        ));
        assert!(SpectralConstraint::vanishing_tail(&sym, 1).is_err());
        let bw = Algebra::new(vec![BlockKind::Soc { n: 2 }; 2], MapOrdering::BlockWise).unwrap();
        assert!(SpectralConstraint::vanishing_tail(&bw, 1).is_err());
        assert!(SpectralConstraint::vanishing_tail(&soc_product(2), 5).is_err());
        assert!(SpectralConstraint::vanishing_tail(&soc_product(2), 4).is_ok());
        let rect = Algebra::single(BlockKind::Rect { m: 2, n: 2 }).unwrap();
        assert!(SpectralConstraint::singleton(&rect, &[1.0, -1.0]).is_err());
    }

    #[test]
    fn sym_singleton_projection() {
        let sym = Algebra::single(BlockKind::Sym { n: 2 }).unwrap();
        let c = SpectralConstraint::singleton(&sym, &[1.0, 0.0]).unwrap();
        let x = sym.element(vec![5.0, 0.0, 0.0, 3.0]).unwrap();
        let p = project_spectral_set(&x, &c).unwrap();
        assert_eq!(p.data(), &[1.0, 0.0, 0.0, 0.0]);
        // compare against the rotated alternatives Uᵀdiag(1,0)U
        let best = x.distance(&p).unwrap();
        for k in 0..64 {
            let th = k as f64 * std::f64::consts::PI / 32.0;
            let (c, s) = (th.cos(), th.sin());
            let alt = sym.element(vec![c * c, c * s, c * s, s * s]).unwrap();
            assert!(best <= x.distance(&alt).unwrap() + 1e-12);
        }
        // already feasible
        let q = project_spectral_set(&p, &c).unwrap();
        assert!(q.distance(&p).unwrap() < 1e-14);
    }

    #[test]
    fn vanishing_tail_in_element_space() {
        let alg = soc_product(3);
        // all blocks interior: λ↓ = (√2/2)(3+1, 2.5+1, 2+1, 2-1, 2.5-1, 3-1)
        let x = alg
            .element(vec![1.0, 0.0, 3.0, 0.0, 1.0, 2.5, 1.0, 0.0, 2.0])
            .unwrap();
        let c = SpectralConstraint::vanishing_tail(&alg, 2).unwrap();
        let p = project_spectral_set(&x, &c).unwrap();
        let lam_x = eigen_map(&x).unwrap();
        let lam_p = eigen_map(&p).unwrap();
        let want = c.project_spectrum(&lam_x).unwrap();
        for (a, b) in lam_p.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        // the two smallest belong to blocks 3 and 2: those blocks land on the boundary
        let d_elem = x.distance(&p).unwrap();
        let d_spec: f64 = lam_x.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!((d_elem - d_spec).abs() < 1e-12);
        assert!(crate::ftvn::rank(&p, 1e-9).unwrap() <= 4);
    }

    #[test]
    fn custom_projector_is_used() {
        let alg = Algebra::single(BlockKind::Sym { n: 2 }).unwrap();
        let clip = SpectralConstraint::custom(|v: &[f64]| v.iter().map(|x| x.clamp(-1.0, 1.0)).collect::<Vec<_>>());
        let x = alg.element(vec![3.0, 0.0, 0.0, -0.5]).unwrap();
        let p = project_spectral_set(&x, &clip).unwrap();
        assert_eq!(p.data(), &[1.0, 0.0, 0.0, -0.5]);
        assert!(format!("{clip:?}").contains("Custom"));
    }
}
