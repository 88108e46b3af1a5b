//! The Jordan algebra of the second-order cone on `ℝⁿ × ℝ`.
//!
//! Points are stored as `(x, t)` with the scalar part last. The Jordan product
//! carries a `√2/2` factor so that the trace inner product coincides with the
//! Euclidean one, which is what makes `‖λ(p)‖₂ = ‖p‖` hold without rescaling.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::dense::{dot, norm2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SocPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

impl SocPoint {
    pub fn new(x: Vec<f64>, t: f64) -> Self {
        SocPoint { x, t }
    }

    /// Reads a point from the flat `(x, t)` layout.
    pub fn from_slice(data: &[f64]) -> Self {
        let (t, x) = data.split_last().expect("SOC block needs at least one entry");
        SocPoint { x: x.to_vec(), t: *t }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.push(self.t);
        v
    }

    /// Jordan identity `(0, √2)`.
    pub fn identity(n: usize) -> Self {
        SocPoint {
            x: vec![0.0; n],
            t: std::f64::consts::SQRT_2,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn in_cone(&self) -> bool {
        norm2(&self.x) <= self.t
    }

    pub fn inner(&self, other: &SocPoint) -> f64 {
        dot(&self.x, &other.x) + self.t * other.t
    }
}

/// Eigenvalues and frame direction of a second-order-cone point.
#[derive(Debug, Clone, PartialEq)]
pub struct SocSpectrum {
    pub plus: f64,
    pub minus: f64,
    /// Unit vector `w_x`; `e± = (√2/2)(±w_x, 1)`.
    pub direction: Vec<f64>,
}

impl SocSpectrum {
    pub fn frame_plus(&self) -> SocPoint {
        frame_vector(&self.direction, 1.0)
    }

    pub fn frame_minus(&self) -> SocPoint {
        frame_vector(&self.direction, -1.0)
    }
}

fn frame_vector(direction: &[f64], sign: f64) -> SocPoint {
    SocPoint {
        x: direction.iter().map(|w| sign * FRAC_1_SQRT_2 * w).collect(),
        t: FRAC_1_SQRT_2,
    }
}

/// Spectral decomposition of the flat `(x, t)` pair.
///
/// When `x = 0` the direction is the first canonical basis vector.
pub fn soc_spectral_parts(x: &[f64], t: f64) -> SocSpectrum {
    let nx = norm2(x);
    let direction = if nx > 0.0 {
        x.iter().map(|v| v / nx).collect()
    } else {
        let mut w = vec![0.0; x.len()];
        if let Some(first) = w.first_mut() {
            *first = 1.0;
        }
        w
    };
    SocSpectrum {
        plus: FRAC_1_SQRT_2 * (t + nx),
        minus: FRAC_1_SQRT_2 * (t - nx),
        direction,
    }
}

pub fn soc_spectral(p: &SocPoint) -> SocSpectrum {
    soc_spectral_parts(&p.x, p.t)
}

/// Writes `μ₊e₊ + μ₋e₋` into `out` using the flat `(x, t)` layout.
pub(crate) fn soc_synthesize_into(direction: &[f64], mu_plus: f64, mu_minus: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), direction.len() + 1);
    let spread = FRAC_1_SQRT_2 * (mu_plus - mu_minus);
    let (t, x) = out.split_last_mut().expect("non-empty block");
    for (xi, w) in x.iter_mut().zip(direction) {
        *xi = spread * w;
    }
    *t = FRAC_1_SQRT_2 * (mu_plus + mu_minus);
}

/// An element of `U(c, (μ₊, μ₋))`: the target eigenvalues placed on `c`'s frame.
pub fn soc_u_element(c: &SocPoint, mu_plus: f64, mu_minus: f64) -> Result<SocPoint> {
    let mut mu = [mu_plus, mu_minus];
    super::repair_nonincreasing(&mut mu)?;
    let spec = soc_spectral(c);
    let mut out = vec![0.0; c.dim() + 1];
    soc_synthesize_into(&spec.direction, mu[0], mu[1], &mut out);
    Ok(SocPoint::from_slice(&out))
}

/// `(x,t)∘(y,u) = (√2/2)(u·x + t·y, ⟨x,y⟩ + t·u)`.
pub fn jordan_product(p: &SocPoint, q: &SocPoint) -> Result<SocPoint> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let x = p
        .x
        .iter()
        .zip(&q.x)
        .map(|(a, b)| FRAC_1_SQRT_2 * (q.t * a + p.t * b))
        .collect();
    let t = FRAC_1_SQRT_2 * (dot(&p.x, &q.x) + p.t * q.t);
    Ok(SocPoint { x, t })
}
