//! Per-block spectral machinery: second-order cones, symmetric matrices and
//! rectangular matrices under singular values.

pub mod rect;
pub mod soc;
pub mod sym;

use crate::error::{Error, Result};

/// Ordering violations up to this size (relative to `max(1, |mu|_inf)`) are
/// treated as rounding noise and clamped away.
pub const SPECTRUM_REPAIR_TOL: f64 = 1e-12;

fn repair_scale(values: &[f64]) -> f64 {
    SPECTRUM_REPAIR_TOL * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Checks that `values` is nonincreasing, clamping tiny violations in place.
pub(crate) fn repair_nonincreasing(values: &mut [f64]) -> Result<()> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidSpectrum(format!("non-finite entry {bad}")));
    }
    let tol = repair_scale(values);
    for i in 1..values.len() {
        let excess = values[i] - values[i - 1];
        if excess > tol {
            return Err(Error::InvalidSpectrum(format!(
                "entry {i} ({}) exceeds its predecessor ({})",
                values[i],
                values[i - 1]
            )));
        }
        if excess > 0.0 {
            values[i] = values[i - 1];
        }
    }
    Ok(())
}

/// Checks that `values` is nonnegative, clamping tiny negatives to zero.
pub(crate) fn repair_nonnegative(values: &mut [f64]) -> Result<()> {
    let tol = repair_scale(values);
    for (i, v) in values.iter_mut().enumerate() {
        if *v < -tol {
            return Err(Error::InvalidSpectrum(format!(
                "entry {i} ({v}) is negative"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_clamps_noise_and_rejects_real_violations() {
        let mut v = vec![3.0, 1.0, 1.0 + 1e-14, 0.5];
        repair_nonincreasing(&mut v).unwrap();
        assert_eq!(v, vec![3.0, 1.0, 1.0, 0.5]);

        let mut bad = vec![1.0, 2.0];
        assert!(matches!(
            repair_nonincreasing(&mut bad),
            Err(Error::InvalidSpectrum(_))
        ));

        let mut neg = vec![1.0, -1e-15];
        repair_nonnegative(&mut neg).unwrap();
        assert_eq!(neg, vec![1.0, 0.0]);
        assert!(repair_nonnegative(&mut [1.0, -0.1]).is_err());
        assert!(repair_nonincreasing(&mut [f64::NAN]).is_err());
    }
}
