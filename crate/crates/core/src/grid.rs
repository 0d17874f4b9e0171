//! Uniform quadrature grid on [0, 1] and the composite trapezoid rule.
//!
//! All densities in this crate live on the unit interval and are integrated
//! on an inclusive uniform grid, so both endpoints are sampled; a step of
//! 1e-4 yields 10_001 points.

use crate::error::{Error, Result};

/// Largest admissible grid step. Coarser grids under-resolve the exponent
/// oscillations of high-order fits.
pub const MAX_GRID_STEP: f64 = 0.01;

/// Default grid spacing used throughout the crate.
pub const DEFAULT_GRID_STEP: f64 = 1e-4;

/// Validate a grid step and return the number of intervals it induces.
pub fn intervals_for_step(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= MAX_GRID_STEP) {
        return Err(Error::arg(format!(
            "grid step must lie in (0, {MAX_GRID_STEP}], got {step}"
        )));
    }
    Ok((1.0 / step).round() as usize)
}

/// Inclusive grid 0 = λ₀ < λ₁ < … < λ_N = 1 with N = round(1/step).
///
/// Points are computed as i/N so that both endpoints are exact.
pub fn grid_points(step: f64) -> Result<Vec<f64>> {
    let n = intervals_for_step(step)?;
    let denom = n as f64;
    Ok((0..=n).map(|i| i as f64 / denom).collect())
}

/// Composite trapezoid rule over an inclusive uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    debug_assert!(values.len() >= 2);
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    step * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Trapezoid rule for an arbitrary (still uniform) grid described by its
/// spacing, applied to `f` evaluated lazily.
pub fn trapezoid_fn(points: &[f64], step: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    debug_assert!(points.len() >= 2);
    let mut acc = 0.5 * (f(points[0]) + f(points[points.len() - 1]));
    for &x in &points[1..points.len() - 1] {
        acc += f(x);
    }
    acc * step
}
