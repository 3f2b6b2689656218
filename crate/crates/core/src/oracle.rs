//! Brute-force reference implementations for the test suites.
//!
//! Everything in here trades speed for obviousness: quadratic DFTs and
//! per-point interpolation evaluated straight from the defining formulas.
//! The unit, property, and acceptance tests compare the fast paths against
//! these. Nothing here is meant for production use, and nothing here may
//! call into the implementations it is used to check.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Quadratic forward DFT: `X[k] = sum_m x[m] * exp(-j*2*pi*k*m/N)`.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, xm) in x.iter().enumerate() {
                let phase = -2.0 * PI * (k * m) as f64 / n as f64;
                acc += xm * Complex64::new(phase.cos(), phase.sin());
            }
            acc
        })
        .collect()
}

/// Quadratic inverse DFT with 1/N normalization.
pub fn naive_inverse_dft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, sk) in spectrum.iter().enumerate() {
                let phase = 2.0 * PI * (k * m) as f64 / n as f64;
                acc += sk * Complex64::new(phase.cos(), phase.sin());
            }
            acc / n as f64
        })
        .collect()
}

/// One-dimensional linear interpolation spline, evaluated directly:
/// for `x` between knots `(xs[i], ys[i])` and `(xs[i+1], ys[i+1])`,
/// `y = ys[i] + (ys[i+1] - ys[i]) / (xs[i+1] - xs[i]) * (x - xs[i])`.
/// Outside the knot range the nearest end value is returned.
pub fn lerp_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let mut i = 0;
    while !(xs[i] <= x && x <= xs[i + 1]) {
        i += 1;
    }
    ys[i] + (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) * (x - xs[i])
}

/// Separable bilinear resampling of a `rows x cols` matrix (row axis =
/// `row_coords`, column axis = `col_coords`) onto the target axes, one
/// output cell at a time: interpolate along columns first, then rows.
pub fn bilinear_at(
    values: &ndarray::Array2<f64>,
    row_coords: &[f64],
    col_coords: &[f64],
    target_row: f64,
    target_col: f64,
) -> f64 {
    let per_row: Vec<f64> = values
        .rows()
        .into_iter()
        .map(|row| lerp_at(col_coords, row.as_slice().unwrap(), target_col))
        .collect();
    lerp_at(row_coords, &per_row, target_row)
}
