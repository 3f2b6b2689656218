//! Binary PPM (P6) rendering for quick visual inspection of spectrogram
//! channels and confusion matrices.

use ndarray::ArrayView2;

use crate::metrics::ConfusionMatrix;

/// Render a matrix as a grayscale P6 pixmap, min-max scaled to 0..255.
/// Row 0 of the matrix (the lowest frequency) lands at the bottom of the
/// image. A constant matrix renders as all-zero pixels.
pub fn matrix_to_ppm(values: ArrayView2<'_, f64>) -> Vec<u8> {
    let (rows, cols) = values.dim();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;

    let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    for r in (0..rows).rev() {
        for c in 0..cols {
            let level = if span > 0.0 {
                ((values[(r, c)] - lo) / span * 255.0).round() as u8
            } else {
                0
            };
            out.extend_from_slice(&[level, level, level]);
        }
    }
    out
}

/// Render a row-normalized confusion matrix as a block image, `cell` pixels
/// per class cell.
pub fn confusion_to_ppm(cm: &ConfusionMatrix, cell: usize) -> Vec<u8> {
    let normalized = cm.row_normalized();
    let n = cm.classes().len();
    let side = n * cell;
    let mut out = format!("P6\n{side} {side}\n255\n").into_bytes();
    for r in 0..side {
        for c in 0..side {
            let v = normalized[(r / cell, c / cell)];
            let level = (v * 255.0).round() as u8;
            out.extend_from_slice(&[level, level, level]);
        }
    }
    out
}
