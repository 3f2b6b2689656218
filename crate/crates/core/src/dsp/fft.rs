//! Radix-2 decimation-in-time FFT.
//!
//! Sizes are restricted to powers of two; anything else is rejected rather
//! than silently padded. The forward transform computes
//! `X[k] = sum_m x[m] * exp(-j*2*pi*k*m/N)` with no normalization.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Precomputed twiddle factors for one transform size.
///
/// Worth keeping around when transforming many frames of the same length,
/// which is exactly what the STFT does.
#[derive(Debug, Clone)]
pub struct Radix2Fft {
    n: usize,
    /// `exp(-j*2*pi*k/n)` for `k in 0..n/2`.
    twiddles: Vec<Complex64>,
}

impl Radix2Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "FFT length must be a power of two, got {n}"
            )));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let phase = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        Ok(Self { n, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place transform. Panics if `buf.len()` differs from the planned size.
    pub fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length mismatch");
        let n = self.n;
        if n == 1 {
            return;
        }

        // Bit-reversal permutation.
        let shift = n.leading_zeros() + 1;
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if j > i {
                buf.swap(i, j);
            }
        }

        // Butterflies, doubling the sub-transform length each stage.
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len *= 2;
        }
    }
}

/// One-shot forward FFT of a power-of-two-length buffer.
pub fn fft(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = Radix2Fft::new(input.len())?;
    let mut buf = input.to_vec();
    plan.process(&mut buf);
    Ok(buf)
}
