//! Sampled mono waveforms.

use crate::error::{Error, Result};

/// A mono waveform with its sample rate. Amplitudes are dimensionless,
/// nominally in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl AudioBuffer {
    /// Build a buffer, rejecting empty sample vectors and non-positive rates.
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("audio buffer is empty".into()));
        }
        if !(sample_rate_hz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Slice out `[start_s, start_s + len_s)` as a new buffer. The interval
    /// is clamped to the recording; sub-sample boundaries round down.
    pub fn segment(&self, start_s: f64, len_s: f64) -> Result<Self> {
        if start_s < 0.0 || len_s <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bad segment [{start_s}, {start_s} + {len_s}]"
            )));
        }
        let start = (start_s * self.sample_rate_hz) as usize;
        let n = (len_s * self.sample_rate_hz) as usize;
        let start = start.min(self.samples.len());
        let end = (start + n).min(self.samples.len());
        Self::new(self.samples[start..end].to_vec(), self.sample_rate_hz)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}
