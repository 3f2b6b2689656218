//! Hertz/mel conversion and mel-scaled spectrograms.
//!
//! The mel scale compresses frequency the way pitch perception does:
//! `mel = 2595 * log10(1 + hz/700)`. A mel spectrogram here is the linear
//! power spectrogram pushed through a bank of triangular filters whose
//! centre frequencies are equally spaced in mels, then converted to dB.

use ndarray::Array2;

use crate::audio::AudioBuffer;
use crate::dsp::{self, Spectrogram, StftParams, DB_FLOOR_EPS};
use crate::error::{Error, Result};

/// Convert hertz to mels.
pub fn hz_to_mel(f: f64) -> Result<f64> {
    if !(f >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency must be non-negative, got {f}"
        )));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

/// Convert mels to hertz (exact algebraic inverse of [`hz_to_mel`]).
pub fn mel_to_hz(m: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mel value must be non-negative, got {m}"
        )));
    }
    Ok(700.0 * (10f64.powf(m / 2595.0) - 1.0))
}

/// Mel filterbank configuration: band count and frequency limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelParams {
    pub n_mels: usize,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl MelParams {
    pub fn new(n_mels: usize, f_lo: f64, f_hi: f64) -> Result<Self> {
        if n_mels < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 mel bands, got {n_mels}"
            )));
        }
        if !(0.0 <= f_lo && f_lo < f_hi) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= f_lo < f_hi, got [{f_lo}, {f_hi}]"
            )));
        }
        Ok(Self { n_mels, f_lo, f_hi })
    }

    /// The `n_mels + 2` filter edge frequencies in Hz, equally spaced on the
    /// mel scale over `[f_lo, f_hi]`. Edges `1..=n_mels` are the filter
    /// centres.
    pub fn edge_freqs_hz(&self) -> Vec<f64> {
        let mel_lo = hz_to_mel(self.f_lo).expect("validated non-negative");
        let mel_hi = hz_to_mel(self.f_hi).expect("validated non-negative");
        let step = (mel_hi - mel_lo) / (self.n_mels + 1) as f64;
        (0..self.n_mels + 2)
            .map(|i| mel_to_hz(mel_lo + i as f64 * step).expect("non-negative by construction"))
            .collect()
    }
}

/// Triangular filter weights, one row per mel band, one column per linear
/// FFT bin. Each filter rises linearly from its left edge to a unit peak at
/// its centre and falls to zero at its right edge; no area normalization.
pub(crate) fn mel_filterbank(params: &MelParams, bin_freqs_hz: &[f64]) -> Array2<f64> {
    let edges = params.edge_freqs_hz();
    let mut weights = Array2::zeros((params.n_mels, bin_freqs_hz.len()));
    for m in 0..params.n_mels {
        let (left, centre, right) = (edges[m], edges[m + 1], edges[m + 2]);
        for (k, &f) in bin_freqs_hz.iter().enumerate() {
            let w = if f >= left && f <= centre && centre > left {
                (f - left) / (centre - left)
            } else if f > centre && f <= right && right > centre {
                (right - f) / (right - centre)
            } else {
                0.0
            };
            weights[(m, k)] = w;
        }
    }
    weights
}

/// Mel-scaled dB spectrogram.
///
/// The linear-frequency *power* spectrogram (squared magnitudes, before any
/// log) is multiplied by the filterbank, then converted to dB with the same
/// floor as the linear pipeline. The returned frequency axis carries the
/// filter centre frequencies in Hz.
pub fn mel_spectrogram(
    signal: &AudioBuffer,
    stft_params: &StftParams,
    mel_params: &MelParams,
) -> Result<Spectrogram> {
    let nyquist = signal.sample_rate_hz() / 2.0;
    if mel_params.f_hi > nyquist {
        return Err(Error::InvalidParameter(format!(
            "mel band upper edge {} Hz exceeds Nyquist {} Hz",
            mel_params.f_hi, nyquist
        )));
    }

    let frames = dsp::stft(signal, stft_params)?;
    let (n_frames, n_bins) = frames.dim();
    let bin_freqs: Vec<f64> = (0..n_bins)
        .map(|k| k as f64 * signal.sample_rate_hz() / stft_params.fft_len as f64)
        .collect();
    let filterbank = mel_filterbank(mel_params, &bin_freqs);

    let mut values = Array2::zeros((mel_params.n_mels, n_frames));
    for t in 0..n_frames {
        for m in 0..mel_params.n_mels {
            let mut acc = 0.0;
            for k in 0..n_bins {
                let w = filterbank[(m, k)];
                if w > 0.0 {
                    acc += w * frames[(t, k)].norm_sqr();
                }
            }
            values[(m, t)] = 10.0 * (acc + DB_FLOOR_EPS).log10();
        }
    }

    let edges = mel_params.edge_freqs_hz();
    let freq_axis = edges[1..=mel_params.n_mels].to_vec();
    let time_axis = (0..n_frames)
        .map(|t| {
            ((t * stft_params.hop) as f64 + stft_params.window_len as f64 / 2.0)
                / signal.sample_rate_hz()
        })
        .collect();

    Ok(Spectrogram::from_parts(
        values,
        freq_axis,
        time_axis,
        *stft_params,
    ))
}
