//! Short-time Fourier analysis: windowing, framing, power/dB spectrograms,
//! and frequency-band truncation.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

use super::fft::Radix2Fft;
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Power floor added before taking the logarithm, so silent frames map to a
/// finite floor instead of -inf.
pub const DB_FLOOR_EPS: f64 = 1e-12;

/// `10 * log10(DB_FLOOR_EPS)`: the dB value of a zero-power cell.
pub const DB_FLOOR: f64 = -120.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hann,
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowKind::Hann => write!(f, "hann"),
        }
    }
}

/// Periodic window of length `n`.
///
/// The periodic (DFT-even) variant is the right one for spectral analysis:
/// `w[m] = 0.5 * (1 - cos(2*pi*m/n))` for Hann.
pub fn make_window(kind: WindowKind, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("window length must be >= 1".into()));
    }
    match kind {
        WindowKind::Hann => Ok((0..n)
            .map(|m| 0.5 * (1.0 - (2.0 * PI * m as f64 / n as f64).cos()))
            .collect()),
    }
}

/// STFT analysis parameters: window length and kind, hop between frame
/// starts, and FFT length (>= window length, power of two).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftParams {
    pub window_len: usize,
    pub hop: usize,
    pub window_kind: WindowKind,
    pub fft_len: usize,
}

impl StftParams {
    /// Hann window with `fft_len = window_len` rounded up to a power of two
    /// (identity for power-of-two windows, i.e. no zero padding).
    pub fn hann(window_len: usize, hop: usize) -> Result<Self> {
        Self::new(
            window_len,
            hop,
            WindowKind::Hann,
            window_len.next_power_of_two(),
        )
    }

    pub fn new(
        window_len: usize,
        hop: usize,
        window_kind: WindowKind,
        fft_len: usize,
    ) -> Result<Self> {
        if window_len == 0 {
            return Err(Error::InvalidParameter("window length must be >= 1".into()));
        }
        if hop == 0 || hop > window_len {
            return Err(Error::InvalidParameter(format!(
                "hop must satisfy 0 < hop <= window length, got hop={hop}, window={window_len}"
            )));
        }
        if !fft_len.is_power_of_two() || fft_len < window_len {
            return Err(Error::InvalidParameter(format!(
                "fft_len must be a power of two >= window length, got fft_len={fft_len}, window={window_len}"
            )));
        }
        Ok(Self {
            window_len,
            hop,
            window_kind,
            fft_len,
        })
    }

    /// Number of fully interior frames for a signal of `len` samples, or
    /// `None` if the signal is shorter than one window.
    pub fn frame_count(&self, len: usize) -> Option<usize> {
        if len < self.window_len {
            None
        } else {
            Some((len - self.window_len) / self.hop + 1)
        }
    }

    /// Number of retained non-negative-frequency bins, `fft_len/2 + 1`.
    pub fn bin_count(&self) -> usize {
        self.fft_len / 2 + 1
    }

    /// Frequency spacing between bins in Hz.
    pub fn freq_resolution(&self, sample_rate_hz: f64) -> f64 {
        sample_rate_hz / self.fft_len as f64
    }

    /// Time spacing between frame centres in seconds.
    pub fn time_resolution(&self, sample_rate_hz: f64) -> f64 {
        self.hop as f64 / sample_rate_hz
    }
}

/// A dB-valued time-frequency matrix with explicit axes.
///
/// `values` has shape `(bins, frames)`: rows are frequencies (ascending,
/// `freq_axis`), columns are frame centres in seconds (`time_axis`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    values: Array2<f64>,
    freq_axis: Vec<f64>,
    time_axis: Vec<f64>,
    params: StftParams,
}

impl Spectrogram {
    /// Assemble a spectrogram from raw parts, validating the axis
    /// invariants. Mostly useful for tests and external data.
    pub fn new(
        values: Array2<f64>,
        freq_axis: Vec<f64>,
        time_axis: Vec<f64>,
        params: StftParams,
    ) -> Result<Self> {
        if values.nrows() != freq_axis.len() || values.ncols() != time_axis.len() {
            return Err(Error::ShapeMismatch(format!(
                "values {}x{} vs axes {}x{}",
                values.nrows(),
                values.ncols(),
                freq_axis.len(),
                time_axis.len()
            )));
        }
        for axis in [&freq_axis, &time_axis] {
            if axis.is_empty() || axis.windows(2).any(|p| !(p[0] < p[1])) {
                return Err(Error::InvalidParameter(
                    "spectrogram axes must be non-empty and strictly ascending".into(),
                ));
            }
        }
        Ok(Self::from_parts(values, freq_axis, time_axis, params))
    }

    pub(crate) fn from_parts(
        values: Array2<f64>,
        freq_axis: Vec<f64>,
        time_axis: Vec<f64>,
        params: StftParams,
    ) -> Self {
        debug_assert_eq!(values.nrows(), freq_axis.len());
        debug_assert_eq!(values.ncols(), time_axis.len());
        Self {
            values,
            freq_axis,
            time_axis,
            params,
        }
    }

    /// STFT, squared magnitude, dB: the whole linear-frequency pipeline.
    pub fn compute(signal: &AudioBuffer, params: &StftParams) -> Result<Self> {
        let frames = stft(signal, params)?;
        power_db(&frames, params, signal.sample_rate_hz())
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn freq_axis(&self) -> &[f64] {
        &self.freq_axis
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    pub fn params(&self) -> &StftParams {
        &self.params
    }

    pub fn n_bins(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_frames(&self) -> usize {
        self.values.ncols()
    }
}

/// Frame, window, and transform a signal.
///
/// Frames are fully interior: frame `t` covers samples
/// `[t*hop, t*hop + window_len)` and the count is
/// `(len - window_len) / hop + 1`. Each frame is multiplied by the window,
/// zero-padded to `fft_len`, transformed, and only the non-negative
/// frequency bins `0..=fft_len/2` are kept.
///
/// Returns a `(frames, bins)` matrix; row `t` is the spectrum of frame `t`.
pub fn stft(signal: &AudioBuffer, params: &StftParams) -> Result<Array2<Complex64>> {
    let samples = signal.samples();
    let n_frames = params
        .frame_count(samples.len())
        .ok_or(Error::SignalTooShort {
            needed: params.window_len,
            got: samples.len(),
            channel: None,
        })?;

    let window = make_window(params.window_kind, params.window_len)?;
    let plan = Radix2Fft::new(params.fft_len)?;
    let n_bins = params.bin_count();

    let mut out = Array2::zeros((n_frames, n_bins));
    let mut buf = vec![Complex64::new(0.0, 0.0); params.fft_len];
    for t in 0..n_frames {
        let start = t * params.hop;
        for (m, w) in window.iter().enumerate() {
            buf[m] = Complex64::new(samples[start + m] * w, 0.0);
        }
        for slot in buf.iter_mut().skip(params.window_len) {
            *slot = Complex64::new(0.0, 0.0);
        }
        plan.process(&mut buf);
        for (k, slot) in out.row_mut(t).iter_mut().enumerate() {
            *slot = buf[k];
        }
    }
    Ok(out)
}

/// Convert complex STFT frames to a dB power spectrogram.
///
/// `values[f][t] = 10 * log10(|X|^2 + 1e-12)`, so a zero-power cell sits at
/// exactly the -120 dB floor. The frequency axis is `f * sample_rate /
/// fft_len`; the time axis is the frame centre `(t*hop + window_len/2) /
/// sample_rate`.
pub fn power_db(
    frames: &Array2<Complex64>,
    params: &StftParams,
    sample_rate_hz: f64,
) -> Result<Spectrogram> {
    let (n_frames, n_bins) = frames.dim();
    if n_frames == 0 || n_bins == 0 {
        return Err(Error::InvalidParameter("empty frame matrix".into()));
    }
    if n_bins != params.bin_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} bins per frame, params imply {}",
            n_bins,
            params.bin_count()
        )));
    }

    let mut values = Array2::zeros((n_bins, n_frames));
    for t in 0..n_frames {
        for f in 0..n_bins {
            let power = frames[(t, f)].norm_sqr();
            values[(f, t)] = 10.0 * (power + DB_FLOOR_EPS).log10();
        }
    }

    let freq_axis = (0..n_bins)
        .map(|f| f as f64 * sample_rate_hz / params.fft_len as f64)
        .collect();
    let time_axis = (0..n_frames)
        .map(|t| ((t * params.hop) as f64 + params.window_len as f64 / 2.0) / sample_rate_hz)
        .collect();

    Ok(Spectrogram::from_parts(values, freq_axis, time_axis, *params))
}

/// Keep only the rows whose frequency lies in `[f_lo, f_hi]`, both ends
/// inclusive. Values are copied bit-exactly; no resampling happens here.
pub fn truncate_freq(spec: &Spectrogram, f_lo: f64, f_hi: f64) -> Result<Spectrogram> {
    if !(f_lo < f_hi) {
        return Err(Error::InvalidParameter(format!(
            "need f_lo < f_hi, got [{f_lo}, {f_hi}]"
        )));
    }
    let keep: Vec<usize> = spec
        .freq_axis
        .iter()
        .enumerate()
        .filter(|(_, &f)| f_lo <= f && f <= f_hi)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyBand { f_lo, f_hi });
    }

    let mut values = Array2::zeros((keep.len(), spec.n_frames()));
    for (row, &src) in keep.iter().enumerate() {
        values.row_mut(row).assign(&spec.values.row(src));
    }
    let freq_axis = keep.iter().map(|&i| spec.freq_axis[i]).collect();

    Ok(Spectrogram::from_parts(
        values,
        freq_axis,
        spec.time_axis.clone(),
        spec.params,
    ))
}
