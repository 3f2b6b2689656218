//! Interpolation of spectrograms onto a common grid and channel stacking.
//!
//! Each STFT parameter set trades time resolution against frequency
//! resolution. Computing one spectrogram per parameter set, resampling all
//! of them onto one time-frequency grid with a linear interpolation spline,
//! and stacking the results as channels yields a single tensor that keeps
//! the fine-time view and the fine-frequency view side by side.

use ndarray::{Array2, Array3, ArrayView2};

use crate::audio::AudioBuffer;
use crate::dsp::{self, Spectrogram, StftParams};
use crate::error::{Error, Result};

/// How the common grid is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSpec {
    /// Fixed number of grid points per axis, endpoints inclusive.
    Explicit { height: usize, width: usize },
    /// Grid spacing taken from the finest per-channel resolutions, the
    /// running-minimum rule.
    FromMinResolution,
}

/// Parameters for one stacked representation: the per-channel STFT
/// parameter list (channel order is tensor order), the frequency band the
/// spectrograms are truncated to, and the grid sizing rule.
#[derive(Debug, Clone, PartialEq)]
pub struct StackParams {
    pub channel_params: Vec<StftParams>,
    pub band: (f64, f64),
    pub grid: GridSpec,
}

impl StackParams {
    pub fn new(channel_params: Vec<StftParams>, band: (f64, f64), grid: GridSpec) -> Result<Self> {
        if channel_params.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one channel".into(),
            ));
        }
        if !(band.0 < band.1) {
            return Err(Error::InvalidParameter(format!(
                "need band.0 < band.1, got [{}, {}]",
                band.0, band.1
            )));
        }
        if let GridSpec::Explicit { height, width } = grid {
            if height < 2 || width < 2 {
                return Err(Error::InvalidParameter(format!(
                    "explicit grid must be at least 2x2, got {height}x{width}"
                )));
            }
        }
        Ok(Self {
            channel_params,
            band,
            grid,
        })
    }

    /// The standard three-channel configuration: Hann windows of 256, 2048,
    /// and 16384 samples, hop = window/4, band 10-1000 Hz, 256x128 grid.
    pub fn three_channel_default() -> Self {
        let channels = [256usize, 2048, 16384]
            .iter()
            .map(|&w| StftParams::hann(w, w / 4).expect("static params are valid"))
            .collect();
        Self {
            channel_params: channels,
            band: (10.0, 1000.0),
            grid: GridSpec::Explicit {
                height: 256,
                width: 128,
            },
        }
    }

    pub fn n_channels(&self) -> usize {
        self.channel_params.len()
    }
}

/// A stack of interpolated spectrograms on a shared grid.
///
/// `values` has shape `(channels, grid height, grid width)`; every channel
/// shares `grid_freq_axis` (rows, Hz) and `grid_time_axis` (columns, s).
#[derive(Debug, Clone, PartialEq)]
pub struct StackedTensor {
    values: Array3<f64>,
    grid_freq_axis: Vec<f64>,
    grid_time_axis: Vec<f64>,
    channel_meta: Vec<StftParams>,
}

impl StackedTensor {
    pub fn from_parts(
        values: Array3<f64>,
        grid_freq_axis: Vec<f64>,
        grid_time_axis: Vec<f64>,
        channel_meta: Vec<StftParams>,
    ) -> Result<Self> {
        let (_, h, w) = values.dim();
        if grid_freq_axis.len() != h || grid_time_axis.len() != w {
            return Err(Error::ShapeMismatch(format!(
                "axes ({}, {}) do not match tensor ({h}, {w})",
                grid_freq_axis.len(),
                grid_time_axis.len()
            )));
        }
        Ok(Self {
            values,
            grid_freq_axis,
            grid_time_axis,
            channel_meta,
        })
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    /// `(channels, height, width)`
    pub fn shape(&self) -> (usize, usize, usize) {
        self.values.dim()
    }

    pub fn channel(&self, i: usize) -> ArrayView2<'_, f64> {
        self.values.index_axis(ndarray::Axis(0), i)
    }

    pub fn grid_freq_axis(&self) -> &[f64] {
        &self.grid_freq_axis
    }

    pub fn grid_time_axis(&self) -> &[f64] {
        &self.grid_time_axis
    }

    /// STFT parameters per channel. Empty on tensors read back from disk,
    /// which store only the grid and the values.
    pub fn channel_meta(&self) -> &[StftParams] {
        &self.channel_meta
    }
}

/// Index of the left knot and the fractional position of `x` inside
/// `[axis[i], axis[i+1]]`. Outside the axis range the nearest end point is
/// used with weight 0 or 1, giving constant extrapolation.
fn locate(axis: &[f64], x: f64) -> (usize, f64) {
    let n = axis.len();
    if x <= axis[0] {
        return (0, 0.0);
    }
    if x >= axis[n - 1] {
        return (n - 2, 1.0);
    }
    // partition_point: first index whose knot exceeds x.
    let hi = axis.partition_point(|&a| a <= x);
    let i = hi - 1;
    let u = (x - axis[i]) / (axis[i + 1] - axis[i]);
    (i, u)
}

fn check_ascending(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} axis is empty")));
    }
    if axis.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidParameter(format!(
            "{name} axis must be strictly ascending"
        )));
    }
    Ok(())
}

/// Resample a spectrogram onto the given target axes by separable linear
/// interpolation: the spline is applied along time, then along frequency.
/// Target points outside the source range take the nearest source value.
///
/// Each output cell is clamped to the range of its four source corners, so
/// interpolation can never overshoot the source values.
pub fn interpolate_to_grid(
    spec: &Spectrogram,
    target_freq_axis: &[f64],
    target_time_axis: &[f64],
) -> Result<Array2<f64>> {
    if spec.n_bins() < 2 || spec.n_frames() < 2 {
        return Err(Error::DegenerateSource(format!(
            "need at least 2x2 source cells to interpolate, got {}x{}",
            spec.n_bins(),
            spec.n_frames()
        )));
    }
    check_ascending("target frequency", target_freq_axis)?;
    check_ascending("target time", target_time_axis)?;

    let freq_pos: Vec<(usize, f64)> = target_freq_axis
        .iter()
        .map(|&f| locate(spec.freq_axis(), f))
        .collect();
    let time_pos: Vec<(usize, f64)> = target_time_axis
        .iter()
        .map(|&t| locate(spec.time_axis(), t))
        .collect();

    let src = spec.values();
    let mut out = Array2::zeros((target_freq_axis.len(), target_time_axis.len()));
    for (r, &(fi, uf)) in freq_pos.iter().enumerate() {
        for (c, &(ti, ut)) in time_pos.iter().enumerate() {
            let v00 = src[(fi, ti)];
            let v01 = src[(fi, ti + 1)];
            let v10 = src[(fi + 1, ti)];
            let v11 = src[(fi + 1, ti + 1)];
            // Along time within each row, then along frequency.
            let lo_row = v00 + ut * (v01 - v00);
            let hi_row = v10 + ut * (v11 - v10);
            let val = lo_row + uf * (hi_row - lo_row);
            let min = v00.min(v01).min(v10).min(v11);
            let max = v00.max(v01).max(v10).max(v11);
            out[(r, c)] = val.clamp(min, max);
        }
    }
    Ok(out)
}

/// Finest (smallest) bin spacing and frame spacing across the given
/// spectrograms, the running-minimum rule. A channel with fewer than two
/// bins or frames does not constrain that dimension, so the corresponding
/// component stays at infinity if no channel defines it.
pub fn min_resolutions(specs: &[Spectrogram]) -> Result<(f64, f64)> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("no spectrograms given".into()));
    }
    let mut df_min = f64::INFINITY;
    let mut dt_min = f64::INFINITY;
    for spec in specs {
        if spec.freq_axis().len() >= 2 {
            df_min = df_min.min(spec.freq_axis()[1] - spec.freq_axis()[0]);
        }
        if spec.time_axis().len() >= 2 {
            dt_min = dt_min.min(spec.time_axis()[1] - spec.time_axis()[0]);
        }
    }
    Ok((df_min, dt_min))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    debug_assert!(n >= 2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut axis: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    axis[n - 1] = hi; // endpoints inclusive, no rounding drift
    axis
}

fn spaced(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::DegenerateSource(format!(
            "grid spacing {step} is unusable; no channel defines this resolution"
        )));
    }
    // Tolerate rounding at the far end so `hi` itself is kept when the span
    // is an exact multiple of the step.
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count < 2 {
        return Err(Error::DegenerateSource(format!(
            "band [{lo}, {hi}] holds fewer than two grid points at spacing {step}"
        )));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Compute one spectrogram per channel, truncate each to the band, build
/// the common grid, interpolate every channel onto it, and stack the
/// results in channel order.
///
/// The grid spans the band in frequency and, in time, the intersection of
/// the channels' frame-centre ranges (latest first centre to earliest last
/// centre), so no channel extrapolates in time.
pub fn stack_representation(signal: &AudioBuffer, params: &StackParams) -> Result<StackedTensor> {
    if params.channel_params.is_empty() {
        return Err(Error::InvalidParameter("need at least one channel".into()));
    }
    let (f_lo, f_hi) = params.band;

    let mut channels = Vec::with_capacity(params.channel_params.len());
    for (i, stft_params) in params.channel_params.iter().enumerate() {
        let spec = Spectrogram::compute(signal, stft_params).map_err(|e| match e {
            Error::SignalTooShort { needed, got, .. } => Error::SignalTooShort {
                needed,
                got,
                channel: Some(i),
            },
            other => other,
        })?;
        channels.push(dsp::truncate_freq(&spec, f_lo, f_hi)?);
    }

    let t_lo = channels
        .iter()
        .map(|s| s.time_axis()[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let t_hi = channels
        .iter()
        .map(|s| *s.time_axis().last().expect("non-empty"))
        .fold(f64::INFINITY, f64::min);
    if !(t_lo < t_hi) {
        return Err(Error::DegenerateSource(format!(
            "channel time ranges do not overlap (intersection [{t_lo}, {t_hi}])"
        )));
    }

    let (grid_freq, grid_time) = match params.grid {
        GridSpec::Explicit { height, width } => {
            if height < 2 || width < 2 {
                return Err(Error::InvalidParameter(format!(
                    "explicit grid must be at least 2x2, got {height}x{width}"
                )));
            }
            (linspace(f_lo, f_hi, height), linspace(t_lo, t_hi, width))
        }
        GridSpec::FromMinResolution => {
            let (df, dt) = min_resolutions(&channels)?;
            (spaced(f_lo, f_hi, df)?, spaced(t_lo, t_hi, dt)?)
        }
    };

    let (h, w) = (grid_freq.len(), grid_time.len());
    let mut values = Array3::zeros((channels.len(), h, w));
    for (i, spec) in channels.iter().enumerate() {
        let plane = interpolate_to_grid(spec, &grid_freq, &grid_time)?;
        values
            .index_axis_mut(ndarray::Axis(0), i)
            .assign(&plane);
    }

    StackedTensor::from_parts(values, grid_freq, grid_time, params.channel_params.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sine(freq: f64, sample_rate: f64, n: usize) -> AudioBuffer {
        let samples = (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / sample_rate).sin())
            .collect();
        AudioBuffer::new(samples, sample_rate).unwrap()
    }

    fn toy_spectrogram(values: Array2<f64>, freq_axis: Vec<f64>, time_axis: Vec<f64>) -> Spectrogram {
        let params = StftParams::hann(4, 1).unwrap();
        Spectrogram::from_parts(values, freq_axis, time_axis, params)
    }

    #[test]
    fn identity_grid_is_bit_exact() {
        let signal = sine(200.0, 8000.0, 16_000);
        let spec = Spectrogram::compute(&signal, &StftParams::hann(256, 64).unwrap()).unwrap();
        let out =
            interpolate_to_grid(&spec, &spec.freq_axis().to_vec(), &spec.time_axis().to_vec())
                .unwrap();
        assert_eq!(&out, spec.values());
    }

    #[test]
    fn midpoint_of_two_by_two() {
        let values = Array2::from_shape_vec((2, 2), vec![0.0, 0.0, 10.0, 10.0]).unwrap();
        let spec = toy_spectrogram(values, vec![100.0, 200.0], vec![0.0, 1.0]);
        let out = interpolate_to_grid(&spec, &[150.0], &[0.5]).unwrap();
        assert_eq!(out[(0, 0)], 5.0);
    }

    #[test]
    fn matches_per_point_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let (rows, cols) = (7, 9);
            let mut freq: Vec<f64> = (0..rows)
                .map(|_| rng.random_range(0.0..1000.0))
                .collect();
            freq.sort_by(f64::total_cmp);
            freq.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let mut time: Vec<f64> = (0..cols).map(|_| rng.random_range(0.0..10.0)).collect();
            time.sort_by(f64::total_cmp);
            time.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let (rows, cols) = (freq.len(), time.len());
            if rows < 2 || cols < 2 {
                continue;
            }
            let values = Array2::from_shape_fn((rows, cols), |_| rng.random_range(-120.0..20.0));
            let spec = toy_spectrogram(values.clone(), freq.clone(), time.clone());

            let tf: Vec<f64> = {
                let mut v: Vec<f64> = (0..11).map(|_| rng.random_range(-50.0..1050.0)).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            };
            let tt: Vec<f64> = {
                let mut v: Vec<f64> = (0..13).map(|_| rng.random_range(-1.0..11.0)).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            };
            let out = interpolate_to_grid(&spec, &tf, &tt).unwrap();
            for (r, &f) in tf.iter().enumerate() {
                for (c, &t) in tt.iter().enumerate() {
                    let expect = oracle::bilinear_at(&values, &freq, &time, f, t);
                    assert!(
                        (out[(r, c)] - expect).abs() <= 1e-9,
                        "({f}, {t}): {} vs {expect}",
                        out[(r, c)]
                    );
                }
            }
        }
    }

    #[test]
    fn out_of_range_targets_clamp_to_edges() {
        let values = Array2::from_shape_vec((2, 2), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let spec = toy_spectrogram(values, vec![100.0, 200.0], vec![0.0, 1.0]);
        let out = interpolate_to_grid(&spec, &[0.0, 300.0], &[-5.0, 5.0]).unwrap();
        assert_eq!(out[(0, 0)], 1.0);
        assert_eq!(out[(0, 1)], 2.0);
        assert_eq!(out[(1, 0)], 3.0);
        assert_eq!(out[(1, 1)], 4.0);
    }

    #[test]
    fn degenerate_source_is_an_error() {
        let values = Array2::from_shape_vec((1, 2), vec![1.0, 2.0]).unwrap();
        let spec = toy_spectrogram(values, vec![100.0], vec![0.0, 1.0]);
        match interpolate_to_grid(&spec, &[100.0], &[0.5]) {
            Err(Error::DegenerateSource(_)) => {}
            other => panic!("expected DegenerateSource, got {other:?}"),
        }
    }

    #[test]
    fn non_ascending_target_rejected() {
        let values = Array2::from_shape_vec((2, 2), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let spec = toy_spectrogram(values, vec![100.0, 200.0], vec![0.0, 1.0]);
        assert!(interpolate_to_grid(&spec, &[200.0, 100.0], &[0.0, 1.0]).is_err());
        assert!(interpolate_to_grid(&spec, &[100.0, 100.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn min_resolutions_standard_windows() {
        let signal = sine(100.0, 8000.0, 80_000);
        let specs: Vec<Spectrogram> = [256usize, 2048, 16384]
            .iter()
            .map(|&w| {
                Spectrogram::compute(&signal, &StftParams::hann(w, w / 4).unwrap()).unwrap()
            })
            .collect();
        let (df, dt) = min_resolutions(&specs).unwrap();
        assert_relative_eq!(df, 8000.0 / 16384.0, epsilon = 1e-12);
        assert_relative_eq!(dt, 64.0 / 8000.0, epsilon = 1e-12);
    }

    #[test]
    fn min_resolutions_singleton() {
        let signal = sine(100.0, 8000.0, 80_000);
        let spec = Spectrogram::compute(&signal, &StftParams::hann(2048, 512).unwrap()).unwrap();
        let (df, dt) = min_resolutions(std::slice::from_ref(&spec)).unwrap();
        assert_relative_eq!(df, 8000.0 / 2048.0, epsilon = 1e-12);
        assert_relative_eq!(dt, 512.0 / 8000.0, epsilon = 1e-12);
    }

    #[test]
    fn standard_stack_shape() {
        let signal = sine(500.0, 8000.0, 80_000);
        let tensor = stack_representation(&signal, &StackParams::three_channel_default()).unwrap();
        assert_eq!(tensor.shape(), (3, 256, 128));
        assert_eq!(tensor.grid_freq_axis()[0], 10.0);
        assert_eq!(*tensor.grid_freq_axis().last().unwrap(), 1000.0);
        assert!(tensor.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn single_channel_native_grid_reproduces_spectrogram() {
        // Steady tone so neighbouring cells differ smoothly; the grid the
        // stack builds for this configuration coincides with the channel's
        // own axes up to float rounding.
        let signal = sine(500.0, 8000.0, 80_000);
        let stft_params = StftParams::hann(256, 64).unwrap();
        let spec = Spectrogram::compute(&signal, &stft_params).unwrap();
        let native = dsp::truncate_freq(&spec, 10.0, 1000.0).unwrap();

        let params = StackParams::new(
            vec![stft_params],
            (native.freq_axis()[0], *native.freq_axis().last().unwrap()),
            GridSpec::Explicit {
                height: native.n_bins(),
                width: native.n_frames(),
            },
        )
        .unwrap();
        let tensor = stack_representation(&signal, &params).unwrap();
        assert_eq!(tensor.shape(), (1, native.n_bins(), native.n_frames()));
        for (a, b) in tensor.channel(0).iter().zip(native.values().iter()) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn min_resolution_grid_spacing_matches() {
        let signal = sine(300.0, 8000.0, 80_000);
        let mut params = StackParams::three_channel_default();
        params.grid = GridSpec::FromMinResolution;
        let tensor = stack_representation(&signal, &params).unwrap();

        let specs: Vec<Spectrogram> = params
            .channel_params
            .iter()
            .map(|p| {
                let s = Spectrogram::compute(&signal, p).unwrap();
                dsp::truncate_freq(&s, 10.0, 1000.0).unwrap()
            })
            .collect();
        let (df, dt) = min_resolutions(&specs).unwrap();
        assert_relative_eq!(
            tensor.grid_freq_axis()[1] - tensor.grid_freq_axis()[0],
            df,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            tensor.grid_time_axis()[1] - tensor.grid_time_axis()[0],
            dt,
            epsilon = 1e-12
        );
    }

    #[test]
    fn channel_order_follows_params_order() {
        let signal = sine(120.0, 8000.0, 80_000);
        let forward = StackParams::three_channel_default();
        let mut reversed = forward.clone();
        reversed.channel_params.reverse();

        let a = stack_representation(&signal, &forward).unwrap();
        let b = stack_representation(&signal, &reversed).unwrap();
        for i in 0..3 {
            assert_eq!(a.channel(i), b.channel(2 - i));
        }
    }

    #[test]
    fn values_stay_within_source_range() {
        let signal = sine(80.0, 8000.0, 80_000);
        let params = StackParams::three_channel_default();
        let tensor = stack_representation(&signal, &params).unwrap();
        for (i, stft_params) in params.channel_params.iter().enumerate() {
            let spec = Spectrogram::compute(&signal, stft_params).unwrap();
            let spec = dsp::truncate_freq(&spec, 10.0, 1000.0).unwrap();
            let lo = spec.values().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = spec
                .values()
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            for &v in tensor.channel(i) {
                assert!(v >= lo && v <= hi, "channel {i}: {v} outside [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn pure_tone_peak_lands_on_grid_frequency() {
        // 500 Hz is an exact bin for all three windows at 8 kHz.
        let signal = sine(500.0, 8000.0, 80_000);
        let tensor = stack_representation(&signal, &StackParams::three_channel_default()).unwrap();
        let cell = tensor.grid_freq_axis()[1] - tensor.grid_freq_axis()[0];
        let (k, _, w) = tensor.shape();
        for ch in 0..k {
            let plane = tensor.channel(ch);
            for col in 0..w {
                let argmax = plane
                    .column(col)
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap()
                    .0;
                let f = tensor.grid_freq_axis()[argmax];
                assert!(
                    (f - 500.0).abs() <= cell + 1e-9,
                    "channel {ch} column {col}: peak at {f} Hz"
                );
            }
        }
    }

    #[test]
    fn too_short_signal_names_the_channel() {
        // Long enough for the 256 and 2048 windows, not for 16384.
        let signal = sine(100.0, 8000.0, 10_000);
        match stack_representation(&signal, &StackParams::three_channel_default()) {
            Err(Error::SignalTooShort { channel, .. }) => assert_eq!(channel, Some(2)),
            other => panic!("expected SignalTooShort, got {other:?}"),
        }
    }

    #[test]
    fn stacking_is_deterministic() {
        let signal = sine(250.0, 8000.0, 80_000);
        let params = StackParams::three_channel_default();
        let a = stack_representation(&signal, &params).unwrap();
        let b = stack_representation(&signal, &params).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.grid_freq_axis(), b.grid_freq_axis());
        assert_eq!(a.grid_time_axis(), b.grid_time_axis());
    }
}
