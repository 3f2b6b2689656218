//! Synthetic corpus generation.
//!
//! Produces desk-scale labelled recordings with vocalization-like events in
//! the five standard classes: long low moans, short downsweeps, steeper
//! downsweeps, persistent ship-like tonal noise, and ambient-only files.
//! The shapes mimic the qualitative structure of real low-frequency calls;
//! no claim of bioacoustic fidelity is made.
//!
//! Event level is calibrated against the measured noise level in the
//! event's own frequency band, so `snr_db` is the spectrogram-domain margin
//! of the event above the floor regardless of the noise colour.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::audio::AudioBuffer;
use crate::dataset::{derive_seed, Annotation, ClassLabel};
use crate::dsp::{self, StftParams};
use crate::error::{Error, Result};
use crate::io;

/// RMS of the ambient noise floor in every generated recording.
pub const NOISE_FLOOR_RMS: f64 = 0.05;

/// Margin added around an event's swept frequency range when writing its
/// annotation box, in Hz.
const BOX_FREQ_PAD_HZ: f64 = 5.0;

/// Window length used when measuring the in-band noise level for SNR
/// calibration.
const SNR_REF_WINDOW: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthEventKind {
    /// Linear frequency sweep, start above end.
    Downsweep,
    /// Near-constant low tone with a slow drift.
    Moan,
    /// Stationary multi-tone (ship-like).
    TonalNoise,
    /// Colored noise only, no deterministic component.
    Ambient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseColor {
    White,
    Pink,
}

/// A concrete event to synthesize.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthEventSpec {
    pub kind: SynthEventKind,
    pub f_start_hz: f64,
    pub f_end_hz: f64,
    pub duration_s: f64,
    pub snr_db: f64,
    pub harmonics: usize,
}

impl SynthEventSpec {
    fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        let nyquist = sample_rate_hz / 2.0;
        if !(self.duration_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "event duration must be positive, got {}",
                self.duration_s
            )));
        }
        for f in [self.f_start_hz, self.f_end_hz] {
            if !(f > 0.0 && f < nyquist) {
                return Err(Error::InvalidParameter(format!(
                    "event frequency {f} Hz outside (0, {nyquist})"
                )));
            }
        }
        Ok(())
    }

    /// Frequency extent of the fundamental sweep.
    pub fn freq_range_hz(&self) -> (f64, f64) {
        (
            self.f_start_hz.min(self.f_end_hz),
            self.f_start_hz.max(self.f_end_hz),
        )
    }
}

/// An event family: a spec with jitter ranges instead of fixed values.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthEventTemplate {
    pub kind: SynthEventKind,
    pub f_start_hz: (f64, f64),
    pub f_end_hz: (f64, f64),
    pub duration_s: (f64, f64),
    pub snr_db: (f64, f64),
    pub harmonics: usize,
}

impl SynthEventTemplate {
    pub fn sample_spec(&self, rng: &mut ChaCha8Rng) -> SynthEventSpec {
        let draw = |range: (f64, f64), rng: &mut ChaCha8Rng| {
            if range.0 < range.1 {
                rng.random_range(range.0..=range.1)
            } else {
                range.0
            }
        };
        SynthEventSpec {
            kind: self.kind,
            f_start_hz: draw(self.f_start_hz, rng),
            f_end_hz: draw(self.f_end_hz, rng),
            duration_s: draw(self.duration_s, rng),
            snr_db: draw(self.snr_db, rng),
            harmonics: self.harmonics,
        }
    }
}

/// One class in the corpus: its label, event templates (empty for
/// ambient-only classes), and how many recordings to generate.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthClass {
    pub label: ClassLabel,
    pub templates: Vec<SynthEventTemplate>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpusConfig {
    pub classes: Vec<SynthClass>,
    pub recording_len_s: f64,
    pub sample_rate_hz: f64,
    pub ambient_noise_color: NoiseColor,
    pub master_seed: u64,
}

impl SynthCorpusConfig {
    /// The default five-class corpus: one annotated event per labelled
    /// recording and enough ambient-only recordings to make the ambient
    /// class half of the eventual sample set.
    pub fn default_corpus(master_seed: u64) -> Self {
        let classes = vec![
            SynthClass {
                label: ClassLabel::Bw,
                templates: vec![SynthEventTemplate {
                    kind: SynthEventKind::Moan,
                    f_start_hz: (17.0, 23.0),
                    f_end_hz: (17.0, 23.0),
                    duration_s: (5.0, 9.0),
                    snr_db: (25.0, 40.0),
                    harmonics: 1,
                }],
                count: 10,
            },
            SynthClass {
                label: ClassLabel::Sw,
                templates: vec![SynthEventTemplate {
                    kind: SynthEventKind::Downsweep,
                    f_start_hz: (70.0, 90.0),
                    f_end_hz: (28.0, 36.0),
                    duration_s: (1.2, 1.6),
                    snr_db: (25.0, 40.0),
                    harmonics: 0,
                }],
                count: 10,
            },
            SynthClass {
                label: ClassLabel::Fw,
                templates: vec![SynthEventTemplate {
                    kind: SynthEventKind::Downsweep,
                    f_start_hz: (25.0, 32.0),
                    f_end_hz: (14.0, 18.0),
                    duration_s: (0.8, 1.3),
                    snr_db: (25.0, 40.0),
                    harmonics: 0,
                }],
                count: 10,
            },
            SynthClass {
                label: ClassLabel::Nn,
                templates: vec![SynthEventTemplate {
                    kind: SynthEventKind::TonalNoise,
                    f_start_hz: (45.0, 120.0),
                    f_end_hz: (45.0, 120.0),
                    duration_s: (10.0, 25.0),
                    snr_db: (20.0, 35.0),
                    harmonics: 3,
                }],
                count: 10,
            },
            SynthClass {
                label: ClassLabel::Ab,
                templates: Vec::new(),
                count: 40,
            },
        ];
        Self {
            classes,
            recording_len_s: 60.0,
            sample_rate_hz: 8000.0,
            ambient_noise_color: NoiseColor::Pink,
            master_seed,
        }
    }

    /// Override every template's SNR jitter range with one fixed value.
    pub fn with_uniform_snr(mut self, snr_db: f64) -> Self {
        for class in &mut self.classes {
            for t in &mut class.templates {
                t.snr_db = (snr_db, snr_db);
            }
        }
        self
    }

    /// Override per-class recording counts, keyed by label.
    pub fn with_counts(mut self, counts: &BTreeMap<ClassLabel, usize>) -> Self {
        for class in &mut self.classes {
            if let Some(&n) = counts.get(&class.label) {
                class.count = n;
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidParameter("sample rate must be positive".into()));
        }
        if self.recording_len_s < 30.0 {
            return Err(Error::InvalidParameter(format!(
                "recordings must be at least 30 s for excerpt extraction, got {}",
                self.recording_len_s
            )));
        }
        Ok(())
    }
}

/// Unit-variance white Gaussian noise (Box-Muller).
pub fn white_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        out.push(r * (2.0 * PI * u2).cos());
        if out.len() < n {
            out.push(r * (2.0 * PI * u2).sin());
        }
    }
    out
}

/// Pink-ish noise via the summed-octave (Voss-McCartney) construction,
/// normalized to unit RMS. The exact spectral slope is not a target.
pub fn pink_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    const ROWS: usize = 16;
    let mut rows = [0.0f64; ROWS];
    for row in rows.iter_mut() {
        *row = rng.random_range(-1.0..1.0);
    }
    let mut out = Vec::with_capacity(n);
    for counter in 1..=n as u64 {
        let idx = counter.trailing_zeros() as usize;
        if idx < ROWS {
            rows[idx] = rng.random_range(-1.0..1.0);
        }
        let white: f64 = rng.random_range(-1.0..1.0);
        out.push(rows.iter().sum::<f64>() + white);
    }
    let rms = (out.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        for x in &mut out {
            *x /= rms;
        }
    }
    out
}

fn colored_noise(color: NoiseColor, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match color {
        NoiseColor::White => white_noise(n, rng),
        NoiseColor::Pink => pink_noise(n, rng),
    }
}

/// Synthesize one event at unit fundamental amplitude.
///
/// Sweeps and moans are phase-continuous linear-in-time frequency sweeps
/// under a raised-cosine amplitude envelope; tonal noise is a stationary
/// multi-tone with short fade ramps; ambient is unit-variance white noise.
/// Harmonics sit at integer multiples of the instantaneous frequency with
/// amplitude `1/(h+1)`, skipped above Nyquist.
pub fn synth_event(
    spec: &SynthEventSpec,
    sample_rate_hz: f64,
    rng: &mut ChaCha8Rng,
) -> Result<AudioBuffer> {
    spec.validate(sample_rate_hz)?;
    let n = (spec.duration_s * sample_rate_hz).round().max(1.0) as usize;
    let nyquist = sample_rate_hz / 2.0;

    let samples = match spec.kind {
        SynthEventKind::Ambient => white_noise(n, rng),
        SynthEventKind::Downsweep | SynthEventKind::Moan | SynthEventKind::TonalNoise => {
            let (f0, f1) = if spec.kind == SynthEventKind::TonalNoise {
                (spec.f_start_hz, spec.f_start_hz)
            } else {
                (spec.f_start_hz, spec.f_end_hz)
            };
            let sweep_rate = (f1 - f0) / spec.duration_s;
            let phases: Vec<f64> = (0..=spec.harmonics)
                .map(|_| rng.random_range(0.0..2.0 * PI))
                .collect();
            (0..n)
                .map(|i| {
                    let t = i as f64 / sample_rate_hz;
                    // Integral of the instantaneous frequency f0 + rate*t.
                    let phase = 2.0 * PI * (f0 * t + 0.5 * sweep_rate * t * t);
                    let f_inst = f0 + sweep_rate * t;
                    let envelope = match spec.kind {
                        SynthEventKind::TonalNoise => {
                            let ramp = 0.2;
                            (t / ramp).min((spec.duration_s - t) / ramp).min(1.0).max(0.0)
                        }
                        _ => 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()),
                    };
                    let mut v = 0.0;
                    for (h, phi) in phases.iter().enumerate() {
                        let mult = (h + 1) as f64;
                        if f_inst * mult < nyquist {
                            v += (mult * phase + phi).sin() / mult;
                        }
                    }
                    envelope * v
                })
                .collect()
        }
    };
    AudioBuffer::new(samples, sample_rate_hz)
}

/// Mean per-bin noise power inside a frequency band, measured with a
/// 2048-point Hann STFT over the given samples.
fn band_noise_power(noise: &AudioBuffer, f_lo: f64, f_hi: f64) -> f64 {
    let params = StftParams::hann(SNR_REF_WINDOW, SNR_REF_WINDOW / 2).expect("static params");
    let frames = dsp::stft(noise, &params).expect("noise longer than one window");
    let df = noise.sample_rate_hz() / SNR_REF_WINDOW as f64;
    let bins: Vec<usize> = (0..params.bin_count())
        .filter(|&k| {
            let f = k as f64 * df;
            f >= f_lo && f <= f_hi
        })
        .collect();
    let bins = if bins.is_empty() {
        vec![((0.5 * (f_lo + f_hi) / df).round() as usize).min(params.bin_count() - 1)]
    } else {
        bins
    };
    let mut acc = 0.0;
    for row in frames.rows() {
        for &k in &bins {
            acc += row[k].norm_sqr();
        }
    }
    acc / (frames.nrows() * bins.len()) as f64
}

/// Peak amplitude that puts a unit tone `snr_db` above the given per-bin
/// noise power in a 2048-point Hann analysis.
fn amplitude_for_snr(band_power: f64, snr_db: f64) -> f64 {
    // Peak |X| of a sine of amplitude A under window w is A * sum(w) / 2.
    let window_sum = SNR_REF_WINDOW as f64 / 2.0; // Hann sums to n/2
    2.0 * band_power.max(1e-30).sqrt() * 10f64.powf(snr_db / 20.0) / window_sum
}

/// One generated recording plus its ground-truth annotations.
#[derive(Debug, Clone)]
pub struct SynthRecording {
    pub recording_id: String,
    pub audio: AudioBuffer,
    pub annotations: Vec<Annotation>,
}

/// Generate the `rec_idx`-th recording of `class`, fully determined by the
/// config's master seed and the recording id.
pub fn synth_recording(
    config: &SynthCorpusConfig,
    class: &SynthClass,
    rec_idx: usize,
) -> Result<SynthRecording> {
    config.validate()?;
    let recording_id = format!("{}_{rec_idx:04}", class.label.as_str().to_lowercase());
    let seed = derive_seed(config.master_seed, &recording_id, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let sr = config.sample_rate_hz;
    let n = (config.recording_len_s * sr).round() as usize;
    let mut samples: Vec<f64> = colored_noise(config.ambient_noise_color, n, &mut rng)
        .into_iter()
        .map(|x| x * NOISE_FLOOR_RMS)
        .collect();
    let noise = AudioBuffer::new(samples.clone(), sr)?;

    let mut annotations = Vec::new();
    if !class.templates.is_empty() {
        let template = &class.templates[rng.random_range(0..class.templates.len())];
        let mut spec = template.sample_spec(&mut rng);
        // Keep a margin at both ends of the file.
        spec.duration_s = spec.duration_s.min(config.recording_len_s - 2.0);
        let event = synth_event(&spec, sr, &mut rng)?;

        let latest = config.recording_len_s - spec.duration_s - 1.0;
        let start_s = if latest > 1.0 {
            rng.random_range(1.0..=latest)
        } else {
            1.0
        };
        let (f_lo_ev, f_hi_ev) = spec.freq_range_hz();
        let amp = amplitude_for_snr(band_noise_power(&noise, f_lo_ev, f_hi_ev), spec.snr_db);

        let offset = (start_s * sr).round() as usize;
        for (i, &v) in event.samples().iter().enumerate() {
            if offset + i < samples.len() {
                samples[offset + i] += amp * v;
            }
        }

        let nyquist = sr / 2.0;
        annotations.push(Annotation::new(
            recording_id.clone(),
            start_s,
            start_s + spec.duration_s,
            (f_lo_ev - BOX_FREQ_PAD_HZ).max(0.5),
            (f_hi_ev + BOX_FREQ_PAD_HZ).min(nyquist - 1.0),
            class.label.clone(),
        )?);
    }

    // Clipping guard: scale the whole recording back under full scale.
    let peak = samples.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if peak > 0.99 {
        let g = 0.99 / peak;
        for x in &mut samples {
            *x *= g;
        }
    }

    Ok(SynthRecording {
        recording_id,
        audio: AudioBuffer::new(samples, sr)?,
        annotations,
    })
}

/// Per-class tallies of what a corpus build produced.
#[derive(Debug, Clone, Default)]
pub struct CorpusSummary {
    pub recordings: Vec<PathBuf>,
    pub annotations: Vec<Annotation>,
    pub annotation_counts: BTreeMap<ClassLabel, usize>,
    pub ambient_recordings: usize,
}

/// Path of a corpus recording, given the corpus root.
pub fn recording_path(corpus_dir: &Path, recording_id: &str) -> PathBuf {
    corpus_dir.join("recordings").join(format!("{recording_id}.wav"))
}

/// Path of the corpus annotation CSV.
pub fn annotations_path(corpus_dir: &Path) -> PathBuf {
    corpus_dir.join("annotations.csv")
}

/// Generate every recording in the config, write the waveforms as 16-bit
/// PCM WAV plus one annotation CSV, and return the tallies. Byte-identical
/// across reruns with the same config.
pub fn build_synthetic_corpus(config: &SynthCorpusConfig, out_dir: &Path) -> Result<CorpusSummary> {
    config.validate()?;
    let rec_dir = out_dir.join("recordings");
    std::fs::create_dir_all(&rec_dir).map_err(|e| Error::io(&rec_dir, e))?;

    let mut summary = CorpusSummary::default();
    for class in &config.classes {
        for rec_idx in 0..class.count {
            let rec = synth_recording(config, class, rec_idx)?;
            let path = recording_path(out_dir, &rec.recording_id);
            io::wav::write_wav_i16(&path, &rec.audio)?;
            summary.recordings.push(path);
            if rec.annotations.is_empty() {
                summary.ambient_recordings += 1;
            }
            for anno in rec.annotations {
                *summary
                    .annotation_counts
                    .entry(anno.label.clone())
                    .or_default() += 1;
                summary.annotations.push(anno);
            }
        }
    }

    io::annotations::write_annotations(&annotations_path(out_dir), &summary.annotations)?;
    Ok(summary)
}
