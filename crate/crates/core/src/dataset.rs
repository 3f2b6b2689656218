//! Dataset construction: annotation-centred excerpts, random fixed-length
//! samples, ambient sampling, and stratified splitting.
//!
//! All sampling is driven by per-item seeds derived with [`derive_seed`]
//! from one master seed, so a corpus rebuild gives identical results no
//! matter how items are ordered or distributed over threads.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Default sample length in seconds.
pub const DEFAULT_SAMPLE_LEN_S: f64 = 10.0;
/// Default excerpt length in seconds.
pub const DEFAULT_EXCERPT_LEN_S: f64 = 30.0;

/// Class label. The five defaults cover the standard corpus (three whale
/// species, non-biological noise, ambient); anything else round-trips
/// through [`ClassLabel::Other`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    /// Blue whale
    Bw,
    /// Sei whale
    Sw,
    /// Fin whale
    Fw,
    /// Non-biological noise
    Nn,
    /// Ambient (no vocalization present)
    Ab,
    Other(String),
}

impl ClassLabel {
    pub fn parse(s: &str) -> Self {
        match s {
            "BW" => ClassLabel::Bw,
            "SW" => ClassLabel::Sw,
            "FW" => ClassLabel::Fw,
            "NN" => ClassLabel::Nn,
            "AB" => ClassLabel::Ab,
            other => ClassLabel::Other(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            ClassLabel::Bw => "BW",
            ClassLabel::Sw => "SW",
            ClassLabel::Fw => "FW",
            ClassLabel::Nn => "NN",
            ClassLabel::Ab => "AB",
            ClassLabel::Other(s) => s,
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An expert bounding box: a labelled time/frequency region of a recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub recording_id: String,
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub label: ClassLabel,
}

impl Annotation {
    pub fn new(
        recording_id: impl Into<String>,
        t_start_s: f64,
        t_end_s: f64,
        f_lo_hz: f64,
        f_hi_hz: f64,
        label: ClassLabel,
    ) -> Result<Self> {
        if !(0.0 <= t_start_s && t_start_s < t_end_s) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= t_start < t_end, got [{t_start_s}, {t_end_s}]"
            )));
        }
        if !(f_lo_hz < f_hi_hz) {
            return Err(Error::InvalidParameter(format!(
                "need f_lo < f_hi, got [{f_lo_hz}, {f_hi_hz}]"
            )));
        }
        Ok(Self {
            recording_id: recording_id.into(),
            t_start_s,
            t_end_s,
            f_lo_hz,
            f_hi_hz,
            label,
        })
    }

    pub fn duration_s(&self) -> f64 {
        self.t_end_s - self.t_start_s
    }

    pub fn midpoint_s(&self) -> f64 {
        0.5 * (self.t_start_s + self.t_end_s)
    }
}

/// A fixed-length sample cut from a recording, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub recording_id: String,
    pub sample_start_s: f64,
    pub sample_len_s: f64,
    pub label: ClassLabel,
    pub source_annotation: Option<Annotation>,
    pub rng_seed_used: u64,
}

impl LabeledSample {
    /// When the sample came from an annotation, the two intervals must
    /// overlap (full containment when the annotation is the shorter one).
    pub fn validate(&self) -> Result<()> {
        if let Some(anno) = &self.source_annotation {
            let s0 = self.sample_start_s;
            let s1 = s0 + self.sample_len_s;
            if anno.t_end_s <= s0 || anno.t_start_s >= s1 {
                return Err(Error::InvalidParameter(format!(
                    "sample [{s0}, {s1}] does not overlap its annotation [{}, {}]",
                    anno.t_start_s, anno.t_end_s
                )));
            }
        }
        Ok(())
    }
}

/// Train/validation/test partition.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<LabeledSample>,
    pub val: Vec<LabeledSample>,
    pub test: Vec<LabeledSample>,
    pub ratios: (f64, f64, f64),
}

impl DatasetSplit {
    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-class counts as (train, val, test), keyed by label.
    pub fn class_counts(&self) -> BTreeMap<ClassLabel, (usize, usize, usize)> {
        let mut counts: BTreeMap<ClassLabel, (usize, usize, usize)> = BTreeMap::new();
        for s in &self.train {
            counts.entry(s.label.clone()).or_default().0 += 1;
        }
        for s in &self.val {
            counts.entry(s.label.clone()).or_default().1 += 1;
        }
        for s in &self.test {
            counts.entry(s.label.clone()).or_default().2 += 1;
        }
        counts
    }
}

/// Derive a per-item seed from the master seed and the item's identity.
/// SHA-256 based, so the result does not depend on platform hashers or on
/// the order items are visited in.
pub fn derive_seed(master_seed: u64, recording_id: &str, item_index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update((recording_id.len() as u64).to_le_bytes());
    hasher.update(recording_id.as_bytes());
    hasher.update(item_index.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// The excerpt interval: `excerpt_len_s` seconds centred on the annotation
/// midpoint, shifted inward if it would cross either end of the recording.
pub fn extract_excerpt(
    recording_len_s: f64,
    anno: &Annotation,
    excerpt_len_s: f64,
) -> Result<(f64, f64)> {
    if recording_len_s < excerpt_len_s {
        return Err(Error::RecordingTooShort {
            len_s: recording_len_s,
            needed_s: excerpt_len_s,
        });
    }
    let start = (anno.midpoint_s() - excerpt_len_s / 2.0).clamp(0.0, recording_len_s - excerpt_len_s);
    Ok((start, start + excerpt_len_s))
}

/// Draw a sample window that contains the annotation, uniformly over all
/// feasible start times inside the excerpt.
///
/// When the annotation is longer than the sample, the window is instead
/// drawn uniformly over starts that keep the whole window inside the
/// annotation (maximal overlap). The seed is recorded on the sample.
pub fn sample_containing(
    excerpt: (f64, f64),
    anno: &Annotation,
    sample_len_s: f64,
    seed: u64,
) -> LabeledSample {
    let (e0, e1) = excerpt;
    let latest_start = e1 - sample_len_s;

    // Starts whose window [s, s+len] fully contains the annotation.
    let mut lo = (anno.t_end_s - sample_len_s).max(e0);
    let mut hi = anno.t_start_s.min(latest_start);
    if lo > hi {
        // Long annotation: keep the window inside the annotation instead.
        lo = anno.t_start_s.max(e0);
        hi = (anno.t_end_s - sample_len_s).min(latest_start);
    }
    if lo > hi {
        // Geometry leaves no feasible interval (annotation poking out of a
        // clamped excerpt); fall back to the best-centred window.
        let s = (anno.midpoint_s() - sample_len_s / 2.0).clamp(e0, latest_start.max(e0));
        (lo, hi) = (s, s);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_start_s = if lo < hi {
        rng.random_range(lo..=hi)
    } else {
        lo
    };
    LabeledSample {
        recording_id: anno.recording_id.clone(),
        sample_start_s,
        sample_len_s,
        label: anno.label.clone(),
        source_annotation: Some(anno.clone()),
        rng_seed_used: seed,
    }
}

/// Draw an ambient sample uniformly from anywhere in a vocalization-free
/// recording.
pub fn sample_ambient(
    recording_id: &str,
    recording_len_s: f64,
    sample_len_s: f64,
    seed: u64,
) -> Result<LabeledSample> {
    if recording_len_s < sample_len_s {
        return Err(Error::RecordingTooShort {
            len_s: recording_len_s,
            needed_s: sample_len_s,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = recording_len_s - sample_len_s;
    let sample_start_s = if hi > 0.0 {
        rng.random_range(0.0..=hi)
    } else {
        0.0
    };
    Ok(LabeledSample {
        recording_id: recording_id.to_string(),
        sample_start_s,
        sample_len_s,
        label: ClassLabel::Ab,
        source_annotation: None,
        rng_seed_used: seed,
    })
}

/// Largest-remainder allocation of `n` items over the three ratios. Ties
/// between equal remainders go to the later partition.
fn allocate(n: usize, ratios: (f64, f64, f64)) -> [usize; 3] {
    let r = [ratios.0, ratios.1, ratios.2];
    let ideal: Vec<f64> = r.iter().map(|ri| ri * n as f64).collect();
    // The tiny epsilon protects exact products like 0.7 * 10 from landing
    // one ulp under the integer they mean.
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x + 1e-9).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - counts[a] as f64;
        let rb = ideal[b] - counts[b] as f64;
        rb.partial_cmp(&ra).unwrap().then(b.cmp(&a))
    });
    for i in 0..n.saturating_sub(assigned) {
        counts[order[i % 3]] += 1;
    }
    [counts[0], counts[1], counts[2]]
}

/// Stratified split: each class is shuffled independently and cut at the
/// largest-remainder boundaries, so per-class proportions deviate from the
/// ratios by at most one item per partition.
pub fn split_dataset(
    samples: Vec<LabeledSample>,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetSplit> {
    validate_ratios(ratios)?;
    let mut by_class: BTreeMap<ClassLabel, Vec<LabeledSample>> = BTreeMap::new();
    for s in samples {
        by_class.entry(s.label.clone()).or_default().push(s);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = DatasetSplit {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
        ratios,
    };
    for (_, mut group) in by_class {
        group.shuffle(&mut rng);
        let [n_train, n_val, _] = allocate(group.len(), ratios);
        let mut iter = group.into_iter();
        split.train.extend(iter.by_ref().take(n_train));
        split.val.extend(iter.by_ref().take(n_val));
        split.test.extend(iter);
    }
    Ok(split)
}

/// Unstratified variant: one shuffle over the whole list, one cut.
pub fn split_dataset_unstratified(
    mut samples: Vec<LabeledSample>,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetSplit> {
    validate_ratios(ratios)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    samples.shuffle(&mut rng);
    let [n_train, n_val, _] = allocate(samples.len(), ratios);
    let mut iter = samples.into_iter();
    Ok(DatasetSplit {
        train: iter.by_ref().take(n_train).collect(),
        val: iter.by_ref().take(n_val).collect(),
        test: iter.collect(),
        ratios,
    })
}

fn validate_ratios(ratios: (f64, f64, f64)) -> Result<()> {
    let (a, b, c) = ratios;
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "split ratios must be non-negative and sum to 1, got ({a}, {b}, {c})"
        )));
    }
    Ok(())
}
