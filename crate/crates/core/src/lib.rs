//! Multi-resolution stacked spectrogram representations for low-frequency
//! bioacoustic recordings.
//!
//! The central idea: a single STFT parameter set forces a trade-off between
//! time and frequency resolution, and low-frequency whale vocalizations sit
//! on both sides of that trade-off (long tonal moans vs. short downsweeps).
//! Instead of picking one, compute several spectrograms with different
//! window lengths, resample them onto a common time-frequency grid with a
//! linear interpolation spline, and stack them as channels of one tensor --
//! the same way an RGB image carries three views of one scene.
//!
//! The crate covers the full batch pipeline around that representation:
//!
//! - [`dsp`]: windowing, radix-2 FFT, STFT, dB conversion, band truncation
//! - [`mel`]: hertz/mel conversion and mel-scaled spectrograms
//! - [`stack`]: grid interpolation and channel stacking
//! - [`dataset`]: excerpt/sample extraction and stratified splitting
//! - [`synth`]: deterministic synthetic corpus generation for testing
//! - [`io`]: WAV ingestion, annotation CSV, SST1 tensor files, manifests
//! - [`metrics`]: confusion matrices, macro-averaged metrics, and a
//!   nearest-centroid baseline classifier
//!
//! Everything is deterministic given a master seed: per-item RNG seeds are
//! derived by hashing, so results are independent of iteration order and
//! thread count.

pub mod audio;
pub mod dataset;
pub mod dsp;
pub mod error;
pub mod io;
pub mod mel;
pub mod metrics;
pub mod oracle;
pub mod render;
pub mod stack;
pub mod synth;

pub use audio::AudioBuffer;
pub use dataset::{Annotation, ClassLabel, DatasetSplit, LabeledSample};
pub use dsp::{Spectrogram, StftParams, WindowKind};
pub use error::{Error, Result};
pub use mel::MelParams;
pub use metrics::{ConfusionMatrix, MetricsReport};
pub use stack::{GridSpec, StackParams, StackedTensor};
