//! Windowing, FFT, STFT, dB conversion, and frequency truncation.

pub mod fft;
mod stft;

pub use fft::{fft, Radix2Fft};
pub use stft::{
    make_window, power_db, stft, truncate_freq, Spectrogram, StftParams, WindowKind, DB_FLOOR,
    DB_FLOOR_EPS,
};
