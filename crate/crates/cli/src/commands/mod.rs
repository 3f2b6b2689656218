//! Subcommand implementations.

pub mod bench;
pub mod eval;
pub mod inspect;
pub mod process;
pub mod split;
pub mod synth;

use anyhow::Result;
use ndarray::Axis;

use specstack::dsp::{self, Spectrogram};
use specstack::mel::{mel_spectrogram, MelParams};
use specstack::stack::{stack_representation, StackedTensor};
use specstack::AudioBuffer;

use crate::config::{PipelineConfig, Representation};

/// Compute the configured representation of one audio sample as a tensor
/// (single-channel modes keep their native truncated grid).
pub fn compute_tensor(audio: &AudioBuffer, config: &PipelineConfig) -> Result<StackedTensor> {
    let tensor = match config.representation {
        Representation::Stacked => stack_representation(audio, &config.stack_params()?)?,
        Representation::Linear(window) => {
            let params = dsp::StftParams::hann(window, config.hop_for(window))?;
            let spec = Spectrogram::compute(audio, &params)?;
            let spec = dsp::truncate_freq(&spec, config.band.0, config.band.1)?;
            single_channel(&spec)?
        }
        Representation::Mel => {
            let window = 2048;
            let params = dsp::StftParams::hann(window, config.hop_for(window))?;
            let mel_params = MelParams::new(config.n_mels, config.band.0, config.band.1)?;
            let spec = mel_spectrogram(audio, &params, &mel_params)?;
            single_channel(&spec)?
        }
    };
    Ok(if config.normalize {
        normalize_per_channel(tensor)?
    } else {
        tensor
    })
}

fn single_channel(spec: &Spectrogram) -> Result<StackedTensor> {
    let values = spec.values().clone().insert_axis(Axis(0));
    Ok(StackedTensor::from_parts(
        values,
        spec.freq_axis().to_vec(),
        spec.time_axis().to_vec(),
        vec![*spec.params()],
    )?)
}

/// Min-max scale each channel into [0, 1]; constant channels become zero.
fn normalize_per_channel(tensor: StackedTensor) -> Result<StackedTensor> {
    let mut values = tensor.values().clone();
    for mut channel in values.axis_iter_mut(Axis(0)) {
        let lo = channel.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = channel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        channel.mapv_inplace(|v| if span > 0.0 { (v - lo) / span } else { 0.0 });
    }
    Ok(StackedTensor::from_parts(
        values,
        tensor.grid_freq_axis().to_vec(),
        tensor.grid_time_axis().to_vec(),
        tensor.channel_meta().to_vec(),
    )?)
}
