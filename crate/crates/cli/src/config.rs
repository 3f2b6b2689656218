//! Pipeline configuration: a flat key=value file plus CLI flag overrides
//! (flags win). A committed config file makes a run reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use specstack::dataset::ClassLabel;
use specstack::dsp::StftParams;
use specstack::stack::{GridSpec, StackParams};
use specstack::synth::NoiseColor;

/// Which input representation the pipeline produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Multi-window stack interpolated onto a common grid.
    Stacked,
    /// Single linear-frequency spectrogram at the given window length, on
    /// its native truncated grid.
    Linear(usize),
    /// Single mel-scaled spectrogram.
    Mel,
}

impl FromStr for Representation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stacked" => Ok(Representation::Stacked),
            "mel" => Ok(Representation::Mel),
            other => {
                if let Some(nfft) = other.strip_prefix("linear:") {
                    let nfft: usize = nfft
                        .parse()
                        .map_err(|_| format!("bad window length in {other:?}"))?;
                    Ok(Representation::Linear(nfft))
                } else {
                    Err(format!(
                        "unknown representation {other:?} (stacked | linear:<nfft> | mel)"
                    ))
                }
            }
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::Stacked => write!(f, "stacked"),
            Representation::Linear(n) => write!(f, "linear:{n}"),
            Representation::Mel => write!(f, "mel"),
        }
    }
}

/// A configuration problem; mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub representation: Representation,
    pub windows: Vec<usize>,
    pub hop_fraction: f64,
    pub band: (f64, f64),
    pub grid_height: usize,
    pub grid_width: usize,
    pub grid_from_min_resolution: bool,
    pub n_mels: usize,
    pub sample_len_s: f64,
    pub excerpt_len_s: f64,
    pub ratios: (f64, f64, f64),
    pub seed: u64,
    pub workers: usize,
    pub ambient_per_recording: usize,
    pub normalize: bool,
    pub recording_len_s: f64,
    pub noise: NoiseColor,
    pub counts: Option<BTreeMap<ClassLabel, usize>>,
    pub snr_db: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            representation: Representation::Stacked,
            windows: vec![256, 2048, 16384],
            hop_fraction: 0.25,
            band: (10.0, 1000.0),
            grid_height: 256,
            grid_width: 128,
            grid_from_min_resolution: false,
            n_mels: 128,
            sample_len_s: 10.0,
            excerpt_len_s: 30.0,
            ratios: (0.70, 0.15, 0.15),
            seed: 42,
            workers: 0,
            ambient_per_recording: 1,
            normalize: false,
            recording_len_s: 60.0,
            noise: NoiseColor::Pink,
            counts: None,
            snr_db: None,
        }
    }
}

impl PipelineConfig {
    /// Defaults, then the config file when given.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            config.apply_text(&text)?;
        }
        Ok(config)
    }

    /// Parse `key = value` lines; `#` starts a comment, blank lines are
    /// skipped, unknown keys are errors.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: missing '='", lineno + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| ConfigError(format!("line {}: {}", lineno + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError(msg);
        let parse_f64 = |v: &str, what: &str| {
            v.parse::<f64>()
                .map_err(|_| err(format!("bad {what} value {v:?}")))
        };
        let parse_usize = |v: &str, what: &str| {
            v.parse::<usize>()
                .map_err(|_| err(format!("bad {what} value {v:?}")))
        };
        match key {
            "representation" => {
                self.representation = value.parse().map_err(ConfigError)?;
            }
            "windows" => {
                let windows: Result<Vec<usize>, _> = value
                    .split(',')
                    .map(|w| parse_usize(w.trim(), "window length"))
                    .collect();
                self.windows = windows?;
                if self.windows.is_empty() {
                    return Err(err("windows list is empty".into()));
                }
            }
            "hop_fraction" => {
                let v = parse_f64(value, "hop_fraction")?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(err(format!("hop_fraction must be in (0, 1], got {v}")));
                }
                self.hop_fraction = v;
            }
            "band" => {
                let (lo, hi) = split_pair(value).ok_or_else(|| err(format!("bad band {value:?}")))?;
                self.band = (parse_f64(lo, "band")?, parse_f64(hi, "band")?);
                if !(self.band.0 < self.band.1) {
                    return Err(err(format!("band must be ascending, got {value:?}")));
                }
            }
            "grid" => {
                let (h, w) = value
                    .split_once('x')
                    .ok_or_else(|| err(format!("bad grid {value:?} (want HxW)")))?;
                self.grid_height = parse_usize(h.trim(), "grid height")?;
                self.grid_width = parse_usize(w.trim(), "grid width")?;
            }
            "grid_mode" => {
                self.grid_from_min_resolution = match value {
                    "explicit" => false,
                    "min_resolution" => true,
                    other => return Err(err(format!("unknown grid_mode {other:?}"))),
                };
            }
            "n_mels" => self.n_mels = parse_usize(value, "n_mels")?,
            "sample_len_s" => self.sample_len_s = parse_f64(value, "sample_len_s")?,
            "excerpt_len_s" => self.excerpt_len_s = parse_f64(value, "excerpt_len_s")?,
            "ratios" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(err(format!("ratios need three values, got {value:?}")));
                }
                self.ratios = (
                    parse_f64(parts[0], "ratio")?,
                    parse_f64(parts[1], "ratio")?,
                    parse_f64(parts[2], "ratio")?,
                );
            }
            "seed" => {
                self.seed = value
                    .parse::<u64>()
                    .map_err(|_| err(format!("bad seed {value:?}")))?;
            }
            "workers" => self.workers = parse_usize(value, "workers")?,
            "ambient_per_recording" => {
                self.ambient_per_recording = parse_usize(value, "ambient_per_recording")?;
            }
            "normalize" => {
                self.normalize = value
                    .parse::<bool>()
                    .map_err(|_| err(format!("bad normalize {value:?}")))?;
            }
            "recording_len_s" => self.recording_len_s = parse_f64(value, "recording_len_s")?,
            "noise" => {
                self.noise = match value {
                    "white" => NoiseColor::White,
                    "pink" => NoiseColor::Pink,
                    other => return Err(err(format!("unknown noise colour {other:?}"))),
                };
            }
            "counts" => {
                let mut counts = BTreeMap::new();
                for part in value.split(',') {
                    let (label, n) = part
                        .trim()
                        .split_once(':')
                        .ok_or_else(|| err(format!("bad counts entry {part:?}")))?;
                    counts.insert(
                        ClassLabel::parse(label.trim()),
                        parse_usize(n.trim(), "count")?,
                    );
                }
                self.counts = Some(counts);
            }
            "snr_db" => self.snr_db = Some(parse_f64(value, "snr_db")?),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn hop_for(&self, window: usize) -> usize {
        ((window as f64 * self.hop_fraction).round() as usize).clamp(1, window)
    }

    /// Stack parameters for the stacked representation.
    pub fn stack_params(&self) -> Result<StackParams, ConfigError> {
        let channels: Result<Vec<StftParams>, _> = self
            .windows
            .iter()
            .map(|&w| StftParams::hann(w, self.hop_for(w)))
            .collect();
        let grid = if self.grid_from_min_resolution {
            GridSpec::FromMinResolution
        } else {
            GridSpec::Explicit {
                height: self.grid_height,
                width: self.grid_width,
            }
        };
        StackParams::new(
            channels.map_err(|e| ConfigError(e.to_string()))?,
            self.band,
            grid,
        )
        .map_err(|e| ConfigError(e.to_string()))
    }
}

fn split_pair(value: &str) -> Option<(&str, &str)> {
    let mut parts = value.split(',').map(str::trim);
    let a = parts.next()?;
    let b = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    Some((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_standard_pipeline() {
        let config = PipelineConfig::default();
        assert_eq!(config.windows, vec![256, 2048, 16384]);
        assert_eq!(config.hop_for(2048), 512);
        assert_eq!((config.grid_height, config.grid_width), (256, 128));
        assert_eq!(config.band, (10.0, 1000.0));
    }

    #[test]
    fn file_text_overrides_defaults() {
        let mut config = PipelineConfig::default();
        config
            .apply_text(
                "# comment\nrepresentation = linear:2048\nseed = 7\nband = 20, 900\n\ngrid = 64x32\n",
            )
            .unwrap();
        assert_eq!(config.representation, Representation::Linear(2048));
        assert_eq!(config.seed, 7);
        assert_eq!(config.band, (20.0, 900.0));
        assert_eq!((config.grid_height, config.grid_width), (64, 32));
    }

    #[test]
    fn unknown_key_is_an_error() {
        let mut config = PipelineConfig::default();
        assert!(config.apply_text("no_such_key = 1\n").is_err());
        assert!(config.apply_text("seed 7\n").is_err());
    }

    #[test]
    fn representation_parsing() {
        assert_eq!(
            "stacked".parse::<Representation>().unwrap(),
            Representation::Stacked
        );
        assert_eq!(
            "linear:16384".parse::<Representation>().unwrap(),
            Representation::Linear(16384)
        );
        assert_eq!("mel".parse::<Representation>().unwrap(), Representation::Mel);
        assert!("linear:x".parse::<Representation>().is_err());
        assert!("spectro".parse::<Representation>().is_err());
    }

    #[test]
    fn counts_parsing() {
        let mut config = PipelineConfig::default();
        config.apply_text("counts = BW:3, AB:12\n").unwrap();
        let counts = config.counts.unwrap();
        assert_eq!(counts[&ClassLabel::Bw], 3);
        assert_eq!(counts[&ClassLabel::Ab], 12);
    }

    #[test]
    fn alternate_overlap_reading_is_reachable() {
        let mut config = PipelineConfig::default();
        config.apply_text("hop_fraction = 0.75\n").unwrap();
        assert_eq!(config.hop_for(2048), 1536);
    }
}
