//! RIFF/WAVE ingestion and 16-bit PCM emission.
//!
//! Reading supports mono (or first-channel-of-many, with a warning) PCM
//! 16-bit and IEEE float 32-bit files. 16-bit samples are scaled by 1/32768
//! into `[-1, 1)`.

use std::path::Path;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::WavParse {
        offset: offset as u64,
        message: message.into(),
    }
}

struct FmtChunk {
    format_code: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

pub fn read_wav(path: &Path) -> Result<AudioBuffer> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes)
}

/// Decode WAV bytes. Split out from [`read_wav`] so malformed-input tests
/// can run without touching the filesystem.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.len() < 12 {
        return Err(parse_err(0, format!("file too small for a RIFF header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(parse_err(0, "missing RIFF tag"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(parse_err(8, "missing WAVE tag"));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<(usize, usize)> = None; // (offset, declared length)
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(parse_err(pos, "fmt chunk shorter than 16 bytes"));
                }
                fmt = Some(FmtChunk {
                    format_code: u16::from_le_bytes(bytes[body..body + 2].try_into().unwrap()),
                    channels: u16::from_le_bytes(bytes[body + 2..body + 4].try_into().unwrap()),
                    sample_rate: u32::from_le_bytes(bytes[body + 4..body + 8].try_into().unwrap()),
                    bits_per_sample: u16::from_le_bytes(
                        bytes[body + 14..body + 16].try_into().unwrap(),
                    ),
                });
            }
            b"data" => {
                if body + size > bytes.len() {
                    let avail = bytes.len() - body;
                    return Err(parse_err(
                        pos,
                        format!(
                            "data chunk declares {size} bytes but only {avail} are present \
                             (short by {})",
                            size - avail
                        ),
                    ));
                }
                data = Some((body, size));
            }
            _ => {} // skip unknown chunks
        }
        pos = body + size + (size & 1); // chunks are word-aligned
    }

    let fmt = fmt.ok_or_else(|| parse_err(12, "no fmt chunk found"))?;
    let (data_off, data_len) = data.ok_or_else(|| parse_err(12, "no data chunk found"))?;

    if fmt.channels == 0 {
        return Err(parse_err(data_off, "fmt chunk declares zero channels"));
    }
    let bytes_per_sample = match (fmt.format_code, fmt.bits_per_sample) {
        (1, 16) => 2,
        (3, 32) => 4,
        (code, bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "format code {code} with {bits} bits per sample (PCM16 and float32 only)"
            )))
        }
    };
    if fmt.channels > 1 {
        log::warn!(
            "multi-channel WAV ({} channels); using channel 0 only",
            fmt.channels
        );
    }

    let block = bytes_per_sample * fmt.channels as usize;
    if data_len % block != 0 {
        return Err(parse_err(
            data_off,
            format!("data length {data_len} is not a multiple of the {block}-byte frame"),
        ));
    }
    let n_frames = data_len / block;
    if n_frames == 0 {
        return Err(parse_err(data_off, "data chunk holds no samples"));
    }

    let mut samples = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let at = data_off + i * block;
        let v = match bytes_per_sample {
            2 => i16::from_le_bytes(bytes[at..at + 2].try_into().unwrap()) as f64 / 32768.0,
            _ => f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as f64,
        };
        samples.push(v);
    }

    AudioBuffer::new(samples, fmt.sample_rate as f64)
}

/// Write a mono 16-bit PCM WAV. Samples are scaled by 32767 and rounded;
/// values outside `[-1, 1]` saturate.
pub fn write_wav_i16(path: &Path, audio: &AudioBuffer) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let data_len = audio.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    let sample_rate = audio.sample_rate_hz().round() as u32;

    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &x in audio.samples() {
        let q = (x * 32767.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }

    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
