//! SST1: a minimal binary container for stacked spectrogram tensors.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic   4 bytes  "SST1"
//! k,h,w   3 x u32  channels, grid height (frequency), grid width (time)
//! dtype   1 x u8   0 = 32-bit float LE (the only defined code)
//! label   u32 length + that many bytes of UTF-8
//! ranges  4 x f64  f_lo, f_hi, t_lo, t_hi (grid axis end points)
//! payload k*h*w f32, channel-major, then row (frequency), then column (time)
//! ```
//!
//! Only the axis *ranges* are stored; a reader reconstructs equally spaced
//! axes, and per-channel STFT parameters are not carried at all (the
//! returned tensor has empty channel metadata). Values round-trip
//! bit-exactly at f32 precision.

use ndarray::Array3;
use std::path::Path;

use crate::dataset::ClassLabel;
use crate::error::{Error, Result};
use crate::stack::StackedTensor;

pub const MAGIC: [u8; 4] = *b"SST1";
pub const DTYPE_F32_LE: u8 = 0;

pub fn write_tensor(tensor: &StackedTensor, label: &ClassLabel, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let (k, h, w) = tensor.shape();
    let label_bytes = label.as_str().as_bytes();
    let freq = tensor.grid_freq_axis();
    let time = tensor.grid_time_axis();

    let mut out = Vec::with_capacity(53 + label_bytes.len() + k * h * w * 4);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&(k as u32).to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.push(DTYPE_F32_LE);
    out.extend_from_slice(&(label_bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(label_bytes);
    for bound in [freq[0], freq[h - 1], time[0], time[w - 1]] {
        out.extend_from_slice(&bound.to_le_bytes());
    }
    // Array3's standard layout iterates channel, then row, then column --
    // exactly the payload order.
    for &v in tensor.values().iter() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }

    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    out[n - 1] = hi;
    out
}

pub fn read_tensor(path: &Path) -> Result<(StackedTensor, ClassLabel)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_tensor(&bytes)
}

pub fn decode_tensor(bytes: &[u8]) -> Result<(StackedTensor, ClassLabel)> {
    let need = |n: usize| -> Result<()> {
        if bytes.len() < n {
            Err(Error::TensorLengthMismatch {
                expected: n,
                actual: bytes.len(),
            })
        } else {
            Ok(())
        }
    };

    need(21)?;
    if bytes[0..4] != MAGIC {
        return Err(Error::TensorMagicMismatch {
            found: bytes[0..4].try_into().unwrap(),
        });
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let (k, h, w) = (u32_at(4), u32_at(8), u32_at(12));
    let dtype = bytes[16];
    if dtype != DTYPE_F32_LE {
        return Err(Error::TensorDtypeMismatch { code: dtype });
    }
    let label_len = u32_at(17);
    need(21 + label_len + 32)?;
    let label_str = std::str::from_utf8(&bytes[21..21 + label_len])
        .map_err(|_| Error::InvalidParameter("tensor label is not valid UTF-8".into()))?;
    let label = ClassLabel::parse(label_str);

    let mut at = 21 + label_len;
    let mut f64_next = || {
        let v = f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        at += 8;
        v
    };
    let (f_lo, f_hi, t_lo, t_hi) = (f64_next(), f64_next(), f64_next(), f64_next());

    let expected = at + k * h * w * 4;
    if bytes.len() != expected {
        return Err(Error::TensorLengthMismatch {
            expected,
            actual: bytes.len(),
        });
    }
    let mut values = Vec::with_capacity(k * h * w);
    for i in 0..k * h * w {
        let off = at + i * 4;
        values.push(f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64);
    }
    let values = Array3::from_shape_vec((k, h, w), values)
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;

    let tensor = StackedTensor::from_parts(values, axis(f_lo, f_hi, h), axis(t_lo, t_hi, w), Vec::new())?;
    Ok((tensor, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(seed: u64, k: usize, h: usize, w: usize) -> StackedTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // f32-valued data: that is what the container stores.
        let values = Array3::from_shape_fn((k, h, w), |_| rng.random_range(-120.0f32..20.0) as f64);
        StackedTensor::from_parts(
            values,
            (0..h).map(|i| 10.0 + i as f64).collect(),
            (0..w).map(|i| 0.5 + i as f64 * 0.25).collect(),
            Vec::new(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sst");
        let tensor = random_tensor(1, 3, 16, 9);
        write_tensor(&tensor, &ClassLabel::Sw, &path).unwrap();
        let (back, label) = read_tensor(&path).unwrap();
        assert_eq!(label, ClassLabel::Sw);
        assert_eq!(back.values(), tensor.values());
        assert_eq!(back.grid_freq_axis()[0], 10.0);
        assert_eq!(*back.grid_time_axis().last().unwrap(), 0.5 + 8.0 * 0.25);

        // Writing what was read reproduces the file byte for byte.
        let path2 = dir.path().join("t2.sst");
        write_tensor(&back, &label, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn file_size_matches_header_plus_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sst");
        let tensor = random_tensor(2, 3, 256, 128);
        write_tensor(&tensor, &ClassLabel::Bw, &path).unwrap();
        let size = std::fs::metadata(&path).unwrap().len() as usize;
        assert_eq!(size, 53 + 2 + 3 * 256 * 128 * 4);
    }

    #[test]
    fn bad_magic_is_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sst");
        write_tensor(&random_tensor(3, 1, 4, 4), &ClassLabel::Ab, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0..4].copy_from_slice(b"XXXX");
        match decode_tensor(&bytes) {
            Err(Error::TensorMagicMismatch { found }) => assert_eq!(&found, b"XXXX"),
            other => panic!("expected TensorMagicMismatch, got {other:?}"),
        }
    }

    #[test]
    fn bad_dtype_is_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sst");
        write_tensor(&random_tensor(4, 1, 4, 4), &ClassLabel::Ab, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[16] = 7;
        match decode_tensor(&bytes) {
            Err(Error::TensorDtypeMismatch { code }) => assert_eq!(code, 7),
            other => panic!("expected TensorDtypeMismatch, got {other:?}"),
        }
    }

    #[test]
    fn length_mismatch_is_distinct() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sst");
        write_tensor(&random_tensor(5, 1, 4, 4), &ClassLabel::Ab, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        assert!(matches!(
            decode_tensor(&bytes),
            Err(Error::TensorLengthMismatch { .. })
        ));
        bytes.extend_from_slice(&[0u8; 8]);
        assert!(matches!(
            decode_tensor(&bytes),
            Err(Error::TensorLengthMismatch { .. })
        ));
    }
}
