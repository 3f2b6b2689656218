//! External file formats.
//!
//! Everything on disk is little-endian and platform-independent: WAV
//! (RIFF/PCM) ingestion and emission, the annotation CSV, the SST1 stacked
//! tensor container, and the dataset manifest CSV. Readers reject malformed
//! input outright rather than silently truncating.

pub mod annotations;
pub mod manifest;
pub mod tensor;
pub mod wav;

pub use annotations::{read_annotations, write_annotations};
pub use manifest::{read_manifest, write_manifest, Manifest, ManifestEntry, Partition};
pub use tensor::{read_tensor, write_tensor};
pub use wav::{read_wav, write_wav_i16};
