//! Dataset manifest CSV: one row per sample with its partition, provenance,
//! seed, and tensor file, so a processed dataset can be reproduced or
//! reloaded exactly.
//!
//! An optional leading `# ratios,<train>,<val>,<test>` comment line carries
//! the split ratios; floats are written in shortest round-trip form, so a
//! write/read cycle is lossless.

use std::path::Path;
use std::str::FromStr;

use crate::dataset::{Annotation, ClassLabel, DatasetSplit, LabeledSample};
use crate::error::{Error, Result};

pub const HEADER: [&str; 11] = [
    "partition",
    "recording_id",
    "sample_start",
    "sample_len",
    "label",
    "rng_seed",
    "anno_t_start",
    "anno_t_end",
    "anno_f_lo",
    "anno_f_hi",
    "tensor_path",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Partition {
    Train,
    Val,
    Test,
    /// Sample exists but has not been assigned by a split yet.
    Unassigned,
}

impl Partition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Val => "val",
            Partition::Test => "test",
            Partition::Unassigned => "unassigned",
        }
    }
}

impl FromStr for Partition {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Partition::Train),
            "val" => Ok(Partition::Val),
            "test" => Ok(Partition::Test),
            "unassigned" => Ok(Partition::Unassigned),
            other => Err(format!("unknown partition {other:?}")),
        }
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub partition: Partition,
    pub sample: LabeledSample,
    /// Path of the sample's tensor file, relative to the manifest; empty
    /// when tensors have not been materialized.
    pub tensor_path: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub ratios: Option<(f64, f64, f64)>,
}

impl Manifest {
    /// Reassemble a [`DatasetSplit`]. Fails if any entry is unassigned or
    /// the manifest carries no ratios.
    pub fn to_split(&self) -> Result<DatasetSplit> {
        let ratios = self.ratios.ok_or_else(|| {
            Error::InvalidParameter("manifest carries no split ratios".into())
        })?;
        let mut split = DatasetSplit {
            train: Vec::new(),
            val: Vec::new(),
            test: Vec::new(),
            ratios,
        };
        for entry in &self.entries {
            match entry.partition {
                Partition::Train => split.train.push(entry.sample.clone()),
                Partition::Val => split.val.push(entry.sample.clone()),
                Partition::Test => split.test.push(entry.sample.clone()),
                Partition::Unassigned => {
                    return Err(Error::InvalidParameter(
                        "manifest holds unassigned samples; run the split first".into(),
                    ))
                }
            }
        }
        Ok(split)
    }
}

fn schema_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::CsvSchema {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Write manifest entries, with the ratios comment when given.
pub fn write_entries(
    path: &Path,
    entries: &[ManifestEntry],
    ratios: Option<(f64, f64, f64)>,
) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = String::new();
    if let Some((a, b, c)) = ratios {
        text.push_str(&format!("# ratios,{a},{b},{c}\n"));
    }
    text.push_str(&HEADER.join(","));
    text.push('\n');

    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    for entry in entries {
        let s = &entry.sample;
        let anno = s.source_annotation.as_ref();
        let field = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writer
            .write_record([
                entry.partition.as_str(),
                s.recording_id.as_str(),
                &s.sample_start_s.to_string(),
                &s.sample_len_s.to_string(),
                s.label.as_str(),
                &s.rng_seed_used.to_string(),
                &field(anno.map(|a| a.t_start_s)),
                &field(anno.map(|a| a.t_end_s)),
                &field(anno.map(|a| a.f_lo_hz)),
                &field(anno.map(|a| a.f_hi_hz)),
                entry.tensor_path.as_str(),
            ])
            .map_err(|e| schema_err(path, 0, e.to_string()))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| schema_err(path, 0, e.to_string()))?;
    text.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write a split as a manifest (no tensor paths).
pub fn write_manifest(split: &DatasetSplit, path: &Path) -> Result<()> {
    let mut entries = Vec::with_capacity(split.len());
    for (partition, samples) in [
        (Partition::Train, &split.train),
        (Partition::Val, &split.val),
        (Partition::Test, &split.test),
    ] {
        entries.extend(samples.iter().map(|s| ManifestEntry {
            partition,
            sample: s.clone(),
            tensor_path: String::new(),
        }));
    }
    write_entries(path, &entries, Some(split.ratios))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    // Leading comment lines; only the ratios line is meaningful.
    let mut ratios = None;
    let mut comment_lines = 0u64;
    let mut body_start = 0usize;
    for line in text.split_inclusive('\n') {
        if !line.starts_with('#') {
            break;
        }
        comment_lines += 1;
        body_start += line.len();
        let fields: Vec<&str> = line.trim_start_matches('#').trim().split(',').collect();
        if fields.len() == 4 && fields[0].trim() == "ratios" {
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| schema_err(path, comment_lines, format!("bad ratio {s:?}")))
            };
            ratios = Some((parse(fields[1])?, parse(fields[2])?, parse(fields[3])?));
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text[body_start..].as_bytes());
    let line_of = |record: &csv::StringRecord| {
        comment_lines + record.position().map(|p| p.line()).unwrap_or(0)
    };

    let headers = reader
        .headers()
        .map_err(|e| schema_err(path, comment_lines + 1, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(schema_err(
            path,
            comment_lines + 1,
            format!("expected header {:?}, found {:?}", HEADER.join(","), headers),
        ));
    }

    let mut entries = Vec::new();
    let mut seen_keys = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema_err(path, comment_lines, e.to_string()))?;
        let line = line_of(&record);
        if record.len() != HEADER.len() {
            return Err(schema_err(
                path,
                line,
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }

        let partition = Partition::from_str(&record[0]).map_err(|e| schema_err(path, line, e))?;
        let num = |idx: usize| -> Result<f64> {
            record[idx].parse::<f64>().map_err(|_| {
                schema_err(
                    path,
                    line,
                    format!("bad {} value {:?}", HEADER[idx], &record[idx]),
                )
            })
        };
        let seed = record[5].parse::<u64>().map_err(|_| {
            schema_err(path, line, format!("bad rng_seed value {:?}", &record[5]))
        })?;
        let label = ClassLabel::parse(&record[4]);

        let anno_fields = [&record[6], &record[7], &record[8], &record[9]];
        let present = anno_fields.iter().filter(|f| !f.is_empty()).count();
        let source_annotation = match present {
            0 => None,
            4 => Some(
                Annotation::new(&record[1], num(6)?, num(7)?, num(8)?, num(9)?, label.clone())
                    .map_err(|e| schema_err(path, line, e.to_string()))?,
            ),
            _ => {
                return Err(schema_err(
                    path,
                    line,
                    "annotation fields must be all present or all empty",
                ))
            }
        };

        if !seen_keys.insert((record[1].to_string(), record[2].to_string(), record[0].to_string()))
        {
            return Err(schema_err(
                path,
                line,
                format!(
                    "duplicate sample ({}, {}, {})",
                    &record[1], &record[2], &record[0]
                ),
            ));
        }

        let sample = LabeledSample {
            recording_id: record[1].to_string(),
            sample_start_s: num(2)?,
            sample_len_s: num(3)?,
            label,
            source_annotation,
            rng_seed_used: seed,
        };
        sample
            .validate()
            .map_err(|e| schema_err(path, line, e.to_string()))?;

        entries.push(ManifestEntry {
            partition,
            sample,
            tensor_path: record[10].to_string(),
        });
    }
    Ok(Manifest { entries, ratios })
}
