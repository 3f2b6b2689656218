//! `specstack process`: turn a corpus (recordings + annotations) into
//! tensors and a manifest.
//!
//! Work is distributed over a rayon pool, one item per annotation plus the
//! configured number of ambient draws per annotation-free recording. Every
//! item's randomness comes from a seed derived from (master seed, recording
//! id, item index), so the output tree is byte-identical for any worker
//! count.

use anyhow::{Context, Result};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use specstack::dataset::{
    derive_seed, extract_excerpt, sample_containing, sample_ambient, Annotation,
};
use specstack::io::manifest::{self, ManifestEntry, Partition};
use specstack::io::{read_annotations, read_wav, write_tensor};

use crate::config::PipelineConfig;

#[derive(Debug, Clone)]
enum Item {
    Annotated { anno: Annotation, index: u64 },
    Ambient { recording_id: String, index: u64 },
}

impl Item {
    fn recording_id(&self) -> &str {
        match self {
            Item::Annotated { anno, .. } => &anno.recording_id,
            Item::Ambient { recording_id, .. } => recording_id,
        }
    }

    fn index(&self) -> u64 {
        match self {
            Item::Annotated { index, .. } | Item::Ambient { index, .. } => *index,
        }
    }
}

pub struct ProcessSummary {
    pub written: usize,
    pub failures: Vec<String>,
}

pub fn run(config: &PipelineConfig, corpus_dir: &Path, out_dir: &Path) -> Result<ProcessSummary> {
    let annotations_csv = specstack::synth::annotations_path(corpus_dir);
    let annotations = read_annotations(&annotations_csv)
        .with_context(|| format!("reading {}", annotations_csv.display()))?;

    // Ambient recordings are the ones no annotation points at.
    let recordings_dir = corpus_dir.join("recordings");
    let mut annotated: BTreeMap<String, u64> = BTreeMap::new();
    let mut items = Vec::new();
    for anno in annotations {
        let index = annotated.entry(anno.recording_id.clone()).or_insert(0);
        items.push(Item::Annotated {
            anno,
            index: *index,
        });
        *index += 1;
    }
    let mut wavs: Vec<PathBuf> = std::fs::read_dir(&recordings_dir)
        .with_context(|| format!("listing {}", recordings_dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "wav"))
        .collect();
    wavs.sort();
    for path in &wavs {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        if !annotated.contains_key(&id) {
            for j in 0..config.ambient_per_recording {
                items.push(Item::Ambient {
                    recording_id: id.clone(),
                    index: j as u64,
                });
            }
        }
    }

    let tensors_dir = out_dir.join("tensors");
    std::fs::create_dir_all(&tensors_dir)
        .with_context(|| format!("creating {}", tensors_dir.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .context("building worker pool")?;
    let results: Vec<std::result::Result<ManifestEntry, String>> = pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                process_item(item, config, corpus_dir, out_dir)
                    .map_err(|e| format!("{}[{}]: {e:#}", item.recording_id(), item.index()))
            })
            .collect()
    });

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(entry) => entries.push(entry),
            Err(message) => {
                log::error!("{message}");
                failures.push(message);
            }
        }
    }

    let manifest_path = out_dir.join("manifest.csv");
    manifest::write_entries(&manifest_path, &entries, None)?;
    if !failures.is_empty() {
        let failures_path = out_dir.join("failures.txt");
        std::fs::write(&failures_path, failures.join("\n") + "\n")
            .with_context(|| format!("writing {}", failures_path.display()))?;
    }

    println!(
        "processed {} samples ({} failures) -> {}",
        entries.len(),
        failures.len(),
        manifest_path.display()
    );
    Ok(ProcessSummary {
        written: entries.len(),
        failures,
    })
}

fn process_item(
    item: &Item,
    config: &PipelineConfig,
    corpus_dir: &Path,
    out_dir: &Path,
) -> Result<ManifestEntry> {
    let recording_id = item.recording_id();
    let wav_path = specstack::synth::recording_path(corpus_dir, recording_id);
    let audio = read_wav(&wav_path).with_context(|| format!("reading {}", wav_path.display()))?;
    let seed = derive_seed(config.seed, recording_id, item.index());

    let sample = match item {
        Item::Annotated { anno, .. } => {
            let excerpt = extract_excerpt(audio.duration_s(), anno, config.excerpt_len_s)?;
            sample_containing(excerpt, anno, config.sample_len_s, seed)
        }
        Item::Ambient { .. } => {
            sample_ambient(recording_id, audio.duration_s(), config.sample_len_s, seed)?
        }
    };

    let segment = audio.segment(sample.sample_start_s, sample.sample_len_s)?;
    let tensor = super::compute_tensor(&segment, config)?;

    let file_name = format!("{recording_id}_{:04}.sst", item.index());
    write_tensor(&tensor, &sample.label, &out_dir.join("tensors").join(&file_name))?;

    Ok(ManifestEntry {
        partition: Partition::Unassigned,
        sample,
        tensor_path: format!("tensors/{file_name}"),
    })
}
