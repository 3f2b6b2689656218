//! `specstack synth`: write a synthetic corpus to disk.

use anyhow::Result;
use std::path::Path;

use specstack::synth::{build_synthetic_corpus, SynthCorpusConfig};

use crate::config::PipelineConfig;

pub fn run(config: &PipelineConfig, out_dir: &Path) -> Result<()> {
    let corpus = corpus_config(config);
    let summary = build_synthetic_corpus(&corpus, out_dir)?;

    println!(
        "wrote {} recordings to {}",
        summary.recordings.len(),
        out_dir.display()
    );
    for (label, count) in &summary.annotation_counts {
        println!("  {label}: {count} annotations");
    }
    println!("  ambient-only recordings: {}", summary.ambient_recordings);
    println!(
        "annotation CSV: {}",
        specstack::synth::annotations_path(out_dir).display()
    );
    Ok(())
}

pub fn corpus_config(config: &PipelineConfig) -> SynthCorpusConfig {
    let mut corpus = SynthCorpusConfig::default_corpus(config.seed);
    corpus.recording_len_s = config.recording_len_s;
    corpus.ambient_noise_color = config.noise;
    if let Some(counts) = &config.counts {
        corpus = corpus.with_counts(counts);
    }
    if let Some(snr) = config.snr_db {
        corpus = corpus.with_uniform_snr(snr);
    }
    corpus
}
