//! Whole-run driver: per-image sampling, parallel synthesis, ordered output.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::assets::Assets;
use crate::dataset::{
    create_layout, encode_png, image_file_name, write_manifest, write_sample_files, AnnotationRecord,
    AssetSummary, DatasetCounts, DatasetManifest, InstanceRecord, LabelWriter,
};
use crate::error::{Error, Result};
use crate::pipeline::{
    image_rng, sample_style, synthesize_image, BackgroundState, StageTimings, SynthesisConfig,
    SynthesizedImage, WordRequest,
};

/// Images synthesized per worker between ordered flushes of `labels.jsonl`.
const BATCH_PER_WORKER: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssetPaths {
    pub fonts: PathBuf,
    pub backgrounds: PathBuf,
    pub corpus: PathBuf,
}

impl AssetPaths {
    pub fn load(&self, min_background: [u32; 2]) -> Result<Assets> {
        Assets::load(&self.fonts, &self.backgrounds, &self.corpus, min_background)
    }

    pub fn summarize(&self, assets: &Assets) -> AssetSummary {
        AssetSummary {
            fonts_dir: self.fonts.clone(),
            fonts_digest: assets.fonts.digest.clone(),
            font_count: assets.fonts.len(),
            backgrounds_dir: self.backgrounds.clone(),
            backgrounds_digest: assets.backgrounds.digest.clone(),
            background_count: assets.backgrounds.len(),
            corpus_file: self.corpus.clone(),
            corpus_digest: assets.corpus.digest.clone(),
            word_count: assets.corpus.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub count: u64,
    pub jobs: usize,
    pub emit_analysis: bool,
}

#[derive(Debug, Clone, Default)]
pub struct GenerationSummary {
    pub counts: DatasetCounts,
    pub elapsed: Duration,
    pub timings: StageTimings,
    pub encode: Duration,
}

impl GenerationSummary {
    pub fn instances_per_sec(&self) -> f64 {
        self.counts.instances as f64 / self.elapsed.as_secs_f64().max(f64::EPSILON)
    }
}

/// Image `index` of a run, drawn from its own random stream so the result
/// does not depend on which thread renders it or in what order.
pub fn synthesize_indexed(
    assets: &Assets,
    config: &SynthesisConfig,
    index: u64,
    timings: &mut StageTimings,
) -> Result<(usize, SynthesizedImage)> {
    let mut rng = image_rng(config.seed, index);
    let background_id = rng.gen_range(0..assets.backgrounds.len());
    let words: Vec<WordRequest> = (0..config.words_per_image)
        .map(|_| {
            let words = assets.corpus.words();
            let word = words[rng.gen_range(0..words.len())].clone();
            let style = sample_style(assets.fonts.len(), config, &mut rng);
            WordRequest { word, style }
        })
        .collect();
    let background = BackgroundState::new((*assets.backgrounds.image(background_id)?).clone());
    let image = synthesize_image(
        background,
        &words,
        assets.fonts.faces(),
        config,
        &mut rng,
        timings,
    );
    Ok((background_id, image))
}

pub fn annotation_for(index: u64, background_id: usize, image: &SynthesizedImage) -> AnnotationRecord {
    AnnotationRecord {
        index,
        image: image_file_name(index),
        width: image.image.width(),
        height: image.image.height(),
        background_id,
        instances: image.instances.iter().map(InstanceRecord::from).collect(),
        abandoned: image.abandoned.clone(),
    }
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {jobs} workers: {e}")))
}

struct Rendered {
    record: AnnotationRecord,
    timings: StageTimings,
    encode: Duration,
}

/// Generates `options.count` images into `out_dir` and writes the manifest.
pub fn generate_dataset(
    assets: &Assets,
    paths: &AssetPaths,
    config: &SynthesisConfig,
    options: &GenerateOptions,
    out_dir: &Path,
) -> Result<(GenerationSummary, DatasetManifest)> {
    config.validate()?;
    if options.count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    let start = Instant::now();
    create_layout(out_dir, options.emit_analysis)?;
    let mut labels = LabelWriter::create(out_dir)?;
    let pool = thread_pool(options.jobs)?;
    let batch = (BATCH_PER_WORKER * options.jobs.max(1)) as u64;

    let mut summary = GenerationSummary::default();
    let mut first = 0u64;
    while first < options.count {
        let last = (first + batch).min(options.count);
        let rendered: Vec<Rendered> = pool.install(|| {
            (first..last)
                .into_par_iter()
                .map(|index| {
                    let mut timings = StageTimings::default();
                    let (bg, image) = synthesize_indexed(assets, config, index, &mut timings)?;
                    let t = Instant::now();
                    let png = encode_png(&image.image);
                    let encode = t.elapsed();
                    let analyses = options.emit_analysis.then_some(image.analyses.as_slice());
                    write_sample_files(out_dir, index, &png, analyses)?;
                    Ok(Rendered {
                        record: annotation_for(index, bg, &image),
                        timings,
                        encode,
                    })
                })
                .collect::<Result<_>>()
        })?;
        for r in rendered {
            labels.append(&r.record)?;
            summary.counts.images += 1;
            summary.counts.instances += r.record.instances.len() as u64;
            summary.counts.abandoned += r.record.abandoned.len() as u64;
            summary.timings.add(&r.timings);
            summary.encode += r.encode;
        }
        first = last;
    }
    labels.finish()?;

    let manifest = DatasetManifest::new(
        config,
        paths.summarize(assets),
        summary.counts,
        options.emit_analysis,
    );
    write_manifest(&manifest, out_dir)?;
    summary.elapsed = start.elapsed();
    Ok((summary, manifest))
}
