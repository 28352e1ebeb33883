//! On-disk dataset layout.
//!
//! ```text
//! out/meta.json             run manifest
//! out/labels.jsonl          one AnnotationRecord per image, in index order
//! out/images/00000000.png   lossless images
//! out/analysis/00000000_0.csv   optional per-instance histograms
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Cursor, Write};
use std::path::{Path, PathBuf};

use image::{ImageFormat, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glyph::Quad;
use crate::gray::ColorAnalysis;
use crate::pipeline::{AbandonedWord, SynthesisConfig, TextInstance};

pub const MANIFEST_FILE: &str = "meta.json";
pub const LABELS_FILE: &str = "labels.jsonl";
pub const IMAGES_DIR: &str = "images";
pub const ANALYSIS_DIR: &str = "analysis";

pub fn image_file_name(index: u64) -> String {
    format!("{IMAGES_DIR}/{index:08}.png")
}

pub fn analysis_file_name(index: u64, instance: usize) -> String {
    format!("{ANALYSIS_DIR}/{index:08}_{instance}.csv")
}

/// Per-instance projection stored in `labels.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub word: String,
    pub font_id: usize,
    pub pixel_height: u32,
    pub rotation_deg: f64,
    /// Top-left of the dilated word canvas.
    pub x: u32,
    pub y: u32,
    pub chosen_gray: u8,
    pub candidate_count: usize,
    pub retries_used: u32,
    pub quad: Quad,
    pub bbox: [f64; 4],
}

impl From<&TextInstance> for InstanceRecord {
    fn from(t: &TextInstance) -> Self {
        Self {
            word: t.word.clone(),
            font_id: t.style.font_id,
            pixel_height: t.style.pixel_height,
            rotation_deg: t.style.rotation_deg,
            x: t.placement.x,
            y: t.placement.y,
            chosen_gray: t.chosen_gray,
            candidate_count: t.candidate_count,
            retries_used: t.retries_used,
            quad: t.quad,
            bbox: t.bbox,
        }
    }
}

/// One line of `labels.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub index: u64,
    pub image: String,
    pub width: u32,
    pub height: u32,
    pub background_id: usize,
    pub instances: Vec<InstanceRecord>,
    pub abandoned: Vec<AbandonedWord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetSummary {
    pub fonts_dir: PathBuf,
    pub fonts_digest: String,
    pub font_count: usize,
    pub backgrounds_dir: PathBuf,
    pub backgrounds_digest: String,
    pub background_count: usize,
    pub corpus_file: PathBuf,
    pub corpus_digest: String,
    pub word_count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCounts {
    pub images: u64,
    pub instances: u64,
    pub abandoned: u64,
}

/// Fixed implementation choices recorded alongside every dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignChoices {
    pub gray_conversion: String,
    pub structuring_element: String,
    pub binarization: String,
    pub rotation_resampling: String,
    pub analysis_state: String,
    pub text_color: String,
    pub compositing: String,
    pub placement: String,
    pub retry_policy: String,
    pub rng: String,
}

impl DesignChoices {
    pub fn current(config: &SynthesisConfig) -> Self {
        Self {
            gray_conversion: "floor((r+g+b)/3)".into(),
            structuring_element: format!("square, chebyshev radius {}", config.border_radius),
            binarization: "coverage > 0.5".into(),
            rotation_resampling: "nearest neighbour".into(),
            analysis_state: "composited".into(),
            text_color: "achromatic (g,g,g)".into(),
            compositing: if config.alpha_blend {
                "hard ink + linear blend of partial coverage".into()
            } else {
                "hard".into()
            },
            placement: "uniform top-left of dilated canvas".into(),
            retry_policy: format!("{} placements, then abandon", config.max_retries),
            rng: "ChaCha8, seeded by seed, stream = image index".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub tool: String,
    pub version: String,
    /// Unix seconds; the only field that differs between identical runs.
    pub created_at: u64,
    pub config: SynthesisConfig,
    pub emit_analysis: bool,
    pub assets: AssetSummary,
    pub counts: DatasetCounts,
    pub design: DesignChoices,
}

impl DatasetManifest {
    pub fn new(config: &SynthesisConfig, assets: AssetSummary, counts: DatasetCounts, emit_analysis: bool) -> Self {
        let created_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            tool: "graysynth".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            created_at,
            config: config.clone(),
            emit_analysis,
            assets,
            counts,
            design: DesignChoices::current(config),
        }
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(&path, e))
    }
}

pub fn create_layout(out_dir: &Path, emit_analysis: bool) -> Result<()> {
    let mut dirs = vec![out_dir.join(IMAGES_DIR)];
    if emit_analysis {
        dirs.push(out_dir.join(ANALYSIS_DIR));
    }
    for d in dirs {
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    Ok(())
}

pub fn encode_png(image: &RgbImage) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::with_capacity(image.as_raw().len() / 2));
    image
        .write_to(&mut buf, ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    buf.into_inner()
}

/// 256 rows of `gray,count,is_candidate` after a header.
pub fn analysis_csv(analysis: &ColorAnalysis) -> String {
    let mut out = String::from("gray,count,is_candidate\n");
    for g in 0..=255u8 {
        out.push_str(&format!(
            "{g},{},{}\n",
            analysis.histogram.count(g),
            u8::from(analysis.candidates.contains(g))
        ));
    }
    out
}

/// Image and optional analysis files for one sample; safe to call from
/// several threads for distinct indices. Returns the paths written.
pub fn write_sample_files(
    out_dir: &Path,
    index: u64,
    png: &[u8],
    analyses: Option<&[ColorAnalysis]>,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let image_path = out_dir.join(image_file_name(index));
    fs::write(&image_path, png).map_err(|e| Error::io(&image_path, e))?;
    written.push(image_path);
    for (k, analysis) in analyses.unwrap_or_default().iter().enumerate() {
        let path = out_dir.join(analysis_file_name(index, k));
        fs::write(&path, analysis_csv(analysis)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Sole owner of `labels.jsonl`.
pub struct LabelWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl LabelWriter {
    pub fn create(out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let path = out_dir.join(LABELS_FILE);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            path,
            out: BufWriter::new(file),
        })
    }

    pub fn append(&mut self, record: &AnnotationRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record).map_err(|e| Error::json(&self.path, e))?;
        self.out
            .write_all(b"\n")
            .map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Writes one sample end to end: image, analysis files when given, and its
/// labels line.
pub fn write_sample(
    out_dir: &Path,
    labels: &mut LabelWriter,
    image: &RgbImage,
    record: &AnnotationRecord,
    analyses: Option<&[ColorAnalysis]>,
) -> Result<Vec<PathBuf>> {
    create_layout(out_dir, analyses.is_some())?;
    let paths = write_sample_files(out_dir, record.index, &encode_png(image), analyses)?;
    labels.append(record)?;
    Ok(paths)
}

pub fn write_manifest(manifest: &DatasetManifest, out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::json(&path, e))?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
