//! Flags merged over an optional JSON config file; flags win.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use graysynth_core::gray::AnalysisThresholds;
use graysynth_core::{AssetPaths, SynthesisConfig};
use serde::Deserialize;

/// Everything a config file may set. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub backgrounds: Option<PathBuf>,
    pub fonts: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub count: Option<u64>,
    pub jobs: Option<usize>,
    pub emit_analysis: Option<bool>,
    pub words_per_image: Option<u32>,
    pub seed: Option<u64>,
    pub min_margin: Option<u8>,
    pub vertical_thresh: Option<f64>,
    pub max_retries: Option<u32>,
    pub alpha_blend: Option<bool>,
    pub min_height: Option<u32>,
    pub max_height: Option<u32>,
    pub min_rotation: Option<f64>,
    pub max_rotation: Option<f64>,
    pub border_radius: Option<u32>,
    pub min_background: Option<[u32; 2]>,
}

impl FileConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flags shared by `generate` and `bench`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of background images (PNG/JPEG), searched recursively.
    #[arg(long)]
    pub backgrounds: Option<PathBuf>,
    /// Directory of TrueType/OpenType fonts, searched recursively.
    #[arg(long)]
    pub fonts: Option<PathBuf>,
    /// Newline-delimited word list.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Number of images.
    #[arg(long)]
    pub count: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub words_per_image: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum gray distance between text and any used background gray.
    #[arg(long)]
    pub min_margin: Option<u8>,
    /// Fraction of the peak histogram bin at or below which a gray is unused.
    #[arg(long)]
    pub vertical_thresh: Option<f64>,
    /// Placements tried per word before it is abandoned.
    #[arg(long)]
    pub max_retries: Option<u32>,
    /// Blend partially covered edge pixels.
    #[arg(long)]
    pub alpha_blend: bool,
    #[arg(long)]
    pub min_height: Option<u32>,
    #[arg(long)]
    pub max_height: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub min_rotation: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub max_rotation: Option<f64>,
    /// Width of the sampled ring around each word, in pixels.
    #[arg(long)]
    pub border_radius: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub assets: AssetPaths,
    pub synthesis: SynthesisConfig,
    pub count: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub emit_analysis: bool,
}

impl CliConfig {
    pub fn resolve(args: &RunArgs, out: Option<PathBuf>, emit_analysis: bool) -> Result<Self> {
        let file = match &args.config {
            Some(path) => FileConfig::read(path)?,
            None => FileConfig::default(),
        };
        Self::merge(args, file, out, emit_analysis)
    }

    pub fn merge(args: &RunArgs, file: FileConfig, out: Option<PathBuf>, emit_analysis: bool) -> Result<Self> {
        let required = |flag: Option<&PathBuf>, fallback: Option<PathBuf>, name: &str| {
            flag.cloned()
                .or(fallback)
                .with_context(|| format!("--{name} is required (as a flag or in the config file)"))
        };
        let assets = AssetPaths {
            backgrounds: required(args.backgrounds.as_ref(), file.backgrounds, "backgrounds")?,
            fonts: required(args.fonts.as_ref(), file.fonts, "fonts")?,
            corpus: required(args.corpus.as_ref(), file.corpus, "corpus")?,
        };
        let Some(count) = args.count.or(file.count) else {
            bail!("--count is required (as a flag or in the config file)");
        };
        if count == 0 {
            bail!("--count must be at least 1");
        }
        let jobs = args.jobs.or(file.jobs).unwrap_or(1);
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }

        let d = SynthesisConfig::default();
        let synthesis = SynthesisConfig {
            thresholds: AnalysisThresholds {
                vertical_fraction: args
                    .vertical_thresh
                    .or(file.vertical_thresh)
                    .unwrap_or(d.thresholds.vertical_fraction),
                min_margin: args.min_margin.or(file.min_margin).unwrap_or(d.thresholds.min_margin),
            },
            max_retries: args.max_retries.or(file.max_retries).unwrap_or(d.max_retries),
            words_per_image: args.words_per_image.or(file.words_per_image).unwrap_or(d.words_per_image),
            height_range: [
                args.min_height.or(file.min_height).unwrap_or(d.height_range[0]),
                args.max_height.or(file.max_height).unwrap_or(d.height_range[1]),
            ],
            rotation_range: [
                args.min_rotation.or(file.min_rotation).unwrap_or(d.rotation_range[0]),
                args.max_rotation.or(file.max_rotation).unwrap_or(d.rotation_range[1]),
            ],
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            alpha_blend: args.alpha_blend || file.alpha_blend.unwrap_or(false),
            border_radius: args.border_radius.or(file.border_radius).unwrap_or(d.border_radius),
            min_background: file.min_background.unwrap_or(d.min_background),
        };
        synthesis.validate()?;

        Ok(Self {
            assets,
            synthesis,
            count,
            jobs,
            out: out.or(file.out),
            emit_analysis: emit_analysis || file.emit_analysis.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_args() -> RunArgs {
        RunArgs {
            backgrounds: Some("bg".into()),
            fonts: Some("fonts".into()),
            corpus: Some("words.txt".into()),
            count: Some(10),
            ..Default::default()
        }
    }

    #[test]
    fn defaults_are_the_reference_operating_point() {
        let c = CliConfig::merge(&base_args(), FileConfig::default(), None, false).unwrap();
        assert_eq!(c.synthesis.thresholds.min_margin, 16);
        assert_eq!(c.synthesis.thresholds.vertical_fraction, 0.0);
        assert_eq!(c.synthesis.max_retries, 20);
        assert_eq!(c.synthesis.border_radius, 2);
        assert_eq!(c.synthesis.words_per_image, 1);
        assert_eq!(c.synthesis.seed, 0);
        assert!(!c.synthesis.alpha_blend);
        assert_eq!(c.jobs, 1);
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = serde_json::from_str(
            r#"{"seed": 5, "min_margin": 8, "count": 3, "out": "from-file", "jobs": 2}"#,
        )
        .unwrap();
        let args = RunArgs { seed: Some(9), ..base_args() };
        let c = CliConfig::merge(&args, file, None, false).unwrap();
        assert_eq!(c.synthesis.seed, 9);
        assert_eq!(c.synthesis.thresholds.min_margin, 8);
        assert_eq!(c.count, 10);
        assert_eq!(c.jobs, 2);
        assert_eq!(c.out, Some(PathBuf::from("from-file")));
    }

    #[test]
    fn file_can_supply_required_paths() {
        let file: FileConfig =
            serde_json::from_str(r#"{"backgrounds": "b", "fonts": "f", "corpus": "c", "count": 4}"#).unwrap();
        let c = CliConfig::merge(&RunArgs::default(), file, None, false).unwrap();
        assert_eq!(c.assets.fonts, PathBuf::from("f"));
        assert_eq!(c.count, 4);
    }

    #[test]
    fn invalid_combinations_are_rejected() {
        let zero = RunArgs { count: Some(0), ..base_args() };
        assert!(CliConfig::merge(&zero, FileConfig::default(), None, false).is_err());
        let no_fonts = RunArgs { fonts: None, ..base_args() };
        let err = CliConfig::merge(&no_fonts, FileConfig::default(), None, false).unwrap_err();
        assert!(err.to_string().contains("--fonts"));
        let heights = RunArgs { min_height: Some(50), max_height: Some(20), ..base_args() };
        assert!(CliConfig::merge(&heights, FileConfig::default(), None, false).is_err());
        let frac = RunArgs { vertical_thresh: Some(2.0), ..base_args() };
        assert!(CliConfig::merge(&frac, FileConfig::default(), None, false).is_err());
        let words = RunArgs { words_per_image: Some(0), ..base_args() };
        assert!(CliConfig::merge(&words, FileConfig::default(), None, false).is_err());
        assert!(serde_json::from_str::<FileConfig>(r#"{"sed": 1}"#).is_err());
    }
}
