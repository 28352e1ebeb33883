//! Scene-text image synthesis with perceptually separated text grays.
//!
//! Each word is rasterized, its 2-pixel ring is laid over a random spot of a
//! background photo, and the gray levels found under that ring decide which
//! text grays are allowed: only levels that the background does not use and
//! that stay more than a margin (16 by default) away from every used level.
//! When no level qualifies, another spot is tried, up to 20 times.

pub mod assets;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod glyph;
pub mod gray;
pub mod pipeline;
pub mod validate;

pub use assets::{load_backgrounds, load_corpus, load_fonts, Assets, BackgroundPool, FontLibrary, WordCorpus};
pub use dataset::{AnnotationRecord, DatasetManifest, InstanceRecord};
pub use error::{Error, Result};
pub use generate::{generate_dataset, AssetPaths, GenerateOptions, GenerationSummary};
pub use glyph::{border_of, dilate, rasterize, BorderMask, FontFace, GlyphMask, Quad, TextStyle};
pub use gray::{
    design_colors, edge_colors, histogram_from_samples, unused_grays, AnalysisThresholds, ColorAnalysis,
    GrayHistogram, GrayLevelSet,
};
pub use pipeline::{
    composite, pick_color, sample_border_grays, synthesize_image, to_gray, try_place, BackgroundState,
    Placement, SynthesisConfig, TextInstance,
};
pub use validate::{validate_dataset, ValidationReport, Violation};
