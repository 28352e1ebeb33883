//! Per-image synthesis: placement sampling, border-ring analysis, color
//! choice with bounded retries, and compositing.
//!
//! Words in one image are handled strictly in order and each word is
//! analysed against the image as it stands after the previous words were
//! drawn, so text laid over earlier text also keeps its margin.

use std::time::{Duration, Instant};

use image::{Rgb, RgbImage};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glyph::{
    border_with_radius, render_word, BorderMask, FontFace, GlyphMask, Quad, RenderedWord,
    TextStyle, DEFAULT_BORDER_RADIUS,
};
use crate::gray::{design_colors, AnalysisThresholds, ColorAnalysis, GrayHistogram, GrayLevelSet};

pub const DEFAULT_MAX_RETRIES: u32 = 20;

/// Floor of the channel mean.
#[inline]
pub fn to_gray(r: u8, g: u8, b: u8) -> u8 {
    ((r as u16 + g as u16 + b as u16) / 3) as u8
}

/// The image being written into.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundState {
    image: RgbImage,
}

impl BackgroundState {
    pub fn new(image: RgbImage) -> Self {
        Self { image }
    }

    /// Uniform `(gray, gray, gray)` canvas.
    pub fn uniform(width: u32, height: u32, gray: u8) -> Self {
        Self::new(RgbImage::from_pixel(width, height, Rgb([gray; 3])))
    }

    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }

    pub fn image(&self) -> &RgbImage {
        &self.image
    }

    pub fn into_image(self) -> RgbImage {
        self.image
    }

    #[inline]
    pub fn gray_at(&self, x: u32, y: u32) -> u8 {
        let Rgb([r, g, b]) = *self.image.get_pixel(x, y);
        to_gray(r, g, b)
    }

    fn check_region(&self, x: u32, y: u32, width: u32, height: u32) -> Result<()> {
        let fits = x.checked_add(width).is_some_and(|e| e <= self.width())
            && y.checked_add(height).is_some_and(|e| e <= self.height());
        if fits {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                x,
                y,
                width,
                height,
                image_width: self.width(),
                image_height: self.height(),
            })
        }
    }
}

/// Top-left corner of the dilated word canvas within the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub x: u32,
    pub y: u32,
}

impl Placement {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// Where the glyph's own top-left lands for a ring of width `radius`.
    pub fn ink_origin(&self, radius: u32) -> Placement {
        Placement::new(self.x + radius, self.y + radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisConfig {
    pub thresholds: AnalysisThresholds,
    pub max_retries: u32,
    pub words_per_image: u32,
    /// Inclusive glyph pixel-height range.
    pub height_range: [u32; 2],
    /// Inclusive rotation range in degrees.
    pub rotation_range: [f64; 2],
    pub seed: u64,
    pub alpha_blend: bool,
    /// Width of the sampled ring around each word.
    pub border_radius: u32,
    /// Backgrounds smaller than this are skipped at load time.
    pub min_background: [u32; 2],
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            thresholds: AnalysisThresholds::default(),
            max_retries: DEFAULT_MAX_RETRIES,
            words_per_image: 1,
            height_range: [16, 64],
            rotation_range: [-15.0, 15.0],
            seed: 0,
            alpha_blend: false,
            border_radius: DEFAULT_BORDER_RADIUS,
            min_background: [64, 64],
        }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.thresholds.validate()?;
        if self.words_per_image == 0 {
            return bad("words per image must be at least 1".into());
        }
        let [hmin, hmax] = self.height_range;
        if hmin == 0 || hmin > hmax {
            return bad(format!("height range [{hmin}, {hmax}] must be non-empty and positive"));
        }
        let [rmin, rmax] = self.rotation_range;
        if !(rmin.is_finite() && rmax.is_finite()) || rmin > rmax {
            return bad(format!("rotation range [{rmin}, {rmax}] must be finite and ordered"));
        }
        if self.min_background[0] == 0 || self.min_background[1] == 0 {
            return bad("minimum background size must be positive".into());
        }
        Ok(())
    }
}

/// One word drawn into an image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextInstance {
    pub word: String,
    pub style: TextStyle,
    pub placement: Placement,
    pub chosen_gray: u8,
    pub candidate_count: usize,
    pub retries_used: u32,
    pub quad: Quad,
    /// `[min_x, min_y, max_x, max_y]` hull of `quad`.
    pub bbox: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbandonReason {
    /// Every retry produced an empty candidate set.
    NoCandidates,
    /// The word's ring is larger than the background.
    NoFit,
    MissingGlyph,
    ZeroArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbandonedWord {
    pub word: String,
    pub style: TextStyle,
    pub reason: AbandonReason,
    pub retries_used: u32,
    /// Placements tried before giving up.
    pub tried: Vec<Placement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlaceOutcome {
    Placed {
        placement: Placement,
        candidates: GrayLevelSet,
        histogram: Box<GrayHistogram>,
        retries_used: u32,
    },
    Abandoned {
        retries_used: u32,
        tried: Vec<Placement>,
    },
}

/// Histogram of the background under the ring, with the ring's top-left at
/// `placement`.
pub fn sample_border_grays(
    state: &BackgroundState,
    placement: Placement,
    border: &BorderMask,
) -> Result<GrayHistogram> {
    state.check_region(placement.x, placement.y, border.width(), border.height())?;
    let mut hist = GrayHistogram::new();
    let w = border.width() as usize;
    for (row, chunk) in border.bits().chunks(w.max(1)).enumerate() {
        let y = placement.y + row as u32;
        for (col, _) in chunk.iter().enumerate().filter(|(_, &b)| b) {
            hist.record(state.gray_at(placement.x + col as u32, y));
        }
    }
    Ok(hist)
}

/// Samples up to `config.max_retries` uniform placements and keeps the first
/// whose ring admits at least one text gray.
pub fn try_place<R: Rng + ?Sized>(
    border: &BorderMask,
    state: &BackgroundState,
    config: &SynthesisConfig,
    rng: &mut R,
) -> Result<PlaceOutcome> {
    if border.width() > state.width() || border.height() > state.height() {
        return Err(Error::NoFit {
            mask_width: border.width(),
            mask_height: border.height(),
            image_width: state.width(),
            image_height: state.height(),
        });
    }
    let max_x = state.width() - border.width();
    let max_y = state.height() - border.height();
    let mut tried = Vec::new();
    for attempt in 0..config.max_retries {
        let placement = Placement::new(rng.gen_range(0..=max_x), rng.gen_range(0..=max_y));
        let histogram = sample_border_grays(state, placement, border)?;
        let candidates = design_colors(&histogram, &config.thresholds);
        if !candidates.is_empty() {
            return Ok(PlaceOutcome::Placed {
                placement,
                candidates,
                histogram: Box::new(histogram),
                retries_used: attempt,
            });
        }
        tried.push(placement);
    }
    Ok(PlaceOutcome::Abandoned {
        retries_used: config.max_retries,
        tried,
    })
}

/// Uniform draw from the candidate set.
pub fn pick_color<R: Rng + ?Sized>(candidates: &GrayLevelSet, rng: &mut R) -> Result<u8> {
    candidates
        .levels()
        .choose(rng)
        .copied()
        .ok_or(Error::EmptyCandidates)
}

/// Paints `(gray, gray, gray)` under every ink bit, with the mask's top-left
/// at `origin`. Nothing else changes.
pub fn composite(
    state: &mut BackgroundState,
    mask: &GlyphMask,
    origin: Placement,
    gray: u8,
) -> Result<()> {
    state.check_region(origin.x, origin.y, mask.width(), mask.height())?;
    let ink = Rgb([gray; 3]);
    for (x, y) in mask.iter_set() {
        state.image.put_pixel(origin.x + x, origin.y + y, ink);
    }
    Ok(())
}

/// Like [`composite`], and additionally blends pixels with partial coverage
/// below the ink threshold linearly towards `gray`.
pub fn composite_blended(
    state: &mut BackgroundState,
    word: &RenderedWord,
    origin: Placement,
    gray: u8,
) -> Result<()> {
    let mask = &word.mask;
    state.check_region(origin.x, origin.y, mask.width(), mask.height())?;
    let w = mask.width() as usize;
    for (i, (&ink, &cov)) in mask.bits().iter().zip(&word.coverage).enumerate() {
        if !ink && cov <= 0.0 {
            continue;
        }
        let (x, y) = (origin.x + (i % w) as u32, origin.y + (i / w) as u32);
        let px = state.image.get_pixel_mut(x, y);
        if ink {
            *px = Rgb([gray; 3]);
        } else {
            let a = cov as f64;
            for ch in px.0.iter_mut() {
                *ch = (a * gray as f64 + (1.0 - a) * *ch as f64).round() as u8;
            }
        }
    }
    Ok(())
}

/// Accumulated wall-clock time per synthesis stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub rasterize: Duration,
    pub analyze: Duration,
    pub composite: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.rasterize + self.analyze + self.composite
    }

    pub fn add(&mut self, other: &StageTimings) {
        self.rasterize += other.rasterize;
        self.analyze += other.analyze;
        self.composite += other.composite;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordRequest {
    pub word: String,
    pub style: TextStyle,
}

#[derive(Debug, Clone)]
pub struct SynthesizedImage {
    pub image: RgbImage,
    pub instances: Vec<TextInstance>,
    /// Analysis behind each entry of `instances`, index for index.
    pub analyses: Vec<ColorAnalysis>,
    pub abandoned: Vec<AbandonedWord>,
}

impl SynthesizedImage {
    pub fn abandoned_count(&self) -> usize {
        self.abandoned.len()
    }
}

/// Draws `words` into `background` one after another.
///
/// `fonts[style.font_id]` must exist for every request. Per-word failures
/// (no fit, missing glyphs, exhausted retries) are reported in
/// `abandoned`; they never fail the image.
pub fn synthesize_image<R: Rng + ?Sized>(
    background: BackgroundState,
    words: &[WordRequest],
    fonts: &[FontFace],
    config: &SynthesisConfig,
    rng: &mut R,
    timings: &mut StageTimings,
) -> SynthesizedImage {
    let mut state = background;
    let mut instances = Vec::new();
    let mut analyses = Vec::new();
    let mut abandoned = Vec::new();
    let radius = config.border_radius;

    for req in words {
        let give_up = |reason, retries_used, tried| AbandonedWord {
            word: req.word.clone(),
            style: req.style,
            reason,
            retries_used,
            tried,
        };

        let t0 = Instant::now();
        let rendered = render_word(&fonts[req.style.font_id], &req.word, &req.style);
        let rendered = match rendered {
            Ok(r) => r,
            Err(e) => {
                timings.rasterize += t0.elapsed();
                let reason = match e {
                    Error::MissingGlyph(_) => AbandonReason::MissingGlyph,
                    _ => AbandonReason::ZeroArea,
                };
                log::debug!("abandoning {:?}: {e}", req.word);
                abandoned.push(give_up(reason, 0, Vec::new()));
                continue;
            }
        };
        let border = border_with_radius(&rendered.mask, radius);
        let t1 = Instant::now();
        timings.rasterize += t1 - t0;

        let outcome = try_place(&border, &state, config, rng);
        let t2 = Instant::now();
        timings.analyze += t2 - t1;

        let (placement, candidates, histogram, retries_used) = match outcome {
            Ok(PlaceOutcome::Placed {
                placement,
                candidates,
                histogram,
                retries_used,
            }) => (placement, candidates, histogram, retries_used),
            Ok(PlaceOutcome::Abandoned {
                retries_used,
                tried,
            }) => {
                log::debug!(
                    "abandoning {:?} after {retries_used} placements: {tried:?}",
                    req.word
                );
                abandoned.push(give_up(AbandonReason::NoCandidates, retries_used, tried));
                continue;
            }
            Err(e) => {
                log::debug!("abandoning {:?}: {e}", req.word);
                abandoned.push(give_up(AbandonReason::NoFit, 0, Vec::new()));
                continue;
            }
        };

        let gray = pick_color(&candidates, rng).expect("placed words have candidates");
        let origin = placement.ink_origin(radius);
        let drawn = if config.alpha_blend {
            composite_blended(&mut state, &rendered, origin, gray)
        } else {
            composite(&mut state, &rendered.mask, origin, gray)
        };
        drawn.expect("placement keeps the dilated canvas in bounds");

        let quad = rendered
            .quad
            .translate(origin.x as f64, origin.y as f64)
            .clamp(state.width() as f64, state.height() as f64);
        instances.push(TextInstance {
            word: req.word.clone(),
            style: req.style,
            placement,
            chosen_gray: gray,
            candidate_count: candidates.len(),
            retries_used,
            bbox: quad.hull(),
            quad,
        });
        analyses.push(ColorAnalysis::run(*histogram, &config.thresholds));
        timings.composite += t2.elapsed();
    }

    SynthesizedImage {
        image: state.into_image(),
        instances,
        analyses,
        abandoned,
    }
}

/// Random style within the configured ranges.
pub fn sample_style<R: Rng + ?Sized>(
    font_count: usize,
    config: &SynthesisConfig,
    rng: &mut R,
) -> TextStyle {
    let [hmin, hmax] = config.height_range;
    let [rmin, rmax] = config.rotation_range;
    TextStyle {
        font_id: rng.gen_range(0..font_count),
        pixel_height: rng.gen_range(hmin..=hmax),
        rotation_deg: rng.gen_range(rmin..=rmax),
    }
}

/// Independent random stream for image `index` of a run seeded with `seed`.
pub fn image_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
