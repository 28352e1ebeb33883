//! Re-checks a written dataset against its own labels.
//!
//! For every instance the word is rasterized again from the recorded style,
//! its ring is sampled from the saved PNG, and the recorded gray must keep
//! more than `min_margin` from every used level. Pixels that a later word in
//! the same image painted over (or, with blending enabled, tinted) no longer
//! show the state the instance was analysed against and are left out.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::assets::{load_fonts, FontLibrary};
use crate::dataset::{AnnotationRecord, DatasetManifest, InstanceRecord, LABELS_FILE, MANIFEST_FILE};
use crate::error::{Error, Result};
use crate::glyph::{border_with_radius, render_word, RenderedWord, TextStyle};
use crate::gray::{unused_grays, GrayHistogram};
use crate::pipeline::to_gray;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A labels line that does not parse.
    CorruptLabel { file: PathBuf, line: usize, message: String },
    MissingImage { line: usize, image: String },
    UnreadableImage { line: usize, image: String, message: String },
    ImageSize { line: usize, image: String, expected: (u32, u32), actual: (u32, u32) },
    /// A word cannot be re-rendered from its recorded style.
    Unrenderable { line: usize, instance: usize, word: String, message: String },
    OutOfBounds { line: usize, instance: usize, word: String },
    /// The recorded gray sits within the margin of a used ring gray.
    Contrast { line: usize, instance: usize, word: String, chosen_gray: u8, background_gray: u8, pixels: u64 },
    /// Ink pixels in the image do not carry the recorded gray.
    InkMismatch { line: usize, instance: usize, word: String, chosen_gray: u8, mismatched: usize },
    Count { what: &'static str, manifest: u64, found: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            CorruptLabel { file, line, message } => {
                write!(f, "{}:{line}: unparseable record: {message}", file.display())
            }
            MissingImage { line, image } => write!(f, "{LABELS_FILE}:{line}: missing image {image}"),
            UnreadableImage { line, image, message } => {
                write!(f, "{LABELS_FILE}:{line}: cannot decode {image}: {message}")
            }
            ImageSize { line, image, expected, actual } => write!(
                f,
                "{LABELS_FILE}:{line}: {image} is {}x{}, labels say {}x{}",
                actual.0, actual.1, expected.0, expected.1
            ),
            Unrenderable { line, instance, word, message } => write!(
                f,
                "{LABELS_FILE}:{line}: instance {instance} ({word:?}) cannot be re-rendered: {message}"
            ),
            OutOfBounds { line, instance, word } => {
                write!(f, "{LABELS_FILE}:{line}: instance {instance} ({word:?}) lies outside its image")
            }
            Contrast { line, instance, word, chosen_gray, background_gray, pixels } => write!(
                f,
                "{LABELS_FILE}:{line}: instance {instance} ({word:?}) gray {chosen_gray} is within the margin of background gray {background_gray} ({pixels} ring pixels)"
            ),
            InkMismatch { line, instance, word, chosen_gray, mismatched } => write!(
                f,
                "{LABELS_FILE}:{line}: instance {instance} ({word:?}) has {mismatched} ink pixels not equal to gray {chosen_gray}"
            ),
            Count { what, manifest, found } => {
                write!(f, "{MANIFEST_FILE} records {manifest} {what}, dataset has {found}")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub images: u64,
    pub instances: u64,
    /// Ring pixels skipped because a later word covers them.
    pub occluded_ring_pixels: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates `dir`. `fonts` overrides the font directory recorded in the
/// manifest. Errors are reserved for problems that stop validation
/// altogether (unreadable manifest, fonts that differ from the run's).
pub fn validate_dataset(dir: &Path, fonts: Option<&Path>) -> Result<ValidationReport> {
    let manifest = DatasetManifest::read(dir)?;
    let fonts_dir = fonts.map(Path::to_path_buf).unwrap_or_else(|| manifest.assets.fonts_dir.clone());
    let library = load_fonts(&fonts_dir)?;
    if library.digest != manifest.assets.fonts_digest {
        return Err(Error::InvalidConfig(format!(
            "fonts under {} do not match the ones this dataset was generated with",
            fonts_dir.display()
        )));
    }

    let labels_path = dir.join(LABELS_FILE);
    let file = File::open(&labels_path).map_err(|e| Error::io(&labels_path, e))?;
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(&labels_path, e))?;
        let record: AnnotationRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                report.violations.push(Violation::CorruptLabel {
                    file: labels_path.clone(),
                    line: line_no,
                    message: e.to_string(),
                });
                continue;
            }
        };
        report.images += 1;
        report.instances += record.instances.len() as u64;
        seen.insert(record.index);
        check_record(dir, &manifest, &library, &record, line_no, &mut report);
    }

    let counts = manifest.counts;
    for (what, expected, found) in [
        ("images", counts.images, report.images),
        ("instances", counts.instances, report.instances),
        ("distinct image indices", counts.images, seen.len() as u64),
    ] {
        if expected != found {
            report.violations.push(Violation::Count { what, manifest: expected, found });
        }
    }
    Ok(report)
}

fn check_record(
    dir: &Path,
    manifest: &DatasetManifest,
    library: &FontLibrary,
    record: &AnnotationRecord,
    line: usize,
    report: &mut ValidationReport,
) {
    let path = dir.join(&record.image);
    if !path.is_file() {
        report.violations.push(Violation::MissingImage { line, image: record.image.clone() });
        return;
    }
    let image = match image::open(&path) {
        Ok(img) => img.into_rgb8(),
        Err(e) => {
            report.violations.push(Violation::UnreadableImage {
                line,
                image: record.image.clone(),
                message: e.to_string(),
            });
            return;
        }
    };
    if image.dimensions() != (record.width, record.height) {
        report.violations.push(Violation::ImageSize {
            line,
            image: record.image.clone(),
            expected: (record.width, record.height),
            actual: image.dimensions(),
        });
        return;
    }

    let config = &manifest.config;
    let radius = config.border_radius;
    let (w, h) = image.dimensions();
    let blend = config.alpha_blend;

    let mut rendered: Vec<Option<RenderedWord>> = Vec::with_capacity(record.instances.len());
    for (k, inst) in record.instances.iter().enumerate() {
        let word = render_instance(library, inst);
        match word {
            Ok(r) => {
                let (dw, dh) = (r.mask.width() + 2 * radius, r.mask.height() + 2 * radius);
                if inst.x as u64 + dw as u64 > w as u64 || inst.y as u64 + dh as u64 > h as u64 {
                    report.violations.push(Violation::OutOfBounds { line, instance: k, word: inst.word.clone() });
                    rendered.push(None);
                } else {
                    rendered.push(Some(r));
                }
            }
            Err(message) => {
                report.violations.push(Violation::Unrenderable {
                    line,
                    instance: k,
                    word: inst.word.clone(),
                    message,
                });
                rendered.push(None);
            }
        }
    }

    // Pixels touched by instance k or any later one, walking backwards.
    let mut touched_later = vec![false; w as usize * h as usize];
    for k in (0..record.instances.len()).rev() {
        let Some(word) = &rendered[k] else { continue };
        let inst = &record.instances[k];
        let (ox, oy) = (inst.x + radius, inst.y + radius);
        let footprint = |i: usize| word.mask.bits()[i] || (blend && word.coverage[i] > 0.0);
        let mw = word.mask.width() as usize;
        let idx = |x: u32, y: u32| y as usize * w as usize + x as usize;

        // The word's own blended fringe was drawn after its analysis.
        let own_fringe = |bx: u32, by: u32| {
            let (Some(x), Some(y)) = (bx.checked_sub(radius), by.checked_sub(radius)) else {
                return false;
            };
            blend && x < word.mask.width() && y < word.mask.height() && footprint(y as usize * mw + x as usize)
        };

        let border = border_with_radius(&word.mask, radius);
        let mut hist = GrayHistogram::new();
        for (bx, by) in border.iter_set() {
            let (px, py) = (inst.x + bx, inst.y + by);
            let i = idx(px, py);
            if touched_later[i] || own_fringe(bx, by) {
                report.occluded_ring_pixels += 1;
                continue;
            }
            let p = image.get_pixel(px, py).0;
            hist.record(to_gray(p[0], p[1], p[2]));
        }
        if let Some((bg, pixels)) = contrast_violation(&hist, inst.chosen_gray, manifest) {
            report.violations.push(Violation::Contrast {
                line,
                instance: k,
                word: inst.word.clone(),
                chosen_gray: inst.chosen_gray,
                background_gray: bg,
                pixels,
            });
        }

        // Ink must carry the recorded gray wherever nothing later covers it.
        let mut mismatched = 0;
        for (x, y) in word.mask.iter_set() {
            let (px, py) = (ox + x, oy + y);
            if !touched_later[idx(px, py)] && image.get_pixel(px, py).0 != [inst.chosen_gray; 3] {
                mismatched += 1;
            }
        }
        if mismatched > 0 {
            report.violations.push(Violation::InkMismatch {
                line,
                instance: k,
                word: inst.word.clone(),
                chosen_gray: inst.chosen_gray,
                mismatched,
            });
        }

        for i in (0..word.coverage.len()).filter(|&i| footprint(i)) {
            let (x, y) = ((i % mw) as u32 + ox, (i / mw) as u32 + oy);
            touched_later[idx(x, y)] = true;
        }
    }
}

fn render_instance(library: &FontLibrary, inst: &InstanceRecord) -> std::result::Result<RenderedWord, String> {
    let face = library
        .faces()
        .get(inst.font_id)
        .ok_or_else(|| format!("font id {} is not in the library", inst.font_id))?;
    let style = TextStyle {
        font_id: inst.font_id,
        pixel_height: inst.pixel_height,
        rotation_deg: inst.rotation_deg,
    };
    render_word(face, &inst.word, &style).map_err(|e| e.to_string())
}

/// First used gray within the margin of `gray`, with its pixel count.
fn contrast_violation(hist: &GrayHistogram, gray: u8, manifest: &DatasetManifest) -> Option<(u8, u64)> {
    let t = &manifest.config.thresholds;
    let unused = unused_grays(hist, t.vertical_fraction);
    (0..=255u8)
        .filter(|&u| !unused.contains(u))
        .find(|&u| (gray as i32 - u as i32).abs() <= t.min_margin as i32)
        .map(|u| (u, hist.count(u)))
}
