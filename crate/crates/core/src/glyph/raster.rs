use std::fmt;
use std::sync::Arc;

use ab_glyph::{point, Font, FontArc, GlyphId, OutlinedGlyph, PxScale, ScaleFont};

use super::{GlyphMask, Quad, TextStyle};
use crate::error::{Error, Result};

/// Coverage above which a pixel counts as ink.
const INK_COVERAGE: f32 = 0.5;

/// A parsed font, cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct FontFace {
    font: FontArc,
    name: Arc<str>,
}

impl fmt::Debug for FontFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FontFace").field("name", &self.name).finish()
    }
}

impl FontFace {
    pub fn from_bytes(bytes: Vec<u8>, name: impl Into<Arc<str>>) -> std::result::Result<Self, String> {
        let font = FontArc::try_from_vec(bytes).map_err(|e| e.to_string())?;
        Ok(Self {
            font,
            name: name.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_glyph(&self, c: char) -> bool {
        self.font.glyph_id(c) != GlyphId(0)
    }
}

/// A rasterized word: binary mask, the antialiased coverage it was
/// thresholded from (same dimensions), and the rotated box of the ink.
#[derive(Debug, Clone)]
pub struct RenderedWord {
    pub mask: GlyphMask,
    pub coverage: Vec<f32>,
    /// Rotated ink box in mask coordinates. May poke outside the mask's
    /// tight crop where a corner of the box holds no ink.
    pub quad: Quad,
}

struct Canvas {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    fn at(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }
}

pub fn rasterize(face: &FontFace, word: &str, style: &TextStyle) -> Result<GlyphMask> {
    render_word(face, word, style).map(|r| r.mask)
}

pub fn render_word(face: &FontFace, word: &str, style: &TextStyle) -> Result<RenderedWord> {
    if let Some(c) = word.chars().find(|&c| !c.is_whitespace() && !face.has_glyph(c)) {
        return Err(Error::MissingGlyph(c));
    }
    let zero_area = || Error::ZeroArea(word.to_string());

    let canvas = draw_upright(face, word, style.pixel_height).ok_or_else(zero_area)?;
    let ink_box = ink_bounds(&canvas).ok_or_else(zero_area)?;

    let degrees = style.rotation_deg.rem_euclid(360.0);
    let (canvas, quad) = if degrees == 0.0 {
        let (x0, y0, x1, y1) = ink_box;
        let quad = Quad([
            [x0 as f64, y0 as f64],
            [x1 as f64 + 1.0, y0 as f64],
            [x1 as f64 + 1.0, y1 as f64 + 1.0],
            [x0 as f64, y1 as f64 + 1.0],
        ]);
        (canvas, quad)
    } else {
        rotate_nearest(&canvas, ink_box, degrees.to_radians())
    };

    let (x0, y0, x1, y1) = ink_bounds(&canvas).ok_or_else(zero_area)?;
    let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
    let mut bits = Vec::with_capacity(w * h);
    let mut coverage = Vec::with_capacity(w * h);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let c = canvas.at(x, y);
            bits.push(c > INK_COVERAGE);
            coverage.push(c);
        }
    }
    Ok(RenderedWord {
        mask: GlyphMask::from_bits(w as u32, h as u32, bits),
        coverage,
        quad: quad.translate(-(x0 as f64), -(y0 as f64)),
    })
}

/// Lays the word out on a baseline and accumulates glyph coverage.
fn draw_upright(face: &FontFace, word: &str, pixel_height: u32) -> Option<Canvas> {
    let scale = PxScale::from(pixel_height as f32);
    let scaled = face.font.as_scaled(scale);
    let ascent = scaled.ascent();

    let mut outlines: Vec<OutlinedGlyph> = Vec::new();
    let mut caret = 0.0f32;
    let mut prev: Option<GlyphId> = None;
    for c in word.chars() {
        let id = face.font.glyph_id(c);
        if let Some(p) = prev {
            caret += scaled.kern(p, id);
        }
        let glyph = id.with_scale_and_position(scale, point(caret, ascent));
        caret += scaled.h_advance(id);
        prev = Some(id);
        if c.is_whitespace() {
            continue;
        }
        if let Some(outlined) = face.font.outline_glyph(glyph) {
            outlines.push(outlined);
        }
    }
    if outlines.is_empty() {
        return None;
    }

    let (mut min_x, mut min_y) = (f32::INFINITY, f32::INFINITY);
    let (mut max_x, mut max_y) = (f32::NEG_INFINITY, f32::NEG_INFINITY);
    for o in &outlines {
        let b = o.px_bounds();
        min_x = min_x.min(b.min.x);
        min_y = min_y.min(b.min.y);
        max_x = max_x.max(b.max.x);
        max_y = max_y.max(b.max.y);
    }
    let (ox, oy) = (min_x.floor(), min_y.floor());
    let width = (max_x.ceil() - ox) as usize;
    let height = (max_y.ceil() - oy) as usize;
    if width == 0 || height == 0 {
        return None;
    }

    let mut canvas = Canvas::new(width, height);
    for o in &outlines {
        let b = o.px_bounds();
        let (gx, gy) = ((b.min.x - ox) as i64, (b.min.y - oy) as i64);
        o.draw(|x, y, c| {
            let (px, py) = (gx + x as i64, gy + y as i64);
            if px >= 0 && py >= 0 && (px as usize) < width && (py as usize) < height {
                let cell = &mut canvas.data[py as usize * width + px as usize];
                *cell = (*cell + c).min(1.0);
            }
        });
    }
    Some(canvas)
}

/// Inclusive bounds `(x0, y0, x1, y1)` of pixels above the ink threshold.
fn ink_bounds(canvas: &Canvas) -> Option<(usize, usize, usize, usize)> {
    let mut bounds: Option<(usize, usize, usize, usize)> = None;
    for y in 0..canvas.height {
        for x in 0..canvas.width {
            if canvas.at(x, y) > INK_COVERAGE {
                bounds = Some(match bounds {
                    None => (x, y, x, y),
                    Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                });
            }
        }
    }
    bounds
}

/// Rotates counter-clockwise (as seen on screen) about the canvas centre,
/// sampling each output pixel centre from the nearest source pixel.
fn rotate_nearest(
    src: &Canvas,
    ink_box: (usize, usize, usize, usize),
    radians: f64,
) -> (Canvas, Quad) {
    let (sin, cos) = radians.sin_cos();
    let (sw, sh) = (src.width as f64, src.height as f64);
    let dw = (sw * cos.abs() + sh * sin.abs()).ceil().max(1.0);
    let dh = (sw * sin.abs() + sh * cos.abs()).ceil().max(1.0);
    let (scx, scy) = (sw / 2.0, sh / 2.0);
    let (dcx, dcy) = (dw / 2.0, dh / 2.0);

    let mut out = Canvas::new(dw as usize, dh as usize);
    for v in 0..out.height {
        let dy = v as f64 + 0.5 - dcy;
        for u in 0..out.width {
            let dx = u as f64 + 0.5 - dcx;
            let sx = cos * dx - sin * dy + scx;
            let sy = sin * dx + cos * dy + scy;
            if sx >= 0.0 && sy >= 0.0 && sx < sw && sy < sh {
                out.data[v * out.width + u] = src.at(sx as usize, sy as usize);
            }
        }
    }

    let forward = |x: f64, y: f64| {
        let (px, py) = (x - scx, y - scy);
        [cos * px + sin * py + dcx, -sin * px + cos * py + dcy]
    };
    let (x0, y0, x1, y1) = ink_box;
    let (x0, y0, x1, y1) = (x0 as f64, y0 as f64, x1 as f64 + 1.0, y1 as f64 + 1.0);
    let quad = Quad([forward(x0, y0), forward(x1, y0), forward(x1, y1), forward(x0, y1)]);
    (out, quad)
}
