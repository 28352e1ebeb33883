//! Word rasterization and the binary masks derived from it.

mod morphology;
mod raster;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use morphology::{border_of, border_with_radius, dilate, DEFAULT_BORDER_RADIUS};
pub use raster::{rasterize, render_word, FontFace, RenderedWord};

/// Row-major binary raster; `true` is ink.
#[derive(Clone, PartialEq, Eq)]
pub struct GlyphMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl GlyphMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    /// Panics if `bits.len() != width * height`.
    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Self {
        assert_eq!(
            bits.len(),
            width as usize * height as usize,
            "bit count does not match {width}x{height}"
        );
        Self {
            width,
            height,
            bits,
        }
    }

    /// Solid `width` x `height` block.
    pub fn filled(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width as usize * height as usize],
        }
    }

    /// Parses rows of `#` (ink) and `.` (background).
    pub fn from_ascii(rows: &str) -> Self {
        let lines: Vec<&str> = rows
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let height = lines.len() as u32;
        let width = lines.first().map_or(0, |l| l.len()) as u32;
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for line in &lines {
            assert_eq!(line.len() as u32, width, "ragged ascii mask");
            bits.extend(line.bytes().map(|b| b == b'#'));
        }
        Self::from_bits(width, height, bits)
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width as usize + 1) * self.height as usize);
        for row in self.bits.chunks(self.width.max(1) as usize) {
            out.extend(row.iter().map(|&b| if b { '#' } else { '.' }));
            out.push('\n');
        }
        out
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Coordinates of every ink pixel, row by row.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width.max(1) as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    /// Same raster placed at offset `(dx, dy)` on a larger canvas.
    pub fn embed(&self, width: u32, height: u32, dx: u32, dy: u32) -> GlyphMask {
        assert!(dx + self.width <= width && dy + self.height <= height);
        let mut out = GlyphMask::new(width, height);
        for (x, y) in self.iter_set() {
            out.set(x + dx, y + dy, true);
        }
        out
    }

    /// True when every ink pixel of `self` is also ink in `other` (same size).
    pub fn is_subset(&self, other: &GlyphMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

impl fmt::Debug for GlyphMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GlyphMask {}x{}", self.width, self.height)?;
        f.write_str(&self.to_ascii())
    }
}

/// Ring of background pixels around a glyph: the dilated mask minus the
/// glyph itself. Its canvas is the dilated canvas; the glyph sits at
/// offset `(radius, radius)`.
#[derive(Clone, PartialEq, Eq)]
pub struct BorderMask {
    width: u32,
    height: u32,
    radius: u32,
    bits: Vec<bool>,
}

impl BorderMask {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Offset of the source glyph inside the border canvas.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width.max(1) as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    pub fn as_mask(&self) -> GlyphMask {
        GlyphMask::from_bits(self.width, self.height, self.bits.clone())
    }
}

impl fmt::Debug for BorderMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BorderMask {}x{} r={}", self.width, self.height, self.radius)?;
        f.write_str(&self.as_mask().to_ascii())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextStyle {
    pub font_id: usize,
    pub pixel_height: u32,
    pub rotation_deg: f64,
}

/// Four corners of a (possibly rotated) box, clockwise from the word's
/// top-left, in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad(pub [[f64; 2]; 4]);

impl Quad {
    pub fn translate(&self, dx: f64, dy: f64) -> Quad {
        Quad(self.0.map(|[x, y]| [x + dx, y + dy]))
    }

    pub fn clamp(&self, width: f64, height: f64) -> Quad {
        Quad(self.0.map(|[x, y]| [x.clamp(0.0, width), y.clamp(0.0, height)]))
    }

    /// Axis-aligned hull as `[min_x, min_y, max_x, max_y]`.
    pub fn hull(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for [x, y] in self.0 {
            b[0] = b[0].min(x);
            b[1] = b[1].min(y);
            b[2] = b[2].max(x);
            b[3] = b[3].max(y);
        }
        b
    }
}
