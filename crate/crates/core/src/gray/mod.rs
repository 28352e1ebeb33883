//! Gray-level histogram analysis: which background grays are in use, and
//! which text grays keep a perceptible distance from all of them.
//!
//! Selection runs in two passes. The first marks a gray level as *unused*
//! when its frequency is at most `vertical_fraction` times the histogram's
//! peak. The second finds *edge colors* (used levels that border a run of
//! unused ones) and discards every unused level within `min_margin` of an
//! edge. Whatever survives is a legal text color for that region.

pub mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEVELS: usize = 256;

/// Default `min_margin`: sixteen gray levels, the distance below which
/// neighbouring grays become hard to tell apart by eye.
pub const DEFAULT_MIN_MARGIN: u8 = 16;

/// 256-bin count of gray levels.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayHistogram {
    bins: [u64; LEVELS],
}

impl Default for GrayHistogram {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for GrayHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nonzero: Vec<(usize, u64)> = self
            .bins
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(g, &c)| (g, c))
            .collect();
        f.debug_struct("GrayHistogram")
            .field("total", &self.total())
            .field("nonzero", &nonzero)
            .finish()
    }
}

impl GrayHistogram {
    pub fn new() -> Self {
        Self { bins: [0; LEVELS] }
    }

    pub fn from_bins(bins: [u64; LEVELS]) -> Self {
        Self { bins }
    }

    #[inline]
    pub fn record(&mut self, gray: u8) {
        self.bins[gray as usize] += 1;
    }

    pub fn bins(&self) -> &[u64; LEVELS] {
        &self.bins
    }

    pub fn count(&self, gray: u8) -> u64 {
        self.bins[gray as usize]
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.bins.iter().copied().max().unwrap_or(0)
    }
}

/// Counts every sample into a fresh histogram.
pub fn histogram_from_samples(samples: &[i64]) -> Result<GrayHistogram> {
    let mut hist = GrayHistogram::new();
    for &s in samples {
        let gray = u8::try_from(s).map_err(|_| Error::InvalidGrayLevel(s))?;
        hist.record(gray);
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisThresholds {
    /// Fraction of the peak bin at or below which a level counts as unused.
    pub vertical_fraction: f64,
    /// Minimum distance, in gray levels, between text and any used background gray.
    pub min_margin: u8,
}

impl Default for AnalysisThresholds {
    fn default() -> Self {
        Self {
            vertical_fraction: 0.0,
            min_margin: DEFAULT_MIN_MARGIN,
        }
    }
}

impl AnalysisThresholds {
    pub fn new(vertical_fraction: f64, min_margin: u8) -> Result<Self> {
        let t = Self {
            vertical_fraction,
            min_margin,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.vertical_fraction) {
            return Err(Error::InvalidThresholds(format!(
                "vertical fraction {} is outside [0, 1]",
                self.vertical_fraction
            )));
        }
        Ok(())
    }
}

/// Strictly ascending set of gray levels.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct GrayLevelSet {
    levels: Vec<u8>,
}

impl GrayLevelSet {
    pub fn empty() -> Self {
        Self { levels: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            levels: (0..=255).collect(),
        }
    }

    /// Builds a set from levels that must already be strictly ascending.
    pub fn from_sorted(levels: Vec<u8>) -> Result<Self> {
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidThresholds(
                "gray level set must be strictly ascending".into(),
            ));
        }
        Ok(Self { levels })
    }

    pub fn from_membership(member: &[bool; LEVELS]) -> Self {
        Self {
            levels: (0..=255u8).filter(|&g| member[g as usize]).collect(),
        }
    }

    pub fn membership(&self) -> [bool; LEVELS] {
        let mut member = [false; LEVELS];
        for &g in &self.levels {
            member[g as usize] = true;
        }
        member
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn contains(&self, gray: u8) -> bool {
        self.levels.binary_search(&gray).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.levels.iter().copied()
    }

    pub fn is_subset(&self, other: &GrayLevelSet) -> bool {
        self.levels.iter().all(|&g| other.contains(g))
    }

    /// Maximal runs of consecutive levels as inclusive `(start, end)` pairs.
    pub fn runs(&self) -> Vec<(u8, u8)> {
        let mut runs: Vec<(u8, u8)> = Vec::new();
        for &g in &self.levels {
            match runs.last_mut() {
                Some((_, end)) if *end as u16 + 1 == g as u16 => *end = g,
                _ => runs.push((g, g)),
            }
        }
        runs
    }
}

impl TryFrom<Vec<u8>> for GrayLevelSet {
    type Error = Error;

    fn try_from(levels: Vec<u8>) -> Result<Self> {
        Self::from_sorted(levels)
    }
}

impl From<GrayLevelSet> for Vec<u8> {
    fn from(set: GrayLevelSet) -> Self {
        set.levels
    }
}

impl FromIterator<u8> for GrayLevelSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut member = [false; LEVELS];
        for g in iter {
            member[g as usize] = true;
        }
        Self::from_membership(&member)
    }
}

/// Compact range notation, e.g. `{0..83, 117..255}`.
impl fmt::Display for GrayLevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if a == b {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}..{b}")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for GrayLevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `count <= peak * fraction`, evaluated exactly.
///
/// `fraction` is a finite double in `[0, 1]`, i.e. `mantissa * 2^-shift`, so
/// the product is compared as `count * 2^shift <= peak * mantissa` in 128-bit
/// integers.
fn at_or_below_threshold(count: u64, peak: u64, fraction: f64) -> bool {
    if count == 0 {
        return true;
    }
    if fraction <= 0.0 {
        return false;
    }
    if fraction >= 1.0 {
        return count <= peak;
    }
    let bits = fraction.to_bits();
    let biased_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mantissa, shift) = if biased_exp == 0 {
        (frac_bits, 1074i64)
    } else {
        (frac_bits | (1u64 << 52), 1075 - biased_exp)
    };
    // fraction < 1 implies shift >= 53 > 0.
    let rhs = peak as u128 * mantissa as u128; // < 2^117
    let count_bits = 64 - count.leading_zeros() as i64;
    if count_bits + shift > 127 {
        return false;
    }
    ((count as u128) << shift) <= rhs
}

/// Levels whose frequency is at most `vertical_fraction` of the peak bin.
pub fn unused_grays(hist: &GrayHistogram, vertical_fraction: f64) -> GrayLevelSet {
    let peak = hist.max();
    (0..=255u8)
        .filter(|&g| at_or_below_threshold(hist.count(g), peak, vertical_fraction))
        .collect()
}

/// Used levels adjacent to at least one unused level.
///
/// Walks the runs of `unused`; each run contributes the used level just
/// before it and the one just after it. A single used level squeezed between
/// two runs is emitted once.
pub fn edge_colors(unused: &GrayLevelSet) -> GrayLevelSet {
    let mut edges: Vec<u8> = Vec::new();
    for (start, end) in unused.runs() {
        if start > 0 {
            let left = start - 1;
            if edges.last() != Some(&left) {
                edges.push(left);
            }
        }
        if end < 255 {
            edges.push(end + 1);
        }
    }
    GrayLevelSet { levels: edges }
}

/// Unused levels that keep more than `min_margin` away from every edge color.
pub fn design_colors(hist: &GrayHistogram, thresholds: &AnalysisThresholds) -> GrayLevelSet {
    let unused = unused_grays(hist, thresholds.vertical_fraction);
    if thresholds.min_margin == 0 {
        return unused;
    }
    let margin = thresholds.min_margin as usize;
    let mut valid = unused.membership();
    for c in edge_colors(&unused).iter() {
        let lo = (c as usize).saturating_sub(margin);
        let hi = (c as usize + margin + 1).min(LEVELS);
        valid[lo..hi].fill(false);
    }
    GrayLevelSet::from_membership(&valid)
}

/// Full breakdown of one analysis, as written by `analyze` and the
/// per-instance analysis CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorAnalysis {
    pub histogram: GrayHistogram,
    pub unused: GrayLevelSet,
    pub edges: GrayLevelSet,
    pub candidates: GrayLevelSet,
}

impl ColorAnalysis {
    pub fn run(histogram: GrayHistogram, thresholds: &AnalysisThresholds) -> Self {
        let unused = unused_grays(&histogram, thresholds.vertical_fraction);
        let edges = edge_colors(&unused);
        let candidates = design_colors(&histogram, thresholds);
        Self {
            histogram,
            unused,
            edges,
            candidates,
        }
    }
}
