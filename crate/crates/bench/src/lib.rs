//! Shared setup for the criterion benchmarks.

use std::path::{Path, PathBuf};

use graysynth_core::{fixtures, load_fonts, FontLibrary, GrayHistogram};

pub fn repo_assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

pub fn bundled_fonts() -> FontLibrary {
    load_fonts(&repo_assets().join("fonts")).expect("bundled fonts")
}

/// Ten 640x480 backgrounds covering the fixture patterns.
pub fn backgrounds() -> Vec<image::RgbImage> {
    (0..10).map(|p| fixtures::background(p, 640, 480, p as u64)).collect()
}

/// Histograms ranging from a single used level to every level used.
pub fn histograms() -> Vec<(&'static str, GrayHistogram)> {
    let single = {
        let mut bins = [0u64; 256];
        bins[100] = 400;
        bins
    };
    let banded = std::array::from_fn(|g| if (g / 20) % 2 == 0 { 30 } else { 0 });
    let full = [7u64; 256];
    vec![
        ("single", GrayHistogram::from_bins(single)),
        ("banded", GrayHistogram::from_bins(banded)),
        ("full", GrayHistogram::from_bins(full)),
    ]
}
