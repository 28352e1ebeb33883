//! Brute-force restatement of candidate selection, for tests.
//!
//! A level is a candidate when it is unused and every used level lies more
//! than `min_margin` away from it. This shares no code with the run/edge
//! scan in the parent module.

use super::{AnalysisThresholds, GrayHistogram, GrayLevelSet, LEVELS};

pub fn candidate_oracle(hist: &GrayHistogram, thresholds: &AnalysisThresholds) -> GrayLevelSet {
    let bins = hist.bins();
    let peak = bins.iter().copied().max().unwrap_or(0);
    let threshold = peak as f64 * thresholds.vertical_fraction;
    let used = |g: usize| bins[g] as f64 > threshold;
    let margin = thresholds.min_margin as i32;

    let mut levels = Vec::new();
    for g in 0..LEVELS {
        if used(g) {
            continue;
        }
        let mut ok = true;
        for u in 0..LEVELS {
            if used(u) && (g as i32 - u as i32).abs() <= margin {
                ok = false;
                break;
            }
        }
        if ok {
            levels.push(g as u8);
        }
    }
    GrayLevelSet::from_sorted(levels).expect("ascending by construction")
}
