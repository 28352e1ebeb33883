//! Throughput measurement with a per-stage breakdown.
//!
//! Each image is timed from drawing its random plan to the finished RGB
//! buffer ("synthesis"). PNG encoding is timed separately and kept out of
//! the synthesis figures; nothing is written to disk.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::assets::Assets;
use crate::dataset::encode_png;
use crate::error::{Error, Result};
use crate::generate::{synthesize_indexed, thread_pool};
use crate::pipeline::{StageTimings, SynthesisConfig};

/// Reference point: about 3 ms per one-word image.
pub const REFERENCE_MS_PER_IMAGE: f64 = 3.0;
/// Fastest earlier engine in the comparison: about 120 images per minute.
pub const PRIOR_ENGINE_IMAGES_PER_SEC: f64 = 2.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LatencyStats {
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

impl LatencyStats {
    pub fn from_ms(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean_ms: sorted.iter().sum::<f64>() / sorted.len() as f64,
            median_ms: quantile(&sorted, 0.5),
            p95_ms: quantile(&sorted, 0.95),
            min_ms: sorted[0],
            max_ms: sorted[sorted.len() - 1],
        }
    }
}

/// Linear interpolation between closest ranks; `sorted` must be ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTotals {
    pub rasterize_ms: f64,
    pub analyze_ms: f64,
    pub composite_ms: f64,
    /// Plan sampling and copying the background.
    pub other_ms: f64,
    pub encode_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub images: u64,
    pub jobs: usize,
    pub words_per_image: u32,
    pub instances: u64,
    pub abandoned: u64,
    pub wall_ms: f64,
    pub synthesis_ms: f64,
    /// Per image, encoding excluded.
    pub image_latency: LatencyStats,
    /// Per image divided by words per image.
    pub instance_latency: LatencyStats,
    pub images_per_sec: f64,
    pub instances_per_sec: f64,
    pub stages: StageTotals,
    pub reference_ms_per_image: f64,
    pub speedup_vs_prior_engine: f64,
}

impl BenchReport {
    pub fn render_text(&self) -> String {
        let s = &self.stages;
        let per = |ms: f64| ms / self.images.max(1) as f64;
        format!(
            "images            {}\n\
             words per image   {}\n\
             jobs              {}\n\
             instances         {} emitted, {} abandoned\n\
             wall clock        {:.1} ms (encoding included)\n\
             synthesis         {:.1} ms total\n\
             per image         median {:.3} ms, p95 {:.3} ms, mean {:.3} ms\n\
             per instance      median {:.3} ms, p95 {:.3} ms\n\
             throughput        {:.1} images/s, {:.1} instances/s\n\
             stages (mean/img) rasterize {:.3} ms, analyze {:.3} ms, composite {:.3} ms, other {:.3} ms\n\
             encode (mean/img) {:.3} ms (PNG, excluded from synthesis)\n\
             reference         ~{:.0} ms per one-word image; {:.0}x the fastest prior engine ({} images/s)\n",
            self.images,
            self.words_per_image,
            self.jobs,
            self.instances,
            self.abandoned,
            self.wall_ms,
            self.synthesis_ms,
            self.image_latency.median_ms,
            self.image_latency.p95_ms,
            self.image_latency.mean_ms,
            self.instance_latency.median_ms,
            self.instance_latency.p95_ms,
            self.images_per_sec,
            self.instances_per_sec,
            per(s.rasterize_ms),
            per(s.analyze_ms),
            per(s.composite_ms),
            per(s.other_ms),
            per(s.encode_ms),
            self.reference_ms_per_image,
            self.speedup_vs_prior_engine,
            PRIOR_ENGINE_IMAGES_PER_SEC,
        )
    }
}

struct Sample {
    synthesis: Duration,
    timings: StageTimings,
    encode: Duration,
    instances: usize,
    abandoned: usize,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn run_bench(assets: &Assets, config: &SynthesisConfig, count: u64, jobs: usize) -> Result<BenchReport> {
    config.validate()?;
    if count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    let pool = thread_pool(jobs)?;
    let start = Instant::now();
    let samples: Vec<Sample> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|index| {
                let mut timings = StageTimings::default();
                let t = Instant::now();
                let (_, image) = synthesize_indexed(assets, config, index, &mut timings)?;
                let synthesis = t.elapsed();
                let t = Instant::now();
                std::hint::black_box(encode_png(&image.image));
                Ok(Sample {
                    synthesis,
                    timings,
                    encode: t.elapsed(),
                    instances: image.instances.len(),
                    abandoned: image.abandoned.len(),
                })
            })
            .collect::<Result<_>>()
    })?;
    let wall = start.elapsed();

    let words = config.words_per_image as f64;
    let image_ms: Vec<f64> = samples.iter().map(|s| ms(s.synthesis)).collect();
    let instance_ms: Vec<f64> = image_ms.iter().map(|m| m / words).collect();
    let synthesis_ms: f64 = image_ms.iter().sum();
    let instances: u64 = samples.iter().map(|s| s.instances as u64).sum();
    let abandoned: u64 = samples.iter().map(|s| s.abandoned as u64).sum();

    let mut stages = StageTotals::default();
    for s in &samples {
        stages.rasterize_ms += ms(s.timings.rasterize);
        stages.analyze_ms += ms(s.timings.analyze);
        stages.composite_ms += ms(s.timings.composite);
        stages.other_ms += ms(s.synthesis.saturating_sub(s.timings.total()));
        stages.encode_ms += ms(s.encode);
    }

    // With several workers, throughput is measured against wall time.
    let busy_secs = if jobs > 1 {
        (ms(wall) - stages.encode_ms / jobs as f64).max(f64::EPSILON) / 1e3
    } else {
        synthesis_ms / 1e3
    };
    let images_per_sec = count as f64 / busy_secs.max(f64::EPSILON);
    Ok(BenchReport {
        images: count,
        jobs: jobs.max(1),
        words_per_image: config.words_per_image,
        instances,
        abandoned,
        wall_ms: ms(wall),
        synthesis_ms,
        image_latency: LatencyStats::from_ms(&image_ms),
        instance_latency: LatencyStats::from_ms(&instance_ms),
        images_per_sec,
        instances_per_sec: instances as f64 / busy_secs.max(f64::EPSILON),
        stages,
        reference_ms_per_image: REFERENCE_MS_PER_IMAGE,
        speedup_vs_prior_engine: images_per_sec / PRIOR_ENGINE_IMAGES_PER_SEC,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.5), 2.5);
        assert_eq!(quantile(&s, 0.0), 1.0);
        assert_eq!(quantile(&s, 1.0), 4.0);
        let stats = LatencyStats::from_ms(&[5.0, 1.0, 3.0]);
        assert_eq!(stats.median_ms, 3.0);
        assert_eq!(stats.mean_ms, 3.0);
        assert_eq!((stats.min_ms, stats.max_ms), (1.0, 5.0));
        assert_eq!(LatencyStats::from_ms(&[]), LatencyStats::default());
    }
}
