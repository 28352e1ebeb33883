//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//!
//! Runs without the libtest harness so the report is never swallowed by
//! output capture. Run it alone with `cargo test -p graysynth-cli --test acceptance`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use graysynth_core::fixtures;
use graysynth_core::glyph::{border_of, dilate, GlyphMask};
use graysynth_core::gray::oracle::candidate_oracle;
use graysynth_core::gray::{design_colors, AnalysisThresholds, GrayHistogram, GrayLevelSet, LEVELS};
use graysynth_core::pipeline::{image_rng, AbandonReason};
use graysynth_core::AnnotationRecord;
use rand::Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [Check; 7] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 golden cases", golden_cases),
        ("3 contrast guarantee end to end", contrast_end_to_end),
        ("4 retry/abandon policy", retry_abandon),
        ("5 determinism", determinism),
        ("6 throughput", throughput),
        ("7 morphology properties", morphology),
    ];
    let mut failed = 0;
    let mut err = std::io::stderr();
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => writeln!(err, "[PASS] {name} ({secs:.1} s): {detail}").unwrap(),
            Err(detail) => {
                failed += 1;
                writeln!(err, "[FAIL] {name} ({secs:.1} s): {detail}").unwrap();
            }
        }
    }
    writeln!(err, "acceptance: {} passed, {failed} failed", 7 - failed).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}

fn repo_assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

fn graysynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graysynth")).args(args).output().expect("spawn graysynth")
}

fn describe(out: &Output) -> String {
    format!(
        "status {:?}, stdout {:?}, stderr {:?}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).trim(),
        String::from_utf8_lossy(&out.stderr).trim()
    )
}

fn write_backgrounds(dir: &Path, count: usize, width: u32, height: u32) {
    fs::create_dir_all(dir).unwrap();
    for i in 0..count {
        fixtures::background(i, width, height, 1000 + i as u64)
            .save(dir.join(format!("bg{i:03}.png")))
            .unwrap();
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let margins = [0u8, 8, 16, 24];
    let mut compared = 0;
    for used in 0..LEVELS {
        let mut bins = [0u64; LEVELS];
        bins[used] = 5;
        let hist = GrayHistogram::from_bins(bins);
        for m in margins {
            let t = AnalysisThresholds::new(0.0, m).unwrap();
            ensure!(design_colors(&hist, &t) == candidate_oracle(&hist, &t), "single level {used}, margin {m}");
            compared += 1;
        }
    }
    let mut rng = image_rng(0xacce, 1);
    for case in 0..10_000 {
        let density: f64 = rng.gen_range(0.01..=1.0);
        let mut bins = [0u64; LEVELS];
        for b in bins.iter_mut() {
            if rng.gen_bool(density) {
                *b = rng.gen_range(1..1000);
            }
        }
        let hist = GrayHistogram::from_bins(bins);
        let m = margins[case % margins.len()];
        let t = AnalysisThresholds::new(0.0, m).unwrap();
        ensure!(
            design_colors(&hist, &t) == candidate_oracle(&hist, &t),
            "random case {case} (density {density:.3}, margin {m})"
        );
        compared += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("{compared} histograms, 0 mismatches, {:.2} s", elapsed.as_secs_f64()))
}

fn golden_cases() -> Outcome {
    let t = AnalysisThresholds::default();
    let set = |ranges: &[(u8, u8)]| -> GrayLevelSet { ranges.iter().flat_map(|&(a, b)| a..=b).collect() };
    let hist = |used: &[u8]| {
        let mut bins = [0u64; LEVELS];
        for &u in used {
            bins[u as usize] = 10;
        }
        GrayHistogram::from_bins(bins)
    };
    let all: Vec<u8> = (0..=255).collect();
    let cases: [(&str, &[u8], GrayLevelSet); 4] = [
        ("{100}", &[100], set(&[(0, 83), (117, 255)])),
        ("{100,101,102}", &[100, 101, 102], set(&[(0, 83), (119, 255)])),
        ("{0}", &[0], set(&[(17, 255)])),
        ("all used", &all, GrayLevelSet::empty()),
    ];
    for (name, used, expected) in &cases {
        let got = design_colors(&hist(used), &t);
        ensure!(&got == expected, "used {name}: expected {expected}, got {got}");
    }
    Ok(format!("{} cases exact", cases.len()))
}

fn contrast_end_to_end() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let bg = tmp.path().join("backgrounds");
    write_backgrounds(&bg, fixtures::PATTERN_COUNT, 240, 160);
    let out = tmp.path().join("dataset");
    let fonts = repo_assets().join("fonts");
    let corpus = repo_assets().join("corpus/words.txt");
    let gen = graysynth(&[
        "generate",
        "--backgrounds", s(&bg),
        "--fonts", s(&fonts),
        "--corpus", s(&corpus),
        "--out", s(&out),
        "--count", "1000",
        "--words-per-image", "3",
        "--max-height", "40",
        "--seed", "2024",
    ]);
    ensure!(gen.status.success(), "generate failed: {}", describe(&gen));
    let labels = fs::read_to_string(out.join("labels.jsonl")).unwrap();
    let mut instances = 0;
    let mut backgrounds = std::collections::BTreeSet::new();
    for line in labels.lines() {
        let rec: AnnotationRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
        instances += rec.instances.len();
        backgrounds.insert(rec.background_id);
    }
    ensure!(labels.lines().count() == 1000, "{} label lines", labels.lines().count());
    ensure!(backgrounds.len() >= 10, "only {} backgrounds used", backgrounds.len());
    ensure!(instances > 1000, "only {instances} instances placed");
    let val = graysynth(&["validate", "--dataset", s(&out)]);
    ensure!(val.status.success(), "validate failed: {}", describe(&val));
    Ok(format!(
        "1000 images over {} backgrounds, {instances} instances, validate: {}",
        backgrounds.len(),
        String::from_utf8_lossy(&val.stdout).trim()
    ))
}

fn retry_abandon() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let bg = tmp.path().join("backgrounds");
    fs::create_dir_all(&bg).unwrap();
    // Every ring of these words spans more than 256 columns, so it sees
    // every gray level and no color can be designed.
    fixtures::full_spectrum(1024, 128).save(bg.join("spectrum.png")).unwrap();
    let corpus = tmp.path().join("words.txt");
    fs::write(&corpus, "abandonment\nsynthesizing\nbackgrounds\n").unwrap();
    let out = tmp.path().join("dataset");
    let gen = graysynth(&[
        "generate",
        "--backgrounds", s(&bg),
        "--fonts", s(&repo_assets().join("fonts")),
        "--corpus", s(&corpus),
        "--out", s(&out),
        "--count", "10",
        "--words-per-image", "2",
        "--min-height", "64",
        "--max-height", "64",
        "--min-rotation", "0",
        "--max-rotation", "0",
        "--seed", "4",
    ]);
    ensure!(gen.status.success(), "generate failed: {}", describe(&gen));
    let labels = fs::read_to_string(out.join("labels.jsonl")).unwrap();
    let mut abandoned = 0;
    for line in labels.lines() {
        let rec: AnnotationRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
        ensure!(rec.instances.is_empty(), "image {} emitted {} instances", rec.index, rec.instances.len());
        for a in &rec.abandoned {
            ensure!(a.reason == AbandonReason::NoCandidates, "image {}: {:?}", rec.index, a.reason);
            ensure!(a.retries_used == 20 && a.tried.len() == 20, "image {}: {} retries", rec.index, a.retries_used);
            abandoned += 1;
        }
    }
    ensure!(abandoned == 20, "{abandoned} abandoned words recorded");
    Ok(format!("0 instances, {abandoned} words abandoned after exactly 20 retries each"))
}

fn dataset_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = vec![("labels.jsonl".to_string(), fs::read(dir.join("labels.jsonl")).unwrap())];
    let mut images: Vec<_> = fs::read_dir(dir.join("images")).unwrap().map(|e| e.unwrap().path()).collect();
    images.sort();
    for p in images {
        let pixels = image::open(&p).unwrap().into_rgb8().into_raw();
        files.push((p.file_name().unwrap().to_string_lossy().into_owned(), pixels));
    }
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let bg = tmp.path().join("backgrounds");
    write_backgrounds(&bg, 6, 200, 150);
    let run = |jobs: &str, name: &str| -> Result<Vec<(String, Vec<u8>)>, String> {
        let out = tmp.path().join(name);
        let gen = graysynth(&[
            "generate",
            "--backgrounds", s(&bg),
            "--fonts", s(&repo_assets().join("fonts")),
            "--corpus", s(&repo_assets().join("corpus/words.txt")),
            "--out", s(&out),
            "--count", "96",
            "--words-per-image", "4",
            "--seed", "77",
            "--jobs", jobs,
        ]);
        ensure!(gen.status.success(), "generate --jobs {jobs} failed: {}", describe(&gen));
        Ok(dataset_bytes(&out))
    };
    let a1 = run("1", "a1")?;
    let b1 = run("1", "b1")?;
    let a8 = run("8", "a8")?;
    let b8 = run("8", "b8")?;
    ensure!(a1 == b1, "two --jobs 1 runs differ");
    ensure!(a8 == b8, "two --jobs 8 runs differ");
    ensure!(a1 == a8, "--jobs 1 and --jobs 8 differ");
    Ok(format!("labels.jsonl and {} images identical across 2×jobs 1 and 2×jobs 8", a1.len() - 1))
}

fn throughput() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let bg = tmp.path().join("backgrounds");
    write_backgrounds(&bg, 10, 640, 480);
    let json = tmp.path().join("bench.json");
    let out = graysynth(&[
        "bench",
        "--backgrounds", s(&bg),
        "--fonts", s(&repo_assets().join("fonts")),
        "--corpus", s(&repo_assets().join("corpus/words.txt")),
        "--count", "500",
        "--words-per-image", "1",
        "--jobs", "1",
        "--seed", "6",
        "--json", s(&json),
    ]);
    ensure!(out.status.success(), "bench failed: {}", describe(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let median = report["instance_latency"]["median_ms"].as_f64().unwrap();
    let per_sec = report["instances_per_sec"].as_f64().unwrap();
    let images_per_sec = report["images_per_sec"].as_f64().unwrap();
    let speedup = report["speedup_vs_prior_engine"].as_f64().unwrap();
    let detail = format!(
        "median {median:.3} ms/instance, {per_sec:.0} instances/s, {images_per_sec:.0} images/s, {speedup:.0}x the 2 images/s prior engine"
    );
    ensure!(median <= 10.0, "{detail}");
    ensure!(per_sec >= 100.0, "{detail}");
    ensure!(images_per_sec >= 100.0, "{detail}");
    Ok(detail)
}

fn random_mask(rng: &mut impl Rng) -> GlyphMask {
    let (w, h) = (rng.gen_range(1..48), rng.gen_range(1..48));
    let density: f64 = rng.gen_range(0.0..0.6);
    GlyphMask::from_bits(w, h, (0..w * h).map(|_| rng.gen_bool(density)).collect())
}

fn morphology() -> Outcome {
    let mut rng = image_rng(0x3077, 7);
    let cases = 1_500;
    for case in 0..cases {
        let m = random_mask(&mut rng);
        let border = border_of(&m);
        let grown = dilate(&m, 2);
        let placed = m.embed(grown.width(), grown.height(), 2, 2);
        ensure!((border.width(), border.height()) == (grown.width(), grown.height()), "case {case}: size");
        for i in 0..grown.bits().len() {
            let (b, ink) = (border.bits()[i], placed.bits()[i]);
            ensure!(!(b && ink), "case {case}: border overlaps ink");
            ensure!((b || ink) == grown.bits()[i], "case {case}: border ∪ mask != dilation");
        }
        ensure!(dilate(&dilate(&m, 1), 1) == grown, "case {case}: dilation does not compose");
        let r = rng.gen_range(0..4);
        let bits = m.bits().iter().map(|&b| b || rng.gen_bool(0.2)).collect();
        let larger = GlyphMask::from_bits(m.width(), m.height(), bits);
        ensure!(dilate(&m, r).is_subset(&dilate(&larger, r)), "case {case}: dilation not monotone");
    }
    Ok(format!("{cases} random masks: disjoint, union, composable, monotone"))
}
