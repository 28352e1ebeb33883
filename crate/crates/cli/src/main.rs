mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use graysynth_core::bench::run_bench;
use graysynth_core::glyph::{border_with_radius, render_word, FontFace};
use graysynth_core::gray::{AnalysisThresholds, ColorAnalysis};
use graysynth_core::pipeline::image_rng;
use graysynth_core::{
    generate_dataset, sample_border_grays, validate_dataset, BackgroundState, Error, GenerateOptions, Placement,
    TextStyle,
};
use rand::Rng;

use crate::config::{CliConfig, RunArgs};

const EXIT_CONFIG: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NO_CANDIDATES: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "graysynth", version, about = "Synthesize labeled scene-text images with guaranteed text/background contrast")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labeled dataset.
    Generate {
        #[command(flatten)]
        run: RunArgs,
        /// Output directory (created if missing).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a 256-row histogram CSV per instance.
        #[arg(long)]
        emit_analysis: bool,
    },
    /// Print the border-ring color analysis for one word on one image.
    Analyze(AnalyzeArgs),
    /// Measure synthesis throughput without writing a dataset.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-check a generated dataset.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
        /// Font directory, if it moved since generation.
        #[arg(long)]
        fonts: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct AnalyzeArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    word: String,
    #[arg(long)]
    font_file: PathBuf,
    /// Left edge of the ring; drawn at random when omitted.
    #[arg(long)]
    x: Option<u32>,
    /// Top edge of the ring; drawn at random when omitted.
    #[arg(long)]
    y: Option<u32>,
    #[arg(long, default_value_t = 32)]
    height: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rotation: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    min_margin: u8,
    #[arg(long, default_value_t = 0.0)]
    vertical_thresh: f64,
    #[arg(long, default_value_t = 2)]
    border_radius: u32,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Io { .. } | Error::Image { .. } | Error::Json { .. } => EXIT_IO,
                _ => EXIT_CONFIG,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_CONFIG
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate { run, out, emit_analysis } => cmd_generate(&run, out, emit_analysis),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Bench { run, json } => cmd_bench(&run, json.as_deref()),
        Command::Validate { dataset, fonts } => cmd_validate(&dataset, fonts.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn cmd_generate(run: &RunArgs, out: Option<PathBuf>, emit_analysis: bool) -> anyhow::Result<u8> {
    let cfg = CliConfig::resolve(run, out, emit_analysis)?;
    let Some(out) = cfg.out.clone() else {
        bail!("--out is required (as a flag or in the config file)");
    };
    let assets = cfg.assets.load(cfg.synthesis.min_background)?;
    let options = GenerateOptions { count: cfg.count, jobs: cfg.jobs, emit_analysis: cfg.emit_analysis };
    let (summary, _) = generate_dataset(&assets, &cfg.assets, &cfg.synthesis, &options, &out)?;
    println!(
        "wrote {} images to {}: {} instances, {} abandoned, {:.2} s, {:.1} instances/s",
        summary.counts.images,
        out.display(),
        summary.counts.instances,
        summary.counts.abandoned,
        summary.elapsed.as_secs_f64(),
        summary.instances_per_sec()
    );
    Ok(0)
}

fn cmd_bench(run: &RunArgs, json: Option<&Path>) -> anyhow::Result<u8> {
    let cfg = CliConfig::resolve(run, None, false)?;
    let assets = cfg.assets.load(cfg.synthesis.min_background)?;
    let report = run_bench(&assets, &cfg.synthesis, cfg.count, cfg.jobs)?;
    print!("{}", report.render_text());
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&report)?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn cmd_validate(dataset: &Path, fonts: Option<&Path>) -> anyhow::Result<u8> {
    let report = validate_dataset(dataset, fonts)?;
    if let Some(first) = report.violations.first() {
        eprintln!("invalid: {first}");
        eprintln!("{} violation(s) in total", report.violations.len());
        return Ok(EXIT_VIOLATION);
    }
    println!(
        "ok: {} images, {} instances ({} ring pixels covered by later words were skipped)",
        report.images, report.instances, report.occluded_ring_pixels
    );
    Ok(0)
}

fn cmd_analyze(args: &AnalyzeArgs) -> anyhow::Result<u8> {
    let thresholds = AnalysisThresholds::new(args.vertical_thresh, args.min_margin)?;
    let image = image::open(&args.image).map_err(|e| Error::Image { path: args.image.clone(), source: e })?;
    let state = BackgroundState::new(image.into_rgb8());
    let bytes = fs::read(&args.font_file).map_err(|e| Error::Io { path: args.font_file.clone(), source: e })?;
    let face = FontFace::from_bytes(bytes, args.font_file.to_string_lossy().as_ref())
        .map_err(|message| Error::Font { path: args.font_file.clone(), message })?;
    let style = TextStyle { font_id: 0, pixel_height: args.height, rotation_deg: args.rotation };
    let word = render_word(&face, &args.word, &style)?;
    let border = border_with_radius(&word.mask, args.border_radius);

    let placement = match (args.x, args.y) {
        (Some(x), Some(y)) => Placement::new(x, y),
        (x, y) => {
            let (Some(max_x), Some(max_y)) = (
                state.width().checked_sub(border.width()),
                state.height().checked_sub(border.height()),
            ) else {
                return Err(Error::NoFit {
                    mask_width: border.width(),
                    mask_height: border.height(),
                    image_width: state.width(),
                    image_height: state.height(),
                }
                .into());
            };
            let mut rng = image_rng(args.seed, 0);
            let rx = rng.gen_range(0..=max_x);
            let ry = rng.gen_range(0..=max_y);
            let p = Placement::new(x.unwrap_or(rx), y.unwrap_or(ry));
            eprintln!("placement x={} y={} (seed {})", p.x, p.y, args.seed);
            p
        }
    };
    let hist = sample_border_grays(&state, placement, &border)?;
    let analysis = ColorAnalysis::run(hist, &thresholds);

    let mut csv = String::from("gray,count,is_unused,is_edge,is_candidate\n");
    for g in 0..=255u8 {
        csv.push_str(&format!(
            "{g},{},{},{},{}\n",
            analysis.histogram.count(g),
            u8::from(analysis.unused.contains(g)),
            u8::from(analysis.edges.contains(g)),
            u8::from(analysis.candidates.contains(g)),
        ));
    }
    match &args.out {
        Some(path) => fs::write(path, csv).map_err(|e| Error::Io { path: path.clone(), source: e })?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    eprintln!(
        "ring pixels {}, unused {}, edges {}, candidates {} {}",
        analysis.histogram.total(),
        analysis.unused.len(),
        analysis.edges.len(),
        analysis.candidates.len(),
        analysis.candidates
    );
    if analysis.candidates.is_empty() {
        eprintln!("no candidate colors at this placement");
        return Ok(EXIT_NO_CANDIDATES);
    }
    Ok(0)
}
