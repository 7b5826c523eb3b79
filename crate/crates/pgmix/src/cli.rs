//! Command-line front end.
//!
//! Subcommands: `heatmap`, `bench`, `fan`, `loss`, `eval`, `viz`. Structured
//! results go to stdout as JSON; grids go to disk as PFM or 16-bit Netpbm.
//! Every subcommand validates its inputs fully before writing anything.
//! Exit codes: 0 success, 1 computation error, 2 usage or input error.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{run_bench, BenchConfig, DEFAULT_BENCH_SEED, DEFAULT_MAX_EXACT_PIXELS};
use crate::error::Error;
use crate::frequency::{fan_apply, fan_gain, FanConfig};
use crate::grid::LuminanceGrid;
use crate::io::{
    load_annotations, read_grid_auto, write_grid, AnnotationKind, AnnotationSet, Detection,
    InstanceAnnotation, PerImage, WriteKind,
};
use crate::losses::{
    bce_pixel, bce_scalar, cross_entropy, dice_loss, gh_loss, total_loss, LossTerms, LossWeights,
};
use crate::metrics::{coco_map_with, pr_curve, EvalConfig};
use crate::pgm::{
    default_truncation_radius, normalize_heatmap, pgm_exact, pgm_fft, pgm_separable, ComputePath,
    Heatmap, Normalization, Truncation,
};
use crate::viz::tile_stack;

#[derive(Parser)]
#[command(
    name = "pgmix",
    version,
    about = "Photometric Gaussian mixture heatmaps, boundary gain, losses, and mask evaluation"
)]
struct Cli {
    /// Worker threads for per-scale work (defaults to all cores).
    #[arg(long, global = true, env = "PGMIX_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one heatmap file per lambda from a mask or luminance grid.
    Heatmap(HeatmapArgs),
    /// Time the mixture paths on a synthetic mask and cross-check them.
    Bench(BenchArgs),
    /// High-pass boundary gain: write the gain map and the filtered grid.
    Fan(FanArgs),
    /// Compute the loss terms and their weighted total as JSON.
    Loss(LossArgs),
    /// Evaluate predictions against ground truth (AP metrics as JSON).
    Eval(EvalArgs),
    /// Tile the lambda stack into a single 16-bit Netpbm panel.
    Viz(VizArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Exact,
    Separable,
    Fft,
}

impl From<PathArg> for ComputePath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Exact => ComputePath::Exact,
            PathArg::Separable => ComputePath::Separable,
            PathArg::Fft => ComputePath::Fft,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    Raw,
    Max,
}

impl From<NormalizeArg> for Normalization {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::Raw => Normalization::Raw,
            NormalizeArg::Max => Normalization::MaxOne,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pfm,
    Pgm16,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Input mask or luminance grid (Netpbm P5 or PFM).
    #[arg(long)]
    mask: PathBuf,
    /// Comma-separated strictly increasing scales.
    #[arg(long, default_value = "1,5,10,20")]
    lambdas: String,
    #[arg(long, value_enum, default_value_t = PathArg::Separable)]
    path: PathArg,
    #[arg(long, value_enum, default_value_t = NormalizeArg::Max)]
    normalize: NormalizeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Pfm)]
    format: FormatArg,
    /// Separable truncation radius: "auto" (ceil(4*lambda)), "full", or a
    /// pixel count.
    #[arg(long, default_value = "auto")]
    radius: String,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid size as WxH.
    #[arg(long, default_value = "640x480")]
    size: String,
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
    /// Comma-separated paths to time (exact, separable, fft).
    #[arg(long, default_value = "separable,fft")]
    paths: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_BENCH_SEED)]
    seed: u64,
    /// Pixel budget above which the exact path is refused.
    #[arg(long, default_value_t = DEFAULT_MAX_EXACT_PIXELS)]
    max_exact_pixels: usize,
    /// Run the exact path even above the pixel budget.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FanArgs {
    /// Input grid (PFM or Netpbm P5), values in [0, 1].
    #[arg(long)]
    input: PathBuf,
    /// Cutoff as normalized radial frequency in (0, 0.5].
    #[arg(long, default_value_t = 0.25)]
    rho0: f64,
    #[arg(long, default_value_t = 2.0)]
    sharpness: f64,
    /// Residual strength.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    out_gain: PathBuf,
    #[arg(long)]
    out_filtered: PathBuf,
}

#[derive(Args)]
struct LossArgs {
    /// Predicted probability grid (PFM).
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth binary mask (Netpbm P5 or PFM with 0/1 samples).
    #[arg(long)]
    gt: PathBuf,
    /// Comma-separated weights: cls,obj,mask,dice,gh.
    #[arg(long, default_value = "0.2,0.2,0.2,0.2,0.2")]
    weights: String,
    /// Comma-separated class logits (enables the cls term).
    #[arg(long, requires = "label")]
    logits: Option<String>,
    #[arg(long, requires = "logits")]
    label: Option<usize>,
    /// Objectness score (enables the obj term).
    #[arg(long, requires = "obj_label")]
    score: Option<f64>,
    #[arg(long, requires = "score", value_parser = clap::value_parser!(u8).range(0..=1))]
    obj_label: Option<u8>,
    /// Comma-separated predicted heatmap files (enables the gh term).
    #[arg(long, requires = "gh_lambdas", requires = "gh_strides")]
    gh_pred: Option<String>,
    /// Target scales, one per gh prediction map.
    #[arg(long, requires = "gh_pred")]
    gh_lambdas: Option<String>,
    /// Downsampling stride pairing each scale to its prediction resolution.
    #[arg(long, requires = "gh_pred")]
    gh_strides: Option<String>,
    #[arg(long, value_enum, default_value_t = PathArg::Separable)]
    gh_path: PathArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Predictions JSON (records carry scores).
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth JSON.
    #[arg(long)]
    gt: PathBuf,
    /// Per-image, per-category detection cap.
    #[arg(long, default_value_t = 100)]
    max_dets: usize,
    /// Directory for per-category PR-curve CSVs (columns: recall,precision).
    #[arg(long)]
    pr_dir: Option<PathBuf>,
    /// IoU threshold for the PR curves.
    #[arg(long, default_value_t = 0.5)]
    pr_threshold: f64,
}

#[derive(Args)]
struct VizArgs {
    #[arg(long)]
    mask: PathBuf,
    #[arg(long, default_value = "1,5,10,20")]
    lambdas: String,
    #[arg(long, value_enum, default_value_t = PathArg::Separable)]
    path: PathArg,
    /// Output panel (16-bit Netpbm).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

/// Input and precondition problems: exit 2.
fn usage(err: impl Display) -> CliError {
    CliError {
        code: 2,
        message: err.to_string(),
    }
}

/// Failures after validation passed: exit 1.
fn failure(err: impl Display) -> CliError {
    CliError {
        code: 1,
        message: err.to_string(),
    }
}

/// Parse arguments from the process environment and run. Returns the exit
/// code; clap itself exits with code 2 on flag errors.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let threads = cli.threads;
    match threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            2
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli.command)),
            Err(e) => {
                eprintln!("error: failed to build thread pool: {e}");
                1
            }
        },
        None => execute(cli.command),
    }
}

fn execute(command: Command) -> i32 {
    let result = match command {
        Command::Heatmap(args) => cmd_heatmap(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Fan(args) => cmd_fan(args),
        Command::Loss(args) => cmd_loss(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Viz(args) => cmd_viz(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("invalid {what} entry '{tok}'")))
        })
        .collect()
}

fn parse_lambdas(s: &str) -> Result<Vec<f64>, CliError> {
    let lambdas = parse_f64_list(s, "lambda")?;
    if lambdas.is_empty() {
        return Err(usage("lambda list must not be empty"));
    }
    for l in &lambdas {
        if !l.is_finite() || *l <= 0.0 {
            return Err(usage(format!("lambda {l} must be finite and > 0")));
        }
    }
    for pair in lambdas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(usage("lambdas must be strictly increasing"));
        }
    }
    Ok(lambdas)
}

fn parse_size(s: &str) -> Result<(usize, usize), CliError> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("size '{s}' must look like 640x480")))?;
    let width: usize = w
        .parse()
        .map_err(|_| usage(format!("invalid width '{w}'")))?;
    let height: usize = h
        .parse()
        .map_err(|_| usage(format!("invalid height '{h}'")))?;
    if width == 0 || height == 0 {
        return Err(usage(format!("size {width}x{height} must be positive")));
    }
    Ok((width, height))
}

enum RadiusSpec {
    Auto,
    Full,
    Fixed(usize),
}

fn parse_radius(s: &str) -> Result<RadiusSpec, CliError> {
    match s {
        "auto" => Ok(RadiusSpec::Auto),
        "full" => Ok(RadiusSpec::Full),
        other => {
            let r: usize = other.parse().map_err(|_| {
                usage(format!(
                    "radius '{other}' must be auto, full, or a pixel count"
                ))
            })?;
            if r == 0 {
                return Err(usage("radius must be at least 1"));
            }
            Ok(RadiusSpec::Fixed(r))
        }
    }
}

fn load_input_grid(path: &Path) -> Result<LuminanceGrid, CliError> {
    read_grid_auto(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn compute_heatmap(
    input: &LuminanceGrid,
    lambda: f64,
    path: ComputePath,
    radius: &RadiusSpec,
) -> Result<Heatmap, Error> {
    match path {
        ComputePath::Exact => pgm_exact(input, lambda),
        ComputePath::Fft => pgm_fft(input, lambda),
        ComputePath::Separable => {
            let truncation = match radius {
                RadiusSpec::Auto => Truncation::Radius(default_truncation_radius(lambda)),
                RadiusSpec::Full => Truncation::Full,
                RadiusSpec::Fixed(r) => Truncation::Radius(*r),
            };
            pgm_separable(input, lambda, truncation)
        }
    }
}

#[derive(Serialize)]
struct SidecarEntry {
    lambda: f64,
    file: String,
    seconds: f64,
}

#[derive(Serialize)]
struct HeatmapSidecar {
    mask: String,
    path: ComputePath,
    normalization: Normalization,
    radius: String,
    lambdas: Vec<f64>,
    outputs: Vec<SidecarEntry>,
}

fn cmd_heatmap(args: HeatmapArgs) -> Result<(), CliError> {
    let input = load_input_grid(&args.mask)?;
    let lambdas = parse_lambdas(&args.lambdas)?;
    let radius = parse_radius(&args.radius)?;
    let path: ComputePath = args.path.into();
    let normalization: Normalization = args.normalize.into();
    let stem = args
        .mask
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "heatmap".to_string());

    let computed: Vec<(Heatmap, f64)> = lambdas
        .par_iter()
        .map(|&lambda| {
            let start = Instant::now();
            let raw = compute_heatmap(&input, lambda, path, &radius)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok((normalize_heatmap(&raw, normalization), seconds))
        })
        .collect::<Result<_, Error>>()
        .map_err(failure)?;

    std::fs::create_dir_all(&args.out_dir).map_err(failure)?;
    let (ext, kind) = match args.format {
        FormatArg::Pfm => ("pfm", WriteKind::PfmFloat),
        FormatArg::Pgm16 => ("pgm", WriteKind::NetpbmGray16),
    };
    let mut outputs = Vec::with_capacity(computed.len());
    for (map, seconds) in &computed {
        let file = format!("{stem}_lambda{}.{ext}", map.lambda());
        write_grid(map.grid(), args.out_dir.join(&file), kind).map_err(failure)?;
        outputs.push(SidecarEntry {
            lambda: map.lambda(),
            file,
            seconds: *seconds,
        });
    }
    let sidecar = HeatmapSidecar {
        mask: args.mask.display().to_string(),
        path,
        normalization,
        radius: args.radius.clone(),
        lambdas,
        outputs,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(failure)?;
    std::fs::write(
        args.out_dir.join(format!("{stem}_heatmaps.json")),
        json + "\n",
    )
    .map_err(failure)?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let (width, height) = parse_size(&args.size)?;
    let paths = args
        .paths
        .split(',')
        .map(|tok| match tok.trim() {
            "exact" => Ok(ComputePath::Exact),
            "separable" => Ok(ComputePath::Separable),
            "fft" => Ok(ComputePath::Fft),
            other => Err(usage(format!("unknown path '{other}'"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        width,
        height,
        lambda: args.lambda,
        paths,
        repetitions: args.reps,
        seed: args.seed,
        max_exact_pixels: args.max_exact_pixels,
        force: args.force,
    };
    if !cfg.lambda.is_finite() || cfg.lambda <= 0.0 {
        return Err(usage(format!(
            "lambda {} must be finite and > 0",
            cfg.lambda
        )));
    }
    // run_bench validates the remaining preconditions (repetitions, budget)
    // before any computation, so its errors are usage errors.
    let report = run_bench(&cfg).map_err(usage)?;
    let json = serde_json::to_string_pretty(&report).map_err(failure)?;
    println!("{json}");
    Ok(())
}

fn cmd_fan(args: FanArgs) -> Result<(), CliError> {
    let input = load_input_grid(&args.input)?;
    let cfg = FanConfig::new(args.rho0, args.sharpness, args.alpha).map_err(usage)?;
    let gain = fan_gain(input.grid(), &cfg).map_err(failure)?;
    let filtered = fan_apply(input.grid(), &gain, cfg.alpha()).map_err(failure)?;
    write_grid(&gain, &args.out_gain, WriteKind::PfmFloat).map_err(failure)?;
    write_grid(&filtered, &args.out_filtered, WriteKind::PfmFloat).map_err(failure)?;
    Ok(())
}

fn cmd_loss(args: LossArgs) -> Result<(), CliError> {
    let pred = load_input_grid(&args.pred)?;
    let gt_grid = load_input_grid(&args.gt)?;
    let gt = gt_grid
        .to_mask()
        .map_err(|e| usage(format!("{}: {e}", args.gt.display())))?;
    let w = parse_f64_list(&args.weights, "weight")?;
    if w.len() != 5 {
        return Err(usage(format!("expected 5 weights, got {}", w.len())));
    }
    let weights = LossWeights::new(w[0], w[1], w[2], w[3], w[4]).map_err(usage)?;

    let logits = match &args.logits {
        Some(s) => Some(parse_f64_list(s, "logit")?),
        None => None,
    };
    let gh_inputs = match &args.gh_pred {
        Some(files) => {
            let lambdas = parse_lambdas(args.gh_lambdas.as_deref().unwrap())?;
            let strides = args
                .gh_strides
                .as_deref()
                .unwrap()
                .split(',')
                .map(|tok| {
                    let s: usize = tok
                        .trim()
                        .parse()
                        .map_err(|_| usage(format!("invalid stride '{tok}'")))?;
                    if s == 0 {
                        return Err(usage("strides must be >= 1"));
                    }
                    Ok(s)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let maps = files
                .split(',')
                .map(|f| load_input_grid(Path::new(f.trim())).map(|g| g.into_grid()))
                .collect::<Result<Vec<_>, _>>()?;
            if maps.len() != lambdas.len() || strides.len() != lambdas.len() {
                return Err(usage(format!(
                    "gh inputs must align: {} maps, {} lambdas, {} strides",
                    maps.len(),
                    lambdas.len(),
                    strides.len()
                )));
            }
            Some((maps, lambdas, strides))
        }
        None => None,
    };

    let mut parts = LossTerms {
        mask: bce_pixel(pred.grid(), &gt).map_err(failure)?,
        dice: dice_loss(pred.grid(), &gt).map_err(failure)?,
        ..Default::default()
    };
    if let Some(logits) = &logits {
        parts.cls = cross_entropy(logits, args.label.unwrap()).map_err(usage)?;
    }
    if let Some(score) = args.score {
        parts.obj = bce_scalar(score, args.obj_label.unwrap() == 1).map_err(usage)?;
    }
    if let Some((maps, lambdas, strides)) = &gh_inputs {
        let target = crate::pgm::multiscale_stack(
            &gt.to_luminance(),
            lambdas,
            args.gh_path.into(),
            Normalization::MaxOne,
        )
        .map_err(failure)?;
        parts.gh = gh_loss(maps, &target, strides).map_err(usage)?;
    }

    let breakdown = total_loss(&parts, &weights).map_err(failure)?;
    let json = serde_json::to_string_pretty(&breakdown).map_err(failure)?;
    println!("{json}");
    Ok(())
}

fn filter_category<T: Clone>(
    per_image: &[PerImage<T>],
    keep: impl Fn(&T) -> bool,
) -> Vec<PerImage<T>> {
    per_image
        .iter()
        .map(|p| PerImage {
            image_id: p.image_id,
            items: p.items.iter().filter(|i| keep(i)).cloned().collect(),
        })
        .collect()
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let AnnotationSet::Predictions(dets) =
        load_annotations(&args.pred, AnnotationKind::Predictions)
            .map_err(|e| usage(format!("{}: {e}", args.pred.display())))?
    else {
        unreachable!("loader returns the requested kind")
    };
    let AnnotationSet::GroundTruth(gts) =
        load_annotations(&args.gt, AnnotationKind::GroundTruth)
            .map_err(|e| usage(format!("{}: {e}", args.gt.display())))?
    else {
        unreachable!("loader returns the requested kind")
    };
    if args.max_dets == 0 {
        return Err(usage("max-dets must be at least 1"));
    }
    if !(0.0..=1.0).contains(&args.pr_threshold) {
        return Err(usage("pr-threshold must lie in [0, 1]"));
    }

    let cfg = EvalConfig {
        max_detections: args.max_dets,
    };
    let result = coco_map_with(&dets, &gts, &cfg).map_err(failure)?;
    let json = serde_json::to_string_pretty(&result).map_err(failure)?;
    println!("{json}");

    if let Some(dir) = &args.pr_dir {
        std::fs::create_dir_all(dir).map_err(failure)?;
        // One CSV per category that has ground truth.
        let mut categories: Vec<u32> = result.per_category.keys().copied().collect();
        categories.sort_unstable();
        for cat in categories {
            let cat_gts = filter_category(&gts, |g: &InstanceAnnotation| g.category_id() == cat);
            if cat_gts.iter().all(|p| p.items.is_empty()) {
                continue;
            }
            let cat_dets = filter_category(&dets, |d: &Detection| d.category_id() == cat);
            let curve = pr_curve(&cat_dets, &cat_gts, args.pr_threshold).map_err(failure)?;
            let mut csv = String::from("recall,precision\n");
            for (recall, precision) in &curve.points {
                csv.push_str(&format!("{recall:.2},{precision}\n"));
            }
            std::fs::write(dir.join(format!("pr_category_{cat}.csv")), csv).map_err(failure)?;
        }
    }
    Ok(())
}

fn cmd_viz(args: VizArgs) -> Result<(), CliError> {
    let input = load_input_grid(&args.mask)?;
    let lambdas = parse_lambdas(&args.lambdas)?;
    let stack =
        crate::pgm::multiscale_stack(&input, &lambdas, args.path.into(), Normalization::MaxOne)
            .map_err(failure)?;
    let panel = tile_stack(&stack).map_err(failure)?;
    write_grid(&panel, &args.out, WriteKind::NetpbmGray16).map_err(failure)?;
    Ok(())
}
