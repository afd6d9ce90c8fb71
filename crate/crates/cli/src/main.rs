//! skin-sentinel: nudity screening from the command line.
//!
//! Exit codes: 0 success (or non-nude in gate mode), 1 operational error,
//! 2 image decode failure, 3 nude in gate mode, 4 detector failure under
//! the fail policy, 64 bad flags.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use skin_sentinel::{
    build_skin_mask, build_skin_mask_sequential, compare_rules, eval_images,
    faces_from_service, faces_from_sidecar, render_overlay, screen_image_with_mask, FaceSet,
    ImageBuffer, ImageDataset, PixelDataset, RuleRegistry, SkinLut, SkinRuleId, Thresholds,
    Verdict,
};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_DECODE: u8 = 2;
const EXIT_NUDE: u8 = 3;
const EXIT_DETECTOR: u8 = 4;
const EXIT_USAGE: u8 = 64;

const DETECTOR_TIMEOUT: Duration = Duration::from_secs(10);
const DETECTOR_URL_ENV: &str = "SKIN_SENTINEL_DETECTOR_URL";

#[derive(Parser)]
#[command(name = "skin-sentinel", version, about = "Skin-rule nudity screening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one image as nude / non-nude
    Classify(ClassifyArgs),
    /// Evaluate a rule on a labeled pixel or image dataset
    Eval(EvalArgs),
    /// Measure mask-building throughput
    Bench(BenchArgs),
}

#[derive(Args)]
struct RuleArgs {
    /// Skin rule to apply
    #[arg(long, default_value = "proposed")]
    rule: String,
    /// Extra rule definition files (JSON), loaded into the registry
    #[arg(long = "rule-file")]
    rule_file: Vec<PathBuf>,
}

impl RuleArgs {
    fn registry(&self) -> Result<RuleRegistry, String> {
        let mut registry = RuleRegistry::with_builtins();
        for path in &self.rule_file {
            registry.load_rule_file(path).map_err(|e| e.to_string())?;
        }
        Ok(registry)
    }
}

#[derive(Args)]
struct ThresholdArgs {
    /// Face-skin / total-skin nude threshold (face-present branch)
    #[arg(long = "face-threshold", default_value_t = 0.15)]
    face_threshold: f64,
    /// Skin / total-pixels nude threshold (no-face branch)
    #[arg(long = "skin-threshold", default_value_t = 0.38)]
    skin_threshold: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Result<Thresholds, String> {
        Thresholds::new(self.face_threshold, self.skin_threshold).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnDetectorError {
    /// Abort classification when the detector fails
    Fail,
    /// Degrade to the no-face branch and mark the decision
    NoFace,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Image to classify (PNG/JPEG; alpha dropped, grayscale expanded)
    image: PathBuf,
    #[command(flatten)]
    rule: RuleArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Face boxes from a sidecar JSON file
    #[arg(long, conflicts_with_all = ["detector_url", "no_faces"])]
    faces: Option<PathBuf>,
    /// Face boxes from an HTTP detector endpoint
    #[arg(long = "detector-url", conflicts_with = "no_faces")]
    detector_url: Option<String>,
    /// Skip face detection; always take the no-face branch
    #[arg(long = "no-faces")]
    no_faces: bool,
    /// What to do when the detector service fails
    #[arg(long = "on-detector-error", value_enum, default_value = "fail")]
    on_detector_error: OnDetectorError,
    /// Emit the decision as JSON
    #[arg(long)]
    json: bool,
    /// Write a pink/green diagnostic overlay image here
    #[arg(long)]
    overlay: Option<PathBuf>,
    /// Gate mode: exit 0 for non-nude, 3 for nude
    #[arg(long)]
    gate: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DatasetKind {
    Pixels,
    Images,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset CSV (pixels: r,g,b,label; images: path,faces_path,label),
    /// or an image file when --mask is given
    dataset: PathBuf,
    /// Dataset kind
    #[arg(long, value_enum)]
    kind: DatasetKind,
    #[command(flatten)]
    rule: RuleArgs,
    /// Compare several rules (comma-separated) on a pixel dataset
    #[arg(long, value_delimiter = ',')]
    rules: Vec<String>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Treat the dataset argument as an image and read skin labels from
    /// this same-size mask image (nonzero = skin)
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Image to benchmark on
    #[arg(required_unless_present = "synthetic", conflicts_with = "synthetic")]
    image: Option<PathBuf>,
    /// Benchmark on a synthetic WxH image (e.g. 1920x1080)
    #[arg(long)]
    synthetic: Option<String>,
    #[command(flatten)]
    rule: RuleArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
    };
    ExitCode::from(code)
}

fn fail(code: u8, message: impl std::fmt::Display) -> u8 {
    eprintln!("skin-sentinel: {message}");
    code
}

fn load_image(path: &PathBuf) -> Result<(Vec<u8>, ImageBuffer), String> {
    let bytes =
        std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let dynamic = image::load_from_memory(&bytes)
        .map_err(|e| format!("cannot decode {}: {e}", path.display()))?;
    let buffer = ImageBuffer::from_rgb_image(&dynamic.to_rgb8())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((bytes, buffer))
}

fn cmd_classify(args: ClassifyArgs) -> u8 {
    let thresholds = match args.thresholds.thresholds() {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let registry = match args.rule.registry() {
        Ok(r) => r,
        Err(e) => return fail(EXIT_ERROR, e),
    };
    let rule = SkinRuleId::new(args.rule.rule.clone());
    if registry.get(&rule).is_err() {
        return fail(EXIT_USAGE, format!("unknown skin rule: {}", rule));
    }

    let (encoded, img) = match load_image(&args.image) {
        Ok(pair) => pair,
        Err(e) => return fail(EXIT_DECODE, e),
    };

    let detector_url = args
        .detector_url
        .clone()
        .or_else(|| {
            if args.faces.is_some() || args.no_faces {
                None
            } else {
                std::env::var(DETECTOR_URL_ENV).ok()
            }
        });

    let mut fallback_applied = false;
    let faces = if let Some(path) = &args.faces {
        match faces_from_sidecar(path, img.dims()) {
            Ok(set) => set,
            Err(e) => return fail(EXIT_ERROR, e),
        }
    } else if let Some(url) = &detector_url {
        match faces_from_service(url, &encoded, DETECTOR_TIMEOUT, img.dims()) {
            Ok(set) => set,
            Err(e) => match args.on_detector_error {
                OnDetectorError::Fail => return fail(EXIT_DETECTOR, e),
                OnDetectorError::NoFace => {
                    eprintln!("skin-sentinel: detector failed ({e}); proceeding without faces");
                    fallback_applied = true;
                    FaceSet::empty(url.clone())
                }
            },
        }
    } else {
        FaceSet::empty("none")
    };

    let (decision, mask) =
        match screen_image_with_mask(&registry, &img, &faces, &rule, thresholds, fallback_applied)
        {
            Ok(out) => out,
            Err(e) => return fail(EXIT_ERROR, e),
        };

    if let Some(path) = &args.overlay {
        let overlay = render_overlay(&img, &mask, &faces);
        if let Err(e) = overlay.to_rgb_image().save(path) {
            return fail(EXIT_ERROR, format!("cannot write overlay: {e}"));
        }
    }

    if args.json {
        println!("{}", decision.to_json());
    } else {
        println!("verdict: {}", decision.verdict.as_str());
        println!("branch: {}", decision.branch.as_str());
        println!("rule: {}", decision.rule);
        println!("total pixels: {}", decision.counts.total);
        println!("skin pixels: {}", decision.counts.skin);
        println!("face skin pixels: {}", decision.counts.face_skin);
        println!("faces: {}", decision.face_count);
        println!(
            "ratio: {:.6} (display {:.2})",
            decision.ratio, decision.ratio_display
        );
        println!(
            "thresholds: face {} / skin {}",
            decision.thresholds.face_ratio, decision.thresholds.skin_ratio
        );
        println!("fallback applied: {}", decision.fallback_applied);
    }

    if args.gate && decision.verdict == Verdict::Nude {
        EXIT_NUDE
    } else {
        EXIT_OK
    }
}

fn cmd_eval(args: EvalArgs) -> u8 {
    let registry = match args.rule.registry() {
        Ok(r) => r,
        Err(e) => return fail(EXIT_ERROR, e),
    };
    match args.kind {
        DatasetKind::Pixels => {
            let ds = if let Some(mask) = &args.mask {
                PixelDataset::from_mask_pair(&args.dataset, mask)
            } else {
                PixelDataset::from_csv_path(&args.dataset)
            };
            let ds = match ds {
                Ok(ds) => ds,
                Err(e) => return fail(EXIT_ERROR, e),
            };
            let rules: Vec<SkinRuleId> = if args.rules.is_empty() {
                vec![SkinRuleId::new(args.rule.rule.clone())]
            } else {
                args.rules.iter().map(SkinRuleId::new).collect()
            };
            let reports = match compare_rules(&ds, &rules, &registry) {
                Ok(reports) => reports,
                Err(e) => return fail(EXIT_ERROR, e),
            };
            if args.json {
                println!("{}", serde_json::to_string(&reports).unwrap());
            } else {
                print!("{}", skin_sentinel::eval::render_comparison_table(&reports));
            }
            EXIT_OK
        }
        DatasetKind::Images => {
            if args.mask.is_some() {
                return fail(EXIT_USAGE, "--mask only applies to --kind pixels");
            }
            let thresholds = match args.thresholds.thresholds() {
                Ok(t) => t,
                Err(e) => return fail(EXIT_USAGE, e),
            };
            let ds = match ImageDataset::from_csv_path(&args.dataset) {
                Ok(ds) => ds,
                Err(e) => return fail(EXIT_ERROR, e),
            };
            let rule = SkinRuleId::new(args.rule.rule.clone());
            let report = match eval_images(&ds, &rule, thresholds, &registry) {
                Ok(report) => report,
                Err(e) => return fail(EXIT_ERROR, e),
            };
            if args.json {
                println!("{}", serde_json::to_string(&report).unwrap());
            } else {
                println!("rule: {}", report.rule);
                println!("evaluated: {}", report.evaluated);
                println!("accuracy: {:.2}%", report.accuracy);
                println!("nude accuracy: {:.2}%", report.nude_accuracy);
                println!("non-nude accuracy: {:.2}%", report.non_nude_accuracy);
                println!(
                    "confusion: true_nude={} false_nude={} true_non_nude={} false_non_nude={}",
                    report.true_nude,
                    report.false_nude,
                    report.true_non_nude,
                    report.false_non_nude
                );
                for r in &report.results {
                    println!(
                        "  {} label={} verdict={} ratio={:.4} {}",
                        r.path,
                        r.label,
                        r.verdict,
                        r.ratio,
                        if r.correct { "ok" } else { "MISS" }
                    );
                }
                if !report.failures.is_empty() {
                    println!("failures: {}", report.failures.len());
                    for f in &report.failures {
                        println!("  {f}");
                    }
                }
            }
            EXIT_OK
        }
    }
}

fn parse_synthetic(spec: &str) -> Result<(u32, u32), String> {
    let (w, h) = spec
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {spec:?}"))?;
    let w: u32 = w.parse().map_err(|_| format!("bad width in {spec:?}"))?;
    let h: u32 = h.parse().map_err(|_| format!("bad height in {spec:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("dimensions must be positive: {spec:?}"));
    }
    Ok((w, h))
}

fn synthetic_image(width: u32, height: u32) -> ImageBuffer {
    // Mixed content: a deterministic ramp over the full RGB range.
    let pixels = (0..width as u64 * height as u64)
        .map(|i| {
            let v = i.wrapping_mul(2654435761);
            skin_sentinel::Rgb8::new((v >> 16) as u8, (v >> 8) as u8, v as u8)
        })
        .collect();
    ImageBuffer::new(width, height, pixels).expect("dimensions validated")
}

fn median_duration(mut samples: Vec<Duration>) -> Duration {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

fn bench_pass(name: &str, megapixels: f64, mut run: impl FnMut()) {
    const WARMUP: usize = 3;
    const MEASURED: usize = 10;
    for _ in 0..WARMUP {
        run();
    }
    let mut samples = Vec::with_capacity(MEASURED);
    for _ in 0..MEASURED {
        let start = Instant::now();
        run();
        samples.push(start.elapsed().max(Duration::from_nanos(1)));
    }
    let median = median_duration(samples);
    println!(
        "{name}: {:.2} Mpx/s (median {:.3} ms over {MEASURED} iterations)",
        megapixels / median.as_secs_f64(),
        median.as_secs_f64() * 1e3,
    );
}

fn cmd_bench(args: BenchArgs) -> u8 {
    let registry = match args.rule.registry() {
        Ok(r) => r,
        Err(e) => return fail(EXIT_ERROR, e),
    };
    let rule_id = SkinRuleId::new(args.rule.rule.clone());
    let rule = match registry.get(&rule_id) {
        Ok(rule) => rule.clone(),
        Err(e) => return fail(EXIT_USAGE, e),
    };

    let img = if let Some(spec) = &args.synthetic {
        match parse_synthetic(spec) {
            Ok((w, h)) => synthetic_image(w, h),
            Err(e) => return fail(EXIT_USAGE, e),
        }
    } else {
        match load_image(args.image.as_ref().expect("clap enforces presence")) {
            Ok((_, img)) => img,
            Err(e) => return fail(EXIT_DECODE, e),
        }
    };

    let megapixels = img.pixel_count() as f64 / 1e6;
    println!(
        "image: {}x{} ({:.2} Mpx), rule: {rule_id}",
        img.width(),
        img.height(),
        megapixels
    );

    bench_pass("mask sequential", megapixels, || {
        std::hint::black_box(build_skin_mask_sequential(&img, rule.as_ref()));
    });
    bench_pass("mask parallel", megapixels, || {
        std::hint::black_box(build_skin_mask(&img, rule.as_ref()));
    });

    let start = Instant::now();
    let lut = SkinLut::build(rule.as_ref());
    println!(
        "lookup table build: {:.1} ms",
        start.elapsed().as_secs_f64() * 1e3
    );
    if let Err(p) = lut.verify_sample(rule.as_ref(), 10_000) {
        return fail(EXIT_ERROR, format!("lookup table mismatch at {p:?}"));
    }
    bench_pass("mask parallel (lookup table)", megapixels, || {
        std::hint::black_box(build_skin_mask(&img, &lut));
    });

    EXIT_OK
}
