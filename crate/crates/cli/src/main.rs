//! `antcircle` — detect circles in edge images, or generate synthetic
//! fixtures with known ground truth.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 i/o failure, 4 unsupported
//! image format.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use antcircle::io::{self, ImageIoError};
use antcircle::synth::{
    self, DistractorSpec, GroundTruth, SynthError, TruthCircle,
};
use antcircle::{build_report, detect_map, CycleLimits, DetectConfig, FitConfig};

const EXIT_BAD_ARGS: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_FORMAT: u8 = 4;

#[derive(Parser)]
#[command(name = "antcircle", version, about = "Circle detection in binary edge images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect circles in an edge image and emit a report.
    Detect(DetectArgs),
    /// Generate a synthetic edge image plus a ground-truth sidecar.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DetectArgs {
    /// Input image (PGM P2/P5 or 8-bit grayscale PNG).
    input: PathBuf,
    /// Intensity threshold: a pixel is an edge pixel iff intensity >= threshold.
    #[arg(long, default_value_t = 128)]
    threshold: u8,
    /// Treat intensities below the threshold as edge pixels instead.
    #[arg(long)]
    invert: bool,
    /// Seed for sampling trials (and random seeding when enabled).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance floor in pixels.
    #[arg(long, default_value_t = 1.5)]
    tol_abs: f64,
    /// Relative tolerance as a fraction of the radius.
    #[arg(long, default_value_t = 0.04)]
    tol_rel: f64,
    /// Smallest acceptable circle radius.
    #[arg(long, default_value_t = 5.0)]
    min_radius: f64,
    /// Shortest loop worth testing, in pixels.
    #[arg(long, default_value_t = 20)]
    min_loop_length: usize,
    /// Sampling trials per loop.
    #[arg(long, default_value_t = 3)]
    trials: u32,
    /// Cycle enumeration cap.
    #[arg(long, default_value_t = 10_000)]
    max_cycles: usize,
    /// Longest cycle, in branches.
    #[arg(long, default_value_t = 32)]
    max_cycle_branches: usize,
    /// Write an overlay image with detected loops re-colored.
    #[arg(long)]
    overlay: Option<PathBuf>,
    /// Intensity for detected loop pixels in the overlay.
    #[arg(long, default_value_t = 200)]
    overlay_intensity: u8,
    /// Report format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Seed mother ants at random unvisited pixels instead of raster order.
    #[arg(long)]
    random_start: bool,
    /// Zero the timing block so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output image path (.pgm or .png).
    #[arg(short, long)]
    output: PathBuf,
    /// Ground-truth sidecar path; defaults to the output with a .json extension.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    width: u32,
    #[arg(long, default_value_t = 256)]
    height: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of randomly placed circles.
    #[arg(long, default_value_t = 0)]
    circles: u32,
    /// Number of random line distractors.
    #[arg(long, default_value_t = 0)]
    lines: u32,
    /// Explicit circle as cx,cy,r (repeatable).
    #[arg(long = "circle", value_parser = parse_circle)]
    circle_specs: Vec<TruthCircle>,
    /// Explicit line as x0,y0,x1,y1 (repeatable).
    #[arg(long = "line", value_parser = parse_line)]
    line_specs: Vec<DistractorSpec>,
    /// Explicit axis-aligned square as cx,cy,side (repeatable).
    #[arg(long = "square", value_parser = parse_square)]
    square_specs: Vec<DistractorSpec>,
    /// Explicit axis-aligned ellipse as cx,cy,a,b (repeatable).
    #[arg(long = "ellipse", value_parser = parse_ellipse)]
    ellipse_specs: Vec<DistractorSpec>,
    /// Explicit equilateral triangle as cx,cy,side[,rotation] (repeatable).
    #[arg(long = "triangle", value_parser = parse_triangle)]
    triangle_specs: Vec<DistractorSpec>,
}

fn parse_parts(s: &str, want: &[usize]) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if !want.contains(&parts.len()) {
        return Err(format!(
            "expected {} comma-separated numbers, got {}",
            want.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" or "),
            parts.len()
        ));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect()
}

fn parse_circle(s: &str) -> Result<TruthCircle, String> {
    let v = parse_parts(s, &[3])?;
    if v[2] < 1.0 {
        return Err("radius must be at least 1".into());
    }
    Ok(TruthCircle {
        cx: v[0],
        cy: v[1],
        r: v[2],
    })
}

fn parse_line(s: &str) -> Result<DistractorSpec, String> {
    let v = parse_parts(s, &[4])?;
    Ok(DistractorSpec::Line {
        x0: v[0] as i64,
        y0: v[1] as i64,
        x1: v[2] as i64,
        y1: v[3] as i64,
    })
}

fn parse_square(s: &str) -> Result<DistractorSpec, String> {
    let v = parse_parts(s, &[3])?;
    Ok(DistractorSpec::Square {
        cx: v[0] as i64,
        cy: v[1] as i64,
        side: v[2] as i64,
    })
}

fn parse_ellipse(s: &str) -> Result<DistractorSpec, String> {
    let v = parse_parts(s, &[4])?;
    Ok(DistractorSpec::Ellipse {
        cx: v[0] as i64,
        cy: v[1] as i64,
        a: v[2] as i64,
        b: v[3] as i64,
    })
}

fn parse_triangle(s: &str) -> Result<DistractorSpec, String> {
    let v = parse_parts(s, &[3, 4])?;
    Ok(DistractorSpec::Triangle {
        cx: v[0],
        cy: v[1],
        side: v[2],
        rotation: v.get(3).copied().unwrap_or(0.0),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("antcircle: {msg}");
            ExitCode::from(code)
        }
    }
}

fn io_exit(e: &ImageIoError) -> u8 {
    match e {
        ImageIoError::UnsupportedFormat(_) => EXIT_FORMAT,
        _ => EXIT_IO,
    }
}

fn cmd_detect(args: DetectArgs) -> Result<(), (u8, String)> {
    if args.tol_abs <= 0.0 || !(0.0..1.0).contains(&args.tol_rel) || args.trials == 0 {
        return Err((
            EXIT_BAD_ARGS,
            "tolerances must be positive (tol_rel below 1) and trials at least 1".into(),
        ));
    }
    let map = io::load_edge_map(&args.input, args.threshold, args.invert)
        .map_err(|e| (io_exit(&e), format!("{}: {e}", args.input.display())))?;

    let cfg = DetectConfig {
        threshold: args.threshold,
        invert: args.invert,
        random_start: args.random_start,
        fit: FitConfig {
            tol_abs: args.tol_abs,
            tol_rel: args.tol_rel,
            min_radius: args.min_radius,
            min_loop_length: args.min_loop_length,
            trials: args.trials,
            seed: args.seed,
        },
        limits: CycleLimits {
            max_cycles: args.max_cycles,
            max_cycle_branches: args.max_cycle_branches,
        },
    };
    let detection = detect_map(&map, &cfg);

    if let Some(path) = &args.overlay {
        io::write_overlay(path, &map, &detection.hits, args.overlay_intensity)
            .map_err(|e| (io_exit(&e), format!("{}: {e}", path.display())))?;
    }

    let mut report = build_report(&detection, &cfg);
    if args.no_timing {
        report.zero_timing();
    }
    let body = match args.format.as_str() {
        "csv" => report.to_csv(),
        _ => report.to_json_string(),
    };
    match &args.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| (EXIT_IO, format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), (u8, String)> {
    if args.width == 0 || args.height == 0 {
        return Err((EXIT_BAD_ARGS, "canvas must be at least 1x1".into()));
    }
    let mut truth = GroundTruth::empty(args.width, args.height);

    if args.circles > 0 || args.lines > 0 {
        let (_, random) = synth::random_circles_scene(
            args.width,
            args.height,
            args.seed,
            (args.circles, args.circles),
            (15, 60),
            (args.lines, args.lines),
        );
        truth.circles.extend(random.circles);
        truth.distractors.extend(random.distractors);
    }
    truth.circles.extend(args.circle_specs.iter().cloned());
    for spec in args
        .line_specs
        .iter()
        .chain(&args.square_specs)
        .chain(&args.ellipse_specs)
        .chain(&args.triangle_specs)
    {
        truth.distractors.push(spec.clone());
    }
    if truth.circles.is_empty() && truth.distractors.is_empty() {
        return Err((
            EXIT_BAD_ARGS,
            "nothing to draw: give --circles/--lines or explicit shapes".into(),
        ));
    }

    let map = synth::render_truth(&truth).map_err(|e| match e {
        SynthError::OffCanvas => (EXIT_BAD_ARGS, format!("shape off canvas: {e}")),
        SynthError::BadParam(_) => (EXIT_BAD_ARGS, e.to_string()),
    })?;

    let gray = io::edge_map_to_gray(&map, 255, 0);
    io::save_gray(&args.output, map.width(), map.height(), &gray)
        .map_err(|e| (io_exit(&e), format!("{}: {e}", args.output.display())))?;

    let truth_path = args
        .truth
        .clone()
        .unwrap_or_else(|| args.output.with_extension("json"));
    std::fs::write(&truth_path, truth.to_json_string())
        .map_err(|e| (EXIT_IO, format!("{}: {e}", truth_path.display())))?;
    Ok(())
}
