//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data error,
//! 3 I/O error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::run_bench;
use crate::error::Error;
use crate::geometry::{DilationLevel, IrisGeometry};
use crate::imaging::{load_image, save_image, PixelGrid, Semantics};
use crate::metrics::{iou, per_class_iou, IoUConfig, DEFAULT_IOU_EPSILON};
use crate::normalization::{rubber_sheet, DEFAULT_SHEET_HEIGHT, DEFAULT_SHEET_WIDTH};
use crate::pipeline::{build_plan, run_manifest, sidecar_path, DatasetManifest, Sidecar};
use crate::resampler::{remap_dilation, SamplingMethod};
use crate::synthetic::SyntheticEye;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// Diagnostic for standard error; empty on success.
    pub message: String,
}

impl CommandOutcome {
    fn ok() -> Self {
        Self {
            exit_code: EXIT_OK,
            message: String::new(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CommandOutcome {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::Domain(_) => EXIT_USAGE,
            Error::Geometry(_)
            | Error::Semantics(_)
            | Error::Format { .. }
            | Error::Manifest { .. } => EXIT_DATA,
            Error::Io { .. } => EXIT_IO,
        };
        Self {
            exit_code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "iris-dilate",
    version,
    about = "Re-render iris images and masks at new pupil dilation levels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Remap one image (or mask) to a target dilation level.
    Dilate(DilateArgs),
    /// Augment every record of a manifest over a plan of dilation levels.
    Augment(AugmentArgs),
    /// Unwrap the iris annulus into a rubber sheet.
    Normalize(NormalizeArgs),
    /// Print the IoU of two masks.
    Iou(IouArgs),
    /// Write a horizontal strip: the input followed by one panel per level.
    Preview(PreviewArgs),
    /// Measure remap throughput.
    Bench(BenchArgs),
}

fn parse_level(s: &str) -> Result<DilationLevel, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    DilationLevel::new(v).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<SamplingMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct GeometryArgs {
    /// Circle center x, in pixels.
    #[arg(long, allow_negative_numbers = true)]
    cx: Option<f64>,
    /// Circle center y, in pixels.
    #[arg(long, allow_negative_numbers = true)]
    cy: Option<f64>,
    #[arg(long)]
    r_pupil: Option<f64>,
    #[arg(long)]
    r_iris: Option<f64>,
    /// Sidecar file supplying any circle value not given by flag.
    #[arg(long)]
    geometry: Option<PathBuf>,
}

impl GeometryArgs {
    fn is_empty(&self) -> bool {
        self.cx.is_none()
            && self.cy.is_none()
            && self.r_pupil.is_none()
            && self.r_iris.is_none()
            && self.geometry.is_none()
    }

    fn resolve(&self) -> Result<IrisGeometry, CommandOutcome> {
        let base = self
            .geometry
            .as_ref()
            .map(Sidecar::read)
            .transpose()?
            .map(|s| s.geometry);
        let pick = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
            flag.or(from_file).ok_or_else(|| {
                CommandOutcome::usage(format!("missing --{name} (flag or --geometry sidecar)"))
            })
        };
        let g = IrisGeometry::new(
            pick(self.cx, base.map(|g| g.center_x()), "cx")?,
            pick(self.cy, base.map(|g| g.center_y()), "cy")?,
            pick(self.r_pupil, base.map(|g| g.r_pupil()), "r-pupil")?,
            pick(self.r_iris, base.map(|g| g.r_iris()), "r-iris")?,
        )?;
        Ok(g)
    }
}

#[derive(Debug, Args)]
struct DilateArgs {
    #[arg(long)]
    image: PathBuf,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Target dilation level in (0, 1).
    #[arg(long, value_parser = parse_level)]
    lambda: DilationLevel,
    #[arg(long, default_value = "nearest", value_parser = parse_method)]
    method: SamplingMethod,
    #[arg(long)]
    out: PathBuf,
    /// Treat the input as a label mask (forces nearest sampling).
    #[arg(long)]
    mask_mode: bool,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 19)]
    levels: usize,
    #[arg(long, default_value = "0.15", value_parser = parse_level)]
    lambda_min: DilationLevel,
    #[arg(long, default_value = "0.75", value_parser = parse_level)]
    lambda_max: DilationLevel,
    #[arg(long, default_value = "nearest", value_parser = parse_method)]
    method: SamplingMethod,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Also copy each original into the output set.
    #[arg(
        long,
        num_args = 0..=1,
        default_value_t = true,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    include_original: bool,
}

#[derive(Debug, Args)]
struct NormalizeArgs {
    #[arg(long)]
    image: PathBuf,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Angular samples.
    #[arg(long, default_value_t = DEFAULT_SHEET_WIDTH)]
    width: usize,
    /// Radial samples.
    #[arg(long, default_value_t = DEFAULT_SHEET_HEIGHT)]
    height: usize,
    #[arg(long, default_value = "nearest", value_parser = parse_method)]
    method: SamplingMethod,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    mask_mode: bool,
}

#[derive(Debug, Args)]
struct IouArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_IOU_EPSILON)]
    epsilon: f64,
    /// Score a single class id of multi-class masks instead of binary masks.
    #[arg(long)]
    class: Option<u8>,
}

#[derive(Debug, Args)]
struct PreviewArgs {
    #[arg(long)]
    image: PathBuf,
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Comma-separated target levels.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_level)]
    levels: Vec<DilationLevel>,
    #[arg(long, default_value = "nearest", value_parser = parse_method)]
    method: SamplingMethod,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Input image; a synthetic 320x280 eye is used when absent.
    #[arg(long)]
    image: Option<PathBuf>,
    #[command(flatten)]
    geometry: GeometryArgs,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value = "nearest", value_parser = parse_method)]
    method: SamplingMethod,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

type CmdResult = Result<(), CommandOutcome>;

fn dilate(args: DilateArgs) -> CmdResult {
    let g = args.geometry.resolve()?;
    let semantics = if args.mask_mode {
        Semantics::Label
    } else {
        Semantics::Intensity
    };
    let method = if args.mask_mode {
        SamplingMethod::Nearest
    } else {
        args.method
    };
    let image = load_image(&args.image, semantics)?;
    let res = remap_dilation(&image, &g, args.lambda, method)?;
    save_image(&res.image, &args.out)?;
    Sidecar {
        geometry: res.geometry,
        lambda: res.lambda,
    }
    .write(sidecar_path(&args.out))?;
    println!("lambda={:.6}", res.geometry.dilation_level().value());
    Ok(())
}

fn augment(args: AugmentArgs) -> CmdResult {
    let plan = build_plan(
        args.levels,
        args.lambda_min,
        args.lambda_max,
        args.include_original,
    )?;
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    if workers == 0 {
        return Err(CommandOutcome::usage("--workers must be at least 1"));
    }
    let manifest = DatasetManifest::load(&args.manifest)?;
    let summary = run_manifest(&manifest, &plan, args.method, &args.out_dir, workers)?;
    println!("{summary}");
    Ok(())
}

fn normalize(args: NormalizeArgs) -> CmdResult {
    let g = args.geometry.resolve()?;
    let (semantics, method) = if args.mask_mode {
        (Semantics::Label, SamplingMethod::Nearest)
    } else {
        (Semantics::Intensity, args.method)
    };
    let image = load_image(&args.image, semantics)?;
    let sheet = rubber_sheet(&image, &g, args.width, args.height, method)?;
    save_image(sheet.as_grid(), &args.out)?;
    Ok(())
}

fn iou_cmd(args: IouArgs) -> CmdResult {
    let cfg = IoUConfig::new(args.epsilon)?;
    let a = load_image(&args.a, Semantics::Label)?;
    let b = load_image(&args.b, Semantics::Label)?;
    let v = match args.class {
        Some(class) => per_class_iou(&a, &b, class, cfg)?,
        None => iou(&a, &b, cfg)?,
    };
    println!("{v:.6}");
    Ok(())
}

/// Places equally sized grids side by side.
fn hstack(panels: &[PixelGrid]) -> Result<PixelGrid, Error> {
    let first = &panels[0];
    let (h, c) = (first.height(), first.channels());
    let stride = first.row_stride();
    let mut data = Vec::with_capacity(stride * h * panels.len());
    for row in 0..h {
        for p in panels {
            data.extend_from_slice(&p.data()[row * stride..(row + 1) * stride]);
        }
    }
    PixelGrid::new(first.width() * panels.len(), h, c, first.semantics(), data)
}

fn preview(args: PreviewArgs) -> CmdResult {
    let g = args.geometry.resolve()?;
    let image = load_image(&args.image, Semantics::Intensity)?;
    let mut panels = vec![image.clone()];
    for &level in &args.levels {
        panels.push(remap_dilation(&image, &g, level, args.method)?.image);
    }
    save_image(&hstack(&panels)?, &args.out)?;
    Ok(())
}

fn bench(args: BenchArgs) -> CmdResult {
    let (image, g) = match &args.image {
        Some(path) => (
            load_image(path, Semantics::Intensity)?,
            args.geometry.resolve()?,
        ),
        None => {
            let (img, default_g) = SyntheticEye::default().render()?;
            let g = if args.geometry.is_empty() {
                default_g
            } else {
                args.geometry.resolve()?
            };
            (img, g)
        }
    };
    let report = run_bench(&image, &g, args.iters, args.method, args.threads)?;
    println!("{report}");
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    CommandOutcome::ok()
                }
                _ => CommandOutcome::usage(e.render().to_string()),
            };
        }
    };
    let res = match cli.command {
        Command::Dilate(a) => dilate(a),
        Command::Augment(a) => augment(a),
        Command::Normalize(a) => normalize(a),
        Command::Iou(a) => iou_cmd(a),
        Command::Preview(a) => preview(a),
        Command::Bench(a) => bench(a),
    };
    res.err().unwrap_or_else(CommandOutcome::ok)
}
