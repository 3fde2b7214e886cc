//! Command-line surface for the spectral point-cloud pipeline.
//!
//! Every subcommand prints a one-line JSON summary to standard output;
//! diagnostics go to standard error. Exit codes: 0 success, 1 internal
//! failure, 2 usage or input error. Output files are written atomically
//! (write to a temporary file, then rename). `SPECTRAL_PCD_THREADS` caps
//! internal parallelism (0 = automatic).

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use spectral_pcd::augment::{augment_dataset_labeled, AugmentConfig, AugmentOutcome};
use spectral_pcd::error::Error;
use spectral_pcd::io::{
    ingest_dataset, read_image, read_pointcloud, read_spectrum, write_pointcloud, write_spectrum,
};
use spectral_pcd::spectral::{
    amplitude_swap, decompose_with_geometry, phase_swap, reconstruct, ChannelMode,
    ReconstructionParams,
};
use spectral_pcd::style::{stylize, stylize_from_image};
use spectral_pcd::transform::{forward_dft, set_thread_cap, to_amplitude_phase};
use spectral_pcd::verify::{self, VerifyOptions, VerifySize};
use spectral_pcd::voxel::{compute_geometry, voxelize_with_stats, VoxelSizePolicy};
use spectral_pcd::PointCloud;

#[derive(Parser)]
#[command(
    name = "spectral-pcd",
    about = "Spectral decomposition, attribute swapping, style transfer and augmentation \
             for colored point clouds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Voxelize a point cloud and write its amplitude/phase spectrum.
    Decompose(DecomposeArgs),
    /// Rebuild a point cloud from a spectrum file.
    Reconstruct(ReconstructArgs),
    /// Exchange amplitude or phase between two clouds and reconstruct both.
    Swap(SwapArgs),
    /// Blend a style source (cloud or image) into a content cloud.
    Stylize(StylizeArgs),
    /// Amplitude-swap augmentation over a dataset directory.
    Augment(AugmentArgs),
    /// Run the built-in oracle and invariant checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VoxelArgs {
    /// Explicit voxel edge length.
    #[arg(long, conflicts_with = "grid_max")]
    voxel_size: Option<f64>,
    /// Choose the voxel size so the largest grid dimension equals this.
    #[arg(long, default_value_t = 64)]
    grid_max: u32,
}

impl VoxelArgs {
    fn policy(&self) -> VoxelSizePolicy {
        match self.voxel_size {
            Some(v) => VoxelSizePolicy::Fixed(v),
            None => VoxelSizePolicy::GridMax(self.grid_max),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Channels {
    All,
    Rgb,
}

impl From<Channels> for ChannelMode {
    fn from(value: Channels) -> ChannelMode {
        match value {
            Channels::All => ChannelMode::All,
            Channels::Rgb => ChannelMode::RgbOnly,
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    /// Input point cloud (.ply or .csv).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    voxel: VoxelArgs,
    /// Output spectrum file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Input spectrum file.
    #[arg(long)]
    input: PathBuf,
    /// Occupancy threshold; 0 keeps every voxel.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Output point cloud (.ply or .csv).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SwapArgs {
    /// First point cloud.
    #[arg(long)]
    a: PathBuf,
    /// Second point cloud.
    #[arg(long)]
    b: PathBuf,
    /// Which component to exchange.
    #[arg(long, value_enum)]
    kind: SwapKind,
    /// Channels taking part in an amplitude swap.
    #[arg(long, value_enum, default_value_t = Channels::All)]
    channels: Channels,
    /// Occupancy threshold for the reconstructions.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[command(flatten)]
    voxel: VoxelArgs,
    /// Output for the first cloud's reconstruction.
    #[arg(long)]
    out_a: PathBuf,
    /// Output for the second cloud's reconstruction.
    #[arg(long)]
    out_b: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SwapKind {
    Amp,
    Phase,
}

#[derive(Args)]
struct StylizeArgs {
    /// Content point cloud.
    #[arg(long)]
    content: PathBuf,
    /// Style source: a point cloud (.ply/.csv) or an image (.png/.ppm).
    #[arg(long)]
    style: PathBuf,
    /// Amplitude interpolation weight in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Occupancy threshold for the reconstruction.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Channels taking part in the amplitude blend.
    #[arg(long, value_enum, default_value_t = Channels::All)]
    channels: Channels,
    #[command(flatten)]
    voxel: VoxelArgs,
    /// Output point cloud.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct AugmentArgs {
    /// Dataset directory: one subdirectory per class label.
    #[arg(long)]
    dataset: PathBuf,
    /// Seed for the donor assignment.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Channels exchanged per pair.
    #[arg(long, value_enum, default_value_t = Channels::All)]
    channels: Channels,
    /// Occupancy threshold for the reconstructions.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Augmented copies per input cloud.
    #[arg(long, default_value_t = 1)]
    reps: u32,
    /// Restrict donors to clouds of the same class.
    #[arg(long)]
    same_class: bool,
    #[command(flatten)]
    voxel: VoxelArgs,
    /// Output directory (class structure is mirrored).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scope of the check suite.
    #[arg(long, value_enum, default_value_t = SizeArg::Full)]
    size: SizeArg,
    /// Test hook: perturb the fast transform before the oracle
    /// comparison; any value beyond tolerance must fail the run.
    #[arg(long, default_value_t = 0.0, hide = true)]
    inject_perturbation: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeArg {
    Small,
    Full,
}

/// A failure plus which exit code it maps to.
enum Failure {
    Usage(String),
    Input(Error),
    Internal(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Input(e) => write!(f, "{e}"),
            Failure::Internal(e) => write!(f, "{e}"),
        }
    }
}

fn input_err(e: Error) -> Failure {
    Failure::Input(e)
}

fn internal_err(e: Error) -> Failure {
    Failure::Internal(e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(failure) = configure_threads() {
        eprintln!("error: {failure}");
        return ExitCode::from(failure.code());
    }
    let result = match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Swap(args) => cmd_swap(args),
        Command::Stylize(args) => cmd_stylize(args),
        Command::Augment(args) => cmd_augment(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(raw) = std::env::var("SPECTRAL_PCD_THREADS") {
        let cap: usize = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("SPECTRAL_PCD_THREADS must be an integer, got '{raw}'")))?;
        set_thread_cap(cap);
    }
    Ok(())
}

/// Writes through a temporary file in the target directory, renaming into
/// place only after the write succeeded.
fn atomic_write(
    path: &Path,
    write_fn: impl FnOnce(&Path) -> spectral_pcd::Result<()>,
) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    // Keep the extension: the writers dispatch on it.
    let suffix = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    let tmp = tempfile::Builder::new()
        .prefix(".spectral-pcd-")
        .suffix(&suffix)
        .tempfile_in(dir)
        .map_err(|e| internal_err(Error::Io { path: dir.to_path_buf(), source: e }))?;
    write_fn(tmp.path()).map_err(internal_err)?;
    tmp.persist(path)
        .map_err(|e| internal_err(Error::Io { path: path.to_path_buf(), source: e.error }))?;
    Ok(())
}

fn emit(summary: serde_json::Value) {
    println!("{summary}");
}

fn union_bounds(a: &PointCloud, b: &PointCloud) -> ([f64; 3], [f64; 3]) {
    let (a_min, a_max) = a.bounds();
    let (b_min, b_max) = b.bounds();
    (
        [a_min[0].min(b_min[0]), a_min[1].min(b_min[1]), a_min[2].min(b_min[2])],
        [a_max[0].max(b_max[0]), a_max[1].max(b_max[1]), a_max[2].max(b_max[2])],
    )
}

fn cmd_decompose(args: DecomposeArgs) -> Result<ExitCode, Failure> {
    let cloud = read_pointcloud(&args.input).map_err(input_err)?;
    let (mins, maxs) = cloud.bounds();
    let voxel_size = args.voxel.policy().resolve(mins, maxs).map_err(input_err)?;
    let geometry = compute_geometry(&cloud, voxel_size).map_err(input_err)?;
    let (grid, stats) = voxelize_with_stats(&cloud, &geometry).map_err(input_err)?;
    if stats.collisions > 0 {
        eprintln!(
            "warning: {} points collided with occupied voxels; colors were averaged \
             (use a smaller voxel size to keep every point)",
            stats.collisions
        );
    }
    let ap = to_amplitude_phase(&forward_dft(&grid));
    atomic_write(&args.output, |path| write_spectrum(&ap, path))?;

    emit(json!({
        "command": "decompose",
        "input": args.input,
        "output": args.output,
        "width": geometry.width(),
        "height": geometry.height(),
        "depth": geometry.depth(),
        "voxel_size": geometry.voxel_size(),
        "points": cloud.len(),
        "occupied": grid.occupied_count(),
        "collisions": stats.collisions,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<ExitCode, Failure> {
    let ap = read_spectrum(&args.input).map_err(input_err)?;
    let params = ReconstructionParams::with_threshold(args.threshold);
    let cloud = reconstruct(&ap, &params).map_err(input_err)?;
    atomic_write(&args.output, |path| write_pointcloud(&cloud, path))?;

    emit(json!({
        "command": "reconstruct",
        "input": args.input,
        "output": args.output,
        "threshold": args.threshold,
        "points": cloud.len(),
        "width": ap.geometry().width(),
        "height": ap.geometry().height(),
        "depth": ap.geometry().depth(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_swap(args: SwapArgs) -> Result<ExitCode, Failure> {
    let cloud_a = read_pointcloud(&args.a).map_err(input_err)?;
    let cloud_b = read_pointcloud(&args.b).map_err(input_err)?;
    let (mins, maxs) = union_bounds(&cloud_a, &cloud_b);
    let voxel_size = args.voxel.policy().resolve(mins, maxs).map_err(input_err)?;
    let geometry = spectral_pcd::voxel::compute_shared_geometry(&cloud_a, &cloud_b, voxel_size)
        .map_err(input_err)?;

    let ap_a = decompose_with_geometry(&cloud_a, &geometry).map_err(input_err)?;
    let ap_b = decompose_with_geometry(&cloud_b, &geometry).map_err(input_err)?;
    let (swapped_a, swapped_b) = match args.kind {
        SwapKind::Amp => amplitude_swap(&ap_a, &ap_b, args.channels.into()).map_err(input_err)?,
        SwapKind::Phase => phase_swap(&ap_a, &ap_b).map_err(input_err)?,
    };

    let params = ReconstructionParams {
        pi_threshold: args.threshold,
        channel_mode: args.channels.into(),
    };
    let rec_a = reconstruct(&swapped_a, &params).map_err(input_err)?;
    let rec_b = reconstruct(&swapped_b, &params).map_err(input_err)?;
    atomic_write(&args.out_a, |path| write_pointcloud(&rec_a, path))?;
    atomic_write(&args.out_b, |path| write_pointcloud(&rec_b, path))?;

    emit(json!({
        "command": "swap",
        "kind": match args.kind { SwapKind::Amp => "amp", SwapKind::Phase => "phase" },
        "out_a": args.out_a,
        "out_b": args.out_b,
        "points_a": rec_a.len(),
        "points_b": rec_b.len(),
        "width": geometry.width(),
        "height": geometry.height(),
        "depth": geometry.depth(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn is_image_path(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("png") | Some("ppm")
    )
}

fn cmd_stylize(args: StylizeArgs) -> Result<ExitCode, Failure> {
    let content = read_pointcloud(&args.content).map_err(input_err)?;
    let params = ReconstructionParams {
        pi_threshold: args.threshold,
        channel_mode: args.channels.into(),
    };

    let (styled, style_kind) = if is_image_path(&args.style) {
        let image = read_image(&args.style).map_err(input_err)?;
        let (mins, maxs) = content.bounds();
        let voxel_size = args.voxel.policy().resolve(mins, maxs).map_err(input_err)?;
        let out = stylize_from_image(&content, &image, args.gamma, &params, voxel_size)
            .map_err(input_err)?;
        (out, "image")
    } else {
        let style = read_pointcloud(&args.style).map_err(input_err)?;
        let (mins, maxs) = union_bounds(&content, &style);
        let voxel_size = args.voxel.policy().resolve(mins, maxs).map_err(input_err)?;
        let out = stylize(&content, &style, args.gamma, &params, voxel_size).map_err(input_err)?;
        (out, "cloud")
    };
    atomic_write(&args.output, |path| write_pointcloud(&styled, path))?;

    emit(json!({
        "command": "stylize",
        "content": args.content,
        "style": args.style,
        "style_kind": style_kind,
        "gamma": args.gamma,
        "threshold": args.threshold,
        "output": args.output,
        "points": styled.len(),
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_augment(args: AugmentArgs) -> Result<ExitCode, Failure> {
    if args.reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".to_string()));
    }
    let dataset = ingest_dataset(&args.dataset).map_err(input_err)?;
    for (path, reason) in &dataset.skipped {
        eprintln!("warning: skipped {}: {reason}", path.display());
    }
    let clouds: Vec<PointCloud> = dataset.clouds.iter().map(|c| c.cloud.clone()).collect();
    let labels: Vec<&str> = dataset.clouds.iter().map(|c| c.label.as_str()).collect();

    let mut written = 0usize;
    let mut fallbacks = 0usize;
    let mut partners = Vec::with_capacity(args.reps as usize);
    for rep in 0..args.reps {
        let cfg = AugmentConfig {
            seed: args.seed.wrapping_add(rep as u64),
            mode: args.channels.into(),
            pi_threshold: args.threshold,
            voxel_policy: args.voxel.policy(),
            same_class_only: args.same_class,
        };
        let (augmented, outcomes) =
            augment_dataset_labeled(&clouds, &labels, &cfg).map_err(input_err)?;
        let rep_partners: Vec<usize> = outcomes
            .iter()
            .map(|o| match *o {
                AugmentOutcome::Swapped { donor } => donor,
                AugmentOutcome::SkippedEmpty { donor } => donor,
            })
            .collect();
        fallbacks += outcomes
            .iter()
            .filter(|o| matches!(o, AugmentOutcome::SkippedEmpty { .. }))
            .count();
        partners.push(rep_partners);

        for (labeled, cloud) in dataset.clouds.iter().zip(&augmented) {
            let class_dir = args.output.join(&labeled.label);
            std::fs::create_dir_all(&class_dir)
                .map_err(|e| internal_err(Error::Io { path: class_dir.clone(), source: e }))?;
            let stem = labeled
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "cloud".to_string());
            let target = class_dir.join(format!("{stem}_aug{rep}.ply"));
            atomic_write(&target, |path| write_pointcloud(cloud, path))?;
            written += 1;
        }
    }

    emit(json!({
        "command": "augment",
        "dataset": args.dataset,
        "output": args.output,
        "seed": args.seed,
        "reps": args.reps,
        "inputs": dataset.clouds.len(),
        "outputs": written,
        "fallbacks": fallbacks,
        "skipped_files": dataset.skipped.len(),
        "partners": partners,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Failure> {
    let options = VerifyOptions {
        size: match args.size {
            SizeArg::Small => VerifySize::Small,
            SizeArg::Full => VerifySize::Full,
        },
        fft_perturbation: args.inject_perturbation,
    };
    let report = verify::run(&options);

    eprintln!("{:<36} {:<6} detail", "check", "status");
    for check in &report.checks {
        eprintln!(
            "{:<36} {:<6} {}",
            check.name,
            if check.passed { "PASS" } else { "FAIL" },
            check.detail
        );
    }

    let passed = report.checks.iter().filter(|c| c.passed).count();
    let failed = report.checks.len() - passed;
    emit(json!({
        "command": "verify",
        "size": match args.size { SizeArg::Small => "small", SizeArg::Full => "full" },
        "passed": passed,
        "failed": failed,
        "ok": report.all_passed(),
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    }));
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
