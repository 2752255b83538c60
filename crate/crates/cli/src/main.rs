mod bench;
mod check;
mod commands;
mod failure;
mod run_manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use varsr_core::kernels::KernelFamily;

use failure::Failure;

#[derive(Parser)]
#[command(name = "varsr", version, about = "Super-resolution under spatially-varying blur")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random kernels, optionally with masks and an operator manifest
    GenKernel(GenKernelArgs),
    /// Generate a synthetic degraded dataset
    GenDataset(GenDatasetArgs),
    /// Blur, decimate and add noise to a high-resolution image
    Degrade(DegradeArgs),
    /// Restore a low-resolution image, or every sample of a dataset
    Restore(RestoreArgs),
    /// Compute PSNR/SSIM of restored images against references
    Evaluate(EvaluateArgs),
    /// Time apply, adjoint and solver iterations
    Bench(BenchArgs),
    /// Run the built-in self-test battery
    Check(CheckArgs),
}

#[derive(Args)]
pub struct GenKernelArgs {
    #[arg(long, value_enum, default_value = "mixed")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 19)]
    pub size: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write masks and an operator manifest for a frame of this height
    #[arg(long, requires = "width")]
    pub height: Option<usize>,
    #[arg(long, requires = "height")]
    pub width: Option<usize>,
    #[arg(long, default_value_t = 3.0)]
    pub border_sigma: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Motion,
    Mixed,
    Delta,
}

impl From<FamilyArg> for KernelFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Gaussian => KernelFamily::Gaussian,
            FamilyArg::Motion => KernelFamily::Motion,
            FamilyArg::Mixed => KernelFamily::Mixed,
            FamilyArg::Delta => KernelFamily::Delta,
        }
    }
}

#[derive(Args)]
pub struct GenDatasetArgs {
    /// Directory of HR images; procedural scenes are used when omitted
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Dataset config (JSON)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Side length of procedural scenes
    #[arg(long, default_value_t = 128)]
    pub scene_size: usize,
    #[arg(long, default_value_t = 1)]
    pub scene_channels: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct DegradeArgs {
    #[arg(long)]
    pub hr: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub scale: usize,
    /// Noise standard deviation on the 8-bit scale
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RestoreArgs {
    #[arg(long, required_unless_present = "dataset", conflicts_with = "dataset", requires_all = ["manifest", "scale"])]
    pub lr: Option<PathBuf>,
    /// Dataset directory from `gen-dataset`; restores every sample
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub scale: Option<usize>,
    /// Noise standard deviation on the 8-bit scale
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Solver config (JSON)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output image, or output directory with `--dataset`
    #[arg(long)]
    pub out: PathBuf,
    /// Per-iteration residual log (CSV); overrides the config
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub restored: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Round to 8-bit levels before comparing
    #[arg(long)]
    pub quantize: bool,
    /// Compare BT.601 luma only
    #[arg(long)]
    pub luma: bool,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [256, 512, 1024])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 4, 16])]
    pub components: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Also verify that this operator manifest loads
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenKernel(a) => commands::gen_kernel(&a),
        Command::GenDataset(a) => commands::gen_dataset(&a),
        Command::Degrade(a) => commands::degrade(&a),
        Command::Restore(a) => commands::restore(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Bench(a) => bench::run(&a),
        Command::Check(a) => check::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
