pub mod dataset;
pub mod degradation;
pub mod error;
pub mod fft;
pub mod image;
pub mod io;
pub mod kernels;
pub mod manifest;
pub mod metrics;
pub mod operator;
pub mod priors;
pub mod rng;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use image::{downsample, upsample_nearest, upsample_zeropad, Image, ScaleFactor};
pub use kernels::{delta_kernel, gaussian_kernel, motion_kernel, Kernel, MotionTrajectoryParams};
pub use metrics::{psnr, ssim, MetricReport};
pub use operator::{MaskStack, VarBlurOperator};
pub use solver::{default_schedule, solve, solve_exact_admm_uniform, Hyper, HyperSchedule, SolveTrace, SolverConfig};
