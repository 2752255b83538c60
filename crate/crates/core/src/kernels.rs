//! Blur kernel synthesis: anisotropic Gaussians, random camera-shake
//! trajectories and the delta.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::rng::RngStream;

pub const MAX_KERNEL_SIZE: usize = 33;
const SUM_TOLERANCE: f64 = 1e-12;

/// Nonnegative, unit-sum, odd-sized convolution kernel centred on
/// `((kh-1)/2, (kw-1)/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    height: usize,
    width: usize,
    taps: Vec<f64>,
}

fn check_size(kh: usize, kw: usize) -> Result<()> {
    if kh % 2 == 0 || kw % 2 == 0 {
        return Err(Error::InvalidKernel(format!("size {kh}x{kw} must be odd")));
    }
    if kh > MAX_KERNEL_SIZE || kw > MAX_KERNEL_SIZE {
        return Err(Error::InvalidKernel(format!(
            "size {kh}x{kw} exceeds {MAX_KERNEL_SIZE}x{MAX_KERNEL_SIZE}"
        )));
    }
    Ok(())
}

impl Kernel {
    /// Validates taps as given: nonnegative, finite and summing to one.
    pub fn new(height: usize, width: usize, taps: Vec<f64>) -> Result<Self> {
        check_size(height, width)?;
        if taps.len() != height * width {
            return Err(Error::InvalidKernel(format!(
                "{} taps for a {height}x{width} kernel",
                taps.len()
            )));
        }
        if let Some(t) = taps.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidKernel(format!("tap {t} is negative or non-finite")));
        }
        let sum: f64 = taps.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidKernel(format!("taps sum to {sum}, expected 1")));
        }
        Ok(Kernel { height, width, taps })
    }

    /// Divides nonnegative taps by their sum.
    pub fn normalized(height: usize, width: usize, mut taps: Vec<f64>) -> Result<Self> {
        check_size(height, width)?;
        if taps.len() != height * width {
            return Err(Error::InvalidKernel(format!(
                "{} taps for a {height}x{width} kernel",
                taps.len()
            )));
        }
        if let Some(t) = taps.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidKernel(format!("tap {t} is negative or non-finite")));
        }
        let sum: f64 = taps.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidKernel("taps sum to zero".into()));
        }
        taps.iter_mut().for_each(|t| *t /= sum);
        Ok(Kernel { height, width, taps })
    }

    /// Reads a kernel from a single-channel image, renormalizing away the
    /// rounding introduced by 32-bit storage.
    pub fn from_image(img: &Image) -> Result<Self> {
        if img.channels() != 1 {
            return Err(Error::UnsupportedChannels {
                format: "kernel",
                channels: img.channels(),
            });
        }
        let taps = img.plane(0).to_vec();
        let sum: f64 = taps.iter().sum();
        if (sum - 1.0).abs() > 1e-4 {
            return Err(Error::InvalidKernel(format!("stored taps sum to {sum}")));
        }
        Self::normalized(img.height(), img.width(), taps)
    }

    pub fn to_image(&self) -> Image {
        Image::from_planar(self.height, self.width, 1, self.taps.clone()).expect("kernel taps are finite")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn center(&self) -> (usize, usize) {
        ((self.height - 1) / 2, (self.width - 1) / 2)
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    #[inline]
    pub fn tap(&self, i: usize, j: usize) -> f64 {
        self.taps[i * self.width + j]
    }

    /// The 180 degree rotation, i.e. the adjoint convolution.
    pub fn flipped(&self) -> Kernel {
        Kernel {
            height: self.height,
            width: self.width,
            taps: self.taps.iter().rev().copied().collect(),
        }
    }
}

pub fn delta_kernel(size: usize) -> Result<Kernel> {
    check_size(size, size)?;
    let mut taps = vec![0.0; size * size];
    taps[(size * size) / 2] = 1.0;
    Kernel::new(size, size, taps)
}

/// Rotated anisotropic Gaussian, point-sampled at integer offsets and
/// normalized. `theta` rotates the `sigma_x` axis counter-clockwise from the
/// column axis.
pub fn gaussian_kernel(sigma_x: f64, sigma_y: f64, theta: f64, size: usize) -> Result<Kernel> {
    check_size(size, size)?;
    if !(sigma_x > 0.0 && sigma_y > 0.0) || !sigma_x.is_finite() || !sigma_y.is_finite() {
        return Err(Error::InvalidKernel(format!(
            "gaussian widths must be positive, got ({sigma_x}, {sigma_y})"
        )));
    }
    let (sin, cos) = theta.sin_cos();
    let half = (size / 2) as f64;
    let mut taps = Vec::with_capacity(size * size);
    for i in 0..size {
        let dy = i as f64 - half;
        for j in 0..size {
            let dx = j as f64 - half;
            let u = cos * dx + sin * dy;
            let v = -sin * dx + cos * dy;
            let q = u * u / (sigma_x * sigma_x) + v * v / (sigma_y * sigma_y);
            taps.push((-0.5 * q).exp());
        }
    }
    Kernel::normalized(size, size, taps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionTrajectoryParams {
    /// Number of trajectory samples, one pixel apart.
    pub length: usize,
    /// Correlation between successive step directions.
    pub inertia: f64,
    /// Positional jitter added to every step.
    pub anxiety: f64,
    pub seed: u64,
}

impl MotionTrajectoryParams {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidParameter("trajectory length must be >= 1".into()));
        }
        for (name, v) in [("inertia", self.inertia), ("anxiety", self.anxiety)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must be in [0,1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Sub-samples per unit of path length when rasterizing a trajectory.
const SPLAT_DENSITY: f64 = 4.0;

/// Random camera-shake kernel: a correlated random walk in the plane,
/// centred on its centroid, scaled down if it would leave the tap grid and
/// splatted bilinearly.
pub fn motion_kernel(params: &MotionTrajectoryParams, size: usize) -> Result<Kernel> {
    check_size(size, size)?;
    params.validate()?;
    let mut rng = RngStream::new(params.seed);

    let mut heading = 2.0 * PI * rng.uniform();
    let mut points = Vec::with_capacity(params.length);
    let (mut x, mut y) = (0.0f64, 0.0f64);
    points.push((x, y));
    for _ in 1..params.length {
        heading += (1.0 - params.inertia) * (PI / 2.0) * rng.gaussian();
        let jx = params.anxiety * 0.5 * rng.gaussian();
        let jy = params.anxiety * 0.5 * rng.gaussian();
        x += heading.cos() + jx;
        y += heading.sin() + jy;
        points.push((x, y));
    }

    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    for p in &mut points {
        p.0 -= cx;
        p.1 -= cy;
    }
    let half = (size / 2) as f64;
    let extent = points.iter().map(|p| p.0.abs().max(p.1.abs())).fold(0.0, f64::max);
    if extent > half {
        let k = half / extent;
        for p in &mut points {
            p.0 *= k;
            p.1 *= k;
        }
    }

    let mut taps = vec![0.0; size * size];
    let mut splat = |px: f64, py: f64, weight: f64| {
        let gx = (px + half).clamp(0.0, 2.0 * half);
        let gy = (py + half).clamp(0.0, 2.0 * half);
        let (x0, y0) = (gx.floor(), gy.floor());
        let (fx, fy) = (gx - x0, gy - y0);
        let (x0, y0) = (x0 as usize, y0 as usize);
        for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
            for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
                let w = weight * wx * wy;
                if w > 0.0 {
                    let (r, c) = ((y0 + dy).min(size - 1), (x0 + dx).min(size - 1));
                    taps[r * size + c] += w;
                }
            }
        }
    };
    if points.len() == 1 {
        splat(points[0].0, points[0].1, 1.0);
    } else {
        for seg in points.windows(2) {
            let ((ax, ay), (bx, by)) = (seg[0], seg[1]);
            let len = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
            let steps = ((len * SPLAT_DENSITY).ceil() as usize).max(1);
            for t in 0..steps {
                let f = (t as f64 + 0.5) / steps as f64;
                splat(ax + f * (bx - ax), ay + f * (by - ay), len.max(1e-9) / steps as f64);
            }
        }
    }
    Kernel::normalized(size, size, taps)
}

/// Family selector used by dataset generation and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Gaussian,
    Motion,
    Mixed,
    Delta,
}

/// Ranges from which random kernels are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelSampling {
    pub family: KernelFamily,
    pub size: usize,
    pub gaussian_sigma: (f64, f64),
    pub motion_length: (usize, usize),
    pub inertia: (f64, f64),
    pub anxiety: (f64, f64),
}

impl Default for KernelSampling {
    fn default() -> Self {
        KernelSampling {
            family: KernelFamily::Mixed,
            size: 19,
            gaussian_sigma: (0.6, 3.0),
            motion_length: (6, 24),
            inertia: (0.5, 0.95),
            anxiety: (0.0, 0.4),
        }
    }
}

impl KernelSampling {
    pub fn sample(&self, rng: &mut RngStream) -> Result<Kernel> {
        let family = match self.family {
            KernelFamily::Mixed => {
                if rng.uniform() < 0.5 {
                    KernelFamily::Gaussian
                } else {
                    KernelFamily::Motion
                }
            }
            f => f,
        };
        match family {
            KernelFamily::Delta => delta_kernel(self.size),
            KernelFamily::Gaussian => {
                let sx = rng.uniform_range(self.gaussian_sigma.0, self.gaussian_sigma.1);
                let sy = rng.uniform_range(self.gaussian_sigma.0, self.gaussian_sigma.1);
                let theta = rng.uniform_range(0.0, PI);
                gaussian_kernel(sx, sy, theta, self.size)
            }
            KernelFamily::Motion | KernelFamily::Mixed => {
                let params = MotionTrajectoryParams {
                    length: rng.int_range(self.motion_length.0, self.motion_length.1),
                    inertia: rng.uniform_range(self.inertia.0, self.inertia.1),
                    anxiety: rng.uniform_range(self.anxiety.0, self.anxiety.1),
                    seed: rng.next_u64(),
                };
                motion_kernel(&params, self.size)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(k: &Kernel) {
        assert!(k.taps().iter().all(|&t| t >= 0.0));
        let sum: f64 = k.taps().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "sum {sum}");
    }

    #[test]
    fn delta_properties() {
        let k = delta_kernel(5).unwrap();
        assert_eq!(k.tap(2, 2), 1.0);
        assert_eq!(k.flipped(), k);
        assert_valid(&k);
        assert!(delta_kernel(4).is_err());
        assert!(delta_kernel(35).is_err());
    }

    #[test]
    fn new_validates() {
        assert!(Kernel::new(1, 3, vec![0.5, 0.6, -0.1]).is_err());
        assert!(Kernel::new(1, 3, vec![0.2, 0.2, 0.2]).is_err());
        assert!(Kernel::new(1, 3, vec![0.25, 0.5, 0.25]).is_ok());
        assert!(Kernel::new(2, 1, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn narrow_gaussian_is_delta() {
        let k = gaussian_kernel(1e-3, 1e-3, 0.3, 5).unwrap();
        assert_eq!(k, delta_kernel(5).unwrap());
    }

    #[test]
    fn isotropic_gaussian_rotation_symmetry() {
        let k = gaussian_kernel(1.7, 1.7, 0.4, 9).unwrap();
        let n = 9;
        for i in 0..n {
            for j in 0..n {
                // 90 degree rotation: (i, j) -> (j, n-1-i)
                let d = (k.tap(i, j) - k.tap(j, n - 1 - i)).abs();
                assert!(d <= 1e-12, "{d}");
            }
        }
        assert_valid(&k);
    }

    #[test]
    fn gaussian_half_turn_invariance() {
        let a = gaussian_kernel(2.5, 0.8, 0.7, 11).unwrap();
        let b = gaussian_kernel(2.5, 0.8, 0.7 + PI, 11).unwrap();
        for (x, y) in a.taps().iter().zip(b.taps()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn gaussian_orientation() {
        // wide along columns when theta = 0
        let k = gaussian_kernel(3.0, 0.5, 0.0, 9).unwrap();
        assert!(k.tap(4, 7) > k.tap(7, 4));
        let k = gaussian_kernel(3.0, 0.5, PI / 2.0, 9).unwrap();
        assert!(k.tap(7, 4) > k.tap(4, 7));
    }

    #[test]
    fn gaussian_errors() {
        assert!(gaussian_kernel(1.0, 1.0, 0.0, 4).is_err());
        assert!(gaussian_kernel(0.0, 1.0, 0.0, 5).is_err());
        assert!(gaussian_kernel(1.0, -1.0, 0.0, 5).is_err());
    }

    #[test]
    fn single_point_trajectory_is_delta() {
        let p = MotionTrajectoryParams {
            length: 1,
            inertia: 0.7,
            anxiety: 0.3,
            seed: 9,
        };
        assert_eq!(motion_kernel(&p, 7).unwrap(), delta_kernel(7).unwrap());
    }

    #[test]
    fn motion_is_deterministic() {
        let p = MotionTrajectoryParams {
            length: 20,
            inertia: 0.8,
            anxiety: 0.2,
            seed: 1234,
        };
        let a = motion_kernel(&p, 15).unwrap();
        let b = motion_kernel(&p, 15).unwrap();
        assert_eq!(a, b);
        let c = motion_kernel(&MotionTrajectoryParams { seed: 1235, ..p }, 15).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn long_trajectory_is_rescaled_to_fit() {
        let p = MotionTrajectoryParams {
            length: 200,
            inertia: 1.0,
            anxiety: 0.0,
            seed: 5,
        };
        let k = motion_kernel(&p, 9).unwrap();
        assert_valid(&k);
        let support = k.taps().iter().filter(|&&t| t > 0.0).count();
        assert!(support > 5);
    }

    #[test]
    fn motion_param_validation() {
        let base = MotionTrajectoryParams {
            length: 5,
            inertia: 0.5,
            anxiety: 0.5,
            seed: 0,
        };
        assert!(motion_kernel(&MotionTrajectoryParams { length: 0, ..base }, 9).is_err());
        assert!(motion_kernel(&MotionTrajectoryParams { inertia: 1.5, ..base }, 9).is_err());
        assert!(motion_kernel(&MotionTrajectoryParams { anxiety: -0.1, ..base }, 9).is_err());
        assert!(motion_kernel(&base, 8).is_err());
    }

    #[test]
    fn random_kernel_sweep() {
        let mut rng = RngStream::new(77);
        let sampling = KernelSampling::default();
        for _ in 0..1000 {
            let k = sampling.sample(&mut rng).unwrap();
            assert_valid(&k);
        }
    }

    #[test]
    fn image_round_trip_renormalizes() {
        let k = gaussian_kernel(1.3, 0.9, 0.2, 7).unwrap();
        let img = k.to_image().map(|v| v as f32 as f64);
        let back = Kernel::from_image(&img).unwrap();
        assert_valid(&back);
        assert!(Kernel::from_image(&Image::filled(3, 3, 1, 0.5)).is_err());
    }
}
