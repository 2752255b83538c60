//! Forward model: blur with `H`, decimate, add white Gaussian noise.

use crate::error::{Error, Result};
use crate::image::{downsample, Image, ScaleFactor};
use crate::operator::{MaskStack, VarBlurOperator};
use crate::rng::RngStream;

/// Converts a noise level on the 8-bit scale to intensity units.
pub fn sigma_from_8bit(sigma: f64) -> f64 {
    sigma / 255.0
}

pub fn sigma_to_8bit(sigma: f64) -> f64 {
    sigma * 255.0
}

#[derive(Debug, Clone)]
pub struct DegradationSpec {
    pub operator: VarBlurOperator,
    pub scale: ScaleFactor,
    /// Noise standard deviation in `[0,1]` intensity units.
    pub sigma: f64,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn new(operator: VarBlurOperator, scale: ScaleFactor, sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be >= 0, got {sigma}"
            )));
        }
        let (h, w) = operator.frame();
        let s = scale.get();
        if h % s != 0 {
            return Err(Error::NotDivisible {
                axis: "height",
                len: h,
                scale: s,
            });
        }
        if w % s != 0 {
            return Err(Error::NotDivisible {
                axis: "width",
                len: w,
                scale: s,
            });
        }
        Ok(DegradationSpec {
            operator,
            scale,
            sigma,
            seed,
        })
    }
}

/// `y = (H x)↓s + ε`. The result is not clipped.
pub fn degrade(x: &Image, spec: &DegradationSpec) -> Result<Image> {
    let blurred = spec.operator.apply(x)?;
    let mut y = downsample(&blurred, spec.scale)?;
    if spec.sigma > 0.0 {
        let mut rng = RngStream::new(spec.seed);
        for v in y.data_mut() {
            *v += spec.sigma * rng.gaussian();
        }
    }
    Ok(y)
}

/// Circular separable Gaussian smoothing of a single plane.
pub(crate) fn gaussian_smooth(plane: &[f64], height: usize, width: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return plane.to_vec();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    let taps: Vec<f64> = taps.iter().map(|t| t / total).collect();

    let wrap = |i: isize, n: usize| i.rem_euclid(n as isize) as usize;
    let mut tmp = vec![0.0; plane.len()];
    for i in 0..height {
        for j in 0..width {
            tmp[i * width + j] = taps
                .iter()
                .enumerate()
                .map(|(t, k)| k * plane[i * width + wrap(j as isize + t as isize - radius, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; plane.len()];
    for i in 0..height {
        for j in 0..width {
            out[i * width + j] = taps
                .iter()
                .enumerate()
                .map(|(t, k)| k * tmp[wrap(i as isize + t as isize - radius, height) * width + j])
                .sum();
        }
    }
    out
}

/// Turns a label map (values in `0..count`) into smoothed, renormalized
/// weight maps.
pub fn masks_from_labels(
    labels: &[usize],
    height: usize,
    width: usize,
    count: usize,
    border_sigma: f64,
) -> Result<MaskStack> {
    if count == 0 {
        return Err(Error::InvalidParameter("need at least one region".into()));
    }
    if labels.len() != height * width {
        return Err(Error::mismatch(height * width, labels.len()));
    }
    if let Some(l) = labels.iter().find(|&&l| l >= count) {
        return Err(Error::InvalidParameter(format!("label {l} out of range 0..{count}")));
    }
    let mut planes: Vec<Vec<f64>> = (0..count)
        .map(|p| {
            let ind: Vec<f64> = labels.iter().map(|&l| if l == p { 1.0 } else { 0.0 }).collect();
            gaussian_smooth(&ind, height, width, border_sigma)
        })
        .collect();
    for k in 0..height * width {
        let s: f64 = planes.iter().map(|p| p[k]).sum();
        for p in planes.iter_mut() {
            p[k] = (p[k] / s).max(0.0);
        }
    }
    let masks = planes
        .into_iter()
        .map(|p| Image::from_planar(height, width, 1, p))
        .collect::<Result<Vec<_>>>()?;
    MaskStack::new(masks)
}

/// Voronoi partition of `count` random sites, with soft borders.
pub fn generate_mask_stack(
    height: usize,
    width: usize,
    count: usize,
    border_sigma: f64,
    seed: u64,
) -> Result<MaskStack> {
    if count == 0 {
        return Err(Error::InvalidParameter("need at least one mask".into()));
    }
    if count == 1 {
        return Ok(MaskStack::uniform(height, width));
    }
    let mut rng = RngStream::new(seed);
    let sites: Vec<(f64, f64)> = (0..count)
        .map(|_| (rng.uniform() * height as f64, rng.uniform() * width as f64))
        .collect();
    let labels: Vec<usize> = (0..height * width)
        .map(|k| {
            let (i, j) = ((k / width) as f64 + 0.5, (k % width) as f64 + 0.5);
            let mut best = (f64::INFINITY, 0);
            for (p, &(si, sj)) in sites.iter().enumerate() {
                let d = (i - si).powi(2) + (j - sj).powi(2);
                if d < best.0 {
                    best = (d, p);
                }
            }
            best.1
        })
        .collect();
    masks_from_labels(&labels, height, width, count, border_sigma)
}
