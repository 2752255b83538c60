//! Full-reference image quality metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::io::quantize_u8;

/// Value reported when the two images are identical.
pub const PSNR_CAP_DB: f64 = 99.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// ITU-R BT.601 luma weights.
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricOptions {
    pub peak: f64,
    /// Round both images to 8-bit levels first.
    pub quantize: bool,
    /// Evaluate on BT.601 luma instead of averaging over channels.
    pub luma: bool,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            peak: 1.0,
            quantize: false,
            luma: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub psnr: f64,
    pub ssim: f64,
    pub mse: f64,
}

fn quantized(img: &Image) -> Image {
    img.map(|v| quantize_u8(v) as f64 / 255.0)
}

pub fn luma(img: &Image) -> Result<Image> {
    match img.channels() {
        1 => Ok(img.clone()),
        3 => {
            let (h, w) = img.dims();
            let mut out = vec![0.0; h * w];
            for (plane, weight) in img.planes().zip(LUMA) {
                for (o, v) in out.iter_mut().zip(plane) {
                    *o += weight * v;
                }
            }
            Image::from_planar(h, w, 1, out)
        }
        c => Err(Error::InvalidParameter(format!("luma needs 1 or 3 channels, got {c}"))),
    }
}

fn prepare(a: &Image, b: &Image, opts: &MetricOptions) -> Result<(Image, Image)> {
    a.check_same_shape(b)?;
    if !(opts.peak > 0.0) {
        return Err(Error::InvalidParameter(format!("peak must be > 0, got {}", opts.peak)));
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    if opts.quantize {
        a = quantized(&a);
        b = quantized(&b);
    }
    if opts.luma {
        a = luma(&a)?;
        b = luma(&b)?;
    }
    Ok((a, b))
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    let d = a.sub(b)?;
    Ok(d.dot(&d)? / d.data().len() as f64)
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP_DB)
    }
}

pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    psnr_with(a, b, &MetricOptions::default())
}

pub fn psnr_with(a: &Image, b: &Image, opts: &MetricOptions) -> Result<f64> {
    let (a, b) = prepare(a, b, opts)?;
    Ok(psnr_from_mse(mse(&a, &b)?, opts.peak))
}

fn gaussian_window() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let w: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - r;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable "valid" filtering: output is `(h−n+1) × (w−n+1)`.
fn filter_valid(plane: &[f64], h: usize, w: usize, win: &[f64]) -> Vec<f64> {
    let n = win.len();
    let (oh, ow) = (h + 1 - n, w + 1 - n);
    let mut rows = vec![0.0; h * ow];
    for i in 0..h {
        for j in 0..ow {
            rows[i * ow + j] = win.iter().enumerate().map(|(t, c)| c * plane[i * w + j + t]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for i in 0..oh {
        for j in 0..ow {
            out[i * ow + j] = win.iter().enumerate().map(|(t, c)| c * rows[(i + t) * ow + j]).sum();
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], h: usize, w: usize, peak: f64) -> f64 {
    let win = gaussian_window();
    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);
    let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).collect::<Vec<_>>();
    let mu_a = filter_valid(a, h, w, &win);
    let mu_b = filter_valid(b, h, w, &win);
    let aa = filter_valid(&prod(a, a), h, w, &win);
    let bb = filter_valid(&prod(b, b), h, w, &win);
    let ab = filter_valid(&prod(a, b), h, w, &win);
    let n = mu_a.len();
    let mut total = 0.0;
    for t in 0..n {
        let (ma, mb) = (mu_a[t], mu_b[t]);
        let va = aa[t] - ma * ma;
        let vb = bb[t] - mb * mb;
        let cov = ab[t] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total / n as f64
}

pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    ssim_with(a, b, &MetricOptions::default())
}

/// Mean SSIM over all valid 11×11 window positions, averaged over channels.
pub fn ssim_with(a: &Image, b: &Image, opts: &MetricOptions) -> Result<f64> {
    let (a, b) = prepare(a, b, opts)?;
    let (h, w) = a.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {h}x{w}"
        )));
    }
    let total: f64 = a
        .planes()
        .zip(b.planes())
        .map(|(pa, pb)| ssim_plane(pa, pb, h, w, opts.peak))
        .sum();
    Ok(total / a.channels() as f64)
}

/// PSNR and SSIM of `restored` against `reference`.
pub fn evaluate(restored: &Image, reference: &Image, opts: &MetricOptions) -> Result<MetricReport> {
    let (a, b) = prepare(restored, reference, opts)?;
    let plain = MetricOptions {
        quantize: false,
        luma: false,
        ..*opts
    };
    let mse = mse(&a, &b)?;
    Ok(MetricReport {
        psnr: psnr_from_mse(mse, opts.peak),
        ssim: ssim_with(&a, &b, &plain)?,
        mse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn noisy(base: &Image, sigma: f64, seed: u64) -> Image {
        let mut rng = RngStream::new(seed);
        base.map(|v| v + sigma * rng.gaussian())
    }

    #[test]
    fn psnr_closed_forms() {
        let a = Image::zeros(8, 8, 1);
        let b = Image::filled(8, 8, 1, 0.1);
        assert!((psnr(&a, &b).unwrap() - 20.0).abs() < 1e-12);
        let c = Image::filled(8, 8, 1, 1.0);
        assert!(psnr(&a, &c).unwrap().abs() < 1e-12);
        assert_eq!(psnr(&a, &a).unwrap(), PSNR_CAP_DB);
        let opts = MetricOptions {
            peak: 255.0,
            ..MetricOptions::default()
        };
        let d = Image::filled(8, 8, 1, 255.0);
        assert!(psnr_with(&a, &d, &opts).unwrap().abs() < 1e-12);
    }

    #[test]
    fn psnr_shape_mismatch() {
        assert!(psnr(&Image::zeros(4, 4, 1), &Image::zeros(4, 5, 1)).is_err());
    }

    #[test]
    fn psnr_decreases_with_noise() {
        let base = Image::filled(32, 32, 1, 0.5);
        let mut last = f64::INFINITY;
        for (k, sigma) in [0.01, 0.02, 0.05, 0.1].iter().enumerate() {
            let p = psnr(&noisy(&base, *sigma, k as u64), &base).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn ssim_identity_and_inversion() {
        let mut rng = RngStream::new(3);
        let a = Image::from_fn(24, 24, 3, |_, _, _| rng.uniform());
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);

        let mut rng = RngStream::new(4);
        let bin = Image::from_fn(32, 32, 1, |_, _, _| if rng.uniform() < 0.5 { 0.0 } else { 1.0 });
        let inv = bin.map(|v| 1.0 - v);
        assert!(ssim(&bin, &inv).unwrap() < 0.0);
    }

    #[test]
    fn ssim_window_matches_direct_sum() {
        let mut rng = RngStream::new(5);
        let a = Image::from_fn(11, 11, 1, |_, _, _| rng.uniform());
        let b = a.map(|v| 0.7 * v + 0.1);
        let win = gaussian_window();
        let (mut ma, mut mb, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..11 {
            for j in 0..11 {
                let wt = win[i] * win[j];
                let (x, y) = (a.get(0, i, j), b.get(0, i, j));
                ma += wt * x;
                mb += wt * y;
                aa += wt * x * x;
                bb += wt * y * y;
                ab += wt * x * y;
            }
        }
        let (c1, c2) = (1e-4, 9e-4);
        let expect = ((2.0 * ma * mb + c1) * (2.0 * (ab - ma * mb) + c2))
            / ((ma * ma + mb * mb + c1) * (aa - ma * ma + bb - mb * mb + c2));
        assert!((ssim(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn ssim_too_small() {
        assert!(ssim(&Image::zeros(8, 8, 1), &Image::zeros(8, 8, 1)).is_err());
    }

    #[test]
    fn luma_and_quantize_options() {
        let a = Image::from_fn(16, 16, 3, |c, i, j| (10 * c + 3 * (i + j)) as f64 / 255.0);
        let b = a.map(|v| v + 0.001);
        let opts = MetricOptions {
            luma: true,
            ..MetricOptions::default()
        };
        assert!((psnr_with(&a, &b, &opts).unwrap() - 60.0).abs() < 1e-6);
        let q = MetricOptions {
            quantize: true,
            ..MetricOptions::default()
        };
        // sub-level offsets vanish after rounding to 8 bits
        assert_eq!(psnr_with(&a, &b, &q).unwrap(), PSNR_CAP_DB);
        let report = evaluate(&b, &a, &MetricOptions::default()).unwrap();
        assert!((report.mse - 1e-6).abs() < 1e-12);
        assert!(report.ssim > 0.99);
    }
}
