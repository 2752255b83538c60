//! Spatially-varying blur `H = sum_i U_i K_i`: a stack of circular
//! convolutions blended by per-pixel weight maps.
//!
//! Convolutions are periodic, so the frequency-domain product is exact and
//! `H^T = sum_i K_i^T U_i` is the exact adjoint. Kernel spectra are computed
//! once when the operator is built.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::image::Image;
use crate::kernels::{delta_kernel, Kernel};
use crate::rng::RngStream;

pub const MASK_SUM_TOLERANCE: f64 = 1e-6;

/// `P` nonnegative single-channel weight maps summing to one at every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskStack {
    height: usize,
    width: usize,
    masks: Vec<Image>,
}

impl MaskStack {
    pub fn new(masks: Vec<Image>) -> Result<Self> {
        let first = masks.first().ok_or_else(|| Error::InvalidMasks {
            reason: "empty mask stack".into(),
            max_deviation: 0.0,
        })?;
        let (height, width) = first.dims();
        for (i, m) in masks.iter().enumerate() {
            if m.channels() != 1 {
                return Err(Error::InvalidMasks {
                    reason: format!("mask {i} has {} channels", m.channels()),
                    max_deviation: 0.0,
                });
            }
            if m.dims() != (height, width) {
                return Err(Error::InvalidMasks {
                    reason: format!("mask {i} is {}x{}, expected {height}x{width}", m.height(), m.width()),
                    max_deviation: 0.0,
                });
            }
            let min = m.data().iter().copied().fold(f64::INFINITY, f64::min);
            if min < 0.0 {
                return Err(Error::InvalidMasks {
                    reason: format!("mask {i} has negative weight"),
                    max_deviation: -min,
                });
            }
        }
        let stack = MaskStack { height, width, masks };
        let dev = stack.max_sum_deviation();
        if dev > MASK_SUM_TOLERANCE {
            return Err(Error::InvalidMasks {
                reason: "per-pixel weights do not sum to 1".into(),
                max_deviation: dev,
            });
        }
        Ok(stack)
    }

    /// Validates and then divides out the residual per-pixel sum, e.g. after
    /// loading 32-bit masks from disk.
    pub fn new_renormalized(masks: Vec<Image>) -> Result<Self> {
        let mut stack = Self::new(masks)?;
        let sums = stack.pixel_sums();
        for m in &mut stack.masks {
            for (v, s) in m.data_mut().iter_mut().zip(&sums) {
                *v /= s;
            }
        }
        Ok(stack)
    }

    pub fn uniform(height: usize, width: usize) -> Self {
        MaskStack {
            height,
            width,
            masks: vec![Image::filled(height, width, 1, 1.0)],
        }
    }

    fn pixel_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.height * self.width];
        for m in &self.masks {
            for (s, v) in sums.iter_mut().zip(m.data()) {
                *s += v;
            }
        }
        sums
    }

    pub fn max_sum_deviation(&self) -> f64 {
        self.pixel_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn masks(&self) -> &[Image] {
        &self.masks
    }

    pub fn get(&self, i: usize) -> &Image {
        &self.masks[i]
    }
}

#[derive(Debug, Clone)]
pub struct VarBlurOperator {
    kernels: Vec<Kernel>,
    masks: MaskStack,
    fft: Fft2,
    spectra: Vec<Vec<Complex64>>,
    /// Kernels whose only nonzero tap is the centre; applied without FFT.
    is_delta: Vec<bool>,
}

/// Zero-embeds `k` in an `h x w` frame with its centre tap at the origin,
/// wrapping negative offsets around the frame edges.
pub fn embed_kernel(k: &Kernel, height: usize, width: usize) -> Vec<f64> {
    let (ci, cj) = k.center();
    let mut frame = vec![0.0; height * width];
    for a in 0..k.height() {
        let r = (a + height - ci) % height;
        for b in 0..k.width() {
            let c = (b + width - cj) % width;
            frame[r * width + c] += k.tap(a, b);
        }
    }
    frame
}

impl VarBlurOperator {
    pub fn new(kernels: Vec<Kernel>, masks: MaskStack) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidParameter("operator needs at least one kernel".into()));
        }
        if kernels.len() != masks.len() {
            return Err(Error::InvalidParameter(format!(
                "{} kernels but {} masks",
                kernels.len(),
                masks.len()
            )));
        }
        let (h, w) = masks.dims();
        for (i, k) in kernels.iter().enumerate() {
            if k.height() > h || k.width() > w {
                return Err(Error::InvalidParameter(format!(
                    "kernel {i} ({}x{}) is larger than the {h}x{w} frame",
                    k.height(),
                    k.width()
                )));
            }
        }
        let fft = Fft2::new(h, w);
        let spectra = kernels
            .par_iter()
            .map(|k| fft.forward_real(&embed_kernel(k, h, w)))
            .collect();
        let is_delta = kernels
            .iter()
            .map(|k| {
                let (ci, cj) = k.center();
                k.tap(ci, cj) == 1.0 && k.taps().iter().filter(|&&t| t != 0.0).count() == 1
            })
            .collect();
        Ok(VarBlurOperator {
            kernels,
            masks,
            fft,
            spectra,
            is_delta,
        })
    }

    /// Single kernel applied everywhere.
    pub fn uniform(kernel: Kernel, height: usize, width: usize) -> Result<Self> {
        Self::new(vec![kernel], MaskStack::uniform(height, width))
    }

    pub fn identity(height: usize, width: usize) -> Self {
        Self::uniform(delta_kernel(1).expect("1x1 delta"), height, width).expect("valid identity")
    }

    pub fn frame(&self) -> (usize, usize) {
        self.masks.dims()
    }

    pub fn components(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn masks(&self) -> &MaskStack {
        &self.masks
    }

    /// Frequency response of kernel `i` on the operator frame.
    pub fn spectrum(&self, i: usize) -> &[Complex64] {
        &self.spectra[i]
    }

    pub fn is_uniform(&self) -> bool {
        self.components() == 1
    }

    fn check_frame(&self, x: &Image) -> Result<()> {
        let (h, w) = self.frame();
        if x.dims() != (h, w) {
            return Err(Error::mismatch(
                format!("{h}x{w} frame"),
                format!("{}x{}", x.height(), x.width()),
            ));
        }
        Ok(())
    }

    /// `sum_i U_i (K_i * x)`, per channel.
    pub fn apply(&self, x: &Image) -> Result<Image> {
        self.check_frame(x)?;
        let mut out = Image::zeros(x.height(), x.width(), x.channels());
        for (src, dst) in x.planes().zip(out.planes_mut()) {
            let spectrum = if self.is_delta.iter().all(|&d| d) {
                Vec::new()
            } else {
                self.fft.forward_real(src)
            };
            let blurred: Vec<Option<Vec<f64>>> = self
                .spectra
                .par_iter()
                .zip(self.is_delta.par_iter())
                .map(|(k, &delta)| {
                    if delta {
                        return None;
                    }
                    let prod = spectrum.iter().zip(k).map(|(a, b)| a * b).collect();
                    Some(self.fft.inverse_real(prod))
                })
                .collect();
            for (b, m) in blurred.iter().zip(self.masks.masks()) {
                let b = b.as_deref().unwrap_or(src);
                for ((d, v), u) in dst.iter_mut().zip(b).zip(m.data()) {
                    *d += u * v;
                }
            }
        }
        Ok(out)
    }

    /// `sum_i K_i^T (U_i x)`, per channel.
    pub fn apply_adjoint(&self, x: &Image) -> Result<Image> {
        self.check_frame(x)?;
        let mut out = Image::zeros(x.height(), x.width(), x.channels());
        for (src, dst) in x.planes().zip(out.planes_mut()) {
            let parts: Vec<Vec<Complex64>> = self
                .spectra
                .par_iter()
                .zip(self.masks.masks().par_iter())
                .zip(self.is_delta.par_iter())
                .filter(|(_, &delta)| !delta)
                .map(|((k, m), _)| {
                    let weighted: Vec<f64> = src.iter().zip(m.data()).map(|(a, u)| a * u).collect();
                    let mut f = self.fft.forward_real(&weighted);
                    f.iter_mut().zip(k).for_each(|(a, b)| *a *= b.conj());
                    f
                })
                .collect();
            if !parts.is_empty() {
                let mut acc = vec![Complex64::default(); src.len()];
                for p in &parts {
                    acc.iter_mut().zip(p).for_each(|(a, b)| *a += b);
                }
                dst.copy_from_slice(&self.fft.inverse_real(acc));
            }
            for (m, _) in self
                .masks
                .masks()
                .iter()
                .zip(&self.is_delta)
                .filter(|(_, &delta)| delta)
            {
                for ((d, v), u) in dst.iter_mut().zip(src).zip(m.data()) {
                    *d += u * v;
                }
            }
        }
        Ok(out)
    }

    /// Largest singular value of `H`, by power iteration on `H^T H` from a
    /// fixed pseudo-random start. The Rayleigh quotient never overestimates.
    pub fn operator_norm_estimate(&self) -> f64 {
        self.operator_norm_estimate_with(1e-6, 100)
    }

    /// Power iteration stopping once the Rayleigh quotient changes by less
    /// than `rel_tol` (relative) or after `max_iter` steps.
    pub fn operator_norm_estimate_with(&self, rel_tol: f64, max_iter: usize) -> f64 {
        let (h, w) = self.frame();
        let mut rng = RngStream::new(0);
        let mut v = Image::from_fn(h, w, 1, |_, _, _| rng.uniform());
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        v = v.scale(1.0 / n);
        let mut last = f64::NAN;
        let mut lambda = 0.0;
        for _ in 0..max_iter.max(1) {
            let hv = self.apply(&v).expect("frame-sized");
            lambda = hv.dot(&hv).expect("same shape");
            let hthv = self.apply_adjoint(&hv).expect("frame-sized");
            let n = hthv.norm();
            if n == 0.0 {
                return 0.0;
            }
            v = hthv.scale(1.0 / n);
            if (lambda - last).abs() < rel_tol * lambda {
                break;
            }
            last = lambda;
        }
        lambda.sqrt()
    }
}
