//! Denoisers used as the prior step `P_beta ≈ prox_{beta^2 Φ}`.
//!
//! * `Tv`: exact proximal map of isotropic total variation (periodic forward
//!   differences), computed with an accelerated projected-gradient iteration
//!   on the dual field.
//! * `Dct`: overlapping blockwise DCT shrinkage.
//! * `Identity`: no-op.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DenoiserKind {
    Identity,
    Tv {
        #[serde(default = "default_tv_iters")]
        max_iter: usize,
        #[serde(default = "default_tv_tol")]
        tol: f64,
    },
    Dct {
        #[serde(default = "default_block")]
        block: usize,
        #[serde(default = "default_mode")]
        mode: ThresholdMode,
        #[serde(default = "default_dct_c")]
        c: f64,
    },
}

fn default_tv_iters() -> usize {
    50
}
fn default_tv_tol() -> f64 {
    1e-5
}
fn default_block() -> usize {
    8
}
fn default_mode() -> ThresholdMode {
    ThresholdMode::Soft
}
fn default_dct_c() -> f64 {
    1.5
}

impl DenoiserKind {
    pub fn tv() -> Self {
        DenoiserKind::Tv {
            max_iter: default_tv_iters(),
            tol: default_tv_tol(),
        }
    }

    pub fn dct() -> Self {
        DenoiserKind::Dct {
            block: default_block(),
            mode: default_mode(),
            c: default_dct_c(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DenoiserKind::Identity => Ok(()),
            DenoiserKind::Tv { max_iter, tol } => {
                if max_iter == 0 {
                    return Err(Error::Config("tv max_iter must be >= 1".into()));
                }
                if !(tol >= 0.0) {
                    return Err(Error::Config(format!("tv tol must be >= 0, got {tol}")));
                }
                Ok(())
            }
            DenoiserKind::Dct { block, c, .. } => {
                if block != 8 && block != 16 {
                    return Err(Error::Config(format!("dct block must be 8 or 16, got {block}")));
                }
                if !(c >= 0.0) {
                    return Err(Error::Config(format!("dct threshold factor must be >= 0, got {c}")));
                }
                Ok(())
            }
        }
    }
}

impl Default for DenoiserKind {
    fn default() -> Self {
        DenoiserKind::tv()
    }
}

/// Applies the denoiser at noise level `beta` (intensity units), one
/// channel at a time.
pub fn denoise(kind: &DenoiserKind, v: &Image, beta: f64) -> Result<Image> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "denoiser level must be >= 0, got {beta}"
        )));
    }
    kind.validate()?;
    if beta == 0.0 {
        return Ok(v.clone());
    }
    let (h, w) = v.dims();
    let planes: Vec<Vec<f64>> = match *kind {
        DenoiserKind::Identity => return Ok(v.clone()),
        DenoiserKind::Tv { max_iter, tol } => v
            .planes()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|p| tv_prox_plane(p, h, w, beta * beta, max_iter, tol))
            .collect(),
        DenoiserKind::Dct { block, mode, c } => v
            .planes()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|p| dct_shrink_plane(p, h, w, block, mode, beta * c))
            .collect(),
    };
    Image::from_planar(h, w, v.channels(), planes.concat())
}

/// Isotropic TV with periodic forward differences.
pub fn total_variation(img: &Image) -> f64 {
    let (h, w) = img.dims();
    img.planes()
        .map(|p| {
            let mut tv = 0.0;
            for i in 0..h {
                for j in 0..w {
                    let x = p[i * w + j];
                    let dy = p[((i + 1) % h) * w + j] - x;
                    let dx = p[i * w + (j + 1) % w] - x;
                    tv += (dx * dx + dy * dy).sqrt();
                }
            }
            tv
        })
        .sum()
}

/// `½‖x − v‖² + weight·TV(x)`.
pub fn tv_objective(x: &Image, v: &Image, weight: f64) -> Result<f64> {
    let r = x.sub(v)?;
    Ok(0.5 * r.dot(&r)? + weight * total_variation(x))
}

fn gradient(x: &[f64], h: usize, w: usize, gx: &mut [f64], gy: &mut [f64]) {
    for i in 0..h {
        let down = ((i + 1) % h) * w;
        for j in 0..w {
            let k = i * w + j;
            gx[k] = x[i * w + (j + 1) % w] - x[k];
            gy[k] = x[down + j] - x[k];
        }
    }
}

/// Negative adjoint of [`gradient`].
fn divergence(px: &[f64], py: &[f64], h: usize, w: usize, out: &mut [f64]) {
    for i in 0..h {
        let up = ((i + h - 1) % h) * w;
        for j in 0..w {
            let k = i * w + j;
            out[k] = px[k] - px[i * w + (j + w - 1) % w] + py[k] - py[up + j];
        }
    }
}

/// Solves `argmin_x ½‖x − v‖² + weight·TV(x)` through its dual:
/// `x = v + weight·div p` with `|p| ≤ 1` pointwise, `p` found by FISTA-type
/// projected gradient with step `1/(8·weight)`.
fn tv_prox_plane(v: &[f64], h: usize, w: usize, weight: f64, max_iter: usize, tol: f64) -> Vec<f64> {
    let n = h * w;
    let step = 1.0 / (8.0 * weight);
    let (mut px, mut py) = (vec![0.0; n], vec![0.0; n]);
    let (mut qx, mut qy) = (vec![0.0; n], vec![0.0; n]);
    let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
    let mut div = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut t = 1.0f64;

    let primal = |div: &[f64], x: &mut [f64]| {
        for ((xi, vi), di) in x.iter_mut().zip(v).zip(div) {
            *xi = vi + weight * di;
        }
    };

    for _ in 0..max_iter {
        divergence(&qx, &qy, h, w, &mut div);
        primal(&div, &mut x);
        gradient(&x, h, w, &mut gx, &mut gy);

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        let (mut change, mut size) = (0.0f64, 0.0f64);
        for k in 0..n {
            let mut ax = qx[k] + step * gx[k];
            let mut ay = qy[k] + step * gy[k];
            let mag = (ax * ax + ay * ay).sqrt();
            if mag > 1.0 {
                ax /= mag;
                ay /= mag;
            }
            let (dx, dy) = (ax - px[k], ay - py[k]);
            change += dx * dx + dy * dy;
            size += ax * ax + ay * ay;
            qx[k] = ax + momentum * dx;
            qy[k] = ay + momentum * dy;
            px[k] = ax;
            py[k] = ay;
        }
        t = t_next;
        if change <= tol * tol * size.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    divergence(&px, &py, h, w, &mut div);
    primal(&div, &mut x);
    x
}

/// Orthonormal DCT-II basis, row `k` holding the `k`-th basis vector.
fn dct_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for i in 0..n {
            m[k * n + i] = scale * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos();
        }
    }
    m
}

/// `out = a · b · cᵀ` for square `n x n` matrices.
fn sandwich(a: &[f64], b: &[f64], c: &[f64], n: usize, tmp: &mut [f64], out: &mut [f64]) {
    for i in 0..n {
        for j in 0..n {
            tmp[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
        }
    }
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| tmp[i * n + k] * c[j * n + k]).sum();
        }
    }
}

/// Shrinks DCT coefficients of `b x b` blocks placed every `b/2` pixels
/// (periodically wrapped) and averages the overlapping reconstructions. The
/// DC coefficient of each block is kept.
fn dct_shrink_plane(v: &[f64], h: usize, w: usize, b: usize, mode: ThresholdMode, tau: f64) -> Vec<f64> {
    let basis = dct_matrix(b);
    let mut basis_t = vec![0.0; b * b];
    for i in 0..b {
        for j in 0..b {
            basis_t[j * b + i] = basis[i * b + j];
        }
    }
    let stride = (b / 2).max(1);
    let mut acc = vec![0.0; h * w];
    let mut weight = vec![0.0; h * w];
    let (mut block, mut coef, mut tmp, mut rec) =
        (vec![0.0; b * b], vec![0.0; b * b], vec![0.0; b * b], vec![0.0; b * b]);
    for top in (0..h).step_by(stride) {
        for left in (0..w).step_by(stride) {
            for i in 0..b {
                for j in 0..b {
                    block[i * b + j] = v[((top + i) % h) * w + (left + j) % w];
                }
            }
            // C = D X Dᵀ
            sandwich(&basis, &block, &basis, b, &mut tmp, &mut coef);
            for c in coef.iter_mut().skip(1) {
                *c = match mode {
                    ThresholdMode::Soft => c.signum() * (c.abs() - tau).max(0.0),
                    ThresholdMode::Hard => {
                        if c.abs() > tau {
                            *c
                        } else {
                            0.0
                        }
                    }
                };
            }
            // X = Dᵀ C D
            sandwich(&basis_t, &coef, &basis_t, b, &mut tmp, &mut rec);
            for i in 0..b {
                for j in 0..b {
                    let k = ((top + i) % h) * w + (left + j) % w;
                    acc[k] += rec[i * b + j];
                    weight[k] += 1.0;
                }
            }
        }
    }
    acc.iter().zip(&weight).map(|(a, c)| a / c).collect()
}
