//! Procedural piecewise-smooth test scenes.

use std::f64::consts::PI;

use crate::image::Image;
use crate::rng::RngStream;

enum Shape {
    Rect {
        top: f64,
        left: f64,
        bottom: f64,
        right: f64,
    },
    Ellipse {
        ci: f64,
        cj: f64,
        ri: f64,
        rj: f64,
        angle: f64,
    },
    Stripes {
        ci: f64,
        cj: f64,
        radius: f64,
        period: f64,
        angle: f64,
    },
}

impl Shape {
    /// Coverage in `[0,1]` and a texture factor at pixel centre `(i, j)`.
    fn sample(&self, i: f64, j: f64) -> (f64, f64) {
        match *self {
            Shape::Rect {
                top,
                left,
                bottom,
                right,
            } => {
                let inside = i >= top && i < bottom && j >= left && j < right;
                (if inside { 1.0 } else { 0.0 }, 1.0)
            }
            Shape::Ellipse { ci, cj, ri, rj, angle } => {
                let (s, c) = angle.sin_cos();
                let (di, dj) = (i - ci, j - cj);
                let u = c * di + s * dj;
                let v = -s * di + c * dj;
                let inside = (u / ri).powi(2) + (v / rj).powi(2) <= 1.0;
                (if inside { 1.0 } else { 0.0 }, 1.0)
            }
            Shape::Stripes {
                ci,
                cj,
                radius,
                period,
                angle,
            } => {
                let (di, dj) = (i - ci, j - cj);
                if di * di + dj * dj > radius * radius {
                    return (0.0, 1.0);
                }
                let (s, c) = angle.sin_cos();
                let phase = 2.0 * PI * (c * di + s * dj) / period;
                (1.0, 0.5 + 0.5 * phase.sin())
            }
        }
    }
}

/// A gradient background overlaid with random rectangles, ellipses and a
/// striped disk. Deterministic in `seed`; values lie in `[0.05, 0.95]`.
pub fn synthetic_scene(height: usize, width: usize, channels: usize, seed: u64) -> Image {
    let mut rng = RngStream::new(seed);
    let (hf, wf) = (height as f64, width as f64);
    let base: Vec<(f64, f64, f64)> = (0..channels)
        .map(|_| {
            (
                rng.uniform_range(0.2, 0.6),
                rng.uniform_range(-0.3, 0.3),
                rng.uniform_range(-0.3, 0.3),
            )
        })
        .collect();

    let count = 6 + rng.int_range(0, 6);
    let mut shapes = Vec::with_capacity(count + 1);
    for _ in 0..count {
        let shape = if rng.uniform() < 0.5 {
            let (a, b) = (rng.uniform() * hf, rng.uniform() * hf);
            let (c, d) = (rng.uniform() * wf, rng.uniform() * wf);
            Shape::Rect {
                top: a.min(b),
                bottom: a.max(b).max(a.min(b) + 3.0),
                left: c.min(d),
                right: c.max(d).max(c.min(d) + 3.0),
            }
        } else {
            Shape::Ellipse {
                ci: rng.uniform() * hf,
                cj: rng.uniform() * wf,
                ri: rng.uniform_range(0.05, 0.3) * hf,
                rj: rng.uniform_range(0.05, 0.3) * wf,
                angle: rng.uniform_range(0.0, PI),
            }
        };
        let colour: Vec<f64> = (0..channels).map(|_| rng.uniform_range(0.05, 0.95)).collect();
        shapes.push((shape, colour));
    }
    let stripes = Shape::Stripes {
        ci: rng.uniform() * hf,
        cj: rng.uniform() * wf,
        radius: rng.uniform_range(0.1, 0.2) * hf.min(wf),
        period: rng.uniform_range(4.0, 9.0),
        angle: rng.uniform_range(0.0, PI),
    };
    let colour: Vec<f64> = (0..channels).map(|_| rng.uniform_range(0.3, 0.9)).collect();
    shapes.push((stripes, colour));

    Image::from_fn(height, width, channels, |c, i, j| {
        let (y, x) = (i as f64 + 0.5, j as f64 + 0.5);
        let (b0, bi, bj) = base[c];
        let mut v = b0 + bi * (y / hf) + bj * (x / wf);
        for (shape, colour) in &shapes {
            let (cover, texture) = shape.sample(y, x);
            if cover > 0.0 {
                v = (1.0 - cover) * v + cover * colour[c] * texture;
            }
        }
        v.clamp(0.05, 0.95)
    })
}
