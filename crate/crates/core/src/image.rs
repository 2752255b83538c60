//! Planar float images and the sampling operators that connect the
//! high-resolution and low-resolution grids.
//!
//! Pixels are stored channel-major: channel `c` occupies the contiguous range
//! `c*h*w .. (c+1)*h*w`, each plane row-major. Every operator in the crate
//! acts on each plane independently.

use std::fmt;

use crate::error::{Error, Result};

/// Integer resampling factor between the HR and LR grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaleFactor(usize);

impl ScaleFactor {
    pub const MAX: usize = 4;

    pub fn new(s: usize) -> Result<Self> {
        if (1..=Self::MAX).contains(&s) {
            Ok(ScaleFactor(s))
        } else {
            Err(Error::InvalidParameter(format!(
                "scale factor must be in 1..={}, got {s}",
                Self::MAX
            )))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self::filled(height, width, channels, 0.0)
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Self {
        Image {
            height,
            width,
            channels,
            data: vec![value; height * width * channels],
        }
    }

    /// Wraps planar data. Rejects length mismatches and non-finite samples.
    pub fn from_planar(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidParameter("image needs at least one channel".into()));
        }
        if data.len() != height * width * channels {
            return Err(Error::mismatch(
                format!("{} samples for {height}x{width}x{channels}", height * width * channels),
                data.len(),
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample {} at index {pos}",
                data[pos]
            )));
        }
        Ok(Image {
            height,
            width,
            channels,
            data,
        })
    }

    /// Builds an image by evaluating `f(channel, row, col)` at every pixel.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(height * width * channels);
        for c in 0..channels {
            for i in 0..height {
                for j in 0..width {
                    data.push(f(c, i, j));
                }
            }
        }
        Image {
            height,
            width,
            channels,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.plane_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn planes(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.plane_len().max(1))
    }

    pub fn planes_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        let n = self.plane_len().max(1);
        self.data.chunks_mut(n)
    }

    #[inline]
    pub fn get(&self, c: usize, i: usize, j: usize) -> f64 {
        self.data[(c * self.height + i) * self.width + j]
    }

    #[inline]
    pub fn set(&mut self, c: usize, i: usize, j: usize, v: f64) {
        self.data[(c * self.height + i) * self.width + j] = v;
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    pub fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.height, self.width, self.channels)
    }

    pub(crate) fn check_same_shape(&self, other: &Image) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::mismatch(self.shape_string(), other.shape_string()))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Image {
        Image {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Result<Image> {
        self.check_same_shape(other)?;
        Ok(Image {
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
            ..*self
        })
    }

    pub fn add(&self, other: &Image) -> Result<Image> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Image) -> Result<Image> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Image {
        self.map(|v| v * k)
    }

    /// `self += k * other`
    pub fn axpy(&mut self, k: f64, other: &Image) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
        Ok(())
    }

    pub fn dot(&self, other: &Image) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Image) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn clamp01(&self) -> Image {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    /// Copies a rectangular window out of every channel.
    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Image> {
        if top + height > self.height || left + width > self.width {
            return Err(Error::InvalidParameter(format!(
                "crop {height}x{width}@({top},{left}) exceeds {}x{}",
                self.height, self.width
            )));
        }
        Ok(Image::from_fn(height, width, self.channels, |c, i, j| {
            self.get(c, top + i, left + j)
        }))
    }

    /// Single-channel view of channel `c` as its own image.
    pub fn channel(&self, c: usize) -> Image {
        Image {
            height: self.height,
            width: self.width,
            channels: 1,
            data: self.plane(c).to_vec(),
        }
    }
}

fn check_divisible(img: &Image, s: usize) -> Result<()> {
    if img.height % s != 0 {
        return Err(Error::NotDivisible {
            axis: "height",
            len: img.height,
            scale: s,
        });
    }
    if img.width % s != 0 {
        return Err(Error::NotDivisible {
            axis: "width",
            len: img.width,
            scale: s,
        });
    }
    Ok(())
}

/// Keeps the top-left pixel of every `s x s` block.
pub fn downsample(img: &Image, s: ScaleFactor) -> Result<Image> {
    let s = s.get();
    check_divisible(img, s)?;
    if s == 1 {
        return Ok(img.clone());
    }
    let (h, w) = (img.height / s, img.width / s);
    Ok(Image::from_fn(h, w, img.channels, |c, i, j| img.get(c, s * i, s * j)))
}

/// Places each pixel at the top-left of an `s x s` block of zeros. Exact
/// adjoint of [`downsample`].
pub fn upsample_zeropad(img: &Image, s: ScaleFactor) -> Image {
    let s = s.get();
    if s == 1 {
        return img.clone();
    }
    let mut out = Image::zeros(img.height * s, img.width * s, img.channels);
    for c in 0..img.channels {
        for i in 0..img.height {
            for j in 0..img.width {
                out.set(c, s * i, s * j, img.get(c, i, j));
            }
        }
    }
    out
}

/// Pixel replication.
pub fn upsample_nearest(img: &Image, s: ScaleFactor) -> Image {
    let s = s.get();
    if s == 1 {
        return img.clone();
    }
    Image::from_fn(img.height * s, img.width * s, img.channels, |c, i, j| {
        img.get(c, i / s, j / s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: usize) -> ScaleFactor {
        ScaleFactor::new(v).unwrap()
    }

    #[test]
    fn scale_factor_range() {
        assert!(ScaleFactor::new(0).is_err());
        assert!(ScaleFactor::new(5).is_err());
        assert_eq!(ScaleFactor::new(3).unwrap().get(), 3);
    }

    #[test]
    fn from_planar_rejects_bad_input() {
        assert!(Image::from_planar(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(Image::from_planar(1, 1, 1, vec![f64::NAN]).is_err());
        assert!(Image::from_planar(1, 1, 0, vec![]).is_err());
    }

    #[test]
    fn downsample_constant() {
        let img = Image::filled(4, 4, 1, 0.5);
        let out = downsample(&img, s(2)).unwrap();
        assert_eq!(out, Image::filled(2, 2, 1, 0.5));
    }

    #[test]
    fn downsample_takes_top_left() {
        let img = Image::from_planar(2, 2, 1, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let out = downsample(&img, s(2)).unwrap();
        assert_eq!(out.data(), &[0.1]);
    }

    #[test]
    fn downsample_names_offending_axis() {
        let img = Image::zeros(4, 5, 1);
        match downsample(&img, s(2)) {
            Err(Error::NotDivisible { axis, .. }) => assert_eq!(axis, "width"),
            other => panic!("unexpected {other:?}"),
        }
        let img = Image::zeros(3, 4, 1);
        match downsample(&img, s(2)) {
            Err(Error::NotDivisible { axis, .. }) => assert_eq!(axis, "height"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_scale() {
        let img = Image::from_fn(3, 5, 2, |c, i, j| (c * 100 + i * 10 + j) as f64);
        assert_eq!(downsample(&img, s(1)).unwrap(), img);
        assert_eq!(upsample_zeropad(&img, s(1)), img);
        assert_eq!(upsample_nearest(&img, s(1)), img);
    }

    #[test]
    fn zeropad_definition() {
        let img = Image::from_planar(1, 1, 1, vec![0.7]).unwrap();
        assert_eq!(upsample_zeropad(&img, s(2)).data(), &[0.7, 0.0, 0.0, 0.0]);
        assert_eq!(upsample_nearest(&img, s(2)).data(), &[0.7; 4]);
    }

    #[test]
    fn nearest_is_right_inverse_of_decimation() {
        let img = Image::from_fn(3, 4, 3, |c, i, j| (c + 2 * i + 3 * j) as f64 / 20.0);
        for k in 1..=4 {
            let up = upsample_nearest(&img, s(k));
            assert_eq!(downsample(&up, s(k)).unwrap(), img);
            let up = upsample_zeropad(&img, s(k));
            assert_eq!(downsample(&up, s(k)).unwrap(), img);
        }
    }

    #[test]
    fn crop_and_channel() {
        let img = Image::from_fn(4, 4, 2, |c, i, j| (c * 16 + i * 4 + j) as f64);
        let cr = img.crop(1, 2, 2, 2).unwrap();
        assert_eq!(cr.plane(0), &[6.0, 7.0, 10.0, 11.0]);
        assert_eq!(img.channel(1).get(0, 0, 0), 16.0);
        assert!(img.crop(3, 3, 2, 2).is_err());
    }
}
