//! Synthetic training/evaluation pairs: random Voronoi masks, random
//! kernels, random scale and noise, applied to caller-supplied HR images.
//!
//! Sample `i` draws everything from stream `i` of the dataset seed, so the
//! output does not depend on how samples are scheduled across threads.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degradation::{degrade, generate_mask_stack, sigma_from_8bit, DegradationSpec};
use crate::error::{Error, Result};
use crate::image::{Image, ScaleFactor};
use crate::io::{read_image, write_image, ImageFormat};
use crate::kernels::KernelSampling;
use crate::manifest::{save_operator, write_json};
use crate::operator::VarBlurOperator;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    /// Scale factors drawn uniformly.
    pub scales: Vec<usize>,
    /// Noise range on the 8-bit scale, drawn uniformly.
    pub sigma_8bit: (f64, f64),
    /// Inclusive range of the component count `P`.
    pub components: (usize, usize),
    pub kernels: KernelSampling,
    pub border_sigma: f64,
    /// Random square crop of the source image; full image when absent.
    pub crop: Option<usize>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            scales: vec![1, 2, 3, 4],
            sigma_8bit: (0.0, 25.0),
            components: (1, 4),
            kernels: KernelSampling::default(),
            border_sigma: 3.0,
            crop: None,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() {
            return Err(Error::Config("scales must not be empty".into()));
        }
        for &s in &self.scales {
            ScaleFactor::new(s).map_err(|e| Error::Config(e.to_string()))?;
        }
        let (lo, hi) = self.sigma_8bit;
        if !(0.0 <= lo && lo <= hi) {
            return Err(Error::Config(format!("invalid sigma range ({lo}, {hi})")));
        }
        let (plo, phi) = self.components;
        if plo == 0 || plo > phi {
            return Err(Error::Config(format!("invalid component range ({plo}, {phi})")));
        }
        if !(self.border_sigma >= 0.0) {
            return Err(Error::Config("border_sigma must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub index: usize,
    pub source: usize,
    pub hr: Image,
    pub lr: Image,
    pub operator: VarBlurOperator,
    pub scale: ScaleFactor,
    /// Noise level in intensity units.
    pub sigma: f64,
    /// Seed of the additive noise field.
    pub noise_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub index: usize,
    pub source: usize,
    pub scale: usize,
    pub sigma: f64,
    pub sigma_8bit: f64,
    pub components: usize,
    pub dataset_seed: u64,
    pub noise_seed: u64,
}

pub fn generate_sample(sources: &[Image], index: usize, config: &DatasetConfig, seed: u64) -> Result<Sample> {
    if sources.is_empty() {
        return Err(Error::InvalidParameter("no source images".into()));
    }
    let mut rng = RngStream::derive(seed, index as u64);
    let source = index % sources.len();
    let src = &sources[source];

    let scale = ScaleFactor::new(config.scales[rng.int_range(0, config.scales.len() - 1)])?;
    let s = scale.get();
    let sigma = sigma_from_8bit(rng.uniform_range(config.sigma_8bit.0, config.sigma_8bit.1));
    let components = rng.int_range(config.components.0, config.components.1);

    let (sh, sw) = src.dims();
    let (ch, cw) = match config.crop {
        Some(c) => (c.min(sh), c.min(sw)),
        None => (sh, sw),
    };
    let (ch, cw) = (ch - ch % s, cw - cw % s);
    if ch == 0 || cw == 0 {
        return Err(Error::InvalidParameter(format!(
            "source {source} ({sh}x{sw}) is too small for scale {s}"
        )));
    }
    let top = rng.int_range(0, sh - ch);
    let left = rng.int_range(0, sw - cw);
    let hr = src.crop(top, left, ch, cw)?;

    let masks = generate_mask_stack(ch, cw, components, config.border_sigma, rng.next_u64())?;
    let kernels = (0..components)
        .map(|_| config.kernels.sample(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let operator = VarBlurOperator::new(kernels, masks)?;
    let noise_seed = rng.next_u64();
    let spec = DegradationSpec::new(operator, scale, sigma, noise_seed)?;
    let lr = degrade(&hr, &spec)?;
    Ok(Sample {
        index,
        source,
        hr,
        lr,
        operator: spec.operator,
        scale,
        sigma,
        noise_seed,
    })
}

pub fn generate_dataset(sources: &[Image], n: usize, config: &DatasetConfig, seed: u64) -> Result<Vec<Sample>> {
    config.validate()?;
    if sources.is_empty() {
        return Err(Error::InvalidParameter("no source images".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| generate_sample(sources, i, config, seed))
        .collect()
}

pub fn sample_dir_name(index: usize) -> String {
    format!("sample_{index:05}")
}

/// Writes `sample_XXXXX/{hr.pfm, lr.pfm, operator.json, kernels/, masks/, meta.json}`
/// under `root` and returns the sample directory.
pub fn write_sample(root: &Path, sample: &Sample, dataset_seed: u64) -> Result<PathBuf> {
    let dir = root.join(sample_dir_name(sample.index));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_image(&sample.hr, dir.join("hr.pfm"))?;
    write_image(&sample.lr, dir.join("lr.pfm"))?;
    save_operator(&sample.operator, dir.join("operator.json"))?;
    let meta = SampleMeta {
        index: sample.index,
        source: sample.source,
        scale: sample.scale.get(),
        sigma: sample.sigma,
        sigma_8bit: sample.sigma * 255.0,
        components: sample.operator.components(),
        dataset_seed,
        noise_seed: sample.noise_seed,
    };
    write_json(&dir.join("meta.json"), &meta)?;
    Ok(dir)
}

pub fn read_meta(sample_dir: &Path) -> Result<SampleMeta> {
    let path = sample_dir.join("meta.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Reads every PFM/PGM/PPM file directly inside `dir`, sorted by name.
pub fn load_sources(dir: &Path) -> Result<Vec<(PathBuf, Image)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && ImageFormat::from_extension(p).is_some())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no PFM/PGM/PPM images in {}",
            dir.display()
        )));
    }
    paths.into_iter().map(|p| read_image(&p).map(|img| (p, img))).collect()
}
