//! On-disk description of a [`VarBlurOperator`]: a JSON manifest pointing at
//! one PFM per kernel and one PFM per mask, paths relative to the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_image, write_image};
use crate::kernels::Kernel;
use crate::operator::{MaskStack, VarBlurOperator};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorManifest {
    pub version: u32,
    pub components: usize,
    pub height: usize,
    pub width: usize,
    pub kernels: Vec<String>,
    pub masks: Vec<String>,
}

impl OperatorManifest {
    pub fn validate(&self) -> Result<()> {
        if self.version != MANIFEST_VERSION {
            return Err(Error::Config(format!("unsupported manifest version {}", self.version)));
        }
        if self.components == 0 {
            return Err(Error::Config("manifest lists no components".into()));
        }
        if self.kernels.len() != self.components || self.masks.len() != self.components {
            return Err(Error::Config(format!(
                "manifest declares {} components but lists {} kernels and {} masks",
                self.components,
                self.kernels.len(),
                self.masks.len()
            )));
        }
        Ok(())
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<OperatorManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: OperatorManifest =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    manifest.validate()?;
    Ok(manifest)
}

/// Loads kernels and masks listed by the manifest at `path`.
pub fn load_operator(path: impl AsRef<Path>) -> Result<VarBlurOperator> {
    let path = path.as_ref();
    let manifest = read_manifest(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let kernels = manifest
        .kernels
        .iter()
        .map(|rel| Kernel::from_image(&read_image(base.join(rel))?))
        .collect::<Result<Vec<_>>>()?;
    let masks = manifest
        .masks
        .iter()
        .map(|rel| read_image(base.join(rel)))
        .collect::<Result<Vec<_>>>()?;
    for (rel, m) in manifest.masks.iter().zip(&masks) {
        if m.dims() != (manifest.height, manifest.width) {
            return Err(Error::InvalidMasks {
                reason: format!(
                    "{rel} is {}x{}, manifest frame is {}x{}",
                    m.height(),
                    m.width(),
                    manifest.height,
                    manifest.width
                ),
                max_deviation: 0.0,
            });
        }
    }
    VarBlurOperator::new(kernels, MaskStack::new_renormalized(masks)?)
}

/// Writes `kernels/k_XX.pfm`, `masks/m_XX.pfm` and the manifest at
/// `manifest_path`.
pub fn save_operator(op: &VarBlurOperator, manifest_path: impl AsRef<Path>) -> Result<OperatorManifest> {
    let manifest_path = manifest_path.as_ref();
    let base = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    for sub in ["kernels", "masks"] {
        let d = base.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let mut kernels = Vec::new();
    let mut masks = Vec::new();
    for (i, (k, m)) in op.kernels().iter().zip(op.masks().masks()).enumerate() {
        let krel = format!("kernels/k_{i:02}.pfm");
        let mrel = format!("masks/m_{i:02}.pfm");
        write_image(&k.to_image(), base.join(&krel))?;
        write_image(m, base.join(&mrel))?;
        kernels.push(krel);
        masks.push(mrel);
    }
    let (height, width) = op.frame();
    let manifest = OperatorManifest {
        version: MANIFEST_VERSION,
        components: op.components(),
        height,
        width,
        kernels,
        masks,
    };
    write_json(manifest_path, &manifest)?;
    Ok(manifest)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(PathBuf::from(path), e))
}
