//! Observation masks. `true` marks an observed entry; layout is column-major
//! like every other array here.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AppError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum MaskSpec {
    /// Each entry observed independently with probability `sr`.
    Random { sr: f64, seed: u64 },
    /// Grayscale image; zero pixels are missing.
    File(PathBuf),
}

impl MaskSpec {
    pub fn random(sr: f64, seed: u64) -> Result<Self> {
        if !(sr > 0.0 && sr <= 1.0) {
            return Err(AppError::usage(format!(
                "sampling rate must lie in (0, 1], got {sr}"
            )));
        }
        Ok(MaskSpec::Random { sr, seed })
    }
}

/// Mask over an array of shape `dims` (column-major).
pub fn make_mask(dims: &[usize], spec: &MaskSpec) -> Result<Vec<bool>> {
    match spec {
        MaskSpec::Random { sr, seed } => {
            let n: usize = dims.iter().product();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((0..n).map(|_| rng.random_bool(*sr)).collect())
        }
        MaskSpec::File(path) => {
            let (mask, h, w) = load_mask(path)?;
            if dims != [h, w] {
                return Err(AppError::usage(format!(
                    "mask {} is {h}x{w}, expected {}",
                    path.display(),
                    dims.iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join("x")
                )));
            }
            Ok(mask)
        }
    }
}

/// Thresholds a mask image at zero. Returns the column-major mask with its
/// height and width.
pub fn load_mask(path: &Path) -> Result<(Vec<bool>, usize, usize)> {
    let img = image::open(path)
        .map_err(|e| AppError::usage(format!("{}: {e}", path.display())))?
        .into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut mask = Vec::with_capacity(w * h);
    for c in 0..w {
        for r in 0..h {
            mask.push(img.get_pixel(c as u32, r as u32).0[0] != 0);
        }
    }
    Ok((mask, h, w))
}

/// Sub-mask of a column-major `height`-row mask.
pub fn crop_mask(mask: &[bool], height: usize, top: usize, left: usize, side: usize) -> Vec<bool> {
    let mut out = Vec::with_capacity(side * side);
    for c in 0..side {
        for r in 0..side {
            out.push(mask[(top + r) + height * (left + c)]);
        }
    }
    out
}
