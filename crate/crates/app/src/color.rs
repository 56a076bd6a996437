//! Color images as pure quaternion matrices.
//!
//! Red, green and blue go to the `i`, `j` and `k` components with a zero real
//! part. Values stay on the 8-bit scale `[0, 255]`.

use std::path::Path;

use image::{Rgb, RgbImage};
use qtt_core::{QMatrix, Quaternion, QuaternionArray};

use crate::error::{AppError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ColorImage {
    pixels: QMatrix,
}

impl ColorImage {
    /// Wraps a quaternion matrix; rows are image rows.
    pub fn from_matrix(pixels: QMatrix) -> Self {
        Self { pixels }
    }

    pub fn from_rgb8(img: &RgbImage) -> Self {
        let (w, h) = img.dimensions();
        let pixels = QMatrix::from_fn(h as usize, w as usize, |r, c| {
            let Rgb([red, green, blue]) = *img.get_pixel(c as u32, r as u32);
            Quaternion::pure(red as f64, green as f64, blue as f64)
        });
        Self { pixels }
    }

    /// Clamps each channel to `[0, 255]` and rounds to the nearest integer.
    pub fn to_rgb8(&self) -> RgbImage {
        let q = |v: f64| v.round().clamp(0.0, 255.0) as u8;
        RgbImage::from_fn(self.width() as u32, self.height() as u32, |x, y| {
            let p = self.pixels.get(y as usize, x as usize);
            Rgb([q(p.q1), q(p.q2), q(p.q3)])
        })
    }

    /// Rounded copy, identical to what [`save_image`] writes.
    pub fn quantized(&self) -> Self {
        Self::from_rgb8(&self.to_rgb8())
    }

    pub fn height(&self) -> usize {
        self.pixels.rows()
    }

    pub fn width(&self) -> usize {
        self.pixels.cols()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.pixels
    }

    pub fn into_matrix(self) -> QMatrix {
        self.pixels
    }

    /// `[r, g, b]` of pixel `(row, col)`.
    pub fn rgb(&self, row: usize, col: usize) -> [f64; 3] {
        let p = self.pixels.get(row, col);
        [p.q1, p.q2, p.q3]
    }

    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if top + height > self.height() || left + width > self.width() {
            return Err(AppError::usage(format!(
                "crop {height}x{width} at ({top}, {left}) exceeds a {}x{} image",
                self.height(),
                self.width()
            )));
        }
        let pixels = QMatrix::from_fn(height, width, |r, c| self.pixels.get(top + r, left + c));
        Ok(Self { pixels })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            pixels: self.pixels.scaled(s),
        }
    }
}

/// Largest `base^n` (n ≥ 1) not exceeding `limit`, if any.
pub fn largest_power(limit: usize, base: usize) -> Option<usize> {
    if base < 2 || limit < base {
        return None;
    }
    let mut side = base;
    while let Some(next) = side.checked_mul(base) {
        if next > limit {
            break;
        }
        side = next;
    }
    Some(side)
}

/// Top-left corner and side of the centered `base^n` square crop.
pub fn center_square(height: usize, width: usize, base: usize) -> Result<(usize, usize, usize)> {
    let side = largest_power(height.min(width), base).ok_or_else(|| {
        AppError::usage(format!(
            "a {height}x{width} image has no {base}^n square to crop"
        ))
    })?;
    Ok(((height - side) / 2, (width - side) / 2, side))
}

pub fn load_image(path: impl AsRef<Path>) -> Result<ColorImage> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| AppError::usage(format!("{}: {e}", path.display())))?;
    match img.color() {
        image::ColorType::Rgb8 => Ok(ColorImage::from_rgb8(&img.into_rgb8())),
        other => Err(AppError::usage(format!(
            "{}: expected 8-bit RGB, found {other:?}",
            path.display()
        ))),
    }
}

pub fn save_image(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    img.to_rgb8()
        .save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}
