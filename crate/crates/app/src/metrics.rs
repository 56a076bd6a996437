//! Image quality scores on the 8-bit scale.

use serde::{Serialize, Serializer};

use crate::color::ColorImage;
use crate::error::{AppError, Result};

pub const PEAK: f64 = 255.0;
pub const SSIM_WINDOW: usize = 8;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn check_dims(a: &ColorImage, b: &ColorImage) -> Result<()> {
    if (a.height(), a.width()) != (b.height(), b.width()) {
        return Err(AppError::usage(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Mean squared error over all pixels and the three channels.
pub fn mse(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    check_dims(reference, test)?;
    let mut se = 0.0;
    for c in 0..reference.width() {
        for r in 0..reference.height() {
            let (a, b) = (reference.rgb(r, c), test.rgb(r, c));
            se += (0..3).map(|ch| (a[ch] - b[ch]).powi(2)).sum::<f64>();
        }
    }
    Ok(se / (3 * reference.height() * reference.width()) as f64)
}

/// Peak signal-to-noise ratio in dB; `+inf` for identical images.
pub fn psnr(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    let mse = mse(reference, test)?;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    })
}

/// Structural similarity: mean over channels of the mean SSIM over every
/// 8×8 window (stride 1, uniform weights). Images smaller than the window
/// are scored as a single window.
pub fn ssim(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    check_dims(reference, test)?;
    let (h, w) = (reference.height(), reference.width());
    let (wh, ww) = (SSIM_WINDOW.min(h), SSIM_WINDOW.min(w));
    let mut total = 0.0;
    for ch in 0..3 {
        let a = channel(reference, ch);
        let b = channel(test, ch);
        let mut sum = 0.0;
        let mut count = 0usize;
        for top in 0..=h - wh {
            for left in 0..=w - ww {
                sum += window_ssim(&a, &b, h, top, left, wh, ww);
                count += 1;
            }
        }
        total += sum / count as f64;
    }
    Ok(total / 3.0)
}

fn channel(img: &ColorImage, ch: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(img.height() * img.width());
    for c in 0..img.width() {
        for r in 0..img.height() {
            out.push(img.rgb(r, c)[ch]);
        }
    }
    out
}

fn window_ssim(
    a: &[f64],
    b: &[f64],
    h: usize,
    top: usize,
    left: usize,
    wh: usize,
    ww: usize,
) -> f64 {
    let n = (wh * ww) as f64;
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for c in left..left + ww {
        for r in top..top + wh {
            let (x, y) = (a[r + h * c], b[r + h * c]);
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
            sab += x * y;
        }
    }
    let (ma, mb) = (sa / n, sb / n);
    let va = (saa / n - ma * ma).max(0.0);
    let vb = (sbb / n - mb * mb).max(0.0);
    let cov = sab / n - ma * mb;
    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
}

/// Scores written by the inpainting commands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(serialize_with = "finite_or_inf")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub iterations: usize,
    pub final_residual: f64,
    pub wall_time_ms: f64,
}

/// Writes `+inf` as the string `"inf"`; other values as numbers.
pub fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}
