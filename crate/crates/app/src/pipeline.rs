//! Inpainting pipelines: crop, encode, mask, augment, solve, restore, score.
//!
//! Pixels are solved on the unit scale `[0, 1]` and mapped back to `[0, 255]`
//! before quantization. The solver defaults (initial multiplier scale, `λ`,
//! the shrinkage constants) are tuned for that range.

use std::path::Path;

use qtt_core::{
    qka_forward, qka_inverse, qka_video_forward, qka_video_inverse, Diagnostics, ObservationSet,
    QTensor, QkaPlan, Quaternion, QuaternionArray, Solver, SolverConfig, SolverState,
    TransformKind, TransformSpec,
};

use crate::color::{largest_power, ColorImage};
use crate::error::{AppError, Result};
use crate::mask::{crop_mask, make_mask, MaskSpec};
use crate::metrics::{psnr, ssim, Metrics};

pub const PIXEL_SCALE: f64 = 255.0;

#[derive(Clone, Debug)]
pub struct InpaintOptions {
    pub mask: MaskSpec,
    pub transform: TransformKind,
    pub mu: Quaternion,
    pub qka_base: usize,
    pub qka_order: Option<usize>,
    pub solver: SolverConfig,
}

impl InpaintOptions {
    pub fn new(mask: MaskSpec, qka_base: usize) -> Self {
        Self {
            mask,
            transform: TransformKind::Wht,
            mu: qtt_core::default_mu(),
            qka_base,
            qka_order: None,
            solver: SolverConfig::default(),
        }
    }
}

/// Result of one image inpainting run. All images share the cropped size.
#[derive(Clone, Debug)]
pub struct ImageOutcome {
    /// Uncorrupted input after cropping.
    pub reference: ColorImage,
    /// Observed pixels with missing ones set to zero.
    pub observed: ColorImage,
    /// Quantized reconstruction.
    pub recovered: ColorImage,
    pub mask: Vec<bool>,
    pub metrics: Metrics,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct VideoOutcome {
    pub reference: Vec<ColorImage>,
    pub recovered: Vec<ColorImage>,
    pub metrics: Metrics,
    pub diagnostics: Diagnostics,
}

/// Side and top-left corner of the centered `b^N` crop.
fn crop_window(
    height: usize,
    width: usize,
    base: usize,
    order: Option<usize>,
) -> Result<(usize, usize, usize)> {
    let limit = height.min(width);
    let side = match order {
        Some(n) => u32::try_from(n)
            .ok()
            .and_then(|n| base.checked_pow(n))
            .filter(|&s| s <= limit)
            .ok_or_else(|| {
                AppError::usage(format!(
                    "{base}^{n} does not fit in a {height}x{width} image"
                ))
            })?,
        None => largest_power(limit, base).ok_or_else(|| {
            AppError::usage(format!(
                "a {height}x{width} image has no {base}^n square to crop"
            ))
        })?,
    };
    if base < 2 || side < base * base {
        return Err(AppError::usage(format!(
            "augmentation needs at least two levels; a {side}x{side} crop with block factor {base} has fewer"
        )));
    }
    Ok(((height - side) / 2, (width - side) / 2, side))
}

/// The requested kind on every spatial mode. A trailing frame mode whose
/// length is not a power of two gets dct in place of wht.
fn transform_spec(dims: &[usize], opts: &InpaintOptions, video: bool) -> Result<TransformSpec> {
    let mut kinds = vec![opts.transform; dims.len()];
    if let (true, Some(&frames)) = (video, dims.last()) {
        if opts.transform == TransformKind::Wht && !frames.is_power_of_two() {
            kinds[dims.len() - 1] = TransformKind::Dct;
        }
    }
    TransformSpec::new(dims, &kinds, opts.mu)
        .map_err(|e| AppError::usage(format!("transform {}: {e}", opts.transform)))
}

fn solve(
    obs: &ObservationSet,
    spec: &TransformSpec,
    cfg: &SolverConfig,
    observer: impl FnMut(&SolverState),
) -> Result<(QTensor, Diagnostics)> {
    cfg.validate().map_err(|e| AppError::usage(e.to_string()))?;
    let solver = Solver::new(obs, spec, cfg).map_err(AppError::Numeric)?;
    solver.run(observer).map_err(AppError::Numeric)
}

/// Pixel scale to unit scale.
fn to_unit<A: QuaternionArray>(mut a: A) -> A {
    for p in a.planes_mut() {
        p.iter_mut().for_each(|v| *v /= PIXEL_SCALE);
    }
    a
}

fn to_pixels<A: QuaternionArray>(mut a: A) -> A {
    for p in a.planes_mut() {
        p.iter_mut().for_each(|v| *v *= PIXEL_SCALE);
    }
    a
}

/// Completes a color image. Non-`b^N` images are center-cropped first.
pub fn inpaint_image(input: &ColorImage, opts: &InpaintOptions) -> Result<ImageOutcome> {
    inpaint_image_observed(input, opts, |_, _| {})
}

/// [`inpaint_image`] that reports every solver iterate together with the
/// augmented observations.
pub fn inpaint_image_observed(
    input: &ColorImage,
    opts: &InpaintOptions,
    mut observer: impl FnMut(&ObservationSet, &SolverState),
) -> Result<ImageOutcome> {
    let (h, w) = (input.height(), input.width());
    let (top, left, side) = crop_window(h, w, opts.qka_base, opts.qka_order)?;
    let reference = input.crop(top, left, side, side)?;

    let mask = match &opts.mask {
        MaskSpec::Random { .. } => make_mask(&[side, side], &opts.mask)?,
        MaskSpec::File(_) => crop_mask(&make_mask(&[h, w], &opts.mask)?, h, top, left, side),
    };

    let plan = QkaPlan::image(side, opts.qka_base, opts.qka_order)
        .map_err(|e| AppError::usage(e.to_string()))?;
    let unit = to_unit(reference.matrix().clone());
    let tensor = qka_forward(&unit, &plan)?;
    let obs = ObservationSet::from_full(&tensor, plan.forward_values(&mask)?)?;
    let spec = transform_spec(&plan.target_dims(), opts, false)?;

    let (x, diagnostics) = solve(&obs, &spec, &opts.solver, |st| observer(&obs, st))?;
    let recovered = ColorImage::from_matrix(to_pixels(qka_inverse(&x, &plan)?)).quantized();
    let observed =
        ColorImage::from_matrix(to_pixels(qka_inverse(obs.values(), &plan)?)).quantized();

    let metrics = Metrics {
        psnr_db: psnr(&reference, &recovered)?,
        ssim: ssim(&reference, &recovered)?,
        iterations: diagnostics.iterations,
        final_residual: diagnostics.final_residual,
        wall_time_ms: diagnostics.wall_time_ms,
    };
    Ok(ImageOutcome {
        reference,
        observed,
        recovered,
        mask,
        metrics,
        diagnostics,
    })
}

/// Completes a color video given as equally sized frames. Each frame is
/// center-cropped to the same `b^N` square; a file mask applies to every frame.
pub fn inpaint_video(frames: &[ColorImage], opts: &InpaintOptions) -> Result<VideoOutcome> {
    let first = frames
        .first()
        .ok_or_else(|| AppError::usage("no frames given"))?;
    let (h, w) = (first.height(), first.width());
    if let Some(bad) = frames
        .iter()
        .position(|f| (f.height(), f.width()) != (h, w))
    {
        return Err(AppError::usage(format!(
            "frame {bad} is {}x{}, frame 0 is {h}x{w}",
            frames[bad].height(),
            frames[bad].width()
        )));
    }
    let (top, left, side) = crop_window(h, w, opts.qka_base, opts.qka_order)?;
    let reference = frames
        .iter()
        .map(|f| f.crop(top, left, side, side))
        .collect::<Result<Vec<_>>>()?;
    let f = frames.len();
    let pixels = side * side;

    let mask = match &opts.mask {
        MaskSpec::Random { .. } => make_mask(&[side, side, f], &opts.mask)?,
        MaskSpec::File(_) => {
            crop_mask(&make_mask(&[h, w], &opts.mask)?, h, top, left, side).repeat(f)
        }
    };

    let mut video = QTensor::zeros(&[side, side, f]);
    for (t, frame) in reference.iter().enumerate() {
        for (p, plane) in video.planes_mut().iter_mut().zip(frame.matrix().planes()) {
            p[t * pixels..(t + 1) * pixels].copy_from_slice(plane);
        }
    }

    let plan = QkaPlan::video(side, f, opts.qka_base, opts.qka_order)
        .map_err(|e| AppError::usage(e.to_string()))?;
    let tensor = qka_video_forward(&to_unit(video), &plan)?;
    let obs = ObservationSet::from_full(&tensor, plan.forward_values(&mask)?)?;
    let spec = transform_spec(&plan.target_dims(), opts, true)?;

    let (x, diagnostics) = solve(&obs, &spec, &opts.solver, |_| {})?;
    let restored = to_pixels(qka_video_inverse(&x, &plan)?);
    let recovered: Vec<ColorImage> = (0..f)
        .map(|t| {
            let planes = restored
                .planes()
                .clone()
                .map(|p| p[t * pixels..(t + 1) * pixels].to_vec());
            Ok(
                ColorImage::from_matrix(qtt_core::QMatrix::from_planes(side, side, planes)?)
                    .quantized(),
            )
        })
        .collect::<Result<_>>()?;

    let mut se = 0.0;
    let mut ssim_sum = 0.0;
    for (a, b) in reference.iter().zip(&recovered) {
        se += crate::metrics::mse(a, b)?;
        ssim_sum += ssim(a, b)?;
    }
    let mse = se / f as f64;
    let metrics = Metrics {
        psnr_db: if mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (PIXEL_SCALE * PIXEL_SCALE / mse).log10()
        },
        ssim: ssim_sum / f as f64,
        iterations: diagnostics.iterations,
        final_residual: diagnostics.final_residual,
        wall_time_ms: diagnostics.wall_time_ms,
    };
    Ok(VideoOutcome {
        reference,
        recovered,
        metrics,
        diagnostics,
    })
}

/// PNG files in `dir`, sorted by file name.
pub fn frame_paths(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| AppError::usage(format!("{}: {e}", dir.display())))?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(AppError::usage(format!(
            "{} contains no PNG frames",
            dir.display()
        )));
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qtt_core::QMatrix;

    fn gradient(h: usize, w: usize) -> ColorImage {
        ColorImage::from_matrix(QMatrix::from_fn(h, w, |r, c| {
            Quaternion::pure(
                (4 * r + c) as f64,
                (2 * c + 30) as f64,
                ((r * c) % 200) as f64,
            )
        }))
    }

    #[test]
    fn crop_windows() {
        assert_eq!(crop_window(70, 100, 2, None).unwrap(), (3, 18, 64));
        assert_eq!(crop_window(70, 100, 2, Some(3)).unwrap(), (31, 46, 8));
        assert!(crop_window(70, 100, 2, Some(7)).is_err());
        assert!(crop_window(3, 3, 2, None).is_err());
        assert_eq!(crop_window(20, 20, 4, None).unwrap(), (2, 2, 16));
        assert!(crop_window(15, 15, 4, None).is_err());
    }

    #[test]
    fn full_sampling_reproduces_the_crop() {
        let img = gradient(18, 17);
        let opts = InpaintOptions::new(MaskSpec::random(1.0, 0).unwrap(), 2);
        let out = inpaint_image(&img, &opts).unwrap();
        assert_eq!(out.reference, img.crop(1, 0, 16, 16).unwrap());
        assert_eq!(out.recovered, out.reference);
        assert_eq!(out.metrics.psnr_db, f64::INFINITY);
        assert_eq!(out.metrics.iterations, 1);
    }

    #[test]
    fn observed_pixels_survive() {
        let img = gradient(16, 16);
        let mut opts = InpaintOptions::new(MaskSpec::random(0.5, 3).unwrap(), 2);
        opts.solver.max_iter = 20;
        let out = inpaint_image(&img, &opts).unwrap();
        for c in 0..16 {
            for r in 0..16 {
                if out.mask[r + 16 * c] {
                    assert_eq!(out.recovered.rgb(r, c), out.reference.rgb(r, c));
                    assert_eq!(out.observed.rgb(r, c), out.reference.rgb(r, c));
                } else {
                    assert_eq!(out.observed.rgb(r, c), [0.0; 3]);
                }
            }
        }
    }

    #[test]
    fn video_full_sampling() {
        let frames: Vec<_> = (0..3).map(|_| gradient(16, 16)).collect();
        let opts = InpaintOptions::new(MaskSpec::random(1.0, 1).unwrap(), 4);
        let out = inpaint_video(&frames, &opts).unwrap();
        assert_eq!(out.recovered, frames);
        assert_eq!(out.metrics.psnr_db, f64::INFINITY);
    }

    #[test]
    fn video_rejects_ragged_frames() {
        let frames = vec![gradient(16, 16), gradient(16, 17)];
        let opts = InpaintOptions::new(MaskSpec::random(1.0, 1).unwrap(), 4);
        assert!(matches!(
            inpaint_video(&frames, &opts),
            Err(AppError::Usage(_))
        ));
        assert!(inpaint_video(&[], &opts).is_err());
    }

    #[test]
    fn bad_transform_size_is_a_usage_error() {
        let opts = InpaintOptions::new(MaskSpec::random(0.5, 0).unwrap(), 3);
        assert!(matches!(
            inpaint_image(&gradient(9, 9), &opts),
            Err(AppError::Usage(_))
        ));
    }
}
