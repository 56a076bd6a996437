//! Color image and video inpainting on top of `qtt-core`.
//!
//! Images are read as 8-bit RGB PNGs and encoded as pure quaternion matrices,
//! augmented into high-order tensors, completed by the ADMM solver and
//! decoded back. [`cli`] wires these steps into the `qtt` binary.

pub mod cli;
pub mod color;
pub mod error;
pub mod mask;
pub mod metrics;
pub mod pipeline;

pub use color::{load_image, save_image, ColorImage};
pub use error::{AppError, Result};
pub use mask::{make_mask, MaskSpec};
pub use metrics::{psnr, ssim, Metrics};
pub use pipeline::{inpaint_image, inpaint_image_observed, inpaint_video, InpaintOptions};
