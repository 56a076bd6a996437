//! Command line definition and dispatch.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use qtt_core::{
    load_qten, qtt_rank, save_qten, transform::pure_unit, tt_svd, QTensor, QttCores, Quaternion,
    SolverConfig, TransformKind, TransformSpec, Weights,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::color::{load_image, save_image};
use crate::error::{AppError, Result};
use crate::mask::MaskSpec;
use crate::metrics::{finite_or_inf, psnr, ssim};
use crate::pipeline::{frame_paths, inpaint_image, inpaint_video, InpaintOptions};

#[derive(Debug, Parser)]
#[command(
    name = "qtt",
    version,
    about = "Quaternion tensor-train completion for color images and videos"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inpaint a color PNG. Images that are not b^N squares are center-cropped
    /// (never resized) to the largest b^N square, which keeps pixel statistics
    /// intact; scores are taken against that crop.
    InpaintImage(InpaintImageArgs),
    /// Inpaint a color video given as a directory of PNG frames (sorted by
    /// file name). Frames are center-cropped like images.
    InpaintVideo(InpaintVideoArgs),
    /// Tensor-train decomposition of a QTEN tensor; prints the ranks as JSON.
    Decompose(DecomposeArgs),
    /// Random tensor with prescribed tensor-train ranks.
    Synth(SynthArgs),
    /// Apply a uniform multi-mode transform (or its inverse) to a QTEN tensor.
    Transform(TransformArgs),
    /// PSNR and SSIM between two PNGs of equal size.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mask").required(true).args(["mask_sr", "mask_file"])))]
pub struct MaskArgs {
    /// Sampling rate in (0, 1]: each pixel is observed with this probability.
    #[arg(long)]
    pub mask_sr: Option<f64>,
    /// Grayscale PNG of the full input size; 0 marks a missing pixel.
    #[arg(long, conflicts_with = "mask_sr")]
    pub mask_file: Option<PathBuf>,
    /// Seed for the mask and the solver initialization.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value = "wht")]
    pub transform: TransformKind,
    /// Pure unit axis `x,y,z` for the dft transform; normalized on input.
    #[arg(long, value_parser = parse_mu)]
    pub mu: Option<Quaternion>,
    /// Number of augmentation levels N; inferred from the crop when omitted.
    #[arg(long)]
    pub qka_order: Option<usize>,
    /// Sparsity weight, shared by every unfolding.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Initial penalty.
    #[arg(long)]
    pub mu0: Option<f64>,
    /// Penalty growth factor.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop once the relative change of the iterate drops below this.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write solver diagnostics as JSON.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InpaintImageArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub mask: MaskArgs,
    /// Block factor b of the augmentation.
    #[arg(long, default_value_t = qtt_core::qka::DEFAULT_IMAGE_BASE)]
    pub qka_base: usize,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Write {psnr_db, ssim, iterations, final_residual, wall_time_ms} as JSON.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InpaintVideoArgs {
    #[arg(long)]
    pub frames: PathBuf,
    #[command(flatten)]
    pub mask: MaskArgs,
    #[arg(long, default_value_t = qtt_core::qka::DEFAULT_VIDEO_BASE)]
    pub qka_base: usize,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Output directory; frames keep their input file names.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Relative truncation tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Directory for the cores, written as core_1.qten .. core_N.qten.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Inner ranks r_1..r_{N-1}.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ranks: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub kind: TransformKind,
    #[arg(long)]
    pub inverse: bool,
    #[arg(long, value_parser = parse_mu)]
    pub mu: Option<Quaternion>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
}

fn parse_mu(s: &str) -> std::result::Result<Quaternion, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match parts[..] {
        [x, y, z] => pure_unit(x, y, z).map_err(|e| e.to_string()),
        _ => Err(format!(
            "expected three comma-separated components, got {}",
            parts.len()
        )),
    }
}

impl MaskArgs {
    fn spec(&self) -> Result<MaskSpec> {
        match (&self.mask_sr, &self.mask_file) {
            (Some(sr), None) => MaskSpec::random(*sr, self.seed),
            (None, Some(path)) => Ok(MaskSpec::File(path.clone())),
            _ => Err(AppError::usage(
                "give exactly one of --mask-sr and --mask-file",
            )),
        }
    }
}

impl SolveArgs {
    fn options(&self, mask: MaskSpec, base: usize, seed: u64) -> InpaintOptions {
        let mut opts = InpaintOptions::new(mask, base);
        opts.transform = self.transform;
        if let Some(mu) = self.mu {
            opts.mu = mu;
        }
        opts.qka_order = self.qka_order;
        let cfg: &mut SolverConfig = &mut opts.solver;
        cfg.seed = seed;
        if let Some(l) = self.lambda {
            cfg.lambdas = Weights::Uniform(l);
        }
        if let Some(v) = self.mu0 {
            cfg.mu0 = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        opts
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| AppError::usage(format!("{}: {e}", dir.display())))
}

fn load_tensor(path: &Path) -> Result<QTensor> {
    load_qten(path).map_err(|e| AppError::usage(format!("{}: {e}", path.display())))
}

/// Runs one parsed command, writing reports to `stdout`.
pub fn run(cli: Cli, stdout: &mut impl std::io::Write) -> Result<()> {
    match cli.command {
        Command::InpaintImage(a) => {
            let img = load_image(&a.input)?;
            let opts = a.solve.options(a.mask.spec()?, a.qka_base, a.mask.seed);
            let out = inpaint_image(&img, &opts)?;
            save_image(&out.recovered, &a.out)?;
            if let Some(p) = &a.metrics {
                write_json(p, &out.metrics)?;
            }
            if let Some(p) = &a.solve.diagnostics {
                write_json(p, &out.diagnostics)?;
            }
            for w in &out.diagnostics.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::InpaintVideo(a) => {
            let paths = frame_paths(&a.frames)?;
            let frames = paths.iter().map(load_image).collect::<Result<Vec<_>>>()?;
            let opts = a.solve.options(a.mask.spec()?, a.qka_base, a.mask.seed);
            let out = inpaint_video(&frames, &opts)?;
            ensure_dir(&a.out)?;
            for (path, frame) in paths.iter().zip(&out.recovered) {
                save_image(
                    frame,
                    a.out
                        .join(path.file_name().expect("listed files have names")),
                )?;
            }
            if let Some(p) = &a.metrics {
                write_json(p, &out.metrics)?;
            }
            if let Some(p) = &a.solve.diagnostics {
                write_json(p, &out.diagnostics)?;
            }
        }
        Command::Decompose(a) => {
            let t = load_tensor(&a.input)?;
            let cores = tt_svd(&t, a.tol).map_err(AppError::Numeric)?;
            let ranks = qtt_rank(&t, a.tol).map_err(AppError::Numeric)?;
            if let Some(dir) = &a.out {
                ensure_dir(dir)?;
                for (k, core) in cores.cores().iter().enumerate() {
                    save_qten(dir.join(format!("core_{}.qten", k + 1)), core)?;
                }
            }
            let report = DecomposeReport {
                dims: t.dims().to_vec(),
                qtt_rank: ranks,
                core_ranks: cores.ranks(),
            };
            writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
        }
        Command::Synth(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let cores = QttCores::random(&mut rng, &a.dims, &a.ranks)
                .map_err(|e| AppError::usage(e.to_string()))?;
            save_qten(&a.out, &cores.reconstruct())?;
        }
        Command::Transform(a) => {
            let t = load_tensor(&a.input)?;
            let mu = a.mu.unwrap_or_else(qtt_core::default_mu);
            let spec = TransformSpec::uniform(t.dims(), a.kind, mu)
                .map_err(|e| AppError::usage(e.to_string()))?;
            let out = if a.inverse {
                spec.inverse(&t)
            } else {
                spec.apply(&t)
            }
            .map_err(AppError::Numeric)?;
            save_qten(&a.out, &out)?;
        }
        Command::Metrics(a) => {
            let reference = load_image(&a.reference)?;
            let test = load_image(&a.test)?;
            let report = MetricsReport {
                psnr_db: psnr(&reference, &test)?,
                ssim: ssim(&reference, &test)?,
            };
            writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DecomposeReport {
    dims: Vec<usize>,
    qtt_rank: Vec<usize>,
    core_ranks: Vec<usize>,
}

#[derive(Serialize)]
struct MetricsReport {
    #[serde(serialize_with = "finite_or_inf")]
    psnr_db: f64,
    ssim: f64,
}
