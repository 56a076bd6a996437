//! ADMM completion with a low tensor-train-rank prior and a sparse prior in a
//! transformed domain.
//!
//! The model minimizes `Σ_k α_k ‖M_k[k]‖_{w,*} + λ_k ‖E_k‖_1` subject to
//! `P_Ω(X) = P_Ω(T)`, `X = M_k` and `𝔗(X) = E_k` for `k = 1..N-1`, where
//! `M_k[k]` is the k-th canonical unfolding.
//!
//! One iteration updates X, then every `(M_k, E_k, Y1_k, Y2_k)`, then μ:
//!
//! ```text
//! X    = P_Ωᶜ( Σ_k (M_k − Y1_k/μ + 𝔗⁻¹(E_k + Y2_k/μ)) / 2(N−1) ) + P_Ω(T)
//! M_k  = fold_k( qwnn_shrink( unfold_k(X + Y1_k/μ), α_k/μ ) )
//! E_k  = shrinkQ( 𝔗(X) − Y2_k/μ, λ_k/μ )
//! Y1_k += μ (X − M_k)
//! Y2_k += μ (E_k − 𝔗(X))
//! μ    = min(ρ μ, μ_max)
//! ```
//!
//! The per-k updates only read X and their own multipliers, so they run on
//! the rayon pool and the result does not depend on scheduling.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::QuaternionArray;
use crate::error::{Error, Result};
use crate::qlinalg::{qwnn_shrink, shrink_q, ShrinkParams, DEFAULT_C, DEFAULT_EPS};
use crate::random::uniform_qtensor;
use crate::tensor::QTensor;
use crate::transform::TransformSpec;

pub const DEFAULT_LAMBDA: f64 = 0.01;

/// Observed tensor `T` and mask `Ω` (true = observed), both column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSet {
    values: QTensor,
    mask: Vec<bool>,
}

impl ObservationSet {
    pub fn new(values: QTensor, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "mask has {} entries, tensor {:?} has {}",
                mask.len(),
                values.dims(),
                values.len()
            )));
        }
        Ok(Self { values, mask })
    }

    /// Keeps only the observed entries of `full`; the rest become zero.
    pub fn from_full(full: &QTensor, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != full.len() {
            return Self::new(full.clone(), mask);
        }
        Self::new(full.project(&mask), mask)
    }

    pub fn dims(&self) -> &[usize] {
        self.values.dims()
    }

    pub fn values(&self) -> &QTensor {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn observed_fraction(&self) -> f64 {
        self.observed_count() as f64 / self.mask.len().max(1) as f64
    }

    /// `P_Ω(T)`.
    pub fn projected(&self) -> QTensor {
        self.values.project(&self.mask)
    }
}

/// Per-unfolding weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weights {
    /// `1/(N-1)` on every unfolding.
    Balanced,
    Uniform(f64),
    Each(Vec<f64>),
}

impl Weights {
    pub fn resolve(&self, count: usize) -> Result<Vec<f64>> {
        let w = match self {
            Weights::Balanced => vec![1.0 / count as f64; count],
            Weights::Uniform(v) => vec![*v; count],
            Weights::Each(v) if v.len() == count => v.clone(),
            Weights::Each(v) => {
                return Err(Error::InvalidArgument(format!(
                    "{} weights given for {count} unfoldings",
                    v.len()
                )))
            }
        };
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weights must be finite and >= 0, got {w:?}"
            )));
        }
        Ok(w)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub alphas: Weights,
    pub lambdas: Weights,
    pub mu0: f64,
    pub rho: f64,
    pub mu_max: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub shrink_c: f64,
    pub shrink_eps: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alphas: Weights::Balanced,
            lambdas: Weights::Uniform(DEFAULT_LAMBDA),
            mu0: 2.5e-3,
            rho: 1.08,
            mu_max: 1e6,
            tol: 1e-5,
            max_iter: 500,
            shrink_c: DEFAULT_C,
            shrink_eps: DEFAULT_EPS,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return bad(format!("mu0 must be positive, got {}", self.mu0));
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return bad(format!("rho must exceed 1, got {}", self.rho));
        }
        if !(self.mu_max >= self.mu0 && self.mu_max.is_finite()) {
            return bad(format!(
                "mu_max must be finite and >= mu0, got {}",
                self.mu_max
            ));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be >= 0, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        ShrinkParams::new(0.0, self.shrink_c, self.shrink_eps)?;
        Ok(())
    }
}

/// All iterates. `tx` caches `𝔗(x)`.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: QTensor,
    pub tx: QTensor,
    pub m: Vec<QTensor>,
    pub e: Vec<QTensor>,
    pub y1: Vec<QTensor>,
    pub y2: Vec<QTensor>,
    pub mu: f64,
    pub iter: usize,
    pub residual_history: Vec<f64>,
}

impl SolverState {
    /// `max_k ‖X − M_k‖_F`.
    pub fn low_rank_gap(&self) -> f64 {
        self.m.iter().map(|m| gap(&self.x, m)).fold(0.0, f64::max)
    }

    /// `max_k ‖𝔗(X) − E_k‖_F`.
    pub fn sparse_gap(&self) -> f64 {
        self.e.iter().map(|e| gap(&self.tx, e)).fold(0.0, f64::max)
    }
}

/// `y += s (a − b)`.
fn add_scaled_diff(y: &mut QTensor, s: f64, a: &QTensor, b: &QTensor) {
    for ((py, pa), pb) in y.planes_mut().iter_mut().zip(a.planes()).zip(b.planes()) {
        for ((v, x), z) in py.iter_mut().zip(pa).zip(pb) {
            *v += s * (x - z);
        }
    }
}

fn gap(a: &QTensor, b: &QTensor) -> f64 {
    a.planes()
        .iter()
        .zip(b.planes())
        .flat_map(|(p, q)| p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub final_residual: f64,
    pub residual_history: Vec<f64>,
    pub wall_time_ms: f64,
    pub config_echo: SolverConfig,
    pub warnings: Vec<String>,
}

/// A validated problem: observations, transform and resolved weights.
pub struct Solver<'a> {
    obs: &'a ObservationSet,
    spec: &'a TransformSpec,
    cfg: SolverConfig,
    alphas: Vec<f64>,
    lambdas: Vec<f64>,
    t_norm: f64,
}

impl<'a> Solver<'a> {
    pub fn new(
        obs: &'a ObservationSet,
        spec: &'a TransformSpec,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let order = obs.dims().len();
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "tensor order must be at least 2, got {order}"
            )));
        }
        if spec.dims() != obs.dims() {
            return Err(Error::DimensionMismatch(format!(
                "transform built for {:?}, observations are {:?}",
                spec.dims(),
                obs.dims()
            )));
        }
        if !obs.values().is_finite() {
            return Err(Error::NonFinite("observed tensor"));
        }
        let t_norm = obs.values().fro_norm();
        if t_norm == 0.0 {
            return Err(Error::InvalidArgument(
                "observed tensor has zero norm; the relative stopping residual is undefined".into(),
            ));
        }
        let alphas = cfg.alphas.resolve(order - 1)?;
        let lambdas = cfg.lambdas.resolve(order - 1)?;
        let mut cfg = cfg.clone();
        cfg.alphas = Weights::Each(alphas.clone());
        cfg.lambdas = Weights::Each(lambdas.clone());
        Ok(Self {
            obs,
            spec,
            cfg,
            alphas,
            lambdas,
            t_norm,
        })
    }

    /// Configuration with weights resolved for this tensor order.
    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn unfoldings(&self) -> usize {
        self.alphas.len()
    }

    /// `X⁰ = P_Ω(T)`; `M, E, Y1, Y2` get components uniform on `[0, 1)`, drawn
    /// from the seed in the order all M, all E, all Y1, all Y2.
    pub fn init_state(&self) -> Result<SolverState> {
        let dims = self.obs.dims();
        let k = self.unfoldings();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<QTensor> {
            (0..k)
                .map(|_| uniform_qtensor(rng, dims, 0.0, 1.0))
                .collect()
        };
        let m = draw(&mut rng);
        let e = draw(&mut rng);
        let y1 = draw(&mut rng);
        let y2 = draw(&mut rng);
        let x = self.obs.projected();
        let tx = self.spec.apply(&x)?;
        Ok(SolverState {
            x,
            tx,
            m,
            e,
            y1,
            y2,
            mu: self.cfg.mu0,
            iter: 0,
            residual_history: Vec::new(),
        })
    }

    pub fn update_x(&self, st: &SolverState) -> Result<QTensor> {
        let inv_mu = 1.0 / st.mu;
        let mut direct = QTensor::zeros(self.obs.dims());
        let mut transformed = QTensor::zeros(self.obs.dims());
        for k in 0..self.unfoldings() {
            direct = direct.axpy(1.0, &st.m[k]).axpy(-inv_mu, &st.y1[k]);
            transformed = transformed.axpy(1.0, &st.e[k]).axpy(inv_mu, &st.y2[k]);
        }
        let sum = direct.add(&self.spec.inverse(&transformed)?)?;
        let mut x = sum.scaled(0.5 / self.unfoldings() as f64);
        x.overwrite_masked(self.obs.mask(), self.obs.values());
        Ok(x)
    }

    /// Uses `st.x`, which must already hold the current iterate.
    pub fn update_m(&self, st: &SolverState, k: usize) -> Result<QTensor> {
        let gamma = st.x.axpy(1.0 / st.mu, &st.y1[k]);
        let p = ShrinkParams::new(
            self.alphas[k] / st.mu,
            self.cfg.shrink_c,
            self.cfg.shrink_eps,
        )?;
        if p.tau * p.c == 0.0 {
            return Ok(gamma);
        }
        let dims = gamma.dims().to_vec();
        let shrunk = qwnn_shrink(&gamma.canonical_unfold(k + 1)?, &p)?;
        QTensor::canonical_fold(shrunk, &dims)
    }

    /// Uses `st.tx`, which must already hold `𝔗(st.x)`.
    pub fn update_e(&self, st: &SolverState, k: usize) -> QTensor {
        shrink_q(
            &st.tx.axpy(-1.0 / st.mu, &st.y2[k]),
            self.lambdas[k] / st.mu,
        )
    }

    pub fn update_duals_and_mu(&self, st: &mut SolverState) {
        let mu = st.mu;
        let (x, tx) = (&st.x, &st.tx);
        st.y1
            .par_iter_mut()
            .zip(&st.m)
            .for_each(|(y, m)| add_scaled_diff(y, mu, x, m));
        st.y2
            .par_iter_mut()
            .zip(&st.e)
            .for_each(|(y, e)| add_scaled_diff(y, mu, e, tx));
        st.mu = (self.cfg.rho * mu).min(self.cfg.mu_max);
    }

    /// One full iteration; returns `‖X⁺ − X‖_F / ‖T‖_F`.
    pub fn step(&self, st: &mut SolverState) -> Result<f64> {
        let x = self.update_x(st)?;
        let residual = gap(&x, &st.x) / self.t_norm;
        st.tx = self.spec.apply(&x)?;
        st.x = x;
        let updates = (0..self.unfoldings())
            .into_par_iter()
            .map(|k| Ok((self.update_m(st, k)?, self.update_e(st, k))))
            .collect::<Result<Vec<_>>>()?;
        (st.m, st.e) = updates.into_iter().unzip();
        self.update_duals_and_mu(st);
        if !st.x.is_finite() {
            return Err(Error::NonFinite("iterate"));
        }
        st.iter += 1;
        st.residual_history.push(residual);
        Ok(residual)
    }

    /// Iterates until the residual drops below `tol` or `max_iter` passes,
    /// calling `observer` after every pass.
    pub fn run(&self, mut observer: impl FnMut(&SolverState)) -> Result<(QTensor, Diagnostics)> {
        let start = Instant::now();
        let mut warnings = Vec::new();
        if self.obs.observed_count() == 0 {
            warnings.push(
                "no entries are observed; recovery is driven by the priors alone".to_string(),
            );
        }
        let mut st = self.init_state()?;
        loop {
            let residual = self.step(&mut st)?;
            observer(&st);
            if residual < self.cfg.tol || st.iter >= self.cfg.max_iter {
                break;
            }
        }
        let diagnostics = Diagnostics {
            iterations: st.iter,
            final_residual: *st.residual_history.last().expect("at least one pass"),
            residual_history: st.residual_history,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            config_echo: self.cfg.clone(),
            warnings,
        };
        Ok((st.x, diagnostics))
    }
}

pub fn qtt_srtd(
    obs: &ObservationSet,
    spec: &TransformSpec,
    cfg: &SolverConfig,
) -> Result<(QTensor, Diagnostics)> {
    Solver::new(obs, spec, cfg)?.run(|_| {})
}

/// [`qtt_srtd`] with a callback after every iteration.
pub fn qtt_srtd_observed(
    obs: &ObservationSet,
    spec: &TransformSpec,
    cfg: &SolverConfig,
    observer: impl FnMut(&SolverState),
) -> Result<(QTensor, Diagnostics)> {
    Solver::new(obs, spec, cfg)?.run(observer)
}
