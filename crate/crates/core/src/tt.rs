//! Quaternion tensor-train (QTT) decomposition.
//!
//! An order-N tensor is represented by cores `G_n` of shape
//! `r_{n-1} x I_n x r_n` with `r_0 = r_N = 1`, and
//! `x(i_1, ..., i_N) = G_1(:, i_1, :) G_2(:, i_2, :) ... G_N(:, i_N, :)`
//! as a product of quaternion matrices, left to right.

use rand::Rng;
use rayon::prelude::*;

use crate::array::QuaternionArray;
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::qlinalg::{qrank, qsvd_thin, rank_of};
use crate::random::random_qtensor;
use crate::tensor::QTensor;

#[derive(Clone, Debug, PartialEq)]
pub struct QttCores {
    cores: Vec<QTensor>,
}

impl QttCores {
    /// Validates the shape chain: every core is third order, the outer
    /// ranks are 1 and adjacent ranks agree.
    pub fn new(cores: Vec<QTensor>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidArgument(
                "a QTT decomposition needs at least one core".into(),
            ));
        }
        for (n, c) in cores.iter().enumerate() {
            if c.order() != 3 {
                return Err(Error::DimensionMismatch(format!(
                    "core {n} has order {}, expected 3",
                    c.order()
                )));
            }
        }
        if cores[0].dims()[0] != 1 || cores[cores.len() - 1].dims()[2] != 1 {
            return Err(Error::DimensionMismatch("boundary ranks must be 1".into()));
        }
        for (n, pair) in cores.windows(2).enumerate() {
            if pair[0].dims()[2] != pair[1].dims()[0] {
                return Err(Error::DimensionMismatch(format!(
                    "core {n} ends with rank {} but core {} starts with rank {}",
                    pair[0].dims()[2],
                    n + 1,
                    pair[1].dims()[0]
                )));
            }
        }
        Ok(Self { cores })
    }

    /// Cores with i.i.d. components uniform on `[-1, 1)`; `inner_ranks` holds
    /// `(r_1, ..., r_{N-1})`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        dims: &[usize],
        inner_ranks: &[usize],
    ) -> Result<Self> {
        if dims.is_empty() || inner_ranks.len() + 1 != dims.len() {
            return Err(Error::InvalidArgument(format!(
                "{} dims need {} inner ranks, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                inner_ranks.len()
            )));
        }
        if dims.contains(&0) || inner_ranks.contains(&0) {
            return Err(Error::InvalidArgument(
                "dims and ranks must be positive".into(),
            ));
        }
        let mut ranks = vec![1];
        ranks.extend_from_slice(inner_ranks);
        ranks.push(1);
        let cores = dims
            .iter()
            .enumerate()
            .map(|(n, &d)| random_qtensor(rng, &[ranks[n], d, ranks[n + 1]]))
            .collect();
        Self::new(cores)
    }

    pub fn cores(&self) -> &[QTensor] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<QTensor> {
        self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    /// `(r_0, ..., r_N)`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dims()[0]).collect();
        r.push(1);
        r
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[1]).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.cores.iter().map(|c| c.len()).sum()
    }

    /// Full tensor from the cores.
    pub fn reconstruct(&self) -> QTensor {
        let dims = self.dims();
        // running product P: (I_1 ... I_n) x r_n
        let mut p = QMatrix::identity(1);
        for core in &self.cores {
            let (r0, size, r1) = (core.dims()[0], core.dims()[1], core.dims()[2]);
            let g = QMatrix::from_planes(r0, size * r1, core.planes().clone())
                .expect("core buffer matches its dims");
            let rows = p.rows();
            p = p
                .matmul(&g)
                .expect("adjacent ranks agree")
                .reshape(rows * size, r1)
                .expect("element count preserved");
        }
        QTensor::canonical_fold(p, &dims).expect("element count preserved")
    }
}

/// Sequential QSVD construction with relative truncation `tol * sigma_max`
/// at every step. Singular values are pushed into the remainder, so the
/// canonical unfoldings of cores `1..N-1` have orthonormal columns.
///
/// A zero tensor yields rank-1 zero cores.
pub fn tt_svd(x: &QTensor, tol: f64) -> Result<QttCores> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("tt_svd input"));
    }
    let dims = x.dims().to_vec();
    if dims.is_empty() || x.is_empty() {
        return Err(Error::InvalidArgument(
            "tt_svd needs a non-empty tensor".into(),
        ));
    }
    let order = dims.len();
    if x.fro_norm() == 0.0 {
        let cores = dims.iter().map(|&d| QTensor::zeros(&[1, d, 1])).collect();
        return QttCores::new(cores);
    }

    let mut cores = Vec::with_capacity(order);
    let mut remainder = QMatrix::from_planes(1, x.len(), x.planes().clone())?;
    let mut r_prev = 1;
    for &size in &dims[..order - 1] {
        let rows = r_prev * size;
        let cols = remainder.rows() * remainder.cols() / rows;
        let mat = remainder.reshape(rows, cols)?;
        let svd = qsvd_thin(&mat)?;
        let r = rank_of(&svd.sigma, tol).max(1);
        let u = svd.u.leading_columns(r);
        cores.push(QTensor::from_planes(&[r_prev, size, r], u.into_planes())?);
        remainder = svd
            .v
            .leading_columns(r)
            .scale_columns(&svd.sigma[..r])
            .hermitian();
        r_prev = r;
    }
    let last = dims[order - 1];
    cores.push(QTensor::from_planes(
        &[r_prev, last, 1],
        remainder.into_planes(),
    )?);
    QttCores::new(cores)
}

/// `(rank X_[1], ..., rank X_[N-1])` of the canonical unfoldings.
pub fn qtt_rank(x: &QTensor, tol: f64) -> Result<Vec<usize>> {
    (1..x.order())
        .into_par_iter()
        .map(|split| qrank(&x.canonical_unfold(split)?, tol))
        .collect()
}
