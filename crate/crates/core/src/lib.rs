//! Quaternion tensor-train completion.
//!
//! Color pixels are pure quaternions, so a color image is a quaternion matrix
//! and a color video a third-order quaternion tensor. This crate provides the
//! algebra on those objects (Hamilton products, Cayley–Dickson views, QSVD),
//! the quaternion tensor-train decomposition and its rank, unitary multi-mode
//! transforms, ket augmentation of images and videos into high-order tensors,
//! and an ADMM solver that completes a partially observed quaternion tensor
//! by combining a low tensor-train-rank prior with a sparse prior in a
//! transformed domain.

pub mod array;
pub mod error;
pub mod matrix;
pub mod qka;
pub mod qlinalg;
pub mod qten;
pub mod quaternion;
pub mod random;
pub mod solver;
pub mod tensor;
pub mod transform;
pub mod tt;

pub use array::QuaternionArray;
pub use error::{Error, Result};
pub use matrix::{CMatrix, QMatrix};
pub use qka::{qka_forward, qka_inverse, qka_video_forward, qka_video_inverse, QkaPlan};
pub use qlinalg::{qrank, qsvd, qsvd_thin, qwnn_shrink, shrink_q, QSvd, ShrinkParams};
pub use qten::{load_qten, read_qten, save_qten, write_qten};
pub use quaternion::{qmul, Quaternion};
pub use solver::{
    qtt_srtd, qtt_srtd_observed, Diagnostics, ObservationSet, Solver, SolverConfig, SolverState,
    Weights,
};
pub use tensor::QTensor;
pub use transform::{
    default_mu, lift_classical, ClassicalTransform, Side, TransformKind, TransformSpec,
};
pub use tt::{qtt_rank, tt_svd, QttCores};
