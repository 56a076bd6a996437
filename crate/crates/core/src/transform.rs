//! Unitary multi-mode quaternion transforms.
//!
//! A [`TransformSpec`] holds one unitary matrix per mode and maps
//! `X ↦ X ×_1 T_1 ×_2 ... ×_N T_N`. The inverse applies `T_nᴴ` mode by mode,
//! last mode first, so it is exact for any unitary quaternion factors.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};

use crate::array::QuaternionArray;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, QMatrix};
use crate::quaternion::Quaternion;
use crate::tensor::QTensor;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Dct,
    Wht,
    Dft,
    Identity,
    Custom,
}

impl TransformKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Dct => "dct",
            TransformKind::Wht => "wht",
            TransformKind::Dft => "dft",
            TransformKind::Identity => "identity",
            TransformKind::Custom => "custom",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dct" => Ok(TransformKind::Dct),
            "wht" => Ok(TransformKind::Wht),
            "dft" => Ok(TransformKind::Dft),
            "identity" | "id" => Ok(TransformKind::Identity),
            other => Err(Error::InvalidArgument(format!(
                "unknown transform kind {other:?}"
            ))),
        }
    }
}

/// `(i + j + k) / √3`.
pub fn default_mu() -> Quaternion {
    let s = 1.0 / 3f64.sqrt();
    Quaternion::pure(s, s, s)
}

/// Normalizes `(x, y, z)` to a pure unit quaternion.
pub fn pure_unit(x: f64, y: f64, z: f64) -> Result<Quaternion> {
    let n = (x * x + y * y + z * z).sqrt();
    if !n.is_finite() || n == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "axis ({x}, {y}, {z}) cannot be normalized"
        )));
    }
    Ok(Quaternion::pure(x / n, y / n, z / n))
}

fn check_mu(mu: Quaternion) -> Result<()> {
    if !mu.is_finite() || mu.q0.abs() > 1e-12 || (mu.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "mu = {mu} is not a pure unit quaternion"
        )));
    }
    Ok(())
}

/// Orthonormal DCT-II matrix: `T[k][n] = s_k cos(π(2n+1)k / 2I)`.
pub fn dct_matrix(n: usize) -> QMatrix {
    QMatrix::from_real(n, n, |k, j| dct_entry(n, k, j))
}

fn dct_entry(n: usize, k: usize, j: usize) -> f64 {
    let nf = n as f64;
    let s = if k == 0 {
        (1.0 / nf).sqrt()
    } else {
        (2.0 / nf).sqrt()
    };
    s * (std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2.0 * nf)).cos()
}

/// Sylvester-ordered Walsh–Hadamard matrix scaled by `1/√n`.
pub fn wht_matrix(n: usize) -> Result<QMatrix> {
    if !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "wht needs a power-of-two size, got {n}"
        )));
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok(QMatrix::from_real(n, n, |k, j| {
        if (k & j).count_ones() % 2 == 0 {
            s
        } else {
            -s
        }
    }))
}

/// Unitary DFT with the complex unit replaced by `mu`:
/// entries `(cos θ + mu sin θ)/√n`, `θ = −2πkj/n`.
pub fn dft_matrix(n: usize, mu: Quaternion) -> QMatrix {
    let s = 1.0 / (n as f64).sqrt();
    QMatrix::from_fn(n, n, |k, j| {
        let theta = -2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
        (Quaternion::real(theta.cos()) + mu * theta.sin()) * s
    })
}

/// Maximum entry of `|AᴴA − I|`.
pub fn unitary_defect(a: &QMatrix) -> Result<f64> {
    let g = a.hermitian().matmul(a)?;
    let mut worst = 0.0f64;
    for c in 0..g.cols() {
        for r in 0..g.rows() {
            let target = if r == c {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            };
            worst = worst.max((g.get(r, c) - target).norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct TransformSpec {
    mode_mats: Vec<QMatrix>,
    adjoints: Vec<QMatrix>,
    kinds: Vec<TransformKind>,
    mu: Quaternion,
}

impl TransformSpec {
    pub fn new(dims: &[usize], kinds: &[TransformKind], mu: Quaternion) -> Result<Self> {
        check_mu(mu)?;
        if dims.len() != kinds.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dims but {} transform kinds",
                dims.len(),
                kinds.len()
            )));
        }
        let mats = dims
            .iter()
            .zip(kinds)
            .map(|(&n, &kind)| match kind {
                TransformKind::Dct => Ok(dct_matrix(n)),
                TransformKind::Wht => wht_matrix(n),
                TransformKind::Dft => Ok(dft_matrix(n, mu)),
                TransformKind::Identity => Ok(QMatrix::identity(n)),
                TransformKind::Custom => Err(Error::InvalidArgument(
                    "custom transforms are built with TransformSpec::custom".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(mats, kinds.to_vec(), mu))
    }

    /// Same kind on every mode.
    pub fn uniform(dims: &[usize], kind: TransformKind, mu: Quaternion) -> Result<Self> {
        Self::new(dims, &vec![kind; dims.len()], mu)
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self::from_parts(
            dims.iter().map(|&n| QMatrix::identity(n)).collect(),
            vec![TransformKind::Identity; dims.len()],
            default_mu(),
        )
    }

    /// User-supplied square matrices, each checked for unitarity.
    pub fn custom(mats: Vec<QMatrix>, mu: Quaternion) -> Result<Self> {
        check_mu(mu)?;
        for (n, m) in mats.iter().enumerate() {
            if m.rows() != m.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "mode {n} matrix is {:?}, must be square",
                    m.shape()
                )));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite("custom transform matrix"));
            }
            let defect = unitary_defect(m)?;
            if defect > UNITARY_TOL {
                return Err(Error::InvalidArgument(format!(
                    "mode {n} matrix is not unitary (defect {defect:.3e})"
                )));
            }
        }
        let kinds = vec![TransformKind::Custom; mats.len()];
        Ok(Self::from_parts(mats, kinds, mu))
    }

    fn from_parts(mode_mats: Vec<QMatrix>, kinds: Vec<TransformKind>, mu: Quaternion) -> Self {
        let adjoints = mode_mats.iter().map(QMatrix::hermitian).collect();
        Self {
            mode_mats,
            adjoints,
            kinds,
            mu,
        }
    }

    pub fn mode_mats(&self) -> &[QMatrix] {
        &self.mode_mats
    }

    pub fn kinds(&self) -> &[TransformKind] {
        &self.kinds
    }

    pub fn mu(&self) -> Quaternion {
        self.mu
    }

    pub fn dims(&self) -> Vec<usize> {
        self.mode_mats.iter().map(QMatrix::rows).collect()
    }

    fn check_dims(&self, x: &QTensor) -> Result<()> {
        if x.dims() != self.dims().as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "transform built for {:?}, tensor is {:?}",
                self.dims(),
                x.dims()
            )));
        }
        Ok(())
    }

    fn is_identity(&self) -> bool {
        self.kinds.iter().all(|&k| k == TransformKind::Identity)
    }

    pub fn apply(&self, x: &QTensor) -> Result<QTensor> {
        self.check_dims(x)?;
        if self.is_identity() {
            return Ok(x.clone());
        }
        let mut y = x.clone();
        for (n, t) in self.mode_mats.iter().enumerate() {
            if self.kinds[n] != TransformKind::Identity {
                y = y.n_mode_product(t, n)?;
            }
        }
        Ok(y)
    }

    pub fn inverse(&self, x: &QTensor) -> Result<QTensor> {
        self.check_dims(x)?;
        if self.is_identity() {
            return Ok(x.clone());
        }
        let mut y = x.clone();
        for (n, t) in self.adjoints.iter().enumerate().rev() {
            if self.kinds[n] != TransformKind::Identity {
                y = y.n_mode_product(t, n)?;
            }
        }
        Ok(y)
    }
}

/// Classical complex transform applied separably to a matrix: `F_M · C · F_Nᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalTransform {
    Identity,
    Dct,
    Dft,
}

impl ClassicalTransform {
    fn matrix(self, n: usize) -> CMatrix {
        match self {
            ClassicalTransform::Identity => CMatrix::identity(n, n),
            ClassicalTransform::Dct => {
                DMatrix::from_fn(n, n, |k, j| Complex::new(dct_entry(n, k, j), 0.0))
            }
            ClassicalTransform::Dft => {
                let s = 1.0 / (n as f64).sqrt();
                DMatrix::from_fn(n, n, |k, j| {
                    let theta = -2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                    Complex::from_polar(s, theta)
                })
            }
        }
    }

    pub fn apply(self, c: &CMatrix) -> CMatrix {
        let (m, n) = c.shape();
        self.matrix(m) * c * self.matrix(n).transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Transforms both Cayley–Dickson parts of `a = C + D j` with `ct`, rejoins
/// them and multiplies by `mu` on the given side.
pub fn lift_classical(
    ct: ClassicalTransform,
    a: &QMatrix,
    mu: Quaternion,
    side: Side,
) -> Result<QMatrix> {
    check_mu(mu)?;
    let (c, d) = a.cd_split();
    let joined = QMatrix::cd_join(&ct.apply(&c), &ct.apply(&d))?;
    Ok(match side {
        Side::Left => joined.map_entries(|q| mu * q),
        Side::Right => joined.map_entries(|q| q * mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_qmatrix, random_qtensor, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: &QTensor, b: &QTensor) -> f64 {
        a.sub(b).unwrap().fro_norm() / b.fro_norm()
    }

    #[test]
    fn small_matrices() {
        let s = 1.0 / 2f64.sqrt();
        let w = wht_matrix(2).unwrap();
        assert_eq!(w.get(0, 0).q0, s);
        assert_eq!(w.get(0, 1).q0, s);
        assert_eq!(w.get(1, 0).q0, s);
        assert_eq!(w.get(1, 1).q0, -s);

        let d = dct_matrix(2);
        let c = (std::f64::consts::PI / 4.0).cos();
        let s = 0.5f64.sqrt();
        assert!((d.get(0, 0).q0 - s).abs() < 1e-15);
        assert!((d.get(0, 1).q0 - s).abs() < 1e-15);
        assert!((d.get(1, 0).q0 - c).abs() < 1e-15);
        assert!((d.get(1, 1).q0 + c).abs() < 1e-15);

        assert!(wht_matrix(6).is_err());
        for n in [1, 2, 3, 5, 8] {
            assert!(unitary_defect(&dct_matrix(n)).unwrap() < 1e-12);
            assert!(unitary_defect(&dft_matrix(n, default_mu())).unwrap() < 1e-12);
        }
        assert!(unitary_defect(&wht_matrix(16).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn dft_with_i_matches_classical_dft() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 4;
        let f = dft_matrix(n, Quaternion::I);
        for k in 0..n {
            for j in 0..n {
                let z =
                    Complex::from_polar(0.5, -2.0 * std::f64::consts::PI * (k * j) as f64 / 4.0);
                let q = f.get(k, j);
                assert!((q.q0 - z.re).abs() < 1e-15 && (q.q1 - z.im).abs() < 1e-15);
                assert_eq!((q.q2, q.q3), (0.0, 0.0));
            }
        }
        // applied along mode 1, each Cayley–Dickson part gets the classical DFT
        let x = random_qtensor(&mut rng, &[4, 3]);
        let spec = TransformSpec::new(
            &[4, 3],
            &[TransformKind::Dft, TransformKind::Identity],
            Quaternion::I,
        )
        .unwrap();
        let y = spec.apply(&x).unwrap();
        for col in 0..3 {
            for k in 0..n {
                let (mut z1, mut z2) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
                for j in 0..n {
                    let w = Complex::from_polar(
                        0.5,
                        -2.0 * std::f64::consts::PI * (k * j) as f64 / 4.0,
                    );
                    let (a, b) = x.get(&[j, col]).cd_split();
                    z1 += w * a;
                    z2 += w * b;
                }
                let (g1, g2) = y.get(&[k, col]).cd_split();
                assert!((g1 - z1).norm() < 1e-13 && (g2 - z2).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn parseval_and_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dims = [4, 2, 8, 4];
        for kind in [
            TransformKind::Wht,
            TransformKind::Dct,
            TransformKind::Dft,
            TransformKind::Identity,
        ] {
            let spec = TransformSpec::uniform(&dims, kind, default_mu()).unwrap();
            let x = random_qtensor(&mut rng, &dims);
            let y = spec.apply(&x).unwrap();
            assert!(
                (y.fro_norm() - x.fro_norm()).abs() <= 1e-10 * x.fro_norm(),
                "{kind}"
            );
            assert!(rel(&spec.inverse(&y).unwrap(), &x) <= 1e-10, "{kind}");
        }
    }

    #[test]
    fn identity_kind_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_qtensor(&mut rng, &[3, 5, 2]);
        assert_eq!(TransformSpec::identity(&[3, 5, 2]).apply(&x).unwrap(), x);
        let spec =
            TransformSpec::uniform(&[3, 5, 2], TransformKind::Identity, default_mu()).unwrap();
        assert_eq!(spec.inverse(&x).unwrap(), x);
    }

    #[test]
    fn mixed_and_custom_quaternion_factors_invert_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = [3, 4, 5];
        let mats: Vec<QMatrix> = dims.iter().map(|&n| random_unitary(&mut rng, n)).collect();
        let spec = TransformSpec::custom(mats, default_mu()).unwrap();
        let x = random_qtensor(&mut rng, &dims);
        let y = spec.apply(&x).unwrap();
        assert!((y.fro_norm() - x.fro_norm()).abs() <= 1e-10 * x.fro_norm());
        assert!(rel(&spec.inverse(&y).unwrap(), &x) <= 1e-10);

        let mixed = TransformSpec::new(
            &[4, 3, 8],
            &[TransformKind::Dft, TransformKind::Dct, TransformKind::Wht],
            default_mu(),
        )
        .unwrap();
        let x = random_qtensor(&mut rng, &[4, 3, 8]);
        assert!(rel(&mixed.inverse(&mixed.apply(&x).unwrap()).unwrap(), &x) <= 1e-10);
    }

    #[test]
    fn custom_rejects_non_unitary() {
        let m = QMatrix::from_real(2, 2, |r, c| (r + c) as f64);
        assert!(TransformSpec::custom(vec![m], default_mu()).is_err());
        assert!(TransformSpec::custom(vec![QMatrix::zeros(2, 3)], default_mu()).is_err());
    }

    #[test]
    fn rejects_bad_mu_and_dims() {
        assert!(TransformSpec::uniform(&[2, 2], TransformKind::Dft, Quaternion::ONE).is_err());
        assert!(TransformSpec::uniform(
            &[2, 2],
            TransformKind::Dft,
            Quaternion::pure(1.0, 1.0, 0.0)
        )
        .is_err());
        assert!(TransformSpec::uniform(&[4, 3], TransformKind::Wht, default_mu()).is_err());
        let spec = TransformSpec::identity(&[2, 2]);
        assert!(matches!(
            spec.apply(&QTensor::zeros(&[2, 3])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(pure_unit(0.0, 0.0, 0.0).is_err());
        assert_eq!(pure_unit(0.0, 2.0, 0.0).unwrap(), Quaternion::J);
    }

    #[test]
    fn constant_tensor_under_wht_has_one_coefficient() {
        let dims = [4, 2, 8];
        let x = QTensor::constant(&dims, Quaternion::pure(1.0, 2.0, 3.0));
        let y = TransformSpec::uniform(&dims, TransformKind::Wht, default_mu())
            .unwrap()
            .apply(&x)
            .unwrap();
        for o in 1..y.len() {
            assert!(y.at(o).norm() < 1e-12);
        }
        assert!((y.at(0).norm() - x.fro_norm()).abs() < 1e-12);
    }

    #[test]
    fn solver_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = [4, 4, 2];
        let spec = TransformSpec::uniform(&dims, TransformKind::Dft, default_mu()).unwrap();
        let x = random_qtensor(&mut rng, &dims);
        let e = random_qtensor(&mut rng, &dims);
        let lhs = spec.apply(&x).unwrap().sub(&e).unwrap().fro_norm();
        let rhs = x.sub(&spec.inverse(&e).unwrap()).unwrap().fro_norm();
        assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn lifting() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_qmatrix(&mut rng, 4, 3);
        let out =
            lift_classical(ClassicalTransform::Identity, &a, Quaternion::I, Side::Left).unwrap();
        for r in 0..4 {
            for c in 0..3 {
                assert!((out.get(r, c) - Quaternion::I * a.get(r, c)).norm() < 1e-15);
            }
        }

        let real = QMatrix::from_real(4, 3, |r, c| (r * 3 + c) as f64 - 4.0);
        let mu = default_mu();
        let dct2 = dct_matrix(4)
            .matmul(&real)
            .unwrap()
            .matmul(&dct_matrix(3).transpose())
            .unwrap();
        for side in [Side::Left, Side::Right] {
            let out = lift_classical(ClassicalTransform::Dct, &real, mu, side).unwrap();
            for r in 0..4 {
                for c in 0..3 {
                    assert!((out.get(r, c) - mu * dct2.get(r, c).q0).norm() < 1e-12);
                }
            }
        }

        for side in [Side::Left, Side::Right] {
            let out = lift_classical(ClassicalTransform::Dft, &a, mu, side).unwrap();
            assert!((out.fro_norm() - a.fro_norm()).abs() < 1e-12 * a.fro_norm());
        }
        assert!(
            lift_classical(ClassicalTransform::Dft, &a, Quaternion::J * 2.0, Side::Left).is_err()
        );
    }
}
