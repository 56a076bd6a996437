//! Seeded random quaternion data.
//!
//! Everything here takes an explicit RNG. The CLI and solver always use
//! `ChaCha8Rng` seeded from a `u64`.

use rand::Rng;

use crate::array::QuaternionArray;
use crate::matrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::tensor::QTensor;

/// Each component drawn uniformly from `[lo, hi)`.
pub fn uniform_quaternion<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    )
}

/// Components uniform on `[-1, 1)`.
pub fn random_qmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| uniform_quaternion(rng, -1.0, 1.0))
}

pub fn random_qtensor<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> QTensor {
    uniform_qtensor(rng, dims, -1.0, 1.0)
}

pub fn uniform_qtensor<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], lo: f64, hi: f64) -> QTensor {
    let mut t = QTensor::zeros(dims);
    for o in 0..t.len() {
        t.put(o, uniform_quaternion(rng, lo, hi));
    }
    t
}

/// Random unit vector in ℍⁿ.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Quaternion> {
    loop {
        let v: Vec<Quaternion> = (0..n).map(|_| uniform_quaternion(rng, -1.0, 1.0)).collect();
        let norm = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|q| q / norm).collect();
        }
    }
}

/// Random unitary quaternion matrix from Gram–Schmidt on a random matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<Quaternion> =
                (0..n).map(|_| uniform_quaternion(rng, -1.0, 1.0)).collect();
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for u in &cols {
                    let coef = u
                        .iter()
                        .zip(&v)
                        .fold(Quaternion::ZERO, |acc, (a, b)| acc + a.conj() * *b);
                    for (x, a) in v.iter_mut().zip(u) {
                        *x -= *a * coef;
                    }
                }
            }
            let norm = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            cols.push(v.into_iter().map(|q| q / norm).collect());
        }
        if ok {
            let mut m = QMatrix::zeros(n, n);
            for (c, v) in cols.iter().enumerate() {
                m.set_column(c, v);
            }
            return m;
        }
    }
}
