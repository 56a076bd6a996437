//! Dense quaternion matrices in column-major, four-plane layout.

use nalgebra::{Complex, DMatrix};

use crate::array::{zero_planes, Planes, QuaternionArray};
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

pub type CMatrix = DMatrix<Complex<f64>>;

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    planes: Planes,
}

impl QuaternionArray for QMatrix {
    fn planes(&self) -> &Planes {
        &self.planes
    }
    fn planes_mut(&mut self) -> &mut Planes {
        &mut self.planes
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            planes: zero_planes(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Quaternion::ONE);
        }
        m
    }

    /// Builds a matrix from four column-major planes.
    pub fn from_planes(rows: usize, cols: usize, planes: Planes) -> Result<Self> {
        let n = rows * cols;
        if planes.iter().any(|p| p.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "planes of a {rows}x{cols} matrix must each hold {n} values"
            )));
        }
        Ok(Self { rows, cols, planes })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Quaternion,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Real matrix embedded in the real plane.
    pub fn from_real(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |r, c| Quaternion::real(f(r, c)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn into_planes(self) -> Planes {
        self.planes
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.at(r + c * self.rows)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        let o = r + c * self.rows;
        self.put(o, q);
    }

    pub fn column(&self, c: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Quaternion]) {
        for (r, &q) in v.iter().enumerate() {
            self.set(r, c, q);
        }
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Quaternion matrix product `self * rhs`; entry products keep the
    /// left factor on the left.
    pub fn matmul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (m, n) = (self.rows, rhs.cols);
        let mut out = Self::zeros(m, n);
        let [a0, a1, a2, a3] = &self.planes;
        for j in 0..n {
            let [c0, c1, c2, c3] = &mut out.planes;
            let (c0, c1, c2, c3) = (
                &mut c0[j * m..(j + 1) * m],
                &mut c1[j * m..(j + 1) * m],
                &mut c2[j * m..(j + 1) * m],
                &mut c3[j * m..(j + 1) * m],
            );
            for p in 0..self.cols {
                let b = rhs.get(p, j);
                if b == Quaternion::ZERO {
                    continue;
                }
                let col = p * m;
                for i in 0..m {
                    let (x0, x1, x2, x3) = (a0[col + i], a1[col + i], a2[col + i], a3[col + i]);
                    c0[i] += x0 * b.q0 - x1 * b.q1 - x2 * b.q2 - x3 * b.q3;
                    c1[i] += x0 * b.q1 + x1 * b.q0 + x2 * b.q3 - x3 * b.q2;
                    c2[i] += x0 * b.q2 - x1 * b.q3 + x2 * b.q0 + x3 * b.q1;
                    c3[i] += x0 * b.q3 + x1 * b.q2 - x2 * b.q1 + x3 * b.q0;
                }
            }
        }
        Ok(out)
    }

    /// Multiplies column `c` by the real scale `s[c]` (i.e. `self * diag(s)`).
    pub fn scale_columns(&self, s: &[f64]) -> Self {
        let mut out = self.clone();
        for (c, &sc) in s.iter().enumerate().take(self.cols) {
            for p in out.planes.iter_mut() {
                p[c * self.rows..(c + 1) * self.rows]
                    .iter_mut()
                    .for_each(|v| *v *= sc);
            }
        }
        out
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        let k = k.min(self.cols);
        let n = k * self.rows;
        let planes = self.planes.clone().map(|mut p| {
            p.truncate(n);
            p
        });
        Self {
            rows: self.rows,
            cols: k,
            planes,
        }
    }

    /// Reinterprets the column-major buffer with a new shape.
    pub fn reshape(self, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != self.rows * self.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot reshape {}x{} into {rows}x{cols}",
                self.rows, self.cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            planes: self.planes,
        })
    }

    /// Cayley–Dickson split `Q = Z1 + Z2 j` with `Z1 = Q0 + Q1 i`, `Z2 = Q2 + Q3 i`.
    pub fn cd_split(&self) -> (CMatrix, CMatrix) {
        let z1 = CMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).cd_split().0);
        let z2 = CMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).cd_split().1);
        (z1, z2)
    }

    pub fn cd_join(z1: &CMatrix, z2: &CMatrix) -> Result<Self> {
        if z1.shape() != z2.shape() {
            return Err(Error::DimensionMismatch(format!(
                "Cayley–Dickson halves have shapes {:?} and {:?}",
                z1.shape(),
                z2.shape()
            )));
        }
        let (rows, cols) = z1.shape();
        Ok(Self::from_fn(rows, cols, |r, c| {
            Quaternion::cd_join(z1[(r, c)], z2[(r, c)])
        }))
    }

    /// Complex adjoint `[[Z1, Z2], [-conj(Z2), conj(Z1)]]` (2M x 2N).
    pub fn complex_adjoint(&self) -> CMatrix {
        let (m, n) = (self.rows, self.cols);
        let (z1, z2) = self.cd_split();
        let mut chi = CMatrix::zeros(2 * m, 2 * n);
        chi.view_mut((0, 0), (m, n)).copy_from(&z1);
        chi.view_mut((0, n), (m, n)).copy_from(&z2);
        chi.view_mut((m, 0), (m, n))
            .copy_from(&z2.map(|z| -z.conj()));
        chi.view_mut((m, n), (m, n))
            .copy_from(&z1.map(|z| z.conj()));
        chi
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.axpy(1.0, other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.axpy(-1.0, other))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }
}
