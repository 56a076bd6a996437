//! Dense quaternion tensors and their matricizations.
//!
//! Linearization is column-major: entry `(i_1, ..., i_N)` (zero-based) sits at
//! offset `Σ i_n Π_{d<n} I_d`. Mode-n unfolding, canonical unfolding and the
//! n-mode product are all defined against that single convention.

use crate::array::{zero_planes, Planes, QuaternionArray};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::quaternion::Quaternion;

#[derive(Clone, Debug, PartialEq)]
pub struct QTensor {
    dims: Vec<usize>,
    planes: Planes,
}

impl QuaternionArray for QTensor {
    fn planes(&self) -> &Planes {
        &self.planes
    }
    fn planes_mut(&mut self) -> &mut Planes {
        &mut self.planes
    }
}

impl QTensor {
    pub fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Self {
            dims: dims.to_vec(),
            planes: zero_planes(n),
        }
    }

    pub fn from_planes(dims: &[usize], planes: Planes) -> Result<Self> {
        let n: usize = dims.iter().product();
        if planes.iter().any(|p| p.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "planes for dims {dims:?} must each hold {n} values"
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            planes,
        })
    }

    /// Fills every entry from its zero-based multi-index.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> Quaternion) -> Self {
        let mut t = Self::zeros(dims);
        let mut idx = vec![0usize; dims.len()];
        for o in 0..t.len() {
            t.put(o, f(&idx));
            increment(&mut idx, dims);
        }
        t
    }

    pub fn constant(dims: &[usize], q: Quaternion) -> Self {
        Self::from_fn(dims, |_| q)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn into_planes(self) -> Planes {
        self.planes
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut off = 0;
        let mut stride = 1;
        for (&i, &d) in idx.iter().zip(&self.dims) {
            debug_assert!(i < d);
            off += i * stride;
            stride *= d;
        }
        off
    }

    pub fn multi_index(&self, mut offset: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let i = offset % d;
                offset /= d;
                i
            })
            .collect()
    }

    pub fn get(&self, idx: &[usize]) -> Quaternion {
        self.at(self.offset(idx))
    }

    pub fn set(&mut self, idx: &[usize], q: Quaternion) {
        let o = self.offset(idx);
        self.put(o, q);
    }

    /// Same buffer, new dims.
    pub fn reshape(self, dims: &[usize]) -> Result<Self> {
        if dims.iter().product::<usize>() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot reshape {:?} into {dims:?}",
                self.dims
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            planes: self.planes,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(self.axpy(1.0, other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other)?;
        Ok(self.axpy(-1.0, other))
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} and {:?} differ",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::InvalidMode {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// `(Π_{d<mode} I_d, I_mode, Π_{d>mode} I_d)`.
    fn split_at_mode(&self, mode: usize) -> (usize, usize, usize) {
        let left = self.dims[..mode].iter().product();
        let right = self.dims[mode + 1..].iter().product();
        (left, self.dims[mode], right)
    }

    /// Mode-n unfolding (zero-based `mode`): an `I_n x Π_{j≠n} I_j` matrix
    /// whose columns are the mode-n fibers, remaining indices ordered with
    /// the lowest mode fastest.
    pub fn unfold_mode(&self, mode: usize) -> Result<QMatrix> {
        self.check_mode(mode)?;
        let (left, size, right) = self.split_at_mode(mode);
        let mut m = QMatrix::zeros(size, left * right);
        for b in 0..right {
            for i in 0..size {
                for a in 0..left {
                    m.set(i, a + left * b, self.at(a + left * (i + size * b)));
                }
            }
        }
        Ok(m)
    }

    /// Inverse of [`unfold_mode`](Self::unfold_mode).
    pub fn fold_mode(m: &QMatrix, dims: &[usize], mode: usize) -> Result<Self> {
        let mut t = Self::zeros(dims);
        t.check_mode(mode)?;
        let (left, size, right) = t.split_at_mode(mode);
        if m.shape() != (size, left * right) {
            return Err(Error::DimensionMismatch(format!(
                "a {:?} matrix is not a mode-{mode} unfolding of {dims:?}",
                m.shape()
            )));
        }
        for b in 0..right {
            for i in 0..size {
                for a in 0..left {
                    t.put(a + left * (i + size * b), m.get(i, a + left * b));
                }
            }
        }
        Ok(t)
    }

    /// Canonical unfolding splitting the first `split` modes from the rest:
    /// a `(Π_{j<split} I_j) x (Π_{j≥split} I_j)` reshape of the buffer.
    /// `split` must lie in `1..order`.
    pub fn canonical_unfold(&self, split: usize) -> Result<QMatrix> {
        if split == 0 || split >= self.order() {
            return Err(Error::InvalidMode {
                mode: split,
                order: self.order(),
            });
        }
        let rows = self.dims[..split].iter().product();
        let cols = self.dims[split..].iter().product();
        QMatrix::from_planes(rows, cols, self.planes.clone())
    }

    /// Restores a tensor from any canonical unfolding.
    pub fn canonical_fold(m: QMatrix, dims: &[usize]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if m.rows() * m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "a {:?} matrix cannot fold into {dims:?}",
                m.shape()
            )));
        }
        Self::from_planes(dims, m.into_planes())
    }

    /// n-mode product `X ×_mode U` (zero-based `mode`):
    /// `y[.., m, ..] = Σ_i u[m, i] x[.., i, ..]` with `u` on the left.
    pub fn n_mode_product(&self, u: &QMatrix, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let (left, size, right) = self.split_at_mode(mode);
        if u.cols() != size {
            return Err(Error::DimensionMismatch(format!(
                "mode-{mode} product needs {size} columns, matrix is {:?}",
                u.shape()
            )));
        }
        let out_size = u.rows();
        let mut dims = self.dims.clone();
        dims[mode] = out_size;
        let mut out = Self::zeros(&dims);
        for b in 0..right {
            for m in 0..out_size {
                let dst = left * (m + out_size * b);
                for i in 0..size {
                    let w = u.get(m, i);
                    if w == Quaternion::ZERO {
                        continue;
                    }
                    let src = left * (i + size * b);
                    for a in 0..left {
                        let acc = out.at(dst + a) + w * self.at(src + a);
                        out.put(dst + a, acc);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copies the entries selected by `mask` from `src`, keeping the rest.
    pub fn overwrite_masked(&mut self, mask: &[bool], src: &QTensor) {
        debug_assert_eq!(mask.len(), self.len());
        for (p, s) in self.planes.iter_mut().zip(&src.planes) {
            for ((d, &keep), &v) in p.iter_mut().zip(mask).zip(s) {
                if keep {
                    *d = v;
                }
            }
        }
    }

    /// Zeroes every entry whose mask flag is false.
    pub fn project(&self, mask: &[bool]) -> Self {
        let mut out = self.clone();
        for p in out.planes.iter_mut() {
            for (v, &keep) in p.iter_mut().zip(mask) {
                if !keep {
                    *v = 0.0;
                }
            }
        }
        out
    }
}

/// Advances a column-major multi-index (first index fastest).
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for (i, &d) in idx.iter_mut().zip(dims) {
        *i += 1;
        if *i < d {
            return;
        }
        *i = 0;
    }
}
