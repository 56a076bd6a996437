//! Quaternion ket augmentation.
//!
//! A `b^N × b^N` quaternion image becomes an order-N tensor with every dim
//! equal to `c = b²`. Index `i_1` addresses a pixel inside its innermost
//! `b × b` block (row-major: up-left, up-right, down-left, down-right for
//! `b = 2`), `i_2` addresses that block inside the next level, and so on up to
//! `i_N` for the coarsest split. Videos keep the frame index as a final mode.
//!
//! All maps are pure permutations of entries, so values are copied bit-exactly.

use crate::array::{Planes, QuaternionArray};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::tensor::QTensor;

pub const DEFAULT_IMAGE_BASE: usize = 2;
pub const DEFAULT_VIDEO_BASE: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QkaPlan {
    base: usize,
    order: usize,
    frames: Option<usize>,
}

impl QkaPlan {
    /// Plan for a `side × side` image. `order` is inferred from `side` when `None`.
    pub fn image(side: usize, base: usize, order: Option<usize>) -> Result<Self> {
        let order = resolve_order(side, base, order)?;
        Ok(Self {
            base,
            order,
            frames: None,
        })
    }

    /// Plan for a `side × side × frames` video.
    pub fn video(side: usize, frames: usize, base: usize, order: Option<usize>) -> Result<Self> {
        if frames == 0 {
            return Err(Error::InvalidArgument(
                "video needs at least one frame".into(),
            ));
        }
        let order = resolve_order(side, base, order)?;
        Ok(Self {
            base,
            order,
            frames: Some(frames),
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Number of spatial levels N.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn frames(&self) -> Option<usize> {
        self.frames
    }

    pub fn is_video(&self) -> bool {
        self.frames.is_some()
    }

    /// Spatial side length `b^N`.
    pub fn side(&self) -> usize {
        self.base.pow(self.order as u32)
    }

    pub fn source_dims(&self) -> Vec<usize> {
        let s = self.side();
        match self.frames {
            Some(f) => vec![s, s, f],
            None => vec![s, s],
        }
    }

    /// `(c, ..., c)` with a trailing frame count for videos.
    pub fn target_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.base * self.base; self.order];
        dims.extend(self.frames);
        dims
    }

    /// Zero-based multi-index `(i_1, ..., i_N)` of pixel `(r, c)`.
    pub fn multi_index(&self, r: usize, c: usize) -> Vec<usize> {
        let b = self.base;
        let (mut r, mut c) = (r, c);
        (0..self.order)
            .map(|_| {
                let i = (r % b) * b + c % b;
                r /= b;
                c /= b;
                i
            })
            .collect()
    }

    /// Column-major offset in the spatial part of the target tensor.
    pub fn spatial_offset(&self, r: usize, c: usize) -> usize {
        let cc = self.base * self.base;
        self.multi_index(r, c)
            .iter()
            .rev()
            .fold(0, |acc, &i| acc * cc + i)
    }

    /// `perm[src] = dst`, where `src` is a column-major offset in the source
    /// array and `dst` the offset of the same entry in the target tensor.
    pub fn permutation(&self) -> Vec<usize> {
        let s = self.side();
        let frame = s * s;
        let mut spatial = vec![0usize; frame];
        for c in 0..s {
            for r in 0..s {
                spatial[r + s * c] = self.spatial_offset(r, c);
            }
        }
        let frames = self.frames.unwrap_or(1);
        (0..frames)
            .flat_map(|f| spatial.iter().map(move |&o| o + frame * f))
            .collect()
    }

    /// Moves any per-entry data (values, mask flags) from source to target layout.
    pub fn forward_values<T: Copy + Default>(&self, src: &[T]) -> Result<Vec<T>> {
        let perm = self.permutation();
        self.check_len(src.len(), perm.len())?;
        let mut out = vec![T::default(); src.len()];
        for (s, &d) in perm.iter().enumerate() {
            out[d] = src[s];
        }
        Ok(out)
    }

    pub fn inverse_values<T: Copy + Default>(&self, src: &[T]) -> Result<Vec<T>> {
        let perm = self.permutation();
        self.check_len(src.len(), perm.len())?;
        Ok(perm.iter().map(|&d| src[d]).collect())
    }

    fn check_len(&self, got: usize, want: usize) -> Result<()> {
        if got != want {
            return Err(Error::DimensionMismatch(format!(
                "plan for {:?} needs {want} entries, got {got}",
                self.source_dims()
            )));
        }
        Ok(())
    }

    fn forward_planes(&self, planes: &Planes) -> Result<Planes> {
        Ok([
            self.forward_values(&planes[0])?,
            self.forward_values(&planes[1])?,
            self.forward_values(&planes[2])?,
            self.forward_values(&planes[3])?,
        ])
    }

    fn inverse_planes(&self, planes: &Planes) -> Result<Planes> {
        Ok([
            self.inverse_values(&planes[0])?,
            self.inverse_values(&planes[1])?,
            self.inverse_values(&planes[2])?,
            self.inverse_values(&planes[3])?,
        ])
    }
}

fn resolve_order(side: usize, base: usize, order: Option<usize>) -> Result<usize> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!(
            "block factor must be at least 2, got {base}"
        )));
    }
    let mut n = 0usize;
    let mut s = 1usize;
    while s < side {
        s = s
            .checked_mul(base)
            .ok_or_else(|| Error::InvalidArgument("side overflows".into()))?;
        n += 1;
    }
    if s != side || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "side {side} is not a positive power of {base}"
        )));
    }
    match order {
        Some(o) if o != n => Err(Error::InvalidArgument(format!(
            "order {o} does not match side {side} = {base}^{n}"
        ))),
        _ => Ok(n),
    }
}

pub fn qka_forward(g: &QMatrix, plan: &QkaPlan) -> Result<QTensor> {
    if plan.is_video() || g.shape() != (plan.side(), plan.side()) {
        return Err(Error::DimensionMismatch(format!(
            "image is {:?}, plan expects {:?}",
            g.shape(),
            plan.source_dims()
        )));
    }
    QTensor::from_planes(&plan.target_dims(), plan.forward_planes(g.planes())?)
}

pub fn qka_inverse(t: &QTensor, plan: &QkaPlan) -> Result<QMatrix> {
    if plan.is_video() || t.dims() != plan.target_dims().as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "tensor is {:?}, plan expects {:?}",
            t.dims(),
            plan.target_dims()
        )));
    }
    let s = plan.side();
    QMatrix::from_planes(s, s, plan.inverse_planes(t.planes())?)
}

/// `(side, side, F)` video to `(c, ..., c, F)`.
pub fn qka_video_forward(v: &QTensor, plan: &QkaPlan) -> Result<QTensor> {
    if !plan.is_video() || v.dims() != plan.source_dims().as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "video is {:?}, plan expects {:?}",
            v.dims(),
            plan.source_dims()
        )));
    }
    QTensor::from_planes(&plan.target_dims(), plan.forward_planes(v.planes())?)
}

pub fn qka_video_inverse(t: &QTensor, plan: &QkaPlan) -> Result<QTensor> {
    if !plan.is_video() || t.dims() != plan.target_dims().as_slice() {
        return Err(Error::DimensionMismatch(format!(
            "tensor is {:?}, plan expects {:?}",
            t.dims(),
            plan.target_dims()
        )));
    }
    QTensor::from_planes(&plan.source_dims(), plan.inverse_planes(t.planes())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion;
    use crate::random::{random_qmatrix, random_qtensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sorted_entries(p: &Planes) -> Vec<[u64; 4]> {
        let mut v: Vec<[u64; 4]> = (0..p[0].len())
            .map(|o| [0, 1, 2, 3].map(|c| p[c][o].to_bits()))
            .collect();
        v.sort_unstable();
        v
    }

    /// Frobenius norm summed in a canonical order, so it only depends on the multiset.
    fn sorted_norm(p: &Planes) -> f64 {
        let mut sq: Vec<f64> = p.iter().flatten().map(|v| v * v).collect();
        sq.sort_by(f64::total_cmp);
        sq.iter().sum::<f64>().sqrt()
    }

    #[test]
    fn two_by_two_reads_row_major() {
        let [a, b, c, d] = [1.0, 2.0, 3.0, 4.0].map(|v| Quaternion::pure(v, -v, 0.5 * v));
        let mut g = QMatrix::zeros(2, 2);
        g.set(0, 0, a);
        g.set(0, 1, b);
        g.set(1, 0, c);
        g.set(1, 1, d);
        let plan = QkaPlan::image(2, 2, None).unwrap();
        let t = qka_forward(&g, &plan).unwrap();
        assert_eq!(t.dims(), &[4]);
        assert_eq!([t.at(0), t.at(1), t.at(2), t.at(3)], [a, b, c, d]);
    }

    /// Hand enumeration of the two-level addressing of a 4×4 image, one-based
    /// `(row, col) -> (i_2, i_1)`.
    #[test]
    fn four_by_four_addressing() {
        let table = [
            [(1, 1), (1, 2), (2, 1), (2, 2)],
            [(1, 3), (1, 4), (2, 3), (2, 4)],
            [(3, 1), (3, 2), (4, 1), (4, 2)],
            [(3, 3), (3, 4), (4, 3), (4, 4)],
        ];
        let plan = QkaPlan::image(4, 2, Some(2)).unwrap();
        for (r, row) in table.iter().enumerate() {
            for (c, &expected) in row.iter().enumerate() {
                let idx = plan.multi_index(r, c);
                assert_eq!(
                    (idx[1] + 1, idx[0] + 1),
                    expected,
                    "pixel ({}, {})",
                    r + 1,
                    c + 1
                );
            }
        }
        assert_eq!(plan.multi_index(2, 1), vec![1, 2]);

        let g = QMatrix::from_fn(4, 4, |r, c| Quaternion::real((10 * r + c) as f64));
        let t = qka_forward(&g, &plan).unwrap();
        assert_eq!(t.get(&[1, 2]), Quaternion::real(21.0));
    }

    #[test]
    fn roundtrips_are_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (side, base) in [(4, 2), (16, 2), (16, 4), (27, 3)] {
            let plan = QkaPlan::image(side, base, None).unwrap();
            let g = random_qmatrix(&mut rng, side, side);
            let t = qka_forward(&g, &plan).unwrap();
            assert_eq!(sorted_entries(t.planes()), sorted_entries(g.planes()));
            assert_eq!(
                sorted_norm(t.planes()).to_bits(),
                sorted_norm(g.planes()).to_bits()
            );
            assert_eq!(qka_inverse(&t, &plan).unwrap(), g);
        }
        let plan = QkaPlan::video(16, 3, 4, None).unwrap();
        let v = random_qtensor(&mut rng, &[16, 16, 3]);
        let t = qka_video_forward(&v, &plan).unwrap();
        assert_eq!(t.dims(), &[16, 16, 3]);
        assert_eq!(qka_video_inverse(&t, &plan).unwrap(), v);
    }

    #[test]
    fn constant_stays_constant() {
        let q = Quaternion::pure(3.0, 1.0, 2.0);
        let plan = QkaPlan::image(8, 2, None).unwrap();
        let t = QTensor::constant(&plan.target_dims(), q);
        let g = qka_inverse(&t, &plan).unwrap();
        assert!(g.entries().all(|e| e == q));
    }

    #[test]
    fn single_frame_video_is_image_plus_singleton() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_qmatrix(&mut rng, 16, 16);
        let image = qka_forward(&g, &QkaPlan::image(16, 4, None).unwrap()).unwrap();
        let v = QTensor::from_planes(&[16, 16, 1], g.into_planes()).unwrap();
        let video = qka_video_forward(&v, &QkaPlan::video(16, 1, 4, None).unwrap()).unwrap();
        assert_eq!(video.dims(), &[16, 16, 1]);
        assert_eq!(video.planes(), image.planes());
    }

    #[test]
    fn video_shape() {
        let plan = QkaPlan::video(256, 20, 4, None).unwrap();
        assert_eq!(plan.order(), 4);
        assert_eq!(plan.target_dims(), vec![16, 16, 16, 16, 20]);
    }

    #[test]
    fn locality_of_innermost_block() {
        let plan = QkaPlan::image(8, 2, None).unwrap();
        for br in (0..8).step_by(2) {
            for bc in (0..8).step_by(2) {
                let anchor = plan.multi_index(br, bc);
                for (dr, dc) in [(0, 1), (1, 0), (1, 1)] {
                    let other = plan.multi_index(br + dr, bc + dc);
                    assert_ne!(other[0], anchor[0]);
                    assert_eq!(other[1..], anchor[1..]);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(QkaPlan::image(12, 2, None).is_err());
        assert!(QkaPlan::image(1, 2, None).is_err());
        assert!(QkaPlan::image(8, 1, None).is_err());
        assert!(QkaPlan::image(8, 2, Some(2)).is_err());
        assert!(QkaPlan::video(16, 0, 4, None).is_err());
        let plan = QkaPlan::image(4, 2, None).unwrap();
        assert!(qka_forward(&QMatrix::zeros(4, 2), &plan).is_err());
        assert!(qka_inverse(&QTensor::zeros(&[4, 4, 1]), &plan).is_err());
        assert!(qka_video_forward(&QTensor::zeros(&[4, 4, 1]), &plan).is_err());
    }
}
