//! Shared plane-wise behaviour of dense quaternion arrays.
//!
//! [`QMatrix`](crate::QMatrix) and [`QTensor`](crate::QTensor) both store four
//! real component planes of identical length in column-major order. Anything
//! that only looks at entries independently of their position lives here.

use crate::quaternion::Quaternion;

pub type Planes = [Vec<f64>; 4];

pub(crate) fn zero_planes(len: usize) -> Planes {
    [
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
        vec![0.0; len],
    ]
}

pub trait QuaternionArray: Sized + Clone {
    fn planes(&self) -> &Planes;
    fn planes_mut(&mut self) -> &mut Planes;

    fn len(&self) -> usize {
        self.planes()[0].len()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn at(&self, offset: usize) -> Quaternion {
        let p = self.planes();
        Quaternion::new(p[0][offset], p[1][offset], p[2][offset], p[3][offset])
    }

    #[inline]
    fn put(&mut self, offset: usize, q: Quaternion) {
        let p = self.planes_mut();
        p[0][offset] = q.q0;
        p[1][offset] = q.q1;
        p[2][offset] = q.q2;
        p[3][offset] = q.q3;
    }

    fn entries(&self) -> impl Iterator<Item = Quaternion> + '_ {
        (0..self.len()).map(move |o| self.at(o))
    }

    /// `sqrt(sum |x|²)` over all entries.
    fn fro_norm(&self) -> f64 {
        self.planes()
            .iter()
            .flat_map(|p| p.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Sum of entry moduli.
    fn l1_norm(&self) -> f64 {
        self.entries().map(Quaternion::norm).sum()
    }

    fn is_finite(&self) -> bool {
        self.planes()
            .iter()
            .all(|p| p.iter().all(|v| v.is_finite()))
    }

    /// True iff the real plane is identically zero.
    fn is_pure(&self) -> bool {
        self.planes()[0].iter().all(|&v| v == 0.0)
    }

    fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for p in out.planes_mut() {
            p.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// `self + s * other`, entrywise. Shapes must already agree.
    fn axpy(&self, s: f64, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let mut out = self.clone();
        for (dst, src) in out.planes_mut().iter_mut().zip(other.planes()) {
            dst.iter_mut().zip(src).for_each(|(d, x)| *d += s * x);
        }
        out
    }

    fn map_entries(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        let mut out = self.clone();
        for o in 0..self.len() {
            out.put(o, f(self.at(o)));
        }
        out
    }
}
