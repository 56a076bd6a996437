//! Quaternion SVD, rank and the two proximal maps used by the solver.
//!
//! The SVD (computed with faer) goes through the complex adjoint
//! `χ(A) = [[Z1, Z2], [-conj(Z2), conj(Z1)]]` of `A = Z1 + Z2 j`. Every
//! singular value of `A` shows up twice among those of `χ(A)`, and the
//! singular subspaces of `χ(A)` are closed under the antiunitary map
//! `J [r1; r2] = [-conj(r2); conj(r1)]`. A quaternion vector `x = x1 + x2 j`
//! corresponds to the complex vector `[x1; -conj(x2)]` (the first column of
//! `χ(x)`), so picking one vector per `J`-pair recovers quaternion factors.

use faer::{c64, Mat};
use nalgebra::{Complex, DVector};

use crate::array::QuaternionArray;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, QMatrix};
use crate::quaternion::Quaternion;

type CVector = DVector<Complex<f64>>;

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_EPS: f64 = 1e-2;

/// `A = U diag(sigma) Vᴴ`.
#[derive(Clone, Debug)]
pub struct QSvd {
    pub u: QMatrix,
    /// Non-negative, non-increasing, length `min(M, N)`.
    pub sigma: Vec<f64>,
    pub v: QMatrix,
}

impl QSvd {
    pub fn reconstruct(&self) -> QMatrix {
        let k = self.sigma.len();
        let us = self.u.leading_columns(k).scale_columns(&self.sigma);
        us.matmul(&self.v.leading_columns(k).hermitian())
            .expect("factor shapes agree by construction")
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.sigma.iter().sum()
    }
}

/// Full QSVD: `U` is `M x M`, `V` is `N x N`, both unitary.
pub fn qsvd(a: &QMatrix) -> Result<QSvd> {
    qsvd_impl(a, true)
}

/// Economy QSVD: `U` is `M x k`, `V` is `N x k` with `k = min(M, N)`.
pub fn qsvd_thin(a: &QMatrix) -> Result<QSvd> {
    qsvd_impl(a, false)
}

/// Singular values of `A`, non-increasing.
pub fn singular_values(a: &QMatrix) -> Result<Vec<f64>> {
    check_input(a)?;
    let s = to_faer(&a.complex_adjoint())
        .singular_values()
        .map_err(|_| Error::SvdNoConvergence)?;
    Ok(s.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn to_faer(c: &CMatrix) -> Mat<c64> {
    Mat::from_fn(c.nrows(), c.ncols(), |i, j| c[(i, j)])
}

/// Thin complex SVD `c = W diag(s) Zᴴ`, `s` non-increasing.
fn complex_svd(c: &CMatrix) -> Result<(Vec<f64>, CMatrix, CMatrix)> {
    let svd = to_faer(c).thin_svd().map_err(|_| Error::SvdNoConvergence)?;
    let (u, v, d) = (svd.U(), svd.V(), svd.S().column_vector());
    let s = (0..d.nrows()).map(|i| d[i].re).collect();
    let w = CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]);
    let z = CMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]);
    Ok((s, w, z))
}

/// Number of singular values above `tol * sigma_1`; zero for the zero matrix.
pub fn qrank(a: &QMatrix, tol: f64) -> Result<usize> {
    if a.is_empty() {
        return Ok(0);
    }
    let s = singular_values(a)?;
    Ok(rank_of(&s, tol))
}

pub(crate) fn rank_of(sigma: &[f64], tol: f64) -> usize {
    match sigma.first() {
        Some(&s1) if s1 > 0.0 => sigma.iter().filter(|&&s| s > tol * s1).count(),
        _ => 0,
    }
}

fn check_input(a: &QMatrix) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("QSVD of an empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("QSVD input"));
    }
    Ok(())
}

fn qsvd_impl(a: &QMatrix, full: bool) -> Result<QSvd> {
    check_input(a)?;
    let (m, n) = a.shape();
    let k = m.min(n);

    let (s, w, z) = complex_svd(&a.complex_adjoint())?;
    let sigma: Vec<f64> = (0..k).map(|p| 0.5 * (s[2 * p] + s[2 * p + 1])).collect();
    let s_max = sigma.first().copied().unwrap_or(0.0);
    let zero_tol = s_max * (m.max(n) as f64) * f64::EPSILON * 8.0;
    let cluster_tol = s_max * 1e-12;
    let nonzero = sigma.iter().take_while(|&&x| x > zero_tol).count();

    let mut u_vecs: Vec<CVector> = Vec::with_capacity(m);
    let mut v_vecs: Vec<CVector> = Vec::with_capacity(n);

    // Nonzero singular values, grouped into numerically degenerate clusters.
    let mut p0 = 0;
    while p0 < nonzero {
        let mut p1 = p0 + 1;
        while p1 < nonzero && sigma[p1 - 1] - sigma[p1] <= cluster_tol {
            p1 += 1;
        }
        let z_cl: Vec<CVector> = (2 * p0..2 * p1).map(|c| z.column(c).into_owned()).collect();
        let w_cl: Vec<CVector> = (2 * p0..2 * p1).map(|c| w.column(c).into_owned()).collect();
        for _ in p0..p1 {
            let r = pick_orthogonal(&v_vecs, &z_cl);
            // map through the cluster's isometry Z_cl -> W_cl
            let mut u = CVector::zeros(2 * m);
            for (zc, wc) in z_cl.iter().zip(&w_cl) {
                u.axpy(zc.dotc(&r), wc, Complex::new(1.0, 0.0));
            }
            v_vecs.push(r);
            u_vecs.push(u);
        }
        p0 = p1;
    }
    reorthonormalize(&mut u_vecs);

    let u_cols = if full { m } else { k };
    let v_cols = if full { n } else { k };
    let w_rest: Vec<CVector> = (2 * nonzero..s.len())
        .map(|c| w.column(c).into_owned())
        .collect();
    let z_rest: Vec<CVector> = (2 * nonzero..s.len())
        .map(|c| z.column(c).into_owned())
        .collect();
    complete(&mut u_vecs, &w_rest, 2 * m, u_cols);
    complete(&mut v_vecs, &z_rest, 2 * n, v_cols);

    let mut u = QMatrix::zeros(m, u_cols);
    for (c, r) in u_vecs.iter().enumerate() {
        u.set_column(c, &to_quaternion_vector(r));
    }
    let mut v = QMatrix::zeros(n, v_cols);
    for (c, r) in v_vecs.iter().enumerate() {
        v.set_column(c, &to_quaternion_vector(r));
    }
    canonicalize(&mut u, &mut v);
    Ok(QSvd { u, sigma, v })
}

/// `J [r1; r2] = [-conj(r2); conj(r1)]`, the partner column of `χ(x)`.
fn j_partner(r: &CVector) -> CVector {
    let h = r.len() / 2;
    CVector::from_fn(r.len(), |i, _| {
        if i < h {
            -r[i + h].conj()
        } else {
            r[i - h].conj()
        }
    })
}

/// Removes the components along every accepted vector and its `J` partner.
fn project_out(accepted: &[CVector], x: &mut CVector) {
    let one = Complex::new(1.0, 0.0);
    for _ in 0..2 {
        for a in accepted {
            let c = a.dotc(x);
            x.axpy(-c, a, one);
            let ja = j_partner(a);
            let c = ja.dotc(x);
            x.axpy(-c, &ja, one);
        }
    }
}

/// Candidate with the largest component outside the accepted `J`-closed
/// span, projected and normalized.
fn pick_orthogonal(accepted: &[CVector], candidates: &[CVector]) -> CVector {
    let mut best: Option<(f64, CVector)> = None;
    for c in candidates {
        let mut r = c.clone();
        project_out(accepted, &mut r);
        let nr = r.norm();
        if best.as_ref().is_none_or(|(b, _)| nr > *b) {
            best = Some((nr, r));
        }
    }
    let (nr, r) = best.expect("non-empty candidate list");
    r.unscale(nr)
}

/// Quaternion Gram–Schmidt in the complex picture.
fn reorthonormalize(vecs: &mut [CVector]) {
    for i in 0..vecs.len() {
        let (done, rest) = vecs.split_at_mut(i);
        let x = &mut rest[0];
        project_out(done, x);
        let nx = x.norm();
        x.unscale_mut(nx);
    }
}

/// Extends `accepted` to `target` quaternion vectors, drawing first from
/// `preferred` and then from the standard basis of `C^dim`.
fn complete(accepted: &mut Vec<CVector>, preferred: &[CVector], dim: usize, target: usize) {
    if accepted.len() >= target {
        accepted.truncate(target);
        return;
    }
    let mut candidates: Vec<CVector> = preferred.to_vec();
    candidates.extend((0..dim).map(|i| {
        let mut e = CVector::zeros(dim);
        e[i] = Complex::new(1.0, 0.0);
        e
    }));
    while accepted.len() < target {
        // first candidate well outside the span, else the best available
        let mut chosen = None;
        for c in &candidates {
            let mut r = c.clone();
            project_out(accepted, &mut r);
            if r.norm_squared() > 0.5 {
                chosen = Some(r);
                break;
            }
        }
        let r = match chosen {
            Some(r) => {
                let nr = r.norm();
                r.unscale(nr)
            }
            None => pick_orthogonal(accepted, &candidates),
        };
        accepted.push(r);
    }
}

fn to_quaternion_vector(r: &CVector) -> Vec<Quaternion> {
    let h = r.len() / 2;
    (0..h)
        .map(|i| {
            let x1 = r[i];
            let x2 = -r[i + h].conj();
            Quaternion::cd_join(x1, x2)
        })
        .collect()
}

/// Rotates each column pair `(u_c, v_c)` by a common unit quaternion so the
/// first nonzero component of `u_c` is a positive real.
fn canonicalize(u: &mut QMatrix, v: &mut QMatrix) {
    const NONZERO: f64 = 1e-10;
    fn phase(col: &[Quaternion]) -> Option<Quaternion> {
        col.iter()
            .find(|q| q.norm() > NONZERO)
            .map(|a| a.conj() / a.norm())
    }
    fn rotate(m: &mut QMatrix, c: usize, q: Quaternion) {
        let col: Vec<Quaternion> = m.column(c).into_iter().map(|x| x * q).collect();
        m.set_column(c, &col);
    }
    let paired = u.cols().min(v.cols());
    for c in 0..u.cols() {
        if let Some(q) = phase(&u.column(c)) {
            rotate(u, c, q);
            if c < paired {
                rotate(v, c, q);
            }
        }
    }
    for c in paired..v.cols() {
        if let Some(q) = phase(&v.column(c)) {
            rotate(v, c, q);
        }
    }
}

/// Parameters of the weighted-nuclear-norm shrinkage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShrinkParams {
    /// Proximal weight; the solver passes `alpha_k / mu`.
    pub tau: f64,
    /// Compromising constant.
    pub c: f64,
    /// Offset in the weights `C / (sigma + eps)`.
    pub eps: f64,
}

impl ShrinkParams {
    pub fn new(tau: f64, c: f64, eps: f64) -> Result<Self> {
        if !(tau >= 0.0
            && c >= 0.0
            && eps > 0.0
            && tau.is_finite()
            && c.is_finite()
            && eps.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "shrink parameters need tau >= 0, C >= 0, eps > 0 (got {tau}, {c}, {eps})"
            )));
        }
        Ok(Self { tau, c, eps })
    }

    /// Closed-form shrinkage of one singular value:
    /// `0` if `c2 < 0`, else `(c1 + sqrt(c2)) / 2` with `c1 = σ - ε`,
    /// `c2 = (σ + ε)² - 4 τ C`.
    pub fn shrink(&self, sigma: f64) -> f64 {
        let c1 = sigma - self.eps;
        let c2 = (sigma + self.eps).powi(2) - 4.0 * self.tau * self.c;
        if c2 < 0.0 {
            0.0
        } else {
            (0.5 * (c1 + c2.sqrt())).max(0.0)
        }
    }
}

/// Weighted-nuclear-norm proximal map: `U diag(shrink(σ)) Vᴴ`.
pub fn qwnn_shrink(gamma: &QMatrix, p: &ShrinkParams) -> Result<QMatrix> {
    let svd = qsvd_thin(gamma)?;
    let shrunk: Vec<f64> = svd.sigma.iter().map(|&s| p.shrink(s)).collect();
    let r = shrunk.iter().take_while(|&&s| s > 0.0).count();
    if r == 0 {
        return Ok(QMatrix::zeros(gamma.rows(), gamma.cols()));
    }
    let us = svd.u.leading_columns(r).scale_columns(&shrunk[..r]);
    us.matmul(&svd.v.leading_columns(r).hermitian())
}

/// `signQ(x) * max(|x| - gamma, 0)`.
#[inline]
pub fn shrink_q_scalar(x: Quaternion, gamma: f64) -> Quaternion {
    let n = x.norm();
    if n <= gamma {
        Quaternion::ZERO
    } else {
        x * ((n - gamma) / n)
    }
}

/// Entrywise quaternion soft-thresholding.
pub fn shrink_q<T: QuaternionArray>(x: &T, gamma: f64) -> T {
    x.map_entries(|q| shrink_q_scalar(q, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_qmatrix, random_unit_vector, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unitarity_defect(u: &QMatrix) -> f64 {
        let g = u.hermitian().matmul(u).unwrap();
        g.sub(&QMatrix::identity(u.cols())).unwrap().fro_norm()
    }

    fn check_valid(a: &QMatrix, svd: &QSvd) {
        assert!(
            unitarity_defect(&svd.u) < 1e-10,
            "U defect {}",
            unitarity_defect(&svd.u)
        );
        assert!(
            unitarity_defect(&svd.v) < 1e-10,
            "V defect {}",
            unitarity_defect(&svd.v)
        );
        let err = svd.reconstruct().sub(a).unwrap().fro_norm() / a.fro_norm().max(1e-300);
        assert!(err < 1e-10, "reconstruction error {err}");
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.sigma.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn identity() {
        let svd = qsvd(&QMatrix::identity(3)).unwrap();
        for s in &svd.sigma {
            assert!((s - 1.0).abs() < 1e-14);
        }
        check_valid(&QMatrix::identity(3), &svd);
    }

    #[test]
    fn random_shapes_full_and_thin() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, n) in &[(1, 1), (1, 4), (4, 1), (6, 4), (4, 6), (5, 5), (9, 3)] {
            let a = random_qmatrix(&mut rng, m, n);
            let full = qsvd(&a).unwrap();
            assert_eq!(full.u.shape(), (m, m));
            assert_eq!(full.v.shape(), (n, n));
            check_valid(&a, &full);
            let thin = qsvd_thin(&a).unwrap();
            assert_eq!(thin.u.shape(), (m, m.min(n)));
            assert_eq!(thin.v.shape(), (n, m.min(n)));
            check_valid(&a, &thin);
        }
    }

    #[test]
    fn rank_one_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = random_unit_vector(&mut rng, 4);
        let v = random_unit_vector(&mut rng, 3);
        let a = QMatrix::from_fn(4, 3, |i, j| u[i] * v[j].conj());
        let svd = qsvd(&a).unwrap();
        assert!((svd.sigma[0] - 1.0).abs() < 1e-12);
        assert!(svd.sigma[1..].iter().all(|&s| s < 1e-12));
        check_valid(&a, &svd);
        assert_eq!(qrank(&a, 1e-10).unwrap(), 1);
    }

    #[test]
    fn canonical_first_component_is_positive_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_qmatrix(&mut rng, 5, 3);
        let svd = qsvd(&a).unwrap();
        for c in 0..svd.u.cols() {
            let q = svd
                .u
                .column(c)
                .into_iter()
                .find(|q| q.norm() > 1e-10)
                .unwrap();
            assert!(q.q0 > 0.0);
            assert!(q.q1.abs() + q.q2.abs() + q.q3.abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum_from_unitary_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = random_unitary(&mut rng, 5);
        let q = random_unitary(&mut rng, 5);
        let d = [2.0, 2.0, 2.0, 1.0, 0.0];
        let a = p.scale_columns(&d).matmul(&q.hermitian()).unwrap();
        let svd = qsvd(&a).unwrap();
        for (s, e) in svd.sigma.iter().zip(d) {
            assert!((s - e).abs() < 1e-12);
        }
        check_valid(&a, &svd);
    }

    #[test]
    fn qrank_cases() {
        assert_eq!(qrank(&QMatrix::zeros(3, 4), 1e-10).unwrap(), 0);
        assert_eq!(qrank(&QMatrix::identity(4), 1e-10).unwrap(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut a = QMatrix::zeros(5, 5);
        for _ in 0..2 {
            let u = random_unit_vector(&mut rng, 5);
            let v = random_unit_vector(&mut rng, 5);
            a = a
                .add(&QMatrix::from_fn(5, 5, |i, j| u[i] * v[j].conj()))
                .unwrap();
        }
        assert_eq!(qrank(&a, 1e-10).unwrap(), 2);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut a = QMatrix::identity(2);
        a.set(0, 1, Quaternion::real(f64::NAN));
        assert!(matches!(qsvd(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn shrink_closed_form_edges() {
        let p = ShrinkParams::new(3.0, 0.0, 0.01).unwrap();
        for s in [0.0, 0.3, 1.0, 17.5] {
            assert!((p.shrink(s) - s).abs() < 1e-15);
        }
        // c2 = 1.0201 - 4 < 0
        let p = ShrinkParams::new(1.0, 1.0, 0.01).unwrap();
        assert_eq!(p.shrink(1.0), 0.0);
        assert!(ShrinkParams::new(-1.0, 1.0, 0.01).is_err());
        assert!(ShrinkParams::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn qwnn_shrink_with_zero_c_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let g = random_qmatrix(&mut rng, 4, 6);
        let out = qwnn_shrink(&g, &ShrinkParams::new(5.0, 0.0, 0.01).unwrap()).unwrap();
        assert!(out.sub(&g).unwrap().fro_norm() < 1e-12);
    }

    #[test]
    fn qwnn_shrink_is_non_expansive_on_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = random_qmatrix(&mut rng, 5, 4);
        let p = ShrinkParams::new(0.3, 1.0, 0.01).unwrap();
        let before = singular_values(&g).unwrap();
        let after = singular_values(&qwnn_shrink(&g, &p).unwrap()).unwrap();
        for (b, a) in before.iter().zip(&after) {
            assert!(*a <= b + 1e-12 && *a >= 0.0);
            assert!((a - p.shrink(*b)).abs() < 1e-10);
        }
    }

    #[test]
    fn shrink_q_cases() {
        let x = Quaternion::new(0.0, 3.0, 0.0, 0.0);
        assert!((shrink_q_scalar(x, 1.0) - Quaternion::new(0.0, 2.0, 0.0, 0.0)).norm() < 1e-15);
        assert_eq!(shrink_q_scalar(x, 3.0), Quaternion::ZERO);
        assert_eq!(shrink_q_scalar(Quaternion::ZERO, 0.0), Quaternion::ZERO);
        let y = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert!((shrink_q_scalar(y, 0.5) - y * 0.75).norm() < 1e-15);
    }
}
