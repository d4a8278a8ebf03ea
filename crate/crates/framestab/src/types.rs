//! Core matrix types: ambient representatives, quotient points, and PSD points.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tol;

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;
/// Dense real matrix.
pub type RMat = DMatrix<f64>;
/// Dense real vector.
pub type RVec = DVector<f64>;

/// A tall complex matrix `z` with `n >= r >= 1`, the ambient representative
/// of a quotient point `[z]`. Entries are validated finite at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub(crate) inner: CMat,
}

impl ComplexMatrix {
    pub fn new(inner: CMat) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if cols == 0 || rows < cols {
            return Err(Error::BadShape { rows, cols });
        }
        if inner.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { inner })
    }

    /// Builds from row-major complex entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Self::new(CMat::from_fn(rows, cols, |i, j| data[i * cols + j]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(CMat::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn matrix(&self) -> &CMat {
        &self.inner
    }

    pub fn into_matrix(self) -> CMat {
        self.inner
    }

    /// Frobenius norm (Schatten-2).
    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        self.inner.clone().svd(false, false).singular_values.as_slice().to_vec()
    }

    /// `z z^*`, the Gram lift into Sym(C^n).
    pub fn gram_lift(&self) -> CMat {
        &self.inner * self.inner.adjoint()
    }
}

/// An equivalence class representative together with its numerical rank.
#[derive(Debug, Clone)]
pub struct QuotientPoint {
    representative: ComplexMatrix,
    numerical_rank: usize,
    rank_tolerance: f64,
}

impl QuotientPoint {
    pub fn new(representative: ComplexMatrix) -> Self {
        Self::with_tolerance(representative, tol::RANK_TOL)
    }

    pub fn with_tolerance(representative: ComplexMatrix, rank_tolerance: f64) -> Self {
        let numerical_rank = rank_from_singular_values(&representative.singular_values(), rank_tolerance);
        Self {
            representative,
            numerical_rank,
            rank_tolerance,
        }
    }

    pub fn representative(&self) -> &ComplexMatrix {
        &self.representative
    }

    pub fn numerical_rank(&self) -> usize {
        self.numerical_rank
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Two points are equivalent when their alignment distance vanishes.
    pub fn equivalent_to(&self, other: &QuotientPoint, tolerance: f64) -> Result<bool> {
        let d = crate::quotient::distance(
            &self.representative,
            &other.representative,
            crate::quotient::MetricKind::AlignMin,
        )?;
        Ok(d <= tolerance)
    }
}

/// A Hermitian positive semidefinite matrix with its numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdPoint {
    matrix: CMat,
    rank: usize,
}

impl PsdPoint {
    /// Validates Hermitian symmetry and semidefiniteness at the default gate.
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_psd_tol(matrix, tol::PSD_REL)
    }

    /// Validates with a caller-chosen relative PSD tolerance.
    pub fn with_psd_tol(matrix: CMat, psd_rel: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::BadShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !is_hermitian(&matrix, tol::HERMITIAN_REL) {
            return Err(Error::NotHermitian);
        }
        let herm = hermitian_part(&matrix);
        let (eigs, _) = eigh_desc(&herm);
        let lam1 = eigs.first().copied().unwrap_or(0.0).max(0.0);
        let slack = (psd_rel * lam1).max(f64::EPSILON * matrix.norm());
        if eigs.iter().any(|&l| l < -slack) {
            return Err(Error::NotPsd);
        }
        let rank = eigs.iter().filter(|&&l| l > tol::RANK_TOL * lam1).count();
        Ok(Self { matrix, rank })
    }

    pub(crate) fn from_parts(matrix: CMat, rank: usize) -> Self {
        Self { matrix, rank }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: CMat::zeros(n, n),
            rank: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

pub(crate) fn rank_from_singular_values(svals: &[f64], rel_tol: f64) -> usize {
    let s1 = svals.first().copied().unwrap_or(0.0);
    if s1 <= 0.0 {
        return 0;
    }
    svals.iter().filter(|&&s| s > rel_tol * s1).count()
}

pub(crate) fn is_hermitian(m: &CMat, rel_tol: f64) -> bool {
    let scale = m.norm().max(1.0);
    (m - m.adjoint()).norm() <= rel_tol * scale
}

pub(crate) fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian (or real symmetric) matrix with
/// eigenvalues sorted descending and eigenvector columns permuted to match.
pub(crate) fn eigh_desc<T: ComplexField>(m: &DMatrix<T>) -> (Vec<T::RealField>, DMatrix<T>)
where
    T::RealField: PartialOrd + Copy,
{
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigs: Vec<T::RealField> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::<T>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (eigs, vecs)
}

/// QR-based unitarization with the R-diagonal phase fixed positive real,
/// which makes the result unique and deterministic.
pub(crate) fn qr_unitary(m: &CMat) -> CMat {
    let (rows, cols) = m.shape();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols.min(rows) {
        let d = r[(j, j)];
        let a = d.norm();
        if a > 0.0 {
            let phase = d.unscale(a);
            let col = q.column(j) * phase;
            q.set_column(j, &col);
        }
    }
    q
}

/// Extends orthonormal columns `u1` (n x k) to a full unitary, returning the
/// trailing `n - k` columns. Deterministic: QR of `[u1 | I]`.
pub(crate) fn unitary_completion(u1: &CMat) -> CMat {
    let (n, k) = u1.shape();
    if k >= n {
        return CMat::zeros(n, 0);
    }
    let mut wide = CMat::zeros(n, k + n);
    wide.view_mut((0, 0), (n, k)).copy_from(u1);
    wide.view_mut((0, k), (n, n)).copy_from(&CMat::identity(n, n));
    let q = qr_unitary(&wide);
    q.view((0, k), (n, n - k)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wide_and_empty() {
        assert!(ComplexMatrix::new(CMat::zeros(1, 2)).is_err());
        assert!(ComplexMatrix::new(CMat::zeros(0, 0)).is_err());
        assert!(ComplexMatrix::new(CMat::zeros(3, 2)).is_ok());
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMat::zeros(2, 1);
        m[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(ComplexMatrix::new(m), Err(Error::NonFinite)));
    }

    #[test]
    fn psd_point_validates() {
        let mut m = CMat::identity(2, 2);
        assert_eq!(PsdPoint::new(m.clone()).unwrap().rank(), 2);
        m[(0, 0)] = C64::new(-1.0, 0.0);
        assert!(matches!(PsdPoint::new(m), Err(Error::NotPsd)));
        let mut h = CMat::identity(2, 2);
        h[(0, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(PsdPoint::new(h), Err(Error::NotHermitian)));
    }

    #[test]
    fn eigh_desc_sorts() {
        let m = RMat::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 3.0]);
        let (eigs, vecs) = eigh_desc(&m);
        assert!(eigs[0] >= eigs[1]);
        assert!((eigs[0] - 3.0).abs() < 1e-14);
        let recon = &vecs * RMat::from_diagonal(&RVec::from_vec(eigs.clone())) * vecs.transpose();
        assert!((recon - m).norm() < 1e-12);
    }

    #[test]
    fn completion_is_unitary() {
        let u1 = CMat::from_fn(3, 1, |i: usize, _| {
            if i == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let u2 = unitary_completion(&u1);
        assert_eq!(u2.shape(), (3, 2));
        let mut u = CMat::zeros(3, 3);
        u.view_mut((0, 0), (3, 1)).copy_from(&u1);
        u.view_mut((0, 1), (3, 2)).copy_from(&u2);
        assert!((u.adjoint() * &u - CMat::identity(3, 3)).norm() < 1e-12);
    }
}
