//! Metrics and embeddings on C^{n x r} modulo right multiplication by U(r).
//!
//! The three alignment distances have closed forms in `||x||_2`, `||y||_2`
//! and the nuclear norm `||x^* y||_1`, so no optimization over U(r) is ever
//! performed; the unitary minimizer itself comes from a polar decomposition.

use crate::error::{Error, Result};
use crate::tol;
use crate::types::{eigh_desc, rank_from_singular_values, C64, CMat, ComplexMatrix, PsdPoint};

/// The quotient distances on C^{n x r} / U(r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// `D(x,y) = min_U ||x - yU||_2`, the Bures-Wasserstein distance after
    /// the Gram embedding.
    AlignMin,
    /// `d(x,y) = min_U ||x - yU||_2 ||x + yU||_2 = D * D'`.
    AlignProduct,
    /// `D'(x,y) = max_U ||x - yU||_2`.
    AlignMax,
}

/// The embeddings of the quotient into PSD matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    /// `pi(x) = x x^*`.
    Pi,
    /// `theta(x) = (x x^*)^{1/2}`.
    Theta,
    /// `psi(x) = ||x||_2 (x x^*)^{1/2}`.
    Psi,
}

fn check_same_shape(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<()> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    Ok(())
}

/// Nuclear norm `||x^* y||_1`, computed from the SVD of the small r x r
/// product rather than any n x n lift.
pub fn nuclear_norm_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    check_same_shape(x, y)?;
    let m = x.matrix().adjoint() * y.matrix();
    Ok(m.svd(false, false).singular_values.iter().sum())
}

/// Closed-form quotient distance. Tiny negative values under the square
/// root are clamped to zero; the exact expressions are nonnegative.
pub fn distance(x: &ComplexMatrix, y: &ComplexMatrix, kind: MetricKind) -> Result<f64> {
    let s = nuclear_norm_product(x, y)?;
    let nx2 = x.norm().powi(2);
    let ny2 = y.norm().powi(2);
    let inner = match kind {
        MetricKind::AlignMin => nx2 + ny2 - 2.0 * s,
        MetricKind::AlignProduct => (nx2 + ny2).powi(2) - 4.0 * s * s,
        MetricKind::AlignMax => nx2 + ny2 + 2.0 * s,
    };
    Ok(inner.max(0.0).sqrt())
}

/// The unitary aligner: `U` with `x^* y U = |x^* y|` PSD. When `x^* y` is
/// rank-deficient the completion is the deterministic `V W^*` from the full
/// SVD, singular vectors taken in descending index order.
pub fn align(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<CMat> {
    check_same_shape(x, y)?;
    let m = x.matrix().adjoint() * y.matrix();
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    Ok(v_t.adjoint() * u.adjoint())
}

/// Embeds a representative into the PSD cone. The result's recorded rank is
/// the numerical rank of `x` itself.
pub fn embed(x: &ComplexMatrix, kind: EmbeddingKind) -> PsdPoint {
    let rank = rank_from_singular_values(&x.singular_values(), tol::RANK_TOL);
    let gram = x.gram_lift();
    let matrix = match kind {
        EmbeddingKind::Pi => gram,
        EmbeddingKind::Theta => hermitian_sqrt(&gram),
        EmbeddingKind::Psi => hermitian_sqrt(&gram).scale(x.norm()),
    };
    PsdPoint::from_parts(matrix, rank)
}

/// PSD square root via Hermitian eigendecomposition. Eigenvalues below the
/// dust floor (negative or relatively tiny) are clamped to zero; the square
/// root would otherwise amplify O(eps) eigensolver noise to O(sqrt(eps)).
pub(crate) fn hermitian_sqrt(m: &CMat) -> CMat {
    let (eigs, vecs) = eigh_desc(m);
    let n = m.nrows();
    let lam1 = eigs.first().copied().unwrap_or(0.0).max(0.0);
    let floor = 1e-14 * lam1;
    let mut out = CMat::zeros(n, n);
    for (i, &lam) in eigs.iter().enumerate() {
        if lam > floor {
            let col = vecs.column(i);
            out += (col * col.adjoint()).scale(lam.sqrt());
        }
    }
    out
}

/// Deterministic factor `z` with `z z^* = A`: top-`r` eigenpairs, descending
/// eigenvalues, each eigenvector's first significantly nonzero entry made
/// real positive, zero-padded columns when rank < r.
pub fn canonical_factor(a: &PsdPoint, r: usize) -> Result<ComplexMatrix> {
    let n = a.dim();
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "factor width {r} out of range for dimension {n}"
        )));
    }
    if a.rank() > r {
        return Err(Error::RankTooHigh {
            rank: a.rank(),
            cols: r,
        });
    }
    let (eigs, vecs) = eigh_desc(a.matrix());
    let lam1 = eigs.first().copied().unwrap_or(0.0).max(0.0);
    let mut z = CMat::zeros(n, r);
    for (i, &lam) in eigs.iter().enumerate().take(r.min(n)) {
        if lam <= tol::RANK_TOL * lam1 || lam <= 0.0 {
            break;
        }
        let mut col = vecs.column(i).into_owned();
        let mut max_abs = 0.0_f64;
        for e in col.iter() {
            max_abs = max_abs.max(e.norm());
        }
        if let Some(first) = col.iter().find(|e| e.norm() > 1e-8 * max_abs).copied() {
            let phase = first.unscale(first.norm());
            col *= phase.conj();
        }
        z.set_column(i, &(col * C64::new(lam.sqrt(), 0.0)));
    }
    ComplexMatrix::new(z)
}

/// Number of singular values above `tol * sigma_1`; zero for the zero matrix.
pub fn numerical_rank(x: &ComplexMatrix, tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank tolerance must lie in (0, 1), got {tol}"
        )));
    }
    Ok(rank_from_singular_values(&x.singular_values(), tol))
}
