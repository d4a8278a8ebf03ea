//! Bundles of the submersion `pi(z) = z z^*`, the Bures-Wasserstein metric,
//! explicit geodesics, and stratification diagnostics on low-rank PSD cones.

use crate::error::{Error, Result};
use crate::exec;
use crate::quotient::{align, canonical_factor};
use crate::tol;
use crate::types::{eigh_desc, is_hermitian, C64, CMat, ComplexMatrix, PsdPoint};

/// Result of reducing a rank-k representative `z in C^{n x r}` to a full
/// column rank `zhat in C^{n x k}` with `[zhat | 0] U = z`.
#[derive(Debug, Clone)]
pub struct HatReduction {
    /// `zhat`, full column rank.
    pub zhat: ComplexMatrix,
    /// The right unitary `U` (r x r) with `[zhat | 0] U = z`.
    pub rotation: CMat,
    /// Numerical rank `k`.
    pub rank: usize,
    /// Orthonormal basis of `Ran(z)` (n x k), left singular vectors.
    pub range_basis: CMat,
    /// Nonzero singular values, descending.
    pub singular_values: Vec<f64>,
}

/// Drops the zero singular directions of `z`, following the `[zhat | 0] U`
/// convention: `zhat = W_k Sigma_k`, `U = V^*` from the SVD `z = W Sigma V^*`.
pub fn hat_reduce(z: &ComplexMatrix, rank_tol: f64) -> Result<HatReduction> {
    let svd = z.matrix().clone().svd(true, true);
    let svals = svd.singular_values.as_slice();
    let s1 = svals.first().copied().unwrap_or(0.0);
    let k = if s1 > 0.0 {
        svals.iter().filter(|&&s| s > rank_tol * s1).count()
    } else {
        0
    };
    if k == 0 {
        return Err(Error::ZeroMatrix);
    }
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let range_basis = u.columns(0, k).into_owned();
    let mut zhat = range_basis.clone();
    for (j, col_scale) in svals.iter().take(k).enumerate() {
        let col = zhat.column(j) * C64::new(*col_scale, 0.0);
        zhat.set_column(j, &col);
    }
    Ok(HatReduction {
        zhat: ComplexMatrix::new(zhat)?,
        rotation: v_t,
        rank: k,
        range_basis,
        singular_values: svals.iter().take(k).copied().collect(),
    })
}

/// `Dpi(z)(w) = z w^* + w z^*`, the differential of the Gram embedding.
pub fn dpi(z: &CMat, w: &CMat) -> CMat {
    let m = z * w.adjoint();
    &m + m.adjoint()
}

/// Orthogonal projectors onto the vertical space `{zK : K^* = -K}`, the
/// horizontal space, and the off-range block `Gamma_z` at a base point.
///
/// The three spaces orthogonally decompose the ambient C^{n x r};
/// `Gamma_z = {0}` exactly when `z` has full column rank.
#[derive(Debug, Clone)]
pub struct SubspaceProjectors {
    z: CMat,
    /// Eigenvectors of the Gram matrix `z^* z` (r x r).
    gram_vecs: CMat,
    /// Eigenvalues of `z^* z`, descending.
    gram_vals: Vec<f64>,
    /// Gram eigenvalues at or below this count as kernel directions.
    gram_cut: f64,
    p_ran: CMat,
    p_ker: CMat,
}

/// Builds the projectors; fails on the zero matrix.
pub fn subspace_projectors(z: &ComplexMatrix) -> Result<SubspaceProjectors> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let zm = z.matrix().clone();
    let svd = zm.clone().svd(true, false);
    let svals = svd.singular_values.as_slice();
    let s1 = svals[0];
    let k = svals.iter().filter(|&&s| s > tol::RANK_TOL * s1).count();
    let u = svd.u.expect("svd with u");
    let uk = u.columns(0, k);
    let p_ran = uk * uk.adjoint();

    let gram = zm.adjoint() * &zm;
    let (gram_vals, gram_vecs) = eigh_desc(&gram);
    // Same rank gate as the singular-value count: sigma > tol * sigma_1.
    let gram_cut = (tol::RANK_TOL * s1).powi(2);
    let r = zm.ncols();
    let mut p_ker = CMat::zeros(r, r);
    for (i, &lam) in gram_vals.iter().enumerate() {
        if lam <= gram_cut {
            let col = gram_vecs.column(i);
            p_ker += col * col.adjoint();
        }
    }
    Ok(SubspaceProjectors {
        z: zm,
        gram_vecs,
        gram_vals,
        gram_cut,
        p_ran,
        p_ker,
    })
}

impl SubspaceProjectors {
    /// Projects onto `V = {zK : K skew}` by solving the normal equation
    /// `G K + K G = z^* w - w^* z` (with `G = z^* z`) in the eigenbasis of G.
    pub fn vertical(&self, w: &CMat) -> CMat {
        let rhs = self.z.adjoint() * w - w.adjoint() * &self.z;
        let rhs_e = self.gram_vecs.adjoint() * rhs * &self.gram_vecs;
        let r = rhs_e.nrows();
        let mut k_e = CMat::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                let denom = self.gram_vals[a] + self.gram_vals[b];
                if denom > self.gram_cut {
                    k_e[(a, b)] = rhs_e[(a, b)].unscale(denom);
                }
            }
        }
        let k = &self.gram_vecs * k_e * self.gram_vecs.adjoint();
        &self.z * k
    }

    /// Projects onto `Gamma_z = {y : P_Ran(z) y = 0, y P_ker(z) = y}`.
    pub fn gamma(&self, w: &CMat) -> CMat {
        let n = self.p_ran.nrows();
        let left = CMat::identity(n, n) - &self.p_ran;
        left * w * &self.p_ker
    }

    /// Projects onto the horizontal space, the orthogonal complement of
    /// `V + Gamma` in C^{n x r}.
    pub fn horizontal(&self, w: &CMat) -> CMat {
        w - self.vertical(w) - self.gamma(w)
    }

    pub fn range_projector(&self) -> &CMat {
        &self.p_ran
    }

    pub fn kernel_projector(&self) -> &CMat {
        &self.p_ker
    }
}

/// A Hermitian tangent matrix at a full-column-rank base, split into its
/// range block and off-range block.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: ComplexMatrix,
    w: CMat,
    z_par: CMat,
    z_perp: CMat,
}

impl TangentVector {
    /// Validates tangent-space membership: `P_perp W P_perp = 0` within
    /// tolerance, W Hermitian, base full column rank.
    pub fn new(base: &ComplexMatrix, w: CMat) -> Result<Self> {
        let n = base.rows();
        if w.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "tangent matrix is {}x{}, base lives in C^{}",
                w.nrows(),
                w.ncols(),
                n
            )));
        }
        if !is_hermitian(&w, tol::TANGENT_MEMBERSHIP_REL.max(tol::HERMITIAN_LOAD_REL)) {
            return Err(Error::NotHermitian);
        }
        let svals = base.singular_values();
        let s1 = svals.first().copied().unwrap_or(0.0);
        if s1 == 0.0 || svals.iter().any(|&s| s <= tol::RANK_TOL * s1) {
            return Err(Error::RankDeficient);
        }
        let svd = base.matrix().clone().svd(true, false);
        let u = svd.u.expect("svd with u");
        let p = &u * u.adjoint();
        let p_perp = CMat::identity(n, n) - &p;
        let off = &p_perp * &w * &p_perp;
        if off.norm() > tol::TANGENT_MEMBERSHIP_REL * w.norm().max(1.0) {
            return Err(Error::InvalidParameter(
                "matrix is not tangent at the base point (off-range block is nonzero)".into(),
            ));
        }
        let z_par = &p * &w * &p;
        let z_perp = &p_perp * &w * &p;
        Ok(Self {
            base: base.clone(),
            w,
            z_par,
            z_perp,
        })
    }

    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    pub fn matrix(&self) -> &CMat {
        &self.w
    }

    pub fn range_block(&self) -> &CMat {
        &self.z_par
    }

    pub fn off_range_block(&self) -> &CMat {
        &self.z_perp
    }
}

/// Solves `z z^* H + H z z^* = W1` for range-supported Hermitian `W1`, in
/// the eigenbasis of `z z^*`: `H_ab = (W1)_ab / (lambda_a + lambda_b)` over
/// the range eigenpairs, zero elsewhere. Equals the decay integral
/// `int_0^inf exp(-t z z^*) W1 exp(-t z z^*) dt`.
pub fn sylvester_range_solve(z: &ComplexMatrix, w1: &CMat) -> Result<CMat> {
    let n = z.rows();
    if w1.shape() != (n, n) {
        return Err(Error::ShapeMismatch(format!(
            "right-hand side is {}x{}, expected {n}x{n}",
            w1.nrows(),
            w1.ncols()
        )));
    }
    let red = hat_reduce(z, tol::RANK_TOL)?;
    let u = &red.range_basis;
    let p = u * u.adjoint();
    let supported = &p * w1 * &p;
    if (w1 - &supported).norm() > tol::TANGENT_MEMBERSHIP_REL * w1.norm().max(1.0) {
        return Err(Error::InvalidParameter(
            "right-hand side is not range-supported".into(),
        ));
    }
    let w1_e = u.adjoint() * w1 * u;
    let k = red.rank;
    let mut h_e = CMat::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let denom = red.singular_values[a].powi(2) + red.singular_values[b].powi(2);
            h_e[(a, b)] = w1_e[(a, b)].unscale(denom);
        }
    }
    Ok(u * h_e * u.adjoint())
}

/// The Bures-Wasserstein submersion metric
/// `h(Z1, Z2) = (1/2) tr(Z2_par H1) + Re tr(Z1_perp^* Z2_perp (z z^*)^+)`,
/// where `H1` solves the range-restricted Sylvester equation for `Z1_par`.
///
/// The 1/2 on the parallel term is forced by the submersion property: with
/// `Z_i = Dpi(z)(H_i z + X_i)` one has `tr(Z2_par H1) = 2 tr(z^* H1 H2 z)`,
/// so the unhalved expression would double-count horizontal range
/// directions and `Dpi` would not be isometric.
pub fn bw_metric(z: &ComplexMatrix, z1: &TangentVector, z2: &TangentVector) -> Result<f64> {
    for t in [z1, z2] {
        let gap = (t.base().matrix() - z.matrix()).norm();
        if gap > 1e-8 * z.norm().max(1.0) {
            return Err(Error::InvalidParameter(
                "tangent vectors are not based at the given point".into(),
            ));
        }
    }
    let red = hat_reduce(z, tol::RANK_TOL)?;
    if red.rank < z.cols() {
        return Err(Error::RankDeficient);
    }
    let h1 = sylvester_range_solve(z, z1.range_block())?;
    let first = 0.5 * (z2.range_block() * h1).trace().re;
    // (z z^*)^+ in the range basis.
    let u = &red.range_basis;
    let mut inv = CMat::zeros(red.rank, red.rank);
    for (i, s) in red.singular_values.iter().enumerate() {
        inv[(i, i)] = C64::new(1.0 / (s * s), 0.0);
    }
    let pinv = u * inv * u.adjoint();
    let second = (z1.off_range_block().adjoint() * z2.off_range_block() * pinv)
        .trace()
        .re;
    Ok(first + second)
}

/// A sampled geodesic between two PSD points.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    /// Factor of the start point.
    pub x: ComplexMatrix,
    /// Factor of the end point.
    pub y: ComplexMatrix,
    /// The aligner `U` from `align(x, y)`.
    pub aligner: CMat,
    /// `(t, gamma(t))` samples.
    pub samples: Vec<(f64, PsdPoint)>,
}

/// `gamma(t) = (1-t)^2 x x^* + t^2 y y^* + t(1-t)(x U^* y^* + y U x^*)`
/// with `x`, `y` canonical factors and `U` the polar aligner. Sampling over
/// `ts` is data-parallel.
pub fn geodesic(a: &PsdPoint, b: &PsdPoint, ts: &[f64]) -> Result<GeodesicPath> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!(
            "endpoints have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if ts.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
        return Err(Error::InvalidParameter("samples must lie in [0, 1]".into()));
    }
    let r = a.rank().max(b.rank()).max(1);
    let x = canonical_factor(a, r)?;
    let y = canonical_factor(b, r)?;
    let aligner = align(&x, &y)?;
    let xx = x.gram_lift();
    let yy = y.gram_lift();
    // x U^* y^*: a non-symmetric square root of (x x^*)(y y^*).
    let cross = x.matrix() * aligner.adjoint() * y.matrix().adjoint();
    let cross_h = &cross + cross.adjoint();
    let samples: Vec<(f64, PsdPoint)> = exec::map_indexed(ts.len(), |i| {
        let t = ts[i];
        let m = xx.scale((1.0 - t) * (1.0 - t)) + yy.scale(t * t) + cross_h.scale(t * (1.0 - t));
        PsdPoint::with_psd_tol(m, tol::PATH_PSD_REL).map(|p| (t, p))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(GeodesicPath {
        x,
        y,
        aligner,
        samples,
    })
}

/// Diagnostics for geodesics of rank-p endpoints converging to rank-q ones.
#[derive(Debug, Clone)]
pub struct StratificationReport {
    /// Max-over-t Frobenius gap to the direct geodesic, one entry per
    /// sequence index.
    pub gaps: Vec<f64>,
    /// Gap of the final sequence entry.
    pub last_gap: f64,
    /// Gap of the extrapolated limit curve (assumes successive entries
    /// roughly halve the error, as with geometrically growing indices).
    pub extrapolated_gap: f64,
    /// Numerical rank of the extrapolated curve at each sample.
    pub limit_ranks: Vec<usize>,
    /// The rank the limit should have.
    pub expected_rank: usize,
    /// True when every interior sample of the extrapolated curve has the
    /// expected rank.
    pub interior_rank_ok: bool,
}

/// Compares the pointwise limit of rank-p geodesics against the direct
/// rank-q geodesic of the limit endpoints.
pub fn stratification_limit_check(
    a_seq: &[PsdPoint],
    b_seq: &[PsdPoint],
    a: &PsdPoint,
    b: &PsdPoint,
    ts: &[f64],
) -> Result<StratificationReport> {
    if a_seq.len() != b_seq.len() || a_seq.is_empty() {
        return Err(Error::InvalidParameter(
            "endpoint sequences must be nonempty and of equal length".into(),
        ));
    }
    let direct = geodesic(a, b, ts)?;
    let paths: Vec<GeodesicPath> = a_seq
        .iter()
        .zip(b_seq)
        .map(|(ai, bi)| geodesic(ai, bi, ts))
        .collect::<Result<_>>()?;
    let gap_of = |path: &GeodesicPath| -> f64 {
        path.samples
            .iter()
            .zip(&direct.samples)
            .map(|((_, p), (_, q))| (p.matrix() - q.matrix()).norm())
            .fold(0.0, f64::max)
    };
    let gaps: Vec<f64> = paths.iter().map(gap_of).collect();
    let last_gap = *gaps.last().expect("nonempty");

    // Pointwise extrapolation 2*gamma_last - gamma_prev kills the leading
    // error term of a sequence whose index doubles step to step.
    let last = &paths[paths.len() - 1];
    let prev = paths.len().checked_sub(2).map(|i| &paths[i]);
    let mut extrapolated_gap = 0.0_f64;
    let mut limit_ranks = Vec::with_capacity(ts.len());
    for (i, (_, direct_pt)) in direct.samples.iter().enumerate() {
        let last_m = last.samples[i].1.matrix();
        let lim = match prev {
            Some(p) => last_m.scale(2.0) - p.samples[i].1.matrix(),
            None => last_m.clone(),
        };
        extrapolated_gap = extrapolated_gap.max((&lim - direct_pt.matrix()).norm());
        let (eigs, _) = eigh_desc(&lim);
        let scale = eigs.iter().fold(0.0_f64, |m, &l| m.max(l.abs()));
        let rank = if scale > 0.0 {
            eigs.iter().filter(|&&l| l.abs() > tol::LIMIT_RANK_TOL * scale).count()
        } else {
            0
        };
        limit_ranks.push(rank);
    }
    let expected_rank = a.rank().max(b.rank());
    let interior_rank_ok = ts
        .iter()
        .zip(&limit_ranks)
        .filter(|(&t, _)| t > 0.0 && t < 1.0)
        .all(|(_, &rk)| rk == expected_rank);
    Ok(StratificationReport {
        gaps,
        last_gap,
        extrapolated_gap,
        limit_ranks,
        expected_rank,
        interior_rank_ok,
    })
}
