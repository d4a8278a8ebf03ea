//! The quadratic forms behind the local Lipschitz bounds of the alpha and
//! beta analysis maps, and pointwise/global upper-bound evaluations.
//!
//! Every bound is an ordered eigenvalue of a real symmetric matrix:
//!
//! * `Q_z` (dimension `2nk - k^2`): `a(z)` is its smallest eigenvalue and
//!   `lambda_1` its largest.
//! * `Qhat_z` (dimension `2nk`): `ahat(z)` is the eigenvalue of index
//!   `2nk - k^2` counting from the top; the trailing `k^2` eigenvalues form
//!   a structural null space.
//! * `That_z + Rhat_z` and `That_z`: same index convention, giving the
//!   alpha-map bounds.
//!
//! `Q_z` here carries a sqrt(2) weight on its off-range block so that the
//! coordinate parametrization of the tangent space is isometric; see
//! [`assemble_qz`]. The unweighted outer-product matrix is also available.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exec;
use crate::frame::{beta_value, HermitianFrame};
use crate::realify::{j_block, mu, tau};
use crate::search::SearchConfig;
use crate::tangent::hat_reduce;
use crate::tol;
use crate::types::{eigh_desc, hermitian_part, C64, CMat, ComplexMatrix, RMat, RVec};

/// Which quadratic form a matrix realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadFormKind {
    Qz,
    Qhat,
    That,
    Rhat,
    ThatPlusRhat,
}

/// A real symmetric form with its eigenvalue-index contract (descending;
/// `lambda_1` is the largest).
#[derive(Debug, Clone)]
pub struct QuadForm {
    matrix: RMat,
    kind: QuadFormKind,
    base_rank: usize,
    dim_n: usize,
    members: usize,
}

impl QuadForm {
    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn kind(&self) -> QuadFormKind {
        self.kind
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (eigs, _) = eigh_desc(&self.matrix);
        eigs
    }

    /// `lambda_index` in the descending convention (1-based).
    pub fn lambda(&self, index: usize) -> f64 {
        let eigs = self.eigenvalues();
        assert!(
            index >= 1 && index <= eigs.len(),
            "eigenvalue index {index} out of range 1..={}",
            eigs.len()
        );
        eigs[index - 1]
    }

}

/// Sums `That + Rhat` into the combined alpha form.
pub fn combine_alpha_forms(that: &QuadForm, rhat: &QuadForm) -> QuadForm {
    QuadForm {
        matrix: &that.matrix + &rhat.matrix,
        kind: QuadFormKind::ThatPlusRhat,
        base_rank: that.base_rank,
        dim_n: that.dim_n,
        members: that.members,
    }
}

fn check_unitary_blocks(u1: &CMat, u2: &CMat) -> Result<(usize, usize)> {
    let n = u1.nrows();
    let k = u1.ncols();
    if u2.nrows() != n || u2.ncols() != n - k {
        return Err(Error::ShapeMismatch(format!(
            "blocks {}x{} and {}x{} do not tile a unitary",
            u1.nrows(),
            u1.ncols(),
            u2.nrows(),
            u2.ncols()
        )));
    }
    let mut u = CMat::zeros(n, n);
    u.view_mut((0, 0), (n, k)).copy_from(u1);
    u.view_mut((0, k), (n, n - k)).copy_from(u2);
    let defect = (u.adjoint() * &u - CMat::identity(n, n)).norm();
    if defect > tol::UNITARY_TOL * (n as f64).sqrt() {
        return Err(Error::NotUnitary);
    }
    Ok((n, k))
}

fn qz_rows(
    frame: &HermitianFrame,
    u1: &CMat,
    u2: &CMat,
    mu_weight: f64,
) -> Result<(usize, Vec<RVec>)> {
    let (_, k) = check_unitary_blocks(u1, u2)?;
    let n = frame.dim_n();
    if u1.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "frame acts on C^{n}, blocks live in C^{}",
            u1.nrows()
        )));
    }
    let dim = 2 * n * k - k * k;
    let mut rows = Vec::with_capacity(frame.len());
    for a in frame.members() {
        let h = hermitian_part(&(u1.adjoint() * a * u1));
        let c = u2.adjoint() * a * u1;
        let th = tau(&h)?;
        let mc = mu(&c);
        let mut v = RVec::zeros(dim);
        v.rows_mut(0, k * k).copy_from(&th);
        if dim > k * k {
            v.rows_mut(k * k, dim - k * k).copy_from(&(mc * mu_weight));
        }
        rows.push(v);
    }
    Ok((k, rows))
}

fn outer_sum(dim: usize, rows: &[RVec]) -> RMat {
    let mut q = RMat::zeros(dim, dim);
    for v in rows {
        q.ger(1.0, v, v, 1.0);
    }
    q
}

/// `Q_z = sum_j v_j v_j^T` with `v_j = [tau(U1^* A_j U1); sqrt2 mu(U2^* A_j U1)]`.
///
/// The sqrt(2) weight on the mu block makes `v^T Q v` equal to
/// `sum_j <W, A_j>^2` for the unit-isometric tangent parametrization
/// `W = U1 A U1^* + (1/sqrt2)(U2 C U1^* + U1 C^* U2^*)`; without it the
/// off-range block of the coordinate vector under-counts the tangent norm.
pub fn assemble_qz(frame: &HermitianFrame, u1: &CMat, u2: &CMat) -> Result<QuadForm> {
    let (k, rows) = qz_rows(frame, u1, u2, std::f64::consts::SQRT_2)?;
    let n = frame.dim_n();
    let dim = 2 * n * k - k * k;
    Ok(QuadForm {
        matrix: outer_sum(dim, &rows),
        kind: QuadFormKind::Qz,
        base_rank: k,
        dim_n: n,
        members: frame.len(),
    })
}

/// The plain outer-product matrix `sum_j [tau; mu][tau; mu]^T`, without the
/// isometric weight. Kept for comparison against the raw definition.
pub fn assemble_qz_unweighted(frame: &HermitianFrame, u1: &CMat, u2: &CMat) -> Result<QuadForm> {
    let (k, rows) = qz_rows(frame, u1, u2, 1.0)?;
    let n = frame.dim_n();
    let dim = 2 * n * k - k * k;
    Ok(QuadForm {
        matrix: outer_sum(dim, &rows),
        kind: QuadFormKind::Qz,
        base_rank: k,
        dim_n: n,
        members: frame.len(),
    })
}

/// Coordinate rows of `Q_z`, exposed for rank tests on frames.
pub fn qz_coordinate_rows(frame: &HermitianFrame, u1: &CMat, u2: &CMat) -> Result<RMat> {
    let (k, rows) = qz_rows(frame, u1, u2, std::f64::consts::SQRT_2)?;
    let n = frame.dim_n();
    let dim = 2 * n * k - k * k;
    let mut m = RMat::zeros(rows.len(), dim);
    for (j, v) in rows.iter().enumerate() {
        m.row_mut(j).copy_from(&v.transpose());
    }
    Ok(m)
}

/// The lifted realifications `F_j = I_k (x) j(A_j)` for a frame.
pub fn lifted_members(frame: &HermitianFrame, k: usize) -> Vec<RMat> {
    let eye = RMat::identity(k, k);
    frame
        .members()
        .iter()
        .map(|a| eye.kronecker(&j_block(a)))
        .collect()
}

fn require_full_rank(zhat: &ComplexMatrix) -> Result<()> {
    let svals = zhat.singular_values();
    let s1 = svals.first().copied().unwrap_or(0.0);
    if s1 == 0.0 || svals.iter().any(|&s| s <= tol::RANK_TOL * s1) {
        return Err(Error::RankDeficient);
    }
    Ok(())
}

/// `Qhat_z = 4 sum_j F_j mu(zhat) mu(zhat)^T F_j`, with null space containing
/// the k^2-dimensional image of the vertical space.
pub fn assemble_qhat(frame: &HermitianFrame, zhat: &ComplexMatrix) -> Result<QuadForm> {
    require_full_rank(zhat)?;
    let n = frame.dim_n();
    if zhat.rows() != n {
        return Err(Error::ShapeMismatch(format!(
            "point has {} rows, frame acts on C^{n}",
            zhat.rows()
        )));
    }
    let k = zhat.cols();
    let z = mu(zhat.matrix());
    let lifted = lifted_members(frame, k);
    let rows: Vec<RVec> = lifted.iter().map(|f| (f * &z).scale(2.0)).collect();
    Ok(QuadForm {
        matrix: outer_sum(2 * n * k, &rows),
        kind: QuadFormKind::Qhat,
        base_rank: k,
        dim_n: n,
        members: frame.len(),
    })
}

/// The index split at `z`: members with `beta_j(z)` at or below the relative
/// gate are the vanishing set `I_0(z)`.
pub fn alpha_index_split(frame: &HermitianFrame, zhat: &ComplexMatrix) -> (Vec<usize>, Vec<usize>, f64) {
    let betas: Vec<f64> = frame
        .members()
        .iter()
        .map(|a| beta_value(a, zhat.matrix()))
        .collect();
    let max_beta = betas.iter().fold(0.0_f64, |m, &b| m.max(b));
    let eps = tol::SPLIT_EPS_FACTOR * (max_beta + 1.0);
    let mut active = Vec::new();
    let mut vanishing = Vec::new();
    for (j, &b) in betas.iter().enumerate() {
        if b <= eps {
            vanishing.push(j);
        } else {
            active.push(j);
        }
    }
    (active, vanishing, eps)
}

/// `That = sum_{j in I(z)} F_j Z Z^T F_j / (Z^T F_j Z)` and
/// `Rhat = sum_{j in I_0(z)} F_j`; requires a PSD frame and full-rank `zhat`.
pub fn assemble_alpha_forms(
    frame: &HermitianFrame,
    zhat: &ComplexMatrix,
) -> Result<(QuadForm, QuadForm)> {
    if !frame.is_psd() {
        return Err(Error::FrameNotPsd);
    }
    require_full_rank(zhat)?;
    let n = frame.dim_n();
    if zhat.rows() != n {
        return Err(Error::ShapeMismatch(format!(
            "point has {} rows, frame acts on C^{n}",
            zhat.rows()
        )));
    }
    let k = zhat.cols();
    let dim = 2 * n * k;
    let z = mu(zhat.matrix());
    let lifted = lifted_members(frame, k);
    let (active, vanishing, _) = alpha_index_split(frame, zhat);
    let mut that = RMat::zeros(dim, dim);
    for &j in &active {
        let fz = &lifted[j] * &z;
        let beta = z.dot(&fz);
        that.ger(1.0 / beta, &fz, &fz, 1.0);
    }
    let mut rhat = RMat::zeros(dim, dim);
    for &j in &vanishing {
        rhat += &lifted[j];
    }
    Ok((
        QuadForm {
            matrix: that,
            kind: QuadFormKind::That,
            base_rank: k,
            dim_n: n,
            members: frame.len(),
        },
        QuadForm {
            matrix: rhat,
            kind: QuadFormKind::Rhat,
            base_rank: k,
            dim_n: n,
            members: frame.len(),
        },
    ))
}

/// Local lower Lipschitz bounds of the beta map at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaLocalBounds {
    /// `a(z)`: smallest eigenvalue of `Q_z`.
    pub a: f64,
    /// `ahat(z)`: eigenvalue `2nk - k^2` of `Qhat_z`.
    pub a_hat: f64,
    /// `ahat_1(z) = ahat(z) / (4 ||z||^2)`.
    pub a_hat_1: f64,
    /// `ahat_2(z)`, equal to `ahat_1(z)`.
    pub a_hat_2: f64,
    /// `(ahat / (4||z||^2), ahat / (2 sigma_k^2))`, which brackets `a(z)`.
    pub sandwich: (f64, f64),
}

/// Local lower Lipschitz bounds of the alpha map at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaLocalBounds {
    /// `Ahat_1(z)`: eigenvalue `2nk - k^2` of `That + Rhat`.
    pub alpha_hat_1: f64,
    /// `Ahat_2(z)`: eigenvalue `2nk - k^2` of `That`.
    pub alpha_hat_2: f64,
}

/// All local constants at one point, with the base data they refer to.
#[derive(Debug, Clone)]
pub struct LocalBounds {
    pub beta: BetaLocalBounds,
    /// Present only for PSD frames.
    pub alpha: Option<AlphaLocalBounds>,
    pub base_rank: usize,
    pub z_norm: f64,
    pub sigma_min: f64,
}

/// Checks that the trailing `count` eigenvalues are structural nulls.
fn warn_on_fat_null_space(eigs: &[f64], count: usize, context: &str) {
    if count == 0 || eigs.is_empty() {
        return;
    }
    let lam1 = eigs[0].abs().max(1e-300);
    let worst = eigs[eigs.len() - count..]
        .iter()
        .fold(0.0_f64, |m, &l| m.max(l.abs()));
    if worst > tol::NULL_SPACE_REL * lam1 {
        log::warn!(
            "{context}: trailing {count} eigenvalues reach {worst:.3e} (lambda_1 = {:.3e}); \
             structural null space is not numerically clean",
            eigs[0]
        );
    }
}

/// Beta-map local bounds: hat-reduces `z`, assembles both forms, and reads
/// the contracted eigenvalue indices.
pub fn beta_local_bounds(frame: &HermitianFrame, z: &ComplexMatrix) -> Result<BetaLocalBounds> {
    if z.rows() != frame.dim_n() {
        return Err(Error::ShapeMismatch(format!(
            "point has {} rows, frame acts on C^{}",
            z.rows(),
            frame.dim_n()
        )));
    }
    let red = hat_reduce(z, tol::RANK_TOL)?;
    let n = frame.dim_n();
    let k = red.rank;
    let u1 = red.range_basis.clone();
    let u2 = crate::types::unitary_completion(&u1);

    let qz = assemble_qz(frame, &u1, &u2)?;
    let a = qz.lambda(2 * n * k - k * k);

    let qhat = assemble_qhat(frame, &red.zhat)?;
    let eigs = qhat.eigenvalues();
    warn_on_fat_null_space(&eigs, k * k, "Qhat");
    let a_hat = eigs[2 * n * k - k * k - 1];

    let z_norm2 = z.norm().powi(2);
    let sigma_min = *red.singular_values.last().expect("rank >= 1");
    let a_hat_1 = a_hat / (4.0 * z_norm2);
    Ok(BetaLocalBounds {
        a,
        a_hat,
        a_hat_1,
        a_hat_2: a_hat_1,
        sandwich: (a_hat_1, a_hat / (2.0 * sigma_min * sigma_min)),
    })
}

/// Alpha-map local bounds at `z` for a PSD frame.
pub fn alpha_local_bounds(frame: &HermitianFrame, z: &ComplexMatrix) -> Result<AlphaLocalBounds> {
    let red = hat_reduce(z, tol::RANK_TOL)?;
    let n = frame.dim_n();
    let k = red.rank;
    let (that, rhat) = assemble_alpha_forms(frame, &red.zhat)?;
    let combined = combine_alpha_forms(&that, &rhat);
    let idx = 2 * n * k - k * k;
    let combined_eigs = combined.eigenvalues();
    warn_on_fat_null_space(&combined_eigs, k * k, "That+Rhat");
    Ok(AlphaLocalBounds {
        alpha_hat_1: combined_eigs[idx - 1],
        alpha_hat_2: that.lambda(idx),
    })
}

/// Both bound families at once; the alpha part is present for PSD frames.
pub fn local_bounds(frame: &HermitianFrame, z: &ComplexMatrix) -> Result<LocalBounds> {
    let beta = beta_local_bounds(frame, z)?;
    let alpha = if frame.is_psd() {
        Some(alpha_local_bounds(frame, z)?)
    } else {
        None
    };
    let red = hat_reduce(z, tol::RANK_TOL)?;
    Ok(LocalBounds {
        beta,
        alpha,
        base_rank: red.rank,
        z_norm: z.norm(),
        sigma_min: *red.singular_values.last().expect("rank >= 1"),
    })
}

/// `lambda_1(Q_{[U1|U2]})`, the pointwise upper objective.
pub fn beta_upper_local(frame: &HermitianFrame, u1: &CMat, u2: &CMat) -> Result<f64> {
    Ok(assemble_qz(frame, u1, u2)?.lambda(1))
}

/// Global upper constants.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalUpperBounds {
    /// `b_{0,1} = sup_{|x|=1} sum_j <x x^*, A_j>^2`, from multistart ascent
    /// on the unit sphere (the supremum is attained at rank one).
    pub b01: f64,
    /// `lambda_max(sum_j A_j)`, the optimal upper frame bound `B`.
    pub upper_frame_bound: f64,
    /// True when the frame is PSD, in which case `upper_frame_bound` is
    /// also the alpha-map constant `B_0`.
    pub alpha_interpretation: bool,
}

/// Computes `B_0`/`B` and `b_{0,1}`. The sphere ascent is seeded from the
/// config and runs one start per index, in parallel.
pub fn global_upper_bounds(frame: &HermitianFrame, cfg: &SearchConfig) -> GlobalUpperBounds {
    let (_, upper) = crate::frame::frame_bounds(frame);
    let n = frame.dim_n();
    let best = exec::map_indexed(cfg.starts.max(1), |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
        let mut x = CMat::from_fn(n, 1, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let nx = x.norm();
        x.unscale_mut(nx);
        sphere_ascend(frame, x, cfg)
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    GlobalUpperBounds {
        b01: best,
        upper_frame_bound: upper,
        alpha_interpretation: frame.is_psd(),
    }
}

/// Projected gradient ascent of `g(x) = sum_j beta_j(x)^2` on the unit
/// sphere of C^n, with backtracking.
fn sphere_ascend(frame: &HermitianFrame, mut x: CMat, cfg: &SearchConfig) -> f64 {
    let objective = |x: &CMat| -> f64 {
        frame
            .members()
            .iter()
            .map(|a| beta_value(a, x).powi(2))
            .sum()
    };
    let mut value = objective(&x);
    for _ in 0..cfg.max_iters {
        // Euclidean gradient: 4 sum_j beta_j A_j x.
        let mut grad = CMat::zeros(x.nrows(), 1);
        for a in frame.members() {
            let b = beta_value(a, &x);
            grad += (a * &x).scale(4.0 * b);
        }
        // Tangent part on the sphere.
        let radial = {
            let mut ip = 0.0;
            for i in 0..x.nrows() {
                ip += (x[(i, 0)].conj() * grad[(i, 0)]).re;
            }
            ip
        };
        let tangent = &grad - x.scale(radial);
        let gnorm = tangent.norm();
        if gnorm <= cfg.grad_tol * value.abs().max(1.0) {
            break;
        }
        let mut step = cfg.step;
        let mut improved = false;
        while step > 1e-14 {
            let mut cand = &x + tangent.scale(step);
            let cn = cand.norm();
            cand.unscale_mut(cn);
            let cv = objective(&cand);
            if cv >= value + 1e-4 * step * gnorm * gnorm {
                x = cand;
                value = cv;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    value
}
