//! Estimation of the global constants `a_0` and `b_0` by multistart
//! Riemannian descent over the unitary group, the Stiefel bracket for
//! `a_0`, and phase-retrievability certification.
//!
//! The objective is always an ordered eigenvalue of the `Q` family, which
//! is nonsmooth at multiplicities; the per-iterate subgradient averages the
//! eigenvector outer-product gradients over a small eigenvalue cluster.
//! Starts are seeded by counter from the config seed, run concurrently, and
//! reduce by index-ordered min/max, so results are deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exec;
use crate::frame::{beta_map, complex_gaussian_matrix, HermitianFrame};
use crate::quotient::canonical_factor;
use crate::realify::{mu, mu_inv, tau_inv};
use crate::stability::{assemble_qhat, assemble_qz, lifted_members, qz_coordinate_rows};
use crate::tol;
use crate::types::{eigh_desc, qr_unitary, CMat, ComplexMatrix, PsdPoint, RMat, RVec};

/// Retraction used to stay on the manifold after a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retraction {
    /// QR factor with positive-real diagonal.
    #[default]
    Qr,
}

/// Multistart search configuration. Deterministic given `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    pub max_iters: usize,
    /// Initial trial step for the backtracking line search.
    pub step: f64,
    /// Gradient stopping tolerance; doubles as the null-direction gate.
    pub grad_tol: f64,
    pub seed: u64,
    pub retraction: Retraction,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            max_iters: 500,
            step: 0.5,
            grad_tol: 1e-9,
            seed: 0,
            retraction: Retraction::Qr,
        }
    }
}

/// Per-start outcome summary.
#[derive(Debug, Clone, PartialEq)]
pub struct StartSummary {
    pub start: usize,
    pub initial: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Haar-distributed unitary: QR of a complex Gaussian with the R-diagonal
/// phases fixed.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    qr_unitary(&complex_gaussian_matrix(rng, n, n))
}

/// Haar-distributed point of the complex Stiefel manifold `z^* z = I_r`.
pub fn random_stiefel(n: usize, r: usize, rng: &mut ChaCha8Rng) -> CMat {
    qr_unitary(&complex_gaussian_matrix(rng, n, r))
}

fn split_blocks(u: &CMat, r: usize) -> (CMat, CMat) {
    let n = u.nrows();
    (u.columns(0, r).into_owned(), u.columns(r, n - r).into_owned())
}

/// Rebuilds the tangent matrix from eigenvector coordinates of `Q_z`:
/// `W = U1 A U1^* + (1/sqrt2)(U2 C U1^* + U1 C^* U2^*)`.
fn tangent_from_coords(u1: &CMat, u2: &CMat, v: &RVec) -> CMat {
    let k = u1.ncols();
    let n = u1.nrows();
    let a = tau_inv(&v.rows(0, k * k).into_owned()).expect("square coordinate block");
    let mut w = u1 * &a * u1.adjoint();
    if n > k {
        let c = mu_inv(&v.rows(k * k, 2 * (n - k) * k).into_owned(), n - k, k)
            .expect("off-range coordinate block");
        let off = u2 * &c * u1.adjoint();
        w += (&off + off.adjoint()).unscale(std::f64::consts::SQRT_2);
    }
    w
}

/// Smallest (or largest) eigenvalue of `Q_{[U1|U2]}` and its Euclidean
/// gradient with respect to `U`, averaged over the eigenvalue cluster.
fn qz_value_grad(
    frame: &HermitianFrame,
    u: &CMat,
    r: usize,
    maximize: bool,
) -> Result<(f64, CMat)> {
    let (u1, u2) = split_blocks(u, r);
    let q = assemble_qz(frame, &u1, &u2)?;
    let (eigs, vecs) = eigh_desc(q.matrix());
    let dim = eigs.len();
    let target_idx = if maximize { 0 } else { dim - 1 };
    let lam = eigs[target_idx];
    let scale = eigs[0].abs().max(1.0);
    let cluster: Vec<usize> = (0..dim)
        .filter(|&i| (eigs[i] - lam).abs() <= tol::EIG_CLUSTER * scale)
        .collect();
    let mut grad = CMat::zeros(u.nrows(), u.ncols());
    for &i in &cluster {
        let v = vecs.column(i).into_owned();
        let w = tangent_from_coords(&u1, &u2, &v);
        // d lambda = <4 sum_j <A_j, W> A_j W U, dU>_R.
        let mut m0 = CMat::zeros(u.nrows(), u.nrows());
        for a in frame.members() {
            let c = (a * &w).trace().re;
            m0 += a.scale(c);
        }
        grad += (m0 * &w * u).scale(4.0);
    }
    grad.unscale_mut(cluster.len() as f64);
    Ok((lam, grad))
}

fn skew_part(m: &CMat) -> CMat {
    (m - m.adjoint()).unscale(2.0)
}

fn herm_part(m: &CMat) -> CMat {
    (m + m.adjoint()).unscale(2.0)
}

/// One descent (or ascent) run over U(n); stops on small Riemannian
/// gradient, a stalled line search, or, when minimizing, a null objective.
fn extremize_over_unitary(
    frame: &HermitianFrame,
    r: usize,
    u0: CMat,
    cfg: &SearchConfig,
    maximize: bool,
    start: usize,
) -> Result<(f64, CMat, StartSummary)> {
    let mut u = u0;
    let (mut value, mut grad) = qz_value_grad(frame, &u, r, maximize)?;
    let initial = value;
    let mut converged = false;
    let mut iterations = 0;
    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        if !maximize && value <= cfg.grad_tol {
            converged = true;
            break;
        }
        let riem = &u * skew_part(&(u.adjoint() * &grad));
        let gnorm = riem.norm();
        if gnorm <= cfg.grad_tol * value.abs().max(1.0) {
            converged = true;
            break;
        }
        let direction = if maximize { riem } else { -riem };
        let mut step = cfg.step;
        let mut accepted = false;
        while step > 1e-13 {
            let candidate = qr_unitary(&(&u + direction.scale(step)));
            let (cand_value, cand_grad) = qz_value_grad(frame, &candidate, r, maximize)?;
            let gain = if maximize { cand_value - value } else { value - cand_value };
            if gain >= 1e-4 * step * gnorm * gnorm {
                u = candidate;
                value = cand_value;
                grad = cand_grad;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = gnorm <= (cfg.grad_tol.max(1e-7)) * value.abs().max(1.0);
            break;
        }
    }
    let summary = StartSummary {
        start,
        initial,
        value,
        iterations,
        converged,
    };
    Ok((value, u, summary))
}

/// Result of the `a_0` minimization.
#[derive(Debug, Clone)]
pub struct A0Estimate {
    /// Incumbent minimum: an upper bound on the true `a_0`.
    pub a0: f64,
    /// The unitary achieving the incumbent.
    pub witness_u: CMat,
    pub starts: Vec<StartSummary>,
}

fn run_a0(frame: &HermitianFrame, cfg: &SearchConfig, sequential: bool) -> Result<A0Estimate> {
    let n = frame.dim_n();
    let r = frame.target_r();
    let starts = cfg.starts.max(1);
    let per_start = |s: usize| -> Result<(f64, CMat, StartSummary)> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
        let u0 = haar_unitary(n, &mut rng);
        extremize_over_unitary(frame, r, u0, cfg, false, s)
    };
    let outcomes = if sequential {
        exec::map_indexed_seq(starts, per_start)
    } else {
        exec::map_indexed(starts, per_start)
    };
    let mut best: Option<(f64, CMat)> = None;
    let mut summaries = Vec::with_capacity(starts);
    for outcome in outcomes {
        let (value, witness, summary) = outcome?;
        summaries.push(summary);
        let replace = match &best {
            Some((v, _)) => value < *v,
            None => true,
        };
        if replace {
            best = Some((value, witness));
        }
    }
    let (a0, witness_u) = best.expect("at least one start");
    Ok(A0Estimate {
        a0,
        witness_u,
        starts: summaries,
    })
}

/// Multistart minimization of `lambda_{2nr-r^2}(Q_U)` over `U(n)`.
pub fn estimate_a0(frame: &HermitianFrame, cfg: &SearchConfig) -> Result<A0Estimate> {
    run_a0(frame, cfg, false)
}

/// Sequential twin of [`estimate_a0`]; identical output, used for
/// benchmarking and determinism checks.
pub fn estimate_a0_seq(frame: &HermitianFrame, cfg: &SearchConfig) -> Result<A0Estimate> {
    run_a0(frame, cfg, true)
}

/// Result of the `b_0` maximization.
#[derive(Debug, Clone)]
pub struct B0Estimate {
    /// Incumbent maximum: a lower bound on the true `b_0`.
    pub b0: f64,
    pub witness_u: CMat,
    pub starts: Vec<StartSummary>,
}

/// Multistart maximization of `lambda_1(Q_U)` over `U(n)`.
pub fn estimate_b0(frame: &HermitianFrame, cfg: &SearchConfig) -> Result<B0Estimate> {
    let n = frame.dim_n();
    let r = frame.target_r();
    let starts = cfg.starts.max(1);
    let outcomes = exec::map_indexed(starts, |s| -> Result<(f64, CMat, StartSummary)> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
        let u0 = haar_unitary(n, &mut rng);
        extremize_over_unitary(frame, r, u0, cfg, true, s)
    });
    let mut best: Option<(f64, CMat)> = None;
    let mut summaries = Vec::with_capacity(starts);
    for outcome in outcomes {
        let (value, witness, summary) = outcome?;
        summaries.push(summary);
        let replace = match &best {
            Some((v, _)) => value > *v,
            None => true,
        };
        if replace {
            best = Some((value, witness));
        }
    }
    let (b0, witness_u) = best.expect("at least one start");
    Ok(B0Estimate {
        b0,
        witness_u,
        starts: summaries,
    })
}

/// `lambda` target index (descending, 1-based) for the hat form at full rank.
fn qhat_target_index(n: usize, r: usize) -> usize {
    2 * n * r - r * r
}

/// Value and Euclidean gradient of `lambda_{2nr-r^2}(Qhat_z)` on the
/// Stiefel manifold.
fn qhat_value_grad(
    frame: &HermitianFrame,
    lifted: &[RMat],
    z: &ComplexMatrix,
) -> Result<(f64, CMat)> {
    let n = frame.dim_n();
    let r = z.cols();
    let q = assemble_qhat(frame, z)?;
    let (eigs, vecs) = eigh_desc(q.matrix());
    let target = qhat_target_index(n, r) - 1;
    let lam = eigs[target];
    let scale = eigs[0].abs().max(1.0);
    let cluster: Vec<usize> = (0..=target)
        .filter(|&i| (eigs[i] - lam).abs() <= tol::EIG_CLUSTER * scale)
        .collect();
    let zvec = mu(z.matrix());
    let mut grad_vec = RVec::zeros(2 * n * r);
    for &i in &cluster {
        let v = vecs.column(i);
        for f in lifted {
            let fz = f * &zvec;
            let fv = f * v;
            let coef = v.dot(&fz);
            grad_vec += fv.scale(8.0 * coef);
        }
    }
    grad_vec.unscale_mut(cluster.len() as f64);
    Ok((lam, mu_inv(&grad_vec, n, r)?))
}

/// Outcome of the Stiefel bracket minimization.
#[derive(Debug, Clone)]
pub struct BracketA0 {
    /// `(inf ahat / 4, inf ahat / 2)`; the true `a_0` lies inside.
    pub lower: f64,
    pub upper: f64,
    /// Stiefel point achieving the incumbent infimum.
    pub witness_z: ComplexMatrix,
    pub starts: Vec<StartSummary>,
}

/// Minimizes `ahat(z)` over orthonormal-column `z` and returns the bracket
/// `(inf/4, inf/2)` that pins `a_0`.
pub fn bracket_a0(frame: &HermitianFrame, cfg: &SearchConfig) -> Result<BracketA0> {
    let n = frame.dim_n();
    let r = frame.target_r();
    let lifted = lifted_members(frame, r);
    let starts = cfg.starts.max(1);
    let outcomes = exec::map_indexed(starts, |s| -> Result<(f64, ComplexMatrix, StartSummary)> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
        let mut z = ComplexMatrix::new(random_stiefel(n, r, &mut rng))?;
        let (mut value, mut grad) = qhat_value_grad(frame, &lifted, &z)?;
        let initial = value;
        let mut converged = false;
        let mut iterations = 0;
        for iter in 0..cfg.max_iters {
            iterations = iter + 1;
            if value <= cfg.grad_tol {
                converged = true;
                break;
            }
            // Stiefel tangent projection: G - z herm(z^* G).
            let zg = herm_part(&(z.matrix().adjoint() * &grad));
            let riem = &grad - z.matrix() * zg;
            let gnorm = riem.norm();
            if gnorm <= cfg.grad_tol * value.abs().max(1.0) {
                converged = true;
                break;
            }
            let mut step = cfg.step;
            let mut accepted = false;
            while step > 1e-13 {
                let cand = ComplexMatrix::new(qr_unitary(&(z.matrix() - riem.scale(step))))?;
                let (cand_value, cand_grad) = qhat_value_grad(frame, &lifted, &cand)?;
                if value - cand_value >= 1e-4 * step * gnorm * gnorm {
                    z = cand;
                    value = cand_value;
                    grad = cand_grad;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                converged = gnorm <= (cfg.grad_tol.max(1e-7)) * value.abs().max(1.0);
                break;
            }
        }
        Ok((
            value,
            z,
            StartSummary {
                start: s,
                initial,
                value,
                iterations,
                converged,
            },
        ))
    });
    let mut best: Option<(f64, ComplexMatrix)> = None;
    let mut summaries = Vec::with_capacity(starts);
    for outcome in outcomes {
        let (value, witness, summary) = outcome?;
        summaries.push(summary);
        let replace = match &best {
            Some((v, _)) => value < *v,
            None => true,
        };
        if replace {
            best = Some((value, witness));
        }
    }
    let (inf_ahat, witness_z) = best.expect("at least one start");
    Ok(BracketA0 {
        lower: 0.25 * inf_ahat,
        upper: 0.5 * inf_ahat,
        witness_z,
        starts: summaries,
    })
}

/// Certification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Retrievable,
    NotRetrievable,
    Inconclusive,
}

/// Point-condition checks at sampled Stiefel points: the coordinate-row
/// rank test, the null-space dimension of the hat form, and the span
/// dimension of `{A_j U1}`. The three are equivalent pointwise and must
/// agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionChecks {
    pub samples: usize,
    pub rank_condition: bool,
    pub null_space_condition: bool,
    pub span_condition: bool,
}

impl ConditionChecks {
    pub fn all_pass(&self) -> bool {
        self.rank_condition && self.null_space_condition && self.span_condition
    }
}

/// A reconstructed measurement collision: `beta(x) = beta(y)` while
/// `x x^* - y y^*` has unit norm.
#[derive(Debug, Clone)]
pub struct CollisionWitness {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    /// `||beta(x) - beta(y)||_2`.
    pub beta_gap: f64,
    /// `||x x^* - y y^*||_2`.
    pub pi_gap: f64,
}

/// Phase-retrievability certificate.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub verdict: Verdict,
    pub a0_estimate: f64,
    pub bracket: (f64, f64),
    pub witness_u: CMat,
    pub condition_checks: ConditionChecks,
    /// Present exactly for `NotRetrievable`.
    pub collision: Option<CollisionWitness>,
    /// Energy scale `sum_j ||A_j||^2` used for the positivity threshold.
    pub frame_scale: f64,
    /// Positivity threshold applied to the incumbent and bracket.
    pub positivity_threshold: f64,
    pub a0_starts: Vec<StartSummary>,
}

fn matrix_rank(m: &RMat) -> usize {
    let svals = m.clone().svd(false, false).singular_values;
    let s1 = svals.iter().fold(0.0_f64, |a, &b| a.max(b));
    if s1 <= 0.0 {
        return 0;
    }
    svals.iter().filter(|&&s| s > tol::NULL_SPACE_REL * s1).count()
}

fn condition_checks_at(frame: &HermitianFrame, z: &CMat) -> Result<(bool, bool, bool)> {
    let n = frame.dim_n();
    let r = z.ncols();
    let dim = 2 * n * r - r * r;
    let u2 = crate::types::unitary_completion(z);

    // (ii)/(iv): the coordinate rows span R^{2nr - r^2} iff Q_U is invertible
    // iff the moment problem in c_1..c_m is solvable for every target.
    let rows = qz_coordinate_rows(frame, z, &u2)?;
    let rank_condition = matrix_rank(&rows) == dim;

    // (iii): null space of Qhat_z is exactly r^2-dimensional.
    let zc = ComplexMatrix::new(z.clone())?;
    let qhat = assemble_qhat(frame, &zc)?;
    let eigs = qhat.eigenvalues();
    let lam1 = eigs[0].abs().max(1e-300);
    let null_dim = eigs.iter().filter(|&&l| l.abs() <= tol::NULL_SPACE_REL * lam1).count();
    let null_space_condition = null_dim == r * r;

    // (v): span_R {A_j U1} has dimension 2nr - r^2.
    let mut span_rows = RMat::zeros(frame.len(), 2 * n * r);
    for (j, a) in frame.members().iter().enumerate() {
        span_rows.row_mut(j).copy_from(&mu(&(a * z)).transpose());
    }
    let span_condition = matrix_rank(&span_rows) == dim;

    Ok((rank_condition, null_space_condition, span_condition))
}

/// Builds a beta collision from a unit null tangent direction at `u`.
fn collision_from_witness(
    frame: &HermitianFrame,
    u: &CMat,
    r: usize,
) -> Result<Option<CollisionWitness>> {
    let n = u.nrows();
    let (u1, u2) = split_blocks(u, r);
    let q = assemble_qz(frame, &u1, &u2)?;
    let (eigs, vecs) = eigh_desc(q.matrix());
    let dim = eigs.len();
    let v = vecs.column(dim - 1).into_owned();
    let w = tangent_from_coords(&u1, &u2, &v);
    let wnorm = w.norm();
    if wnorm <= 0.0 {
        return Ok(None);
    }
    let w = w.unscale(wnorm);
    // Split the unit tangent direction into PSD parts; each has rank <= r
    // because the tangent form vanishes on an (n-r)-dimensional subspace.
    let (weigs, wvecs) = eigh_desc(&w);
    let mut pos = CMat::zeros(n, n);
    let mut neg = CMat::zeros(n, n);
    let mut pos_rank = 0;
    let mut neg_rank = 0;
    for (i, &lam) in weigs.iter().enumerate() {
        let col = wvecs.column(i);
        if lam > 0.0 && pos_rank < r {
            pos += (col * col.adjoint()).scale(lam);
            pos_rank += 1;
        }
    }
    for i in (0..weigs.len()).rev() {
        let lam = weigs[i];
        let col = wvecs.column(i);
        if lam < 0.0 && neg_rank < r {
            neg += (col * col.adjoint()).scale(-lam);
            neg_rank += 1;
        }
    }
    let x = canonical_factor(&PsdPoint::from_parts(pos, pos_rank), r)?;
    let y = canonical_factor(&PsdPoint::from_parts(neg, neg_rank), r)?;
    let bx = beta_map(frame, &x)?;
    let by = beta_map(frame, &y)?;
    let beta_gap = (bx.values() - by.values()).norm();
    let pi_gap = (x.gram_lift() - y.gram_lift()).norm();
    Ok(Some(CollisionWitness { x, y, beta_gap, pi_gap }))
}

/// Number of Stiefel points sampled for the condition checks.
const CONDITION_SAMPLES: usize = 8;

/// Runs the searches and the algebraic condition checks, then applies the
/// verdict rules: a null direction certifies `NotRetrievable`; a strictly
/// positive bracket plus a positive incumbent and passing checks certify
/// `Retrievable`; anything else is `Inconclusive`.
pub fn certify(frame: &HermitianFrame, cfg: &SearchConfig) -> Result<Certificate> {
    let n = frame.dim_n();
    let r = frame.target_r();
    let a0 = estimate_a0(frame, cfg)?;
    let bracket = bracket_a0(frame, cfg)?;

    let checks: Vec<(bool, bool, bool)> = exec::map_indexed(CONDITION_SAMPLES, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5EED_0000 + s as u64));
        let z = random_stiefel(n, r, &mut rng);
        condition_checks_at(frame, &z)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    for &(rank_c, null_c, span_c) in &checks {
        assert!(
            rank_c == null_c && null_c == span_c,
            "equivalent retrievability conditions disagree at a sampled point \
             (rank: {rank_c}, null-space: {null_c}, span: {span_c})"
        );
    }
    let condition_checks = ConditionChecks {
        samples: CONDITION_SAMPLES,
        rank_condition: checks.iter().all(|c| c.0),
        null_space_condition: checks.iter().all(|c| c.1),
        span_condition: checks.iter().all(|c| c.2),
    };

    let frame_scale = frame.energy();
    let positivity_threshold = 1e-8 * (1.0 + frame_scale);
    let (verdict, collision, a0_value, witness_u) = if a0.a0 <= cfg.grad_tol {
        // Polish the null witness down to the numerical floor so the
        // reconstructed collision is sharp: the beta gap scales like
        // sqrt(lambda).
        let polish_cfg = SearchConfig {
            starts: 1,
            max_iters: 400,
            grad_tol: 1e-16,
            ..cfg.clone()
        };
        let (pol_value, pol_u, _) =
            extremize_over_unitary(frame, r, a0.witness_u.clone(), &polish_cfg, false, 0)?;
        let (value, u) = if pol_value < a0.a0 {
            (pol_value, pol_u)
        } else {
            (a0.a0, a0.witness_u.clone())
        };
        let collision = collision_from_witness(frame, &u, r)?;
        (Verdict::NotRetrievable, collision, value, u)
    } else if bracket.lower > positivity_threshold
        && a0.a0 > positivity_threshold
        && condition_checks.all_pass()
    {
        (Verdict::Retrievable, None, a0.a0, a0.witness_u.clone())
    } else {
        (Verdict::Inconclusive, None, a0.a0, a0.witness_u.clone())
    };
    Ok(Certificate {
        verdict,
        a0_estimate: a0_value,
        bracket: (bracket.lower, bracket.upper),
        witness_u,
        condition_checks,
        collision,
        frame_scale,
        positivity_threshold,
        a0_starts: a0.starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{generate_frame, GeneratorKind};
    use approx::assert_relative_eq;

    fn quick_cfg() -> SearchConfig {
        SearchConfig {
            starts: 8,
            max_iters: 120,
            seed: 1,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let u = haar_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMat::identity(4, 4)).norm() < 1e-12);
        let z = random_stiefel(4, 2, &mut rng);
        assert!((z.adjoint() * &z - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn pauli_a0_is_two_from_every_start() {
        let f = generate_frame(GeneratorKind::Pauli, 2, 1, 4, 0).unwrap();
        let est = estimate_a0(&f, &quick_cfg()).unwrap();
        assert_relative_eq!(est.a0, 2.0, epsilon = 1e-6);
        for s in &est.starts {
            assert_relative_eq!(s.value, 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn too_few_members_gives_zero() {
        // m = 2 < 2nr - r^2 = 3.
        let f = HermitianFrame::new(
            2,
            1,
            vec![crate::frame::pauli_members()[0].clone(), crate::frame::pauli_members()[1].clone()],
        )
        .unwrap();
        let est = estimate_a0(&f, &quick_cfg()).unwrap();
        assert!(est.a0 <= 1e-9);
    }

    #[test]
    fn duplicated_frame_doubles_a0() {
        let f = generate_frame(GeneratorKind::RandomRank1, 2, 1, 5, 3).unwrap();
        let mut doubled = f.members().to_vec();
        doubled.extend_from_slice(f.members());
        let f2 = HermitianFrame::new(2, 1, doubled).unwrap();
        let cfg = quick_cfg();
        let e1 = estimate_a0(&f, &cfg).unwrap();
        let e2 = estimate_a0(&f2, &cfg).unwrap();
        assert_relative_eq!(e2.a0, 2.0 * e1.a0, max_relative = 1e-4);
    }

    #[test]
    fn pauli_bracket() {
        let f = generate_frame(GeneratorKind::Pauli, 2, 1, 4, 0).unwrap();
        let b = bracket_a0(&f, &quick_cfg()).unwrap();
        assert_relative_eq!(b.lower, 1.0, epsilon = 1e-6);
        assert_relative_eq!(b.upper, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn pauli_b0() {
        let f = generate_frame(GeneratorKind::Pauli, 2, 1, 4, 0).unwrap();
        let est = estimate_b0(&f, &quick_cfg()).unwrap();
        assert_relative_eq!(est.b0, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn identity_frame_b0_is_one() {
        let f = HermitianFrame::new(2, 1, vec![CMat::identity(2, 2)]).unwrap();
        let est = estimate_b0(&f, &quick_cfg()).unwrap();
        assert_relative_eq!(est.b0, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn b0_at_least_a0() {
        let f = generate_frame(GeneratorKind::RandomHermitian, 3, 1, 7, 9).unwrap();
        let cfg = quick_cfg();
        let a = estimate_a0(&f, &cfg).unwrap();
        let b = estimate_b0(&f, &cfg).unwrap();
        assert!(b.b0 >= a.a0 - 1e-9);
    }

    #[test]
    fn per_start_values_never_increase() {
        let f = generate_frame(GeneratorKind::RandomHermitian, 3, 1, 6, 13).unwrap();
        let est = estimate_a0(&f, &quick_cfg()).unwrap();
        for s in &est.starts {
            assert!(s.value <= s.initial + 1e-12);
            assert!(est.a0 <= s.value + 1e-12);
        }
    }

    #[test]
    fn parallel_and_sequential_agree_exactly() {
        let f = generate_frame(GeneratorKind::RandomHermitian, 3, 1, 6, 21).unwrap();
        let cfg = quick_cfg();
        let par = estimate_a0(&f, &cfg).unwrap();
        let seq = estimate_a0_seq(&f, &cfg).unwrap();
        assert_eq!(par.a0.to_bits(), seq.a0.to_bits());
        assert_eq!(par.witness_u, seq.witness_u);
    }

    #[test]
    fn certify_pauli_retrievable() {
        let f = generate_frame(GeneratorKind::Pauli, 2, 1, 4, 0).unwrap();
        let cert = certify(&f, &quick_cfg()).unwrap();
        assert_eq!(cert.verdict, Verdict::Retrievable);
        assert_relative_eq!(cert.a0_estimate, 2.0, epsilon = 1e-6);
        assert!(cert.condition_checks.all_pass());
    }

    #[test]
    fn certify_small_frame_not_retrievable_with_collision() {
        let p = crate::frame::pauli_members();
        let f = HermitianFrame::new(2, 1, vec![p[0].clone(), p[1].clone()]).unwrap();
        let cert = certify(&f, &quick_cfg()).unwrap();
        assert_eq!(cert.verdict, Verdict::NotRetrievable);
        let col = cert.collision.expect("collision witness");
        assert!(col.beta_gap <= 1e-6, "beta gap {}", col.beta_gap);
        assert_relative_eq!(col.pi_gap, 1.0, epsilon = 1e-8);
        assert!(!cert.condition_checks.all_pass());
    }

    #[test]
    fn certify_generic_rank1_frame() {
        // m = 6 >= 4n - 4 with n = 2; generic rank-one frames are
        // retrievable.
        let f = generate_frame(GeneratorKind::RandomRank1, 2, 1, 6, 77).unwrap();
        let cert = certify(&f, &quick_cfg()).unwrap();
        assert_eq!(cert.verdict, Verdict::Retrievable);
        assert!(cert.a0_estimate > 0.0);
    }
}
