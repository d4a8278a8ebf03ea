//! Shared oracles for the integration suite. Everything here evaluates the
//! defining expressions directly from frame members and raw linear algebra,
//! independently of the assembled-matrix code paths it is used to check.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use framestab::HermitianFrame;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub fn gaussian_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = gaussian_complex(rng, n, n);
    (&g + g.adjoint()).scale(0.5)
}

pub fn gaussian_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Test-side Haar unitary: QR with R-diagonal phase fix.
pub fn haar(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = gaussian_complex(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let a = d.norm();
        if a > 0.0 {
            let col = q.column(j) * d.unscale(a);
            q.set_column(j, &col);
        }
    }
    q
}

pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += (x.conj() * y).re;
    }
    acc
}

/// Range projector of `z` from the SVD, written out directly.
pub fn range_projector(z: &CMat) -> CMat {
    let svd = z.clone().svd(true, false);
    let svals = svd.singular_values.as_slice();
    let s1 = svals.iter().fold(0.0_f64, |m, &s| m.max(s));
    let k = svals.iter().filter(|&&s| s > 1e-10 * s1).count();
    let u = svd.u.unwrap();
    let uk = u.columns(0, k);
    uk * uk.adjoint()
}

/// `sum_j <W, A_j>_R^2` evaluated from traces, never from assembled forms.
pub fn direction_energy(frame: &HermitianFrame, w: &CMat) -> f64 {
    frame
        .members()
        .iter()
        .map(|a| {
            let ip = (a * w).trace().re;
            ip * ip
        })
        .sum()
}

/// A random unit tangent matrix at the range split `(u1, u2)`:
/// `W = U1 A U1^* + (1/sqrt2)(U2 C U1^* + U1 C^* U2^*)`, normalized.
pub fn random_unit_tangent(rng: &mut ChaCha8Rng, u1: &CMat, u2: &CMat) -> CMat {
    let k = u1.ncols();
    let a = gaussian_hermitian(rng, k);
    let mut w = u1 * &a * u1.adjoint();
    if u2.ncols() > 0 {
        let c = gaussian_complex(rng, u2.ncols(), k);
        let off = u2 * &c * u1.adjoint();
        w += (&off + off.adjoint()).unscale(2.0_f64.sqrt());
    }
    let nw = w.norm();
    w.unscale(nw)
}

/// A random horizontal direction at full-column-rank `z`:
/// `w = P H P z + (I - P) X` with Hermitian `H`.
pub fn random_horizontal(rng: &mut ChaCha8Rng, z: &CMat) -> CMat {
    let n = z.nrows();
    let p = range_projector(z);
    let h = gaussian_hermitian(rng, n);
    let ph = &p * &h * &p;
    let x = gaussian_complex(rng, n, z.ncols());
    &ph * z + (CMat::identity(n, n) - &p) * x
}

/// `Dpi(z)(w) = z w^* + w z^*`.
pub fn dpi(z: &CMat, w: &CMat) -> CMat {
    let m = z * w.adjoint();
    &m + m.adjoint()
}

/// Minimum of `||x - y U||_F` over sampled unitaries: a dense phase grid
/// for r = 1, Haar samples otherwise.
pub fn sampled_min_alignment(rng: &mut ChaCha8Rng, x: &CMat, y: &CMat, samples: usize) -> f64 {
    let r = x.ncols();
    let mut best = f64::INFINITY;
    if r == 1 {
        for i in 0..samples {
            let theta = 2.0 * std::f64::consts::PI * (i as f64) / (samples as f64);
            let u = C64::new(theta.cos(), theta.sin());
            best = best.min((x - y * u).norm());
        }
    } else {
        for _ in 0..samples {
            let u = haar(rng, r);
            best = best.min((x - y * &u).norm());
        }
    }
    best
}

/// 2D Rayleigh-Ritz refinement of a quotient `q(w,w) / ip(w,w)` along
/// caller-supplied descent directions. Each step minimizes exactly over the
/// orthonormalized plane spanned by the iterate and its (projected)
/// gradient. All evaluations go through the closures, so the refinement
/// inherits their independence.
pub fn refine_rayleigh_min<V: Clone>(
    w0: V,
    qf: &dyn Fn(&V, &V) -> f64,
    ip: &dyn Fn(&V, &V) -> f64,
    descent: &dyn Fn(&V) -> V,
    combine: &dyn Fn(f64, &V, f64, &V) -> V,
    iters: usize,
) -> (f64, V) {
    let zero_like = |v: &V| combine(0.0, v, 0.0, v);
    let normalize = |v: &V| -> Option<V> {
        let n2 = ip(v, v);
        if n2 <= 0.0 {
            return None;
        }
        Some(combine(1.0 / n2.sqrt(), v, 0.0, &zero_like(v)))
    };
    let mut w = match normalize(&w0) {
        Some(v) => v,
        None => return (f64::NAN, w0),
    };
    let mut value = qf(&w, &w);
    for _ in 0..iters {
        // Orthonormalize the search direction against the iterate.
        let raw = descent(&w);
        let proj = ip(&w, &raw);
        let d = combine(1.0, &raw, -proj, &w);
        let dn2 = ip(&d, &d);
        if dn2 <= 1e-24 * value.abs().max(1.0) {
            break;
        }
        let d = combine(1.0 / dn2.sqrt(), &d, 0.0, &w);
        // Exact minimization over span{w, d}: 2x2 symmetric eigenproblem.
        let q00 = value;
        let q01 = qf(&w, &d);
        let q11 = qf(&d, &d);
        let half_gap = 0.5 * (q00 - q11);
        let lam = 0.5 * (q00 + q11) - (half_gap * half_gap + q01 * q01).sqrt();
        let (alpha, beta) = if (q00 - lam).abs() >= (q11 - lam).abs() {
            (-q01, q00 - lam)
        } else {
            (lam - q11, q01)
        };
        let norm = (alpha * alpha + beta * beta).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        let cand = combine(alpha / norm, &w, beta / norm, &d);
        let cand = match normalize(&cand) {
            Some(v) => v,
            None => break,
        };
        let cand_value = qf(&cand, &cand);
        if cand_value >= value - 1e-15 * value.abs().max(1.0) {
            break;
        }
        w = cand;
        value = cand_value;
    }
    (value, w)
}

/// Keeps the `keep` best-scoring samples (ascending score).
pub fn best_samples<V: Clone>(samples: &[(f64, V)], keep: usize) -> Vec<V> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].0.partial_cmp(&samples[b].0).unwrap());
    order.iter().take(keep).map(|&i| samples[i].1.clone()).collect()
}

/// Matrix exponential by scaling-and-squaring on a Taylor series; test-only.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = m.norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.unscale(2.0_f64.powi(s as i32));
    let mut term = CMat::identity(n, n);
    let mut acc = CMat::identity(n, n);
    for k in 1..=18 {
        term = &term * &scaled;
        term.unscale_mut(k as f64);
        acc += &term;
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    acc
}

/// Simpson integration of `t -> exp(-t M) W exp(-t M)` over `[0, horizon]`.
pub fn sylvester_quadrature(m: &CMat, w: &CMat, horizon: f64, panels: usize) -> CMat {
    let n = m.nrows();
    let h = horizon / (panels as f64);
    let f = |t: f64| -> CMat {
        let e = expm(&m.scale(-t));
        &e * w * &e
    };
    let mut acc = CMat::zeros(n, n);
    for i in 0..panels {
        let t0 = h * i as f64;
        let mid = t0 + 0.5 * h;
        let t1 = t0 + h;
        acc += (f(t0) + f(mid).scale(4.0) + f(t1)).scale(h / 6.0);
    }
    acc
}

/// Linspace over [0, 1] inclusive.
pub fn unit_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| i as f64 / (points.saturating_sub(1).max(1)) as f64)
        .collect()
}

/// Wraps a raw matrix in the crate's validated representative type.
pub fn wrap(m: CMat) -> framestab::ComplexMatrix {
    framestab::ComplexMatrix::new(m).unwrap()
}
