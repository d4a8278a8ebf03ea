//! Metric and embedding properties of the quotient space, checked on random
//! ensembles against direct evaluations and sampled alignments.

mod common;

use common::*;
use framestab::{align, distance, embed, ComplexMatrix, EmbeddingKind, MetricKind};
use proptest::prelude::*;

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: usize) -> ComplexMatrix {
    wrap(gaussian_complex(rng, n, r))
}

fn d_all(x: &ComplexMatrix, y: &ComplexMatrix) -> (f64, f64, f64) {
    (
        distance(x, y, MetricKind::AlignMin).unwrap(),
        distance(x, y, MetricKind::AlignProduct).unwrap(),
        distance(x, y, MetricKind::AlignMax).unwrap(),
    )
}

#[test]
fn triangle_inequalities_on_random_triples() {
    let mut rng = rng(101);
    for case in 0..500 {
        let n = 2 + (case % 4);
        let r = 1 + (case % 3).min(n - 1);
        let x = random_point(&mut rng, n, r);
        let y = random_point(&mut rng, n, r);
        let z = random_point(&mut rng, n, r);
        for kind in [MetricKind::AlignMin, MetricKind::AlignProduct, MetricKind::AlignMax] {
            let dxy = distance(&x, &y, kind).unwrap();
            let dxz = distance(&x, &z, kind).unwrap();
            let dzy = distance(&z, &y, kind).unwrap();
            let slack = 1e-9 * (dxz + dzy).max(1.0);
            assert!(
                dxy <= dxz + dzy + slack,
                "triangle violated for {kind:?}: {dxy} > {dxz} + {dzy}"
            );
        }
    }
}

#[test]
fn product_identity_d_equals_dd_prime() {
    let mut rng = rng(7);
    for case in 0..200 {
        let n = 2 + (case % 3);
        let r = 1 + (case % 2);
        let x = random_point(&mut rng, n, r);
        let y = random_point(&mut rng, n, r);
        let (dmin, dprod, dmax) = d_all(&x, &y);
        assert!(
            (dprod - dmin * dmax).abs() <= 1e-10 * (1.0 + dprod),
            "d = D * D' violated: {dprod} vs {}",
            dmin * dmax
        );
    }
}

#[test]
fn rank_one_product_metric_is_nuclear_gap() {
    let mut rng = rng(13);
    for case in 0..200 {
        let n = 2 + (case % 4);
        let x = random_point(&mut rng, n, 1);
        let y = random_point(&mut rng, n, 1);
        let d = distance(&x, &y, MetricKind::AlignProduct).unwrap();
        let gap = x.gram_lift() - y.gram_lift();
        let nuclear: f64 = gap.svd(false, false).singular_values.iter().sum();
        assert!((d - nuclear).abs() <= 1e-10 * (1.0 + d), "{d} vs {nuclear}");
    }
}

#[test]
fn alignment_distance_matches_sampled_minimum() {
    let mut rng = rng(23);
    // r = 1: dense phase grid, error O(grid^2).
    for _ in 0..5 {
        let x = random_point(&mut rng, 3, 1);
        let y = random_point(&mut rng, 3, 1);
        let d = distance(&x, &y, MetricKind::AlignMin).unwrap();
        let sampled = sampled_min_alignment(&mut rng, x.matrix(), y.matrix(), 20_000);
        assert!(sampled >= d - 1e-9, "sampled {sampled} below closed form {d}");
        assert!(sampled - d <= 1e-4 * (1.0 + d), "grid gap too wide: {sampled} vs {d}");
    }
    // r = 2: Haar sampling; coarser agreement.
    for _ in 0..3 {
        let x = random_point(&mut rng, 3, 2);
        let y = random_point(&mut rng, 3, 2);
        let d = distance(&x, &y, MetricKind::AlignMin).unwrap();
        let sampled = sampled_min_alignment(&mut rng, x.matrix(), y.matrix(), 30_000);
        assert!(sampled >= d - 1e-9);
        assert!(sampled - d <= 0.05 * (1.0 + d), "sampling gap too wide: {sampled} vs {d}");
    }
}

#[test]
fn aligner_is_optimal_and_psd() {
    let mut rng = rng(31);
    for case in 0..50 {
        let n = 2 + (case % 3);
        let r = 1 + (case % 2).min(n - 1);
        let x = random_point(&mut rng, n, r);
        let y = random_point(&mut rng, n, r);
        let u = align(&x, &y).unwrap();
        // Unitary.
        assert!((u.adjoint() * &u - CMat::identity(r, r)).norm() < 1e-10);
        // x^* y U is PSD (Hermitian with nonnegative eigenvalues).
        let m = x.matrix().adjoint() * y.matrix() * &u;
        assert!((&m - m.adjoint()).norm() <= 1e-10 * m.norm().max(1.0));
        let eigs = m.clone().symmetric_eigen().eigenvalues;
        assert!(eigs.iter().all(|&l| l >= -1e-10 * m.norm().max(1.0)));
        // Residual attains the closed-form distance.
        let d = distance(&x, &y, MetricKind::AlignMin).unwrap();
        let res = (x.matrix() - y.matrix() * &u).norm();
        assert!((res - d).abs() <= 1e-10 * (1.0 + d), "aligner residual {res} vs D {d}");
    }
}

#[test]
fn aligner_inverts_exact_rotations() {
    let mut rng = rng(37);
    let x = random_point(&mut rng, 4, 2);
    let v = haar(&mut rng, 2);
    let y = wrap(x.matrix() * &v);
    let u = align(&x, &y).unwrap();
    // x^* y U = x^* x >= 0 forces U = V^*.
    assert!((&u - v.adjoint()).norm() < 1e-10);
}

#[test]
fn embedding_lipschitz_chains() {
    let mut rng = rng(41);
    let inv_sqrt2 = 0.5_f64.sqrt();
    for case in 0..300 {
        let n = 2 + (case % 3);
        let r = 1 + (case % 3).min(n - 1);
        let x = random_point(&mut rng, n, r);
        let y = random_point(&mut rng, n, r);
        let (dmin, dprod, _) = d_all(&x, &y);

        let theta_gap = (embed(&x, EmbeddingKind::Theta).matrix()
            - embed(&y, EmbeddingKind::Theta).matrix())
        .norm();
        let slack = 1e-9 * (1.0 + theta_gap);
        assert!(inv_sqrt2 * theta_gap <= dmin + slack);
        assert!(dmin <= theta_gap + slack);

        let pi_gap_m = embed(&x, EmbeddingKind::Pi).matrix() - embed(&y, EmbeddingKind::Pi).matrix();
        let pi_fro = pi_gap_m.norm();
        let pi_nuc: f64 = pi_gap_m.svd(false, false).singular_values.iter().sum();
        let psi_gap = (embed(&x, EmbeddingKind::Psi).matrix()
            - embed(&y, EmbeddingKind::Psi).matrix())
        .norm();
        let c_r = if r == 1 { 2.0_f64.sqrt() } else { 2.0 };
        let slack = 1e-9 * (1.0 + dprod);
        assert!(pi_fro <= pi_nuc + slack);
        assert!(pi_nuc <= dprod + slack);
        assert!(dprod <= c_r * psi_gap + slack);
    }
}

#[test]
fn refined_psi_inequality() {
    let mut rng = rng(47);
    for case in 0..200 {
        let n = 2 + (case % 3);
        let r = 1 + (case % 3).min(n - 1);
        let x = random_point(&mut rng, n, r);
        let y = random_point(&mut rng, n, r);
        let (dmin, dprod, _) = d_all(&x, &y);
        let psi_gap2 = (embed(&x, EmbeddingKind::Psi).matrix()
            - embed(&y, EmbeddingKind::Psi).matrix())
        .norm_squared();
        let s = framestab::quotient::nuclear_norm_product(&x, &y).unwrap();
        let (nx, ny) = (x.norm(), y.norm());
        let rhs = 0.25 * dprod * dprod
            + 0.25 * dmin.powi(4)
            + (nx - ny).powi(2) * (s + 0.5 * (nx + ny).powi(2));
        assert!(
            psi_gap2 >= rhs - 1e-9 * (1.0 + rhs),
            "refined inequality violated: {psi_gap2} < {rhs}"
        );
    }
}

#[test]
fn extremal_sequence_for_theta_lower_constant() {
    // x = e1, y_j = sqrt(1 - 1/j^2) e1 + (1/j) e2 drives D^2 / ||theta gap||^2
    // to 1/2.
    let j = 2.0_f64.powi(12);
    let x = wrap(CMat::from_fn(2, 1, |i, _| {
        C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)
    }));
    let y = wrap(CMat::from_fn(2, 1, |i, _| {
        let v = if i == 0 {
            (1.0 - 1.0 / (j * j)).sqrt()
        } else {
            1.0 / j
        };
        C64::new(v, 0.0)
    }));
    let d = distance(&x, &y, MetricKind::AlignMin).unwrap();
    let theta_gap = (embed(&x, EmbeddingKind::Theta).matrix()
        - embed(&y, EmbeddingKind::Theta).matrix())
    .norm();
    let ratio = d * d / (theta_gap * theta_gap);
    assert!((ratio - 0.5).abs() < 1e-3, "ratio {ratio}");
}

#[test]
fn extremal_sequence_for_psi_upper_constant() {
    // x = [e1 | 0], y_j = [sqrt(1-1/j^2) e1 | (1/j) e2] drives
    // ||psi gap||^2 / d^2 to 1/4.
    let j = 2.0_f64.powi(12);
    let x = wrap(CMat::from_fn(2, 2, |i, c| {
        C64::new(if i == 0 && c == 0 { 1.0 } else { 0.0 }, 0.0)
    }));
    let y = wrap(CMat::from_fn(2, 2, |i, c| {
        let v = match (i, c) {
            (0, 0) => (1.0 - 1.0 / (j * j)).sqrt(),
            (1, 1) => 1.0 / j,
            _ => 0.0,
        };
        C64::new(v, 0.0)
    }));
    let dprod = distance(&x, &y, MetricKind::AlignProduct).unwrap();
    let psi_gap2 = (embed(&x, EmbeddingKind::Psi).matrix()
        - embed(&y, EmbeddingKind::Psi).matrix())
    .norm_squared();
    let ratio = psi_gap2 / (dprod * dprod);
    assert!((ratio - 0.25).abs() < 1e-3, "ratio {ratio}");
}

#[test]
fn no_uniform_constant_bounds_product_metric_by_gram_gap() {
    // Common singular vectors, sigma_1 = mu_1 = delta growing: the ratio
    // d / ||pi gap|| grows without bound for r > 1.
    let mut prev_ratio = 0.0;
    for &delta in &[1.0, 10.0, 100.0] {
        let x = wrap(CMat::from_fn(3, 2, |i, c| {
            let v = match (i, c) {
                (0, 0) => delta,
                (1, 1) => 1.0,
                _ => 0.0,
            };
            C64::new(v, 0.0)
        }));
        let y = wrap(CMat::from_fn(3, 2, |i, c| {
            let v = match (i, c) {
                (0, 0) => delta,
                (1, 1) => 2.0,
                _ => 0.0,
            };
            C64::new(v, 0.0)
        }));
        let d = distance(&x, &y, MetricKind::AlignProduct).unwrap();
        let pi_gap = (x.gram_lift() - y.gram_lift()).norm();
        let ratio = d / pi_gap;
        assert!(ratio > prev_ratio * 2.0, "ratio saturated: {ratio} after {prev_ratio}");
        prev_ratio = ratio;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_vanishes_on_orbit(seed in 0u64..1 << 20) {
        let mut rng = rng(seed);
        let n = 2 + (seed % 3) as usize;
        let r = 1 + (seed % 2) as usize;
        let x = wrap(gaussian_complex(&mut rng, n, r));
        let u = haar(&mut rng, r);
        let y = wrap(x.matrix() * &u);
        // The aligned residual is the numerically sharp evaluator near zero.
        let a = align(&x, &y).unwrap();
        let residual = (x.matrix() - y.matrix() * &a).norm();
        prop_assert!(residual <= 1e-8 * (1.0 + x.norm()));
        for kind in [MetricKind::AlignMin, MetricKind::AlignProduct] {
            let d = distance(&x, &y, kind).unwrap();
            prop_assert!(d <= 1e-6 * (1.0 + x.norm().powi(2)));
        }
    }

    #[test]
    fn symmetry_of_distances(seed in 0u64..1 << 20) {
        let mut rng = rng(seed.wrapping_add(77));
        let n = 2 + (seed % 3) as usize;
        let r = 1 + (seed % 2) as usize;
        let x = wrap(gaussian_complex(&mut rng, n, r));
        let y = wrap(gaussian_complex(&mut rng, n, r));
        for kind in [MetricKind::AlignMin, MetricKind::AlignProduct, MetricKind::AlignMax] {
            let dxy = distance(&x, &y, kind).unwrap();
            let dyx = distance(&y, &x, kind).unwrap();
            prop_assert!((dxy - dyx).abs() <= 1e-12 * (1.0 + dxy));
        }
    }
}
