mod common;

use common::{gaussian_point, random_cloud, rel_close, rigid, rng, rotation};
use proptest::prelude::*;
use rand::Rng;
use rectiscope::beta::plane_objective;
use rectiscope::{
    beta2, beta2_centered, beta_p, generate, jones_function, AffineSubspace, BetaVariant, DiscreteMeasure,
    GeneratorSpec, ScaleConfig,
};

/// `Σ wᵢ dist(yᵢ, line)^p` for the line through `c·(−sin θ, cos θ)` with
/// direction `(cos θ, sin θ)`.
fn line_objective(points: &[[f64; 2]], weights: &[f64], theta: f64, c: f64, p: f64) -> f64 {
    let normal = [-theta.sin(), theta.cos()];
    points
        .iter()
        .zip(weights)
        .map(|(y, w)| w * (y[0] * normal[0] + y[1] * normal[1] - c).abs().powf(p))
        .sum()
}

/// Coarse-to-fine search over (angle, offset): ten levels of 100 × 100 lines.
fn grid_min(points: &[[f64; 2]], weights: &[f64], p: f64) -> f64 {
    let reach = points.iter().map(|y| y[0].hypot(y[1])).fold(0.0, f64::max);
    let (mut theta0, mut c0) = (std::f64::consts::FRAC_PI_2, 0.0);
    let (mut half_theta, mut half_c) = (std::f64::consts::FRAC_PI_2, reach);
    let mut best = f64::INFINITY;
    for _ in 0..10 {
        let mut level = (f64::INFINITY, theta0, c0);
        for i in 0..100 {
            let theta = theta0 - half_theta + 2.0 * half_theta * (i as f64 + 0.5) / 100.0;
            for j in 0..100 {
                let c = c0 - half_c + 2.0 * half_c * (j as f64 + 0.5) / 100.0;
                let v = line_objective(points, weights, theta, c, p);
                if v < level.0 {
                    level = (v, theta, c);
                }
            }
        }
        best = best.min(level.0);
        (theta0, c0) = (level.1, level.2);
        half_theta *= 0.5;
        half_c *= 0.5;
    }
    best
}

/// The raw objective `Σ w dist^p` recovered from a β value.
fn raw(beta: f64, r: f64, n: i32, p: f64) -> f64 {
    beta.powf(p) * r.powi(n) * r.powf(p)
}

#[test]
fn three_point_example_matches_grid_oracle() {
    let points = [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.1]];
    let weights = [1.0, 1.0, 1.0];
    let mu = DiscreteMeasure::from_points(&points.map(|p| p.to_vec()), weights.to_vec(), 1).unwrap();
    let exact = raw(beta2(&mu, &[0.0, 0.0], 2.0).unwrap().value, 2.0, 1, 2.0);
    let grid = grid_min(&points, &weights, 2.0);
    assert!(exact <= grid * (1.0 + 1e-12));
    assert!(rel_close(exact, grid, 1e-2), "{exact} vs {grid}");
    // Horizontal line through the centroid: 2(ε/3)² + (2ε/3)².
    assert!(rel_close(exact, 2.0 * 0.01 / 3.0, 1e-12));
}

#[test]
fn irls_beta_p_matches_grid_oracle() {
    let mut r = rng(15);
    for trial in 0..10 {
        let points: Vec<[f64; 2]> = (0..6).map(|_| [r.random::<f64>(), r.random::<f64>()]).collect();
        let weights: Vec<f64> = (0..6).map(|_| r.random_range(0.5..1.5)).collect();
        let mu = DiscreteMeasure::from_points(&points.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), weights.clone(), 1)
            .unwrap();
        let result = beta_p(&mu, &points[0], 2.0, 1.5).unwrap();
        let irls = raw(result.value, 2.0, 1, 1.5);
        let grid = grid_min(&points, &weights, 1.5);
        assert!(rel_close(irls, grid, 1e-2), "trial {trial}: {irls} vs {grid}");
    }
}

#[test]
fn exact_fit_beats_random_planes() {
    let mut r = rng(16);
    for (m, n) in [(3, 1), (3, 2), (4, 2)] {
        let mu = random_cloud(&mut r, 30, m, n);
        let x = mu.point(0).to_vec();
        let best = beta2(&mu, &x, 3.0).unwrap().value.powi(2);
        for _ in 0..20_000 {
            let base: Vec<f64> = (0..m).map(|_| r.random::<f64>()).collect();
            let frame: Vec<Vec<f64>> = (0..n).map(|_| gaussian_point(&mut r, m)).collect();
            let hull: Vec<Vec<f64>> = std::iter::once(base.clone())
                .chain(frame.iter().map(|d| base.iter().zip(d).map(|(a, b)| a + b).collect()))
                .collect();
            let plane: AffineSubspace = rectiscope::affine_hull(&hull).unwrap();
            if plane.dim() != n {
                continue;
            }
            let value = plane_objective(&mu, &x, 3.0, &plane, 2.0).unwrap();
            assert!(best <= value * (1.0 + 1e-12), "m={m} n={n}: {best} > {value}");
        }
    }
}

#[test]
fn p_two_matches_exact_solution() {
    let mut r = rng(17);
    for _ in 0..20 {
        let mu = random_cloud(&mut r, 25, 3, 1);
        let x = mu.point(3).to_vec();
        let exact = beta2(&mu, &x, 0.6).unwrap().value;
        let irls = beta_p(&mu, &x, 0.6, 2.0).unwrap().value;
        assert!((exact - irls).abs() <= 1e-8, "{exact} vs {irls}");
    }
}

#[test]
fn coplanar_points_give_zero_for_every_p() {
    let points: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 * 0.1, 0.5 - i as f64 * 0.03, 2.0]).collect();
    let mu = DiscreteMeasure::uniform(&points, 0.1, 1).unwrap();
    for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
        assert_eq!(beta_p(&mu, &points[4], 1.0, p).unwrap().value, 0.0);
    }
    assert_eq!(beta2_centered(&mu, &points[4], 1.0).unwrap().value, 0.0);
}

#[test]
fn cantor_jones_sums_grow_linearly() {
    let mu = generate(&GeneratorSpec::cantor4(6)).unwrap();
    let scales = ScaleConfig::new(1.0, 0.5, 10).unwrap();
    for c in (0..mu.len()).step_by(64) {
        let j = jones_function(&mu, mu.point(c), 0.0, &scales, BetaVariant::Uncentered, None).unwrap();
        for k in 4..=10 {
            let s = j.partial_sums[k - 1];
            assert!(s >= 0.0025 * k as f64, "center {c}, {k} scales: {s}");
        }
    }
}

fn moved(mu: &DiscreteMeasure, seed: u64, scale: f64) -> (DiscreteMeasure, impl Fn(&[f64]) -> Vec<f64>) {
    let m = mu.ambient_dim();
    let mut r = rng(seed);
    let q = rotation(&mut r, m);
    let shift = gaussian_point(&mut r, m);
    let f = move |y: &[f64]| rigid(&q, &shift, scale)(y);
    let image = mu
        .map_points(&f)
        .unwrap()
        .scale_weights(scale.powi(mu.intrinsic_dim() as i32))
        .unwrap();
    (image, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn beta_is_invariant_under_similarities(seed in any::<u64>(), n in 1usize..=2, scale in prop::sample::select(vec![1.0, 0.5, 2.0])) {
        let mut r = rng(seed);
        let mu = random_cloud(&mut r, 20, 3, n);
        let (image, f) = moved(&mu, seed ^ 7, scale);
        let x = mu.point(0);
        let fx = f(x);
        for radius in [0.3, 0.7] {
            let pairs = [
                (beta2(&mu, x, radius).unwrap().value, beta2(&image, &fx, scale * radius).unwrap().value),
                (
                    beta2_centered(&mu, x, radius).unwrap().value,
                    beta2_centered(&image, &fx, scale * radius).unwrap().value,
                ),
            ];
            for (a, b) in pairs {
                prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-3), "{a} vs {b}");
            }
            let a = beta_p(&mu, x, radius, 3.0).unwrap().value;
            let b = beta_p(&image, &fx, scale * radius, 3.0).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-6 * a.max(1e-3), "beta_3: {a} vs {b}");
        }
    }

    #[test]
    fn beta_orderings_hold(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mu = random_cloud(&mut r, 15, 2, 1);
        let x = mu.point(1);
        for radius in [1.0, 0.4] {
            let b2 = beta2(&mu, x, radius).unwrap();
            let slack = 1.0 + 1e-12;
            prop_assert!(b2.value <= beta2_centered(&mu, x, radius).unwrap().value * slack);
            for q in [1.0, 1.5] {
                prop_assert!(b2.value.powi(2) <= beta_p(&mu, x, radius, q).unwrap().value.powf(q) * slack);
            }
            for q in [3.0, 4.0] {
                let factor = (b2.ball_mass / radius).powf(0.5 - 1.0 / q);
                prop_assert!(b2.value <= factor * beta_p(&mu, x, radius, q).unwrap().value * slack);
            }
        }
    }
}
