#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rectiscope::DiscreteMeasure;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random orthogonal matrix (QR of a Gaussian matrix), row-major.
pub fn rotation(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    (0..m).map(|i| (0..m).map(|j| q[(i, j)]).collect()).collect()
}

/// `y ↦ s·Q·y + t`.
pub fn rigid<'a>(q: &'a [Vec<f64>], shift: &'a [f64], scale: f64) -> impl Fn(&[f64]) -> Vec<f64> + 'a {
    move |y: &[f64]| {
        q.iter()
            .zip(shift)
            .map(|(row, t)| scale * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + t)
            .collect()
    }
}

pub fn gaussian_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

/// `count` uniform points of `[0,1]^m` with weights in `[0.5, 1.5)/count`.
pub fn random_cloud(rng: &mut ChaCha8Rng, count: usize, m: usize, n: usize) -> DiscreteMeasure {
    let points: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
        .collect();
    let weights = (0..count).map(|_| rng.random_range(0.5..1.5) / count as f64).collect();
    DiscreteMeasure::from_points(&points, weights, n).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
