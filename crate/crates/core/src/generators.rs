//! Synthetic measures with known regularity: flat patches, smooth and Hölder
//! graphs, the unit circle and the four-corner Cantor set.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::numeric::norm;

/// Number of terms in the Weierstrass-type series.
pub const SERIES_TERMS: i32 = 12;
pub const MAX_CANTOR_LEVEL: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Plane,
    LipschitzGraph,
    HolderGraph,
    Circle,
    Cantor4,
    PerturbedPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// Parameter-domain volume split equally among the atoms.
    #[default]
    Uniform,
    /// Parameter cell volume times the surface element of the parametrization.
    Area,
}

/// Everything needed to reproduce a synthetic measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub m: usize,
    /// Number of atoms; for `n ≥ 2` grids use `round(count^{1/n})` per side.
    pub count: usize,
    /// Cantor level.
    pub level: u32,
    /// Hölder exponent of `holder_graph`.
    pub alpha: f64,
    /// Maximal displacement of `perturbed_plane`.
    pub noise: f64,
    pub seed: u64,
    pub weights: WeightScheme,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Plane,
            n: 1,
            m: 2,
            count: 256,
            level: 4,
            alpha: 0.5,
            noise: 0.01,
            seed: 0,
            weights: WeightScheme::Uniform,
        }
    }
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        GeneratorSpec {
            kind,
            ..Self::default()
        }
    }

    pub fn plane(n: usize, m: usize, count: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Plane,
            n,
            m,
            count,
            seed,
            ..Self::default()
        }
    }

    pub fn circle(count: usize) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Circle,
            count,
            ..Self::default()
        }
    }

    pub fn holder_graph(alpha: f64, count: usize) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::HolderGraph,
            alpha,
            count,
            ..Self::default()
        }
    }

    pub fn cantor4(level: u32) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Cantor4,
            level,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > self.m || self.m == 0 {
            return Err(Error::param("n", format!("need n ≤ m and m ≥ 1, got n = {}, m = {}", self.n, self.m)));
        }
        let needs_count = !matches!(self.kind, GeneratorKind::Cantor4);
        if needs_count && self.count == 0 {
            return Err(Error::param("count", "must be positive"));
        }
        match self.kind {
            GeneratorKind::Plane | GeneratorKind::PerturbedPlane => {
                if self.n == 0 {
                    return Err(Error::param("n", "plane patches need n ≥ 1"));
                }
                if self.kind == GeneratorKind::PerturbedPlane && !(self.noise >= 0.0 && self.noise.is_finite()) {
                    return Err(Error::param("noise", "must be nonnegative"));
                }
            }
            GeneratorKind::LipschitzGraph | GeneratorKind::HolderGraph => {
                if self.n == 0 || self.m < self.n + 1 {
                    return Err(Error::param("m", "graphs need n ≥ 1 and m ≥ n + 1"));
                }
                if self.kind == GeneratorKind::HolderGraph && !(self.alpha > 0.0 && self.alpha < 1.0) {
                    return Err(Error::param("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
                }
            }
            GeneratorKind::Circle => {
                if self.m < 2 || self.n != 1 {
                    return Err(Error::param("m", "the circle needs n = 1 and m ≥ 2"));
                }
            }
            GeneratorKind::Cantor4 => {
                if self.m < 2 || self.n != 1 {
                    return Err(Error::param("m", "the Cantor set needs n = 1 and m ≥ 2"));
                }
                if self.level > MAX_CANTOR_LEVEL {
                    return Err(Error::param("level", format!("at most {MAX_CANTOR_LEVEL}")));
                }
            }
        }
        Ok(())
    }

    fn graph_alpha(&self) -> f64 {
        match self.kind {
            GeneratorKind::HolderGraph => self.alpha,
            _ => 0.0,
        }
    }
}

/// `Σ_{j=1}^{12} 2^{−j(1+α)} cos(2ʲ t)`.
pub fn weierstrass(t: f64, alpha: f64) -> f64 {
    (1..=SERIES_TERMS)
        .map(|j| 2f64.powf(-(j as f64) * (1.0 + alpha)) * (2f64.powi(j) * t).cos())
        .sum()
}

/// Derivative of [`weierstrass`].
pub fn weierstrass_derivative(t: f64, alpha: f64) -> f64 {
    (1..=SERIES_TERMS)
        .map(|j| -(2f64.powf(-(j as f64) * alpha)) * (2f64.powi(j) * t).sin())
        .sum()
}

fn grid_side(count: usize, n: usize) -> usize {
    if n == 1 {
        count
    } else {
        ((count as f64).powf(1.0 / n as f64).round() as usize).max(1)
    }
}

/// Cell-midpoint parameters of an `side^n` grid over `[0, 1]ⁿ`, row-major.
fn midpoint_grid(side: usize, n: usize) -> Vec<Vec<f64>> {
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut t = vec![0.0; n];
            for k in (0..n).rev() {
                t[k] = ((idx % side) as f64 + 0.5) / side as f64;
                idx /= side;
            }
            t
        })
        .collect()
}

fn embed(t: &[f64], m: usize) -> Vec<f64> {
    let mut p = vec![0.0; m];
    p[..t.len()].copy_from_slice(t);
    p
}

fn jittered_plane(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, f64) {
    let side = grid_side(spec.count, spec.n);
    let h = 1.0 / side as f64;
    let points = midpoint_grid(side, spec.n)
        .into_iter()
        .map(|t| {
            let jittered: Vec<f64> = t.iter().map(|c| c + h * (rng.random::<f64>() - 0.5) * 0.5).collect();
            embed(&jittered, spec.m)
        })
        .collect();
    (points, h.powi(spec.n as i32))
}

fn random_direction(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

/// Builds the measure described by `spec`; identical specs give identical
/// measures.
pub fn generate(spec: &GeneratorSpec) -> Result<DiscreteMeasure> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = match spec.kind {
        GeneratorKind::Plane => {
            let (points, cell) = jittered_plane(spec, &mut rng);
            let w = vec![cell; points.len()];
            (points, w)
        }
        GeneratorKind::PerturbedPlane => {
            let (mut points, cell) = jittered_plane(spec, &mut rng);
            for p in &mut points {
                let dir = random_direction(&mut rng, spec.m);
                let size = spec.noise * rng.random::<f64>();
                p.iter_mut().zip(&dir).for_each(|(c, d)| *c += size * d);
            }
            let w = vec![cell; points.len()];
            (points, w)
        }
        GeneratorKind::LipschitzGraph | GeneratorKind::HolderGraph => {
            let alpha = spec.graph_alpha();
            let side = grid_side(spec.count, spec.n);
            let cell = (1.0 / side as f64).powi(spec.n as i32);
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for t in midpoint_grid(side, spec.n) {
                let mut p = embed(&t, spec.m);
                p[spec.n] = t.iter().map(|&c| weierstrass(c, alpha)).sum();
                let w = match spec.weights {
                    WeightScheme::Uniform => cell,
                    WeightScheme::Area => {
                        let grad2: f64 = t.iter().map(|&c| weierstrass_derivative(c, alpha).powi(2)).sum();
                        cell * (1.0 + grad2).sqrt()
                    }
                };
                points.push(p);
                weights.push(w);
            }
            (points, weights)
        }
        GeneratorKind::Circle => {
            let points = (0..spec.count)
                .map(|i| {
                    let a = TAU * i as f64 / spec.count as f64;
                    embed(&[a.cos(), a.sin()], spec.m)
                })
                .collect::<Vec<_>>();
            let w = vec![TAU / spec.count as f64; spec.count];
            (points, w)
        }
        GeneratorKind::Cantor4 => {
            let points = cantor4_centers(spec.level)
                .into_iter()
                .map(|c| embed(&c, spec.m))
                .collect::<Vec<_>>();
            let w = vec![4f64.powi(-(spec.level as i32)); points.len()];
            (points, w)
        }
    };
    DiscreteMeasure::from_points(&points, weights, spec.n)
}

/// Centers of the `4^L` level-`L` squares of the four-corner Cantor set in
/// `[0, 1]²` (maps `z ↦ z/4 + (3/4)c` for the corners `c` of the unit square).
pub fn cantor4_centers(level: u32) -> Vec<[f64; 2]> {
    let mut centers = vec![[0.5, 0.5]];
    for _ in 0..level {
        let mut next = Vec::with_capacity(centers.len() * 4);
        for corner in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
            for c in &centers {
                next.push([c[0] / 4.0 + 0.75 * corner[0], c[1] / 4.0 + 0.75 * corner[1]]);
            }
        }
        centers = next;
    }
    centers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::dist;
    use approx::assert_relative_eq;

    #[test]
    fn cantor_counts_and_separation() {
        let mu = generate(&GeneratorSpec::cantor4(3)).unwrap();
        assert_eq!(mu.len(), 64);
        assert!(mu.weights().iter().all(|&w| w == 1.0 / 64.0));
        let mut min = f64::INFINITY;
        for i in 0..mu.len() {
            for j in 0..i {
                min = min.min(dist(mu.point(i), mu.point(j)));
            }
        }
        assert_relative_eq!(min, 3.0 / 64.0, max_relative = 1e-12);
    }

    #[test]
    fn circle_points_are_equispaced() {
        let mu = generate(&GeneratorSpec::circle(40)).unwrap();
        for i in 0..40 {
            assert_relative_eq!(norm(mu.point(i)), 1.0, max_relative = 1e-15);
            let a = mu.point(i)[1].atan2(mu.point(i)[0]).rem_euclid(TAU);
            assert_relative_eq!(a, TAU * i as f64 / 40.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn deterministic_and_validated() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::PerturbedPlane,
            n: 2,
            m: 3,
            count: 100,
            seed: 5,
            ..GeneratorSpec::default()
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.len(), 100);
        assert!(generate(&GeneratorSpec::holder_graph(1.0, 10)).is_err());
        assert!(generate(&GeneratorSpec { m: 1, ..GeneratorSpec::circle(10) }).is_err());
    }

    #[test]
    fn plane_is_coordinate_flat() {
        let mu = generate(&GeneratorSpec::plane(2, 4, 64, 3)).unwrap();
        assert!(mu.points().all(|p| p[2] == 0.0 && p[3] == 0.0));
        assert_relative_eq!(mu.total_mass(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn area_weights_exceed_uniform() {
        let base = GeneratorSpec::holder_graph(0.5, 64);
        let u = generate(&base).unwrap();
        let a = generate(&GeneratorSpec {
            weights: WeightScheme::Area,
            ..base
        })
        .unwrap();
        assert!(a.total_mass() > u.total_mass());
    }
}
