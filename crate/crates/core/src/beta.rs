//! β-numbers: the `Lᵖ` distance of `μ⌞B(x,r)` from the best `n`-plane,
//! normalized as `(r⁻ⁿ ∫_{B(x,r)} (dist(y,L)/r)ᵖ dμ(y))^{1/p}`, and the Jones
//! square function built from them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affine_rank, AffineSubspace};
use crate::measure::DiscreteMeasure;
use crate::numeric::{norm, pairwise_sum, symmetric_eigen};
use crate::scales::{ScaleConfig, ScaleProfile};

/// Number of restarts for general `p`.
pub const IRLS_RESTARTS: usize = 8;
pub const IRLS_MAX_ITERATIONS: usize = 200;
pub const IRLS_RELATIVE_TOLERANCE: f64 = 1e-9;
const IRLS_SEED: u64 = 0x6265_7461_705f_6972;

#[derive(Debug, Clone, PartialEq)]
pub struct BetaResult {
    pub value: f64,
    pub plane: AffineSubspace,
    pub p: f64,
    pub centered: bool,
    /// The ball held no atoms; `value` is 0 by definition.
    pub empty: bool,
    /// False when the iterative solver hit its iteration cap.
    pub converged: bool,
    /// `μ(B(x, r))`.
    pub ball_mass: f64,
}

/// Whether competing planes are free or forced through the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaVariant {
    Uncentered,
    Centered,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be positive and finite, got {r}")));
    }
    Ok(())
}

struct BallSample<'a> {
    points: Vec<&'a [f64]>,
    weights: Vec<f64>,
}

fn ball_sample<'a>(mu: &'a DiscreteMeasure, x: &[f64], r: f64) -> BallSample<'a> {
    let idx = mu.ball_indices(x, r);
    BallSample {
        points: idx.iter().map(|&i| mu.point(i)).collect(),
        weights: idx.iter().map(|&i| mu.weight(i)).collect(),
    }
}

/// Weighted least-squares `n`-plane: through `through` when given, otherwise
/// through the weighted centroid; spanned by the top `n` eigenvectors of the
/// weighted second-moment matrix about the base point.
pub fn fit_plane(points: &[&[f64]], weights: &[f64], n: usize, through: Option<&[f64]>) -> AffineSubspace {
    let m = points[0].len();
    let base: Vec<f64> = match through {
        Some(b) => b.to_vec(),
        None => {
            let total = pairwise_sum(weights);
            (0..m)
                .map(|k| {
                    let terms: Vec<f64> = points.iter().zip(weights).map(|(p, w)| w * p[k]).collect();
                    pairwise_sum(&terms) / total
                })
                .collect()
        }
    };
    let mut moment = vec![0.0; m * m];
    for (p, w) in points.iter().zip(weights) {
        for a in 0..m {
            let da = p[a] - base[a];
            if da == 0.0 {
                continue;
            }
            for b in a..m {
                moment[a * m + b] += w * da * (p[b] - base[b]);
            }
        }
    }
    for a in 0..m {
        for b in 0..a {
            moment[a * m + b] = moment[b * m + a];
        }
    }
    let (_, vectors) = symmetric_eigen(&moment, m);
    let mut vectors = vectors.into_iter();
    let frame: Vec<Vec<f64>> = vectors.by_ref().take(n).collect();
    let normals: Vec<Vec<f64>> = vectors.collect();
    AffineSubspace::from_parts(base, frame, normals)
}

fn objective_of(sample: &BallSample<'_>, plane: &AffineSubspace, r: f64, n: usize, p: f64) -> f64 {
    let terms: Vec<f64> = sample
        .points
        .iter()
        .zip(&sample.weights)
        .map(|(y, w)| w * (plane.distance(y) / r).powf(p))
        .collect();
    pairwise_sum(&terms) / r.powi(n as i32)
}

/// The β objective `r⁻ⁿ Σ_{|xᵢ−x|≤r} wᵢ (dist(xᵢ, L)/r)ᵖ` for a given plane
/// (no `1/p` root).
pub fn plane_objective(mu: &DiscreteMeasure, x: &[f64], r: f64, plane: &AffineSubspace, p: f64) -> Result<f64> {
    mu.check_point(x)?;
    check_radius(r)?;
    if plane.ambient_dim() != mu.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.ambient_dim(),
            actual: plane.ambient_dim(),
        });
    }
    let sample = ball_sample(mu, x, r);
    Ok(objective_of(&sample, plane, r, mu.intrinsic_dim(), p))
}

fn empty_result(mu: &DiscreteMeasure, x: &[f64], p: f64, centered: bool) -> Result<BetaResult> {
    Ok(BetaResult {
        value: 0.0,
        plane: AffineSubspace::coordinate(x.to_vec(), mu.intrinsic_dim())?,
        p,
        centered,
        empty: true,
        converged: true,
        ball_mass: 0.0,
    })
}

fn beta2_impl(mu: &DiscreteMeasure, x: &[f64], r: f64, centered: bool) -> Result<BetaResult> {
    mu.check_point(x)?;
    check_radius(r)?;
    let sample = ball_sample(mu, x, r);
    if sample.points.is_empty() {
        return empty_result(mu, x, 2.0, centered);
    }
    let n = mu.intrinsic_dim();
    let plane = fit_plane(&sample.points, &sample.weights, n, centered.then_some(x));
    let value = if is_flat(&sample, centered.then_some(x), n) {
        0.0
    } else {
        objective_of(&sample, &plane, r, n, 2.0).sqrt()
    };
    Ok(BetaResult {
        value,
        plane,
        p: 2.0,
        centered,
        empty: false,
        converged: true,
        ball_mass: pairwise_sum(&sample.weights),
    })
}

/// Exact `β₂(x, r)`: the optimal plane passes through the weighted centroid of
/// `μ⌞B(x,r)` and is spanned by the top `n` covariance eigenvectors.
pub fn beta2(mu: &DiscreteMeasure, x: &[f64], r: f64) -> Result<BetaResult> {
    beta2_impl(mu, x, r, false)
}

/// Exact centered `β̂₂(x, r)`: infimum over `n`-planes through `x`.
pub fn beta2_centered(mu: &DiscreteMeasure, x: &[f64], r: f64) -> Result<BetaResult> {
    beta2_impl(mu, x, r, true)
}

pub fn beta2_variant(mu: &DiscreteMeasure, x: &[f64], r: f64, variant: BetaVariant) -> Result<BetaResult> {
    beta2_impl(mu, x, r, variant == BetaVariant::Centered)
}

/// Whether the ball's atoms (and `through`, if given) span an affine set of
/// dimension at most `n`, decided with the same relative rank tolerance as
/// `h_min`. Such samples lie on an admissible plane, so β is exactly 0.
fn is_flat(sample: &BallSample<'_>, through: Option<&[f64]>, n: usize) -> bool {
    let mut points: Vec<&[f64]> = Vec::with_capacity(sample.points.len() + 1);
    points.extend(through);
    points.extend(sample.points.iter().copied());
    points.len() <= n + 1 || affine_rank(&points).is_ok_and(|k| k <= n)
}

/// A restart plane: the hull of `n + 1` atoms drawn by seeded index, widened
/// with the `p = 2` plane's directions when the atoms are dependent. Built
/// from the data alone, so restarts move with the input under similarities.
fn random_plane(rng: &mut ChaCha8Rng, sample: &BallSample<'_>, seed_plane: &AffineSubspace, n: usize) -> AffineSubspace {
    let count = sample.points.len();
    let picks = rand::seq::index::sample(rng, count, (n + 1).min(count)).into_vec();
    let base = sample.points[picks[0]].to_vec();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    let candidates = picks[1..]
        .iter()
        .map(|&i| sample.points[i].iter().zip(&base).map(|(a, b)| a - b).collect::<Vec<f64>>())
        .chain(seed_plane.frame().iter().cloned())
        .chain(seed_plane.normals().iter().cloned());
    for mut v in candidates {
        if frame.len() == n {
            break;
        }
        let scale = norm(&v);
        for _ in 0..2 {
            for b in &frame {
                let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(b).for_each(|(vk, bk)| *vk -= c * bk);
            }
        }
        let len = norm(&v);
        if len > 1e-8 * scale && len > 0.0 {
            v.iter_mut().for_each(|c| *c /= len);
            frame.push(v);
        }
    }
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let m = base.len();
    let axes = seed_plane.normals().iter().chain(seed_plane.frame()).cloned();
    for mut v in axes {
        if frame.len() + normals.len() == m {
            break;
        }
        for _ in 0..2 {
            for b in frame.iter().chain(&normals) {
                let c: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(b).for_each(|(vk, bk)| *vk -= c * bk);
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            v.iter_mut().for_each(|c| *c /= len);
            normals.push(v);
        }
    }
    AffineSubspace::from_parts(base, frame, normals)
}

struct IrlsRun {
    objective: f64,
    plane: AffineSubspace,
    converged: bool,
}

fn irls(sample: &BallSample<'_>, start: AffineSubspace, r: f64, n: usize, p: f64) -> IrlsRun {
    let floor = 1e-9 * r;
    let mut plane = start;
    let mut current = objective_of(sample, &plane, r, n, p);
    let mut best = IrlsRun {
        objective: current,
        plane: plane.clone(),
        converged: false,
    };
    for _ in 0..IRLS_MAX_ITERATIONS {
        if current == 0.0 {
            best.converged = true;
            break;
        }
        let reweighted: Vec<f64> = sample
            .points
            .iter()
            .zip(&sample.weights)
            .map(|(y, w)| w * plane.distance(y).max(floor).powf(p - 2.0))
            .collect();
        plane = fit_plane(&sample.points, &reweighted, n, None);
        let next = objective_of(sample, &plane, r, n, p);
        if next < best.objective {
            best.objective = next;
            best.plane = plane.clone();
        }
        let change = (current - next).abs();
        current = next;
        if change <= IRLS_RELATIVE_TOLERANCE * current.max(f64::MIN_POSITIVE) {
            best.converged = true;
            break;
        }
    }
    best
}

/// `β_p(x, r)` for `p ≥ 1` by iteratively reweighted least squares, seeded at
/// the `p = 2` plane plus [`IRLS_RESTARTS`] planes through seeded random atoms. The
/// returned value is an upper bound for the exact infimum.
pub fn beta_p(mu: &DiscreteMeasure, x: &[f64], r: f64, p: f64) -> Result<BetaResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must lie in [1, ∞), got {p}")));
    }
    mu.check_point(x)?;
    check_radius(r)?;
    let sample = ball_sample(mu, x, r);
    if sample.points.is_empty() {
        return empty_result(mu, x, p, false);
    }
    let n = mu.intrinsic_dim();
    let seed_plane = fit_plane(&sample.points, &sample.weights, n, None);
    if is_flat(&sample, None, n) {
        return Ok(BetaResult {
            value: 0.0,
            plane: seed_plane,
            p,
            centered: false,
            empty: false,
            converged: true,
            ball_mass: pairwise_sum(&sample.weights),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(IRLS_SEED);
    let mut starts = vec![seed_plane];
    for _ in 0..IRLS_RESTARTS {
        starts.push(random_plane(&mut rng, &sample, &starts[0], n));
    }
    let mut best: Option<IrlsRun> = None;
    for start in starts {
        let run = irls(&sample, start, r, n, p);
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(BetaResult {
        value: best.objective.powf(1.0 / p),
        plane: best.plane,
        p,
        centered: false,
        empty: false,
        converged: best.converged,
        ball_mass: pairwise_sum(&sample.weights),
    })
}

/// A Jones square function evaluation with its per-scale β profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JonesResult {
    pub value: f64,
    /// β₂ (or β̂₂) at each radius.
    pub profile: ScaleProfile,
    /// Running sums of the per-scale terms.
    pub partial_sums: Vec<f64>,
    /// Scales whose ball held no atoms.
    pub empty_scales: Vec<bool>,
    pub variant: BetaVariant,
    pub dini_gamma: Option<f64>,
}

/// `Σ_j β₂(x, r_j)² / r_j^{2α}` over the ladder `scales`.
///
/// With `dini_gamma = Some(γ)` (only for `α = 1`, `γ > 1/2`) the denominator
/// radius becomes `r_j·log(1/r_j)^{−γ}`, which needs every `r_j < 1`.
pub fn jones_function(
    mu: &DiscreteMeasure,
    x: &[f64],
    alpha: f64,
    scales: &ScaleConfig,
    variant: BetaVariant,
    dini_gamma: Option<f64>,
) -> Result<JonesResult> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must lie in [0, 1], got {alpha}")));
    }
    scales.validate()?;
    if let Some(gamma) = dini_gamma {
        if alpha != 1.0 {
            return Err(Error::param("dini_gamma", "the Dini-weighted variant requires alpha = 1"));
        }
        if !(gamma > 0.5 && gamma.is_finite()) {
            return Err(Error::param("dini_gamma", format!("must exceed 1/2, got {gamma}")));
        }
        if scales.r0 >= 1.0 {
            return Err(Error::param("dini_gamma", "all radii must be below 1"));
        }
    }
    mu.check_point(x)?;
    let radii = scales.radii();
    let results: Vec<BetaResult> = radii
        .par_iter()
        .map(|&r| beta2_variant(mu, x, r, variant))
        .collect::<Result<_>>()?;
    let mut partial_sums = Vec::with_capacity(radii.len());
    let mut terms = Vec::with_capacity(radii.len());
    for (res, &r) in results.iter().zip(&radii) {
        let effective = match dini_gamma {
            Some(gamma) => r * (1.0 / r).ln().powf(-gamma),
            None => r,
        };
        terms.push(res.value * res.value / effective.powf(2.0 * alpha));
        partial_sums.push(pairwise_sum(&terms));
    }
    let values = results.iter().map(|b| b.value).collect();
    Ok(JonesResult {
        value: partial_sums.last().copied().unwrap_or(0.0),
        profile: ScaleProfile::new(radii, values, alpha, scales.ratio)?,
        partial_sums,
        empty_scales: results.iter().map(|b| b.empty).collect(),
        variant,
        dini_gamma,
    })
}
