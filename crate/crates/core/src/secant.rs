//! Secant frames: `n` atoms `x_{1,r}, …, x_{n,r}` of `B(x, r)` that span a
//! quantitatively non-degenerate `n`-plane through `x` and carry mass in the
//! small balls `B_{i,r} = B(x_{i,r}, 5ηr)`.
//!
//! Frames are built greedily: each new point maximizes its distance to the
//! affine hull of `x` and the points already chosen.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affine_hull, h_min, h_min_vertex, simplex_volume};
use crate::measure::{within_closed_ball, DiscreteMeasure};
use crate::numeric::{dist, norm};

/// Density constants of the secant construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecantConfig {
    /// Lower mass constant: `μ(B(x, r)) ≥ λrⁿ`.
    pub lambda: f64,
    /// Upper-regularity constant `C₀`.
    pub c0: f64,
    /// The exponent `k` in `δ = λ / (2^{k+2} 5^{n−1} C₀)`.
    pub k_exponent: u32,
    pub n: usize,
    pub m: usize,
}

impl SecantConfig {
    pub fn new(lambda: f64, c0: f64, k_exponent: u32, n: usize, m: usize) -> Result<Self> {
        let cfg = SecantConfig {
            lambda,
            c0,
            k_exponent,
            n,
            m,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", "must be positive"));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::param("c0", "must be positive"));
        }
        if self.lambda > self.c0 {
            return Err(Error::param("lambda", format!("must not exceed c0 ({} > {})", self.lambda, self.c0)));
        }
        if self.k_exponent == 0 {
            return Err(Error::param("k_exponent", "must be a positive integer"));
        }
        if self.n == 0 || self.n > self.m {
            return Err(Error::param("n", format!("need 1 ≤ n ≤ m, got n = {}, m = {}", self.n, self.m)));
        }
        Ok(())
    }

    fn check_measure(&self, mu: &DiscreteMeasure) -> Result<()> {
        if mu.ambient_dim() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: mu.ambient_dim(),
            });
        }
        if mu.intrinsic_dim() != self.n {
            return Err(Error::param(
                "n",
                format!("config n = {} but measure has intrinsic dimension {}", self.n, mu.intrinsic_dim()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecantConstants {
    pub delta: f64,
    pub eta: f64,
    pub c2: f64,
}

/// `δ = λ/(2^{k+2}·5^{n−1}·C₀)`, `η = δ/(10n)`, `C₂ = λη^m/2^{m+1}`.
pub fn theoretical_constants(cfg: &SecantConfig) -> SecantConstants {
    let n = cfg.n as i32;
    let delta = cfg.lambda / (2f64.powi(cfg.k_exponent as i32 + 2) * 5f64.powi(n - 1) * cfg.c0);
    let eta = delta / (10.0 * cfg.n as f64);
    let c2 = cfg.lambda * eta.powi(cfg.m as i32) / 2f64.powi(cfg.m as i32 + 1);
    SecantConstants { delta, eta, c2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecantMode {
    /// Candidates must carry `C₂rⁿ` in their `5ηr`-ball; the frame must reach
    /// `h_min ≥ δr`.
    Theoretical,
    /// Best frame by distance × local mass, reported with its achieved `δ̂`.
    Empirical,
}

/// A frame property that a theoretical-mode construction missed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameFailure {
    /// No atom of the ball carries enough mass in its `5ηr`-ball.
    NoCandidate { step: usize, required_mass: f64 },
    SpreadTooSmall { achieved: f64, required: f64 },
    InsufficientBallMass { ball: usize, mass: f64, required: f64 },
}

impl fmt::Display for FrameFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameFailure::NoCandidate { step, required_mass } => {
                write!(f, "no candidate for point {step} carries mass {required_mass:e}")
            }
            FrameFailure::SpreadTooSmall { achieved, required } => {
                write!(f, "h_min/r = {achieved:e} below required {required:e}")
            }
            FrameFailure::InsufficientBallMass { ball, mass, required } => {
                write!(f, "ball {ball} has mass {mass:e} < {required:e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecantFrame {
    pub base: Vec<f64>,
    pub r: f64,
    pub mode: SecantMode,
    pub points: Vec<Vec<f64>>,
    pub point_indices: Vec<usize>,
    /// Achieved ratio `h_min(x, x_{1,r}, …, x_{n,r}) / r`.
    pub delta: f64,
    /// The `η` defining the balls: theoretical `η` or `δ̂/(10n)`.
    pub eta: f64,
    /// `5ηr`.
    pub ball_radius: f64,
    /// `(μ⌞B(x,r))(B_{i,r})` per ball.
    pub masses: Vec<f64>,
    pub ball_mass: f64,
    pub constants: SecantConstants,
    pub config: SecantConfig,
}

impl SecantFrame {
    /// The `δ` the frame properties are stated with: the theoretical value
    /// in theoretical mode, the achieved one in empirical mode.
    pub fn bound_delta(&self) -> f64 {
        match self.mode {
            SecantMode::Theoretical => self.constants.delta,
            SecantMode::Empirical => self.delta,
        }
    }

    /// The same frame with balls of radius `5·eta·r`.
    pub fn with_eta(&self, eta: f64) -> SecantFrame {
        SecantFrame {
            eta,
            ball_radius: 5.0 * eta * self.r,
            ..self.clone()
        }
    }

    /// Whether `ys[i] ∈ B_{i,r}` for every `i`.
    pub fn contains_tuple<P: AsRef<[f64]>>(&self, ys: &[P]) -> bool {
        ys.len() == self.points.len()
            && ys
                .iter()
                .zip(&self.points)
                .all(|(y, c)| within_closed_ball(y.as_ref(), c, self.ball_radius))
    }
}

/// Mass of `μ⌞B(x,r)` in `B(c, radius)`.
fn local_mass(mu: &DiscreteMeasure, x: &[f64], r: f64, c: &[f64], radius: f64) -> f64 {
    let idx: Vec<usize> = mu
        .ball_indices(c, radius)
        .into_iter()
        .filter(|&i| within_closed_ball(mu.point(i), x, r))
        .collect();
    mu.mass_of(&idx)
}

/// Greedy secant frame for `μ` at `(x, r)`.
///
/// Candidates are the atoms of `B(x, r)`. Each step picks the candidate
/// maximizing the distance to `aff{x, chosen}` (theoretical mode, among
/// candidates whose `5ηr`-ball carries `C₂rⁿ`) or that distance times the
/// candidate's `5ηr`-ball mass (empirical mode). Ties go to the lowest index.
pub fn find_secant_frame(
    mu: &DiscreteMeasure,
    x: &[f64],
    r: f64,
    cfg: &SecantConfig,
    mode: SecantMode,
) -> Result<SecantFrame> {
    cfg.validate()?;
    cfg.check_measure(mu)?;
    mu.check_point(x)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be positive and finite, got {r}")));
    }
    let n = cfg.n;
    let constants = theoretical_constants(cfg);
    let ball = mu.ball_indices(x, r);
    let ball_mass = mu.mass_of(&ball);
    let required = cfg.lambda * r.powi(n as i32);
    if ball_mass < required {
        return Err(Error::Precondition(format!(
            "μ(B(x, {r})) = {ball_mass:e} < λrⁿ = {required:e}"
        )));
    }
    let probe_radius = 5.0 * constants.eta * r;
    let masses: Vec<f64> = ball
        .par_iter()
        .map(|&i| local_mass(mu, x, r, mu.point(i), probe_radius))
        .collect();
    let required_mass = constants.c2 * r.powi(n as i32);

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for step in 1..=n {
        let mut hull_points: Vec<&[f64]> = vec![x];
        hull_points.extend(chosen.iter().map(|&i| mu.point(i)));
        let hull = affine_hull(&hull_points)?;
        let mut best: Option<(f64, usize)> = None;
        for (k, &i) in ball.iter().enumerate() {
            let d = hull.distance(mu.point(i));
            let score = match mode {
                SecantMode::Theoretical => {
                    if masses[k] < required_mass {
                        continue;
                    }
                    d
                }
                SecantMode::Empirical => d * masses[k],
            };
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, i));
            }
        }
        match best {
            Some((_, i)) => chosen.push(i),
            None => {
                failures.push(FrameFailure::NoCandidate { step, required_mass });
                break;
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::SecantFailure(failures));
    }

    let points: Vec<Vec<f64>> = chosen.iter().map(|&i| mu.point(i).to_vec()).collect();
    let mut simplex: Vec<&[f64]> = vec![x];
    simplex.extend(points.iter().map(Vec::as_slice));
    let delta = h_min(&simplex) / r;
    let eta = match mode {
        SecantMode::Theoretical => constants.eta,
        SecantMode::Empirical => delta / (10.0 * n as f64),
    };
    let ball_radius = 5.0 * eta * r;
    let frame_masses: Vec<f64> = points
        .iter()
        .map(|c| if ball_radius > 0.0 { local_mass(mu, x, r, c, ball_radius) } else { 0.0 })
        .collect();

    if mode == SecantMode::Theoretical {
        if delta < constants.delta {
            failures.push(FrameFailure::SpreadTooSmall {
                achieved: delta,
                required: constants.delta,
            });
        }
        for (ball, &mass) in frame_masses.iter().enumerate() {
            if mass < required_mass {
                failures.push(FrameFailure::InsufficientBallMass {
                    ball,
                    mass,
                    required: required_mass,
                });
            }
        }
        if !failures.is_empty() {
            return Err(Error::SecantFailure(failures));
        }
    }

    Ok(SecantFrame {
        base: x.to_vec(),
        r,
        mode,
        points,
        point_indices: chosen,
        delta,
        eta,
        ball_radius,
        masses: frame_masses,
        ball_mass,
        constants,
        config: *cfg,
    })
}

/// Outcome of [`verify_frame_conclusions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameCheck {
    pub tuples_checked: usize,
    /// `min h_min(x, y₁, …, yₙ) / (δr/2)` over the sampled tuples.
    pub min_ratio: f64,
    pub violations: usize,
    /// Up to five violating tuples.
    pub counterexamples: Vec<Vec<Vec<f64>>>,
    pub heights_pass: bool,
    pub disjointness: Option<DisjointnessCheck>,
    pub disjointness_skipped: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointnessCheck {
    pub inner_r: f64,
    /// Per component `i`: `B_{i,r} ∩ B_{i,δr/3} = ∅`.
    pub components_disjoint: Vec<bool>,
    /// The product sets are disjoint iff some component pair is.
    pub passed: bool,
}

/// Uniform point of the closed ball `B(c, radius)`, or of its sphere.
fn sample_ball(rng: &mut ChaCha8Rng, c: &[f64], radius: f64, on_sphere: bool) -> Vec<f64> {
    let m = c.len();
    let dir: Vec<f64> = loop {
        let v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            break v.into_iter().map(|a| a / len).collect();
        }
    };
    let rho = if on_sphere {
        radius
    } else {
        radius * rng.random::<f64>().powf(1.0 / m as f64)
    };
    c.iter().zip(&dir).map(|(a, d)| a + rho * d).collect()
}

/// Checks the frame properties:
///
/// (a) `h_min(x, y₁, …, yₙ) ≥ δr/2` for `samples` tuples drawn from the
/// product of the balls `B_{i,r}` (every other tuple on the boundary spheres);
/// (b) the frame's product of balls is disjoint from that of the frame built
/// at scale `δr/3` with the same mode.
pub fn verify_frame_conclusions(frame: &SecantFrame, mu: &DiscreteMeasure, samples: usize, seed: u64) -> FrameCheck {
    let delta = frame.bound_delta();
    let threshold = delta * frame.r / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut violations = 0;
    let mut counterexamples = Vec::new();
    for s in 0..samples {
        let ys: Vec<Vec<f64>> = frame
            .points
            .iter()
            .map(|c| sample_ball(&mut rng, c, frame.ball_radius, s % 2 == 1))
            .collect();
        let mut simplex: Vec<&[f64]> = vec![&frame.base];
        simplex.extend(ys.iter().map(Vec::as_slice));
        let h = h_min(&simplex);
        min_ratio = min_ratio.min(h / threshold);
        if h < threshold {
            violations += 1;
            if counterexamples.len() < 5 {
                counterexamples.push(ys);
            }
        }
    }
    let heights_pass = violations == 0 && threshold > 0.0;

    let inner_r = delta * frame.r / 3.0;
    let (disjointness, disjointness_skipped) = if inner_r <= 0.0 {
        (None, Some("δ = 0".to_string()))
    } else {
        match find_secant_frame(mu, &frame.base, inner_r, &frame.config, frame.mode) {
            Ok(inner) => {
                let components_disjoint: Vec<bool> = frame
                    .points
                    .iter()
                    .zip(&inner.points)
                    .map(|(a, b)| dist(a, b) > frame.ball_radius + inner.ball_radius)
                    .collect();
                let passed = components_disjoint.iter().any(|&d| d);
                (
                    Some(DisjointnessCheck {
                        inner_r,
                        components_disjoint,
                        passed,
                    }),
                    None,
                )
            }
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let passed = heights_pass && disjointness.as_ref().is_none_or(|d| d.passed);
    FrameCheck {
        tuples_checked: samples,
        min_ratio: if samples == 0 { f64::NAN } else { min_ratio },
        violations,
        counterexamples,
        heights_pass,
        disjointness,
        disjointness_skipped,
        passed,
    }
}

/// Both sides of `dist(z, aff{x, y₁, …, yₙ}) ≤ (2/δ)ⁿ h_min(x, z, y₁, …, yₙ)`
/// and of the volume-ratio step behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistBound {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// `Vol_n(Δ_{w₀}) / Vol_n(Δ_z)`.
    pub volume_ratio: f64,
    /// `(2/δ)ⁿ`.
    pub volume_bound: f64,
    pub volume_pass: bool,
    /// `(4(1+5η)/δ)ⁿ`: the ratio bound that follows from `h_min(x, y) ≥ δr/2`
    /// and all vertices lying in `B(x, (1+5η)r)`.
    pub conservative_bound: f64,
}

/// Evaluates the distance/height comparison for `z` against the frame's `δ`
/// (see [`SecantFrame::bound_delta`]).
pub fn dist_vs_hmin_bound<P: AsRef<[f64]>>(x: &[f64], z: &[f64], frame: &SecantFrame, ys: &[P]) -> Result<DistBound> {
    dist_vs_hmin_bound_with(x, z, frame.bound_delta(), frame.eta, ys)
}

/// As [`dist_vs_hmin_bound`] with an explicit `δ` and `η`.
pub fn dist_vs_hmin_bound_with<P: AsRef<[f64]>>(x: &[f64], z: &[f64], delta: f64, eta: f64, ys: &[P]) -> Result<DistBound> {
    if !(delta > 0.0) {
        return Err(Error::param("delta", "must be positive"));
    }
    let n = ys.len();
    let mut face: Vec<&[f64]> = vec![x];
    face.extend(ys.iter().map(AsRef::as_ref));
    let hull = affine_hull(&face)?;
    let lhs = hull.distance(z);
    let mut full: Vec<&[f64]> = vec![x, z];
    full.extend(ys.iter().map(AsRef::as_ref));
    let h = h_min(&full);
    let factor = (2.0 / delta).powi(n as i32);
    let rhs = factor * h;
    let conservative_bound = (4.0 * (1.0 + 5.0 * eta) / delta).powi(n as i32);
    let (volume_ratio, volume_pass) = if h == 0.0 {
        (0.0, true)
    } else {
        let w0 = h_min_vertex(&full);
        let without_w0: Vec<&[f64]> = full.iter().enumerate().filter(|&(i, _)| i != w0).map(|(_, p)| *p).collect();
        let ratio = simplex_volume(&without_w0) / simplex_volume(&face);
        (ratio, ratio <= factor)
    };
    Ok(DistBound {
        lhs,
        rhs,
        pass: lhs <= rhs,
        volume_ratio,
        volume_bound: factor,
        volume_pass,
        conservative_bound,
    })
}
