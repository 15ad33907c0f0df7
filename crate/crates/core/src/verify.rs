//! Numerical checks of the inequality chain bounding centered β-numbers and
//! Jones sums by Menger-type curvature, of the Hölder step comparing `β₂`
//! with `β_p`, and of the height/volume identity for simplices.
//!
//! Each check produces an [`InequalityReport`]: per-case left and right sides,
//! the constant used, and enough metadata to recompute every number.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::{beta2, beta2_centered, beta_p};
use crate::curvature::{curv_exhaustive, curv_integrand, DEFAULT_TUPLE_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{affine_hull, h_min, h_min_vertex, simplex_volume};
use crate::measure::{within_closed_ball, DiscreteMeasure};
use crate::numeric::{dist, pairwise_sum};
use crate::scales::ScaleConfig;
use crate::secant::{find_secant_frame, theoretical_constants, SecantConfig, SecantFrame, SecantMode};

/// Relative tolerance of the simplex volume identity.
pub const VOLUME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: Option<f64>,
    /// `rhs / lhs`; absent when `lhs = 0`.
    pub margin: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skip {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportMeta {
    pub measure_hash: Option<String>,
    pub center: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub cases: Vec<Case>,
    pub skipped: Vec<Skip>,
    pub passed: usize,
    pub total: usize,
    /// Index of the case with the smallest margin.
    pub worst: Option<usize>,
    pub meta: ReportMeta,
    /// Side measurements that do not affect pass/fail.
    pub diagnostics: BTreeMap<String, f64>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>) -> Self {
        InequalityReport {
            name: name.into(),
            cases: Vec::new(),
            skipped: Vec::new(),
            passed: 0,
            total: 0,
            worst: None,
            meta: ReportMeta::default(),
            diagnostics: BTreeMap::new(),
        }
    }

    /// Records `lhs ≤ rhs`.
    pub fn push(&mut self, label: impl Into<String>, lhs: f64, rhs: f64, constant: Option<f64>) {
        let passed = lhs <= rhs;
        let margin = (lhs > 0.0).then(|| rhs / lhs);
        let case = Case {
            label: label.into(),
            lhs,
            rhs,
            constant,
            margin,
            passed,
        };
        self.total += 1;
        if passed {
            self.passed += 1;
        }
        let current = self.worst.and_then(|w| self.cases[w].margin).unwrap_or(f64::INFINITY);
        if margin.is_some_and(|m| m < current) {
            self.worst = Some(self.cases.len());
        }
        self.cases.push(case);
    }

    pub fn skip(&mut self, label: impl Into<String>, reason: impl Into<String>) {
        self.skipped.push(Skip {
            label: label.into(),
            reason: reason.into(),
        });
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.meta.constants.insert(name.to_string(), value);
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

fn secant_meta(report: &mut InequalityReport, mu: &DiscreteMeasure, x: &[f64], cfg: &SecantConfig) {
    let c = theoretical_constants(cfg);
    report.meta.measure_hash = Some(mu.content_hash());
    report.meta.center = Some(x.to_vec());
    report.constant("lambda", cfg.lambda);
    report.constant("c0", cfg.c0);
    report.constant("k_exponent", cfg.k_exponent as f64);
    report.constant("delta_theoretical", c.delta);
    report.constant("eta_theoretical", c.eta);
    report.constant("c2", c.c2);
}

/// The constant in `β̂₂(x,r)² ≤ C · Σ_{𝔹_r × B(x,r)} h_min²/diam^{n²+n+2}`:
/// `(2/δ)^{2n} · 2^{n²+n+2} · r^{n²} / Π μ(B_{i,r})`, where the ball masses are
/// `C₂rⁿ` in theoretical mode and measured in empirical mode.
pub fn chain_constant(frame: &SecantFrame) -> f64 {
    let n = frame.points.len() as i32;
    let delta = frame.bound_delta();
    let spread = (2.0 / delta).powi(2 * n);
    let diameter_factor = 2f64.powi(n * n + n + 2);
    let averaging = match frame.mode {
        SecantMode::Theoretical => frame.constants.c2.powi(-n),
        SecantMode::Empirical => {
            frame.r.powi(n * n) / frame.masses.iter().product::<f64>()
        }
    };
    spread * diameter_factor * averaging
}

/// Localized curvature sum of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedSum {
    /// `Σ w_z Π w_{yᵢ} · h_min(x,z,y)² / diam^{n²+n+2+2α}` over atoms
    /// `yᵢ ∈ B_{i,r} ∩ B(x,r)`, `z ∈ B(x,r)`.
    pub value: f64,
    pub tuples: u128,
    /// Tuples violating `dist(z, aff{x,y}) ≤ (2/δ)ⁿ h_min(x,z,y)`.
    pub pointwise_violations: u64,
}

/// Sums over the atoms of `𝔹_r × B(x, r)` for a frame at `(x, r)`.
pub fn localized_sum(mu: &DiscreteMeasure, frame: &SecantFrame, alpha: f64, budget: u128) -> Result<LocalizedSum> {
    let x = frame.base.as_slice();
    let r = frame.r;
    let n = frame.points.len();
    let zs = mu.ball_indices(x, r);
    let factors: Vec<Vec<usize>> = frame
        .points
        .iter()
        .map(|c| {
            mu.ball_indices(c, frame.ball_radius)
                .into_iter()
                .filter(|&i| within_closed_ball(mu.point(i), x, r))
                .collect()
        })
        .collect();
    let mut tuples = zs.len() as u128;
    for f in &factors {
        tuples = tuples.saturating_mul(f.len() as u128);
    }
    if tuples > budget {
        return Err(Error::BudgetExceeded { tuples, budget });
    }
    if tuples == 0 {
        return Ok(LocalizedSum {
            value: 0.0,
            tuples,
            pointwise_violations: 0,
        });
    }
    let spread = (2.0 / frame.bound_delta()).powi(n as i32);
    let rows: Vec<(f64, u64)> = zs
        .par_iter()
        .map(|&z| {
            let mut odo = vec![0usize; n];
            let mut tuple: Vec<&[f64]> = vec![mu.point(z); n + 1];
            let mut acc = 0.0;
            let mut violations = 0u64;
            loop {
                let mut w = mu.weight(z);
                for (slot, &o) in odo.iter().enumerate() {
                    let i = factors[slot][o];
                    w *= mu.weight(i);
                    tuple[slot + 1] = mu.point(i);
                }
                let f = curv_integrand(x, &tuple, 2.0, alpha);
                if f != 0.0 {
                    acc += w * f;
                }
                let mut face: Vec<&[f64]> = vec![x];
                face.extend_from_slice(&tuple[1..]);
                let lhs = affine_hull(&face).map(|a| a.distance(mu.point(z))).unwrap_or(0.0);
                let mut full = vec![x];
                full.extend_from_slice(&tuple);
                if lhs > spread * h_min(&full) {
                    violations += 1;
                }
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return (acc, violations);
                    }
                    pos -= 1;
                    odo[pos] += 1;
                    if odo[pos] < factors[pos].len() {
                        break;
                    }
                    odo[pos] = 0;
                }
            }
        })
        .collect();
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(LocalizedSum {
        value: pairwise_sum(&values),
        tuples,
        pointwise_violations: rows.iter().map(|r| r.1).sum(),
    })
}

/// Integration domain for the right side of [`check_beta_vs_curv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvDomain {
    /// `𝔹_r × B(x, r)`, as in the proof.
    #[default]
    Localized,
    /// All of `B(x, r)^{n+1}`.
    FullBall,
}

/// At each scale: `β̂₂(x, r)² ≤ C · S(r)` with `C` from [`chain_constant`]
/// and `S` the curvature sum over `domain` with exponent `n²+n+2`.
pub fn check_beta_vs_curv(
    mu: &DiscreteMeasure,
    x: &[f64],
    cfg: &SecantConfig,
    scales: &ScaleConfig,
    mode: SecantMode,
    domain: CurvDomain,
) -> Result<InequalityReport> {
    scales.validate()?;
    let mut report = InequalityReport::new("beta-curv");
    secant_meta(&mut report, mu, x, cfg);
    let mut pointwise = 0u64;
    for (j, r) in scales.radii().into_iter().enumerate() {
        let label = format!("r_{j}={r:e}");
        let frame = match find_secant_frame(mu, x, r, cfg, mode) {
            Ok(f) => f,
            Err(e @ (Error::Precondition(_) | Error::SecantFailure(_))) => {
                report.skip(label, e.to_string());
                continue;
            }
            Err(e) => return Err(e),
        };
        let lhs = beta2_centered(mu, x, r)?.value.powi(2);
        if frame.bound_delta() <= 0.0 || frame.masses.iter().any(|&m| m <= 0.0) {
            // A flat ball makes the inequality hold trivially; otherwise no
            // constant is available.
            if lhs == 0.0 {
                report.push(label, 0.0, 0.0, None);
            } else {
                report.skip(label, "degenerate frame (δ = 0 or empty ball)");
            }
            continue;
        }
        let constant = chain_constant(&frame);
        let sum = match domain {
            CurvDomain::Localized => match localized_sum(mu, &frame, 0.0, DEFAULT_TUPLE_BUDGET) {
                Ok(s) => {
                    pointwise += s.pointwise_violations;
                    s.value
                }
                Err(Error::BudgetExceeded { tuples, .. }) => {
                    report.skip(label, format!("{tuples} tuples exceed the budget"));
                    continue;
                }
                Err(e) => return Err(e),
            },
            CurvDomain::FullBall => curv_exhaustive(mu, x, r, 2.0, 0.0)?.value,
        };
        let rhs = if sum == 0.0 { 0.0 } else { constant * sum };
        report.push(label, lhs, rhs, Some(constant));
    }
    report
        .diagnostics
        .insert("pointwise_distance_bound_violations".into(), pointwise as f64);
    Ok(report)
}

/// `Σ_j β̂₂(x, r_j)² / r_j^{2α} ≤ C · curv^α_{μ;2}(x, 1)` with `r_j = (δ/3)ʲ`.
///
/// `δ` is the theoretical constant or the achieved `δ̂` of the frame at
/// `r = 1`. The ladder runs for at most `max_scales` radii and stops at the
/// first radius whose ball holds a single atom (recorded as the diagnostic
/// `ladder_end_radius`) or admits no frame (recorded as a skip). Per-scale
/// cases compare each term with `2^{2α} C_j S_j`; the final case uses
/// `C = 2^{2α} max_j C_j`. Whether the product domains of different scales are
/// disjoint is reported as a diagnostic.
pub fn check_jones_vs_curv(
    mu: &DiscreteMeasure,
    x: &[f64],
    alpha: f64,
    cfg: &SecantConfig,
    mode: SecantMode,
    max_scales: usize,
) -> Result<InequalityReport> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must lie in [0, 1), got {alpha}")));
    }
    let mut report = InequalityReport::new("jones-curv");
    secant_meta(&mut report, mu, x, cfg);
    report.constant("alpha", alpha);
    let top = find_secant_frame(mu, x, 1.0, cfg, mode)?;
    let delta = top.bound_delta();
    if delta <= 0.0 {
        return Err(Error::Precondition("the frame at r = 1 is degenerate (δ = 0)".into()));
    }
    let ratio = delta / 3.0;
    report.constant("ratio", ratio);

    let mut frames: Vec<SecantFrame> = Vec::new();
    let mut terms = Vec::new();
    let mut max_constant: f64 = 0.0;
    let alpha_factor = 2f64.powf(2.0 * alpha);
    for j in 0..max_scales {
        let r = ratio.powi(j as i32);
        let label = format!("r_{j}={r:e}");
        if mu.ball_indices(x, r).len() <= 1 {
            report.diagnostics.insert("ladder_end_radius".into(), r);
            break;
        }
        let frame = if j == 0 {
            top.clone()
        } else {
            match find_secant_frame(mu, x, r, cfg, mode) {
                Ok(f) => f,
                Err(e @ (Error::Precondition(_) | Error::SecantFailure(_))) => {
                    report.skip(label, format!("ladder ends: {e}"));
                    break;
                }
                Err(e) => return Err(e),
            }
        };
        if frame.bound_delta() <= 0.0 || frame.masses.iter().any(|&m| m <= 0.0) {
            report.skip(label, "ladder ends: degenerate frame");
            break;
        }
        let term = beta2_centered(mu, x, r)?.value.powi(2) / r.powf(2.0 * alpha);
        let constant = chain_constant(&frame);
        let local = match localized_sum(mu, &frame, alpha, DEFAULT_TUPLE_BUDGET) {
            Ok(s) => s,
            Err(Error::BudgetExceeded { tuples, .. }) => {
                report.skip(label, format!("ladder ends: {tuples} tuples exceed the budget"));
                break;
            }
            Err(e) => return Err(e),
        };
        let rhs = if local.value == 0.0 { 0.0 } else { alpha_factor * constant * local.value };
        report.push(label, term, rhs, Some(alpha_factor * constant));
        max_constant = max_constant.max(constant);
        terms.push(term);
        frames.push(frame);
    }
    let lhs = pairwise_sum(&terms);
    let curv = curv_exhaustive(mu, x, 1.0, 2.0, alpha)?.value;
    let constant = alpha_factor * max_constant;
    let rhs = if curv == 0.0 { 0.0 } else { constant * curv };
    report.push("sum", lhs, rhs, Some(constant));
    report.constant("curv_at_1", curv);
    report.constant("scales_used", frames.len() as f64);

    let mut overlapping = 0usize;
    for a in 0..frames.len() {
        for b in (a + 1)..frames.len() {
            let (fa, fb) = (&frames[a], &frames[b]);
            let disjoint = fa
                .points
                .iter()
                .zip(&fb.points)
                .any(|(p, q)| dist(p, q) > fa.ball_radius + fb.ball_radius);
            if !disjoint {
                overlapping += 1;
            }
        }
    }
    report.diagnostics.insert("overlapping_domain_pairs".into(), overlapping as f64);
    Ok(report)
}

/// Both sides of the sum-form Hölder bound
/// `Σ β_j² Δ ≤ (Σ r_j^{2pα/(p−2)} Δ)^{(p−2)/p} · (Σ (β_j / r_j^α)^p Δ)^{2/p}`,
/// returned as `(lhs, rhs, constant)` where `constant` is the first factor.
pub fn holder_sum_bound(betas: &[f64], radii: &[f64], p: f64, alpha: f64, log_step: f64) -> (f64, f64, f64) {
    let lhs_terms: Vec<f64> = betas.iter().map(|b| b * b * log_step).collect();
    let weight_terms: Vec<f64> = radii
        .iter()
        .map(|r| r.powf(2.0 * p * alpha / (p - 2.0)) * log_step)
        .collect();
    let power_terms: Vec<f64> = betas
        .iter()
        .zip(radii)
        .map(|(b, r)| (b / r.powf(alpha)).powf(p) * log_step)
        .collect();
    let constant = pairwise_sum(&weight_terms).powf((p - 2.0) / p);
    let rhs = constant * pairwise_sum(&power_terms).powf(2.0 / p);
    (pairwise_sum(&lhs_terms), rhs, constant)
}

/// Exponents for the termwise `β₂² ≤ β_q^q` check.
pub const LOW_EXPONENTS: [f64; 2] = [1.0, 1.5];

/// The Hölder step on the real `β₂` profile of `μ` at `x`, plus per scale the
/// moment bound `β₂ ≤ (μ(B)/rⁿ)^{1/2−1/p} β_p` and `β₂² ≤ β_q^q` for the
/// exponents in [`LOW_EXPONENTS`].
pub fn check_holder_chain(
    mu: &DiscreteMeasure,
    x: &[f64],
    p: f64,
    alpha: f64,
    scales: &ScaleConfig,
) -> Result<InequalityReport> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must exceed 2, got {p}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    scales.validate()?;
    mu.check_point(x)?;
    let mut report = InequalityReport::new("holder");
    report.meta.measure_hash = Some(mu.content_hash());
    report.meta.center = Some(x.to_vec());
    report.constant("p", p);
    report.constant("alpha", alpha);
    report.constant("log_step", scales.log_step());
    let radii = scales.radii();
    let n = mu.intrinsic_dim() as i32;
    let per_scale = radii
        .par_iter()
        .map(|&r| -> Result<(f64, f64, f64, Vec<f64>)> {
            let b2 = beta2(mu, x, r)?;
            let bp = beta_p(mu, x, r, p)?.value;
            let low = LOW_EXPONENTS
                .iter()
                .map(|&q| beta_p(mu, x, r, q).map(|b| b.value.powf(q)))
                .collect::<Result<Vec<_>>>()?;
            Ok((b2.value, b2.ball_mass / r.powi(n), bp, low))
        })
        .collect::<Result<Vec<_>>>()?;
    let betas: Vec<f64> = per_scale.iter().map(|s| s.0).collect();
    let (lhs, rhs, constant) = holder_sum_bound(&betas, &radii, p, alpha, scales.log_step());
    report.push("holder-sum", lhs, rhs, Some(constant));
    for ((r, (b2, density, bp, low)), j) in radii.iter().zip(&per_scale).zip(0..) {
        let factor = density.powf(0.5 - 1.0 / p);
        report.push(format!("moment r_{j}={r:e}"), *b2, factor * bp, Some(factor));
        for (q, value) in LOW_EXPONENTS.iter().zip(low) {
            report.push(format!("low p={q} r_{j}={r:e}"), b2 * b2, *value, None);
        }
    }
    Ok(report)
}

/// Largest relative deviation, over the vertices `w` of `simplex`, of
/// `dist(w, aff(Δ∖w))·Vol_k(Δ∖w)` and of `h_min·Vol_k(Δ_{w₀})` from
/// `(k+1)·Vol_{k+1}(Δ)`.
pub fn volume_identity_deviation(simplex: &[Vec<f64>]) -> Result<f64> {
    let k1 = simplex.len() - 1;
    let target = k1 as f64 * simplex_volume(simplex);
    let face = |w: usize| -> Vec<&[f64]> {
        simplex
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != w)
            .map(|(_, p)| p.as_slice())
            .collect()
    };
    let rel = |v: f64| if target == 0.0 { v.abs() } else { (v - target).abs() / target };
    let mut worst: f64 = 0.0;
    for w in 0..simplex.len() {
        let f = face(w);
        let product = affine_hull(&f)?.distance(&simplex[w]) * simplex_volume(&f);
        worst = worst.max(rel(product));
    }
    let w0 = h_min_vertex(simplex);
    worst = worst.max(rel(h_min(simplex) * simplex_volume(&face(w0))));
    Ok(worst)
}

/// Random Gaussian simplices with faces of dimension `k = 1..=max_dim` in
/// `ℝ^{ambient_dim}`; each case compares the worst relative deviation of
/// [`volume_identity_deviation`] with [`VOLUME_TOLERANCE`].
pub fn check_volume_identity(trials: usize, max_dim: usize, ambient_dim: usize, seed: u64) -> Result<InequalityReport> {
    if max_dim == 0 || max_dim + 1 > ambient_dim {
        return Err(Error::param(
            "max_dim",
            format!("need 1 ≤ max_dim < ambient_dim, got {max_dim} and {ambient_dim}"),
        ));
    }
    let mut report = InequalityReport::new("volume");
    report.meta.seed = Some(seed);
    report.constant("tolerance", VOLUME_TOLERANCE);
    report.constant("ambient_dim", ambient_dim as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for k in 1..=max_dim {
        for t in 0..trials {
            let simplex: Vec<Vec<f64>> = (0..k + 2)
                .map(|_| (0..ambient_dim).map(|_| rng.sample(StandardNormal)).collect())
                .collect();
            let dev = volume_identity_deviation(&simplex)?;
            max_deviation = max_deviation.max(dev);
            report.push(format!("k={k} trial={t}"), dev, VOLUME_TOLERANCE, None);
        }
    }
    report.diagnostics.insert("max_relative_deviation".into(), max_deviation);
    Ok(report)
}

/// Random nonnegative β-profiles on a dyadic ladder for exercising
/// [`holder_sum_bound`]: each value is `U[0,1)^{1+3U}`.
pub fn random_profile(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let e = 1.0 + 3.0 * rng.random::<f64>();
            rng.random::<f64>().powf(e)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn right_triangle_identity() {
        let t = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(volume_identity_deviation(&t).unwrap() < 1e-15);
        let hyp = affine_hull(&[[1.0, 0.0], [0.0, 1.0]]).unwrap().distance(&[0.0, 0.0]);
        assert_relative_eq!(hyp * 2f64.sqrt(), 2.0 * 0.5, max_relative = 1e-15);
    }

    #[test]
    fn volume_report_passes() {
        let r = check_volume_identity(50, 3, 4, 7).unwrap();
        assert!(r.all_passed());
        assert_eq!(r.total, 150);
        assert!(check_volume_identity(5, 4, 4, 0).is_err());
    }

    #[test]
    fn holder_bound_zero_profile() {
        let (lhs, rhs, _) = holder_sum_bound(&[0.0; 5], &[1.0, 0.5, 0.25, 0.125, 0.0625], 3.0, 0.3, 2f64.ln());
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    #[test]
    fn report_tracks_worst_case() {
        let mut r = InequalityReport::new("t");
        r.push("a", 1.0, 4.0, None);
        r.push("b", 0.0, 0.0, None);
        r.push("c", 1.0, 2.0, None);
        assert_eq!(r.worst, Some(2));
        r.push("d", 2.0, 1.0, None);
        assert_eq!(r.worst, Some(3));
        assert!(!r.all_passed());
        assert_eq!((r.passed, r.total), (3, 4));
    }
}
