//! Finite-scale density ratios `μ(B(x, r))/rⁿ`, an empirical upper-regularity
//! constant, and the chopping of `μ` onto the sets where the ratio stays
//! below `k` at small dyadic radii.
//!
//! Everything here is a finite-scale proxy: limits as `r → 0` cannot be read
//! off a finite point cloud.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::scales::ScaleConfig;

pub const DEFAULT_CHOP_DEPTH: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    /// `μ(B(x, r))/rⁿ` at each radius.
    pub ratios: Vec<f64>,
    /// Largest ratio over the tested radii.
    pub upper_est: f64,
    /// Smallest ratio over the tested radii.
    pub lower_est: f64,
}

pub fn density_ratio(mu: &DiscreteMeasure, x: &[f64], r: f64) -> f64 {
    mu.ball_mass(x, r) / r.powi(mu.intrinsic_dim() as i32)
}

pub fn density_profile(mu: &DiscreteMeasure, x: &[f64], scales: &ScaleConfig) -> Result<DensityProfile> {
    scales.validate()?;
    mu.check_point(x)?;
    let radii = scales.radii();
    let ratios: Vec<f64> = radii.iter().map(|&r| density_ratio(mu, x, r)).collect();
    Ok(DensityProfile {
        center: x.to_vec(),
        upper_est: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        lower_est: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        radii,
        ratios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperRegularity {
    /// `max μ(B(x, r))/rⁿ` over the sampled centers and radii: a lower bound
    /// for any valid upper-regularity constant.
    pub estimate: f64,
    pub center_index: usize,
    pub radius: f64,
}

pub fn upper_regularity_constant(
    mu: &DiscreteMeasure,
    scales: &ScaleConfig,
    centers: &[Vec<f64>],
) -> Result<UpperRegularity> {
    if centers.is_empty() {
        return Err(Error::param("centers", "at least one center is required"));
    }
    let profiles = centers
        .par_iter()
        .map(|c| density_profile(mu, c, scales))
        .collect::<Result<Vec<_>>>()?;
    let mut best = UpperRegularity {
        estimate: f64::NEG_INFINITY,
        center_index: 0,
        radius: scales.r0,
    };
    for (i, p) in profiles.iter().enumerate() {
        for (&r, &ratio) in p.radii.iter().zip(&p.ratios) {
            if ratio > best.estimate {
                best = UpperRegularity {
                    estimate: ratio,
                    center_index: i,
                    radius: r,
                };
            }
        }
    }
    Ok(best)
}

/// Result of [`chop`].
#[derive(Debug, Clone)]
pub struct Chopped {
    /// Indices of the kept atoms, ascending.
    pub indices: Vec<usize>,
    /// The dyadic radii the condition was tested at.
    pub radii: Vec<f64>,
    /// `μ` restricted to the kept atoms; `None` when nothing is kept.
    pub measure: Option<DiscreteMeasure>,
}

impl Chopped {
    pub fn kept_mass(&self) -> f64 {
        self.measure.as_ref().map_or(0.0, DiscreteMeasure::total_mass)
    }
}

/// Smallest distance between two distinct atoms; `None` for a single atom or
/// when all atoms coincide.
pub fn min_pairwise_distance(mu: &DiscreteMeasure) -> Option<f64> {
    (0..mu.len())
        .into_par_iter()
        .filter_map(|i| mu.index().nearest_distance(mu.point(i), Some(i)))
        .filter(|&d| d > 0.0)
        .min_by(f64::total_cmp)
}

/// The radii `2^{−k−1}, …, 2^{−k−depth}`, dropping those below a quarter of
/// the minimal pairwise distance.
pub fn chop_radii(mu: &DiscreteMeasure, k: u32, depth: usize) -> Vec<f64> {
    let floor = min_pairwise_distance(mu).map_or(0.0, |d| d / 4.0);
    (1..=depth)
        .map(|t| 2f64.powi(-(k as i32) - t as i32))
        .filter(|&r| r >= floor)
        .collect()
}

/// `μ⌞E_k`, with `E_k` the atoms `xᵢ` satisfying `μ(B(xᵢ, r)) ≤ k rⁿ` at every
/// radius of [`chop_radii`].
pub fn chop(mu: &DiscreteMeasure, k: u32, depth: usize) -> Result<Chopped> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if depth == 0 {
        return Err(Error::param("depth", "at least one radius is required"));
    }
    let radii = chop_radii(mu, k, depth);
    let n = mu.intrinsic_dim() as i32;
    let keep: Vec<bool> = (0..mu.len())
        .into_par_iter()
        .map(|i| {
            radii
                .iter()
                .all(|&r| mu.ball_mass(mu.point(i), r) <= k as f64 * r.powi(n))
        })
        .collect();
    let indices: Vec<usize> = keep.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| i).collect();
    let measure = if indices.is_empty() {
        None
    } else {
        Some(mu.restrict(&indices)?)
    };
    Ok(Chopped {
        indices,
        radii,
        measure,
    })
}
