//! Weighted point clouds `μ = Σ wᵢ δ_{xᵢ}` and closed balls.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::index::SpatialIndex;
use crate::numeric::{dist2, pairwise_sum};

/// Closed-ball membership `|p − c| ≤ r`, evaluated as `|p − c|² ≤ r²`.
///
/// Every ball-membership decision in the crate goes through this predicate.
#[inline]
pub fn within_closed_ball(p: &[f64], center: &[f64], radius: f64) -> bool {
    dist2(p, center) <= radius * radius
}

/// A closed ball `{y : |y − c| ≤ r}` with `r > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be positive and finite, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("center", "coordinates must be finite"));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        within_closed_ball(p, &self.center, self.radius)
    }
}

/// A finite weighted point cloud in `ℝ^m` carrying an intrinsic dimension
/// `n` (the dimension of the planes it is compared against).
///
/// Immutable after construction; owns a [`SpatialIndex`] built once.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    coords: Vec<f64>,
    weights: Vec<f64>,
    ambient_dim: usize,
    intrinsic_dim: usize,
    index: SpatialIndex,
}

impl DiscreteMeasure {
    /// Builds a measure from row-major coordinates (`N × m`).
    pub fn new(
        coords: Vec<f64>,
        weights: Vec<f64>,
        ambient_dim: usize,
        intrinsic_dim: usize,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidMeasure("ambient dimension must be positive".into()));
        }
        if intrinsic_dim > ambient_dim {
            return Err(Error::InvalidMeasure(format!(
                "intrinsic dimension {intrinsic_dim} exceeds ambient dimension {ambient_dim}"
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("measure needs at least one point".into()));
        }
        if coords.len() != weights.len() * ambient_dim {
            return Err(Error::InvalidMeasure(format!(
                "{} coordinates do not form {} points in dimension {ambient_dim}",
                coords.len(),
                weights.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidMeasure(format!(
                "point {} has a non-finite coordinate",
                i / ambient_dim
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "point {i} has weight {} (weights must be positive and finite)",
                weights[i]
            )));
        }
        let index = SpatialIndex::build(&coords, ambient_dim);
        Ok(DiscreteMeasure {
            coords,
            weights,
            ambient_dim,
            intrinsic_dim,
            index,
        })
    }

    pub fn from_points(points: &[Vec<f64>], weights: Vec<f64>, intrinsic_dim: usize) -> Result<Self> {
        let ambient_dim = points.first().map_or(0, Vec::len);
        if let Some(bad) = points.iter().find(|p| p.len() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                actual: bad.len(),
            });
        }
        let coords = points.concat();
        Self::new(coords, weights, ambient_dim, intrinsic_dim)
    }

    /// Equal weights `w` on every point.
    pub fn uniform(points: &[Vec<f64>], weight: f64, intrinsic_dim: usize) -> Result<Self> {
        Self::from_points(points, vec![weight; points.len()], intrinsic_dim)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.intrinsic_dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.ambient_dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn index(&self) -> &SpatialIndex {
        &self.index
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Same points and weights, different intrinsic dimension.
    pub fn with_intrinsic_dim(&self, intrinsic_dim: usize) -> Result<Self> {
        if intrinsic_dim > self.ambient_dim {
            return Err(Error::InvalidMeasure(format!(
                "intrinsic dimension {intrinsic_dim} exceeds ambient dimension {}",
                self.ambient_dim
            )));
        }
        let mut out = self.clone();
        out.intrinsic_dim = intrinsic_dim;
        Ok(out)
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                actual: x.len(),
            });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("x", "coordinates must be finite"));
        }
        Ok(())
    }

    /// Indices of atoms in the closed ball `B(center, radius)`, ascending.
    pub fn ball_indices(&self, center: &[f64], radius: f64) -> Vec<usize> {
        self.index.query(center, radius)
    }

    pub fn range_query(&self, ball: &Ball) -> Vec<usize> {
        self.index.range_query(ball)
    }

    /// `μ(B(center, radius))`, summed in ascending index order.
    pub fn ball_mass(&self, center: &[f64], radius: f64) -> f64 {
        self.mass_of(&self.ball_indices(center, radius))
    }

    pub fn mass_of(&self, indices: &[usize]) -> f64 {
        let w: Vec<f64> = indices.iter().map(|&i| self.weights[i]).collect();
        pairwise_sum(&w)
    }

    /// `μ⌞S` for the atoms listed in `indices` (kept in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.ambient_dim);
        let mut weights = Vec::with_capacity(indices.len());
        for &i in indices {
            coords.extend_from_slice(self.point(i));
            weights.push(self.weights[i]);
        }
        Self::new(coords, weights, self.ambient_dim, self.intrinsic_dim)
    }

    /// Applies `f` to every point, keeping weights.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let points: Vec<Vec<f64>> = self.points().map(&mut f).collect();
        Self::from_points(&points, self.weights.clone(), self.intrinsic_dim)
    }

    /// Multiplies all weights by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.coords.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
            self.ambient_dim,
            self.intrinsic_dim,
        )
    }

    /// SHA-256 (hex) of the binary encoding; identifies the measure in reports.
    pub fn content_hash(&self) -> String {
        let bytes = crate::io::encode_binary(self);
        hex::encode(Sha256::digest(&bytes))
    }
}
