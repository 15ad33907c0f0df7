//! Affine subspaces, affine hulls and simplex geometry: minimal vertex
//! height, Hausdorff volume, diameter and the classical Menger curvature.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{dist, dot, norm};

/// Relative singular-value (or residual) threshold below which directions are
/// treated as degenerate.
pub const RANK_TOLERANCE: f64 = 1e-10;

const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

/// An affine plane `base + span(frame)` with an orthonormal frame. The
/// orthonormal complement (`normals`) is kept alongside so distances are
/// computed from normal components only.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    base: Vec<f64>,
    frame: Vec<Vec<f64>>,
    normals: Vec<Vec<f64>>,
}

impl AffineSubspace {
    /// Validates orthonormality of `frame` (to 1e-12) and completes it to a
    /// basis of the ambient space.
    pub fn new(base: Vec<f64>, frame: Vec<Vec<f64>>) -> Result<Self> {
        let m = base.len();
        if m == 0 {
            return Err(Error::param("base", "ambient dimension must be positive"));
        }
        if frame.len() > m {
            return Err(Error::param("frame", format!("{} vectors in dimension {m}", frame.len())));
        }
        for f in &frame {
            if f.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: f.len(),
                });
            }
        }
        for (i, a) in frame.iter().enumerate() {
            for (j, b) in frame.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(a, b) - target).abs() > ORTHONORMAL_TOLERANCE {
                    return Err(Error::param("frame", "vectors are not orthonormal"));
                }
            }
        }
        let normals = complete_basis(&frame, m);
        Ok(AffineSubspace {
            base,
            frame,
            normals,
        })
    }

    /// Trusted constructor for an already orthonormal frame and complement.
    pub(crate) fn from_parts(base: Vec<f64>, frame: Vec<Vec<f64>>, normals: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(frame.len() + normals.len(), base.len());
        AffineSubspace {
            base,
            frame,
            normals,
        }
    }

    /// The coordinate plane through `base` spanned by the first `n` axes.
    pub fn coordinate(base: Vec<f64>, n: usize) -> Result<Self> {
        let m = base.len();
        let frame = (0..n.min(m)).map(|i| unit(m, i)).collect();
        Self::new(base, frame)
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// `dist(z, A)`; no dimension check (see [`dist_to_affine`]).
    #[inline]
    pub fn distance(&self, z: &[f64]) -> f64 {
        self.distance2(z).sqrt()
    }

    #[inline]
    pub fn distance2(&self, z: &[f64]) -> f64 {
        let mut d2 = 0.0;
        for nu in &self.normals {
            let mut c = 0.0;
            for k in 0..z.len() {
                c += (z[k] - self.base[k]) * nu[k];
            }
            d2 += c * c;
        }
        d2
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = z.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        let mut out = self.base.clone();
        for f in &self.frame {
            let c = dot(&d, f);
            for (o, fk) in out.iter_mut().zip(f) {
                *o += c * fk;
            }
        }
        out
    }
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    e
}

/// Orthonormal complement of `frame` in `ℝ^m`, by greedy Gram–Schmidt over the
/// coordinate axes (largest residual first, lowest axis on ties).
fn complete_basis(frame: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = frame.to_vec();
    let mut normals = Vec::with_capacity(m - frame.len());
    while basis.len() < m {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis in 0..m {
            let mut v = unit(m, axis);
            orthogonalize(&mut v, &basis);
            let len = norm(&v);
            if best.as_ref().is_none_or(|(b, _)| len > *b) {
                best = Some((len, v));
            }
        }
        let (len, mut v) = best.expect("m > 0");
        v.iter_mut().for_each(|c| *c /= len);
        basis.push(v.clone());
        normals.push(v);
    }
    normals
}

/// Two passes of modified Gram–Schmidt against an orthonormal set.
#[inline]
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            if c != 0.0 {
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk -= c * bk;
                }
            }
        }
    }
}

/// `dist(z, A)` with a dimension check.
pub fn dist_to_affine(z: &[f64], a: &AffineSubspace) -> Result<f64> {
    if z.len() != a.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim(),
            actual: z.len(),
        });
    }
    Ok(a.distance(z))
}

fn check_same_dim<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let m = points
        .first()
        .map(|p| p.as_ref().len())
        .ok_or_else(|| Error::param("points", "at least one point is required"))?;
    for p in points {
        if p.as_ref().len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: p.as_ref().len(),
            });
        }
    }
    Ok(m)
}

fn edge_matrix<P: AsRef<[f64]>>(points: &[P]) -> DMatrix<f64> {
    let base = points[0].as_ref();
    let m = base.len();
    let k = points.len() - 1;
    DMatrix::from_fn(m, k, |row, col| points[col + 1].as_ref()[row] - base[row])
}

/// Left singular vectors of the edge matrix whose singular values exceed
/// `RANK_TOLERANCE × σ_max`.
fn edge_span<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    if points.len() < 2 {
        return Vec::new();
    }
    let e = edge_matrix(points);
    let svd = e.svd(true, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Vec::new();
    }
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > RANK_TOLERANCE * sigma_max)
        .map(|i| u.column(i).iter().cloned().collect())
        .collect()
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    check_same_dim(points)?;
    Ok(edge_span(points).len())
}

/// `aff{x₀,…,x_k}`, with rank decided by the singular values of the edge
/// matrix; degenerate inputs give lower-dimensional hulls.
pub fn affine_hull<P: AsRef<[f64]>>(points: &[P]) -> Result<AffineSubspace> {
    check_same_dim(points)?;
    let mut frame = edge_span(points);
    // Re-orthonormalize so the frame passes the 1e-12 check exactly.
    for i in 0..frame.len() {
        let (done, rest) = frame.split_at_mut(i);
        orthogonalize(&mut rest[0], done);
        let len = norm(&rest[0]);
        rest[0].iter_mut().for_each(|c| *c /= len);
    }
    AffineSubspace::new(points[0].as_ref().to_vec(), frame)
}

/// Simplex with `k + 1` vertices in `ℝ^m`, `1 ≤ k ≤ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let m = check_same_dim(&vertices)?;
        if vertices.len() < 2 {
            return Err(Error::param("vertices", "a simplex needs at least two vertices"));
        }
        if vertices.len() - 1 > m {
            return Err(Error::param(
                "vertices",
                format!("{} vertices cannot span a simplex in dimension {m}", vertices.len()),
            ));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::param("vertices", "coordinates must be finite"));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// The simplex dimension `k`.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn h_min(&self) -> f64 {
        h_min(&self.vertices)
    }

    pub fn volume(&self) -> f64 {
        simplex_volume(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    /// The face opposite vertex `i` (a point set, possibly a single point).
    pub fn face(&self, i: usize) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect()
    }
}

pub fn diameter<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let mut d2max: f64 = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d2max = d2max.max(crate::numeric::dist2(points[i].as_ref(), points[j].as_ref()));
        }
    }
    d2max.sqrt()
}

/// Distance from `v` to `aff(others)`, by Gram–Schmidt on the edge vectors
/// of `others` (directions with residual ≤ `RANK_TOLERANCE` × longest edge
/// are dropped).
fn height<P: AsRef<[f64]>>(v: &[f64], others: &[&P]) -> f64 {
    let base = others[0].as_ref();
    let m = base.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(others.len());
    let edges: Vec<Vec<f64>> = others[1..]
        .iter()
        .map(|o| o.as_ref().iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let scale = edges.iter().map(|e| norm(e)).fold(0.0, f64::max);
    for mut e in edges {
        orthogonalize(&mut e, &basis);
        let len = norm(&e);
        if len > RANK_TOLERANCE * scale && len > 0.0 {
            e.iter_mut().for_each(|c| *c /= len);
            basis.push(e);
        }
    }
    let mut r: Vec<f64> = (0..m).map(|k| v[k] - base[k]).collect();
    orthogonalize(&mut r, &basis);
    norm(&r)
}

/// `h_min(x₀,…,x_k) = minᵢ dist(xᵢ, aff{xⱼ : j ≠ i})`.
///
/// Returns exactly 0 when the vertices are affinely dependent, decided as
/// `h_min ≤ RANK_TOLERANCE × diam` (scale invariant and symmetric in the
/// vertices); fewer than two vertices also give 0.
pub fn h_min<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let count = points.len();
    if count < 2 {
        return 0.0;
    }
    let diam = diameter(points);
    if diam == 0.0 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut others: Vec<&P> = Vec::with_capacity(count - 1);
    for i in 0..count {
        others.clear();
        others.extend(points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p));
        best = best.min(height(points[i].as_ref(), &others));
    }
    if best <= RANK_TOLERANCE * diam {
        0.0
    } else {
        best
    }
}

/// Index of a vertex realizing `h_min` (lowest index on ties).
pub fn h_min_vertex<P: AsRef<[f64]>>(points: &[P]) -> usize {
    let mut best = (f64::INFINITY, 0);
    let mut others: Vec<&P> = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        others.clear();
        others.extend(points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p));
        let h = height(points[i].as_ref(), &others);
        if h < best.0 {
            best = (h, i);
        }
    }
    best.1
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `k`-dimensional Hausdorff measure of the convex hull of `k + 1` points,
/// `√det(EᵀE) / k!` with `E` the edge matrix, evaluated as `|Π R_ii| / k!`
/// from a Householder QR of `E` (the Gram determinant would square the
/// conditioning). Zero for affinely dependent vertices and for `k > m`; a
/// single point has `H⁰ = 1`.
pub fn simplex_volume<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let k = points.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let m = points[0].as_ref().len();
    if k > m || edge_span(points).len() < k {
        return 0.0;
    }
    let e = edge_matrix(points);
    let r = e.qr().r();
    let det: f64 = r.diagonal().iter().product();
    det.abs() / factorial(k)
}

/// Classical Menger curvature `c(x, y, z) = 1 / R(x, y, z)`, computed as
/// `4·Area / (|x−y||y−z||z−x|)`. Collinear triples and triples with a repeated
/// point give 0.
pub fn menger_curvature(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    if h_min(&[x, y, z]) == 0.0 {
        return 0.0;
    }
    let mut sides = [dist(x, y), dist(y, z), dist(z, x)];
    sides.sort_by(|a, b| b.total_cmp(a));
    let [a, b, c] = sides;
    // Kahan's stable form of Heron's formula (a ≥ b ≥ c).
    let area = 0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).max(0.0).sqrt();
    4.0 * area / (a * b * c)
}
