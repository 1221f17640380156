//! Numerical geometry kernel: point clouds, balls, affine planes, scale
//! ladders, distances, and minimax plane fitting.
//!
//! Coordinates are plain `f64`; a cloud stores its points in one flat buffer.
//! Every operation is a pure function of immutable inputs.

pub mod eigen;
pub mod fit;
pub mod index;

use crate::input_error;
use crate::Result;
use serde::{Deserialize, Serialize};

pub use fit::{fit_plane, fit_plane_anchored, FitObjective};
pub use index::GridIndex;

/// Orthonormality tolerance for [`AffinePlane`] bases.
pub const ORTHO_TOL: f64 = 1e-10;

/// Scale-ladder safety factor: scale-dependent claims are only evaluated at
/// radii ≥ `SAFETY_FACTOR * resolution`, below which any finite sample looks
/// zero-dimensional.
pub const SAFETY_FACTOR: f64 = 10.0;

/// Finite sample of a subset of R^n with a declared sampling density:
/// every point of the intended set lies within `resolution` of some sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
    resolution: f64,
    label: String,
}

impl PointCloud {
    /// Validated constructor: uniform dimension, positive resolution, at
    /// least one point.
    pub fn new(points: Vec<Vec<f64>>, resolution: f64, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(input_error!("point cloud needs at least one point"));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(input_error!("ambient dimension must be positive"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(input_error!(
                    "inconsistent point dimension: expected {dim}, got {}",
                    p.len()
                ));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(coords, dim, resolution, label)
    }

    /// Flat-buffer constructor (`coords.len()` must be a positive multiple of
    /// `dim`).
    pub fn from_flat(
        coords: Vec<f64>,
        dim: usize,
        resolution: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 || coords.is_empty() || coords.len() % dim != 0 {
            return Err(input_error!(
                "flat buffer length {} not a positive multiple of dim {dim}",
                coords.len()
            ));
        }
        if !(resolution > 0.0) {
            return Err(input_error!(
                "resolution must be positive, got {resolution}"
            ));
        }
        Ok(Self {
            coords,
            dim,
            resolution,
            label: label.into(),
        })
    }

    /// Possibly-empty cloud; only `neighborhood` produces these.
    pub(crate) fn from_flat_allow_empty(
        coords: Vec<f64>,
        dim: usize,
        resolution: f64,
        label: impl Into<String>,
    ) -> Self {
        Self {
            coords,
            dim,
            resolution,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Bounding-box diagonal; cheap stand-in for the diameter when validating
    /// scale ranges.
    pub fn bbox_diameter(&self) -> f64 {
        let n = self.dim;
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in self.iter_points() {
            for (k, &x) in p.iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        lo.iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    /// Index of the sample point closest to `target`.
    pub fn nearest_index(&self, target: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.iter_points().enumerate() {
            let d = dist2(p, target);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Restriction to a subset of indices (order preserved).
    pub fn subset(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        if indices.is_empty() {
            return Err(input_error!("subset needs at least one index"));
        }
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_flat(coords, self.dim, self.resolution, label)
    }
}

/// Closed ball `B_r(c)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(input_error!("ball radius must be positive, got {radius}"));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        dist2(p, &self.center) <= self.radius * self.radius
    }
}

/// Element of the affine Grassmannian: a base point plus an orthonormal basis
/// of the j-dimensional direction space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffinePlane {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl AffinePlane {
    pub fn new(base: Vec<f64>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.len();
        if basis.len() > n {
            return Err(input_error!(
                "plane dimension {} exceeds ambient {}",
                basis.len(),
                n
            ));
        }
        for (i, u) in basis.iter().enumerate() {
            if u.len() != n {
                return Err(input_error!(
                    "basis vector length {} != ambient {}",
                    u.len(),
                    n
                ));
            }
            let nu: f64 = u.iter().map(|x| x * x).sum();
            if (nu - 1.0).abs() > ORTHO_TOL {
                return Err(input_error!("basis vector {i} is not unit norm"));
            }
            for w in basis.iter().skip(i + 1) {
                let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                if dot.abs() > ORTHO_TOL {
                    return Err(input_error!("basis vectors are not orthogonal"));
                }
            }
        }
        Ok(Self { base, basis })
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Intrinsic dimension j.
    pub fn j(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Same direction space through a different base point (the `L + x`
    /// planes of the shifted strong conditions).
    pub fn through(&self, base: Vec<f64>) -> Result<Self> {
        if base.len() != self.ambient_dim() {
            return Err(input_error!("base point dimension mismatch"));
        }
        Ok(Self {
            base,
            basis: self.basis.clone(),
        })
    }
}

/// Geometric sequence of radii `rho_max * ratio^k`, k = 0..count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleLadder {
    pub rho_max: f64,
    pub ratio: f64,
    pub count: usize,
}

impl ScaleLadder {
    pub fn new(rho_max: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(rho_max > 0.0) {
            return Err(input_error!("rho_max must be positive"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(input_error!("ladder ratio must lie in (0,1), got {ratio}"));
        }
        if count == 0 {
            return Err(input_error!("ladder needs at least one scale"));
        }
        Ok(Self {
            rho_max,
            ratio,
            count,
        })
    }

    /// Radii in strictly decreasing order.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.count)
            .map(|k| self.rho_max * self.ratio.powi(k as i32))
            .collect()
    }

    pub fn min_radius(&self) -> f64 {
        self.rho_max * self.ratio.powi(self.count as i32 - 1)
    }

    /// Checks the binding rule: smallest radius ≥ `safety * resolution`.
    pub fn validate_for(&self, cloud: &PointCloud, safety: f64) -> Result<()> {
        let floor = safety * cloud.resolution();
        if self.min_radius() < floor {
            return Err(input_error!(
                "ladder minimum {} is below {safety}x cloud resolution ({floor})",
                self.min_radius()
            ));
        }
        Ok(())
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Orthogonal distance from `p` to the affine plane: norm of the component of
/// `p - base` outside the span of the basis.
pub fn distance_point_plane(p: &[f64], plane: &AffinePlane) -> Result<f64> {
    if p.len() != plane.ambient_dim() {
        return Err(input_error!(
            "point dimension {} != plane ambient dimension {}",
            p.len(),
            plane.ambient_dim()
        ));
    }
    let mut res2 = 0.0;
    let mut resid: Vec<f64> = p.iter().zip(plane.base()).map(|(a, b)| a - b).collect();
    for u in plane.basis() {
        let t: f64 = resid.iter().zip(u).map(|(a, b)| a * b).sum();
        for (r, b) in resid.iter_mut().zip(u) {
            *r -= t * b;
        }
    }
    for r in &resid {
        res2 += r * r;
    }
    Ok(res2.sqrt())
}

/// The sample points of `cloud` inside the closed ball; resolution and label
/// are inherited. The result may be empty.
pub fn neighborhood(cloud: &PointCloud, ball: &Ball) -> Result<PointCloud> {
    if ball.center.len() != cloud.dim() {
        return Err(input_error!("ball center dimension mismatch"));
    }
    let r2 = ball.radius * ball.radius;
    let mut coords = Vec::new();
    for p in cloud.iter_points() {
        if dist2(p, &ball.center) <= r2 {
            coords.extend_from_slice(p);
        }
    }
    Ok(PointCloud::from_flat_allow_empty(
        coords,
        cloud.dim(),
        cloud.resolution(),
        cloud.label(),
    ))
}

/// One-sided deviation: sup over sample points in the ball of the distance to
/// the plane, normalized by the radius. Empty intersections score 0.
pub fn one_sided_deviation(cloud: &PointCloud, plane: &AffinePlane, ball: &Ball) -> Result<f64> {
    if !(ball.radius > 0.0) {
        return Err(input_error!("ball radius must be positive"));
    }
    if plane.ambient_dim() != cloud.dim() || ball.center.len() != cloud.dim() {
        return Err(input_error!("dimension mismatch in one_sided_deviation"));
    }
    let r2 = ball.radius * ball.radius;
    let mut sup = 0.0f64;
    for p in cloud.iter_points() {
        if dist2(p, &ball.center) <= r2 {
            let d = distance_point_plane(p, plane)?;
            sup = sup.max(d);
        }
    }
    Ok(sup / ball.radius)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(input_error!("hausdorff_distance needs nonempty clouds"));
    }
    if a.dim() != b.dim() {
        return Err(input_error!("dimension mismatch in hausdorff_distance"));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    let mut sup = 0.0f64;
    for p in a.iter_points() {
        let mut inf = f64::INFINITY;
        for q in b.iter_points() {
            let d = dist2(p, q);
            if d < inf {
                inf = d;
                if inf == 0.0 {
                    break;
                }
            }
        }
        sup = sup.max(inf);
    }
    sup.sqrt()
}

/// Volume of the j-dimensional unit ball, `ω_j = π^{j/2} / Γ(j/2 + 1)`,
/// computed by the exact recurrence `ω_j = 2π ω_{j-2} / j`.
pub fn unit_ball_volume(j: usize) -> f64 {
    match j {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / j as f64 * unit_ball_volume(j - 2),
    }
}
