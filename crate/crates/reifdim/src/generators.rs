//! Generators for the example sets: slab combs, Koch-type curves (fixed and
//! variable angle), seeded Lipschitz graphs, plane patches, and finite unions.
//!
//! Every generator is deterministic given its parameters (and seed, for the
//! graph sampler) and returns a [`PointCloud`] whose declared resolution
//! matches the sampling density.

use crate::geometry::PointCloud;
use crate::input_error;
use crate::rng::SplitMix64;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Declarative description of a generated set; serialized as the sidecar next
/// to every emitted cloud so artifacts carry their provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Comb {
        j: usize,
        n: usize,
        slabs: usize,
        h: f64,
    },
    Koch {
        theta: f64,
        depth: usize,
    },
    VariableKoch {
        thetas: Vec<f64>,
        depth: usize,
    },
    LipschitzGraph {
        j: usize,
        n: usize,
        lipschitz: f64,
        seed: u64,
        h: f64,
    },
    PlanePatch {
        j: usize,
        n: usize,
        rho0: f64,
        h: f64,
    },
    FiniteUnion {
        parts: Vec<GeneratorSpec>,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<PointCloud> {
        match self {
            GeneratorSpec::Comb { j, n, slabs, h } => gen_comb(*j, *n, *slabs, *h),
            GeneratorSpec::Koch { theta, depth } => gen_koch(*theta, *depth),
            GeneratorSpec::VariableKoch { thetas, depth } => gen_variable_koch(thetas, *depth),
            GeneratorSpec::LipschitzGraph {
                j,
                n,
                lipschitz,
                seed,
                h,
            } => gen_lipschitz_graph(*j, *n, *lipschitz, *seed, *h),
            GeneratorSpec::PlanePatch { j, n, rho0, h } => gen_plane_patch(*j, *n, *rho0, *h),
            GeneratorSpec::FiniteUnion { parts } => {
                let clouds = parts
                    .iter()
                    .map(|p| p.generate())
                    .collect::<Result<Vec<_>>>()?;
                union(&clouds)
            }
        }
    }
}

/// Uniform grid over [0,1]^j with step 1/ceil(1/h) (≤ h), endpoints included.
fn unit_grid(j: usize, h: f64) -> Vec<Vec<f64>> {
    if j == 0 {
        return vec![vec![]];
    }
    let steps = (1.0 / h).ceil() as usize;
    let axis: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..j {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for pref in &out {
            for &t in &axis {
                let mut p = pref.clone();
                p.push(t);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Comb set: slabs `{1/i} × [0,1]^j × {0}^{n-j-1}` for i = 1..=slabs, sampled
/// at density h. For j = 0 each slab is the single point 1/i.
pub fn gen_comb(j: usize, n: usize, slabs: usize, h: f64) -> Result<PointCloud> {
    if j >= n {
        return Err(input_error!(
            "comb needs a transverse coordinate: j = {j} must be < n = {n}"
        ));
    }
    if slabs == 0 {
        return Err(input_error!("comb needs at least one slab"));
    }
    if !(h > 0.0) {
        return Err(input_error!("sampling density must be positive"));
    }
    let grid = unit_grid(j, h);
    let mut points = Vec::with_capacity(slabs * grid.len());
    for i in 1..=slabs {
        let x = 1.0 / i as f64;
        for g in &grid {
            let mut p = Vec::with_capacity(n);
            p.push(x);
            p.extend_from_slice(g);
            p.resize(n, 0.0);
            points.push(p);
        }
    }
    PointCloud::new(points, h, format!("comb j={j} n={n} N={slabs}"))
}

fn koch_similarity_ratio(theta: f64) -> f64 {
    1.0 / (2.0 * (1.0 + theta.cos()))
}

fn koch_vertices(thetas: &[f64], depth: usize) -> (Vec<Vec<f64>>, f64) {
    // Each level replaces a segment of direction a with four segments of
    // directions a, a+θ, a-θ, a scaled by r(θ); the endpoints are preserved
    // exactly because 2r(1 + cos θ) = 1.
    let mut angles: Vec<f64> = vec![0.0];
    let mut seg_len = 1.0f64;
    for level in 0..depth {
        let theta = thetas[level];
        let mut next = Vec::with_capacity(angles.len() * 4);
        for &a in &angles {
            next.push(a);
            next.push(a + theta);
            next.push(a - theta);
            next.push(a);
        }
        angles = next;
        seg_len *= koch_similarity_ratio(theta);
    }
    let mut points = Vec::with_capacity(angles.len() + 1);
    let (mut x, mut y) = (0.0f64, 0.0f64);
    points.push(vec![x, y]);
    for &a in &angles {
        x += seg_len * a.cos();
        y += seg_len * a.sin();
        points.push(vec![x, y]);
    }
    (points, seg_len)
}

/// Koch-type curve in R² with bend angle θ: vertex set at depth d, 4^d + 1
/// points, resolution = segment length r(θ)^d. θ = π/3 is the classical
/// curve (r = 1/3).
pub fn gen_koch(theta: f64, depth: usize) -> Result<PointCloud> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(input_error!(
            "koch bend angle must lie in (0, pi/2), got {theta}"
        ));
    }
    let thetas = vec![theta; depth];
    let (points, seg_len) = koch_vertices(&thetas, depth);
    PointCloud::new(points, seg_len, format!("koch theta={theta} d={depth}"))
}

/// Koch-type curve whose depth-k subdivision uses bend angle `thetas[k]`.
/// With θ_k decreasing the output flattens at fine scales.
pub fn gen_variable_koch(thetas: &[f64], depth: usize) -> Result<PointCloud> {
    if thetas.len() < depth {
        return Err(input_error!(
            "angle schedule has {} entries, need {depth}",
            thetas.len()
        ));
    }
    for w in thetas[..depth].windows(2) {
        if w[1] > w[0] + 1e-12 {
            return Err(input_error!("angle schedule must be non-increasing"));
        }
    }
    for &t in &thetas[..depth] {
        if !(t > 0.0 && t <= std::f64::consts::FRAC_PI_4) {
            return Err(input_error!(
                "schedule angles must lie in (0, pi/4], got {t}"
            ));
        }
    }
    let (points, seg_len) = koch_vertices(&thetas[..depth], depth);
    PointCloud::new(
        points,
        seg_len,
        format!(
            "variable-koch d={depth} theta0={}",
            thetas.first().copied().unwrap_or(0.0)
        ),
    )
}

/// Seeded piecewise-linear Lipschitz graph over `[0,1]^j` embedded in R^n.
///
/// Each of the n-j output coordinates is a sum of per-axis piecewise-linear
/// functions with slopes drawn uniformly from [-S, S], S = M / sqrt(j(n-j)),
/// which bounds the total Lipschitz constant by M. Sampling step is chosen so
/// the point spacing along the graph stays ≤ h.
pub fn gen_lipschitz_graph(
    j: usize,
    n: usize,
    lipschitz: f64,
    seed: u64,
    h: f64,
) -> Result<PointCloud> {
    if j >= n {
        return Err(input_error!(
            "graph needs codomain dimensions: j = {j} < n = {n}"
        ));
    }
    if lipschitz < 0.0 {
        return Err(input_error!("Lipschitz constant must be nonnegative"));
    }
    if !(h > 0.0) {
        return Err(input_error!("sampling density must be positive"));
    }
    let m = n - j;
    let knots = 12usize;
    let slope_cap = if lipschitz == 0.0 {
        0.0
    } else {
        lipschitz / ((j * m) as f64).sqrt()
    };
    let mut rng = SplitMix64::new(seed);
    // slopes[d][axis][segment]
    let mut slopes = vec![vec![vec![0.0f64; knots]; j]; m];
    for d in 0..m {
        for axis in 0..j {
            for s in 0..knots {
                slopes[d][axis][s] = rng.uniform(-slope_cap, slope_cap);
            }
        }
    }
    let eval_axis = |d: usize, axis: usize, t: f64| -> f64 {
        // integral of the piecewise-constant slope from 0 to t
        let scaled = (t * knots as f64).min(knots as f64);
        let full = scaled.floor() as usize;
        let mut acc = 0.0;
        for s in 0..full.min(knots) {
            acc += slopes[d][axis][s] / knots as f64;
        }
        if full < knots {
            acc += slopes[d][axis][full] * (scaled - full as f64) / knots as f64;
        }
        acc
    };

    let step_target = h / (1.0 + lipschitz * lipschitz).sqrt();
    let grid = unit_grid(j, step_target);
    let mut points = Vec::with_capacity(grid.len());
    for g in &grid {
        let mut p = Vec::with_capacity(n);
        p.extend_from_slice(g);
        for d in 0..m {
            let mut v = 0.0;
            for (axis, &t) in g.iter().enumerate() {
                v += eval_axis(d, axis, t);
            }
            p.push(v);
        }
        points.push(p);
    }
    PointCloud::new(
        points,
        h,
        format!("lipschitz-graph j={j} n={n} M={lipschitz} seed={seed}"),
    )
}

/// Sampling of the radius-rho0 ball inside the span of the first j axes,
/// embedded in R^n: grid step h, all |t| ≤ rho0 kept.
pub fn gen_plane_patch(j: usize, n: usize, rho0: f64, h: f64) -> Result<PointCloud> {
    if j > n {
        return Err(input_error!("patch dimension {j} exceeds ambient {n}"));
    }
    if j == 0 {
        return PointCloud::new(vec![vec![0.0; n]], h, format!("plane-patch j=0 n={n}"));
    }
    if !(rho0 > 0.0 && h > 0.0) {
        return Err(input_error!("patch radius and density must be positive"));
    }
    let steps = (rho0 / h).round() as i64;
    let axis: Vec<f64> = (-steps..=steps).map(|k| k as f64 * h).collect();
    let rho2 = rho0 * rho0 * (1.0 + 1e-12);
    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..j {
        let mut next = Vec::with_capacity(combos.len() * axis.len());
        for pref in &combos {
            for &t in &axis {
                let mut p = pref.clone();
                p.push(t);
                next.push(p);
            }
        }
        combos = next;
    }
    let mut points = Vec::new();
    for c in combos {
        let norm2: f64 = c.iter().map(|x| x * x).sum();
        if norm2 <= rho2 {
            let mut p = c;
            p.resize(n, 0.0);
            points.push(p);
        }
    }
    PointCloud::new(points, h, format!("plane-patch j={j} n={n} rho0={rho0}"))
}

/// Concatenation of clouds in the same ambient space; resolution is the max
/// of the inputs.
pub fn union(clouds: &[PointCloud]) -> Result<PointCloud> {
    if clouds.is_empty() {
        return Err(input_error!("union needs at least one cloud"));
    }
    let dim = clouds[0].dim();
    let mut coords = Vec::new();
    let mut resolution = 0.0f64;
    for c in clouds {
        if c.dim() != dim {
            return Err(input_error!(
                "union of clouds with different ambient dimensions"
            ));
        }
        coords.extend_from_slice(c.coords());
        resolution = resolution.max(c.resolution());
    }
    PointCloud::from_flat(
        coords,
        dim,
        resolution,
        format!("union of {}", clouds.len()),
    )
}

/// Rotates a 2-d cloud by `angle` about the origin (test/control helper).
pub fn rotated_2d(cloud: &PointCloud, angle: f64) -> Result<PointCloud> {
    if cloud.dim() != 2 {
        return Err(input_error!("rotated_2d needs a 2-d cloud"));
    }
    let (s, c) = angle.sin_cos();
    let pts: Vec<Vec<f64>> = cloud
        .iter_points()
        .map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]])
        .collect();
    PointCloud::new(
        pts,
        cloud.resolution(),
        format!("{} rot{angle}", cloud.label()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{one_sided_deviation, AffinePlane, Ball};

    #[test]
    fn comb_j0_points() {
        let c = gen_comb(0, 1, 3, 1e-3).unwrap();
        assert_eq!(c.len(), 3);
        let xs: Vec<f64> = c.iter_points().map(|p| p[0]).collect();
        assert_eq!(xs, vec![1.0, 0.5, 1.0 / 3.0]);
    }

    #[test]
    fn comb_j1_sampling() {
        // Slabs at x = 1 and x = 1/2, each sampled at y in {0, 0.5, 1}.
        let c = gen_comb(1, 2, 2, 0.5).unwrap();
        assert_eq!(c.len(), 6);
        let mut pts: Vec<(f64, f64)> = c.iter_points().map(|p| (p[0], p[1])).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            pts,
            vec![
                (0.5, 0.0),
                (0.5, 0.5),
                (0.5, 1.0),
                (1.0, 0.0),
                (1.0, 0.5),
                (1.0, 1.0)
            ]
        );
    }

    #[test]
    fn comb_rejects_j_equal_n() {
        assert!(gen_comb(1, 1, 5, 0.1).is_err());
    }

    #[test]
    fn comb_padding_in_r3() {
        let c = gen_comb(1, 3, 2, 0.5).unwrap();
        assert!(c.iter_points().all(|p| p[2] == 0.0));
    }

    #[test]
    fn koch_depth0_and_depth1() {
        let c0 = gen_koch(std::f64::consts::FRAC_PI_3, 0).unwrap();
        assert_eq!(c0.len(), 2);
        assert_eq!(c0.point(0), &[0.0, 0.0]);
        assert_eq!(c0.point(1), &[1.0, 0.0]);

        // Hand geometry of the equilateral bump.
        let c1 = gen_koch(std::f64::consts::FRAC_PI_3, 1).unwrap();
        assert_eq!(c1.len(), 5);
        let apex_height = 3.0f64.sqrt() / 6.0;
        let expect = [
            [0.0, 0.0],
            [1.0 / 3.0, 0.0],
            [0.5, apex_height],
            [2.0 / 3.0, 0.0],
            [1.0, 0.0],
        ];
        for (p, e) in c1.iter_points().zip(expect.iter()) {
            assert!((p[0] - e[0]).abs() < 1e-12 && (p[1] - e[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn koch_depth2_hand_vertices() {
        // First five vertices at depth 2: the depth-1 bump of the first
        // third, scaled by 1/3.
        let c = gen_koch(std::f64::consts::FRAC_PI_3, 2).unwrap();
        assert_eq!(c.len(), 17);
        let s3 = 3.0f64.sqrt();
        let expect = [
            [0.0, 0.0],
            [1.0 / 9.0, 0.0],
            [1.0 / 6.0, s3 / 18.0],
            [2.0 / 9.0, 0.0],
            [1.0 / 3.0, 0.0],
        ];
        for (k, e) in expect.iter().enumerate() {
            let p = c.point(k);
            assert!(
                (p[0] - e[0]).abs() < 1e-12 && (p[1] - e[1]).abs() < 1e-12,
                "vertex {k}: {:?} vs {:?}",
                p,
                e
            );
        }
        // Apex of the big bump is the middle vertex.
        let apex = c.point(8);
        assert!((apex[0] - 0.5).abs() < 1e-12 && (apex[1] - s3 / 6.0).abs() < 1e-12);
        // Resolution is the depth-2 segment length.
        assert!((c.resolution() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn koch_counts_and_range() {
        for d in 0..6 {
            let c = gen_koch(0.5, d).unwrap();
            assert_eq!(c.len(), 4usize.pow(d as u32) + 1);
        }
        assert!(gen_koch(0.0, 2).is_err());
        assert!(gen_koch(std::f64::consts::FRAC_PI_2, 2).is_err());
    }

    #[test]
    fn variable_koch_constant_schedule_matches_fixed() {
        let theta = std::f64::consts::FRAC_PI_4 * 0.8;
        let a = gen_koch(theta, 4).unwrap();
        let b = gen_variable_koch(&vec![theta; 4], 4).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter_points().zip(b.iter_points()) {
            assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn variable_koch_validation() {
        assert!(gen_variable_koch(&[0.3, 0.2], 3).is_err());
        assert!(gen_variable_koch(&[0.2, 0.3], 2).is_err());
        assert!(gen_variable_koch(&[0.9, 0.2], 2).is_err());
    }

    #[test]
    fn lipschitz_graph_empirical_constant() {
        let g = gen_lipschitz_graph(1, 2, 1.0, 7, 1e-3).unwrap();
        let mut max_slope = 0.0f64;
        for w in 0..g.len() - 1 {
            let p = g.point(w);
            let q = g.point(w + 1);
            max_slope = max_slope.max((q[1] - p[1]).abs() / (q[0] - p[0]).abs());
        }
        assert!(max_slope <= 1.0 + 1e-9, "max slope {max_slope}");

        // M = 0 gives a flat patch in the base plane.
        let flat = gen_lipschitz_graph(1, 2, 0.0, 3, 1e-2).unwrap();
        assert!(flat.iter_points().all(|p| p[1].abs() < 1e-15));
    }

    #[test]
    fn lipschitz_graph_deviation_from_base_plane() {
        // Against the strong plane (the base plane direction through a sample
        // point) the one-sided deviation never exceeds M.
        let m_lip = 0.8;
        let g = gen_lipschitz_graph(1, 2, m_lip, 11, 1e-3).unwrap();
        let dir = vec![vec![1.0, 0.0]];
        let picks = [
            (g.len() / 10, 0.05),
            (g.len() / 2, 0.1),
            (g.len() * 4 / 5, 0.2),
        ];
        for &(idx, rho) in &picks {
            let y = g.point(idx).to_vec();
            let plane = AffinePlane::new(y.clone(), dir.clone()).unwrap();
            let ball = Ball::new(y, rho).unwrap();
            let dev = one_sided_deviation(&g, &plane, &ball).unwrap();
            assert!(dev <= m_lip + 1e-9, "dev {dev}");
        }
    }

    #[test]
    fn graph_is_seed_deterministic() {
        let a = gen_lipschitz_graph(1, 2, 1.0, 42, 1e-2).unwrap();
        let b = gen_lipschitz_graph(1, 2, 1.0, 42, 1e-2).unwrap();
        assert_eq!(a.coords(), b.coords());
        let c = gen_lipschitz_graph(1, 2, 1.0, 43, 1e-2).unwrap();
        assert_ne!(a.coords(), c.coords());
    }

    #[test]
    fn patch_counts() {
        let p = gen_plane_patch(1, 2, 1.0, 0.1).unwrap();
        assert_eq!(p.len(), 21);
        assert!(p.iter_points().all(|q| q[1] == 0.0));
    }

    #[test]
    fn union_identity_and_mismatch() {
        let a = gen_plane_patch(1, 2, 1.0, 0.1).unwrap();
        let u = union(std::slice::from_ref(&a)).unwrap();
        assert_eq!(u.len(), a.len());
        assert_eq!(u.coords(), a.coords());
        let b = gen_plane_patch(1, 3, 1.0, 0.1).unwrap();
        assert!(union(&[a, b]).is_err());
    }
}
