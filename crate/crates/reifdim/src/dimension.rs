//! Dimension and measure estimators: lattice box counts, Minkowski slopes,
//! greedy packing/covering pre-measures, the slab covering constant, the
//! dimension-gap exponent eta, the covering recursion check, and the
//! Lipschitz-graph constants.

use crate::geometry::{neighborhood, unit_ball_volume, Ball, GridIndex, PointCloud, SAFETY_FACTOR};
use crate::input_error;
use crate::rng::SplitMix64;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Lattice ops support up to this many ambient dimensions.
const MAX_LATTICE_DIM: usize = 8;

/// Number of half-open axis-aligned lattice cubes of side `eps` (lattice
/// anchored at the origin) containing at least one sample point.
pub fn box_count(cloud: &PointCloud, eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(input_error!("box size must be positive"));
    }
    let n = cloud.dim();
    if n > MAX_LATTICE_DIM {
        return Err(input_error!(
            "box_count supports ambient dimension <= {MAX_LATTICE_DIM}"
        ));
    }
    let mut cells: HashSet<[i64; MAX_LATTICE_DIM]> = HashSet::with_capacity(cloud.len());
    let mut key = [0i64; MAX_LATTICE_DIM];
    for p in cloud.iter_points() {
        for (k, &x) in p.iter().enumerate() {
            key[k] = (x / eps).floor() as i64;
        }
        cells.insert(key);
    }
    Ok(cells.len() as u64)
}

/// Box counts with fitted log-log slopes: `global` is the least-squares slope
/// of ln N against ln(1/eps); `lower/upper` are the min/max of windowed local
/// slopes (window 3), the finite surrogates of liminf/limsup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// (eps, count) pairs, eps strictly decreasing.
    pub scales: Vec<(f64, u64)>,
    pub global: f64,
    pub lower_est: f64,
    pub upper_est: f64,
    pub window: usize,
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

impl DimensionEstimate {
    pub fn from_counts(scales: Vec<(f64, u64)>) -> Result<Self> {
        if scales.len() < 4 {
            return Err(input_error!(
                "need at least 4 scales for a slope, got {}",
                scales.len()
            ));
        }
        for w in scales.windows(2) {
            if !(w[1].0 < w[0].0) {
                return Err(input_error!("scales must be strictly decreasing"));
            }
            if w[1].1 < w[0].1 {
                return Err(input_error!(
                    "box counts must be non-increasing in eps (N({}) = {} < N({}) = {})",
                    w[1].0,
                    w[1].1,
                    w[0].0,
                    w[0].1
                ));
            }
        }
        if scales.iter().any(|&(_, c)| c == 0) {
            return Err(input_error!("box counts must be positive"));
        }
        let xs: Vec<f64> = scales.iter().map(|&(e, _)| (1.0 / e).ln()).collect();
        let ys: Vec<f64> = scales.iter().map(|&(_, c)| (c as f64).ln()).collect();
        let global = least_squares_slope(&xs, &ys);
        let window = 3usize;
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for start in 0..=(scales.len() - window) {
            let s = least_squares_slope(&xs[start..start + window], &ys[start..start + window]);
            lower = lower.min(s);
            upper = upper.max(s);
        }
        if global < lower - 1e-9 || global > upper + 1e-9 {
            return Err(input_error!(
                "slope estimate out of local-slope envelope: {lower} / {global} / {upper}"
            ));
        }
        Ok(Self {
            scales,
            global,
            lower_est: lower,
            upper_est: upper,
            window,
        })
    }
}

/// Box-counting dimension estimate over a ladder of box sizes.
///
/// The ladder must stay within [SAFETY_FACTOR * resolution, diameter]; use
/// geometric ladders whose ratio is the reciprocal of an integer (1/2, 1/3)
/// so lattice nesting keeps counts monotone.
pub fn minkowski_dims(cloud: &PointCloud, eps_ladder: &[f64]) -> Result<DimensionEstimate> {
    if eps_ladder.len() < 4 {
        return Err(input_error!(
            "need at least 4 ladder points, got {}",
            eps_ladder.len()
        ));
    }
    let floor = SAFETY_FACTOR * cloud.resolution();
    let diam = cloud.bbox_diameter();
    for &e in eps_ladder {
        if e < floor {
            return Err(input_error!("box size {e} below sampling floor {floor}"));
        }
        if e > diam.max(floor) {
            return Err(input_error!("box size {e} above cloud diameter {diam}"));
        }
    }
    let mut sorted = eps_ladder.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut scales = Vec::with_capacity(sorted.len());
    for &e in &sorted {
        scales.push((e, box_count(cloud, e)?));
    }
    DimensionEstimate::from_counts(scales)
}

/// Certified upper bound for the packing-dimension estimate of a union given
/// a decomposition: sup over the parts of the whole-ladder box slope.
pub fn packing_dim_bound(parts: &[PointCloud], eps_ladder: &[f64]) -> Result<f64> {
    if parts.is_empty() {
        return Err(input_error!(
            "packing_dim_bound needs a nonempty decomposition"
        ));
    }
    let mut sup = f64::NEG_INFINITY;
    for part in parts {
        sup = sup.max(minkowski_dims(part, eps_ladder)?.global);
    }
    Ok(sup)
}

/// Greedy maximal packing value: balls of radius `eta` centered at sample
/// points, selected in index order, pairwise disjoint (center distance
/// > 2 eta); returns omega_j * count * eta^j.
pub fn packing_premeasure(cloud: &PointCloud, j: usize, eta: f64) -> Result<f64> {
    let floor = SAFETY_FACTOR * cloud.resolution();
    if eta < floor {
        return Err(input_error!(
            "packing scale {eta} below sampling floor {floor}"
        ));
    }
    let sep2 = 4.0 * eta * eta;
    let mut selected: Vec<&[f64]> = Vec::new();
    for p in cloud.iter_points() {
        if selected
            .iter()
            .all(|q| crate::geometry::euclid(p, q).powi(2) > sep2)
        {
            selected.push(p);
        }
    }
    Ok(unit_ball_volume(j) * selected.len() as f64 * eta.powi(j as i32))
}

/// Variable-radius greedy packing: each sample point in index order gets the
/// largest feasible radius ≤ eta_max keeping all balls disjoint. Returns
/// omega_j * sum r_l^j; a lower bound for the packing pre-measure supremum.
pub fn packing_premeasure_variable(cloud: &PointCloud, j: usize, eta_max: f64) -> Result<f64> {
    let floor = SAFETY_FACTOR * cloud.resolution();
    if eta_max < floor {
        return Err(input_error!(
            "packing scale {eta_max} below sampling floor {floor}"
        ));
    }
    let mut selected: Vec<(&[f64], f64)> = Vec::new();
    let mut value = 0.0;
    for p in cloud.iter_points() {
        let mut r = eta_max;
        for (q, rq) in &selected {
            r = r.min(crate::geometry::euclid(p, q) - rq);
            if r <= 0.0 {
                break;
            }
        }
        if r > 0.0 {
            selected.push((p, r));
            value += r.powi(j as i32);
        }
    }
    Ok(unit_ball_volume(j) * value)
}

/// Greedy cover value: sweep the samples in index order and, for each first
/// uncovered point, pick the sample-centered ball of radius `delta` that
/// covers it and the most other uncovered points (ties broken by point
/// index); returns omega_j * count * delta^j, an upper-bound estimate of the
/// Hausdorff pre-measure at cover scale delta.
///
/// The sweep rule (rather than a global most-covering pick) keeps the cover
/// gap-free along curves: it reproduces the ceil(L / 2 delta) count on a
/// segment, which a global-gain greedy overshoots by scattering balls.
pub fn hausdorff_premeasure(cloud: &PointCloud, j: usize, delta: f64) -> Result<f64> {
    let floor = SAFETY_FACTOR * cloud.resolution();
    if delta < floor {
        return Err(input_error!(
            "cover scale {delta} below sampling floor {floor}"
        ));
    }
    let count = greedy_cover_count(cloud, delta);
    Ok(unit_ball_volume(j) * count as f64 * delta.powi(j as i32))
}

fn greedy_cover_count(cloud: &PointCloud, delta: f64) -> usize {
    let n = cloud.len();
    let index = GridIndex::build(cloud, delta);
    // Neighbor lists within delta (every point covers at least itself).
    let neigh: Vec<Vec<usize>> = (0..n)
        .map(|i| index.in_ball(cloud, cloud.point(i), delta))
        .collect();
    let mut covered = vec![false; n];
    let mut picked = 0usize;
    let mut cursor = 0usize;
    while cursor < n {
        if covered[cursor] {
            cursor += 1;
            continue;
        }
        // Candidate centers are the samples within delta of the cursor point;
        // any of them covers it.
        let mut best = cursor;
        let mut best_gain = 0usize;
        for &c in &neigh[cursor] {
            let gain = neigh[c].iter().filter(|&&k| !covered[k]).count();
            if gain > best_gain {
                best_gain = gain;
                best = c;
            }
        }
        for &k in &neigh[best] {
            covered[k] = true;
        }
        picked += 1;
    }
    picked
}

/// Packing and Hausdorff pre-measures at a common scale plus their ratio.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureReport {
    pub j: usize,
    pub scale: f64,
    pub hausdorff_pre: f64,
    pub packing_pre: f64,
    pub ratio: f64,
}

pub fn measure_compare(cloud: &PointCloud, j: usize, scale: f64) -> Result<MeasureReport> {
    let hausdorff_pre = hausdorff_premeasure(cloud, j, scale)?;
    let packing_pre = packing_premeasure(cloud, j, scale)?;
    Ok(MeasureReport {
        j,
        scale,
        hausdorff_pre,
        packing_pre,
        ratio: packing_pre / hausdorff_pre,
    })
}

/// Explicit lattice cover of the slab L^{2 delta} ∩ B_1(0), L = span of the
/// first j axes, by balls of radius 4 delta: pitch 4 delta / sqrt(n) in every
/// direction, tangential centers spanning [-1, 1], normal centers restricted
/// to |x| ≤ 2 delta. Returns the ball count Q and C = Q (4 delta)^j, which
/// stays bounded in delta for fixed (n, j).
pub fn slab_covering_constant(n: usize, j: usize, delta: f64) -> Result<(u64, f64)> {
    if !(delta > 0.0 && delta <= 0.125) {
        return Err(input_error!(
            "slab cover needs 0 < delta <= 1/8, got {delta}"
        ));
    }
    if j > n || n == 0 {
        return Err(input_error!("slab cover needs j <= n, n >= 1"));
    }
    let pitch = 4.0 * delta / (n as f64).sqrt();
    let m_tan = (1.0 / pitch + 0.5).floor() as u64; // centers m*pitch, |m| <= m_tan
    let tan_count = 2 * m_tan + 1;
    let k_norm = (2.0 * delta / pitch).floor() as u64;
    let norm_count = 2 * k_norm + 1;
    let q = tan_count.pow(j as u32) * norm_count.pow((n - j) as u32);
    let c = q as f64 * (4.0 * delta).powi(j as i32);
    Ok((q, c))
}

/// Enumerates the cover's ball centers (test support for the correctness
/// oracle: every slab point must lie within 4 delta of one of these).
pub fn slab_cover_centers(n: usize, j: usize, delta: f64) -> Result<Vec<Vec<f64>>> {
    let (_, _) = slab_covering_constant(n, j, delta)?;
    let pitch = 4.0 * delta / (n as f64).sqrt();
    let m_tan = (1.0 / pitch + 0.5).floor() as i64;
    let k_norm = (2.0 * delta / pitch).floor() as i64;
    let mut centers: Vec<Vec<f64>> = vec![vec![]];
    for axis in 0..n {
        let range: Vec<i64> = if axis < j {
            (-m_tan..=m_tan).collect()
        } else {
            (-k_norm..=k_norm).collect()
        };
        let mut next = Vec::with_capacity(centers.len() * range.len());
        for pref in &centers {
            for &m in &range {
                let mut p = pref.clone();
                p.push(m as f64 * pitch);
                next.push(p);
            }
        }
        centers = next;
    }
    Ok(centers)
}

/// Dimension-gap exponent: eta = -ln(2C) / ln(4 delta1) for delta1 ≤ 1/8,
/// and the branch value n - j + 1 for delta1 > 1/8. Positive for delta1 <
/// 1/4, decreasing as delta1 decreases on (0, 1/8], and -> 0 as delta1 -> 0.
pub fn eta(delta1: f64, c_cover: f64, n: usize, j: usize) -> Result<f64> {
    if !(delta1 > 0.0) {
        return Err(input_error!("eta needs delta1 > 0"));
    }
    if delta1 > 0.125 {
        return Ok((n - j + 1) as f64);
    }
    if !(c_cover > 0.5) {
        return Err(input_error!("eta needs C > 1/2 (log sign), got {c_cover}"));
    }
    Ok(-(2.0 * c_cover).ln() / (4.0 * delta1).ln())
}

/// One level of the covering recursion table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecursionLevel {
    pub q: usize,
    pub scale: f64,
    pub count: u64,
    pub weighted: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringRecursionReport {
    pub delta1: f64,
    pub lambda0: f64,
    pub cover_constant: f64,
    pub eta: f64,
    pub t0: f64,
    pub levels: Vec<RecursionLevel>,
    /// Per-level decay ratios `weighted[q+1] / weighted[q]`.
    pub decay_ratios: Vec<f64>,
    /// True when every ratio is ≤ 1/2.
    pub decay_ok: bool,
    /// Levels dropped because their scale fell below the sampling floor.
    pub truncated: bool,
}

/// Verifies the geometric decay of weighted box counts
/// N(A, (4 delta1)^q lambda) * ((4 delta1)^q lambda)^{j + eta} ≤ 2^{-q} T_0
/// level by level, stopping at the sampling floor.
pub fn covering_recursion_check(
    cloud: &PointCloud,
    j: usize,
    delta1: f64,
    lambda0: f64,
    q_max: usize,
) -> Result<CoveringRecursionReport> {
    if !(delta1 > 0.0 && delta1 <= 0.125) {
        return Err(input_error!("covering recursion needs 0 < delta1 <= 1/8"));
    }
    if !(lambda0 > 0.0) {
        return Err(input_error!("initial scale must be positive"));
    }
    let n = cloud.dim();
    let (q_cov, c_cov) = slab_covering_constant(n, j, delta1)?;
    let eta_val = eta(delta1, c_cov, n, j)?;
    let expo = j as f64 + eta_val;
    let floor = SAFETY_FACTOR * cloud.resolution();
    let shrink = 4.0 * delta1;

    let mut levels = Vec::new();
    let mut truncated = false;
    let mut t0 = 0.0;
    for q in 0..=q_max {
        let scale = shrink.powi(q as i32) * lambda0;
        if scale < floor {
            truncated = true;
            break;
        }
        let count = box_count(cloud, scale)?;
        if q == 0 {
            t0 = (count.max(q_cov)) as f64 * lambda0.powf(expo);
        }
        let weighted = count as f64 * scale.powf(expo);
        let bound = 0.5f64.powi(q as i32) * t0;
        levels.push(RecursionLevel {
            q,
            scale,
            count,
            weighted,
            bound,
            pass: weighted <= bound * (1.0 + 1e-9),
        });
    }
    if levels.is_empty() {
        return Err(input_error!(
            "initial scale {lambda0} already below sampling floor {floor}"
        ));
    }
    let decay_ratios: Vec<f64> = levels
        .windows(2)
        .map(|w| w[1].weighted / w[0].weighted)
        .collect();
    let decay_ok = decay_ratios.iter().all(|&r| r <= 0.5 + 1e-9);
    Ok(CoveringRecursionReport {
        delta1,
        lambda0,
        cover_constant: c_cov,
        eta: eta_val,
        t0,
        levels,
        decay_ratios,
        decay_ok,
        truncated,
    })
}

/// Closed-form Lipschitz graph constants: c = omega_j (1 + M^2)^{-j/2} (lower
/// density bound) and C = (4 max(M,1))^j / c (packing/Hausdorff comparison).
pub fn lipschitz_constants(m_lip: f64, j: usize) -> Result<(f64, f64)> {
    if m_lip < 0.0 {
        return Err(input_error!("Lipschitz constant must be nonnegative"));
    }
    let c = unit_ball_volume(j) * (1.0 + m_lip * m_lip).powf(-(j as f64) / 2.0);
    let big_c = (4.0 * m_lip.max(1.0)).powi(j as i32) / c;
    Ok((c, big_c))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphBallReport {
    pub trials_requested: usize,
    pub trials_run: usize,
    pub skipped: usize,
    pub min_ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks the Lipschitz-graph ball lower bound H^j(B_rho(x) ∩ graph) ≥
/// c(M,j) rho^j on random sample centers and radii: the measure is estimated
/// by the greedy cover pre-measure at a fine scale; trials whose ball leaves
/// the sampled domain or whose radius is too small for the resolution are
/// skipped.
pub fn graph_ball_lower_bound_check(
    cloud: &PointCloud,
    m_lip: f64,
    j: usize,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<GraphBallReport> {
    let (c_const, _) = lipschitz_constants(m_lip, j)?;
    let h = cloud.resolution();
    let rho_min = 40.0 * h;
    let rho_max_cap = 0.25f64;
    if rho_min >= rho_max_cap {
        return Err(input_error!(
            "cloud too coarse for ball trials (resolution {h})"
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut run = 0usize;
    let mut skipped = 0usize;
    let mut min_ratio = f64::INFINITY;
    let mut attempts = 0usize;
    while run < trials && attempts < trials * 20 {
        attempts += 1;
        let idx = rng.below(cloud.len());
        let rho = rng.uniform(rho_min, rho_max_cap);
        let x = cloud.point(idx);
        // Stay inside the sampled domain [0,1]^j so the continuum bound
        // applies to the sampled piece.
        if x[..j].iter().any(|&t| t < rho || t > 1.0 - rho) {
            skipped += 1;
            continue;
        }
        let ball = Ball::new(x.to_vec(), rho)?;
        let neigh = neighborhood(cloud, &ball)?;
        if neigh.len() < 2 {
            skipped += 1;
            continue;
        }
        let fine = (rho / 25.0).max(SAFETY_FACTOR * h);
        let est = hausdorff_premeasure(&neigh, j, fine)?;
        let ratio = est / (c_const * rho.powi(j as i32));
        min_ratio = min_ratio.min(ratio);
        run += 1;
    }
    if run == 0 {
        return Err(input_error!("no usable trials"));
    }
    Ok(GraphBallReport {
        trials_requested: trials,
        trials_run: run,
        skipped,
        min_ratio,
        tolerance,
        pass: min_ratio >= 1.0 - tolerance,
    })
}

/// Writes (ln(1/eps), ln N) pairs for external plotting.
pub fn loglog_pairs(est: &DimensionEstimate) -> Vec<(f64, f64)> {
    est.scales
        .iter()
        .map(|&(e, c)| ((1.0 / e).ln(), (c as f64).ln()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_comb, gen_koch, gen_lipschitz_graph, gen_plane_patch};

    #[test]
    fn box_count_single_point() {
        let c = PointCloud::new(vec![vec![0.3, 0.4]], 1e-6, "pt").unwrap();
        for eps in [0.001, 0.1, 1.0, 10.0] {
            assert_eq!(box_count(&c, eps).unwrap(), 1);
        }
    }

    #[test]
    fn box_count_unit_segment_convention() {
        // [0,1] x {0} at eps = 1/8: cells 0..7 plus the endpoint 1 falling in
        // the half-open cell [1, 1.125) -> 9.
        let pts: Vec<Vec<f64>> = (0..=1000).map(|k| vec![k as f64 / 1000.0, 0.0]).collect();
        let c = PointCloud::new(pts, 1e-3, "seg").unwrap();
        assert_eq!(box_count(&c, 0.125).unwrap(), 9);
    }

    #[test]
    fn box_count_sandwich() {
        // N(2eps) <= N(eps) <= 3^n N(2eps) on assorted clouds.
        let clouds = [
            gen_koch(std::f64::consts::FRAC_PI_3, 5).unwrap(),
            gen_comb(1, 2, 30, 1e-3).unwrap(),
            gen_plane_patch(1, 2, 1.0, 1e-3).unwrap(),
        ];
        for cloud in &clouds {
            for eps in [0.02f64, 0.05, 0.11] {
                let n1 = box_count(cloud, eps).unwrap();
                let n2 = box_count(cloud, 2.0 * eps).unwrap();
                assert!(n2 <= n1, "{} at {eps}", cloud.label());
                assert!(n1 <= 9 * n2, "{} at {eps}", cloud.label());
            }
        }
    }

    #[test]
    fn comb_n0_slope_half() {
        let c = gen_comb(0, 1, 1000, 1e-9).unwrap();
        let ladder: Vec<f64> = (3..=10).map(|k| 0.5f64.powi(k)).collect();
        let est = minkowski_dims(&c, &ladder).unwrap();
        assert!(
            (est.global - 0.5).abs() < 0.05,
            "comb N_0 slope {}",
            est.global
        );
    }

    #[test]
    fn flat_patch_slope_one() {
        let p = gen_plane_patch(1, 2, 1.0, 1e-4).unwrap();
        let ladder: Vec<f64> = (4..=9).map(|k| 0.5f64.powi(k)).collect();
        let est = minkowski_dims(&p, &ladder).unwrap();
        assert!(
            (est.global - 1.0).abs() < 0.05,
            "patch slope {}",
            est.global
        );
        assert!(est.lower_est <= est.global + 1e-9 && est.global <= est.upper_est + 1e-9);
    }

    #[test]
    fn koch_slope_triadic() {
        let expect = 4.0f64.ln() / 3.0f64.ln();
        // Depth 8: the coarse-scale transient biases the least-squares slope
        // low; the admissible window lands in [1.16, 1.25].
        let k8 = gen_koch(std::f64::consts::FRAC_PI_3, 8).unwrap();
        let ladder8: Vec<f64> = (1..=5).map(|q| 3.0f64.powi(-q)).collect();
        let est8 = minkowski_dims(&k8, &ladder8).unwrap();
        assert!(
            est8.global > 1.16 && est8.global < 1.25,
            "koch d=8 slope {}",
            est8.global
        );
        // Depth 10 over the settled window recovers log 4 / log 3 to 0.02.
        let k10 = gen_koch(std::f64::consts::FRAC_PI_3, 10).unwrap();
        let ladder10: Vec<f64> = (3..=7).map(|q| 3.0f64.powi(-q)).collect();
        let est10 = minkowski_dims(&k10, &ladder10).unwrap();
        assert!(
            (est10.global - expect).abs() < 0.02,
            "koch d=10 slope {} vs {expect}",
            est10.global
        );
    }

    #[test]
    fn minkowski_rejects_short_or_out_of_range_ladders() {
        let p = gen_plane_patch(1, 2, 1.0, 1e-3).unwrap();
        assert!(minkowski_dims(&p, &[0.5, 0.25, 0.125]).is_err());
        assert!(minkowski_dims(&p, &[0.5, 0.25, 0.125, 0.005]).is_err()); // below 10h
    }

    #[test]
    fn packing_dim_bound_single_part_matches_whole() {
        let p = gen_plane_patch(1, 2, 1.0, 1e-4).unwrap();
        let ladder: Vec<f64> = (4..=8).map(|k| 0.5f64.powi(k)).collect();
        let whole = minkowski_dims(&p, &ladder).unwrap().global;
        let bound = packing_dim_bound(std::slice::from_ref(&p), &ladder).unwrap();
        assert!((whole - bound).abs() < 1e-12);
        assert!(packing_dim_bound(&[], &ladder).is_err());
    }

    #[test]
    fn koch_self_similar_decomposition_no_improvement() {
        let k = gen_koch(std::f64::consts::FRAC_PI_3, 8).unwrap();
        // Split into the 4 self-similar quarters by vertex index.
        let quarter = 4usize.pow(7);
        let mut parts = Vec::new();
        for i in 0..4 {
            let idx: Vec<usize> = (i * quarter..=(i + 1) * quarter).collect();
            parts.push(k.subset(&idx, format!("koch quarter {i}")).unwrap());
        }
        let ladder: Vec<f64> = (2..=5).map(|q| 3.0f64.powi(-q)).collect();
        let bound = packing_dim_bound(&parts, &ladder).unwrap();
        let whole = minkowski_dims(&k, &ladder).unwrap().global;
        // Self-similar pieces look like the whole: no decomposition gain,
        // unlike the comb where the parts drop to slope 1.
        assert!(
            (bound - whole).abs() < 0.05 && bound > 1.15,
            "koch piece bound {bound} vs whole {whole}"
        );
    }

    #[test]
    fn packing_premeasure_examples() {
        // Single point: one ball.
        let single = PointCloud::new(vec![vec![0.0, 0.0]], 1e-4, "pt").unwrap();
        let v = packing_premeasure(&single, 1, 0.05).unwrap();
        assert!((v - 2.0 * 0.05).abs() < 1e-12);

        // Unit segment, j = 1: value -> 1 as eta shrinks.
        let pts: Vec<Vec<f64>> = (0..=4000).map(|k| vec![k as f64 / 4000.0, 0.0]).collect();
        let seg = PointCloud::new(pts, 1.0 / 4000.0, "seg").unwrap();
        let v = packing_premeasure(&seg, 1, 0.02).unwrap();
        assert!((v - 1.0).abs() < 0.05, "segment packing {v}");

        // Flat 2-patch radius 1, j = 2: disjoint equal balls top out at the
        // hexagonal density 0.9069 * area, so the greedy value lands between
        // square (pi/4) and hexagonal order.
        let patch = gen_plane_patch(2, 2, 1.0, 4e-3).unwrap();
        let v2 = packing_premeasure(&patch, 2, 0.04).unwrap();
        let pi = std::f64::consts::PI;
        assert!(
            v2 > 0.75 * pi && v2 < 0.92 * pi,
            "disc packing {v2} vs area {pi}"
        );
    }

    #[test]
    fn hausdorff_premeasure_examples() {
        let single = PointCloud::new(vec![vec![0.0, 0.0]], 1e-4, "pt").unwrap();
        let v = hausdorff_premeasure(&single, 1, 0.05).unwrap();
        assert!((v - 2.0 * 0.05).abs() < 1e-12);

        let pts: Vec<Vec<f64>> = (0..=4000).map(|k| vec![k as f64 / 4000.0, 0.0]).collect();
        let seg = PointCloud::new(pts, 1.0 / 4000.0, "seg").unwrap();
        let v = hausdorff_premeasure(&seg, 1, 0.02).unwrap();
        assert!((v - 1.0).abs() < 0.05, "segment cover {v}");

        // Lipschitz graph M=1: between 1 and sqrt(2) * (1 + tol), compared
        // against the sampled arc length.
        let g = gen_lipschitz_graph(1, 2, 1.0, 5, 5e-4).unwrap();
        let mut arc = 0.0;
        for k in 0..g.len() - 1 {
            arc += crate::geometry::euclid(g.point(k), g.point(k + 1));
        }
        let v = hausdorff_premeasure(&g, 1, 0.02).unwrap();
        assert!(
            v >= 1.0 - 0.05 && v <= 2.0f64.sqrt() * 1.05,
            "graph cover {v}"
        );
        assert!((v - arc).abs() < 0.08 * arc, "cover {v} vs arc {arc}");
    }

    #[test]
    fn measure_ordering_and_additivity() {
        let pts: Vec<Vec<f64>> = (0..=2000).map(|k| vec![k as f64 / 2000.0, 0.0]).collect();
        let seg = PointCloud::new(pts, 5e-4, "seg").unwrap();
        let rep = measure_compare(&seg, 1, 0.02).unwrap();
        assert!(rep.ratio >= 0.9, "ratio {}", rep.ratio);

        // Two disjoint unit segments: both pre-measures ~ 2.
        let mut pts2: Vec<Vec<f64>> = (0..=2000).map(|k| vec![k as f64 / 2000.0, 0.0]).collect();
        pts2.extend((0..=2000).map(|k| vec![k as f64 / 2000.0, 3.0]));
        let two = PointCloud::new(pts2, 5e-4, "two segs").unwrap();
        let rep2 = measure_compare(&two, 1, 0.02).unwrap();
        assert!(
            (rep2.hausdorff_pre - 2.0).abs() < 0.1,
            "H {}",
            rep2.hausdorff_pre
        );
        assert!(
            (rep2.packing_pre - 2.0).abs() < 0.1,
            "P {}",
            rep2.packing_pre
        );
        assert!((rep2.hausdorff_pre - 2.0 * rep.hausdorff_pre).abs() < 0.05 * 2.0);
    }

    #[test]
    fn slab_cover_examples() {
        // n=1: C stays <= 3 over the admissible range.
        for k in 3..=12 {
            let delta = 0.5f64.powi(k);
            let (_, c) = slab_covering_constant(1, 1, delta).unwrap();
            assert!(c <= 3.0, "n=1 C {c} at delta {delta}");
        }
        // n=2, j=1, delta=1/16: spec bound C <= 10.
        let (q, c) = slab_covering_constant(2, 1, 1.0 / 16.0).unwrap();
        assert!(q > 0 && c <= 10.0, "Q {q} C {c}");
        // Monotonicity: C(delta/2) <= 2 C(delta).
        for k in 3..=12 {
            let d = 0.5f64.powi(k);
            let (_, c1) = slab_covering_constant(2, 1, d).unwrap();
            let (_, c2) = slab_covering_constant(2, 1, d / 2.0).unwrap();
            assert!(c2 <= 2.0 * c1, "monotonicity at {d}: {c2} vs {c1}");
        }
        assert!(slab_covering_constant(2, 1, 0.2).is_err());
    }

    #[test]
    fn slab_cover_correctness_by_dense_sampling() {
        // Every densely sampled slab point must lie within 4 delta of a
        // cover center.
        for (n, j) in [(1usize, 1usize), (2, 1), (3, 1), (3, 2)] {
            let delta = 1.0 / 16.0;
            let centers = slab_cover_centers(n, j, delta).unwrap();
            let r2 = (4.0 * delta) * (4.0 * delta) * (1.0 + 1e-9);
            let mut rng = SplitMix64::new(99);
            let mut checked = 0;
            while checked < 4000 {
                // random point of L^{2delta} ∩ B_1
                let mut p = vec![0.0; n];
                for (axis, v) in p.iter_mut().enumerate() {
                    *v = if axis < j {
                        rng.uniform(-1.0, 1.0)
                    } else {
                        rng.uniform(-2.0 * delta, 2.0 * delta)
                    };
                }
                if p.iter().map(|x| x * x).sum::<f64>() > 1.0 {
                    continue;
                }
                checked += 1;
                let ok = centers.iter().any(|c| {
                    c.iter()
                        .zip(&p)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        <= r2
                });
                assert!(ok, "uncovered slab point {p:?} (n={n}, j={j})");
            }
        }
    }

    #[test]
    fn eta_examples() {
        // delta1 = 1/8, C = 8: eta = ln 16 / ln 2 = 4.
        let e = eta(0.125, 8.0, 2, 1).unwrap();
        assert!((e - 4.0).abs() < 1e-12, "eta {e}");
        // 4 delta1 = 1/(2C): eta = 1 exactly.
        let c = 3.0;
        let d = 1.0 / (8.0 * c);
        assert!((eta(d, c, 2, 1).unwrap() - 1.0).abs() < 1e-12);
        // Branch value.
        assert_eq!(eta(0.2, 100.0, 3, 1).unwrap(), 3.0);
        // C <= 1/2 rejected.
        assert!(eta(0.1, 0.5, 2, 1).is_err());
    }

    #[test]
    fn eta_monotone_and_vanishing_for_fixed_c() {
        // Any fixed admissible C works; 0.7 lets the values drop below 0.05
        // within the k <= 20 window.
        let c = 0.7;
        let mut prev = f64::INFINITY;
        let mut below = None;
        for k in 3..=20 {
            let d = 0.5f64.powi(k);
            let e = eta(d, c, 2, 1).unwrap();
            assert!(e > 0.0 && e < prev, "eta not decreasing at k={k}");
            prev = e;
            if below.is_none() && e < 0.05 {
                below = Some(k);
            }
        }
        assert!(below.is_some(), "eta never dropped below 0.05");
        // With the slab-cover constant itself (C ~ 2.83) the 0.05 crossing
        // happens around k = 53; pin the k = 20 value so the behavior is
        // documented.
        let (_, c_cov) = slab_covering_constant(2, 1, 0.5f64.powi(20)).unwrap();
        let e20 = eta(0.5f64.powi(20), c_cov, 2, 1).unwrap();
        assert!((e20 - 0.1389).abs() < 0.002, "eta(2^-20) = {e20}");
    }

    #[test]
    fn covering_recursion_on_flat_patch() {
        let p = gen_plane_patch(1, 2, 1.0, 1e-4).unwrap();
        let rep = covering_recursion_check(&p, 1, 1.0 / 16.0, 0.25, 4).unwrap();
        assert!(rep.decay_ok, "ratios {:?}", rep.decay_ratios);
        assert!(rep.levels.iter().all(|l| l.pass));
        // Scale floor truncation flagging.
        let rep2 = covering_recursion_check(&p, 1, 1.0 / 16.0, 0.25, 12).unwrap();
        assert!(rep2.truncated);
    }

    #[test]
    fn lipschitz_constant_values() {
        let (c, _) = lipschitz_constants(0.0, 1).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
        let (c1, big_c1) = lipschitz_constants(1.0, 1).unwrap();
        assert!((c1 - 2.0f64.sqrt()).abs() < 1e-12, "c {c1}");
        assert!((big_c1 - 2.0 * 2.0f64.sqrt()).abs() < 1e-12, "C {big_c1}");
        // M < 1 regularization keeps C >= 1.
        let (_, big_c_small) = lipschitz_constants(0.1, 1).unwrap();
        assert!(big_c_small >= 1.0);
    }

    #[test]
    fn disc_patch_slope_two() {
        let disc = gen_plane_patch(2, 2, 1.0, 1.5e-3).unwrap();
        let ladder: Vec<f64> = (3..=6).map(|k| 0.5f64.powi(k)).collect();
        let est = minkowski_dims(&disc, &ladder).unwrap();
        assert!((est.global - 2.0).abs() < 0.05, "disc slope {}", est.global);
    }

    #[test]
    fn graph_ball_bound_equality_case() {
        // M = 0: the graph is its own base plane and the measure of each
        // ball piece is exactly 2 rho, so the ratio sits at (or just above)
        // c(0,1) = 2.
        let g = gen_lipschitz_graph(1, 2, 0.0, 4, 2e-4).unwrap();
        let rep = graph_ball_lower_bound_check(&g, 0.0, 1, 40, 11, 0.05).unwrap();
        assert!(rep.pass, "min ratio {}", rep.min_ratio);
        assert!(
            (rep.min_ratio - 1.0).abs() < 0.1,
            "min ratio {}",
            rep.min_ratio
        );
    }

    #[test]
    fn variable_packing_smoke() {
        let pts: Vec<Vec<f64>> = (0..=1000).map(|k| vec![k as f64 / 1000.0, 0.0]).collect();
        let seg = PointCloud::new(pts, 1e-3, "seg").unwrap();
        let v = packing_premeasure_variable(&seg, 1, 0.05).unwrap();
        let fixed = packing_premeasure(&seg, 1, 0.05).unwrap();
        assert!(v >= fixed * 0.9 && v <= 1.5, "variable {v} fixed {fixed}");
    }
}
