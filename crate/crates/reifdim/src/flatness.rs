//! The twelve affine approximation predicates evaluated on a discrete scale
//! ladder.
//!
//! The approximating planes pass through the base point (the `G_y(n,j)`
//! family), weak conditions pick a fresh plane per scale, strong conditions
//! fix one direction per base point (shifted to neighbours for the locally
//! uniform variants, global for the rho0 variants). All verdicts are
//! "consistent at the tested scales" statements, never proofs: scales live on
//! a finite geometric ladder bounded below by 10x the sampling resolution.

use crate::geometry::fit::{
    anchored_minimax_local, max_dist_through_origin, pattern_search, Frame,
};
use crate::geometry::{euclid, AffinePlane, PointCloud, ScaleLadder, SAFETY_FACTOR};
use crate::input_error;
use crate::parallel::par_map_indexed;
use crate::Result;
use serde::{Deserialize, Serialize};

/// Angle grid for the strong-direction searches (n = 2, j = 1); includes the
/// axis directions exactly.
const DIRECTION_GRID: usize = 180;
/// Scan density for the per-scale weak fits.
const WEAK_SCAN: usize = 720;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sided {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strength {
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniformity {
    /// A scale threshold per base point ("∅").
    PerPoint,
    /// A shared threshold on a neighbourhood of each base point ("ρ").
    Local,
    /// One global threshold, the ladder maximum ("ρ0").
    Global,
}

/// One row of a flatness profile: the optimal deviation at a single scale and
/// the plane achieving it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub rho: f64,
    pub delta_star: f64,
    pub plane: AffinePlane,
}

/// Per-base-point, per-scale optimal deviations delta*(y, rho).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatnessProfile {
    pub base_index: usize,
    pub base_point: Vec<f64>,
    pub sided: Sided,
    pub entries: Vec<ProfileEntry>,
}

impl FlatnessProfile {
    pub fn max_delta(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, e| a.max(e.delta_star))
    }

    pub fn min_delta(&self) -> f64 {
        self.entries
            .iter()
            .fold(f64::INFINITY, |a, e| a.min(e.delta_star))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub base_index: usize,
    pub rho: f64,
    pub delta_star: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaOutcome {
    pub delta: f64,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyVerdict {
    /// Roman numeral of the definition clause, "i" through "xii".
    pub numeral: String,
    /// Compact key: w, w_rho, w_rho0, w_fine, w_rho_fine, w_rho0_fine, s, ...
    pub key: String,
    pub strength: Strength,
    pub uniformity: Uniformity,
    pub fine: bool,
    /// Outcome per tested delta (same order as the verdict's delta grid).
    pub outcomes: Vec<DeltaOutcome>,
    /// Fixed-delta properties: consistent at some tested delta. Fine
    /// properties: consistent at every tested delta.
    pub consistent: bool,
}

impl PropertyVerdict {
    pub fn outcome_at(&self, delta: f64) -> Option<&DeltaOutcome> {
        self.outcomes
            .iter()
            .find(|o| (o.delta - delta).abs() < 1e-12)
    }
}

/// Twelve-way verdict for one cloud, ladder, and delta grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReifenbergVerdict {
    pub j: usize,
    pub delta_grid: Vec<f64>,
    pub ladder: Vec<f64>,
    pub base_indices: Vec<usize>,
    /// Whether the cloud fits in a ball of radius ladder-max around the
    /// bounding-box center (the rho0 containment clause); recorded, not
    /// enforced.
    pub rho0_containment: bool,
    pub properties: Vec<PropertyVerdict>,
}

impl ReifenbergVerdict {
    pub fn property(&self, key: &str) -> &PropertyVerdict {
        self.properties
            .iter()
            .find(|p| p.key == key)
            .unwrap_or_else(|| panic!("unknown property key {key}"))
    }
}

/// Default delta grid: spans the small-delta regime the covering lemma cares
/// about (delta < 1/8) plus two coarser values.
pub fn default_delta_grid() -> Vec<f64> {
    vec![0.4, 0.2, 0.1, 0.05, 0.025]
}

// ---------------------------------------------------------------------------
// profile machinery
// ---------------------------------------------------------------------------

struct Neigh {
    /// Local coordinates (points minus the anchor), flat layout.
    local: Vec<f64>,
}

fn collect_neigh(cloud: &PointCloud, center: &[f64], rho: f64) -> Neigh {
    let r2 = rho * rho;
    let mut local = Vec::new();
    for p in cloud.iter_points() {
        let mut d2 = 0.0;
        for (a, b) in p.iter().zip(center) {
            d2 += (a - b) * (a - b);
        }
        if d2 <= r2 {
            for (a, b) in p.iter().zip(center) {
                local.push(a - b);
            }
        }
    }
    Neigh { local }
}

/// Best anchored one-sided deviation at one scale: minimax plane through the
/// anchor over the neighbourhood, normalized by rho.
fn weak_entry(neigh: &Neigh, dim: usize, j: usize, rho: f64, base: &[f64]) -> (f64, AffinePlane) {
    let (frame, value) = anchored_minimax_scan(&neigh.local, dim, j);
    let plane = AffinePlane::new(base.to_vec(), frame.basis).expect("orthonormal frame");
    ((value / rho).min(1.0), plane)
}

fn anchored_minimax_scan(local: &[f64], dim: usize, j: usize) -> (Frame, f64) {
    if dim == 2 && j == 1 {
        // Dense scan + golden polish; effectively global for lines.
        let value = |psi: f64| {
            let (c, s) = (psi.cos(), psi.sin());
            let mut worst = 0.0f64;
            for p in local.chunks_exact(2) {
                worst = worst.max((p[0] * c + p[1] * s).abs());
            }
            worst
        };
        let (psi, v) = crate::geometry::fit::scan_angle_min(WEAK_SCAN, value);
        let (s, c) = psi.sin_cos();
        (
            Frame {
                basis: vec![vec![-s, c]],
                normal: vec![vec![c, s]],
            },
            v,
        )
    } else {
        anchored_minimax_local(local, dim, j)
    }
}

/// delta*(y, rho) profile over the ladder. Two-sided mode scores planes by
/// the symmetric Hausdorff distance between the neighbourhood and the
/// discretized plane disc, normalized by rho.
pub fn flatness_profile(
    cloud: &PointCloud,
    base_index: usize,
    ladder: &ScaleLadder,
    j: usize,
    sided: Sided,
) -> Result<FlatnessProfile> {
    if base_index >= cloud.len() {
        return Err(input_error!("base index {base_index} out of range"));
    }
    if j > cloud.dim() {
        return Err(input_error!(
            "j = {j} exceeds ambient dimension {}",
            cloud.dim()
        ));
    }
    ladder.validate_for(cloud, SAFETY_FACTOR)?;
    let base = cloud.point(base_index).to_vec();
    let n = cloud.dim();
    let radii = ladder.radii();
    let entries: Vec<ProfileEntry> = par_map_indexed(radii.len(), 0, |k| {
        let rho = radii[k];
        let neigh = collect_neigh(cloud, &base, rho);
        match sided {
            Sided::One => {
                let (delta, plane) = weak_entry(&neigh, n, j, rho, &base);
                ProfileEntry {
                    rho,
                    delta_star: delta,
                    plane,
                }
            }
            Sided::Two => {
                let (delta, plane) = two_sided_entry(&neigh, cloud.resolution(), n, j, rho, &base);
                ProfileEntry {
                    rho,
                    delta_star: delta,
                    plane,
                }
            }
        }
    });
    Ok(FlatnessProfile {
        base_index,
        base_point: base,
        sided,
        entries,
    })
}

/// Two-sided deviation of one plane: d_H(A ∩ B, L ∩ B) / rho, where L ∩ B is
/// the j-disc of radius rho about the anchor, discretized at resolution h for
/// the plane-to-cloud direction and handled exactly in the cloud-to-disc
/// direction.
fn two_sided_value(local: &[f64], h: f64, dim: usize, j: usize, rho: f64, frame: &Frame) -> f64 {
    if local.is_empty() {
        return 0.0;
    }
    // Direction 1: cloud points to the plane disc (exact).
    let mut sup1 = 0.0f64;
    for p in local.chunks_exact(dim) {
        let mut norm2 = 0.0;
        for m in &frame.normal {
            let t: f64 = p.iter().zip(m).map(|(a, b)| a * b).sum();
            norm2 += t * t;
        }
        let mut tan2 = 0.0;
        for b in &frame.basis {
            let t: f64 = p.iter().zip(b).map(|(a, b)| a * b).sum();
            tan2 += t * t;
        }
        let tan = tan2.sqrt();
        let d2 = if tan <= rho {
            norm2
        } else {
            norm2 + (tan - rho) * (tan - rho)
        };
        sup1 = sup1.max(d2);
    }
    let sup1 = sup1.sqrt();

    // Direction 2: disc samples to the cloud (grid step h in the tangent
    // coordinates).
    let steps = ((2.0 * rho / h).ceil() as usize).clamp(1, 4001);
    let mut sup2 = 0.0f64;
    let mut tangent = vec![0usize; j];
    let axis: Vec<f64> = (0..=steps)
        .map(|k| -rho + 2.0 * rho * k as f64 / steps as f64)
        .collect();
    'outer: loop {
        let coords: Vec<f64> = tangent.iter().map(|&i| axis[i]).collect();
        let r2: f64 = coords.iter().map(|t| t * t).sum();
        if r2 <= rho * rho {
            // plane point in ambient local coordinates
            let mut q = vec![0.0; dim];
            for (t, b) in coords.iter().zip(&frame.basis) {
                for (qi, bi) in q.iter_mut().zip(b) {
                    *qi += t * bi;
                }
            }
            let mut best = f64::INFINITY;
            for p in local.chunks_exact(dim) {
                let d2: f64 = p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
                best = best.min(d2);
            }
            sup2 = sup2.max(best);
        }
        let mut k = 0;
        loop {
            if k == j {
                break 'outer;
            }
            tangent[k] += 1;
            if tangent[k] <= steps {
                break;
            }
            tangent[k] = 0;
            k += 1;
        }
    }
    sup1.max(sup2.sqrt()) / rho
}

fn two_sided_entry(
    neigh: &Neigh,
    h: f64,
    dim: usize,
    j: usize,
    rho: f64,
    base: &[f64],
) -> (f64, AffinePlane) {
    if dim == 2 && j == 1 {
        let value = |psi: f64| {
            let (s, c) = psi.sin_cos();
            let frame = Frame {
                basis: vec![vec![-s, c]],
                normal: vec![vec![c, s]],
            };
            two_sided_value(&neigh.local, h, dim, j, rho, &frame)
        };
        let (psi, v) = crate::geometry::fit::scan_angle_min(180, value);
        let (s, c) = psi.sin_cos();
        let plane = AffinePlane::new(base.to_vec(), vec![vec![-s, c]]).unwrap();
        (v.min(2.0), plane)
    } else {
        let seed = anchored_minimax_scan(&neigh.local, dim, j).0;
        let eval = |f: &Frame| two_sided_value(&neigh.local, h, dim, j, rho, f);
        let (frame, v) = pattern_search(seed, 0.4, 1e-6, eval);
        let plane = AffinePlane::new(base.to_vec(), frame.basis).unwrap();
        (v.min(2.0), plane)
    }
}

/// Strong flatness at one base point: the single anchored direction
/// minimizing the worst one-sided deviation across the whole ladder.
/// delta_strong always dominates the per-scale weak optimum.
pub fn strong_flatness(
    cloud: &PointCloud,
    base_index: usize,
    ladder: &ScaleLadder,
    j: usize,
) -> Result<(AffinePlane, f64)> {
    if base_index >= cloud.len() {
        return Err(input_error!("base index {base_index} out of range"));
    }
    if j > cloud.dim() {
        return Err(input_error!(
            "j = {j} exceeds ambient dimension {}",
            cloud.dim()
        ));
    }
    ladder.validate_for(cloud, SAFETY_FACTOR)?;
    let base = cloud.point(base_index).to_vec();
    let n = cloud.dim();
    let radii = ladder.radii();
    let neighs: Vec<Neigh> = radii
        .iter()
        .map(|&rho| collect_neigh(cloud, &base, rho))
        .collect();

    let aggregate = |frame: &Frame| -> f64 {
        let mut worst = 0.0f64;
        for (neigh, &rho) in neighs.iter().zip(&radii) {
            let d = max_dist_through_origin(&neigh.local, n, frame) / rho;
            worst = worst.max(d);
        }
        worst
    };

    let (frame, value) = if n == 2 && j == 1 {
        let value = |psi: f64| {
            let (s, c) = psi.sin_cos();
            let f = Frame {
                basis: vec![vec![-s, c]],
                normal: vec![vec![c, s]],
            };
            aggregate(&f)
        };
        let (psi, v) = crate::geometry::fit::scan_angle_min(WEAK_SCAN, value);
        let (s, c) = psi.sin_cos();
        (
            Frame {
                basis: vec![vec![-s, c]],
                normal: vec![vec![c, s]],
            },
            v,
        )
    } else {
        // Seed with the per-scale weak fits, keep the best after refinement.
        let mut best: Option<(Frame, f64)> = None;
        for neigh in &neighs {
            let seed = anchored_minimax_scan(&neigh.local, n, j).0;
            let (f, v) = pattern_search(seed, 0.4, 1e-7, &aggregate);
            if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                best = Some((f, v));
            }
        }
        best.unwrap()
    };
    let plane = AffinePlane::new(base, frame.basis)?;
    Ok((plane, value.min(1.0)))
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub threads: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { threads: 0 }
    }
}

/// Evaluates the twelve predicates on `base_sample` over the ladder and delta
/// grid. One-sided deviations throughout (the definitions are one-sided; use
/// [`flatness_profile`] with [`Sided::Two`] for the two-sided diagnostic).
/// The locally uniform clauses quantify neighbours over the base sample; the
/// fine clauses restrict the scale tail to the two finest rungs except for
/// the global variant, which keeps the whole ladder.
pub fn classify(
    cloud: &PointCloud,
    j: usize,
    delta_grid: &[f64],
    ladder: &ScaleLadder,
    base_sample: &[usize],
) -> Result<ReifenbergVerdict> {
    classify_with(
        cloud,
        j,
        delta_grid,
        ladder,
        base_sample,
        &ClassifyOptions::default(),
    )
}

pub fn classify_with(
    cloud: &PointCloud,
    j: usize,
    delta_grid: &[f64],
    ladder: &ScaleLadder,
    base_sample: &[usize],
    opts: &ClassifyOptions,
) -> Result<ReifenbergVerdict> {
    if base_sample.is_empty() {
        return Err(input_error!("classify needs a nonempty base sample"));
    }
    if j > cloud.dim() {
        return Err(input_error!(
            "j = {j} exceeds ambient dimension {}",
            cloud.dim()
        ));
    }
    for &i in base_sample {
        if i >= cloud.len() {
            return Err(input_error!("base index {i} out of range"));
        }
    }
    let mut grid = delta_grid.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
    grid.dedup();
    if grid.is_empty() || grid.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(input_error!("delta grid values must lie in (0, 1)"));
    }
    ladder.validate_for(cloud, SAFETY_FACTOR)?;

    let n = cloud.dim();
    let radii = ladder.radii();
    let nb = base_sample.len();
    let nk = radii.len();
    let bases: Vec<Vec<f64>> = base_sample
        .iter()
        .map(|&i| cloud.point(i).to_vec())
        .collect();

    // Neighbourhoods and weak profile, parallel over (base, scale) pairs.
    let pairs: Vec<(Neigh, f64, AffinePlane)> = par_map_indexed(nb * nk, opts.threads, |idx| {
        let (b, k) = (idx / nk, idx % nk);
        let rho = radii[k];
        let neigh = collect_neigh(cloud, &bases[b], rho);
        let (delta, plane) = weak_entry(&neigh, n, j, rho, &bases[b]);
        (neigh, delta, plane)
    });
    let mut neighs: Vec<Vec<Neigh>> = Vec::with_capacity(nb);
    let mut weak: Vec<Vec<f64>> = vec![vec![0.0; nk]; nb];
    {
        let mut it = pairs.into_iter();
        for b in 0..nb {
            let mut row = Vec::with_capacity(nk);
            for k in 0..nk {
                let (neigh, delta, _plane) = it.next().unwrap();
                weak[b][k] = delta;
                row.push(neigh);
            }
            neighs.push(row);
        }
    }

    // Direction table: deviation of the shifted plane dir(psi) + base[b] on
    // B_rho_k(base[b]), per candidate direction.
    let dirs = direction_candidates(n, j, &neighs);
    let nd = dirs.len();
    let table: Vec<Vec<f64>> = par_map_indexed(nb * nk, opts.threads, |idx| {
        let (b, k) = (idx / nk, idx % nk);
        let rho = radii[k];
        let local = &neighs[b][k].local;
        dirs.iter()
            .map(|f| (max_dist_through_origin(local, n, f) / rho).min(1.0))
            .collect()
    });
    let dev = |b: usize, k: usize, d: usize| table[b * nk + k][d];

    // Structural tightening: the weak optimum never exceeds any candidate
    // direction's deviation, which keeps strong -> weak monotone by
    // construction.
    for b in 0..nb {
        for k in 0..nk {
            let grid_best = (0..nd).fold(f64::INFINITY, |a, d| a.min(dev(b, k, d)));
            weak[b][k] = weak[b][k].min(grid_best);
        }
    }

    // Strong per-point suffix values: sT[b][c] = best single direction for
    // scales >= c at base b.
    let mut s_tail = vec![vec![f64::INFINITY; nk]; nb];
    for b in 0..nb {
        for c in 0..nk {
            let mut best = f64::INFINITY;
            for d in 0..nd {
                let mut worst = 0.0f64;
                for k in c..nk {
                    worst = worst.max(dev(b, k, d));
                }
                best = best.min(worst);
            }
            s_tail[b][c] = best;
        }
        // A single-scale tail is the same search as the weak fit there.
        s_tail[b][nk - 1] = s_tail[b][nk - 1].min(weak[b][nk - 1]);
    }

    // Neighbour sets: which base points fall in B_rho_c(base[b]).
    let in_ball: Vec<Vec<Vec<usize>>> = (0..nb)
        .map(|b| {
            radii
                .iter()
                .map(|&rho| {
                    (0..nb)
                        .filter(|&x| euclid(&bases[b], &bases[x]) <= rho)
                        .collect()
                })
                .collect()
        })
        .collect();

    // Strong rho: sR[b][c] = best single direction covering all (x, k>=c)
    // with x in B_rho_c(b).
    let mut s_rho = vec![vec![f64::INFINITY; nk]; nb];
    for b in 0..nb {
        for c in 0..nk {
            let mut best = f64::INFINITY;
            for d in 0..nd {
                let mut worst = 0.0f64;
                for &x in &in_ball[b][c] {
                    for k in c..nk {
                        worst = worst.max(dev(x, k, d));
                    }
                }
                best = best.min(worst);
            }
            s_rho[b][c] = best;
        }
    }

    // Strong rho0: one global direction for every (x, k).
    let (s_global, s_global_dir) = {
        let mut best = f64::INFINITY;
        let mut best_d = 0;
        for d in 0..nd {
            let mut worst = 0.0f64;
            for b in 0..nb {
                for k in 0..nk {
                    worst = worst.max(dev(b, k, d));
                }
            }
            if worst < best {
                best = worst;
                best_d = d;
            }
        }
        (best, best_d)
    };

    // Containment flag for the rho0 clause.
    let rho0_containment = {
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in cloud.iter_points() {
            for (k, &x) in p.iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let max_d = cloud
            .iter_points()
            .map(|p| euclid(p, &center))
            .fold(0.0f64, f64::max);
        max_d <= ladder.rho_max
    };

    // Fine tail: the two finest scales (or one, for a one-rung ladder).
    let fine_from = nk.saturating_sub(2);

    let weak_witness = |b: usize, k: usize| Witness {
        base_index: base_sample[b],
        rho: radii[k],
        delta_star: weak[b][k],
    };

    // Per-delta evaluation of each clause; returns (consistent, witness).
    let eval_clause = |strength: Strength,
                       uniformity: Uniformity,
                       fine: bool,
                       delta: f64|
     -> (bool, Option<Witness>) {
        match (strength, uniformity) {
            (Strength::Weak, Uniformity::PerPoint) => {
                // Per base point: some ladder tail passes entirely. With a
                // fine clause the tail must cover the two finest scales.
                for b in 0..nb {
                    let ok = if fine {
                        (fine_from..nk).all(|k| weak[b][k] <= delta)
                    } else {
                        weak[b][nk - 1] <= delta
                    };
                    if !ok {
                        let k = if fine {
                            (fine_from..nk)
                                .find(|&k| weak[b][k] > delta)
                                .unwrap_or(nk - 1)
                        } else {
                            nk - 1
                        };
                        return (false, Some(weak_witness(b, k)));
                    }
                }
                (true, None)
            }
            (Strength::Weak, Uniformity::Local) => {
                // Per base point: some cap rho_c such that every sampled
                // neighbour inside B_rho_c passes at all scales <= rho_c.
                // Fine clauses pin the cap at the two-finest-scale tail.
                for b in 0..nb {
                    let passes_at = |c: usize| {
                        in_ball[b][c]
                            .iter()
                            .all(|&x| (c..nk).all(|k| weak[x][k] <= delta))
                    };
                    let ok = if fine {
                        passes_at(fine_from)
                    } else {
                        (0..nk).any(passes_at)
                    };
                    if !ok {
                        // witness: the failing pair at the most generous cap
                        let c = nk - 1;
                        let x = in_ball[b][c]
                            .iter()
                            .copied()
                            .find(|&x| (c..nk).any(|k| weak[x][k] > delta))
                            .unwrap_or(b);
                        let k = (c..nk).find(|&k| weak[x][k] > delta).unwrap_or(nk - 1);
                        return (false, Some(weak_witness(x, k)));
                    }
                }
                (true, None)
            }
            (Strength::Weak, Uniformity::Global) => {
                // Every base point, every scale of the full ladder.
                for b in 0..nb {
                    for k in 0..nk {
                        if weak[b][k] > delta {
                            return (false, Some(weak_witness(b, k)));
                        }
                    }
                }
                (true, None)
            }
            (Strength::Strong, Uniformity::PerPoint) => {
                for b in 0..nb {
                    let ok = if fine {
                        s_tail[b][fine_from] <= delta
                    } else {
                        (0..nk).any(|c| s_tail[b][c] <= delta)
                    };
                    if !ok {
                        let c = nk - 1;
                        return (
                            false,
                            Some(Witness {
                                base_index: base_sample[b],
                                rho: radii[c],
                                delta_star: s_tail[b][c],
                            }),
                        );
                    }
                }
                (true, None)
            }
            (Strength::Strong, Uniformity::Local) => {
                for b in 0..nb {
                    let ok = if fine {
                        s_rho[b][fine_from] <= delta
                    } else {
                        (0..nk).any(|c| s_rho[b][c] <= delta)
                    };
                    if !ok {
                        let c = nk - 1;
                        return (
                            false,
                            Some(Witness {
                                base_index: base_sample[b],
                                rho: radii[c],
                                delta_star: s_rho[b][c],
                            }),
                        );
                    }
                }
                (true, None)
            }
            (Strength::Strong, Uniformity::Global) => {
                if s_global <= delta {
                    (true, None)
                } else {
                    // witness: the worst (x, k) under the best global
                    // direction
                    let mut worst = (0usize, 0usize, 0.0f64);
                    for b in 0..nb {
                        for k in 0..nk {
                            let v = dev(b, k, s_global_dir);
                            if v > worst.2 {
                                worst = (b, k, v);
                            }
                        }
                    }
                    (
                        false,
                        Some(Witness {
                            base_index: base_sample[worst.0],
                            rho: radii[worst.1],
                            delta_star: worst.2,
                        }),
                    )
                }
            }
        }
    };

    let clauses: [(&str, &str, Strength, Uniformity, bool); 12] = [
        ("i", "w", Strength::Weak, Uniformity::PerPoint, false),
        ("ii", "w_rho", Strength::Weak, Uniformity::Local, false),
        ("iii", "w_rho0", Strength::Weak, Uniformity::Global, false),
        ("iv", "w_fine", Strength::Weak, Uniformity::PerPoint, true),
        ("v", "w_rho_fine", Strength::Weak, Uniformity::Local, true),
        (
            "vi",
            "w_rho0_fine",
            Strength::Weak,
            Uniformity::Global,
            true,
        ),
        ("vii", "s", Strength::Strong, Uniformity::PerPoint, false),
        ("viii", "s_rho", Strength::Strong, Uniformity::Local, false),
        ("ix", "s_rho0", Strength::Strong, Uniformity::Global, false),
        ("x", "s_fine", Strength::Strong, Uniformity::PerPoint, true),
        (
            "xi",
            "s_rho_fine",
            Strength::Strong,
            Uniformity::Local,
            true,
        ),
        (
            "xii",
            "s_rho0_fine",
            Strength::Strong,
            Uniformity::Global,
            true,
        ),
    ];

    let properties: Vec<PropertyVerdict> = clauses
        .iter()
        .map(|&(numeral, key, strength, uniformity, fine)| {
            let outcomes: Vec<DeltaOutcome> = grid
                .iter()
                .map(|&delta| {
                    let (consistent, witness) = eval_clause(strength, uniformity, fine, delta);
                    DeltaOutcome {
                        delta,
                        consistent,
                        witness,
                    }
                })
                .collect();
            let consistent = if fine {
                outcomes.iter().all(|o| o.consistent)
            } else {
                outcomes.iter().any(|o| o.consistent)
            };
            PropertyVerdict {
                numeral: numeral.to_string(),
                key: key.to_string(),
                strength,
                uniformity,
                fine,
                outcomes,
                consistent,
            }
        })
        .collect();

    Ok(ReifenbergVerdict {
        j,
        delta_grid: grid,
        ladder: radii,
        base_indices: base_sample.to_vec(),
        rho0_containment,
        properties,
    })
}

/// Candidate direction set for the strong searches. For lines in the plane
/// this is a uniform angle grid containing the axes; otherwise the axis
/// frame plus the weak fit of every neighbourhood.
fn direction_candidates(n: usize, j: usize, neighs: &[Vec<Neigh>]) -> Vec<Frame> {
    if n == 2 && j == 1 {
        return (0..DIRECTION_GRID)
            .map(|k| {
                let psi = k as f64 * std::f64::consts::PI / DIRECTION_GRID as f64;
                let (s, c) = psi.sin_cos();
                Frame {
                    basis: vec![vec![-s, c]],
                    normal: vec![vec![c, s]],
                }
            })
            .collect();
    }
    let mut dirs: Vec<Frame> = Vec::new();
    // axis frame
    let mut id = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        id.push(v);
    }
    dirs.push(Frame {
        basis: id[..j].to_vec(),
        normal: id[j..].to_vec(),
    });
    for row in neighs {
        for neigh in row {
            if !neigh.local.is_empty() {
                dirs.push(anchored_minimax_scan(&neigh.local, n, j).0);
            }
        }
    }
    dirs
}

// ---------------------------------------------------------------------------
// lattice checks
// ---------------------------------------------------------------------------

/// Verifies the inclusion-lattice implications inside one verdict:
/// strong => weak, rho0 => rho => per-point, delta-monotone outcomes, and
/// fine => fixed. Returns human-readable violations (empty = consistent).
pub fn lattice_check(v: &ReifenbergVerdict) -> Vec<String> {
    let mut out = Vec::new();
    let at = |key: &str, delta: f64| -> bool {
        v.property(key)
            .outcome_at(delta)
            .map(|o| o.consistent)
            .unwrap_or(false)
    };
    let implications: [(&str, &str); 12] = [
        // strong => weak
        ("s", "w"),
        ("s_rho", "w_rho"),
        ("s_rho0", "w_rho0"),
        ("s_fine", "w_fine"),
        ("s_rho_fine", "w_rho_fine"),
        ("s_rho0_fine", "w_rho0_fine"),
        // rho0 => rho => per-point
        ("w_rho0", "w_rho"),
        ("w_rho", "w"),
        ("s_rho0", "s_rho"),
        ("s_rho", "s"),
        ("w_rho0_fine", "w_rho_fine"),
        ("s_rho0_fine", "s_rho_fine"),
    ];
    for &delta in &v.delta_grid {
        for &(stronger, weaker) in &implications {
            if at(stronger, delta) && !at(weaker, delta) {
                out.push(format!(
                    "{stronger}@{delta} consistent but {weaker}@{delta} violated"
                ));
            }
        }
        // rho => per-point for the remaining fine pair
        for &(a, b) in &[("w_rho_fine", "w_fine"), ("s_rho_fine", "s_fine")] {
            if at(a, delta) && !at(b, delta) {
                out.push(format!("{a}@{delta} consistent but {b}@{delta} violated"));
            }
        }
        // fine => fixed at the same delta
        for &(fine, fixed) in &[
            ("w_fine", "w"),
            ("w_rho_fine", "w_rho"),
            ("w_rho0_fine", "w_rho0"),
            ("s_fine", "s"),
            ("s_rho_fine", "s_rho"),
            ("s_rho0_fine", "s_rho0"),
        ] {
            let fine_prop = v.property(fine);
            if fine_prop.consistent && !at(fixed, delta) {
                out.push(format!("{fine} consistent but {fixed}@{delta} violated"));
            }
        }
    }
    // delta-monotonicity along the (descending) grid
    for p in &v.properties {
        for w in p.outcomes.windows(2) {
            if w[1].consistent && !w[0].consistent {
                out.push(format!(
                    "{}: consistent at delta={} but violated at larger delta={}",
                    p.key, w[1].delta, w[0].delta
                ));
            }
        }
    }
    out
}

/// Dimension monotonicity between two verdicts of the same run at j and j+1.
pub fn lattice_check_j_pair(vj: &ReifenbergVerdict, vj1: &ReifenbergVerdict) -> Vec<String> {
    let mut out = Vec::new();
    if vj1.j != vj.j + 1 {
        out.push(format!("expected j+1 = {}, got {}", vj.j + 1, vj1.j));
        return out;
    }
    for p in &vj.properties {
        let q = vj1.property(&p.key);
        for (a, b) in p.outcomes.iter().zip(&q.outcomes) {
            if a.consistent && !b.consistent {
                out.push(format!(
                    "{}@{}: consistent for j={} but violated for j={}",
                    p.key, a.delta, vj.j, vj1.j
                ));
            }
        }
    }
    out
}
