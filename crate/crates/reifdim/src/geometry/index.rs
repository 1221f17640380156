//! Uniform hash-grid spatial index for radius queries.
//!
//! Cell keys are hashed; collisions only add candidates, which the exact
//! distance filter removes, so lookups stay correct. Queries whose cell range
//! would exceed the point count fall back to a linear scan.

use super::{dist2, PointCloud};
use std::collections::HashMap;

pub struct GridIndex {
    cell: f64,
    buckets: HashMap<u64, Vec<u32>>,
    dim: usize,
}

fn mix(mut h: u64, v: i64) -> u64 {
    h ^= v as u64;
    h = h.wrapping_mul(0x100_0000_01b3);
    h ^= h >> 29;
    h
}

fn key(coords: &[f64], cell: f64) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &x in coords {
        h = mix(h, (x / cell).floor() as i64);
    }
    h
}

impl GridIndex {
    pub fn build(cloud: &PointCloud, cell: f64) -> Self {
        assert!(cell > 0.0);
        let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
        for (i, p) in cloud.iter_points().enumerate() {
            buckets.entry(key(p, cell)).or_default().push(i as u32);
        }
        Self {
            cell,
            buckets,
            dim: cloud.dim(),
        }
    }

    /// Indices of all points within the closed ball, ascending.
    pub fn in_ball(&self, cloud: &PointCloud, center: &[f64], radius: f64) -> Vec<usize> {
        let n = self.dim;
        let lo: Vec<i64> = center
            .iter()
            .map(|&c| ((c - radius) / self.cell).floor() as i64)
            .collect();
        let hi: Vec<i64> = center
            .iter()
            .map(|&c| ((c + radius) / self.cell).floor() as i64)
            .collect();
        let mut cells = 1f64;
        for (a, b) in lo.iter().zip(&hi) {
            cells *= (b - a + 1) as f64;
            if cells > cloud.len() as f64 {
                break;
            }
        }
        let r2 = radius * radius;
        let mut out = Vec::new();
        if cells > cloud.len() as f64 {
            for (i, p) in cloud.iter_points().enumerate() {
                if dist2(p, center) <= r2 {
                    out.push(i);
                }
            }
            return out;
        }
        // odometer over the cell box
        let mut idx = lo.clone();
        loop {
            let mut h = 0xcbf2_9ce4_8422_2325u64;
            for &v in &idx {
                h = mix(h, v);
            }
            if let Some(bucket) = self.buckets.get(&h) {
                for &i in bucket {
                    let p = cloud.point(i as usize);
                    if dist2(p, center) <= r2 {
                        out.push(i as usize);
                    }
                }
            }
            // advance odometer
            let mut k = 0;
            loop {
                if k == n {
                    out.sort_unstable();
                    out.dedup();
                    return out;
                }
                idx[k] += 1;
                if idx[k] <= hi[k] {
                    break;
                }
                idx[k] = lo[k];
                k += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_linear_scan() {
        let mut pts = Vec::new();
        let mut state = 7u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            pts.push(vec![next() * 10.0, next() * 10.0]);
        }
        let cloud = PointCloud::new(pts, 0.01, "rand").unwrap();
        let index = GridIndex::build(&cloud, 0.5);
        for (center, radius) in [([2.0, 3.0], 1.0), ([5.0, 5.0], 0.3), ([0.0, 0.0], 4.0)] {
            let got = index.in_ball(&cloud, &center, radius);
            let want: Vec<usize> = cloud
                .iter_points()
                .enumerate()
                .filter(|(_, p)| dist2(p, &center) <= radius * radius)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(got, want);
        }
    }
}
