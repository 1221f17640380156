//! Symmetric eigendecomposition for the small moment matrices used by the
//! plane fitters.
//!
//! Cyclic Jacobi is plenty for n ≤ 8 and, unlike a library solver, lets us pin
//! down the deterministic tie-break the fitters need: eigenvalues sorted
//! descending, eigenvectors sign-fixed (first significant component positive),
//! and degenerate eigenspaces re-based against the standard basis so that tied
//! spectra always produce the lexicographically smallest representation.

const TIE_REL_TOL: f64 = 1e-10;
const SIGNIFICANT: f64 = 1e-12;

/// Returns `(eigenvalues, eigenvectors)` of a symmetric matrix (row-major,
/// `n * n`), eigenvalues descending, eigenvectors as rows of unit vectors.
pub fn eigen_symmetric(mat: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    // v starts as identity; accumulates the rotations (rows are eigenvectors).
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = mat
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // tan(2φ) = 2 a_pq / (a_pp - a_qq)
                let phi = 0.5 * (2.0 * apq).atan2(app - aqq);
                let (s, c) = phi.sin_cos();
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp + s * akq;
                    a[k * n + q] = -s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk + s * aqk;
                    a[q * n + k] = -s * apk + c * aqk;
                }
                for k in 0..n {
                    let vpk = v[p * n + k];
                    let vqk = v[q * n + k];
                    v[p * n + k] = c * vpk + s * vqk;
                    v[q * n + k] = -s * vpk + c * vqk;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| (a[i * n + i], v[i * n..(i + 1) * n].to_vec()))
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

    canonicalize_ties(&mut pairs, scale);
    for (_, vec) in pairs.iter_mut() {
        fix_sign(vec);
    }
    let (vals, vecs): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();
    (vals, vecs)
}

/// Rebuilds each tied eigenspace from projections of the standard basis so
/// the choice of basis inside the eigenspace is reproducible and
/// lexicographically minimal.
fn canonicalize_ties(pairs: &mut [(f64, Vec<f64>)], scale: f64) {
    let n = pairs.len();
    let tie = TIE_REL_TOL * scale.max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[start].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            let dim = pairs[0].1.len();
            let space: Vec<Vec<f64>> = pairs[start..end].iter().map(|p| p.1.clone()).collect();
            let mut rebuilt: Vec<Vec<f64>> = Vec::with_capacity(end - start);
            for axis in 0..dim {
                if rebuilt.len() == end - start {
                    break;
                }
                // Project e_axis onto the eigenspace, then orthogonalize
                // against what we already kept.
                let mut w = vec![0.0; dim];
                for b in &space {
                    let coef = b[axis];
                    for (wi, bi) in w.iter_mut().zip(b.iter()) {
                        *wi += coef * bi;
                    }
                }
                for r in &rebuilt {
                    let coef: f64 = w.iter().zip(r.iter()).map(|(a, b)| a * b).sum();
                    for (wi, ri) in w.iter_mut().zip(r.iter()) {
                        *wi -= coef * ri;
                    }
                }
                let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-9 {
                    for wi in w.iter_mut() {
                        *wi /= norm;
                    }
                    fix_sign(&mut w);
                    rebuilt.push(w);
                }
            }
            if rebuilt.len() == end - start {
                rebuilt.sort_by(|a, b| lex_cmp(a, b));
                for (slot, w) in pairs[start..end].iter_mut().zip(rebuilt) {
                    slot.1 = w;
                }
            }
        }
        start = end;
    }
}

fn fix_sign(v: &mut [f64]) {
    for &x in v.iter() {
        if x.abs() > SIGNIFICANT {
            if x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}
