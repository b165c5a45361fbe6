//! Instance generators and independent oracles shared by the integration
//! tests. Nothing here calls into the solvers under test.
#![allow(dead_code)]

use cwot_core::DiscreteMeasure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point uniform in the unit ball by rejection from the cube.
pub fn ball_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return x;
        }
    }
}

/// `n` atoms in the unit ball with random positive weights.
pub fn random_measure(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> DiscreteMeasure {
    let points: Vec<f64> = (0..n).flat_map(|_| ball_point(rng, dim)).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    DiscreteMeasure::new(dim, points, weights).unwrap()
}

/// `n` uniformly weighted atoms in the unit ball.
pub fn random_uniform(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> DiscreteMeasure {
    let points: Vec<f64> = (0..n).flat_map(|_| ball_point(rng, dim)).collect();
    DiscreteMeasure::uniform(dim, points).unwrap()
}

/// A random measure with atoms on a coarse grid, so that ties between
/// projections and between supports are common.
pub fn random_lattice_measure(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> DiscreteMeasure {
    let points: Vec<f64> = (0..n * dim)
        .map(|_| rng.random_range(-2i32..=2) as f64 * 0.25)
        .collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(1u32..=4) as f64).collect();
    DiscreteMeasure::new(dim, points, weights).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimum over all `n!` matchings of the mean distance (Heap's algorithm).
pub fn brute_force_matching(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> f64 {
    let n = xs.len();
    assert_eq!(n, ys.len());
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| dist(&xs[i], &ys[j])).sum::<f64>();
    let mut best = cost(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best / n as f64
}

/// Dense tableau simplex with Bland's rule for
/// `max cᵀx  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0` (the origin is feasible).
pub fn dense_lp_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    let (rows, cols) = (a.len(), c.len());
    let width = cols + rows + 1;
    let mut t = vec![vec![0.0; width]; rows + 1];
    for i in 0..rows {
        assert!(b[i] >= 0.0);
        t[i][..cols].copy_from_slice(&a[i]);
        t[i][cols + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..cols {
        t[rows][j] = -c[j];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let eps = 1e-12;
    loop {
        let Some(enter) = (0..width - 1).find(|&j| t[rows][j] < -eps) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for i in 0..rows {
            if t[i][enter] > eps {
                let ratio = t[i][width - 1] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-14
                            || (ratio <= best + 1e-14 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let r = leave.expect("LP is bounded");
        let p = t[r][enter];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        for i in 0..=rows {
            if i != r {
                let f = t[i][enter];
                if f != 0.0 {
                    for j in 0..width {
                        t[i][j] -= f * t[r][j];
                    }
                }
            }
        }
        basis[r] = enter;
    }
    t[rows][width - 1]
}

/// The truncated dual LP written out directly: free values `u_z` on the
/// union support with pairwise Lipschitz bounds and `|u_z| ≤ (r - |z|)^+`,
/// maximizing `Σ u_z (μ - ν)(z)`. With `anchor`, an extra point at the
/// origin is forced to `u = 0`.
pub fn truncated_dual_lp(mu: &DiscreteMeasure, nu: &DiscreteMeasure, r: f64, anchor: bool) -> f64 {
    let dim = mu.dim();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut delta: Vec<f64> = Vec::new();
    let add = |x: &[f64], w: f64, pts: &mut Vec<Vec<f64>>, delta: &mut Vec<f64>| {
        for (k, p) in pts.iter().enumerate() {
            if dist(p, x) <= 1e-12 {
                delta[k] += w;
                return;
            }
        }
        pts.push(x.to_vec());
        delta.push(w);
    };
    for (x, w) in mu.atoms() {
        add(x, w, &mut pts, &mut delta);
    }
    for (x, w) in nu.atoms() {
        add(x, -w, &mut pts, &mut delta);
    }
    if anchor {
        add(&vec![0.0; dim], 0.0, &mut pts, &mut delta);
    }
    let n = pts.len();
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    // x = (u⁺, u⁻), u = u⁺ - u⁻.
    let mut a = Vec::new();
    let mut b = Vec::new();
    let row = |pairs: &[(usize, f64)]| {
        let mut r = vec![0.0; 2 * n];
        for &(k, s) in pairs {
            r[k] += s;
            r[n + k] -= s;
        }
        r
    };
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a.push(row(&[(i, 1.0), (j, -1.0)]));
                b.push(dist(&pts[i], &pts[j]));
            }
        }
        let cap = if anchor && norm(&pts[i]) == 0.0 {
            0.0
        } else {
            (r - norm(&pts[i])).max(0.0)
        };
        a.push(row(&[(i, 1.0)]));
        b.push(cap);
        a.push(row(&[(i, -1.0)]));
        b.push(cap);
    }
    let mut c = vec![0.0; 2 * n];
    for k in 0..n {
        c[k] = delta[k];
        c[n + k] = -delta[k];
    }
    dense_lp_max(&a, &b, &c)
}
