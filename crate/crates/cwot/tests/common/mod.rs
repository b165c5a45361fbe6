//! Deterministic instance generators and a brute-force matching oracle.
#![allow(dead_code)]

use cwot_core::seeding::{mix64, splitmix64};
use cwot_core::{DiscreteMeasure, DistributionSpec, Family};

/// Counter-based uniform floats in `[0, 1)`.
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { state: mix64(seed, 0x5eed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        splitmix64(self.state)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn ball_point(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..dim).map(|_| self.range(-1.0, 1.0)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                return x;
            }
        }
    }
}

pub fn families(dim: usize, s: &mut Stream) -> Vec<Family> {
    vec![
        Family::UniformBall,
        Family::UniformSphere,
        Family::TwoPointMixture { a: s.ball_point(dim), b: s.ball_point(dim), weight_a: s.uniform() },
        Family::ProductUniformRescaled,
        Family::TruncatedGaussianRescaled { sigma: s.range(0.2, 1.5) },
    ]
}

/// A measure in the unit ball: a sample from a randomly chosen family with
/// 1 to `max_atoms` atoms, reweighted with random weights half of the time.
pub fn random_b1_measure(s: &mut Stream, dim: usize, max_atoms: usize) -> DiscreteMeasure {
    let fams = families(dim, s);
    let family = fams[s.index(fams.len())].clone();
    let n = 1 + s.index(max_atoms);
    let spec = DistributionSpec::new(family, dim, s.next_u64()).unwrap();
    let points = spec.sample_points(n);
    if s.uniform() < 0.5 {
        DiscreteMeasure::uniform(dim, points).unwrap()
    } else {
        let weights: Vec<f64> = (0..n).map(|_| s.range(0.01, 1.0)).collect();
        DiscreteMeasure::new(dim, points, weights).unwrap()
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimum over all matchings of the mean distance, by Heap's algorithm.
pub fn brute_force_matching(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> f64 {
    let n = xs.len();
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
