//! Max-sliced W1: `M = sup_{|θ|=1} W(μ_θ, ν_θ)`.
//!
//! The objective is continuous but neither concave nor convex, so it is
//! maximized by restarted ascent on the sphere. Each step moves along the
//! tangent part of a supergradient of the fixed-coupling cost
//! `θ ↦ Σ π_ij |⟨x_i - y_j, θ⟩|`, with a step length that halves on rejection.
//! Every reported value is an exact 1D evaluation at the reported direction,
//! so the result is always a lower bound on `M`.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::measures::{dot, norm};
use crate::ot1d::{north_west_corner, w1_sorted};
use crate::seeding::rng_for;
use crate::{DiscreteMeasure, Direction, Error, Result};

/// A function `θ ↦ W(μ_θ, ν_θ)` on the unit sphere of `ℝ^d`.
pub trait SlicedObjective {
    fn dim(&self) -> usize;

    fn value(&self, theta: &Direction) -> f64;

    /// The value together with an ascent direction in `ℝ^d`.
    fn value_and_supergradient(&self, theta: &Direction) -> (f64, Vec<f64>);

    /// Problem-specific starting directions, tried before random ones.
    fn warm_starts(&self, _count: usize) -> Vec<Direction> {
        Vec::new()
    }

    /// Normals `z_a - z_b` of the hyperplanes `⟨z_a - z_b, θ⟩ = 0` on which
    /// two support points project within `tol` (relative to the spread of
    /// the projections) of each other at `θ`, nearest first. The objective has its kinks there.
    fn near_ties(&self, _theta: &Direction, _tol: f64) -> Vec<Vec<f64>> {
        Vec::new()
    }
}

/// The sliced objective of two discrete measures.
#[derive(Debug, Clone, Copy)]
pub struct MeasurePair<'a> {
    mu: &'a DiscreteMeasure,
    nu: &'a DiscreteMeasure,
}

impl<'a> MeasurePair<'a> {
    pub fn new(mu: &'a DiscreteMeasure, nu: &'a DiscreteMeasure) -> Result<Self> {
        mu.check_dim(nu.dim())?;
        Ok(MeasurePair { mu, nu })
    }
}

impl SlicedObjective for MeasurePair<'_> {
    fn dim(&self) -> usize {
        self.mu.dim()
    }

    fn value(&self, theta: &Direction) -> f64 {
        let (s, ws) = sorted_projection(self.mu, theta);
        let (t, wt) = sorted_projection(self.nu, theta);
        w1_sorted(&s, &ws, &t, &wt)
    }

    fn value_and_supergradient(&self, theta: &Direction) -> (f64, Vec<f64>) {
        let a = Groups::new(self.mu, theta);
        let b = Groups::new(self.nu, theta);
        let value = w1_sorted(&a.values, &a.weights, &b.values, &b.weights);
        let dim = self.dim();
        let mut g = alloc::vec![0.0; dim];
        for (i, j, mass) in north_west_corner(&a.weights, &b.weights) {
            let sign = match a.values[i].partial_cmp(&b.values[j]) {
                Some(core::cmp::Ordering::Greater) => 1.0,
                Some(core::cmp::Ordering::Less) => -1.0,
                _ => continue,
            };
            let (x, y) = (a.barycenter(i), b.barycenter(j));
            for k in 0..dim {
                g[k] += mass * sign * (x[k] - y[k]);
            }
        }
        (value, g)
    }

    /// The unit differences `x_i - y_j` with the largest `μ_i ν_j |x_i - y_j|`.
    fn warm_starts(&self, count: usize) -> Vec<Direction> {
        let mut best: Vec<(f64, usize, usize)> = Vec::with_capacity(count + 1);
        for (i, (x, wx)) in self.mu.atoms().enumerate() {
            for (j, (y, wy)) in self.nu.atoms().enumerate() {
                let score = wx * wy * crate::measures::distance(x, y);
                if score <= 0.0 {
                    continue;
                }
                let pos = best.iter().position(|b| score > b.0).unwrap_or(best.len());
                if pos < count {
                    best.insert(pos, (score, i, j));
                    best.truncate(count);
                }
            }
        }
        best.into_iter()
            .filter_map(|(_, i, j)| {
                let diff = self.mu.point(i).iter().zip(self.nu.point(j)).map(|(a, b)| a - b).collect();
                Direction::new(diff).ok()
            })
            .collect()
    }

    fn near_ties(&self, theta: &Direction, tol: f64) -> Vec<Vec<f64>> {
        let points: Vec<&[f64]> = self
            .mu
            .atoms()
            .chain(self.nu.atoms())
            .map(|(x, _)| x)
            .collect();
        let mut proj: Vec<(f64, usize)> = points.iter().enumerate().map(|(k, x)| (theta.dot(x), k)).collect();
        proj.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let spread = match (proj.first(), proj.last()) {
            (Some(a), Some(b)) => b.0 - a.0,
            _ => 0.0,
        };
        let tol = tol * spread;
        let mut ties: Vec<(f64, Vec<f64>)> = proj
            .windows(2)
            .filter(|w| w[1].0 - w[0].0 <= tol)
            .filter_map(|w| {
                let n: Vec<f64> = points[w[1].1].iter().zip(points[w[0].1]).map(|(a, b)| a - b).collect();
                let len = norm(&n);
                (len > 0.0).then(|| ((w[1].0 - w[0].0) / len, n))
            })
            .collect();
        ties.sort_by(|a, b| a.0.total_cmp(&b.0));
        ties.into_iter().map(|(_, n)| n).collect()
    }
}

/// Projected atoms sorted ascending, with the original atoms that share a
/// projected value pooled into one group.
struct Groups {
    dim: usize,
    values: Vec<f64>,
    weights: Vec<f64>,
    /// Weighted sums of the pooled atoms, flat.
    sums: Vec<f64>,
}

impl Groups {
    fn new(m: &DiscreteMeasure, theta: &Direction) -> Self {
        let dim = m.dim();
        let proj = m.project_values(theta);
        let mut order: Vec<usize> = (0..proj.len()).collect();
        order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)));
        let mut groups = Groups {
            dim,
            values: Vec::new(),
            weights: Vec::new(),
            sums: Vec::new(),
        };
        for k in order {
            let w = m.weight(k);
            if groups.values.last() != Some(&proj[k]) {
                groups.values.push(proj[k]);
                groups.weights.push(0.0);
                groups.sums.extend(core::iter::repeat_n(0.0, dim));
            }
            let g = groups.values.len() - 1;
            groups.weights[g] += w;
            for (s, x) in groups.sums[g * dim..].iter_mut().zip(m.point(k)) {
                *s += w * x;
            }
        }
        groups
    }

    fn barycenter(&self, g: usize) -> Vec<f64> {
        let w = self.weights[g];
        self.sums[g * self.dim..(g + 1) * self.dim].iter().map(|s| s / w).collect()
    }
}

fn sorted_projection(m: &DiscreteMeasure, theta: &Direction) -> (Vec<f64>, Vec<f64>) {
    let proj = m.project_values(theta);
    let mut order: Vec<usize> = (0..proj.len()).collect();
    order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]));
    let values = order.iter().map(|&k| proj[k]).collect();
    let weights = order.iter().map(|&k| m.weight(k)).collect();
    (values, weights)
}

/// Supergradient of `θ ↦ Σ π_ij |⟨x_i - y_j, θ⟩|` at `θ`, where `π` is the
/// monotone coupling of the projections (`sign(0) = 0`). Atoms with equal
/// projections share mass proportionally.
pub fn sliced_subgradient(mu: &DiscreteMeasure, nu: &DiscreteMeasure, theta: &Direction) -> Result<Vec<f64>> {
    mu.check_dim(nu.dim())?;
    mu.check_dim(theta.dim())?;
    Ok(MeasurePair { mu, nu }.value_and_supergradient(theta).1)
}

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSlicedConfig {
    /// Number of starting points; `None` means `16 + 8d`.
    pub restarts: Option<usize>,
    pub max_iterations: usize,
    /// Keys the random starting directions.
    pub seed: u64,
}

impl Default for MaxSlicedConfig {
    fn default() -> Self {
        MaxSlicedConfig {
            restarts: None,
            max_iterations: 200,
            seed: 0,
        }
    }
}

impl MaxSlicedConfig {
    pub fn with_restarts(restarts: usize, seed: u64) -> Self {
        MaxSlicedConfig {
            restarts: Some(restarts),
            seed,
            ..Default::default()
        }
    }

    pub fn restarts_for(&self, dim: usize) -> usize {
        self.restarts.unwrap_or(16 + 8 * dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartTrace {
    pub initial: Direction,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxSlicedResult {
    /// Exact 1D distance along `direction`.
    pub value: f64,
    /// Canonical sign: first nonzero coordinate positive.
    pub direction: Direction,
    pub restarts_used: usize,
    pub trace: Vec<RestartTrace>,
}

/// Number of warm starts taken from the objective before random ones.
const WARM_STARTS: usize = 3;

/// Max-sliced W1 between two discrete measures.
pub fn maxsliced_w1(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cfg: &MaxSlicedConfig) -> Result<MaxSlicedResult> {
    maximize(&MeasurePair::new(mu, nu)?, cfg)
}

/// Restarted ascent on any sliced objective.
///
/// Restart `k < 3` starts from the objective's `k`-th warm start if it has
/// one; all others start from a Gaussian direction drawn from stream `k` of
/// `cfg.seed`, so the first `R` restarts do not depend on the total count.
pub fn maximize<O: SlicedObjective + ?Sized>(obj: &O, cfg: &MaxSlicedConfig) -> Result<MaxSlicedResult> {
    let dim = obj.dim();
    if dim == 0 {
        return Err(Error::input("dimension must be >= 1"));
    }
    if dim == 1 {
        let direction = Direction::axis(1, 0)?;
        let value = obj.value(&direction);
        return Ok(MaxSlicedResult {
            value,
            trace: alloc::vec![RestartTrace {
                initial: direction.clone(),
                value,
            }],
            direction,
            restarts_used: 1,
        });
    }
    let restarts = cfg.restarts_for(dim);
    if restarts == 0 {
        return Err(Error::input("need at least one restart"));
    }
    let warm = obj.warm_starts(WARM_STARTS.min(restarts));
    let mut trace = Vec::with_capacity(restarts);
    let mut best: Option<(f64, Direction)> = None;
    for k in 0..restarts {
        let initial = match warm.get(k) {
            Some(d) => d.clone(),
            None => random_direction(dim, cfg.seed, k as u64),
        };
        let found = snap_to_kinks(obj, ascend(obj, initial.clone(), cfg.max_iterations)).canonical();
        let value = obj.value(&found);
        trace.push(RestartTrace { initial, value });
        best = Some(match best {
            Some((v, d)) if !improves(value, &found, v, &d) => (v, d),
            _ => (value, found),
        });
    }
    let (value, direction) = best.expect("at least one restart");
    Ok(MaxSlicedResult {
        value,
        direction,
        restarts_used: restarts,
        trace,
    })
}

/// Larger value wins; within 1e-12 the lexicographically smaller direction.
fn improves(value: f64, dir: &Direction, best: f64, best_dir: &Direction) -> bool {
    if value > best + 1e-12 {
        return true;
    }
    if value < best - 1e-12 {
        return false;
    }
    dir.components()
        .iter()
        .zip(best_dir.components())
        .find(|(a, b)| a != b)
        .is_some_and(|(a, b)| a < b)
}

fn random_direction(dim: usize, seed: u64, stream: u64) -> Direction {
    let mut rng = rng_for(seed, stream);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(d) = Direction::new(v) {
            return d;
        }
    }
}

fn ascend<O: SlicedObjective + ?Sized>(obj: &O, start: Direction, max_iterations: usize) -> Direction {
    let mut theta = start;
    let (mut value, mut grad) = obj.value_and_supergradient(&theta);
    let mut step = 0.5;
    // Values after each accepted step, for the stall test.
    let mut accepted: Vec<f64> = alloc::vec![value];
    for _ in 0..max_iterations {
        let radial = dot(&grad, theta.components());
        let tangent: Vec<f64> = grad.iter().zip(theta.components()).map(|(g, t)| g - radial * t).collect();
        let tnorm = norm(&tangent);
        let gnorm = norm(&grad);
        let mut candidates: Vec<Direction> = Vec::with_capacity(2);
        if tnorm > 1e-15 * (1.0 + gnorm) {
            let moved = theta.components().iter().zip(&tangent).map(|(t, v)| t + step * v / tnorm).collect();
            candidates.extend(Direction::new(moved).ok());
        }
        // Maximizer of the linearization ⟨g, θ⟩ over the sphere.
        if gnorm > 0.0 && radial < gnorm * (1.0 - 1e-12) {
            candidates.extend(Direction::new(grad.clone()).ok());
        }
        if candidates.is_empty() {
            break;
        }
        let mut moved = false;
        for cand in candidates {
            let (v, g) = obj.value_and_supergradient(&cand);
            if v > value {
                theta = cand;
                value = v;
                grad = g;
                moved = true;
            }
        }
        if moved {
            accepted.push(value);
            step = (step * 2.0).min(1.0);
            let n = accepted.len();
            if n > 5 && value - accepted[n - 6] <= 1e-10 * value.max(f64::MIN_POSITIVE) {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    theta
}

/// Ascent only approaches a kink geometrically. Moves `θ` exactly onto the
/// nearby tie hyperplanes (up to `d - 1` of them) while the value does not
/// drop.
fn snap_to_kinks<O: SlicedObjective + ?Sized>(obj: &O, theta: Direction) -> Direction {
    const TOL: f64 = 1e-7;
    const TRIES: usize = 8;
    let dim = obj.dim();
    let mut theta = theta;
    let mut value = obj.value(&theta);
    // Orthonormal basis of the imposed normals.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() + 1 < dim {
        let mut moved = false;
        for n in obj.near_ties(&theta, TOL).into_iter().take(TRIES) {
            let Some(e) = orthonormalize(&basis, n) else {
                continue;
            };
            let t = theta.components();
            let c = dot(t, &e);
            let cand: Vec<f64> = t.iter().zip(&e).map(|(a, b)| a - c * b).collect();
            let Ok(cand) = Direction::new(cand) else {
                continue;
            };
            let v = obj.value(&cand);
            if v >= value {
                theta = cand;
                value = v;
                basis.push(e);
                moved = true;
                break;
            }
        }
        if !moved {
            break;
        }
    }
    theta
}

fn orthonormalize(basis: &[Vec<f64>], mut v: Vec<f64>) -> Option<Vec<f64>> {
    let scale = norm(&v);
    for e in basis {
        let c = dot(&v, e);
        for (x, y) in v.iter_mut().zip(e) {
            *x -= c * y;
        }
    }
    let len = norm(&v);
    if len <= 1e-9 * scale {
        return None;
    }
    Some(v.into_iter().map(|x| x / len).collect())
}

/// Best of the directions `(cos(πk/K), sin(πk/K))`, `k < K`, for any
/// two-dimensional objective.
pub fn grid_maximize_2d<O: SlicedObjective + ?Sized>(obj: &O, k: usize) -> Result<(f64, Direction)> {
    if obj.dim() != 2 {
        return Err(Error::input("grid search needs dimension 2"));
    }
    if k < 4 {
        return Err(Error::input("grid size must be >= 4"));
    }
    let mut best = (f64::NEG_INFINITY, Direction::axis(2, 0)?);
    for i in 0..k {
        let theta = Direction::from_angle(core::f64::consts::PI * i as f64 / k as f64);
        let v = obj.value(&theta);
        if v > best.0 {
            best = (v, theta);
        }
    }
    Ok(best)
}

/// Dense half-circle grid value of the max-sliced distance in `ℝ^2`.
pub fn grid_oracle_2d(mu: &DiscreteMeasure, nu: &DiscreteMeasure, k: usize) -> Result<f64> {
    Ok(grid_maximize_2d(&MeasurePair::new(mu, nu)?, k)?.0)
}
