use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use super::direction::{distance, dot, norm};
use super::{Complex, Direction};
use crate::{Error, Result};

/// Atoms closer than this (Euclidean) are merged at construction.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Moment order `p ≥ 1`, with `∞` kept as its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentOrder {
    Finite(f64),
    Infinity,
}

impl MomentOrder {
    pub fn is_infinite(&self) -> bool {
        matches!(self, MomentOrder::Infinity)
    }

    /// Hölder conjugate `p* = p/(p-1)`; `1` for `p = ∞`. Requires `p > 1`.
    pub fn conjugate(&self) -> Result<f64> {
        match *self {
            MomentOrder::Infinity => Ok(1.0),
            MomentOrder::Finite(p) if p > 1.0 && p.is_finite() => Ok(p / (p - 1.0)),
            MomentOrder::Finite(p) => Err(Error::input(alloc::format!(
                "conjugate exponent needs p > 1, got {p}"
            ))),
        }
    }
}

impl fmt::Display for MomentOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentOrder::Finite(p) => write!(f, "{p}"),
            MomentOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for MomentOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(MomentOrder::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::input(alloc::format!("cannot parse moment order `{t}`")))?;
        if p.is_infinite() && p > 0.0 {
            Ok(MomentOrder::Infinity)
        } else if p.is_finite() {
            Ok(MomentOrder::Finite(p))
        } else {
            Err(Error::input("moment order must be a number or `inf`"))
        }
    }
}

/// A finitely supported probability measure on `ℝ^d`.
///
/// Atoms are stored in lexicographic order of their coordinates, atoms within
/// [`MERGE_TOLERANCE`] of each other are merged, zero-weight atoms are dropped
/// and weights are divided by their sum. For `d = 1` the atoms are therefore
/// sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from row-major `points` (`weights.len()` rows of
    /// `dim` coordinates) and nonnegative weights.
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be >= 1"));
        }
        if points.len() != dim * weights.len() {
            return Err(Error::input(alloc::format!(
                "{} coordinates do not form {} points of dimension {dim}",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("point coordinates must be finite"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::input("weights must be finite and nonnegative"));
        }

        if !weights.iter().any(|w| *w > 0.0) {
            return Err(Error::input("measure has no positive weight"));
        }
        let (merged_points, mut merged_weights) = merge_atoms(dim, &points, &weights);
        let total: f64 = merged_weights.iter().sum();
        for w in &mut merged_weights {
            *w /= total;
        }
        Ok(DiscreteMeasure {
            dim,
            points: merged_points,
            weights: merged_weights,
        })
    }

    /// Equal weights on the given rows.
    pub fn uniform(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() % dim != 0 {
            return Err(Error::input("coordinates do not form whole points"));
        }
        let n = points.len() / dim;
        DiscreteMeasure::new(dim, points, alloc::vec![1.0; n])
    }

    /// A unit point mass at `x`.
    pub fn dirac(x: &[f64]) -> Result<Self> {
        DiscreteMeasure::new(x.len(), x.to_vec(), alloc::vec![1.0])
    }

    /// Builds a measure from `(point, weight)` pairs.
    pub fn from_atoms<'a, I>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (x, w) in atoms {
            if x.len() != dim {
                return Err(Error::dimension_mismatch(dim, x.len()));
            }
            points.extend_from_slice(x);
            weights.push(w);
        }
        DiscreteMeasure::new(dim, points, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of (merged) atoms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Row-major coordinates of all atoms.
    pub fn coordinates(&self) -> &[f64] {
        &self.points
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    /// `λ·self + (1-λ)·other`.
    pub fn mixture(&self, other: &DiscreteMeasure, lambda: f64) -> Result<Self> {
        self.check_dim(other.dim)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::input("mixture weight must lie in [0, 1]"));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        let weights = self
            .weights
            .iter()
            .map(|w| lambda * w)
            .chain(other.weights.iter().map(|w| (1.0 - lambda) * w))
            .collect();
        DiscreteMeasure::new(self.dim, points, weights)
    }

    /// Applies `f` to every atom location, keeping weights.
    pub fn map_points<F>(&self, out_dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut points = alloc::vec![0.0; out_dim * self.len()];
        for (x, y) in self
            .points
            .chunks_exact(self.dim)
            .zip(points.chunks_exact_mut(out_dim))
        {
            f(x, y);
        }
        DiscreteMeasure::new(out_dim, points, self.weights.clone())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map_points(self.dim, |x, y| {
            for (a, b) in x.iter().zip(y) {
                *b = a * factor;
            }
        })
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        self.check_dim(shift.len())?;
        self.map_points(self.dim, |x, y| {
            for ((a, b), c) in x.iter().zip(y).zip(shift) {
                *b = a + c;
            }
        })
    }

    /// Pushforward under `x ↦ ⟨x, θ⟩`; coinciding images are merged.
    pub fn project(&self, theta: &Direction) -> Result<Self> {
        self.check_dim(theta.dim())?;
        let values = self.project_values(theta);
        DiscreteMeasure::new(1, values, self.weights.clone())
    }

    /// `⟨x_k, θ⟩` for every atom, in atom order, without merging.
    pub fn project_values(&self, theta: &Direction) -> Vec<f64> {
        self.points
            .chunks_exact(self.dim)
            .map(|x| theta.dot(x))
            .collect()
    }

    pub fn moment_norm(&self, p: MomentOrder) -> Result<f64> {
        match p {
            MomentOrder::Infinity => Ok(self
                .points
                .chunks_exact(self.dim)
                .map(norm)
                .fold(0.0, f64::max)),
            MomentOrder::Finite(p) if p >= 1.0 => {
                let s: f64 = self
                    .atoms()
                    .map(|(x, w)| w * libm::pow(norm(x), p))
                    .sum();
                Ok(libm::pow(s, 1.0 / p))
            }
            MomentOrder::Finite(p) => Err(Error::input(alloc::format!(
                "moment order must be >= 1, got {p}"
            ))),
        }
    }

    pub fn characteristic_function(&self, t: &[f64]) -> Result<Complex> {
        self.check_dim(t.len())?;
        let (mut re, mut im) = (0.0, 0.0);
        for (x, w) in self.atoms() {
            let (s, c) = libm::sincos(dot(t, x));
            re += w * c;
            im += w * s;
        }
        Ok(Complex::new(re, im))
    }

    /// Largest atom norm.
    pub fn radius(&self) -> f64 {
        self.points
            .chunks_exact(self.dim)
            .map(norm)
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::dimension_mismatch(self.dim, other))
        }
    }
}

impl fmt::Display for DiscreteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, w)) in self.atoms().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}·δ{:?}", x)?;
        }
        f.write_str("}")?;
        Ok(())
    }
}

/// Sorts atoms lexicographically, drops zero weights and merges atoms within
/// [`MERGE_TOLERANCE`] of an earlier atom, summing (possibly signed) weights.
pub(crate) fn merge_atoms(dim: usize, points: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let row = |k: usize| &points[k * dim..(k + 1) * dim];
    let mut order: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] != 0.0).collect();
    order.sort_by(|&a, &b| lex_cmp(row(a), row(b)));

    // Candidates for merging with atom `a` have a first coordinate within
    // tolerance of it, so the inner scan stops early.
    let mut absorbed = alloc::vec![false; order.len()];
    let mut merged_points = Vec::with_capacity(dim * order.len());
    let mut merged_weights = Vec::with_capacity(order.len());
    for s in 0..order.len() {
        if absorbed[s] {
            continue;
        }
        let a = row(order[s]);
        let mut w = weights[order[s]];
        for t in s + 1..order.len() {
            let b = row(order[t]);
            if b[0] - a[0] > MERGE_TOLERANCE {
                break;
            }
            if !absorbed[t] && distance(a, b) <= MERGE_TOLERANCE {
                absorbed[t] = true;
                w += weights[order[t]];
            }
        }
        merged_points.extend_from_slice(a);
        merged_weights.push(w);
    }
    (merged_points, merged_weights)
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}
