use alloc::vec::Vec;

use crate::{Error, Result};

/// A unit vector `θ ∈ S^{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    components: Vec<f64>,
}

impl Direction {
    /// Normalizes `v`. Fails on zero, empty or non-finite input.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::input("direction must have dimension >= 1"));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("direction has non-finite components"));
        }
        let norm = norm(&v);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::input("direction must be nonzero"));
        }
        let components = v.into_iter().map(|c| c / norm).collect();
        Ok(Direction { components })
    }

    /// Accepts `v` as is if it already has unit norm within 1e-12.
    pub fn from_unit(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if v.is_empty() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::input("direction is not a unit vector"));
        }
        Ok(Direction { components: v })
    }

    /// The `k`-th standard basis vector of `ℝ^d`.
    pub fn axis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::input("axis index out of range"));
        }
        let mut components = alloc::vec![0.0; dim];
        components[k] = 1.0;
        Ok(Direction { components })
    }

    /// `(cos φ, sin φ)`.
    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = libm::sincos(phi);
        Direction {
            components: alloc::vec![c, s],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<f64> {
        self.components
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.components, x)
    }

    /// The representative of `±θ` whose first nonzero coordinate is positive.
    pub fn canonical(&self) -> Direction {
        match self.components.iter().find(|c| **c != 0.0) {
            Some(c) if *c < 0.0 => Direction {
                components: self.components.iter().map(|c| -c).collect(),
            },
            _ => self.clone(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn normalizes_input() {
        let d = Direction::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(d.components(), &[0.6, 0.8]);
        assert!((norm(d.components()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_vectors() {
        assert!(Direction::new(vec![]).is_err());
        assert!(Direction::new(vec![0.0, 0.0]).is_err());
        assert!(Direction::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Direction::from_unit(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn canonical_flips_sign() {
        let d = Direction::new(vec![0.0, -1.0, 2.0]).unwrap();
        let c = d.canonical();
        assert!(c.components()[1] > 0.0);
        assert_eq!(c.canonical(), c);
    }
}
