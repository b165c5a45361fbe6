//! Exact one-dimensional W1 between discrete measures.
//!
//! `W(μ, ν) = ∫ |F(x) - G(x)| dx` where `F`, `G` are the distribution
//! functions. Between consecutive support points both are constant, so one
//! merged sweep over the (already sorted) atoms gives the integral exactly.

use alloc::vec::Vec;

use crate::{DiscreteMeasure, Error, Result};

/// W1 between two measures on the real line.
pub fn w1_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(Error::input("w1_1d needs one-dimensional measures"));
    }
    Ok(w1_sorted(
        mu.coordinates(),
        mu.weights(),
        nu.coordinates(),
        nu.weights(),
    ))
}

/// CDF sweep over two ascending atom lists.
pub(crate) fn w1_sorted(xs: &[f64], wx: &[f64], ys: &[f64], wy: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut f, mut g) = (0.0, 0.0);
    let mut prev = f64::NAN;
    let mut total = 0.0;
    while i < xs.len() || j < ys.len() {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if !prev.is_nan() {
            total += libm::fabs(f - g) * (x - prev);
        }
        while i < xs.len() && xs[i] == x {
            f += wx[i];
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            g += wy[j];
            j += 1;
        }
        prev = x;
    }
    total
}

/// The monotone (quantile) coupling of two one-dimensional measures as
/// `(i, j, mass)` triples indexing their atoms, built by a north-west corner
/// sweep. It is an optimal plan for every convex cost of `x - y`.
pub fn monotone_coupling(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<Vec<(usize, usize, f64)>> {
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(Error::input("monotone_coupling needs one-dimensional measures"));
    }
    Ok(north_west_corner(mu.weights(), nu.weights()))
}

pub(crate) fn north_west_corner(a: &[f64], b: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0], b[0]);
    loop {
        let mass = ra.min(rb);
        if mass > 0.0 {
            out.push((i, j, mass));
        }
        ra -= mass;
        rb -= mass;
        let last_i = i + 1 == a.len();
        let last_j = j + 1 == b.len();
        if last_i && last_j {
            break;
        }
        // Advance whichever side is exhausted; float residue on the last
        // atom of one side is swept into the other side's remaining atoms.
        if (ra <= rb && !last_i) || last_j {
            i += 1;
            ra = a[i];
        } else {
            j += 1;
            rb = b[j];
        }
    }
    out
}
