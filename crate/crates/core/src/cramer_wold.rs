//! The projection bound `W ≤ 18 b^{1-α} M^α` and its auxiliary inequalities.
//!
//! Here `W` is the full W1 distance, `M` the max-sliced distance, `b` a bound
//! on the `p`-th moment norms of both measures and `α = 2/(d p* + 2)` with
//! `p* = p/(p-1)` (`p* = 1` for `p = ∞`).
//!
//! The verifiers compute `M` numerically, which only ever gives a lower bound
//! on the true supremum. Since the bound grows with `M`, a failed check in
//! [`verify_cw`] points at a solver problem rather than a counterexample.

use alloc::vec::Vec;

use crate::maxsliced::{maxsliced_w1, MaxSlicedConfig};
use crate::measures::norm;
use crate::otlp::{w1_exact, w1_truncated_dual};
use crate::{DiscreteMeasure, Error, MomentOrder, Result};

/// Slack allowed on `M ≤ 2b` before rejecting the input.
const MOMENT_SLACK: f64 = 1e-9;

/// `α(p, d) = 2/(d p* + 2)`.
pub fn alpha_exponent(p: MomentOrder, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::input("dimension must be >= 1"));
    }
    Ok(2.0 / (d as f64 * p.conjugate()? + 2.0))
}

/// `18 b^{1-α} M^α`.
pub fn cw_upper_bound(b: f64, m: f64, p: MomentOrder, d: usize) -> Result<f64> {
    let alpha = alpha_exponent(p, d)?;
    if !(b >= 0.0 && m >= 0.0) || !b.is_finite() || !m.is_finite() {
        return Err(Error::input("b and M must be finite and non-negative"));
    }
    if m > 2.0 * b + MOMENT_SLACK {
        return Err(Error::input(alloc::format!(
            "M = {m} exceeds 2b = {}; no pair of measures with moment bound b has it",
            2.0 * b
        )));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    Ok(18.0 * libm::pow(b, 1.0 - alpha) * libm::pow(m, alpha))
}

/// `18 √d M^{1/(d+1)}`, the form of the bound for `E|X|² ≤ d`.
pub fn isotropic_bound(d: usize, m: f64) -> f64 {
    let d = d as f64;
    18.0 * libm::sqrt(d) * libm::pow(m, 1.0 / (d + 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub w: f64,
    pub m: f64,
    pub b: f64,
    pub p: MomentOrder,
    pub d: usize,
    pub alpha: f64,
    pub bound: f64,
    /// `w / bound`, with `0/0 = 0`.
    pub ratio: f64,
    /// `ratio ≤ 1 + 1e-9`.
    pub holds: bool,
}

/// Overrides for [`verify_cw_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Use this `b` instead of the larger of the two moment norms.
    pub b: Option<f64>,
    pub maxsliced: MaxSlicedConfig,
}

/// Checks the bound on a pair of measures with `b` the larger moment norm.
pub fn verify_cw(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: MomentOrder) -> Result<BoundReport> {
    verify_cw_with(mu, nu, p, &VerifyOptions::default())
}

pub fn verify_cw_with(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: MomentOrder,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    mu.check_dim(nu.dim())?;
    let d = mu.dim();
    let alpha = alpha_exponent(p, d)?;
    let b = match opts.b {
        Some(b) => b,
        None => moment_bound(mu, nu, p)?,
    };
    let w = w1_exact(mu, nu)?.value;
    let m = maxsliced_w1(mu, nu, &opts.maxsliced)?.value;
    let bound = cw_upper_bound(b, m, p, d)?;
    Ok(report(w, m, b, p, d, alpha, bound))
}

fn report(w: f64, m: f64, b: f64, p: MomentOrder, d: usize, alpha: f64, bound: f64) -> BoundReport {
    let ratio = if w == 0.0 { 0.0 } else { w / bound };
    BoundReport {
        w,
        m,
        b,
        p,
        d,
        alpha,
        bound,
        ratio,
        holds: ratio <= 1.0 + 1e-9,
    }
}

fn moment_bound(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: MomentOrder) -> Result<f64> {
    Ok(mu.moment_norm(p)?.max(nu.moment_norm(p)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfReport {
    /// Largest `|f(t) - g(t)| - 2|t| M` over the frequencies checked.
    pub max_violation: f64,
    /// `max_violation ≤ 1e-9`.
    pub holds: bool,
}

/// Checks `|f(t) - g(t)| ≤ 2|t| M` for the characteristic functions of the
/// two measures at every `t` in `ts`.
///
/// `m` must be at least the max-sliced distance; the exact W1 works. Passing
/// an optimizer result (a lower bound) can report spurious violations.
pub fn cf_bound_check(mu: &DiscreteMeasure, nu: &DiscreteMeasure, m: f64, ts: &[Vec<f64>]) -> Result<CfReport> {
    mu.check_dim(nu.dim())?;
    if ts.is_empty() {
        return Err(Error::input("need at least one frequency"));
    }
    let mut worst = f64::NEG_INFINITY;
    for t in ts {
        let diff = (mu.characteristic_function(t)? - nu.characteristic_function(t)?).abs();
        worst = worst.max(diff - 2.0 * norm(t) * m);
    }
    Ok(CfReport {
        max_violation: worst,
        holds: worst <= 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    /// The full distance `W`.
    pub lhs: f64,
    /// `W^(r)`.
    pub truncated: f64,
    pub b: f64,
    /// `3 W^(r) + 4b (2b/r)^{p-1}`.
    pub rhs: f64,
    /// `lhs ≤ rhs + 1e-8`.
    pub holds: bool,
}

/// Compares `W` with `3 W^(r) + 4b (2b/r)^{p-1}` for finite `p > 1`.
pub fn truncation_bound_check(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: MomentOrder,
    r: f64,
) -> Result<TruncationReport> {
    mu.check_dim(nu.dim())?;
    let exponent = match p {
        MomentOrder::Finite(p) if p > 1.0 && p.is_finite() => p,
        _ => return Err(Error::input("the truncation bound needs a finite p > 1")),
    };
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::input("r must be positive and finite"));
    }
    let b = moment_bound(mu, nu, p)?;
    let lhs = w1_exact(mu, nu)?.value;
    let truncated = w1_truncated_dual(mu, nu, r)?;
    let rhs = 3.0 * truncated + 4.0 * b * libm::pow(2.0 * b / r, exponent - 1.0);
    Ok(TruncationReport {
        lhs,
        truncated,
        b,
        rhs,
        holds: lhs <= rhs + 1e-8,
    })
}
