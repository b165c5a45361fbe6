//! Discrete measures, directions, projections, moments, characteristic
//! functions and seeded samplers of distributions on the unit ball.

mod complex;
mod direction;
mod measure;
mod projected;
mod sampling;

pub(crate) use direction::{distance, dot, norm};
pub(crate) use measure::merge_atoms;

pub use complex::Complex;
pub use direction::Direction;
pub use measure::{DiscreteMeasure, MomentOrder, MERGE_TOLERANCE};
pub use projected::ProjectedLaw;
pub use sampling::{DistributionSpec, Family};

use crate::Result;

/// Pushforward of `m` under `x ↦ ⟨x, θ⟩`.
pub fn project(m: &DiscreteMeasure, theta: &Direction) -> Result<DiscreteMeasure> {
    m.project(theta)
}

/// `(Σ w_k |x_k|^p)^{1/p}`, or `max_k |x_k|` for `p = ∞`.
pub fn moment_norm(m: &DiscreteMeasure, p: MomentOrder) -> Result<f64> {
    m.moment_norm(p)
}

/// `Σ w_k exp(i⟨t, x_k⟩)`.
pub fn empirical_cf(m: &DiscreteMeasure, t: &[f64]) -> Result<Complex> {
    m.characteristic_function(t)
}

/// `n` i.i.d. draws from `spec`, each with weight `1/n`.
pub fn sample_empirical(spec: &DistributionSpec, n: usize) -> Result<DiscreteMeasure> {
    spec.sample_empirical(n)
}

/// The `u`-quantile of `⟨X, θ⟩` for `X ~ spec`.
pub fn projected_reference_quantile(
    spec: &DistributionSpec,
    theta: &Direction,
    u: f64,
) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(crate::Error::input(alloc::format!(
            "quantile level must lie in (0, 1), got {u}"
        )));
    }
    Ok(spec.projected_law(theta)?.quantile(u))
}
