//! Kantorovich (W1) transport distances between discrete measures, the
//! max-sliced W1 distance, and checks of the inequalities that bound the
//! full distance by its one-dimensional projections.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, Monte Carlo
//! sweeps and the command line live in the `cwot` crate.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`measures`] | [`DiscreteMeasure`], [`Direction`], seeded samplers, characteristic functions |
//! | [`ot1d`] | exact 1D W1 by a CDF sweep |
//! | [`otlp`] | exact W1 in ℝ^d by network simplex, dual potentials, truncated dual |
//! | [`maxsliced`] | max-sliced W1 by restarted projected supergradient ascent |
//! | [`cramer_wold`] | the projection bound, its exponent and the auxiliary checks |
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cramer_wold;
mod error;
pub mod maxsliced;
pub mod measures;
pub mod ot1d;
pub mod otlp;
pub mod seeding;

pub use error::{Error, Result};
pub use maxsliced::{MaxSlicedConfig, MaxSlicedResult};
pub use measures::{
    Complex, DiscreteMeasure, Direction, DistributionSpec, Family, MomentOrder, ProjectedLaw,
};
