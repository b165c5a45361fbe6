//! Command-line front end, file formats and Monte Carlo experiments for
//! `cwot-core`.

pub mod cli;
mod error;
pub mod experiments;
pub mod io;

pub use error::{Error, Result};
