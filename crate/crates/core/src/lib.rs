//! Zeros of sums of independent-root random polynomials.
//!
//! The crate is organised bottom-up:
//!
//! - [`measures`]: root distributions with exact samplers and closed-form
//!   logarithmic potentials.
//! - [`polyeval`]: overflow-free evaluation of polynomials stored as root
//!   lists, and of their sums.
//! - [`rootfinder`]: simultaneous Aberth–Ehrlich iteration for all zeros of a
//!   sum, with a Walsh-type containment bound and a certification pass.
//! - [`limitlaw`]: the predicted limit measure `(1/2π) Δ max_k U_k`, both in
//!   weak form against smooth bumps and as a grid of cell masses.
//! - [`stats`]: linear statistics of computed zeros and the Monte-Carlo
//!   diagnostics (ratio event, potential-gap set, concentration).

pub mod error;
pub mod limitlaw;
pub mod measures;
pub mod polyeval;
pub mod rng;
pub mod rootfinder;
pub mod stats;

mod sum;

pub use error::{Error, Result};
pub use limitlaw::{BumpFunction, GridField, GridSpec};
pub use measures::RootMeasure;
pub use polyeval::{LogComplex, PolySum, RootPoly};
pub use rootfinder::{RootFindOptions, RootFindReport};
pub use stats::{DiagnosticsReport, EmpiricalMeasure, Estimate};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
