//! carleman-lab: numerical verification of a Carleman estimate for a
//! second-order elliptic operator whose anisotropic Lipschitz coefficients
//! jump across the flat interface y = 0.
//!
//! The crate is organised bottom-up:
//! * [`grid`] — 1-d/tensor grids, finite differences, quadrature;
//! * [`coeffs`] — two-sided coefficient fields, Schur-reduced symbols,
//!   measured spectral constants, regime classification;
//! * [`weights`] — the family of exponential weights and parameter
//!   admissibility;
//! * [`seminorms`] — discrete half-order interface seminorms (spectral and
//!   double-integral forms) plus localisation checks;
//! * [`freq`] — the per-frequency ODE analysis: conjugated operator,
//!   first-order factorisations, interface data, the two-sided estimate;
//! * [`partition`] — the flat partition of unity and its seminorm
//!   propositions;
//! * [`global`] — the assembled physical-space estimates, scaling
//!   cross-checks and the partition assembly inequality;
//! * [`ensemble`], [`config`], [`report`], [`suites`] — random test data,
//!   run configuration, CSV reporting and the CLI suites.

pub mod coeffs;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod freq;
pub mod global;
pub mod grid;
pub mod partition;
pub mod report;
pub mod seminorms;
pub mod suites;
pub mod weights;

pub use error::{Error, Result};
