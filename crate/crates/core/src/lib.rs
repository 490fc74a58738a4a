//! Two-sample survival tests under non-proportional hazards.
//!
//! The crate provides:
//! - weighted logrank statistics with Fleming-Harrington and crossing-hazard
//!   weights ([`wlrt`], [`weights`]),
//! - maximum-combination, projection and Renyi omnibus tests ([`omnibus`]),
//! - the numerical kernel they need: multivariate-normal rectangle
//!   probabilities, pseudo-inverse, quadrature, root finding ([`numerics`]),
//! - a trial generator covering fixed-duration and event-driven censoring
//!   with eight hazard-ratio shapes ([`simgen`]),
//! - a Monte Carlo harness for power / type-I-error studies ([`harness`]).

pub mod error;
pub mod harness;
pub mod numerics;
pub mod omnibus;
pub mod simgen;
pub mod surv;
pub mod weights;
pub mod wlrt;

pub use error::{Error, Result};
pub use numerics::rng::RngStream;
pub use surv::{EventTable, Subject};
pub use weights::{WeightSet, WeightSpec};
