//! Exact stationary laws of reflecting coupled Brownian motions.
//!
//! A family of Brownian motions X_t(a) = σB_t − μ(a)t indexed by job size
//! a > 0 shares a single driving noise B. The all-time maxima
//! M_*(a) = sup_t X_t(a) form the stationary law of the reflected field; this
//! crate evaluates their marginal, two-point and n-point distributions, the
//! associated measure ∫ M_*(x)/x² dx, and the SRPT heavy-traffic moments.
//!
//! All closed-form code is generic over [`Real`] (`f32` or `f64`); the type
//! aliases at the crate root fix `f64`.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod drift;
pub mod error;
pub mod measure;
pub mod ndist;
pub mod quad;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DriftSpec = drift::DriftSpec<f64>;
pub type DriftSpecF32 = drift::DriftSpec<f32>;
pub type TwoPoint = analytic::TwoPoint<f64>;
pub type ConstraintSet = ndist::ConstraintSet<f64>;
pub type SegmentedDrift = ndist::SegmentedDrift<f64>;
pub type MeasureSnapshot = measure::MeasureSnapshot<f64>;
pub type SrptParams = measure::SrptParams<f64>;
