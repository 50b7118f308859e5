//! Monte Carlo and discrete-event companions to `rcbm-core`.
//!
//! Every estimator here is a deterministic function of a master seed: each
//! replicate draws from its own ChaCha8 stream, so results do not depend on
//! the number of rayon workers.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bm_sim;
pub mod error;
pub mod majorant;
pub mod mc;
pub mod rng;
pub mod srpt_sim;
pub mod stats;
pub mod validate;

pub use error::{Result, SimError};

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
