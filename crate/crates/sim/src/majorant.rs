//! Exact joint sampling of sup_{t≤T}(σB_t − μt) for all μ at once.
//!
//! The faces of the concave majorant of a Lévy process on [0, T] have the
//! law of uniform stick-breaking lengths ℓ_i with independent increments
//! X(ℓ_i). Subtracting μt shifts every face slope by −μ without changing the
//! faces, so sup_{t≤T}(σB_t − μt) = Σ_i (σ√ℓ_i Z_i − μℓ_i)^+ jointly in μ.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// Stick-breaking stops once the unbroken remainder falls below this
/// fraction of the horizon; the remainder becomes a final face.
const REMAINDER: f64 = 1e-16;

/// Faces of one sampled concave majorant, sorted by decreasing slope, with
/// prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxProfile {
    slopes: Vec<f64>,
    cum_inc: Vec<f64>,
    cum_len: Vec<f64>,
    horizon: f64,
}

impl MaxProfile {
    pub fn sample<R: Rng + ?Sized>(sigma: f64, horizon: f64, rng: &mut R) -> Result<Self> {
        if !(sigma > 0.0 && horizon > 0.0 && horizon.is_finite()) {
            return invalid(format!(
                "need sigma > 0 and a finite positive horizon, got {sigma}, {horizon}"
            ));
        }
        let mut faces: Vec<(f64, f64)> = Vec::with_capacity(64);
        let mut rest = horizon;
        while rest > REMAINDER * horizon {
            let u: f64 = rng.random();
            let len = u * rest;
            rest -= len;
            if len > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                faces.push((len, sigma * len.sqrt() * z));
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        faces.push((rest, sigma * rest.sqrt() * z));
        faces.sort_by(|a, b| (b.1 / b.0).total_cmp(&(a.1 / a.0)));
        let mut slopes = Vec::with_capacity(faces.len());
        let mut cum_inc = Vec::with_capacity(faces.len() + 1);
        let mut cum_len = Vec::with_capacity(faces.len() + 1);
        cum_inc.push(0.0);
        cum_len.push(0.0);
        for (len, inc) in faces {
            slopes.push(inc / len);
            cum_inc.push(cum_inc.last().unwrap() + inc);
            cum_len.push(cum_len.last().unwrap() + len);
        }
        Ok(Self {
            slopes,
            cum_inc,
            cum_len,
            horizon,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// sup_{t≤T}(σB_t − μt).
    pub fn max_at(&self, mu: f64) -> f64 {
        let k = self.slopes.partition_point(|&s| s > mu);
        (self.cum_inc[k] - mu * self.cum_len[k]).max(0.0)
    }

    /// Faces as (slope, increment, length), steepest first.
    pub fn faces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.slopes.iter().enumerate().map(move |(i, &s)| {
            (
                s,
                self.cum_inc[i + 1] - self.cum_inc[i],
                self.cum_len[i + 1] - self.cum_len[i],
            )
        })
    }

    /// ∫₀^∞ sup_{t≤T}(σB_t − μ(x)t)/x² dx for μ(x) = κ + λx^{−p}, in
    /// closed form face by face.
    pub fn srpt_total_mass(&self, kappa: f64, lambda: f64, p: f64) -> f64 {
        let mut total = 0.0;
        for (s, inc, len) in self.faces() {
            if s <= kappa {
                break;
            }
            // The face contributes where μ(x) < s, i.e. x > x*.
            let xs = (lambda / (s - kappa)).powf(1.0 / p);
            total += (inc - kappa * len) / xs - lambda * len * xs.powf(-p - 1.0) / (p + 1.0);
        }
        total
    }
}
