//! Finite-dimensional laws of the maximum process.
//!
//! The event {M_*(a_i) ≤ x_i, i = 1..n} is {σB_s ≤ min_i ℓ_i(s) for all s ≥ 0}
//! with lines ℓ_i(s) = ν_i s + x_i. Only lines on the lower envelope matter,
//! so constraints are first reduced until consecutive lines intersect at
//! strictly increasing times τ₁ < … < τ_{n−1}. The probability is then
//!
//! ```text
//! P(U*_{τ_{n−1}} ≤ x₁) − exp(−2ν_n x_n/σ²)·P(V*_{τ_{n−1}} ≤ x₁)
//! ```
//!
//! where U has drift −ν_i on [τ_{i−1}, τ_i) and V = U + 2ν_n t. Both suprema
//! are evaluated by propagating the killed transition density of a drifted
//! Brownian motion across the segments.

use crate::analytic::{exp_max_cdf, running_max_cdf, transition_density};
use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of grid points for [`piecewise_max_cdf`].
pub const DEFAULT_GRID_N: usize = 2048;
/// Largest grid the propagation will refine to.
pub const MAX_GRID_N: usize = 16384;

/// One constraint M_*(a) ≤ x with ν = μ(a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint<T> {
    pub a: T,
    pub nu: T,
    pub x: T,
}

/// Ordered constraints with strictly decreasing drifts.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<T> {
    entries: Vec<Constraint<T>>,
    sigma: T,
}

/// Output of [`ConstraintSet::reduce`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    pub reduced: ConstraintSet<T>,
    /// Zero-based indices into the raw set.
    pub removed: Vec<usize>,
}

impl<T: Real> ConstraintSet<T> {
    /// Builds constraints (a_i, x_i) with drifts from `spec`; a must increase.
    pub fn new(raw: &[(T, T)], spec: &DriftSpec<T>) -> Result<Self> {
        let mut entries = Vec::with_capacity(raw.len());
        for &(a, x) in raw {
            entries.push(Constraint {
                a,
                nu: spec.mu_at(a)?,
                x,
            });
        }
        Self::from_entries(entries, spec.sigma())
    }

    /// Constraints given by drifts ν_i and levels x_i directly.
    pub fn from_drifts(nus: &[T], xs: &[T], sigma: T) -> Result<Self> {
        if nus.len() != xs.len() {
            return Err(Error::InvalidInput(
                "drift and level lists differ in length".into(),
            ));
        }
        let entries = nus
            .iter()
            .zip(xs)
            .map(|(&nu, &x)| Constraint { a: T::nan(), nu, x })
            .collect();
        Self::from_entries(entries, sigma)
    }

    fn from_entries(entries: Vec<Constraint<T>>, sigma: T) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("constraint set is empty".into()));
        }
        if !(sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        for (i, c) in entries.iter().enumerate() {
            if !(c.x >= T::zero()) || !(c.nu >= T::zero()) || c.nu.is_infinite() {
                return Err(Error::InvalidInput(format!(
                    "constraint {i}: need x >= 0 and finite nu >= 0"
                )));
            }
            if i > 0 {
                let prev = &entries[i - 1];
                if !(c.nu < prev.nu) || (!c.a.is_nan() && !(c.a > prev.a)) {
                    return Err(Error::InvalidInput(format!(
                        "constraint {i}: sizes must increase and drifts strictly decrease"
                    )));
                }
            }
        }
        Ok(Self { entries, sigma })
    }

    pub fn entries(&self) -> &[Constraint<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Intersection times τ_i of consecutive lines, i = 1..n−1.
    pub fn taus(&self) -> Vec<T> {
        self.entries
            .windows(2)
            .map(|w| (w[1].x - w[0].x) / (w[0].nu - w[1].nu))
            .collect()
    }

    /// True when 0 < τ₁ < … < τ_{n−1}.
    pub fn is_reduced(&self) -> bool {
        let taus = self.taus();
        let mut prev = T::zero();
        for t in taus {
            if !(t > prev) {
                return false;
            }
            prev = t;
        }
        true
    }

    /// Value of the lower envelope min_i (ν_i s + x_i).
    pub fn envelope(&self, s: T) -> T {
        self.entries
            .iter()
            .fold(T::infinity(), |m, c| m.min(c.nu * s + c.x))
    }

    /// Drops every line that is not on the lower envelope over a set of
    /// positive length. A line touching the envelope at a single point is
    /// dropped.
    pub fn reduce(&self) -> Reduction<T> {
        let e = &self.entries;
        let mut stack: Vec<usize> = Vec::with_capacity(e.len());
        let mut removed = Vec::new();
        for i in 0..e.len() {
            while let Some(&top) = stack.last() {
                // Steeper line starting no lower is dominated for all s > 0.
                if e[top].x >= e[i].x {
                    removed.push(stack.pop().unwrap_or(top));
                    continue;
                }
                if stack.len() >= 2 {
                    let j = stack[stack.len() - 2];
                    // τ(j,i) ≤ τ(j,top), cross-multiplied.
                    let lhs = (e[i].x - e[j].x) * (e[j].nu - e[top].nu);
                    let rhs = (e[top].x - e[j].x) * (e[j].nu - e[i].nu);
                    if lhs <= rhs {
                        removed.push(stack.pop().unwrap_or(top));
                        continue;
                    }
                }
                break;
            }
            stack.push(i);
        }
        removed.sort_unstable();
        Reduction {
            reduced: Self {
                entries: stack.iter().map(|&i| e[i]).collect(),
                sigma: self.sigma,
            },
            removed,
        }
    }

    /// The U (`boosted = false`) or V (`boosted = true`) process on [0, τ_{n−1}].
    pub fn segmented_drift(&self, boosted: bool) -> SegmentedDrift<T> {
        let taus = self.taus();
        let mut prev = T::zero();
        let mut segments = Vec::with_capacity(taus.len());
        for (i, &t) in taus.iter().enumerate() {
            segments.push((t - prev, -self.entries[i].nu));
            prev = t;
        }
        let boost = if boosted {
            T::lit(2.0) * self.entries[self.entries.len() - 1].nu
        } else {
            T::zero()
        };
        SegmentedDrift {
            segments,
            barrier: self.entries[0].x,
            boost,
        }
    }
}

/// Brownian motion σB_t + ∫₀ᵗ (d(s) + boost) ds with piecewise constant d,
/// started at 0 and observed against a barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedDrift<T> {
    /// (duration, drift) pairs.
    pub segments: Vec<(T, T)>,
    pub barrier: T,
    pub boost: T,
}

impl<T: Real> SegmentedDrift<T> {
    pub fn total_duration(&self) -> T {
        self.segments.iter().fold(T::zero(), |s, g| s + g.0)
    }
}

/// P(sup over the whole schedule of the process ≤ barrier).
///
/// One segment is the closed-form running-max CDF. Otherwise the sub-density
/// of the position on {max ≤ barrier} is carried across segments with the
/// trapezoid rule on a uniform grid, and the last segment is closed with the
/// running-max CDF from each grid point.
pub fn piecewise_max_cdf<T: Real>(sd: &SegmentedDrift<T>, sigma: T, grid_n: usize) -> Result<T> {
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if grid_n < 64 {
        return Err(Error::InvalidInput(format!(
            "grid_n must be at least 64, got {grid_n}"
        )));
    }
    let b = sd.barrier;
    if !(b >= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "barrier must be nonnegative, got {b}"
        )));
    }
    for &(dur, drift) in &sd.segments {
        if !(dur.is_finite() && dur > T::zero() && drift.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid segment ({dur}, {drift})"
            )));
        }
    }
    // Kernel drift convention: X = σB − νt.
    let nu = |k: usize| -(sd.segments[k].1 + sd.boost);
    let m = sd.segments.len();
    match m {
        0 => return Ok(T::one()),
        1 => return running_max_cdf(b, sd.segments[0].0, nu(0), sigma),
        _ => {}
    }
    if b == T::zero() {
        return Ok(T::zero());
    }

    let total = sd.total_duration();
    let spread = sd
        .segments
        .iter()
        .fold(T::zero(), |s, &(d, v)| s + (v + sd.boost).abs() * d);
    let lo = b - T::lit(12.0) * sigma * total.sqrt() - spread;
    let width = b - lo;
    // Each propagated kernel must be resolved by the grid.
    let shortest = sd.segments[..m - 1]
        .iter()
        .fold(T::infinity(), |s, g| s.min(g.0));
    let needed = (width / (sigma * shortest.sqrt()) * T::lit(6.0))
        .ceil()
        .as_f64() as usize
        + 1;
    let n = grid_n.max(needed);
    if n > MAX_GRID_N {
        return Err(Error::Quadrature(format!(
            "segment of length {shortest} needs a grid of {n} points (limit {MAX_GRID_N})"
        )));
    }
    let h = width / T::lit((n - 1) as f64);
    let u: Vec<T> = (0..n).map(|i| lo + h * T::lit(i as f64)).collect();
    let trap = |i: usize| {
        if i == 0 || i == n - 1 {
            T::lit(0.5)
        } else {
            T::one()
        }
    };

    let mut dens: Vec<T> = u
        .iter()
        .map(|&ui| transition_density(ui, b, sd.segments[0].0, nu(0), sigma))
        .collect();

    for k in 1..m - 1 {
        let t = sd.segments[k].0;
        let v = nu(k);
        let mut next = vec![T::zero(); n];
        for (i, out) in next.iter_mut().enumerate() {
            let mut acc = T::zero();
            for j in 0..n {
                if dens[j] == T::zero() {
                    continue;
                }
                let w = trap(j) * dens[j];
                acc = acc + w * transition_density(u[i] - u[j], b - u[j], t, v, sigma);
            }
            *out = acc * h;
        }
        dens = next;
    }

    let (t_last, v_last) = (sd.segments[m - 1].0, nu(m - 1));
    let mut acc = T::zero();
    for j in 0..n {
        if dens[j] == T::zero() {
            continue;
        }
        let gap = (b - u[j]).max(T::zero());
        acc = acc + trap(j) * dens[j] * running_max_cdf(gap, t_last, v_last, sigma)?;
    }
    Ok((acc * h).max(T::zero()).min(T::one()))
}

/// P(M_*(a_i) ≤ x_i, i = 1..n) for a reduced constraint set.
pub fn joint_cdf_nd<T: Real>(cs: &ConstraintSet<T>, grid_n: usize) -> Result<T> {
    if !cs.is_reduced() {
        return Err(Error::InvalidInput(
            "constraint set is not reduced; call reduce() first".into(),
        ));
    }
    let e = cs.entries();
    let sigma = cs.sigma();
    let last = e[e.len() - 1];
    if e.len() == 1 {
        return Ok(exp_max_cdf(last.x, last.nu, sigma));
    }
    if last.nu == T::zero() {
        return Ok(T::zero());
    }
    let pu = piecewise_max_cdf(&cs.segmented_drift(false), sigma, grid_n)?;
    let pv = piecewise_max_cdf(&cs.segmented_drift(true), sigma, grid_n)?;
    let w = (-T::lit(2.0) * last.nu * last.x / (sigma * sigma)).exp();
    Ok((pu - w * pv).max(T::zero()).min(T::one()))
}

/// Reduces arbitrary constraints and evaluates their joint CDF.
pub fn joint_cdf_raw<T: Real>(cs: &ConstraintSet<T>, grid_n: usize) -> Result<T> {
    joint_cdf_nd(&cs.reduce().reduced, grid_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(nus: &[f64], xs: &[f64]) -> ConstraintSet<f64> {
        ConstraintSet::from_drifts(nus, xs, 1.0).unwrap()
    }

    #[test]
    fn reduction_examples() {
        let r = cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, 4.0]).reduce();
        assert_eq!(r.removed, vec![1]);
        assert_eq!(r.reduced.len(), 2);
        let r = cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, 6.0]).reduce();
        assert!(r.removed.is_empty());
        assert_eq!(r.reduced.taus(), vec![2.0, 3.0]);
        let r = cs(&[2.0, 1.0], &[2.0, 1.0]).reduce();
        assert_eq!(r.removed, vec![0]);
        assert_eq!(r.reduced.entries()[0].x, 1.0);
    }

    #[test]
    fn tie_drops_middle_line() {
        // τ between lines 1,2 is 1 and between 2,3 is 1.
        let r = cs(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0]).reduce();
        assert_eq!(r.removed, vec![1]);
    }

    #[test]
    fn single_segment_is_closed_form() {
        let sd = SegmentedDrift {
            segments: vec![(1.5, -2.0)],
            barrier: 0.7,
            boost: 0.0,
        };
        let v = piecewise_max_cdf(&sd, 1.0, 256).unwrap();
        assert_eq!(v, running_max_cdf(0.7, 1.5, 2.0, 1.0).unwrap());
    }

    #[test]
    fn split_segment_matches_closed_form() {
        let sd = SegmentedDrift {
            segments: vec![(0.6, -2.0), (0.4, -2.0), (0.5, -2.0)],
            barrier: 0.7,
            boost: 0.0,
        };
        let v = piecewise_max_cdf(&sd, 1.0, DEFAULT_GRID_N).unwrap();
        let exact: f64 = running_max_cdf(0.7, 1.5, 2.0, 1.0).unwrap();
        assert!((v - exact).abs() < 1e-6, "{v} vs {exact}");
    }

    #[test]
    fn one_constraint_is_exponential() {
        let v = joint_cdf_nd(&cs(&[2.0], &[0.5]), DEFAULT_GRID_N).unwrap();
        assert!((v - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn rejects_unreduced() {
        assert!(joint_cdf_nd(&cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, 4.0]), DEFAULT_GRID_N).is_err());
    }
}
