//! The measure ⟨1_[0,a], 𝓜⟩ = ∫₀^a g(x)/x² dx + g(a)/a built from a
//! nondecreasing field g, and closed-form moments of the SRPT total mass
//! Z̃_* = ∫₀^∞ M̃_*(x)/x² dx.

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The measure of [0, a] at each evaluation point, plus the total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSnapshot<T> {
    pub a_grid: Vec<T>,
    pub cdf_values: Vec<T>,
    pub total_mass: T,
    /// Mass attributed to (0, x₀) below the first grid point.
    pub left_tail: T,
    /// Mass attributed to (x_K, ∞) beyond the last grid point.
    pub right_tail: T,
}

/// Treatment of the range below the first grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftTail<T> {
    /// Extend g as a power law fitted to the first two grid points; the
    /// exponent must exceed 1.
    PowerLaw,
    /// Use the given value of ∫₀^{x₀} g(x)/x² dx.
    Given(T),
}

/// ∫ (α + βx)/x² dx over [x0, x1] for the chord through (x0, g0), (x1, g1).
fn chord_integral<T: Real>(x0: T, g0: T, x1: T, g1: T) -> T {
    if x1 <= x0 {
        return T::zero();
    }
    let beta = (g1 - g0) / (x1 - x0);
    let alpha = g0 - beta * x0;
    alpha * (x1 - x0) / (x0 * x1) + beta * (x1 / x0).ln()
}

/// Builds the measure from samples `g` of a nondecreasing, nonnegative field
/// on the strictly increasing positive grid `x`, interpolated linearly.
///
/// `g_inf` is g(∞) for the right tail g(∞)/x_K; `None` uses the last sample.
/// Evaluation points must lie inside [x₀, x_K].
pub fn field_to_measure<T: Real>(
    x: &[T],
    g: &[T],
    a_eval: &[T],
    left: LeftTail<T>,
    g_inf: Option<T>,
) -> Result<MeasureSnapshot<T>> {
    let n = x.len();
    if n < 2 || g.len() != n {
        return Err(Error::InvalidInput(
            "need at least two grid points with matching values".into(),
        ));
    }
    for i in 0..n {
        if !(x[i] > T::zero() && x[i].is_finite()) || (i > 0 && !(x[i] > x[i - 1])) {
            return Err(Error::InvalidInput(format!(
                "grid must be positive and strictly increasing at {i}"
            )));
        }
        if !(g[i] >= T::zero()) || (i > 0 && g[i] < g[i - 1]) {
            return Err(Error::InvalidInput(format!(
                "field must be nonnegative and nondecreasing, violated at index {i}"
            )));
        }
    }
    let left_tail = match left {
        LeftTail::Given(v) => v,
        LeftTail::PowerLaw => {
            if g[0] == T::zero() {
                T::zero()
            } else {
                let s = (g[1] / g[0]).ln() / (x[1] / x[0]).ln();
                if !(s > T::one()) {
                    return Err(Error::InvalidInput(format!(
                        "left power-law exponent {s} does not exceed 1; g(x)/x² is not integrable at 0"
                    )));
                }
                g[0] / (x[0] * (s - T::one()))
            }
        }
    };
    let g_end = g_inf.unwrap_or(g[n - 1]);
    if g_end < g[n - 1] {
        return Err(Error::InvalidInput("g(inf) below the last sample".into()));
    }
    let right_tail = g_end / x[n - 1];

    let mut cum = Vec::with_capacity(n);
    cum.push(left_tail);
    for i in 1..n {
        let c = cum[i - 1] + chord_integral(x[i - 1], g[i - 1], x[i], g[i]);
        cum.push(c);
    }

    let mut cdf_values = Vec::with_capacity(a_eval.len());
    for &a in a_eval {
        if !(a >= x[0] && a <= x[n - 1]) {
            return Err(Error::InvalidInput(format!(
                "evaluation point {a} outside the grid"
            )));
        }
        let i = x.partition_point(|&xi| xi <= a).clamp(1, n - 1);
        let (x0, x1) = (x[i - 1], x[i]);
        let ga = g[i - 1] + (g[i] - g[i - 1]) * (a - x0) / (x1 - x0);
        let v = cum[i - 1] + chord_integral(x0, g[i - 1], a, ga) + ga / a;
        cdf_values.push(v);
    }
    Ok(MeasureSnapshot {
        a_grid: a_eval.to_vec(),
        cdf_values,
        total_mass: cum[n - 1] + right_tail,
        left_tail,
        right_tail,
    })
}

/// Parameters of the SRPT heavy-traffic limit: drift μ̃(a) = κ + λ̃a^{−p}
/// and diffusion coefficient σ̃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrptParams<T> {
    pub kappa: T,
    pub lambda_tilde: T,
    pub p: T,
    pub sigma_tilde: T,
}

impl<T: Real> SrptParams<T> {
    pub fn new(kappa: T, lambda_tilde: T, p: T, sigma_tilde: T) -> Result<Self> {
        if !(p.is_finite() && p > T::one()) {
            return Err(Error::domain(
                "SrptParams",
                format!("p must exceed 1, got {p}"),
            ));
        }
        for (name, v) in [
            ("kappa", kappa),
            ("lambda_tilde", lambda_tilde),
            ("sigma_tilde", sigma_tilde),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::domain(
                    "SrptParams",
                    format!("{name} must be positive, got {v}"),
                ));
            }
        }
        Ok(Self {
            kappa,
            lambda_tilde,
            p,
            sigma_tilde,
        })
    }

    pub fn drift(&self) -> DriftSpec<T> {
        DriftSpec::srpt(self.sigma_tilde, self.kappa, self.lambda_tilde, self.p)
            .expect("validated SRPT parameters")
    }

    /// (λ̃/κ)^{1/p}, the size at which the two terms of μ̃ balance.
    pub fn natural_scale(&self) -> T {
        (self.lambda_tilde / self.kappa).powf(T::one() / self.p)
    }
}

/// θ/sin θ, equal to 1 at 0.
fn theta_over_sin<T: Real>(theta: T) -> T {
    if theta.abs() < T::lit(1e-4) {
        let t2 = theta * theta;
        T::one() + t2 / T::lit(6.0) + T::lit(7.0) * t2 * t2 / T::lit(360.0)
    } else {
        theta / theta.sin()
    }
}

/// E[Z̃_*] = (σ̃²/2κ)(κ/λ̃)^{1/p}·(π/p)/sin(π/p).
pub fn srpt_mean_zstar<T: Real>(sp: &SrptParams<T>) -> T {
    let p = sp.p;
    let s2 = sp.sigma_tilde * sp.sigma_tilde;
    s2 / (T::lit(2.0) * sp.kappa)
        * (sp.kappa / sp.lambda_tilde).powf(T::one() / p)
        * theta_over_sin(T::PI() / p)
}

/// Var[Z̃_*] obtained by integrating the two-point covariance of M̃_*:
///
/// ```text
/// (σ̃⁴/4κ²)(κ/λ̃)^{2/p} · 2(p+2)(p−2)/(p²(p+1)) · π/sin(2π/p),
/// ```
///
/// equal to σ̃⁴/(3κλ̃) at p = 2.
pub fn srpt_var_zstar<T: Real>(sp: &SrptParams<T>) -> T {
    let p = sp.p;
    let two = T::lit(2.0);
    let s4 = sp.sigma_tilde.powi(4);
    // (p−2)π/sin(2π/p) = p·θ/sin θ with θ = π(p−2)/p.
    let theta = T::PI() * (p - two) / p;
    s4 / (T::lit(4.0) * sp.kappa * sp.kappa)
        * (sp.kappa / sp.lambda_tilde).powf(two / p)
        * two
        * (p + two)
        / (p * (p + T::one()))
        * theta_over_sin(theta)
}

/// The variance expression as printed in the source literature:
///
/// ```text
/// (σ̃⁴/4κ²)(κ/λ̃)^{2/p} · (p²+2p+2)/(p²(p+1)) · (π/p)/sin(π/p) · (p−2)/cos(π/p),
/// ```
///
/// with the p = 2 value 5σ̃⁴/(12κλ̃). It disagrees with the integral of the
/// two-point covariance (see [`srpt_var_zstar`]) and is kept for comparison.
pub fn published_var_zstar<T: Real>(sp: &SrptParams<T>) -> T {
    let p = sp.p;
    let two = T::lit(2.0);
    let s4 = sp.sigma_tilde.powi(4);
    // (p−2)/cos(π/p) = (2p/π)·φ/sin φ with φ = π(p−2)/(2p).
    let phi = T::PI() * (p - two) / (two * p);
    let ratio = two * p / T::PI() * theta_over_sin(phi);
    s4 / (T::lit(4.0) * sp.kappa * sp.kappa)
        * (sp.kappa / sp.lambda_tilde).powf(two / p)
        * (p * p + two * p + two)
        / (p * p * (p + T::one()))
        * theta_over_sin(T::PI() / p)
        * ratio
}

/// Cov(M̃_*(a₁), M̃_*(a₂) − M̃_*(a₁)) = σ̃⁴λ̃a₁^{2p}/(4(κa₁^p+λ̃)³)·(1 − a₁^p/a₂^p)
/// for 0 < a₁ ≤ a₂ ≤ ∞.
pub fn srpt_cov_increment<T: Real>(a1: T, a2: T, sp: &SrptParams<T>) -> Result<T> {
    if !(a1 > T::zero() && a1.is_finite() && a2 >= a1) {
        return Err(Error::domain(
            "srpt_cov_increment",
            format!("need 0 < a1 <= a2, got {a1}, {a2}"),
        ));
    }
    let p = sp.p;
    let r = a1.powf(-p);
    let denom = sp.kappa + sp.lambda_tilde * r;
    let ratio = if a2.is_infinite() {
        T::zero()
    } else {
        (a1 / a2).powf(p)
    };
    Ok(
        sp.sigma_tilde.powi(4) * sp.lambda_tilde * r / (T::lit(4.0) * denom * denom * denom)
            * (T::one() - ratio),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(p: f64) -> SrptParams<f64> {
        SrptParams::new(1.0, 1.0, p, 1.0).unwrap()
    }

    #[test]
    fn mean_examples() {
        assert!((srpt_mean_zstar(&unit(2.0)) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let p = 1.01;
        assert!(((p - 1.0) * srpt_mean_zstar(&unit(p)) / 0.5 - 1.0).abs() < 0.03);
        assert!((srpt_mean_zstar(&unit(1e6)) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn published_variance_examples() {
        assert!((published_var_zstar(&unit(2.0)) - 5.0 / 12.0).abs() < 1e-15);
        let lo = published_var_zstar(&unit(1.9));
        let hi = published_var_zstar(&unit(2.1));
        assert!((lo / (5.0 / 12.0) - 1.0).abs() < 0.1 && (hi / (5.0 / 12.0) - 1.0).abs() < 0.1);
        let p = 1.001;
        assert!(((p - 1.0) * published_var_zstar(&unit(p)) / 0.625 - 1.0).abs() < 0.01);
    }

    #[test]
    fn corrected_variance_values() {
        assert!((srpt_var_zstar(&unit(2.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((srpt_var_zstar(&unit(1.5)) - 0.564_293).abs() < 1e-6);
        assert!((srpt_var_zstar(&unit(3.0)) - 0.251_917).abs() < 1e-6);
    }

    #[test]
    fn cov_increment_limits() {
        let sp = unit(2.0);
        assert_eq!(srpt_cov_increment(1.5, 1.5, &sp).unwrap(), 0.0);
        let v = srpt_cov_increment(1.0, f64::INFINITY, &sp).unwrap();
        assert!((v - 1.0 / 32.0).abs() < 1e-16);
    }

    #[test]
    fn measure_of_quadratic() {
        let x: Vec<f64> = (0..=3000)
            .map(|i| 10f64.powf(-3.0 + 1e-3 * i as f64))
            .collect();
        let g: Vec<f64> = x.iter().map(|v| v * v).collect();
        let snap = field_to_measure(&x, &g, &[0.5, 1.0], LeftTail::PowerLaw, None).unwrap();
        assert!(
            (snap.cdf_values[0] - 1.0).abs() < 1e-6,
            "{:?}",
            snap.cdf_values
        );
        assert!(
            (snap.cdf_values[1] - 2.0).abs() < 1e-6,
            "{:?}",
            snap.cdf_values
        );
    }

    #[test]
    fn rejects_decreasing_field() {
        assert!(field_to_measure(&[1.0, 2.0], &[1.0, 0.5], &[], LeftTail::PowerLaw, None).is_err());
        assert!(
            field_to_measure(&[1.0, 2.0], &[-1.0, 0.5], &[], LeftTail::PowerLaw, None).is_err()
        );
    }
}
