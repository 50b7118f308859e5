//! Closed-form laws of the maximum process.
//!
//! For a Brownian motion with drift X_t = σB_t − νt the running maximum
//! M_t = sup_{s≤t} X_s has
//!
//! ```text
//! P(M_t ≤ x) = Φ((x + νt)/(σ√t)) − exp(−2νx/σ²)·Φ((−x + νt)/(σ√t)),
//! ```
//!
//! valid for every real ν. Letting t → ∞ with ν > 0 gives the exponential law
//! of M_*(a) with rate 2μ(a)/σ². The two-point law of (M_*(a₁), M_*(a₂)) is a
//! difference of two running-max CDFs on the finite horizon τ₁ at which the
//! constraint lines ν₁s + x₁ and ν₂s + x₂ cross.

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{exp_scaled_normal_cdf, gamma, std_normal_cdf, std_normal_pdf};

fn check_sigma<T: Real>(func: &'static str, sigma: T) -> Result<()> {
    if sigma.is_finite() && sigma > T::zero() {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("sigma must be positive, got {sigma}"),
        ))
    }
}

/// 1 − P(M_t ≤ x) computed as a sum of two nonnegative terms, accurate in the
/// upper tail where the CDF itself is close to 1.
pub fn running_max_sf<T: Real>(x: T, t: T, nu: T, sigma: T) -> Result<T> {
    check_sigma("running_max_sf", sigma)?;
    if x.is_nan() || x < T::zero() {
        return Err(Error::domain(
            "running_max_sf",
            format!("level must be nonnegative, got {x}"),
        ));
    }
    if t.is_nan() || t < T::zero() || nu.is_nan() {
        return Err(Error::domain(
            "running_max_sf",
            format!("invalid horizon {t} or drift {nu}"),
        ));
    }
    let s2 = sigma * sigma;
    let two = T::lit(2.0);
    if x.is_infinite() || t == T::zero() {
        return Ok(T::zero());
    }
    if t.is_infinite() {
        return Ok(if nu > T::zero() {
            (-two * nu * x / s2).exp()
        } else {
            T::one()
        });
    }
    let sd = sigma * t.sqrt();
    let z1 = (x + nu * t) / sd;
    let z2 = (nu * t - x) / sd;
    let v = std_normal_cdf(-z1) + exp_scaled_normal_cdf(-two * nu * x / s2, z2);
    Ok(v.min(T::one()).max(T::zero()))
}

/// P(sup_{s≤t}(σB_s − νs) ≤ x) for x ≥ 0, t ∈ [0, ∞], ν ∈ ℝ.
///
/// t = 0 gives 1. t = ∞ gives 1 − exp(−2νx/σ²) when ν > 0 and 0 otherwise.
pub fn running_max_cdf<T: Real>(x: T, t: T, nu: T, sigma: T) -> Result<T> {
    check_sigma("running_max_cdf", sigma)?;
    if x.is_nan() || x < T::zero() {
        return Err(Error::domain(
            "running_max_cdf",
            format!("level must be nonnegative, got {x}"),
        ));
    }
    if t.is_nan() || t < T::zero() || nu.is_nan() {
        return Err(Error::domain(
            "running_max_cdf",
            format!("invalid horizon {t} or drift {nu}"),
        ));
    }
    if x.is_infinite() || t == T::zero() {
        return Ok(T::one());
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let s2 = sigma * sigma;
    if t.is_infinite() {
        return Ok(if nu > T::zero() {
            -(-two * nu * x / s2).exp_m1()
        } else {
            T::zero()
        });
    }
    let sd = sigma * t.sqrt();
    let z1 = (x + nu * t) / sd;
    let z2 = (nu * t - x) / sd;
    let refl = exp_scaled_normal_cdf(-two * nu * x / s2, z2);
    let upper = std_normal_cdf(-z1);
    // Take whichever side avoids cancellation.
    let v = if upper + refl < T::lit(0.5) {
        T::one() - (upper + refl)
    } else {
        std_normal_cdf(z1) - refl
    };
    Ok(v.min(T::one()).max(T::zero()))
}

/// CDF of the exponential law of M_* for drift `nu`: 1 − exp(−2νx/σ²), or 0
/// when ν = 0.
pub fn exp_max_cdf<T: Real>(x: T, nu: T, sigma: T) -> T {
    if !(nu > T::zero()) || !(x > T::zero()) {
        return T::zero();
    }
    -(-T::lit(2.0) * nu * x / (sigma * sigma)).exp_m1()
}

/// P(M_*(a) ≤ x).
pub fn stationary_max_cdf<T: Real>(x: T, a: T, spec: &DriftSpec<T>) -> Result<T> {
    if x.is_nan() || x < T::zero() {
        return Err(Error::domain(
            "stationary_max_cdf",
            format!("level must be nonnegative, got {x}"),
        ));
    }
    Ok(exp_max_cdf(x, spec.mu_at(a)?, spec.sigma()))
}

/// E[M_*(a)^γ] = Γ(γ+1)·σ^{2γ}/(2μ(a))^γ.
pub fn stationary_max_moment<T: Real>(a: T, gamma_exp: T, spec: &DriftSpec<T>) -> Result<T> {
    let mu = spec.mu_at(a)?;
    exp_max_moment(mu, gamma_exp, spec.sigma())
}

/// γ-th moment of Exp(2ν/σ²).
pub fn exp_max_moment<T: Real>(nu: T, gamma_exp: T, sigma: T) -> Result<T> {
    if !(nu > T::zero()) {
        return Err(Error::domain(
            "stationary_max_moment",
            "drift must be positive",
        ));
    }
    if !(gamma_exp >= T::zero()) {
        return Err(Error::domain(
            "stationary_max_moment",
            format!("exponent must be nonnegative, got {gamma_exp}"),
        ));
    }
    let scale = sigma * sigma / (T::lit(2.0) * nu);
    Ok(gamma(gamma_exp + T::one()) * scale.powf(gamma_exp))
}

/// Smallest horizon T with sup_x |P(M_T ≤ x) − P(M_* ≤ x)| < `gap` for drift
/// `nu`, scanned over a quantile grid of the exponential limit law.
pub fn stationary_horizon<T: Real>(nu: T, sigma: T, gap: T) -> Result<T> {
    check_sigma("stationary_horizon", sigma)?;
    if !(nu > T::zero() && nu.is_finite()) {
        return Err(Error::domain(
            "stationary_horizon",
            format!("drift must be positive, got {nu}"),
        ));
    }
    if !(gap > T::zero() && gap < T::one()) {
        return Err(Error::domain(
            "stationary_horizon",
            format!("gap must lie in (0, 1), got {gap}"),
        ));
    }
    let rate = T::lit(2.0) * nu / (sigma * sigma);
    let q_n = 400;
    let mut xs: Vec<T> = (1..=q_n)
        .map(|i| -(-T::lit(i as f64 / (q_n + 1) as f64)).ln_1p() / rate)
        .collect();
    for k in 3..=14 {
        xs.push(T::lit(k as f64 * std::f64::consts::LN_10) / rate);
    }
    let dist = |t: T| -> Result<T> {
        let mut d = T::zero();
        for &x in &xs {
            let tail = (-rate * x).exp();
            d = d.max(tail - running_max_sf(x, t, nu, sigma)?);
        }
        Ok(d)
    };
    let mut lo = T::zero();
    let mut hi = sigma * sigma / (nu * nu);
    let mut it = 0;
    while dist(hi)? >= gap {
        lo = hi;
        hi = hi + hi;
        it += 1;
        if it > 200 {
            return Err(Error::domain(
                "stationary_horizon",
                "no finite horizon reaches the gap",
            ));
        }
    }
    for _ in 0..100 {
        if hi - lo <= T::lit(1e-6) * hi {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        if dist(mid)? >= gap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Two coordinates a₁ < a₂ of the maximum process with their drifts and
/// levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPoint<T> {
    pub a1: T,
    pub a2: T,
    pub nu1: T,
    pub nu2: T,
    pub x1: T,
    pub x2: T,
    pub sigma: T,
}

impl<T: Real> TwoPoint<T> {
    pub fn new(spec: &DriftSpec<T>, a1: T, a2: T, x1: T, x2: T) -> Result<Self> {
        if !(a1 < a2) {
            return Err(Error::InvalidInput(format!("need a1 < a2, got {a1}, {a2}")));
        }
        let mut tp = Self::from_drifts(spec.mu_at(a1)?, spec.mu_at(a2)?, x1, x2, spec.sigma())?;
        tp.a1 = a1;
        tp.a2 = a2;
        Ok(tp)
    }

    /// Two-point instance given the drifts directly (a₁, a₂ left as NaN).
    pub fn from_drifts(nu1: T, nu2: T, x1: T, x2: T, sigma: T) -> Result<Self> {
        check_sigma("TwoPoint", sigma)?;
        if !(nu1 > nu2 && nu2 >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "need nu1 > nu2 >= 0, got {nu1}, {nu2}"
            )));
        }
        if !(x1 >= T::zero() && x2 >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "levels must be nonnegative, got {x1}, {x2}"
            )));
        }
        Ok(Self {
            a1: T::nan(),
            a2: T::nan(),
            nu1,
            nu2,
            x1,
            x2,
            sigma,
        })
    }

    /// τ₁ = (x₂ − x₁)/(ν₁ − ν₂) when x₂ > x₁.
    pub fn tau1(&self) -> Option<T> {
        (self.x2 > self.x1).then(|| (self.x2 - self.x1) / (self.nu1 - self.nu2))
    }

    /// ζ₁ = ν₁ − 2ν₂, the drift of the process V.
    pub fn zeta1(&self) -> T {
        self.nu1 - T::lit(2.0) * self.nu2
    }
}

/// P(M_*(a₁) ≤ x₁, M_*(a₂) ≤ x₂).
pub fn joint_cdf_2d<T: Real>(tp: &TwoPoint<T>) -> Result<T> {
    let s = tp.sigma;
    let Some(tau) = tp.tau1() else {
        return Ok(exp_max_cdf(tp.x2, tp.nu2, s));
    };
    if tp.nu2 == T::zero() {
        return Ok(T::zero());
    }
    let first = running_max_cdf(tp.x1, tau, tp.nu1, s)?;
    let w = (-T::lit(2.0) * tp.nu2 * tp.x2 / (s * s)).exp();
    let second = running_max_cdf(tp.x1, tau, tp.zeta1(), s)?;
    let cap = exp_max_cdf(tp.x1, tp.nu1, s).min(exp_max_cdf(tp.x2, tp.nu2, s));
    Ok((first - w * second).max(T::zero()).min(cap))
}

/// P(M_{τ₁}(a₁) ≤ x₁ | M_*(a₂) > x₂), equal to the running-max CDF of drift
/// ζ₁ = ν₁ − 2ν₂ on [0, τ₁].
pub fn conditional_cdf_2d<T: Real>(tp: &TwoPoint<T>) -> Result<T> {
    let tau = tp
        .tau1()
        .ok_or_else(|| Error::domain("conditional_cdf_2d", "requires x2 > x1"))?;
    running_max_cdf(tp.x1, tau, tp.zeta1(), tp.sigma)
}

/// Density of (M_*^{ν₁}, M_*^{ν₂} − M_*^{ν₁}) at (x, z) with δ₁ = ν₁ − ν₂.
pub fn joint_density_g<T: Real>(x: T, z: T, nu1: T, delta1: T, sigma: T) -> T {
    if !(x > T::zero() && z > T::zero()) {
        return T::zero();
    }
    let two = T::lit(2.0);
    let s2 = sigma * sigma;
    let nu2 = nu1 - delta1;
    let root = (delta1 * z).sqrt();
    let arg1 = (x * delta1 + nu1 * z) / (sigma * root);
    let t1 = std_normal_pdf(arg1) * two * nu2 * delta1.sqrt() * (x + two * z)
        / (s2 * sigma * z * z.sqrt());
    let coef = T::lit(4.0) * nu2 * (two * delta1 - nu1) / (s2 * s2);
    let log_w = (-two * delta1 * x - two * nu2 * z) / s2;
    let arg2 = (-x * delta1 - (nu1 - two * delta1) * z) / (sigma * root);
    t1 + coef * exp_scaled_normal_cdf(log_w, arg2)
}

/// Density of (M_*^{ν₁}, M_*^{ν₂}) at (x₁, x₂), zero unless x₁ < x₂.
pub fn joint_density_h<T: Real>(x1: T, x2: T, nu1: T, nu2: T, sigma: T) -> T {
    joint_density_g(x1, x2 - x1, nu1, nu1 - nu2, sigma)
}

/// f_t^ν(u, x) = P(X_t ∈ du, M_t ≤ x)/du for X_t = σB_t − νt and u ≤ x.
pub fn transition_density<T: Real>(u: T, x: T, t: T, nu: T, sigma: T) -> T {
    if u > x || !(t > T::zero()) {
        return T::zero();
    }
    let sd = sigma * t.sqrt();
    let two = T::lit(2.0);
    let expo = (-two * nu * t * u - nu * nu * t * t) / (two * sigma * sigma * t);
    let a = u / sd;
    // φ(a) − φ(b) = φ(a)(1 − exp((a² − b²)/2)); a² − b² = −4x(x − u)/(σ²t) ≤ 0.
    let diff = -(-(two * x * (x - u)) / (sigma * sigma * t)).exp_m1();
    (expo - a * a / two).exp() * diff / (sd * (two * T::PI()).sqrt())
}

fn two_drifts<T: Real>(func: &'static str, a1: T, a2: T, spec: &DriftSpec<T>) -> Result<(T, T)> {
    if !(a1 <= a2) {
        return Err(Error::domain(
            func,
            format!("need a1 <= a2, got {a1}, {a2}"),
        ));
    }
    let mu1 = spec.mu_at(a1)?;
    let mu2 = spec.mu_at(a2)?;
    if !(mu2 > T::zero()) {
        return Err(Error::domain(func, "mu(a2) must be positive"));
    }
    Ok((mu1, mu2))
}

/// Cov(M_*(a₁), M_*(a₂)) = σ⁴/(4μ(a₁)²)·(2 − μ(a₂)/μ(a₁)) for a₁ ≤ a₂.
pub fn covariance<T: Real>(a1: T, a2: T, spec: &DriftSpec<T>) -> Result<T> {
    let (mu1, mu2) = two_drifts("covariance", a1, a2, spec)?;
    Ok(covariance_from_drifts(mu1, mu2, spec.sigma()))
}

pub fn covariance_from_drifts<T: Real>(mu1: T, mu2: T, sigma: T) -> T {
    let s2 = sigma * sigma;
    s2 * s2 / (T::lit(4.0) * mu1 * mu1) * (T::lit(2.0) - mu2 / mu1)
}

/// Corr(M_*(a₁), M_*(a₂)) = r(2 − r) with r = μ(a₂)/μ(a₁).
pub fn correlation<T: Real>(a1: T, a2: T, spec: &DriftSpec<T>) -> Result<T> {
    let (mu1, mu2) = two_drifts("correlation", a1, a2, spec)?;
    Ok(correlation_from_drifts(mu1, mu2))
}

pub fn correlation_from_drifts<T: Real>(mu1: T, mu2: T) -> T {
    let r = mu2 / mu1;
    r * (T::lit(2.0) - r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_max_examples() {
        let v: f64 = running_max_cdf(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((v - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert_eq!(running_max_cdf(0.0, 2.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(running_max_cdf(0.0, 0.0, 1.0, 1.0).unwrap(), 1.0);
        let v: f64 = running_max_cdf(1.0, f64::INFINITY, 1.0, 1.0).unwrap();
        assert!((v - 0.864_664_716_763_387_3).abs() < 1e-15);
        assert_eq!(running_max_cdf(1.0, f64::INFINITY, -1.0, 1.0).unwrap(), 0.0);
        assert!(running_max_cdf(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn large_horizon_approaches_exponential() {
        let v: f64 = running_max_cdf(1.0, 400.0, 1.0, 1.0).unwrap();
        assert!((v - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
        let sf: f64 = running_max_sf(30.0, 1e4, 1.0, 1.0).unwrap();
        assert!((sf / (-60.0f64).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stationary_examples() {
        let d = DriftSpec::power_law(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(
            (stationary_max_cdf(0.5_f64, 1.0, &d).unwrap() - 0.632_120_558_828_557_7).abs() < 1e-15
        );
        assert_eq!(stationary_max_cdf(0.0, 1.0, &d).unwrap(), 0.0);
        assert_eq!(stationary_max_cdf(3.0, f64::INFINITY, &d).unwrap(), 0.0);
    }

    #[test]
    fn moment_examples() {
        assert!((exp_max_moment(1.0_f64, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((exp_max_moment(1.0_f64, 2.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(
            (exp_max_moment(2.0_f64, 3.5, 1.0).unwrap() - 11.631_728_396_567_45 / 128.0).abs()
                < 1e-14
        );
        assert!(exp_max_moment(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn covariance_examples() {
        assert!((covariance_from_drifts(2.0_f64, 1.0, 1.0) - 0.093_75).abs() < 1e-16);
        assert!((covariance_from_drifts(2.0_f64, 2.0, 1.0) - 1.0 / 16.0).abs() < 1e-16);
        assert_eq!(correlation_from_drifts(2.0, 1.0), 0.75);
        assert_eq!(correlation_from_drifts(1.0, 1.0), 1.0);
        let d = DriftSpec::power_law(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(covariance(1.0, f64::INFINITY, &d).is_err());
    }

    #[test]
    fn joint_reductions() {
        let tp = TwoPoint::from_drifts(2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(joint_cdf_2d(&tp).unwrap(), exp_max_cdf(1.0, 1.0, 1.0));
        let tp = TwoPoint::from_drifts(2.0, 0.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(joint_cdf_2d(&tp).unwrap(), 0.0);
    }
}
