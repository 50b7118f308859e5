//! Drift functions μ(·) and the diffusion coefficient σ.
//!
//! Three families are supported: the SRPT heavy-traffic drift
//! μ(a) = κ + λ̃·a^{−p}, the power law μ(a) = c₀ + c₁·a^{−q}, and a tabulated
//! drift interpolated piecewise-linearly between knots with power-law
//! extrapolation on both sides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::scalar::Real;

/// Upper end of the quadrature range in [`DriftSpec::check_mass_integrability`].
pub const A_MAX: f64 = 1e6;
/// Partial sums above this value are reported as divergent.
pub const MASS_CAP: f64 = 1e8;

/// Family-specific parameters of a drift function.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftKind<T> {
    /// μ(a) = κ + λ̃·a^{−p}.
    Srpt { kappa: T, lambda_tilde: T, p: T },
    /// μ(a) = c₀ + c₁·a^{−q}.
    PowerLaw { c0: T, c1: T, q: T },
    /// Knots (a, μ(a)) with a strictly increasing and μ strictly decreasing.
    Tabulated(Tabulated<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    knots: Vec<(T, T)>,
    mu_inf: T,
    /// μ(a) ∝ a^{−s_left} below the first knot.
    s_left: T,
    /// μ(a) − μ(∞) ∝ a^{−s_right} above the last knot.
    s_right: T,
}

impl<T: Real> Tabulated<T> {
    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    fn eval(&self, a: T) -> T {
        let (a0, m0) = self.knots[0];
        let (an, mn) = self.knots[self.knots.len() - 1];
        if a <= a0 {
            return m0 * (a / a0).powf(-self.s_left);
        }
        if a >= an {
            return self.mu_inf + (mn - self.mu_inf) * (a / an).powf(-self.s_right);
        }
        let i = self.knots.partition_point(|k| k.0 <= a);
        let (al, ml) = self.knots[i - 1];
        let (ar, mr) = self.knots[i];
        ml + (mr - ml) * (a - al) / (ar - al)
    }
}

/// A drift function together with σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawDrift<T>",
    into = "RawDrift<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct DriftSpec<T> {
    sigma: T,
    kind: DriftKind<T>,
}

/// Result of [`DriftSpec::check_mass_integrability`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassCheck<T> {
    pub holds: bool,
    /// ∫₀^∞ da/(a²μ(a)); infinite when divergent.
    pub value: T,
}

fn positive<T: Real>(name: &str, v: T) -> Result<T> {
    if v.is_finite() && v > T::zero() {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn nonneg<T: Real>(name: &str, v: T) -> Result<T> {
    if v.is_finite() && v >= T::zero() {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be nonnegative and finite, got {v}"
        )))
    }
}

impl<T: Real> DriftSpec<T> {
    pub fn srpt(sigma: T, kappa: T, lambda_tilde: T, p: T) -> Result<Self> {
        positive("sigma", sigma)?;
        positive("kappa", kappa)?;
        positive("lambda_tilde", lambda_tilde)?;
        if !(p.is_finite() && p > T::one()) {
            return Err(Error::InvalidInput(format!("p must exceed 1, got {p}")));
        }
        Ok(Self {
            sigma,
            kind: DriftKind::Srpt {
                kappa,
                lambda_tilde,
                p,
            },
        })
    }

    pub fn power_law(sigma: T, c0: T, c1: T, q: T) -> Result<Self> {
        positive("sigma", sigma)?;
        nonneg("c0", c0)?;
        positive("c1", c1)?;
        positive("q", q)?;
        Ok(Self {
            sigma,
            kind: DriftKind::PowerLaw { c0, c1, q },
        })
    }

    pub fn tabulated(sigma: T, knots: Vec<(T, T)>, mu_inf: T) -> Result<Self> {
        positive("sigma", sigma)?;
        nonneg("mu_inf", mu_inf)?;
        if knots.len() < 2 {
            return Err(Error::InvalidInput(
                "tabulated drift needs at least two knots".into(),
            ));
        }
        for (i, &(a, m)) in knots.iter().enumerate() {
            positive("knot abscissa", a)?;
            positive("knot value", m)?;
            if m <= mu_inf {
                return Err(Error::InvalidInput(format!(
                    "knot {i}: mu={m} must exceed mu_inf={mu_inf}"
                )));
            }
            if i > 0 && !(a > knots[i - 1].0 && m < knots[i - 1].1) {
                return Err(Error::InvalidInput(format!(
                    "knot {i}: abscissae must increase and values strictly decrease"
                )));
            }
        }
        let (a0, m0) = knots[0];
        let (a1, m1) = knots[1];
        let s_left = (m0 / m1).ln() / (a1 / a0).ln();
        let n = knots.len();
        let (ap, mp) = knots[n - 2];
        let (an, mn) = knots[n - 1];
        let s_right = ((mp - mu_inf) / (mn - mu_inf)).ln() / (an / ap).ln();
        Ok(Self {
            sigma,
            kind: DriftKind::Tabulated(Tabulated {
                knots,
                mu_inf,
                s_left,
                s_right,
            }),
        })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn kind(&self) -> &DriftKind<T> {
        &self.kind
    }

    /// μ(∞).
    pub fn mu_inf(&self) -> T {
        match &self.kind {
            DriftKind::Srpt { kappa, .. } => *kappa,
            DriftKind::PowerLaw { c0, .. } => *c0,
            DriftKind::Tabulated(t) => t.mu_inf,
        }
    }

    /// μ(a) for a ∈ (0, ∞]. a = 0 is a domain error (μ diverges there).
    pub fn mu_at(&self, a: T) -> Result<T> {
        if a.is_nan() || a <= T::zero() {
            return Err(Error::domain(
                "mu_at",
                format!("size must be positive or +inf, got {a}"),
            ));
        }
        if a.is_infinite() {
            return Ok(self.mu_inf());
        }
        Ok(match &self.kind {
            DriftKind::Srpt {
                kappa,
                lambda_tilde,
                p,
            } => *kappa + *lambda_tilde * a.powf(-*p),
            DriftKind::PowerLaw { c0, c1, q } => *c0 + *c1 * a.powf(-*q),
            DriftKind::Tabulated(t) => t.eval(a),
        })
    }

    /// Power-law exponents (near 0, near ∞) of μ: μ(a) ~ a^{−lo} as a → 0 and
    /// μ(a) − μ(∞) ~ a^{−hi} as a → ∞.
    fn exponents(&self) -> (T, T) {
        match &self.kind {
            DriftKind::Srpt { p, .. } => (*p, *p),
            DriftKind::PowerLaw { q, .. } => (*q, *q),
            DriftKind::Tabulated(t) => (t.s_left, t.s_right),
        }
    }

    /// ∫₀^∞ da/(a²μ(a)) < ∞, the condition under which the measure of the
    /// maximum process is finite.
    pub fn check_mass_integrability(&self) -> MassCheck<T> {
        self.check_mass_integrability_with(T::lit(MASS_CAP))
    }

    pub fn check_mass_integrability_with(&self, cap: T) -> MassCheck<T> {
        let diverges = MassCheck {
            holds: false,
            value: T::infinity(),
        };
        if let DriftKind::Srpt {
            kappa,
            lambda_tilde,
            p,
        } = &self.kind
        {
            let (k, l, p) = (*kappa, *lambda_tilde, *p);
            let pi_p = T::PI() / p;
            let value = (k / l).powf(T::one() / p) / k * pi_p / pi_p.sin();
            return MassCheck { holds: true, value };
        }
        // In y = ln a the integrand is e^{−y}/μ(e^y).
        let h = |y: T| {
            let a = y.exp();
            match self.mu_at(a) {
                Ok(m) => (-y).exp() / m,
                Err(_) => T::nan(),
            }
        };
        let ten = T::lit(10.0).ln();
        let tol = Tolerance::new(1e-14, 1e-11);
        let piece = |lo: T, hi: T| integrate(h, lo, hi, tol).map(|r| r.value);

        let mut a_hi = T::lit(A_MAX);
        if let DriftKind::Tabulated(t) = &self.kind {
            a_hi = a_hi.max(t.knots[t.knots.len() - 1].0);
        }
        let Ok(mut total) = piece(T::zero(), a_hi.ln()) else {
            return diverges;
        };

        // Left end: decade-by-decade partial sums, geometric extrapolation.
        let mut prev_inc = T::zero();
        let mut inc = T::zero();
        let mut settled = false;
        for k in 0..30 {
            let hi = -T::lit(k as f64) * ten;
            let Ok(v) = piece(hi - ten, hi) else {
                return diverges;
            };
            prev_inc = inc;
            inc = v;
            total = total + v;
            if !total.is_finite() || total > cap {
                return diverges;
            }
            if k >= 2 && inc <= T::lit(1e-13) * total {
                settled = true;
                break;
            }
        }
        if !settled {
            let r = inc / prev_inc;
            if !(r < T::lit(0.999)) {
                return diverges;
            }
            total = total + inc * r / (T::one() - r);
        }

        // Right tail beyond a_hi.
        let mu_inf = self.mu_inf();
        let tail = if mu_inf > T::zero() {
            T::one() / (a_hi * mu_inf)
        } else {
            let (_, s) = self.exponents();
            if s >= T::one() {
                return diverges;
            }
            // 1/(a²μ(a)) = a^{s−2}/(μ(a_hi)·a_hi^s) beyond a_hi.
            let m = match self.mu_at(a_hi) {
                Ok(m) => m,
                Err(_) => return diverges,
            };
            T::one() / (m * a_hi * (T::one() - s))
        };
        total = total + tail;
        if total > cap {
            return diverges;
        }
        MassCheck {
            holds: true,
            value: total,
        }
    }

    /// Whether ∫₀¹ x^{−2γ}μ(x)^{−γ}dx and ∫₁^∞ x^{−γ}μ(x)^{−γ}dx are both
    /// finite, the hypothesis for convergence of the γ-th moment of the total
    /// mass. For γ = 1 this reduces to [`Self::check_mass_integrability`].
    ///
    /// Decided by power counting on the exact asymptotics of each family.
    pub fn check_higher_moment_integrability(&self, gamma: T) -> bool {
        if !(gamma >= T::one()) {
            return false;
        }
        if gamma == T::one() {
            return self.check_mass_integrability().holds;
        }
        let (lo, hi) = self.exponents();
        let two = T::lit(2.0);
        // Near 0 the integrand behaves like x^{γ(lo−2)}.
        let left = gamma * (lo - two) > -T::one();
        // Near ∞: x^{−γ} if μ(∞) > 0, else x^{γ(hi−1)}.
        let right = if self.mu_inf() > T::zero() {
            true
        } else {
            gamma * (hi - T::one()) < -T::one()
        };
        left && right
    }
}

/// Serialized form: `{sigma, kind, <family parameters>, mu_inf}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDrift<T> {
    pub sigma: T,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_tilde: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<(T, T)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_inf: Option<T>,
}

fn need<T>(v: Option<T>, kind: &str, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidInput(format!("drift kind '{kind}' requires '{key}'")))
}

impl<T: Real> TryFrom<RawDrift<T>> for DriftSpec<T> {
    type Error = Error;

    fn try_from(r: RawDrift<T>) -> Result<Self> {
        let kind = r.kind.as_str();
        let unexpected = |present: &[(&str, bool)]| -> Result<()> {
            match present.iter().find(|(_, p)| *p) {
                Some((k, _)) => Err(Error::InvalidInput(format!(
                    "key '{k}' is not valid for drift kind '{kind}'"
                ))),
                None => Ok(()),
            }
        };
        let spec = match kind {
            "srpt" => {
                unexpected(&[
                    ("c0", r.c0.is_some()),
                    ("c1", r.c1.is_some()),
                    ("q", r.q.is_some()),
                    ("knots", r.knots.is_some()),
                ])?;
                Self::srpt(
                    r.sigma,
                    need(r.kappa, kind, "kappa")?,
                    need(r.lambda_tilde, kind, "lambda_tilde")?,
                    need(r.p, kind, "p")?,
                )?
            }
            "power_law" => {
                unexpected(&[
                    ("kappa", r.kappa.is_some()),
                    ("lambda_tilde", r.lambda_tilde.is_some()),
                    ("p", r.p.is_some()),
                    ("knots", r.knots.is_some()),
                ])?;
                Self::power_law(
                    r.sigma,
                    need(r.c0, kind, "c0")?,
                    need(r.c1, kind, "c1")?,
                    need(r.q, kind, "q")?,
                )?
            }
            "tabulated" => {
                unexpected(&[
                    ("kappa", r.kappa.is_some()),
                    ("lambda_tilde", r.lambda_tilde.is_some()),
                    ("p", r.p.is_some()),
                    ("c0", r.c0.is_some()),
                    ("c1", r.c1.is_some()),
                    ("q", r.q.is_some()),
                ])?;
                return Self::tabulated(
                    r.sigma,
                    need(r.knots, kind, "knots")?,
                    need(r.mu_inf, kind, "mu_inf")?,
                );
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown drift kind '{other}' (expected srpt, power_law or tabulated)"
                )))
            }
        };
        if let Some(m) = r.mu_inf {
            if m != spec.mu_inf() {
                return Err(Error::InvalidInput(format!(
                    "mu_inf={m} contradicts the {kind} parameters (mu_inf={})",
                    spec.mu_inf()
                )));
            }
        }
        Ok(spec)
    }
}

impl<T: Real> From<DriftSpec<T>> for RawDrift<T> {
    fn from(d: DriftSpec<T>) -> Self {
        let mu_inf = Some(d.mu_inf());
        let mut r = RawDrift {
            sigma: d.sigma,
            kind: String::new(),
            kappa: None,
            lambda_tilde: None,
            p: None,
            c0: None,
            c1: None,
            q: None,
            knots: None,
            mu_inf,
        };
        match d.kind {
            DriftKind::Srpt {
                kappa,
                lambda_tilde,
                p,
            } => {
                r.kind = "srpt".into();
                r.kappa = Some(kappa);
                r.lambda_tilde = Some(lambda_tilde);
                r.p = Some(p);
            }
            DriftKind::PowerLaw { c0, c1, q } => {
                r.kind = "power_law".into();
                r.c0 = Some(c0);
                r.c1 = Some(c1);
                r.q = Some(q);
            }
            DriftKind::Tabulated(t) => {
                r.kind = "tabulated".into();
                r.knots = Some(t.knots);
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn srpt_values() {
        let d = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(d.mu_at(1.0).unwrap(), 2.0);
        assert_eq!(d.mu_at(f64::INFINITY).unwrap(), 1.0);
        assert!(d.mu_at(0.0).is_err());
        let d = DriftSpec::srpt(1.0, 2.0, 3.0, 1.5).unwrap();
        assert!((d.mu_at(4.0_f64).unwrap() - 2.375).abs() < 1e-15);
    }

    #[test]
    fn srpt_mass_is_analytic() {
        let d = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0).unwrap();
        let m = d.check_mass_integrability();
        assert!(m.holds);
        assert!((m.value - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn power_law_quadrature_matches_srpt() {
        // Same function as SRPT(1, 1, 2), evaluated by quadrature.
        let d = DriftSpec::power_law(1.0, 1.0, 1.0, 2.0).unwrap();
        let m = d.check_mass_integrability();
        assert!(m.holds);
        // The tail term is a bound, of size 1/A_MAX.
        assert!(
            (m.value - std::f64::consts::FRAC_PI_2).abs() < 2e-6,
            "{}",
            m.value
        );
    }

    #[test]
    fn divergent_near_zero() {
        let d = DriftSpec::power_law(1.0, 0.0, 1.0, 0.5).unwrap();
        assert!(!d.check_mass_integrability().holds);
        // log-divergent: μ = 1/a
        let d = DriftSpec::power_law(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(!d.check_mass_integrability().holds);
    }

    #[test]
    fn zero_mu_inf_tail() {
        // μ = a^{−1/2} + a^{−3/2}: integrable at 0 and, since q_tail < 1, at ∞.
        let d = DriftSpec::tabulated(1.0, vec![(0.01, 1010.0), (1.0, 2.0), (100.0, 0.101)], 0.0)
            .unwrap();
        assert!(d.check_mass_integrability().holds);
    }

    #[test]
    fn higher_moments() {
        let d = DriftSpec::srpt(1.0, 1.0, 1.0, 1.5).unwrap();
        assert!(d.check_higher_moment_integrability(1.9));
        assert!(!d.check_higher_moment_integrability(2.5));
        let d = DriftSpec::srpt(1.0, 1.0, 1.0, 3.0).unwrap();
        assert!(d.check_higher_moment_integrability(10.0));
        assert!(d.check_higher_moment_integrability(1.0));
    }

    #[test]
    fn tabulated_interpolation() {
        let d = DriftSpec::tabulated(1.0, vec![(1.0, 4.0), (2.0, 2.0), (4.0, 1.5)], 1.0).unwrap();
        assert_eq!(d.mu_at(1.5).unwrap(), 3.0);
        assert_eq!(d.mu_at(2.0).unwrap(), 2.0);
        // left extrapolation exponent ln2/ln2 = 1
        assert!((d.mu_at(0.5_f64).unwrap() - 8.0).abs() < 1e-12);
        // right: excess 1 → 0.5 over a doubling, s = 1
        assert!((d.mu_at(8.0_f64).unwrap() - 1.25).abs() < 1e-12);
        assert!(DriftSpec::tabulated(1.0, vec![(1.0, 4.0), (2.0, 5.0)], 1.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DriftSpec::srpt(1.0, 1.0, 1.0, 0.5).is_err());
        assert!(DriftSpec::srpt(0.0, 1.0, 1.0, 2.0).is_err());
        assert!(DriftSpec::power_law(1.0, -1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn f32_spec() {
        let d = DriftSpec::<f32>::srpt(1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(d.mu_at(1.0).unwrap(), 2.0);
    }
}
