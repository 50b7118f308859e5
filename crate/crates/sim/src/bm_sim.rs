//! Coupled Brownian motions X_t(a) = w(a) + σB_t − μ(a)t driven by one noise,
//! their Skorokhod reflection, running maxima and coupling times.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rcbm_core::analytic::stationary_horizon;
use rcbm_core::DriftSpec;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fmt17;
use crate::rng::{replicate, stream};

/// Deterministic initial conditions w with w(0) = 0, nondecreasing and
/// continuous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Zero,
    /// w(a) = c(1 − e^{−a/scale}), w(∞) = c.
    Ramp {
        c: f64,
        scale: f64,
    },
    /// Linear interpolation through (0, 0) and the knots, constant after the
    /// last knot.
    Tabulated {
        knots: Vec<(f64, f64)>,
    },
}

impl InitialCondition {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::Zero => Ok(()),
            InitialCondition::Ramp { c, scale } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return invalid(format!("ramp height must be nonnegative, got {c}"));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return invalid(format!("ramp scale must be positive, got {scale}"));
                }
                Ok(())
            }
            InitialCondition::Tabulated { knots } => {
                let (mut pa, mut pw) = (0.0, 0.0);
                for &(a, w) in knots {
                    if !(a.is_finite() && a > pa) {
                        return invalid("tabulated knots must be positive and strictly increasing");
                    }
                    if !(w.is_finite() && w >= pw) {
                        return invalid("tabulated values must be nonnegative and nondecreasing");
                    }
                    (pa, pw) = (a, w);
                }
                Ok(())
            }
        }
    }

    /// w(a); a = ∞ gives w(∞).
    pub fn w(&self, a: f64) -> f64 {
        match self {
            InitialCondition::Zero => 0.0,
            InitialCondition::Ramp { c, scale } => {
                if a.is_infinite() {
                    *c
                } else {
                    -c * (-a / scale).exp_m1()
                }
            }
            InitialCondition::Tabulated { knots } => {
                let (mut pa, mut pw) = (0.0, 0.0);
                for &(ka, kw) in knots {
                    if a <= ka {
                        return pw + (kw - pw) * (a - pa) / (ka - pa);
                    }
                    (pa, pw) = (ka, kw);
                }
                pw
            }
        }
    }

    pub fn w_inf(&self) -> f64 {
        self.w(f64::INFINITY)
    }
}

/// Simulation switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldOptions {
    /// Resample each within-step extremum from the Brownian-bridge law.
    #[serde(default)]
    pub bridge: bool,
    /// Replace the driving noise by zero (debugging).
    #[serde(default)]
    pub zero_noise: bool,
}

/// One sampled path of the field on a grid of sizes and times.
#[derive(Debug, Clone, PartialEq)]
pub struct PathField {
    pub a_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Brownian increments σ-free: B_{t_{k+1}} − B_{t_k}.
    pub noise: Vec<f64>,
    /// chi[k][j] = χ_{t_k}(a_j).
    pub chi: Vec<Vec<f64>>,
    /// w_field[k][j] = W_{t_k}(a_j).
    pub w_field: Vec<Vec<f64>>,
}

impl PathField {
    /// Long-format CSV with columns t,a,chi,w.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,a,chi,w")?;
        for (k, t) in self.t_grid.iter().enumerate() {
            for (j, a) in self.a_grid.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt17(*t),
                    fmt17(*a),
                    fmt17(self.chi[k][j]),
                    fmt17(self.w_field[k][j])
                )?;
            }
        }
        Ok(())
    }
}

/// Discrete Skorokhod map: out[k] = path[k] − min(0, min_{i≤k} path[i]).
pub fn skorokhod_reflect(path: &[f64]) -> Result<Vec<f64>> {
    match path.first() {
        None => return invalid("empty path"),
        Some(&p0) if !(p0 >= 0.0) => {
            return invalid(format!("path must start nonnegative, got {p0}"))
        }
        _ => {}
    }
    let mut low: f64 = 0.0;
    Ok(path
        .iter()
        .map(|&x| {
            low = low.min(x);
            x - low
        })
        .collect())
}

/// Number of steps and the step actually used: T/dt rounded, at least one.
pub fn time_steps(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    if !(t_end >= dt && t_end.is_finite()) {
        return invalid(format!(
            "horizon {t_end} must be finite and at least dt = {dt}"
        ));
    }
    let k = (t_end / dt).round().max(1.0) as usize;
    Ok((k, t_end / k as f64))
}

/// Minimum of a Brownian bridge with variance rate s2 over a step of length
/// dt between x0 and x1, given an Exp(1) draw.
#[inline]
pub fn bridge_min(x0: f64, x1: f64, s2dt: f64, e: f64) -> f64 {
    let d = x1 - x0;
    0.5 * (x0 + x1 - (d * d + 2.0 * s2dt * e).sqrt())
}

/// Maximum of the same bridge.
#[inline]
pub fn bridge_max(x0: f64, x1: f64, s2dt: f64, e: f64) -> f64 {
    let d = x1 - x0;
    0.5 * (x0 + x1 + (d * d + 2.0 * s2dt * e).sqrt())
}

fn check_grid(a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() {
        return invalid("empty size grid");
    }
    for (i, &a) in a_grid.iter().enumerate() {
        if !(a > 0.0) || (i > 0 && !(a > a_grid[i - 1])) {
            return invalid(format!(
                "size grid must be positive and strictly increasing at {i}"
            ));
        }
    }
    Ok(())
}

/// Samples χ and W = Ψ[χ] on `a_grid` (which may end in ∞) over [0, T].
///
/// With `opts.bridge` the running minimum includes a bridge minimum per step,
/// drawn with one Exp(1) variate shared by all columns so the field stays
/// monotone in a.
pub fn sample_field(
    spec: &DriftSpec,
    init: &InitialCondition,
    a_grid: &[f64],
    t_end: f64,
    dt: f64,
    seed: u64,
    opts: FieldOptions,
) -> Result<PathField> {
    check_grid(a_grid)?;
    init.validate()?;
    let (k_steps, dt) = time_steps(t_end, dt)?;
    let sigma = spec.sigma();
    let mus: Vec<f64> = a_grid
        .iter()
        .map(|&a| spec.mu_at(a))
        .collect::<rcbm_core::Result<_>>()?;
    let ws: Vec<f64> = a_grid.iter().map(|&a| init.w(a)).collect();
    let mut rng = stream(seed, 0);
    let sqdt = dt.sqrt();
    let s2dt = sigma * sigma * dt;

    let mut t_grid = Vec::with_capacity(k_steps + 1);
    let mut noise = Vec::with_capacity(k_steps);
    let mut chi = Vec::with_capacity(k_steps + 1);
    let mut w_field = Vec::with_capacity(k_steps + 1);
    let mut low = vec![0.0f64; a_grid.len()];
    t_grid.push(0.0);
    chi.push(ws.clone());
    w_field.push(ws.clone());
    let mut b = 0.0;
    for k in 1..=k_steps {
        let z: f64 = rng.sample(StandardNormal);
        let e: f64 = if opts.bridge { rng.sample(Exp1) } else { 0.0 };
        let db = if opts.zero_noise { 0.0 } else { sqdt * z };
        noise.push(db);
        b += db;
        let t = k as f64 * dt;
        let prev = chi.last().unwrap().clone();
        let mut row = Vec::with_capacity(a_grid.len());
        let mut wrow = Vec::with_capacity(a_grid.len());
        for j in 0..a_grid.len() {
            let x = ws[j] + sigma * b - mus[j] * t;
            let step_low = if opts.bridge && !opts.zero_noise {
                bridge_min(prev[j], x, s2dt, e)
            } else {
                x
            };
            low[j] = low[j].min(step_low);
            row.push(x);
            wrow.push(x - low[j]);
        }
        t_grid.push(t);
        chi.push(row);
        w_field.push(wrow);
    }
    Ok(PathField {
        a_grid: a_grid.to_vec(),
        t_grid,
        noise,
        chi,
        w_field,
    })
}

/// Horizon T* for drift μ(a) and the given CDF gap.
pub fn horizon_for(spec: &DriftSpec, a: f64, cdf_gap: f64) -> Result<f64> {
    let mu = spec.mu_at(a)?;
    if !(mu > 0.0) {
        return invalid(format!(
            "drift at a = {a} is {mu}; the all-time maximum is infinite"
        ));
    }
    Ok(stationary_horizon(mu, spec.sigma(), cdf_gap)?)
}

/// Running maximum of σB_t − νt over `steps` steps of length dt.
pub fn euler_running_max<R: Rng + ?Sized>(
    nu: f64,
    sigma: f64,
    steps: usize,
    dt: f64,
    bridge: bool,
    rng: &mut R,
) -> f64 {
    let sqdt = sigma * dt.sqrt();
    let drift = nu * dt;
    let s2dt = sigma * sigma * dt;
    let (mut x, mut m) = (0.0f64, 0.0f64);
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        let x1 = x + sqdt * z - drift;
        let top = if bridge {
            let e: f64 = rng.sample(Exp1);
            bridge_max(x, x1, s2dt, e)
        } else {
            x1
        };
        m = m.max(top);
        x = x1;
    }
    m
}

/// Running maxima on nested grids: one fine path with step `dt`, read off
/// every `strides[i]` steps.
pub fn nested_running_max<R: Rng + ?Sized>(
    nu: f64,
    sigma: f64,
    steps: usize,
    dt: f64,
    strides: &[usize],
    rng: &mut R,
) -> Vec<f64> {
    let sqdt = sigma * dt.sqrt();
    let drift = nu * dt;
    let mut x = 0.0f64;
    let mut m = vec![0.0f64; strides.len()];
    for k in 1..=steps {
        let z: f64 = rng.sample(StandardNormal);
        x += sqdt * z - drift;
        for (mi, &s) in m.iter_mut().zip(strides) {
            if k % s == 0 {
                *mi = mi.max(x);
            }
        }
    }
    m
}

/// One draw of the running maximum over [0, T*] approximating M_*(a).
pub fn sample_stationary_max(
    spec: &DriftSpec,
    a: f64,
    cdf_gap: f64,
    dt: f64,
    seed: u64,
    bridge: bool,
) -> Result<f64> {
    Ok(sample_stationary_maxima(spec, a, cdf_gap, dt, 1, seed, bridge)?[0])
}

/// `n` independent draws of [`sample_stationary_max`]; draw i uses stream i.
pub fn sample_stationary_maxima(
    spec: &DriftSpec,
    a: f64,
    cdf_gap: f64,
    dt: f64,
    n: usize,
    seed: u64,
    bridge: bool,
) -> Result<Vec<f64>> {
    let t_star = horizon_for(spec, a, cdf_gap)?;
    let (steps, dt) = time_steps(t_star.max(dt), dt)?;
    let mu = spec.mu_at(a)?;
    let sigma = spec.sigma();
    Ok(replicate(n, seed, |_, rng| {
        euler_running_max(mu, sigma, steps, dt, bridge, rng)
    }))
}

/// First time χ_t(∞) = w(∞) + σB_t − μ(∞)t reaches 0, sampled on the grid.
fn coupling_time_path<R: Rng + ?Sized>(
    w: f64,
    mu: f64,
    sigma: f64,
    dt: f64,
    t_cap: f64,
    bridge: bool,
    rng: &mut R,
) -> Option<f64> {
    if w <= 0.0 {
        return Some(0.0);
    }
    let sqdt = sigma * dt.sqrt();
    let drift = mu * dt;
    let half_s2dt = 0.5 * sigma * sigma * dt;
    let max_steps = (t_cap / dt).ceil() as u64;
    let mut y = w;
    for k in 1..=max_steps {
        let z: f64 = rng.sample(StandardNormal);
        let y1 = y + sqdt * z - drift;
        let hit = y1 <= 0.0 || (bridge && y * y1 < half_s2dt * rng.sample::<f64, _>(Exp1));
        if hit {
            return Some(k as f64 * dt);
        }
        y = y1;
    }
    None
}

/// Coupling time T_∞^w; `None` when it exceeds `t_cap`.
///
/// With `bridge`, a crossing between grid points (drawn from the bridge law)
/// also counts and is reported at the end of its step.
pub fn detect_coupling_time(
    spec: &DriftSpec,
    init: &InitialCondition,
    dt: f64,
    seed: u64,
    t_cap: f64,
    bridge: bool,
) -> Result<Option<f64>> {
    Ok(coupling_times(spec, init, dt, t_cap, 1, seed, bridge)?[0])
}

/// `n` independent coupling times; path i uses stream i.
pub fn coupling_times(
    spec: &DriftSpec,
    init: &InitialCondition,
    dt: f64,
    t_cap: f64,
    n: usize,
    seed: u64,
    bridge: bool,
) -> Result<Vec<Option<f64>>> {
    init.validate()?;
    if !(dt > 0.0) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    let mu = spec.mu_inf();
    if !(mu >= 0.0) {
        return invalid("μ(∞) must be nonnegative");
    }
    let w = init.w_inf();
    let sigma = spec.sigma();
    Ok(replicate(n, seed, |_, rng| {
        coupling_time_path(w, mu, sigma, dt, t_cap, bridge, rng)
    }))
}

/// Fraction of paths with sup_a W_t(a) = 0 for some t ≤ T, for each horizon.
///
/// sup_a W_t(a) = W_t(∞), which first vanishes at the coupling time, so the
/// fraction is the empirical CDF of coupling times at each T.
pub fn mc_recurrence_fractions(
    spec: &DriftSpec,
    init: &InitialCondition,
    horizons: &[f64],
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_paths == 0 {
        return invalid("need at least one path");
    }
    let cap = horizons.iter().copied().fold(0.0, f64::max);
    let times = coupling_times(spec, init, dt, cap, n_paths, seed, false)?;
    Ok(horizons
        .iter()
        .map(|&h| {
            times
                .iter()
                .filter(|t| matches!(t, Some(s) if *s <= h))
                .count() as f64
                / n_paths as f64
        })
        .collect())
}

/// Single-horizon form of [`mc_recurrence_fractions`].
pub fn mc_recurrence_check(
    spec: &DriftSpec,
    init: &InitialCondition,
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<f64> {
    Ok(mc_recurrence_fractions(spec, init, &[t_end], dt, n_paths, seed)?[0])
}

/// Samples of W_t(a) at each time in `times` for each a in `a_list`, from
/// `n` independent field paths: out[i][j][k] is path k at (a_i, t_j).
#[allow(clippy::too_many_arguments)]
pub fn sample_field_marginals(
    spec: &DriftSpec,
    init: &InitialCondition,
    a_list: &[f64],
    times: &[f64],
    dt: f64,
    n: usize,
    seed: u64,
    bridge: bool,
) -> Result<Vec<Vec<Vec<f64>>>> {
    init.validate()?;
    if !(dt > 0.0) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    for w in times.windows(2) {
        if !(w[1] >= w[0]) {
            return invalid("times must be nondecreasing");
        }
    }
    if times.first().is_some_and(|&t| t < 0.0) {
        return invalid("times must be nonnegative");
    }
    let mus: Vec<f64> = a_list
        .iter()
        .map(|&a| spec.mu_at(a))
        .collect::<rcbm_core::Result<_>>()?;
    let ws: Vec<f64> = a_list.iter().map(|&a| init.w(a)).collect();
    let sigma = spec.sigma();
    let marks: Vec<usize> = times.iter().map(|&t| (t / dt).round() as usize).collect();
    let last = marks.last().copied().unwrap_or(0);
    let sqdt = sigma * dt.sqrt();
    let s2dt = sigma * sigma * dt;
    let paths = replicate(n, seed, |_, rng| {
        let na = mus.len();
        let mut out = vec![vec![0.0; marks.len()]; na];
        let mut x = ws.clone();
        let mut low = vec![0.0f64; na];
        let mut m = 0;
        let mut record = |k: usize, x: &[f64], low: &[f64], out: &mut Vec<Vec<f64>>| {
            while m < marks.len() && marks[m] == k {
                for i in 0..na {
                    out[i][m] = x[i] - low[i];
                }
                m += 1;
            }
        };
        record(0, &x, &low, &mut out);
        for k in 1..=last {
            let z: f64 = rng.sample(StandardNormal);
            let e: f64 = if bridge { rng.sample(Exp1) } else { 0.0 };
            let db = sqdt * z;
            for i in 0..na {
                let x1 = x[i] + db - mus[i] * dt;
                let step_low = if bridge {
                    bridge_min(x[i], x1, s2dt, e)
                } else {
                    x1
                };
                low[i] = low[i].min(step_low);
                x[i] = x1;
            }
            record(k, &x, &low, &mut out);
        }
        out
    });
    let mut res = vec![vec![Vec::with_capacity(n); times.len()]; a_list.len()];
    for p in paths {
        for (i, row) in p.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                res[i][j].push(v);
            }
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_examples() {
        assert_eq!(
            skorokhod_reflect(&[0.0, -1.0, -2.0]).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert_eq!(
            skorokhod_reflect(&[1.0, 0.5, -1.0, 0.0]).unwrap(),
            vec![1.0, 0.5, 0.0, 1.0]
        );
        assert!(skorokhod_reflect(&[-0.1]).is_err());
        assert!(skorokhod_reflect(&[]).is_err());
    }

    #[test]
    fn ramp_and_table() {
        let r = InitialCondition::Ramp { c: 2.0, scale: 1.0 };
        assert_eq!(r.w(0.0), 0.0);
        assert_eq!(r.w_inf(), 2.0);
        let t = InitialCondition::Tabulated {
            knots: vec![(1.0, 1.0), (2.0, 3.0)],
        };
        assert_eq!(t.w(0.5), 0.5);
        assert_eq!(t.w(1.5), 2.0);
        assert_eq!(t.w(10.0), 3.0);
        assert_eq!(t.w_inf(), 3.0);
        let bad = InitialCondition::Tabulated {
            knots: vec![(1.0, 1.0), (2.0, 0.5)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn bridge_extremes_bracket_endpoints() {
        for &(x0, x1) in &[(0.0, 1.0), (1.0, -2.0), (0.3, 0.3)] {
            assert_eq!(bridge_min(x0, x1, 1.0, 0.0), f64::min(x0, x1));
            assert_eq!(bridge_max(x0, x1, 1.0, 0.0), f64::max(x0, x1));
            assert!(bridge_min(x0, x1, 1.0, 0.7) < f64::min(x0, x1));
        }
    }
}
