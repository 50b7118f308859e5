//! Monte Carlo oracles for the joint laws and moments of the maxima.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rcbm_core::analytic::stationary_horizon;
use rcbm_core::measure::{field_to_measure, LeftTail};
use rcbm_core::quad::{integrate, Tolerance};
use rcbm_core::{ConstraintSet, SrptParams};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::majorant::MaxProfile;
use crate::rng::{fold_chunks, replicate};
use crate::stats::{batch_means, CovAcc, Estimate, MeanVar};

/// Controls for the path-based joint-CDF estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathControls {
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
    /// A surviving cell is closed once its remaining crossing probability
    /// exp(−2ν_n·gap/σ²) falls below this bound.
    pub tail_eps: f64,
}

impl PathControls {
    /// Tail bound set to a tenth of the smallest binomial stderr of interest.
    pub fn new(n: usize, dt: f64, seed: u64) -> Self {
        Self {
            n,
            dt,
            seed,
            tail_eps: 0.1 / (n.max(1) as f64),
        }
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("need at least one path");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return invalid(format!(
                "tail bound must lie in (0, 1), got {}",
                self.tail_eps
            ));
        }
        Ok(())
    }
}

/// The lower envelope of a reduced constraint set: lines ν_k s + x_k active
/// on [kinks[k−1], kinks[k]].
#[derive(Debug, Clone)]
struct Envelope {
    lines: Vec<(f64, f64)>,
    kinks: Vec<f64>,
}

impl Envelope {
    fn new(cs: &ConstraintSet) -> Self {
        let red = cs.reduce().reduced;
        let lines = red.entries().iter().map(|c| (c.nu, c.x)).collect();
        Self {
            lines,
            kinks: red.taus(),
        }
    }

    fn last_kink(&self) -> f64 {
        self.kinks.last().copied().unwrap_or(0.0)
    }

    fn line(&self, k: usize, s: f64) -> f64 {
        let (nu, x) = self.lines[k];
        nu * s + x
    }
}

/// Whether a Brownian bridge from gap g0 to gap g1 over a step of length h
/// touches zero, given an Exp(1) draw.
#[inline]
fn bridge_crosses(g0: f64, g1: f64, half_s2h: f64, e: f64) -> bool {
    g1 <= 0.0 || g0 * g1 < half_s2h * e
}

/// Bridge value at time s inside [t0, t1].
fn bridge_point(
    rng: &mut ChaCha8Rng,
    t0: f64,
    x0: f64,
    t1: f64,
    x1: f64,
    s: f64,
    sigma: f64,
) -> f64 {
    let h = t1 - t0;
    let w = (s - t0) / h;
    let sd = sigma * ((s - t0) * (t1 - s) / h).sqrt();
    let z: f64 = rng.sample(StandardNormal);
    x0 + w * (x1 - x0) + sd * z
}

/// Cell state along one path.
struct CellState {
    alive: bool,
    line: usize,
}

/// Advances one cell over the step [t0, t1] on which the shared path moves
/// from x0 to x1. Returns false when the envelope is crossed.
#[allow(clippy::too_many_arguments)]
fn advance(
    env: &Envelope,
    st: &mut CellState,
    t0: f64,
    x0: f64,
    t1: f64,
    x1: f64,
    sigma: f64,
    e_shared: f64,
    rng: &mut ChaCha8Rng,
) -> bool {
    let half_s2 = 0.5 * sigma * sigma;
    let split = st.line < env.kinks.len() && env.kinks[st.line] < t1;
    if !split {
        let g0 = env.line(st.line, t0) - x0;
        let g1 = env.line(st.line, t1) - x1;
        return !bridge_crosses(g0, g1, half_s2 * (t1 - t0), e_shared);
    }
    // Kinks inside the step: walk sub-intervals with fresh bridge points and
    // independent crossing draws.
    let (mut a, mut xa) = (t0, x0);
    loop {
        let more = st.line < env.kinks.len() && env.kinks[st.line] < t1;
        let b = if more { env.kinks[st.line] } else { t1 };
        let xb = if more {
            bridge_point(rng, a, xa, t1, x1, b, sigma)
        } else {
            x1
        };
        let g0 = env.line(st.line, a) - xa;
        let g1 = env.line(st.line, b) - xb;
        let e: f64 = rng.sample(Exp1);
        if b > a && bridge_crosses(g0, g1, half_s2 * (b - a), e) {
            return false;
        }
        if g1 <= 0.0 {
            return false;
        }
        if !more {
            return true;
        }
        st.line += 1;
        a = b;
        xa = xb;
    }
}

/// P(M_*(a_i) ≤ x_i for all i) by simulation, for each constraint set in
/// `cells`. All cells share the driving paths; each cell's estimate is
/// individually a binomial proportion.
///
/// Crossings between grid points are detected exactly through the bridge
/// crossing law, so `dt` affects variance and runtime but not bias. Paths
/// stop once every surviving cell is past its last kink with residual
/// crossing probability below `tail_eps`.
pub fn mc_joint_cdf(cells: &[ConstraintSet], ctl: &PathControls) -> Result<Vec<Estimate>> {
    ctl.check()?;
    let Some(first) = cells.first() else {
        return Ok(Vec::new());
    };
    let sigma = first.sigma();
    if cells.iter().any(|c| c.sigma() != sigma) {
        return invalid("all cells must share sigma");
    }
    let envs: Vec<Envelope> = cells.iter().map(Envelope::new).collect();
    // Cells whose last drift is not positive have probability 0.
    let live: Vec<bool> = envs
        .iter()
        .map(|e| e.lines.last().is_some_and(|l| l.0 > 0.0))
        .collect();
    let dt = ctl.dt;
    let sqdt = sigma * dt.sqrt();
    let half_s2dt = 0.5 * sigma * sigma * dt;
    let ln_eps = ctl.tail_eps.ln();
    let s2 = sigma * sigma;

    let chunks = fold_chunks(
        ctl.n,
        ctl.seed,
        || vec![0u64; envs.len()],
        |hits, _, rng| {
            let mut st: Vec<CellState> = live
                .iter()
                .map(|&l| CellState { alive: l, line: 0 })
                .collect();
            let mut open = st.iter().filter(|s| s.alive).count();
            let (mut t, mut x) = (0.0f64, 0.0f64);
            while open > 0 {
                let z: f64 = rng.sample(StandardNormal);
                let e: f64 = rng.sample(Exp1);
                let t1 = t + dt;
                let x1 = x + sqdt * z;
                for (c, env) in envs.iter().enumerate() {
                    if !st[c].alive {
                        continue;
                    }
                    let ok = if st[c].line < env.kinks.len() && env.kinks[st[c].line] < t1 {
                        advance(env, &mut st[c], t, x, t1, x1, sigma, e, rng)
                    } else {
                        let g0 = env.line(st[c].line, t) - x;
                        let g1 = env.line(st[c].line, t1) - x1;
                        !bridge_crosses(g0, g1, half_s2dt, e)
                    };
                    if !ok {
                        st[c].alive = false;
                        open -= 1;
                        continue;
                    }
                    if t1 >= env.last_kink() {
                        let nu = env.lines.last().unwrap().0;
                        let gap = env.line(env.lines.len() - 1, t1) - x1;
                        if -2.0 * nu * gap / s2 < ln_eps {
                            hits[c] += 1;
                            st[c].alive = false;
                            open -= 1;
                        }
                    }
                }
                t = t1;
                x = x1;
            }
        },
    );
    let mut total = vec![0u64; envs.len()];
    for h in chunks {
        for (t, v) in total.iter_mut().zip(h) {
            *t += v;
        }
    }
    Ok(total
        .into_iter()
        .zip(&live)
        .map(|(h, &l)| {
            if l {
                Estimate::proportion(h, ctl.n as u64)
            } else {
                Estimate::new(0.0, 0.0)
            }
        })
        .collect())
}

/// P(M_{τ₁}(a₁) ≤ x₁ | M_*(a₂) > x₂) by simulation, where τ₁ is the time the
/// two constraint lines cross. Requires ν₁ > ν₂ > 0 and x₂ > x₁ > 0.
pub fn mc_conditional_2d(
    nu1: f64,
    nu2: f64,
    x1: f64,
    x2: f64,
    sigma: f64,
    ctl: &PathControls,
) -> Result<Estimate> {
    ctl.check()?;
    if !(nu1 > nu2 && nu2 > 0.0 && x2 > x1 && x1 > 0.0 && sigma > 0.0) {
        return invalid("conditional law needs nu1 > nu2 > 0, x2 > x1 > 0, sigma > 0");
    }
    let tau = (x2 - x1) / (nu1 - nu2);
    let dt = ctl.dt;
    let sqdt = sigma * dt.sqrt();
    let half_s2 = 0.5 * sigma * sigma;
    let ln_eps = ctl.tail_eps.ln();
    let l1 = |s: f64| nu1 * s + x1;
    let l2 = |s: f64| nu2 * s + x2;

    // Per path: (crossed line 2 ever, stayed below line 1 on [0, τ₁]).
    let chunks = fold_chunks(
        ctl.n,
        ctl.seed,
        || (0u64, 0u64),
        |acc, _, rng| {
            let (mut t, mut x) = (0.0f64, 0.0f64);
            let mut below1 = true;
            loop {
                let z: f64 = rng.sample(StandardNormal);
                let t1 = t + dt;
                let x1n = x + sqdt * z;
                // Sub-steps split at τ₁; both lines share each draw, which
                // couples the two crossing events correctly since line 2 lies
                // above line 1 before τ₁.
                let mut pieces = vec![(t, x, t1, x1n)];
                if t < tau && tau < t1 {
                    let xm = bridge_point(rng, t, x, t1, x1n, tau, sigma);
                    pieces = vec![(t, x, tau, xm), (tau, xm, t1, x1n)];
                }
                let mut crossed2 = false;
                for (a, xa, b, xb) in pieces {
                    let e: f64 = rng.sample(Exp1);
                    let h = half_s2 * (b - a);
                    if below1 && b <= tau + 1e-15 && bridge_crosses(l1(a) - xa, l1(b) - xb, h, e) {
                        below1 = false;
                    }
                    if bridge_crosses(l2(a) - xa, l2(b) - xb, h, e) {
                        crossed2 = true;
                        break;
                    }
                }
                if crossed2 {
                    acc.0 += 1;
                    if below1 {
                        acc.1 += 1;
                    }
                    return;
                }
                t = t1;
                x = x1n;
                if t >= tau && -2.0 * nu2 * (l2(t) - x) / (sigma * sigma) < ln_eps {
                    return;
                }
            }
        },
    );
    let (mut n2, mut both) = (0u64, 0u64);
    for (a, b) in chunks {
        n2 += a;
        both += b;
    }
    Ok(Estimate::proportion(both, n2))
}

/// Paired estimate of Cov and correlation of (M_*(μ₁), M_*(μ₂)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovEstimate {
    pub covariance: Estimate,
    pub correlation: Estimate,
    pub horizon: f64,
}

/// Number of batches behind batch-means standard errors.
pub const BATCHES: usize = 100;

/// Smallest drift of interest → horizon for the joint maxima sampler.
fn majorant_horizon(mu_min: f64, sigma: f64, gap: f64) -> Result<f64> {
    Ok(stationary_horizon(mu_min, sigma, gap)?)
}

/// Default CDF gap for majorant horizons; the sampler's cost grows only
/// logarithmically with the horizon.
pub const MAJORANT_GAP: f64 = 1e-9;

/// Covariance and correlation of the all-time maxima under drifts μ₁, μ₂
/// driven by one Brownian motion, sampled exactly through the concave
/// majorant.
pub fn mc_covariance(mu1: f64, mu2: f64, sigma: f64, n: usize, seed: u64) -> Result<CovEstimate> {
    if !(mu1 > 0.0 && mu2 > 0.0) {
        return invalid("drifts must be positive");
    }
    if n < 2 * BATCHES {
        return invalid(format!("need at least {} replicates", 2 * BATCHES));
    }
    let horizon = majorant_horizon(mu1.min(mu2), sigma, MAJORANT_GAP)?;
    let per = n / BATCHES;
    let pairs = replicate(BATCHES * per, seed, |_, rng| {
        let prof = MaxProfile::sample(sigma, horizon, rng).expect("validated horizon");
        (prof.max_at(mu1), prof.max_at(mu2))
    });
    let mut cov_b = Vec::with_capacity(BATCHES);
    let mut cor_b = Vec::with_capacity(BATCHES);
    for chunk in pairs.chunks(per) {
        let mut acc = CovAcc::new();
        for &(a, b) in chunk {
            acc.push(a, b);
        }
        cov_b.push(acc.covariance());
        cor_b.push(acc.correlation());
    }
    let mut all = CovAcc::new();
    for &(a, b) in &pairs {
        all.push(a, b);
    }
    let cov_se = batch_means(&cov_b).stderr;
    let cor_se = batch_means(&cor_b).stderr;
    Ok(CovEstimate {
        covariance: Estimate::new(all.covariance(), cov_se),
        correlation: Estimate::new(all.correlation(), cor_se),
        horizon,
    })
}

/// Log-spaced size grid for the total-mass integral, in units of the natural
/// scale (λ̃/κ)^{1/p}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for ZGrid {
    fn default() -> Self {
        Self {
            lo: 1e-3,
            hi: 1e3,
            points: 200,
        }
    }
}

/// Monte Carlo moments of Z̃_*.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZstarEstimate {
    pub mean: Estimate,
    pub variance: Estimate,
    pub n: usize,
    pub horizon: f64,
    pub grid: ZGrid,
    /// Expected mass below the first grid point, added to every replicate.
    pub left_tail_mean: f64,
}

/// σ̃²/2 ∫₀^{x₀} dx/(x²μ̃(x)), the mean mass below x₀.
pub fn srpt_left_tail_mean(sp: &SrptParams, x0: f64) -> Result<f64> {
    let (k, l, p, s) = (sp.kappa, sp.lambda_tilde, sp.p, sp.sigma_tilde);
    // With y = x^{p−1} the integrand σ̃²/2·x^{p−2}/(λ̃ + κx^p) becomes smooth.
    let y0 = x0.powf(p - 1.0);
    let q = p / (p - 1.0);
    let r = integrate(
        |y: f64| 1.0 / (l + k * y.powf(q)),
        0.0,
        y0,
        Tolerance::new(1e-15, 1e-12),
    )?;
    Ok(0.5 * s * s * r.value / (p - 1.0))
}

/// Samples of the total mass ∫₀^∞ M̃_T(x)/x² dx with M̃_T the coupled
/// running-max field over [0, T], one per replicate. `horizon = None` uses
/// the stationary horizon, giving samples of Z̃_*.
pub fn sample_total_mass(
    sp: &SrptParams,
    n: usize,
    grid: ZGrid,
    seed: u64,
    horizon: Option<f64>,
) -> Result<(Vec<f64>, f64, f64)> {
    if !(grid.lo > 0.0 && grid.hi > grid.lo && grid.points >= 2) {
        return invalid("grid needs 0 < lo < hi and at least two points");
    }
    let scale = sp.natural_scale();
    let (lo, hi) = (grid.lo * scale, grid.hi * scale);
    let m = grid.points;
    let xs: Vec<f64> = (0..m)
        .map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64))
        .collect();
    let drift = sp.drift();
    let mus: Vec<f64> = xs
        .iter()
        .map(|&x| drift.mu_at(x))
        .collect::<rcbm_core::Result<_>>()?;
    let sigma = sp.sigma_tilde;
    let horizon = match horizon {
        Some(h) => h,
        None => majorant_horizon(sp.kappa, sigma, MAJORANT_GAP)?,
    };
    let left = srpt_left_tail_mean(sp, lo)?;
    let zs: Vec<Result<f64>> = replicate(n, seed, |_, rng| {
        let prof = MaxProfile::sample(sigma, horizon, rng)?;
        let g: Vec<f64> = mus.iter().map(|&mu| prof.max_at(mu)).collect();
        let g_inf = prof.max_at(sp.kappa);
        let snap = field_to_measure(&xs, &g, &[], LeftTail::Given(left), Some(g_inf))?;
        Ok(snap.total_mass)
    });
    let zs: Vec<f64> = zs.into_iter().collect::<Result<_>>()?;
    Ok((zs, horizon, left))
}

/// Estimates E[Z̃_*] and Var[Z̃_*] from `n` replicates of the coupled max
/// field on a log grid, each integrated with [`field_to_measure`].
pub fn mc_zstar(sp: &SrptParams, n: usize, grid: ZGrid, seed: u64) -> Result<ZstarEstimate> {
    if n < 2 {
        return invalid("need at least two replicates");
    }
    let (zs, horizon, left) = sample_total_mass(sp, n, grid, seed, None)?;
    let acc: MeanVar = zs.iter().copied().collect();
    let mean = acc.mean();
    let var = acc.variance();
    let nf = n as f64;
    let m4 = zs.iter().map(|z| (z - mean).powi(4)).sum::<f64>() / nf;
    let var_se = ((m4 - var * var).max(0.0) / nf).sqrt();
    Ok(ZstarEstimate {
        mean: acc.estimate(),
        variance: Estimate::new(var, var_se),
        n,
        horizon,
        grid,
        left_tail_mean: left,
    })
}
