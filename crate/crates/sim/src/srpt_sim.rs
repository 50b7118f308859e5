//! Preemptive shortest-remaining-processing-time queue with Pareto job sizes
//! and renewal arrivals, observed under the distribution-dependent scaling
//! of the measure-valued state.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};
use rcbm_core::SrptParams;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::stream;
use crate::stats::{batch_means, Estimate};

/// Interarrival law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalKind {
    Poisson,
    /// Gamma interarrival times with the given shape (squared coefficient of
    /// variation 1/shape).
    GammaRenewal {
        shape: f64,
    },
}

/// S(x) = 1/∫_x^∞ y dF(y) for Pareto(α, x_m); below x_m the full mean.
pub fn pareto_tail_integral(x: f64, alpha: f64, x_m: f64) -> Result<f64> {
    if !(alpha > 1.0 && x_m > 0.0) {
        return invalid(format!("need alpha > 1 and x_m > 0, got {alpha}, {x_m}"));
    }
    let x = x.max(x_m);
    Ok((alpha - 1.0) * x.powf(alpha - 1.0) / (alpha * x_m.powf(alpha)))
}

/// S⁻¹(y) = (α x_m^α y/(α−1))^{1/(α−1)} for y ≥ S(x_m).
pub fn s_inverse(y: f64, alpha: f64, x_m: f64) -> Result<f64> {
    let floor = pareto_tail_integral(x_m, alpha, x_m)?;
    if !(y >= floor) {
        return invalid(format!("S⁻¹ is defined for y ≥ S(x_m) = {floor}, got {y}"));
    }
    Ok((alpha * x_m.powf(alpha) * y / (alpha - 1.0)).powf(1.0 / (alpha - 1.0)))
}

/// One member of the heavy-traffic sequence, indexed by r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingParams {
    pub r: f64,
    pub p: f64,
    pub x_m: f64,
    pub kappa: f64,
    #[serde(default = "poisson")]
    pub arrival: ArrivalKind,
}

fn poisson() -> ArrivalKind {
    ArrivalKind::Poisson
}

impl ScalingParams {
    pub fn new(r: f64, p: f64, x_m: f64, kappa: f64, arrival: ArrivalKind) -> Result<Self> {
        let sp = Self {
            r,
            p,
            x_m,
            kappa,
            arrival,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return invalid(format!("p must exceed 1, got {}", self.p));
        }
        if !(self.x_m > 0.0 && self.x_m.is_finite()) {
            return invalid(format!("x_m must be positive, got {}", self.x_m));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return invalid(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.r > self.kappa && self.r.is_finite()) {
            return invalid(format!("r must exceed kappa, got r = {}", self.r));
        }
        if self.r < pareto_tail_integral(self.x_m, self.alpha(), self.x_m)? {
            return invalid("r lies below S(x_m); c_r is undefined");
        }
        if let ArrivalKind::GammaRenewal { shape } = self.arrival {
            if !(shape > 0.0 && shape.is_finite()) {
                return invalid(format!("gamma shape must be positive, got {shape}"));
            }
        }
        Ok(())
    }

    /// Pareto shape α = p + 1.
    pub fn alpha(&self) -> f64 {
        self.p + 1.0
    }

    pub fn mean_v(&self) -> f64 {
        let a = self.alpha();
        a * self.x_m / (a - 1.0)
    }

    /// σ_s².
    pub fn var_v(&self) -> f64 {
        let a = self.alpha();
        a * self.x_m * self.x_m / ((a - 1.0) * (a - 1.0) * (a - 2.0))
    }

    /// λ_r = (1 − κ/r)/E[v], so r(1 − λ_r E[v]) = κ.
    pub fn lambda_r(&self) -> f64 {
        (1.0 - self.kappa / self.r) / self.mean_v()
    }

    pub fn lambda_tilde(&self) -> f64 {
        1.0 / self.mean_v()
    }

    pub fn c_r(&self) -> f64 {
        s_inverse(self.r, self.alpha(), self.x_m).expect("validated parameters")
    }

    /// Limiting interarrival standard deviation.
    pub fn sigma_a_tilde(&self) -> f64 {
        match self.arrival {
            ArrivalKind::Poisson => self.mean_v(),
            ArrivalKind::GammaRenewal { shape } => self.mean_v() / shape.sqrt(),
        }
    }

    /// σ̃ = √(λ̃(σ̃_a² + σ_s²)).
    pub fn sigma_tilde(&self) -> f64 {
        let sa = self.sigma_a_tilde();
        (self.lambda_tilde() * (sa * sa + self.var_v())).sqrt()
    }

    /// Parameters of the limiting field.
    pub fn limit(&self) -> SrptParams {
        SrptParams::new(self.kappa, self.lambda_tilde(), self.p, self.sigma_tilde())
            .expect("validated parameters")
    }

    fn sample_size<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.x_m * (1.0 - u).powf(-1.0 / self.alpha())
    }
}

/// Run controls; times are in scaled units (unscaled = r²·scaled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrptRunConfig {
    pub horizon: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Initial remaining sizes, nonincreasing.
    #[serde(default)]
    pub q0: Vec<f64>,
    /// Spacing of scaled-workload samples taken after warm-up; none if absent.
    #[serde(default)]
    pub workload_every: Option<f64>,
    #[serde(default = "default_warmup")]
    pub warmup_fraction: f64,
    #[serde(default = "default_batches")]
    pub batches: usize,
    /// Disable arrivals entirely.
    #[serde(default)]
    pub no_arrivals: bool,
    /// Keep running past the horizon until every job that arrived in the
    /// observation window has departed, capped at this multiple of the
    /// horizon.
    #[serde(default = "default_drain")]
    pub drain_factor: f64,
}

fn default_warmup() -> f64 {
    0.2
}

fn default_batches() -> usize {
    30
}

fn default_drain() -> f64 {
    2.0
}

impl SrptRunConfig {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            snapshot_times: Vec::new(),
            q0: Vec::new(),
            workload_every: None,
            warmup_fraction: default_warmup(),
            batches: default_batches(),
            no_arrivals: false,
            drain_factor: default_drain(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return invalid(format!("horizon must be positive, got {}", self.horizon));
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(t >= 0.0 && t <= self.horizon))
        {
            return invalid("snapshot times must lie in [0, horizon]");
        }
        if self.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return invalid("snapshot times must be nondecreasing");
        }
        if self.q0.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return invalid("initial sizes must be positive");
        }
        if self.q0.windows(2).any(|w| w[1] > w[0]) {
            return invalid("initial sizes must be nonincreasing");
        }
        if let Some(d) = self.workload_every {
            if !(d > 0.0) {
                return invalid("workload sample spacing must be positive");
            }
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return invalid("warm-up fraction must lie in [0, 1)");
        }
        if self.batches < 2 {
            return invalid("need at least two batches");
        }
        if !(self.drain_factor >= 1.0) {
            return invalid("drain factor must be at least 1");
        }
        Ok(())
    }
}

/// The scaled state at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    /// (location v/c_r, weight c_r/r) per job in system.
    pub atoms: Vec<(f64, f64)>,
    /// Σ remaining / r.
    pub workload: f64,
    /// c_r · count / r.
    pub queue_length: f64,
}

impl Snapshot {
    /// ∫ x d𝓠̃(x), which equals the scaled workload.
    pub fn workload_from_atoms(&self) -> f64 {
        self.atoms.iter().map(|(x, w)| x * w).sum()
    }
}

/// Everything recorded along one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrptTrace {
    pub snapshots: Vec<Snapshot>,
    pub workload_samples: Vec<f64>,
    /// Unscaled (arrival, departure) of jobs arriving after warm-up and
    /// before the horizon, in departure order.
    pub responses: Vec<(f64, f64)>,
    /// Jobs in the observation window still present when draining stopped.
    pub censored: usize,
    pub arrivals: u64,
    pub departures: u64,
    pub in_system: u64,
    /// departures + in-system = arrivals + |q0| held after every event.
    pub flow_conserved: bool,
    /// Departures in the warm-up period.
    pub warmup_departures: u64,
    /// Busy periods that ended during warm-up.
    pub warmup_busy_cycles: u64,
}

/// A job in system.
#[derive(Debug, Clone, Copy)]
struct Job {
    rem: f64,
    idx: i64,
    arrival: f64,
}

fn key(j: &Job) -> (u64, i64) {
    // Nonnegative floats order like their bit patterns.
    (j.rem.max(0.0).to_bits(), j.idx)
}

/// Source of arrivals: absolute unscaled time and size.
pub trait ArrivalSource {
    fn next_arrival(&mut self) -> Option<(f64, f64)>;
}

/// Arrivals replayed from a list.
pub struct Replay<'a> {
    list: &'a [(f64, f64)],
    pos: usize,
}

impl<'a> Replay<'a> {
    pub fn new(list: &'a [(f64, f64)]) -> Self {
        Self { list, pos: 0 }
    }
}

impl ArrivalSource for Replay<'_> {
    fn next_arrival(&mut self) -> Option<(f64, f64)> {
        let a = self.list.get(self.pos).copied();
        self.pos += 1;
        a
    }
}

/// Renewal arrivals with Pareto sizes drawn from one stream.
pub struct Renewal {
    sp: ScalingParams,
    rng: ChaCha8Rng,
    clock: f64,
    inter: Interarrival,
}

enum Interarrival {
    Exp(Exp<f64>),
    Gamma(Gamma<f64>),
}

impl Renewal {
    pub fn new(sp: &ScalingParams, seed: u64) -> Result<Self> {
        sp.validate()?;
        let rate = sp.lambda_r();
        let inter = match sp.arrival {
            ArrivalKind::Poisson => Interarrival::Exp(
                Exp::new(rate).map_err(|e| crate::SimError::InvalidInput(e.to_string()))?,
            ),
            ArrivalKind::GammaRenewal { shape } => Interarrival::Gamma(
                Gamma::new(shape, 1.0 / (shape * rate))
                    .map_err(|e| crate::SimError::InvalidInput(e.to_string()))?,
            ),
        };
        Ok(Self {
            sp: *sp,
            rng: stream(seed, 0),
            clock: 0.0,
            inter,
        })
    }
}

impl ArrivalSource for Renewal {
    fn next_arrival(&mut self) -> Option<(f64, f64)> {
        let gap = match &self.inter {
            Interarrival::Exp(d) => d.sample(&mut self.rng),
            Interarrival::Gamma(d) => d.sample(&mut self.rng),
        };
        self.clock += gap;
        let v = self.sp.sample_size(&mut self.rng);
        Some((self.clock, v))
    }
}

/// Generates the first arrivals of a renewal stream up to unscaled time `until`.
pub fn generate_arrivals(sp: &ScalingParams, until: f64, seed: u64) -> Result<Vec<(f64, f64)>> {
    let mut src = Renewal::new(sp, seed)?;
    let mut out = Vec::new();
    while let Some((t, v)) = src.next_arrival() {
        if t > until {
            break;
        }
        out.push((t, v));
    }
    Ok(out)
}

/// SRPT queue state: the job in service plus the ordered waiting set.
#[derive(Default)]
struct Srpt {
    current: Option<Job>,
    waiting: BTreeSet<(u64, i64)>,
    arrivals_of: std::collections::HashMap<i64, f64>,
}

impl Srpt {
    fn len(&self) -> usize {
        self.waiting.len() + usize::from(self.current.is_some())
    }

    fn admit(&mut self, job: Job) {
        match self.current {
            None => self.current = Some(job),
            Some(cur) if job.rem < cur.rem => {
                self.park(cur);
                self.current = Some(job);
            }
            Some(_) => self.park(job),
        }
    }

    fn park(&mut self, job: Job) {
        self.waiting.insert(key(&job));
        self.arrivals_of.insert(job.idx, job.arrival);
    }

    fn serve_next(&mut self) {
        self.current = self.waiting.pop_first().map(|(bits, idx)| Job {
            rem: f64::from_bits(bits),
            idx,
            arrival: self.arrivals_of.remove(&idx).unwrap_or(0.0),
        });
    }

    fn remaining(&self) -> impl Iterator<Item = f64> + '_ {
        self.current
            .iter()
            .map(|j| j.rem)
            .chain(self.waiting.iter().map(|(b, _)| f64::from_bits(*b)))
    }
}

/// Simulates the SRPT queue under scaling `sp` with arrivals from `src`.
pub fn run_srpt_with<S: ArrivalSource>(
    sp: &ScalingParams,
    cfg: &SrptRunConfig,
    mut src: S,
) -> Result<SrptTrace> {
    sp.validate()?;
    cfg.validate()?;
    let r2 = sp.r * sp.r;
    let c_r = sp.c_r();
    let weight = c_r / sp.r;
    let end = cfg.horizon * r2;
    let warm = cfg.warmup_fraction * end;
    let drain_end = cfg.drain_factor * end;

    let mut q = Srpt::default();
    let n0 = cfg.q0.len() as u64;
    for (i, &v) in cfg.q0.iter().enumerate() {
        q.admit(Job {
            rem: v,
            idx: -(i as i64) - 1,
            arrival: 0.0,
        });
        if let Some(cur) = q.current {
            // Admission may have parked a larger job; keep the minimum in
            // service under the (remaining, index) order.
            if let Some(&(b, idx)) = q.waiting.first() {
                if key(&cur) > (b, idx) {
                    q.park(cur);
                    q.serve_next();
                }
            }
        }
    }

    let mut obs: Vec<(f64, bool)> = cfg.snapshot_times.iter().map(|&t| (t * r2, true)).collect();
    if let Some(d) = cfg.workload_every {
        let mut t = warm;
        while t <= end {
            obs.push((t, false));
            t += d * r2;
        }
    }
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut obs_pos = 0;

    let mut next_arr = if cfg.no_arrivals {
        None
    } else {
        src.next_arrival()
    };
    let mut next_idx: i64 = 0;
    let mut idx_window_end: Option<i64> = None;
    let mut outstanding: u64 = 0;

    let mut trace = SrptTrace {
        snapshots: Vec::new(),
        workload_samples: Vec::new(),
        responses: Vec::new(),
        censored: 0,
        arrivals: 0,
        departures: 0,
        in_system: q.len() as u64,
        flow_conserved: true,
        warmup_departures: 0,
        warmup_busy_cycles: 0,
    };
    let mut clock = 0.0f64;
    loop {
        let t_dep = q.current.map_or(f64::INFINITY, |j| clock + j.rem);
        let t_arr = next_arr.map_or(f64::INFINITY, |a| a.0);
        let t_obs = obs.get(obs_pos).map_or(f64::INFINITY, |o| o.0);
        let past_end = clock >= end;
        if past_end && idx_window_end.is_none() {
            idx_window_end = Some(next_idx);
            outstanding = q
                .current
                .iter()
                .map(|j| j.idx)
                .chain(q.waiting.iter().map(|k| k.1))
                .filter(|&i| i >= 0 && q_arrival_after(&q, i, warm))
                .count() as u64;
        }
        if past_end && (outstanding == 0 || clock >= drain_end) {
            trace.censored = outstanding as usize;
            break;
        }
        let limit = if past_end { drain_end } else { end };
        let t_next = t_dep.min(t_arr).min(t_obs).min(limit);
        if let Some(cur) = q.current.as_mut() {
            cur.rem -= t_next - clock;
        }
        clock = t_next;

        if t_obs <= t_next && t_obs <= t_dep.min(t_arr) {
            let (_, full) = obs[obs_pos];
            obs_pos += 1;
            let workload = q.remaining().sum::<f64>().max(0.0) / sp.r;
            if full {
                trace.snapshots.push(Snapshot {
                    t: clock / r2,
                    atoms: q.remaining().map(|v| (v.max(0.0) / c_r, weight)).collect(),
                    workload,
                    queue_length: weight * q.len() as f64,
                });
            } else {
                trace.workload_samples.push(workload);
            }
            continue;
        }
        if t_dep <= t_next && t_dep <= t_arr {
            let done = q.current.take().expect("departure without a job");
            trace.departures += 1;
            if clock <= warm {
                trace.warmup_departures += 1;
            }
            let in_window =
                done.idx >= 0 && done.arrival > warm && idx_window_end.is_none_or(|e| done.idx < e);
            if in_window && done.arrival <= end {
                trace.responses.push((done.arrival, clock));
                if idx_window_end.is_some() {
                    outstanding = outstanding.saturating_sub(1);
                }
            }
            q.serve_next();
            if q.current.is_none() && clock <= warm {
                trace.warmup_busy_cycles += 1;
            }
        } else if t_arr <= t_next {
            let (t, v) = next_arr.expect("arrival scheduled");
            q.admit(Job {
                rem: v,
                idx: next_idx,
                arrival: t,
            });
            next_idx += 1;
            trace.arrivals += 1;
            next_arr = src.next_arrival();
        }
        trace.in_system = q.len() as u64;
        if trace.departures + trace.in_system != trace.arrivals + n0 {
            trace.flow_conserved = false;
        }
    }
    trace.in_system = q.len() as u64;
    Ok(trace)
}

fn q_arrival_after(q: &Srpt, idx: i64, warm: f64) -> bool {
    let a = match q.current {
        Some(j) if j.idx == idx => j.arrival,
        _ => q.arrivals_of.get(&idx).copied().unwrap_or(0.0),
    };
    a > warm
}

/// Simulates with renewal arrivals drawn from `seed`.
pub fn run_srpt(sp: &ScalingParams, cfg: &SrptRunConfig, seed: u64) -> Result<SrptTrace> {
    run_srpt_with(sp, cfg, Renewal::new(sp, seed)?)
}

/// Queue-length path (event time, count after the event) of SRPT on a fixed
/// arrival list, run until empty.
pub fn srpt_queue_path(arrivals: &[(f64, f64)]) -> Vec<(f64, usize)> {
    let mut q = Srpt::default();
    let mut path = Vec::with_capacity(2 * arrivals.len());
    let mut clock = 0.0;
    let mut i = 0;
    loop {
        let t_dep = q.current.map_or(f64::INFINITY, |j| clock + j.rem);
        let t_arr = arrivals.get(i).map_or(f64::INFINITY, |a| a.0);
        if t_dep.is_infinite() && t_arr.is_infinite() {
            break;
        }
        let t = t_dep.min(t_arr);
        if let Some(cur) = q.current.as_mut() {
            cur.rem -= t - clock;
        }
        clock = t;
        if t_dep <= t_arr {
            q.current = None;
            q.serve_next();
        } else {
            q.admit(Job {
                rem: arrivals[i].1,
                idx: i as i64,
                arrival: t,
            });
            i += 1;
        }
        path.push((clock, q.len()));
    }
    path
}

/// Queue-length path of FIFO on the same arrival list.
pub fn fifo_queue_path(arrivals: &[(f64, f64)]) -> Vec<(f64, usize)> {
    let mut departures = Vec::with_capacity(arrivals.len());
    let mut free = 0.0f64;
    for &(t, v) in arrivals {
        free = free.max(t) + v;
        departures.push(free);
    }
    let mut path = Vec::with_capacity(2 * arrivals.len());
    let (mut i, mut j, mut n) = (0, 0, 0usize);
    while i < arrivals.len() || j < departures.len() {
        let ta = arrivals.get(i).map_or(f64::INFINITY, |a| a.0);
        let td = departures.get(j).copied().unwrap_or(f64::INFINITY);
        if td <= ta {
            n -= 1;
            j += 1;
            path.push((td, n));
        } else {
            n += 1;
            i += 1;
            path.push((ta, n));
        }
    }
    path
}

/// Count of a right-continuous step path at time t (last entry with time ≤ t).
fn count_at(path: &[(f64, usize)], t: f64) -> usize {
    let k = path.partition_point(|e| e.0 <= t);
    if k == 0 {
        0
    } else {
        path[k - 1].1
    }
}

/// Whether SRPT's queue length is at most FIFO's at every event time of
/// either policy. Returns the first violating time otherwise.
///
/// Departures of the two policies that coincide in exact arithmetic (such as
/// the end of a shared busy period) can differ by rounding, so counts are
/// compared just after each event, within a relative tolerance of 1e-9.
pub fn srpt_dominates_fifo(arrivals: &[(f64, f64)]) -> std::result::Result<(), f64> {
    let s = srpt_queue_path(arrivals);
    let f = fifo_queue_path(arrivals);
    for &(t, _) in s.iter().chain(f.iter()) {
        let after = t + 1e-9 * t.abs().max(1.0);
        if count_at(&s, after) > count_at(&f, after) {
            return Err(t);
        }
    }
    Ok(())
}

/// One row of the Little's-law table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LittleRow {
    pub r: f64,
    pub c_r: f64,
    /// (c_r/r)·E[T^r] by batch means.
    pub scaled_response: Estimate,
    /// E[v]·E[Z̃_*] from the limit.
    pub limit_side: f64,
    pub ratio: f64,
    pub completed: usize,
    pub censored: usize,
    /// Set when the warm-up saw fewer than 10 busy cycles.
    pub warning: Option<String>,
}

/// Batch-means estimate of the stationary mean response time and both sides
/// of the Little's-law limit, one row per r.
pub fn littles_law_stats(
    rs: &[f64],
    base: &ScalingParams,
    cfg: &SrptRunConfig,
    seed: u64,
) -> Result<Vec<LittleRow>> {
    if base.arrival != ArrivalKind::Poisson {
        return invalid("the Little's-law limit assumes Poisson arrivals");
    }
    let mut rows = Vec::with_capacity(rs.len());
    for (i, &r) in rs.iter().enumerate() {
        let sp = ScalingParams { r, ..*base };
        sp.validate()?;
        let trace = run_srpt(&sp, cfg, seed.wrapping_add(i as u64))?;
        let end = cfg.horizon * r * r;
        let warm = cfg.warmup_fraction * end;
        let width = (end - warm) / cfg.batches as f64;
        let mut sums = vec![(0.0f64, 0usize); cfg.batches];
        for &(a, d) in &trace.responses {
            let b = (((a - warm) / width) as usize).min(cfg.batches - 1);
            sums[b].0 += d - a;
            sums[b].1 += 1;
        }
        let means: Vec<f64> = sums
            .iter()
            .filter(|s| s.1 > 0)
            .map(|s| s.0 / s.1 as f64)
            .collect();
        let est = batch_means(&means);
        let c_r = sp.c_r();
        let scaled = Estimate::new(est.value * c_r / r, est.stderr * c_r / r);
        let limit_side = sp.mean_v() * rcbm_core::measure::srpt_mean_zstar(&sp.limit());
        let warning = (trace.warmup_busy_cycles < 10).then(|| {
            format!(
                "warm-up covers only {} busy cycles",
                trace.warmup_busy_cycles
            )
        });
        rows.push(LittleRow {
            r,
            c_r,
            scaled_response: scaled,
            limit_side,
            ratio: scaled.value / limit_side,
            completed: trace.responses.len(),
            censored: trace.censored,
            warning,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> ScalingParams {
        ScalingParams::new(10.0, 2.0, 1.0, 1.0, ArrivalKind::Poisson).unwrap()
    }

    #[test]
    fn pareto_scaling_examples() {
        assert!((pareto_tail_integral(2.0, 3.0, 1.0).unwrap() - 8.0 / 3.0).abs() < 1e-14);
        assert!((s_inverse(6.0, 3.0, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((pareto_tail_integral(1.0, 3.0, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let s = sp();
        assert!((s.mean_v() - 1.5).abs() < 1e-15);
        assert!((s.sigma_tilde() - 2f64.sqrt()).abs() < 1e-14);
        assert!((s.r * (1.0 - s.lambda_r() * s.mean_v()) - s.kappa).abs() < 1e-12);
        assert!(ScalingParams::new(10.0, 0.5, 1.0, 1.0, ArrivalKind::Poisson).is_err());
    }

    #[test]
    fn fifo_path_of_two_jobs() {
        let p = fifo_queue_path(&[(0.0, 2.0), (1.0, 1.0)]);
        assert_eq!(p, vec![(0.0, 1), (1.0, 2), (2.0, 1), (3.0, 0)]);
        let s = srpt_queue_path(&[(0.0, 3.0), (1.0, 1.0)]);
        assert_eq!(s, vec![(0.0, 1), (1.0, 2), (2.0, 1), (4.0, 0)]);
    }
}
