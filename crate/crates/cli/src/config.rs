//! Run configuration, read from TOML.

use std::fs;
use std::path::{Path, PathBuf};

use rcbm_core::{ConstraintSet, DriftSpec, SrptParams};
use rcbm_sim::bm_sim::InitialCondition;
use rcbm_sim::srpt_sim::{ArrivalKind, ScalingParams, SrptRunConfig};
use serde::{Deserialize, Serialize};

/// Every setting of one run. Unknown keys are rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand the file is meant for, e.g. "measure eval".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Monte Carlo replicates; each subcommand has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Time step of path simulation; each subcommand has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// z-score threshold of validation reports.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_drift")]
    pub drift: DriftSpec,
    #[serde(default = "default_initial")]
    pub initial: InitialCondition,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub law2d: Law2d,
    #[serde(default)]
    pub ndist: Ndist,
    #[serde(default)]
    pub measure: Measure,
    #[serde(default)]
    pub srpt: Srpt,
}

fn default_seed() -> u64 {
    42
}

fn default_threshold() -> f64 {
    rcbm_sim::validate::Z_THRESHOLD
}

fn default_drift() -> DriftSpec {
    DriftSpec::srpt(1.0, 1.0, 1.0, 2.0).expect("valid parameters")
}

fn default_initial() -> InitialCondition {
    InitialCondition::Zero
}

/// Evaluation grids of `analytic eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default = "default_a")]
    pub a: Vec<f64>,
    /// Times; empty means the stationary law only.
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default = "default_x")]
    pub x: Vec<f64>,
}

fn default_a() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_x() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0]
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            a: default_a(),
            t: Vec::new(),
            x: default_x(),
        }
    }
}

/// The 2-d law grid of `validate law2d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Law2d {
    #[serde(default = "one")]
    pub a1: f64,
    #[serde(default = "infinity")]
    pub a2: f64,
    #[serde(default = "default_x")]
    pub x1: Vec<f64>,
    #[serde(default = "default_x")]
    pub x2: Vec<f64>,
    /// (x1, x2) cells of the conditional law.
    #[serde(default = "default_conditional")]
    pub conditional: Vec<(f64, f64)>,
}

fn one() -> f64 {
    1.0
}

fn infinity() -> f64 {
    f64::INFINITY
}

fn default_conditional() -> Vec<(f64, f64)> {
    vec![(0.5, 1.0)]
}

impl Default for Law2d {
    fn default() -> Self {
        Self {
            a1: one(),
            a2: infinity(),
            x1: default_x(),
            x2: default_x(),
            conditional: default_conditional(),
        }
    }
}

/// Constraint list of `ndist eval`: either (a, x) pairs under the drift, or
/// drifts and levels given directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ndist {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<(f64, f64)>>,
    #[serde(default = "default_nus")]
    pub nus: Vec<f64>,
    #[serde(default = "default_levels")]
    pub xs: Vec<f64>,
    /// σ when drifts are given directly.
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    /// The envelope export covers s ∈ [0, s_max].
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    #[serde(default = "default_s_points")]
    pub s_points: usize,
}

fn default_nus() -> Vec<f64> {
    vec![3.0, 2.0, 1.0]
}

fn default_levels() -> Vec<f64> {
    vec![1.0, 3.0, 6.0]
}

fn default_grid_n() -> usize {
    rcbm_core::ndist::DEFAULT_GRID_N
}

fn default_s_max() -> f64 {
    5.0
}

fn default_s_points() -> usize {
    501
}

impl Default for Ndist {
    fn default() -> Self {
        Self {
            constraints: None,
            nus: default_nus(),
            xs: default_levels(),
            sigma: one(),
            grid_n: default_grid_n(),
            s_max: default_s_max(),
            s_points: default_s_points(),
        }
    }
}

/// Size grid of the total-mass integral, in units of (λ̃/κ)^{1/p}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measure {
    #[serde(default = "default_lo")]
    pub grid_lo: f64,
    #[serde(default = "default_hi")]
    pub grid_hi: f64,
    #[serde(default = "default_points")]
    pub grid_points: usize,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
}

fn default_lo() -> f64 {
    1e-3
}

fn default_hi() -> f64 {
    1e3
}

fn default_points() -> usize {
    200
}

fn default_bins() -> usize {
    50
}

impl Default for Measure {
    fn default() -> Self {
        Self {
            grid_lo: default_lo(),
            grid_hi: default_hi(),
            grid_points: default_points(),
            histogram_bins: default_bins(),
        }
    }
}

/// Queue parameters and run controls of `srpt run`. Times are scaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Srpt {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "one")]
    pub x_m: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "poisson")]
    pub arrival: ArrivalKind,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub q0: Vec<f64>,
    /// Spacing of workload samples after warm-up; 0 disables them.
    #[serde(default = "default_every")]
    pub workload_every: f64,
    #[serde(default = "default_warmup")]
    pub warmup_fraction: f64,
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(default)]
    pub no_arrivals: bool,
    #[serde(default = "two")]
    pub drain_factor: f64,
}

fn default_r() -> f64 {
    10.0
}

fn two() -> f64 {
    2.0
}

fn poisson() -> ArrivalKind {
    ArrivalKind::Poisson
}

fn default_horizon() -> f64 {
    100.0
}

fn default_every() -> f64 {
    0.05
}

fn default_warmup() -> f64 {
    0.2
}

fn default_batches() -> usize {
    30
}

impl Default for Srpt {
    fn default() -> Self {
        Self {
            r: default_r(),
            p: two(),
            x_m: one(),
            kappa: one(),
            arrival: poisson(),
            horizon: default_horizon(),
            snapshot_times: Vec::new(),
            q0: Vec::new(),
            workload_every: default_every(),
            warmup_fraction: default_warmup(),
            batches: default_batches(),
            no_arrivals: false,
            drain_factor: two(),
        }
    }
}

impl Srpt {
    pub fn scaling(&self) -> Result<ScalingParams, String> {
        ScalingParams::new(self.r, self.p, self.x_m, self.kappa, self.arrival)
            .map_err(|e| format!("srpt: {e}"))
    }

    pub fn run_config(&self) -> Result<SrptRunConfig, String> {
        let cfg = SrptRunConfig {
            horizon: self.horizon,
            snapshot_times: self.snapshot_times.clone(),
            q0: self.q0.clone(),
            workload_every: (self.workload_every > 0.0).then_some(self.workload_every),
            warmup_fraction: self.warmup_fraction,
            batches: self.batches,
            no_arrivals: self.no_arrivals,
            drain_factor: self.drain_factor,
        };
        cfg.validate().map_err(|e| format!("srpt: {e}"))?;
        Ok(cfg)
    }
}

/// Subcommand names a config file may name.
pub const SUBCOMMANDS: [&str; 6] = [
    "analytic eval",
    "ndist eval",
    "measure eval",
    "measure mc",
    "srpt run",
    "validate",
];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| format!("config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, String> {
        toml::to_string(self).map_err(|e| format!("config: {e}"))
    }

    /// Checks every parameter; errors name the offending key.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(s) = &self.subcommand {
            if !SUBCOMMANDS
                .iter()
                .any(|c| s == c || s.starts_with("validate"))
            {
                return Err(format!("subcommand: unknown subcommand {s:?}"));
            }
        }
        if self.n == Some(0) {
            return Err("n: must be positive".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(format!("dt: must be positive, got {dt}"));
            }
        }
        if self.threads == Some(0) {
            return Err("threads: must be positive".into());
        }
        if !(self.threshold > 0.0) {
            return Err(format!(
                "threshold: must be positive, got {}",
                self.threshold
            ));
        }
        self.initial
            .validate()
            .map_err(|e| format!("initial: {e}"))?;
        let g = &self.grids;
        if g.a.iter().any(|&a| !(a > 0.0)) {
            return Err("grids.a: sizes must be positive".into());
        }
        if g.t.iter().any(|&t| !(t >= 0.0)) {
            return Err("grids.t: times must be nonnegative".into());
        }
        if g.x.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err("grids.x: levels must be finite and nonnegative".into());
        }
        let l = &self.law2d;
        if !(l.a1 > 0.0 && l.a2 > l.a1) {
            return Err("law2d: need 0 < a1 < a2".into());
        }
        if l.x1
            .iter()
            .chain(&l.x2)
            .any(|&x| !(x >= 0.0 && x.is_finite()))
        {
            return Err("law2d: levels must be finite and nonnegative".into());
        }
        let nd = &self.ndist;
        if !(nd.s_max > 0.0 && nd.s_max.is_finite()) || nd.s_points < 2 {
            return Err("ndist: need s_max > 0 and at least two envelope points".into());
        }
        if nd.grid_n < 64 {
            return Err("ndist.grid_n: must be at least 64".into());
        }
        let m = &self.measure;
        if !(m.grid_lo > 0.0 && m.grid_hi > m.grid_lo) || m.grid_points < 2 || m.histogram_bins == 0
        {
            return Err(
                "measure: need 0 < grid_lo < grid_hi, at least two grid points and one bin".into(),
            );
        }
        if !(self.srpt.workload_every >= 0.0) {
            return Err("srpt.workload_every: must be nonnegative".into());
        }
        self.srpt.scaling()?;
        self.srpt.run_config()?;
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), String> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if o.n.is_some() {
            self.n = o.n;
        }
        if o.dt.is_some() {
            self.dt = o.dt;
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        self.validate()
    }

    /// Limit parameters κ, λ̃, p, σ̃ of an SRPT drift.
    pub fn srpt_limit(&self) -> Result<SrptParams, String> {
        match *self.drift.kind() {
            rcbm_core::drift::DriftKind::Srpt {
                kappa,
                lambda_tilde,
                p,
            } => SrptParams::new(kappa, lambda_tilde, p, self.drift.sigma())
                .map_err(|e| format!("drift: {e}")),
            _ => Err("drift: measure subcommands need kind = \"srpt\"".into()),
        }
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet, String> {
        let nd = &self.ndist;
        let cs = match &nd.constraints {
            Some(c) => ConstraintSet::new(c, &self.drift),
            None => ConstraintSet::from_drifts(&nd.nus, &nd.xs, nd.sigma),
        };
        cs.map_err(|e| format!("ndist: {e}"))
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            seed: default_seed(),
            n: None,
            dt: None,
            threads: None,
            out: None,
            threshold: default_threshold(),
            drift: default_drift(),
            initial: default_initial(),
            grids: Grids::default(),
            law2d: Law2d::default(),
            ndist: Ndist::default(),
            measure: Measure::default(),
            srpt: Srpt::default(),
        }
    }
}

/// Reads and validates a config file; `None` gives the defaults.
pub fn parse_config(path: Option<&Path>) -> Result<RunConfig, String> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            RunConfig::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}
