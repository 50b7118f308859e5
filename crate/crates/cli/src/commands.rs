//! Subcommand bodies. Each writes its files into the output directory and
//! returns the validation reports it produced, if any.

use rcbm_core::analytic::{correlation, covariance, running_max_cdf, TwoPoint};
use rcbm_core::measure::{published_var_zstar, srpt_mean_zstar, srpt_var_zstar};
use rcbm_core::ndist::joint_cdf_raw;
use rcbm_sim::mc::{mc_joint_cdf, mc_zstar, sample_total_mass, PathControls, ZGrid};
use rcbm_sim::srpt_sim::{littles_law_stats, run_srpt, ArrivalKind};
use rcbm_sim::stats::{batch_means, MeanVar};
use rcbm_sim::validate::{
    covariance_check, density_check, law_2d_grid, run_suite, ExperimentReport, Suite, SuiteOptions,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{join17, Cell, OutDir};

type Outcome = Result<(Vec<ExperimentReport>, Value), String>;

fn e2s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Running-max CDFs on the (a, t, x) grid, the 2-d joint CDF and the
/// covariance for each pair of sizes.
pub fn analytic_eval(cfg: &RunConfig, out: &mut OutDir) -> Outcome {
    let spec = &cfg.drift;
    let sigma = spec.sigma();
    let g = &cfg.grids;
    let times = if g.t.is_empty() {
        vec![f64::INFINITY]
    } else {
        g.t.clone()
    };
    let mut rows = Vec::new();
    let mut blocks = Vec::new();
    let x_hi = g.x.iter().copied().fold(1.0, f64::max);
    for &a in &g.a {
        let nu = spec.mu_at(a).map_err(e2s)?;
        for &t in &times {
            for &x in &g.x {
                let v = running_max_cdf(x, t, nu, sigma).map_err(e2s)?;
                rows.push(vec![a.into(), nu.into(), t.into(), x.into(), v.into()]);
            }
            let curve = linspace(0.0, x_hi, 201)
                .into_iter()
                .map(|x| Ok(vec![x, running_max_cdf(x, t, nu, sigma)?]))
                .collect::<rcbm_core::Result<Vec<_>>>()
                .map_err(e2s)?;
            blocks.push((format!("a={a} nu={nu} t={t}"), curve));
        }
    }
    out.csv("analytic.csv", &["a", "nu", "t", "x", "cdf"], rows)?;
    out.plot(
        "analytic_cdf.dat",
        "running-max CDF F(x, t, nu, sigma)\ncolumns: x cdf",
        &blocks,
    )?;

    let mut joint = Vec::new();
    let mut cov = Vec::new();
    for (i, &a1) in g.a.iter().enumerate() {
        for &a2 in &g.a[i + 1..] {
            for &x1 in &g.x {
                for &x2 in &g.x {
                    let tp = TwoPoint::new(spec, a1, a2, x1, x2).map_err(e2s)?;
                    let v = rcbm_core::analytic::joint_cdf_2d(&tp).map_err(e2s)?;
                    joint.push(vec![
                        a1.into(),
                        a2.into(),
                        tp.nu1.into(),
                        tp.nu2.into(),
                        x1.into(),
                        x2.into(),
                        v.into(),
                    ]);
                }
            }
            let c = covariance(a1, a2, spec).map_err(e2s)?;
            let r = correlation(a1, a2, spec).map_err(e2s)?;
            cov.push(vec![a1.into(), a2.into(), c.into(), r.into()]);
        }
    }
    out.csv(
        "joint2d.csv",
        &["a1", "a2", "nu1", "nu2", "x1", "x2", "cdf"],
        joint,
    )?;
    out.csv(
        "covariance.csv",
        &["a1", "a2", "covariance", "correlation"],
        cov,
    )?;
    Ok((Vec::new(), Value::Null))
}

/// Reduction, intersection times, quadrature value and Monte Carlo estimate
/// of the n-point law, plus the line-envelope export.
pub fn ndist_eval(cfg: &RunConfig, out: &mut OutDir) -> Outcome {
    let cs = cfg.constraint_set()?;
    let nd = &cfg.ndist;
    let red = cs.reduce();
    let exact = joint_cdf_raw(&cs, nd.grid_n).map_err(e2s)?;
    let ctl = PathControls::new(cfg.n.unwrap_or(100_000), cfg.dt.unwrap_or(1e-2), cfg.seed);
    let est = mc_joint_cdf(std::slice::from_ref(&cs), &ctl).map_err(e2s)?[0];
    let z = est.z_score(exact);
    let nus: Vec<f64> = cs.entries().iter().map(|c| c.nu).collect();
    let xs: Vec<f64> = cs.entries().iter().map(|c| c.x).collect();
    let rnus: Vec<f64> = red.reduced.entries().iter().map(|c| c.nu).collect();
    let rxs: Vec<f64> = red.reduced.entries().iter().map(|c| c.x).collect();
    let removed: Vec<String> = red.removed.iter().map(|i| i.to_string()).collect();
    out.csv(
        "ndist.csv",
        &[
            "nu",
            "x",
            "removed",
            "reduced_nu",
            "reduced_x",
            "taus",
            "analytic",
            "mc",
            "stderr",
            "z",
        ],
        vec![vec![
            join17(&nus),
            join17(&xs),
            Cell::Text(removed.join(";")),
            join17(&rnus),
            join17(&rxs),
            join17(&red.reduced.taus()),
            exact.into(),
            est.value.into(),
            est.stderr.into(),
            z.into(),
        ]],
    )?;
    let rows: Vec<Vec<f64>> = linspace(0.0, nd.s_max, nd.s_points)
        .into_iter()
        .map(|s| {
            let mut row = vec![s];
            row.extend(nus.iter().zip(&xs).map(|(nu, x)| nu * s + x));
            row.push(cs.envelope(s));
            row
        })
        .collect();
    let cols: Vec<String> = (1..=nus.len()).map(|i| format!("line_{i}")).collect();
    let comment = format!(
        "constraint lines nu_i s + x_i and their lower envelope\nnu = {nus:?}, x = {xs:?}\ncolumns: s {} envelope",
        cols.join(" ")
    );
    out.plot("envelope.dat", &comment, &[(String::new(), rows)])?;
    let mut p = std::collections::BTreeMap::new();
    p.insert("n".to_string(), ctl.n as f64);
    p.insert("dt".to_string(), ctl.dt);
    let report = ExperimentReport::z("ndist_mc", p, exact, est, cfg.threshold);
    Ok((
        vec![report],
        json!({ "removed": red.removed, "taus": red.reduced.taus() }),
    ))
}

fn zgrid(cfg: &RunConfig) -> ZGrid {
    ZGrid {
        lo: cfg.measure.grid_lo,
        hi: cfg.measure.grid_hi,
        points: cfg.measure.grid_points,
    }
}

/// Closed-form moments of the stationary total mass; with `mc`, Monte Carlo
/// estimates beside them and a histogram of the samples.
pub fn measure(cfg: &RunConfig, out: &mut OutDir, mc: bool) -> Outcome {
    let sp = cfg.srpt_limit()?;
    let mean = srpt_mean_zstar(&sp);
    let var = srpt_var_zstar(&sp);
    let published = published_var_zstar(&sp);
    let mass = cfg.drift.check_mass_integrability();
    let n = cfg.n.unwrap_or(10_000);
    let est = if mc {
        Some(mc_zstar(&sp, n, zgrid(cfg), cfg.seed).map_err(e2s)?)
    } else {
        None
    };
    let nan = rcbm_sim::stats::Estimate::new(f64::NAN, f64::NAN);
    let (em, ev) = est.as_ref().map_or((nan, nan), |e| (e.mean, e.variance));
    let row = |q: &str, analytic: f64, e: rcbm_sim::stats::Estimate| -> Vec<Cell> {
        vec![
            q.into(),
            sp.kappa.into(),
            sp.lambda_tilde.into(),
            sp.p.into(),
            sp.sigma_tilde.into(),
            analytic.into(),
            e.value.into(),
            e.stderr.into(),
        ]
    };
    let mass_integral = Value::from(if mass.holds {
        mass.value
    } else {
        f64::INFINITY
    });
    out.csv(
        "measure.csv",
        &[
            "quantity",
            "kappa",
            "lambda_tilde",
            "p",
            "sigma_tilde",
            "analytic",
            "mc_estimate",
            "stderr",
        ],
        vec![
            row("mean_zstar", mean, em),
            row("var_zstar", var, ev),
            row("published_var_zstar", published, ev),
            row("mass_integral", mass.value, nan),
        ],
    )?;
    let mut reports = Vec::new();
    if let Some(e) = &est {
        let mut p = std::collections::BTreeMap::new();
        p.insert("n".to_string(), n as f64);
        p.insert("horizon".to_string(), e.horizon);
        reports.push(ExperimentReport::z(
            "zstar_mean",
            p.clone(),
            mean,
            e.mean,
            cfg.threshold,
        ));
        reports.push(ExperimentReport::z(
            "zstar_variance",
            p,
            var,
            e.variance,
            cfg.threshold,
        ));
        let (zs, _, _) = sample_total_mass(&sp, n, zgrid(cfg), cfg.seed, None).map_err(e2s)?;
        out.plot(
            "zstar_hist.dat",
            "histogram of total-mass samples\ncolumns: bin_center density",
            &[(String::new(), histogram(&zs, cfg.measure.histogram_bins))],
        )?;
    }
    Ok((reports, json!({ "mass_integral": mass_integral })))
}

fn histogram(xs: &[f64], bins: usize) -> Vec<Vec<f64>> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() || !(hi > lo) {
        return Vec::new();
    }
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in xs {
        counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
    }
    let total = xs.len() as f64 * w;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| vec![lo + (i as f64 + 0.5) * w, c as f64 / total])
        .collect()
}

/// One SRPT run: snapshot atoms, workload samples and the Little's-law row.
pub fn srpt_run(cfg: &RunConfig, out: &mut OutDir) -> Outcome {
    let sp = cfg.srpt.scaling()?;
    let run = cfg.srpt.run_config()?;
    let trace = run_srpt(&sp, &run, cfg.seed).map_err(e2s)?;

    let mut atoms = Vec::new();
    let mut blocks = Vec::new();
    for s in &trace.snapshots {
        let mut sorted = s.atoms.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = 0.0;
        let mut curve = vec![vec![0.0, 0.0]];
        for &(x, w) in &sorted {
            atoms.push(vec![s.t.into(), x.into(), w.into()]);
            cum += w;
            curve.push(vec![x, cum]);
        }
        blocks.push((format!("t={}", s.t), curve));
    }
    out.csv(
        "snapshots.csv",
        &["t", "atom_location", "atom_weight"],
        atoms,
    )?;
    out.plot(
        "snapshots.dat",
        "scaled queue measure Q([0, x]) per snapshot\ncolumns: x mass",
        &blocks,
    )?;

    let warm = run.warmup_fraction * run.horizon;
    let work: Vec<Vec<f64>> = trace
        .workload_samples
        .iter()
        .enumerate()
        .map(|(k, &w)| vec![warm + k as f64 * cfg.srpt.workload_every, w])
        .collect();
    out.plot(
        "workload.dat",
        "scaled workload after warm-up\ncolumns: t workload",
        &[(String::new(), work)],
    )?;

    let workload = if trace.workload_samples.len() >= run.batches {
        let per = trace.workload_samples.len() / run.batches;
        let means: Vec<f64> = trace
            .workload_samples
            .chunks(per)
            .take(run.batches)
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect();
        batch_means(&means)
    } else {
        trace
            .workload_samples
            .iter()
            .copied()
            .collect::<MeanVar>()
            .estimate()
    };
    let queue: MeanVar = trace.snapshots.iter().map(|s| s.queue_length).collect();
    let queue_mean = if queue.count() > 0 {
        queue.mean()
    } else {
        f64::NAN
    };
    let little = if sp.arrival == ArrivalKind::Poisson && !run.no_arrivals {
        littles_law_stats(&[sp.r], &sp, &run, cfg.seed)
            .map_err(e2s)?
            .pop()
    } else {
        None
    };
    let (resp, resp_se, limit, ratio) =
        little
            .as_ref()
            .map_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN), |l| {
                (
                    l.scaled_response.value,
                    l.scaled_response.stderr,
                    l.limit_side,
                    l.ratio,
                )
            });
    out.csv(
        "summary.csv",
        &[
            "r",
            "c_r",
            "scaled_workload_mean",
            "scaled_workload_stderr",
            "scaled_queue_mean",
            "scaled_response",
            "scaled_response_stderr",
            "limit_side",
            "ratio",
            "arrivals",
            "departures",
            "censored",
        ],
        vec![vec![
            sp.r.into(),
            sp.c_r().into(),
            workload.value.into(),
            workload.stderr.into(),
            queue_mean.into(),
            resp.into(),
            resp_se.into(),
            limit.into(),
            ratio.into(),
            trace.arrivals.into(),
            trace.departures.into(),
            trace.censored.into(),
        ]],
    )?;
    let flow = ExperimentReport::property(
        "srpt_flow_conservation",
        Default::default(),
        trace.flow_conserved,
        "",
    );
    let warning = little.and_then(|l| l.warning);
    Ok((
        vec![flow],
        json!({ "warning": warning, "in_system": trace.in_system }),
    ))
}

/// A validation suite. `law2d` uses the grid and drift of the config; the
/// other suites run with their built-in parameters.
pub fn validate(cfg: &RunConfig, out: &mut OutDir, suite: Suite) -> Outcome {
    let reports = if suite == Suite::Law2d {
        law2d(cfg, out)?
    } else {
        let opts = SuiteOptions {
            seed: cfg.seed,
            n: cfg.n,
            dt: cfg.dt,
        };
        run_suite(suite, &opts).map_err(e2s)?
    };
    Ok((reports, Value::Null))
}

fn law2d(cfg: &RunConfig, out: &mut OutDir) -> Result<Vec<ExperimentReport>, String> {
    let l = &cfg.law2d;
    let spec = &cfg.drift;
    let nu1 = spec.mu_at(l.a1).map_err(e2s)?;
    let nu2 = spec.mu_at(l.a2).map_err(e2s)?;
    let sigma = spec.sigma();
    let n = cfg.n.unwrap_or(1_000_000);
    let ctl = PathControls::new(n, cfg.dt.unwrap_or(1e-2), cfg.seed);
    let mut reports = law_2d_grid(
        nu1,
        nu2,
        sigma,
        &l.x1,
        &l.x2,
        &l.conditional,
        &ctl,
        cfg.threshold,
    )
    .map_err(e2s)?;
    let rows = reports
        .iter()
        .filter(|r| r.name == "law2d_joint")
        .map(|r| {
            vec![
                l.a1.into(),
                l.a2.into(),
                r.parameters["x1"].into(),
                r.parameters["x2"].into(),
                r.analytic_value.into(),
                r.mc_estimate.into(),
                r.stderr.into(),
                r.z_score.into(),
            ]
        })
        .collect();
    out.csv(
        "law2d.csv",
        &["a1", "a2", "x1", "x2", "analytic", "mc", "stderr", "z"],
        rows,
    )?;
    reports.extend(covariance_check(nu1, nu2, sigma, n, cfg.seed.wrapping_add(1)).map_err(e2s)?);
    reports.extend(density_check(nu1, nu1 - nu2, sigma).map_err(e2s)?);
    Ok(reports)
}
