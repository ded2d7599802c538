//! Monte Carlo experiment drivers: estimator runs, bound validation,
//! parameter sweeps, tightness scalings and the link-percolation check.
//!
//! Trials are distributed over a worker pool; every trial owns the RNG
//! stream derived from `(master_seed, trial_index)`, results are collected
//! in trial order and reduced sequentially, so reruns are bit-identical
//! regardless of thread count.

use anyhow::{anyhow, bail, Context};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use hazard_core::bounds::{
    bernoulli_bound, bernoulli_closed_form, uniform_bound, uniform_closed_form, worst_case_bound,
    worst_case_closed_form, BoundReport,
};
use hazard_core::gamma::{gamma, gamma0, DEFAULT_TOL};
use hazard_core::graph::InfluencerScheme;
use hazard_core::percolation::{percolation_report, PercolationBoundReport};
use hazard_core::sim::{
    draw_influencers, exact_influence_scheme, reachable_set, sample_component_view, sample_graph,
    StreamDomain, TrialSeed,
};
use hazard_core::{spec_hazard_radius, GraphSpec, HazardSummary};

use crate::config::{EstimandSpec, ExperimentConfig, ModelSpec};
use crate::report::config_hash;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Statistical acceptance slack: one-sided 3-standard-error rule.
pub const SIGMA_SLACK: f64 = 3.0;

/// A Monte Carlo estimate of one scalar quantity.
#[derive(Debug, Clone, Serialize)]
pub struct SimEstimate {
    pub name: String,
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub master_seed: u64,
}

fn summarize(name: String, values: &[f64], master_seed: u64) -> SimEstimate {
    let trials = values.len() as u64;
    let mean = values.iter().sum::<f64>() / trials as f64;
    let stderr = if trials > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    SimEstimate {
        name,
        mean,
        stderr,
        trials,
        master_seed,
    }
}

/// One empirical-vs-bound comparison using the 3-sigma rule.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub estimand: String,
    pub bound_name: String,
    pub bound: f64,
    pub mean: f64,
    pub stderr: f64,
    /// `bound + 3*stderr - mean`; nonnegative means pass.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(estimand: String, bound_name: String, bound: f64, est: &SimEstimate) -> Self {
        let margin = bound + SIGMA_SLACK * est.stderr - est.mean;
        BoundCheck {
            estimand,
            bound_name,
            bound,
            mean: est.mean,
            stderr: est.stderr,
            margin,
            pass: margin >= 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub model: String,
    pub n: usize,
    pub scenario: Option<String>,
    pub hazard: HazardSummary,
    pub estimates: Vec<SimEstimate>,
    pub bounds: Vec<BoundReport>,
    pub percolation: Option<PercolationBoundReport>,
    pub checks: Vec<BoundCheck>,
}

impl MonteCarloReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs the configured experiment: per trial, draw the influencer set (if
/// any), realize the graph, evaluate every requested estimand; then attach
/// the matching analytic bounds and the 3-sigma comparisons.
pub fn run_monte_carlo(config: &ExperimentConfig) -> anyhow::Result<MonteCarloReport> {
    config.validate().map_err(|e| anyhow!("config: {e}"))?;
    let spec = config.model.build().context("building model")?;
    if let Some(scheme) = &config.scenario {
        scheme
            .validate(spec.n())
            .context("scenario does not fit the model")?;
    }
    let needs_components = config
        .outputs
        .iter()
        .any(|o| !matches!(o, EstimandSpec::Influence));
    if needs_components && !spec.undirected() {
        bail!("config: component estimands require an undirected model");
    }

    let hazard = spec_hazard_radius(&spec).context("hazard radius")?;
    let per_trial: Vec<Vec<f64>> = (0..config.trials)
        .into_par_iter()
        .map(|index| run_trial(&spec, config, index))
        .collect::<hazard_core::Result<Vec<_>>>()?;

    let mut estimates = Vec::new();
    for (k, output) in config.outputs.iter().enumerate() {
        let column: Vec<f64> = per_trial.iter().map(|row| row[k]).collect();
        estimates.push(summarize(output.name(), &column, config.master_seed));
    }

    let mut bounds = Vec::new();
    let mut percolation = None;
    let mut checks = Vec::new();
    if config.with_bounds {
        let rho = hazard.rho_h;
        let n = spec.n();
        if let Some(scheme) = &config.scenario {
            let pair: Vec<(String, BoundReport)> = match scheme {
                InfluencerScheme::Fixed { nodes } => {
                    let n0 = nodes.len();
                    vec![
                        ("worst_case".into(), worst_case_bound(n, n0, rho)?),
                        (
                            "worst_case_closed".into(),
                            worst_case_closed_form(n, n0, rho)?,
                        ),
                    ]
                }
                InfluencerScheme::UniformK { n0 } => vec![
                    ("uniform".into(), uniform_bound(n, *n0, rho)?),
                    ("uniform_closed".into(), uniform_closed_form(n, *n0, rho)?),
                ],
                InfluencerScheme::Bernoulli { q } => vec![
                    ("bernoulli".into(), bernoulli_bound(n, *q, rho)?),
                    (
                        "bernoulli_closed".into(),
                        bernoulli_closed_form(n, *q, rho)?,
                    ),
                ],
            };
            if let Some(est) = estimates.iter().find(|e| e.name == "influence") {
                for (name, report) in &pair {
                    checks.push(BoundCheck::new(
                        est.name.clone(),
                        name.clone(),
                        report.bound,
                        est,
                    ));
                }
            }
            bounds.extend(pair.into_iter().map(|(_, r)| r));
        }
        let ms: Vec<usize> = config
            .outputs
            .iter()
            .filter_map(|o| match o {
                EstimandSpec::NAtLeast { m } => Some(*m),
                _ => None,
            })
            .collect();
        if needs_components {
            let report = percolation_report(n, rho, &ms)?;
            for est in &estimates {
                if est.name == "c1" {
                    checks.push(BoundCheck::new(
                        est.name.clone(),
                        "giant_component".into(),
                        report.c1.bound,
                        est,
                    ));
                }
            }
            for (m, entry) in &report.nm {
                if let Some(est) = estimates
                    .iter()
                    .find(|e| e.name == format!("n_at_least({m})"))
                {
                    checks.push(BoundCheck::new(
                        est.name.clone(),
                        format!("n_components({m})"),
                        entry.minimized,
                        est,
                    ));
                    checks.push(BoundCheck::new(
                        est.name.clone(),
                        format!("n_components_closed({m})"),
                        entry.closed_form,
                        est,
                    ));
                }
            }
            percolation = Some(report);
        }
        for output in &config.outputs {
            match output {
                EstimandSpec::LinkpercoLhs { a } => {
                    let rhs = gamma(rho, *a, DEFAULT_TOL).value * n as f64;
                    if let Some(est) = estimates.iter().find(|e| e.name == output.name()) {
                        checks.push(BoundCheck::new(
                            est.name.clone(),
                            format!("linkperco_rhs({a})"),
                            rhs,
                            est,
                        ));
                    }
                }
                EstimandSpec::C1Transform { a } => {
                    let rhs = hazard_core::percolation::implicit_giant_rhs(n, rho, *a)?;
                    if let Some(est) = estimates.iter().find(|e| e.name == output.name()) {
                        checks.push(BoundCheck::new(
                            est.name.clone(),
                            format!("implicit_giant_rhs({a})"),
                            rhs,
                            est,
                        ));
                    }
                }
                _ => {}
            }
        }
    }

    Ok(MonteCarloReport {
        version: TOOL_VERSION.to_string(),
        config_hash: config_hash(config),
        master_seed: config.master_seed,
        model: spec.label().to_string(),
        n: spec.n(),
        scenario: config.scenario.as_ref().map(|s| s.label()),
        hazard,
        estimates,
        bounds,
        percolation,
        checks,
    })
}

fn run_trial(
    spec: &GraphSpec,
    config: &ExperimentConfig,
    index: u64,
) -> hazard_core::Result<Vec<f64>> {
    let seed = TrialSeed::new(config.master_seed, index);
    let influencers = match &config.scenario {
        Some(scheme) => {
            let mut rng = seed.rng(StreamDomain::Scenario);
            Some(draw_influencers(scheme, spec.n(), &mut rng)?)
        }
        None => None,
    };
    let needs_components = config
        .outputs
        .iter()
        .any(|o| !matches!(o, EstimandSpec::Influence));

    let mut influence_value = None;
    let mut stats = None;
    if spec.undirected() {
        let view = sample_component_view(spec, &seed)?;
        if let Some(influencers) = &influencers {
            influence_value = Some(view.influence_of(influencers) as f64);
        }
        if needs_components {
            stats = Some(view.stats());
        }
    } else {
        let graph = sample_graph(spec, &seed);
        if let Some(influencers) = &influencers {
            influence_value = Some(reachable_set(&graph, influencers)?.len() as f64);
        }
    }

    config
        .outputs
        .iter()
        .map(|output| match output {
            EstimandSpec::Influence => influence_value
                .ok_or_else(|| hazard_core::Error::Domain("influence needs a scenario".into())),
            EstimandSpec::C1 => Ok(stats.as_ref().unwrap().largest() as f64),
            EstimandSpec::NAtLeast { m } => Ok(stats.as_ref().unwrap().n_at_least(*m) as f64),
            EstimandSpec::LinkpercoLhs { a } => Ok(stats.as_ref().unwrap().linkperco_lhs(*a)),
            EstimandSpec::C1Transform { a } => Ok(stats.as_ref().unwrap().c1_transform(*a)),
        })
        .collect()
}

/// Outcome of the link-percolation inequality check
/// `E[sum_k C_k (1 - e^{-a C_k})] <= gamma(rho_H, a) * n`.
#[derive(Debug, Clone, Serialize)]
pub struct LinkpercoOutcome {
    pub rho_h: f64,
    pub a: f64,
    pub lhs_mean: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn run_linkperco_check(
    spec: &GraphSpec,
    a: f64,
    trials: u64,
    master_seed: u64,
) -> anyhow::Result<LinkpercoOutcome> {
    if !(a > 0.0) {
        bail!("free parameter a must be > 0");
    }
    let hazard = spec_hazard_radius(spec)?;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let seed = TrialSeed::new(master_seed, index);
            sample_component_view(spec, &seed).map(|view| view.stats().linkperco_lhs(a))
        })
        .collect::<hazard_core::Result<Vec<_>>>()?;
    let est = summarize("linkperco_lhs".into(), &values, master_seed);
    let rhs = gamma(hazard.rho_h, a, DEFAULT_TOL).value * spec.n() as f64;
    Ok(LinkpercoOutcome {
        rho_h: hazard.rho_h,
        a,
        lhs_mean: est.mean,
        lhs_stderr: est.stderr,
        rhs,
        pass: est.mean <= rhs + SIGMA_SLACK * est.stderr,
    })
}

/// Applies a sweep value to the model template.
pub fn apply_sweep_param(model: &ModelSpec, param: &str, value: f64) -> anyhow::Result<ModelSpec> {
    let mut model = model.clone();
    match (&mut model, param) {
        (ModelSpec::Erdos { c, .. }, "c") => *c = value,
        (ModelSpec::Star { p, .. }, "p") | (ModelSpec::Grid { p, .. }, "p") => *p = value,
        (ModelSpec::RandomStar { a, .. }, "a") => *a = value,
        (ModelSpec::RandomStar { b, .. }, "b") => *b = value,
        _ => bail!("model does not expose sweep parameter `{param}`"),
    }
    Ok(model)
}

/// One row of a sweep table (long format: one row per estimand).
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub n: usize,
    pub rho_h: f64,
    pub rho_p: f64,
    pub regime: String,
    pub estimand: String,
    pub mean: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
    pub bound_closed: Option<f64>,
    pub pass: bool,
}

/// Runs the experiment at every grid value of `param`. Trials reuse the same
/// master seed across grid points (common random numbers).
pub fn run_sweep(
    model: &ModelSpec,
    param: &str,
    values: &[f64],
    config: &ExperimentConfig,
) -> anyhow::Result<Vec<SweepRow>> {
    if values.is_empty() {
        bail!("sweep grid is empty");
    }
    let mut rows = Vec::new();
    for &value in values {
        let mut point = config.clone();
        point.model = apply_sweep_param(model, param, value)?;
        let report = run_monte_carlo(&point)?;
        let regime = report
            .bounds
            .first()
            .map(|b| b.regime.to_string())
            .or_else(|| report.percolation.as_ref().map(|p| p.c1.regime.to_string()))
            .unwrap_or_else(|| "n/a".into());
        for est in &report.estimates {
            let matching: Vec<&BoundCheck> = report
                .checks
                .iter()
                .filter(|c| c.estimand == est.name)
                .collect();
            let bound = matching.first().map(|c| c.bound);
            let bound_closed = matching.get(1).map(|c| c.bound);
            rows.push(SweepRow {
                param: param.to_string(),
                value,
                n: report.n,
                rho_h: report.hazard.rho_h,
                rho_p: report.hazard.rho_p,
                regime: regime.clone(),
                estimand: est.name.clone(),
                mean: est.mean,
                stderr: est.stderr,
                bound,
                bound_closed,
                pass: matching.iter().all(|c| c.pass),
            });
        }
    }
    Ok(rows)
}

/// One row of the tightness scaling study.
#[derive(Debug, Clone, Serialize)]
pub struct TightnessRow {
    pub n: usize,
    pub hub_p: f64,
    pub background_p: f64,
    pub rho_h: f64,
    pub trials: u64,
    pub sigma_mean: f64,
    pub sigma_stderr: f64,
    /// `sqrt_n`, `n_two_thirds` or `linear`.
    pub normalization: String,
    pub normalized: f64,
    /// gamma0(rho) in the supercritical construction.
    pub reference: Option<f64>,
}

/// Hub-plus-background constructions whose influence meets the bounds'
/// growth orders: `a = rho/sqrt(n-1), b = 0` below the threshold and
/// `a = 1/sqrt(n ln n), b = rho/n` at or above it.
pub fn run_tightness(
    rho: f64,
    sizes: &[usize],
    trials: u64,
    master_seed: u64,
) -> anyhow::Result<Vec<TightnessRow>> {
    if !(rho > 0.0) {
        bail!("tightness study needs rho > 0");
    }
    let mut rows = Vec::new();
    for &n in sizes {
        if n < 10 {
            bail!("tightness sizes must be >= 10");
        }
        let (a, b) = if rho < 1.0 {
            (rho / ((n - 1) as f64).sqrt(), 0.0)
        } else {
            (1.0 / ((n as f64) * (n as f64).ln()).sqrt(), rho / n as f64)
        };
        let spec = hazard_core::random_star_spec(n, a, b)?;
        let hazard = spec_hazard_radius(&spec)?;
        let values: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|index| {
                let seed = TrialSeed::new(master_seed, index);
                sample_component_view(&spec, &seed).map(|view| view.influence_of(&[0]) as f64)
            })
            .collect::<hazard_core::Result<Vec<_>>>()?;
        let est = summarize("influence".into(), &values, master_seed);
        let (normalization, scale, reference) = if rho < 1.0 {
            ("sqrt_n".to_string(), (n as f64).sqrt(), None)
        } else if rho == 1.0 {
            ("n_two_thirds".to_string(), (n as f64).powf(2.0 / 3.0), None)
        } else {
            (
                "linear".to_string(),
                n as f64,
                Some(gamma0(rho, DEFAULT_TOL).value),
            )
        };
        rows.push(TightnessRow {
            n,
            hub_p: a,
            background_p: b,
            rho_h: hazard.rho_h,
            trials,
            sigma_mean: est.mean,
            sigma_stderr: est.stderr,
            normalization,
            normalized: est.mean / scale,
            reference,
        });
    }
    Ok(rows)
}

/// A deterministic random small spec for enumeration-based validation:
/// n <= 12 nodes, at most `max_edges` entries.
pub fn random_small_spec(rng: &mut impl Rng, max_edges: usize) -> GraphSpec {
    let n = rng.random_range(3..=12usize);
    let undirected = rng.random::<f64>() < 0.7;
    let available = if undirected {
        n * (n - 1) / 2
    } else {
        n * (n - 1)
    };
    let target = rng.random_range(1..=max_edges.min(14).min(available));
    let mut seen = std::collections::BTreeSet::new();
    let mut entries = Vec::new();
    while entries.len() < target {
        let i = rng.random_range(0..n as u32);
        let j = rng.random_range(0..n as u32);
        if i == j {
            continue;
        }
        let key = if undirected && i > j { (j, i) } else { (i, j) };
        if seen.insert(key) {
            let p = rng.random_range(0.05..0.9);
            entries.push((key.0, key.1, p));
        }
    }
    GraphSpec::from_entries(n, undirected, "random-small", entries).expect("valid by construction")
}

/// One named pass/fail record of the validation battery.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryRow {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

/// The standard validation battery: exact-enumeration checks on randomized
/// small specs, an exact zero-radius equality, a subcritical percolation
/// run and two link-percolation checks.
pub fn validate_battery(
    master_seed: u64,
    small_specs: usize,
    trials: u64,
) -> anyhow::Result<Vec<BatteryRow>> {
    let mut rows = Vec::new();
    let mut push = |name: String, detail: String, pass: bool| {
        rows.push(BatteryRow { name, detail, pass });
    };

    // Exact enumeration vs theorem bounds on randomized small instances.
    let mut rng = TrialSeed::new(master_seed, 0).rng(StreamDomain::Scenario);
    let mut worst_margin = f64::INFINITY;
    let mut all_pass = true;
    for _ in 0..small_specs {
        let spec = random_small_spec(&mut rng, 14);
        let hazard = spec_hazard_radius(&spec)?;
        let n = spec.n();
        let n0 = rng.random_range(1..=n / 2 + 1);
        let fixed = InfluencerScheme::UniformK { n0 };
        // Fixed set: first n0 nodes.
        let set = InfluencerScheme::fixed((0..n0 as u32).collect());
        let exact = exact_influence_scheme(&spec, &set)?;
        let bound = worst_case_bound(n, n0, hazard.rho_h)?.bound;
        all_pass &= exact <= bound + 1e-9;
        worst_margin = worst_margin.min(bound - exact);

        let exact_u = exact_influence_scheme(&spec, &fixed)?;
        let bound_u = uniform_bound(n, n0, hazard.rho_h)?.bound;
        all_pass &= exact_u <= bound_u + 1e-9;
        worst_margin = worst_margin.min(bound_u - exact_u);

        let q = rng.random_range(0.02..0.5);
        let exact_b = exact_influence_scheme(&spec, &InfluencerScheme::Bernoulli { q })?;
        let bound_b = bernoulli_bound(n, q, hazard.rho_h)?.bound;
        all_pass &= exact_b <= bound_b + 1e-9;
        worst_margin = worst_margin.min(bound_b - exact_b);
    }
    push(
        format!("exact_enumeration_x{small_specs}"),
        format!("worst margin {worst_margin:.3e}"),
        all_pass,
    );

    // Zero hazard radius: bound and exact influence both equal n0.
    let empty = hazard_core::erdos_spec(40, 0.0)?;
    let exact = exact_influence_scheme(&empty, &InfluencerScheme::fixed(vec![0, 1, 2]))?;
    let bound = worst_case_bound(40, 3, 0.0)?.bound;
    push(
        "zero_radius_equality".into(),
        format!("exact {exact} bound {bound}"),
        exact == 3.0 && bound == 3.0,
    );

    // Subcritical giant-component bound on a sampled model.
    let spec = hazard_core::erdos_spec(10_000, 0.5)?;
    let config = ExperimentConfig {
        model: ModelSpec::Erdos { n: 10_000, c: 0.5 },
        scenario: None,
        trials,
        master_seed,
        outputs: vec![EstimandSpec::C1],
        with_bounds: true,
    };
    let report = run_monte_carlo(&config)?;
    let giant = report
        .checks
        .iter()
        .find(|c| c.bound_name == "giant_component")
        .expect("giant check present");
    push(
        "subcritical_giant_component".into(),
        format!("mean {:.2} bound {:.2}", giant.mean, giant.bound),
        giant.pass,
    );
    drop(spec);

    // Link-percolation inequality at and above the threshold.
    for (c, a) in [(1.0, 0.05), (2.0, 0.5)] {
        let spec = hazard_core::erdos_spec(1000, c)?;
        let outcome = run_linkperco_check(&spec, a, trials.max(500), master_seed)?;
        push(
            format!("linkperco(c={c},a={a})"),
            format!("lhs {:.2} rhs {:.2}", outcome.lhs_mean, outcome.rhs),
            outcome.pass,
        );
    }

    Ok(rows)
}
