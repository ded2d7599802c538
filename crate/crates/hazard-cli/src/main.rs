//! `hazard`: evaluate spectral influence/percolation bounds and validate
//! them with seeded Monte Carlo experiments.
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 usage or config
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hazard_cli::config::{load_config, parse_scenario, EstimandSpec, ExperimentConfig, ModelSpec};
use hazard_cli::experiment::{
    run_monte_carlo, run_sweep, run_tightness, validate_battery, MonteCarloReport, TOOL_VERSION,
};
use hazard_cli::report::{config_hash, fmt_f64, write_json, CsvTable};
use hazard_core::bounds::{
    bernoulli_bound, bernoulli_closed_form, draief_bound, sir_hazard_radius, sir_threshold_report,
    sir_transmission_probability, uniform_bound, uniform_closed_form, worst_case_bound,
    worst_case_closed_form, IncubationDist, SirParams,
};
use hazard_core::graph::InfluencerScheme;
use hazard_core::hazard::{
    hazard_radius, support_spectral_radius, DEFAULT_MAX_ITER, DEFAULT_SPECTRAL_TOL,
};
use hazard_core::percolation::{percolation_report, site_percolation_hazard};
use hazard_core::sim::{sample_site_percolation, TrialSeed};
use hazard_core::spec_hazard_radius;

#[derive(Parser)]
#[command(
    name = "hazard",
    version = TOOL_VERSION,
    about = "Spectral influence bounds for random graphs, with Monte Carlo validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// erdos | norros-reittu | star | grid | random-star | file
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Mean-degree parameter of the homogeneous model (p = c/n).
    #[arg(long)]
    c: Option<f64>,
    /// Edge probability (star, grid).
    #[arg(long)]
    p: Option<f64>,
    /// Grid dimension.
    #[arg(long)]
    dim: Option<u32>,
    /// Grid side length (torus).
    #[arg(long)]
    side: Option<usize>,
    /// Hub probability of the random star.
    #[arg(long)]
    a: Option<f64>,
    /// Background probability of the random star.
    #[arg(long)]
    b: Option<f64>,
    /// Comma-separated weights of the rank-one model.
    #[arg(long)]
    weights: Option<String>,
    /// Edge-list file path.
    #[arg(long)]
    path: Option<PathBuf>,
}

impl ModelArgs {
    fn is_present(&self) -> bool {
        self.model.is_some()
    }

    fn to_model(&self) -> anyhow::Result<ModelSpec> {
        let kind = self
            .model
            .as_deref()
            .ok_or_else(|| anyhow::anyhow!("--model is required"))?;
        let need = |opt: Option<f64>, name: &str| {
            opt.ok_or_else(|| anyhow::anyhow!("--{name} is required for --model {kind}"))
        };
        let need_n = || {
            self.n
                .ok_or_else(|| anyhow::anyhow!("--n is required for --model {kind}"))
        };
        Ok(match kind {
            "erdos" => ModelSpec::Erdos {
                n: need_n()?,
                c: need(self.c, "c")?,
            },
            "norros-reittu" => {
                let text = self
                    .weights
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("--weights is required for norros-reittu"))?;
                let weights = text
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()?;
                ModelSpec::NorrosReittu { weights }
            }
            "star" => ModelSpec::Star {
                n: need_n()?,
                p: need(self.p, "p")?,
            },
            "grid" => ModelSpec::Grid {
                dim: self
                    .dim
                    .ok_or_else(|| anyhow::anyhow!("--dim is required for grid"))?,
                side: self
                    .side
                    .ok_or_else(|| anyhow::anyhow!("--side is required for grid"))?,
                p: need(self.p, "p")?,
            },
            "random-star" => ModelSpec::RandomStar {
                n: need_n()?,
                a: need(self.a, "a")?,
                b: need(self.b, "b")?,
            },
            "file" => ModelSpec::File {
                path: self
                    .path
                    .clone()
                    .ok_or_else(|| anyhow::anyhow!("--path is required for file"))?,
            },
            other => anyhow::bail!("unknown model `{other}`"),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the influence bounds (and percolation bounds) of a model.
    Bound {
        #[command(flatten)]
        model: ModelArgs,
        /// fixed:<ids> | uniform:<n0> | bernoulli:<q>
        #[arg(long)]
        scenario: Option<String>,
        /// Component-size thresholds for the N(m) bounds.
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Monte Carlo estimation of influence and component statistics.
    Simulate {
        /// JSON experiment config; flags below override nothing when set.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        scenario: Option<String>,
        /// influence | c1 | n_at_least:<m> | linkperco:<a> | c1_transform:<a>
        #[arg(long, value_delimiter = ',')]
        outputs: Vec<String>,
        /// Defaults to 10000 trials for n <= 1000 and 200 above.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Bond and site percolation experiments.
    Percolate {
        #[command(subcommand)]
        command: PercolateCommand,
    },
    /// SIR epidemic thresholds and final-size simulation.
    Sir {
        /// Adjacency spectral radius; computed from --model when omitted.
        #[arg(long)]
        rho_a: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        beta: f64,
        /// Exponential recovery rate (shortcut for --incubation exp:<delta>).
        #[arg(long)]
        delta: Option<f64>,
        /// exp:<rate> | lognormal:<mu>,<sigma> | det:<d>
        #[arg(long)]
        incubation: Option<String>,
        /// Evaluate the threshold conditions on a grid of beta/delta ratios.
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<f64>,
        /// Simulate final sizes from this scenario (requires --model).
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Information-cascade influence estimation.
    Cascade {
        /// dtic (edge probabilities) | ctic (edge rate integrals)
        #[arg(long)]
        kind: String,
        /// Edge-list file: `n <count> directed` then `i j <value>`.
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sweep a model parameter across a grid.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// c | p | a | b
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_delimiter = ',')]
        outputs: Vec<String>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Influence scaling of the hub-plus-background construction.
    Tightness {
        #[arg(long)]
        rho: f64,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the standard validation battery.
    Validate {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Number of randomized enumeration specs.
        #[arg(long, default_value_t = 25)]
        specs: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PercolateCommand {
    /// Analytic bounds only.
    Bound {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Monte Carlo component statistics vs the bounds.
    Run {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        /// Also check the link-percolation inequality at this a.
        #[arg(long)]
        a: Option<f64>,
        /// Defaults to 10000 trials for n <= 1000 and 200 above.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Site percolation on the support of a model.
    Site {
        #[command(flatten)]
        model: ModelArgs,
        /// Uniform node-survival probability.
        #[arg(long)]
        site_p: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Trial-count policy: enough samples for tight intervals on small
/// instances, and a lighter budget once n reaches the 1e4..1e5 range.
fn default_trials(model: &ModelSpec) -> u64 {
    let n = match model.build() {
        Ok(spec) => spec.n(),
        Err(_) => return 1000,
    };
    if n <= 1000 {
        10_000
    } else {
        200
    }
}

fn parse_outputs(texts: &[String]) -> anyhow::Result<Vec<EstimandSpec>> {
    let mut outputs = Vec::new();
    for text in texts {
        let spec = match text.split_once(':') {
            None => match text.as_str() {
                "influence" => EstimandSpec::Influence,
                "c1" => EstimandSpec::C1,
                other => anyhow::bail!("unknown estimand `{other}`"),
            },
            Some(("n_at_least", arg)) => EstimandSpec::NAtLeast { m: arg.parse()? },
            Some(("linkperco", arg)) => EstimandSpec::LinkpercoLhs { a: arg.parse()? },
            Some(("c1_transform", arg)) => EstimandSpec::C1Transform { a: arg.parse()? },
            Some((other, _)) => anyhow::bail!("unknown estimand `{other}`"),
        };
        outputs.push(spec);
    }
    Ok(outputs)
}

fn parse_incubation(
    delta: Option<f64>,
    incubation: Option<&str>,
) -> anyhow::Result<IncubationDist> {
    if let Some(text) = incubation {
        let (kind, args) = text
            .split_once(':')
            .ok_or_else(|| anyhow::anyhow!("incubation `{text}` must look like kind:args"))?;
        return Ok(match kind {
            "exp" => IncubationDist::Exponential {
                rate: args.parse()?,
            },
            "det" => IncubationDist::Deterministic { d: args.parse()? },
            "lognormal" => {
                let (mu, sigma) = args
                    .split_once(',')
                    .ok_or_else(|| anyhow::anyhow!("lognormal needs mu,sigma"))?;
                IncubationDist::LogNormal {
                    mu: mu.trim().parse()?,
                    sigma: sigma.trim().parse()?,
                }
            }
            other => anyhow::bail!("unknown incubation kind `{other}`"),
        });
    }
    match delta {
        Some(rate) => Ok(IncubationDist::Exponential { rate }),
        None => anyhow::bail!("either --delta or --incubation is required"),
    }
}

fn emit_json(value: &impl Serialize, json: Option<&PathBuf>) -> anyhow::Result<()> {
    match json {
        Some(path) => write_json(path, value)?,
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

fn report_csv(report: &MonteCarloReport) -> CsvTable {
    let mut table = CsvTable::new(&[
        "model",
        "n",
        "scenario",
        "rho_h",
        "rho_p",
        "estimand",
        "mean",
        "stderr",
        "trials",
        "bound_name",
        "bound",
        "margin",
        "pass",
    ]);
    table.metadata(report.master_seed, &report.config_hash);
    for est in &report.estimates {
        let matching: Vec<_> = report
            .checks
            .iter()
            .filter(|c| c.estimand == est.name)
            .collect();
        if matching.is_empty() {
            table.push_row(vec![
                report.model.clone(),
                report.n.to_string(),
                report.scenario.clone().unwrap_or_default(),
                fmt_f64(report.hazard.rho_h),
                fmt_f64(report.hazard.rho_p),
                est.name.clone(),
                fmt_f64(est.mean),
                fmt_f64(est.stderr),
                est.trials.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        for check in matching {
            table.push_row(vec![
                report.model.clone(),
                report.n.to_string(),
                report.scenario.clone().unwrap_or_default(),
                fmt_f64(report.hazard.rho_h),
                fmt_f64(report.hazard.rho_p),
                est.name.clone(),
                fmt_f64(est.mean),
                fmt_f64(est.stderr),
                est.trials.to_string(),
                check.bound_name.clone(),
                fmt_f64(check.bound),
                fmt_f64(check.margin),
                check.pass.to_string(),
            ]);
        }
    }
    table
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Bound {
            model,
            scenario,
            m,
            json,
        } => {
            let model = model.to_model()?;
            let spec = model.build()?;
            let hazard = spec_hazard_radius(&spec)?;
            let mut bounds = Vec::new();
            if let Some(text) = scenario.as_deref() {
                let scheme = parse_scenario(text).map_err(|e| anyhow::anyhow!(e))?;
                scheme.validate(spec.n())?;
                let rho = hazard.rho_h;
                match &scheme {
                    InfluencerScheme::Fixed { nodes } => {
                        bounds.push(worst_case_bound(spec.n(), nodes.len(), rho)?);
                        bounds.push(worst_case_closed_form(spec.n(), nodes.len(), rho)?);
                    }
                    InfluencerScheme::UniformK { n0 } => {
                        bounds.push(uniform_bound(spec.n(), *n0, rho)?);
                        bounds.push(uniform_closed_form(spec.n(), *n0, rho)?);
                    }
                    InfluencerScheme::Bernoulli { q } => {
                        bounds.push(bernoulli_bound(spec.n(), *q, rho)?);
                        bounds.push(bernoulli_closed_form(spec.n(), *q, rho)?);
                    }
                }
            }
            let percolation = percolation_report(spec.n(), hazard.rho_h, &m)?;
            #[derive(Serialize)]
            struct BoundOutput {
                version: String,
                model: String,
                n: usize,
                hazard: hazard_core::HazardSummary,
                bounds: Vec<hazard_core::bounds::BoundReport>,
                percolation: hazard_core::percolation::PercolationBoundReport,
            }
            let output = BoundOutput {
                version: TOOL_VERSION.into(),
                model: spec.label().into(),
                n: spec.n(),
                hazard,
                bounds,
                percolation,
            };
            emit_json(&output, json.as_ref())?;
            Ok(true)
        }
        Command::Simulate {
            config,
            model,
            scenario,
            outputs,
            trials,
            seed,
            out,
            json,
        } => {
            let config = match config {
                Some(path) => load_config(path)?,
                None => {
                    if !model.is_present() {
                        anyhow::bail!("--model or --config is required");
                    }
                    let model = model.to_model()?;
                    let scenario = scenario
                        .as_deref()
                        .map(parse_scenario)
                        .transpose()
                        .map_err(|e| anyhow::anyhow!(e))?;
                    let outputs = if outputs.is_empty() {
                        vec![EstimandSpec::Influence]
                    } else {
                        parse_outputs(&outputs)?
                    };
                    let trials = trials.unwrap_or_else(|| default_trials(&model));
                    ExperimentConfig {
                        model,
                        scenario,
                        trials,
                        master_seed: seed,
                        outputs,
                        with_bounds: true,
                    }
                }
            };
            let report = run_monte_carlo(&config)?;
            if let Some(path) = &out {
                report_csv(&report).write(path)?;
            }
            emit_json(&report, json.as_ref())?;
            Ok(report.all_checks_pass())
        }
        Command::Percolate { command } => run_percolate(command),
        Command::Sir {
            rho_a,
            model,
            beta,
            delta,
            incubation,
            ratios,
            scenario,
            trials,
            seed,
            json,
            out,
        } => {
            let incubation = parse_incubation(delta, incubation.as_deref())?;
            let model_spec = if model.is_present() {
                Some(model.to_model()?)
            } else {
                None
            };
            let built = model_spec.as_ref().map(|m| m.build()).transpose()?;
            let rho_a = match (rho_a, &built) {
                (Some(r), _) => r,
                (None, Some(spec)) => support_spectral_radius(spec)?,
                (None, None) => anyhow::bail!("--rho-a or --model is required"),
            };
            let report = sir_threshold_report(&SirParams {
                beta,
                incubation: incubation.clone(),
                rho_a,
            })?;

            #[derive(Serialize)]
            struct RatioRow {
                ratio: f64,
                rho_h: f64,
                classical_holds: bool,
                exp_form_holds: bool,
            }
            let mut ratio_rows = Vec::new();
            if let IncubationDist::Exponential { rate } = &incubation {
                for &ratio in &ratios {
                    let b = ratio * rate;
                    let r = sir_threshold_report(&SirParams {
                        beta: b,
                        incubation: incubation.clone(),
                        rho_a,
                    })?;
                    let get = |name: &str| {
                        r.conditions
                            .iter()
                            .find(|c| c.name == name)
                            .map(|c| c.holds)
                            .unwrap_or(false)
                    };
                    ratio_rows.push(RatioRow {
                        ratio,
                        rho_h: r.rho_h,
                        classical_holds: get("classical_beta_rho_below_delta"),
                        exp_form_holds: get("exponential_exp_form"),
                    });
                }
            }

            let mut simulation = None;
            if trials > 0 {
                let spec = built
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("--model is required to simulate"))?;
                let scheme = scenario
                    .as_deref()
                    .map(parse_scenario)
                    .transpose()
                    .map_err(|e| anyhow::anyhow!(e))?
                    .unwrap_or(InfluencerScheme::Fixed { nodes: vec![0] });
                scheme.validate(spec.n())?;
                let mut edges = Vec::new();
                spec.for_each_entry(|i, j, p| {
                    if p > 0.0 && i != j {
                        edges.push((i, j));
                    }
                });
                let rho_h = sir_hazard_radius(rho_a, beta, &incubation)?;
                let n = spec.n();
                let values: Vec<f64> = (0..trials)
                    .map(|t| {
                        let seed = TrialSeed::new(seed, t);
                        let mut rng = seed.rng(hazard_core::sim::StreamDomain::Scenario);
                        let influencers = hazard_core::sim::draw_influencers(&scheme, n, &mut rng)?;
                        let set = hazard_core::sim::sample_sir_final(
                            n,
                            &edges,
                            beta,
                            &incubation,
                            &influencers,
                            &seed,
                        )?;
                        Ok(set.len() as f64)
                    })
                    .collect::<hazard_core::Result<Vec<_>>>()?;
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (values.len().max(2) - 1) as f64;
                let stderr = (var / values.len() as f64).sqrt();
                let n0 = match &scheme {
                    InfluencerScheme::Fixed { nodes } => nodes.len(),
                    InfluencerScheme::UniformK { n0 } => *n0,
                    InfluencerScheme::Bernoulli { .. } => 1,
                };
                let bound = worst_case_bound(n, n0.max(1), rho_h)?;
                // Classical comparison bound, defined when beta*rho(A) < delta.
                let mut comparison = None;
                if let IncubationDist::Exponential { rate } = &incubation {
                    if beta * rho_a < *rate {
                        comparison = Some(draief_bound(n, n0.max(1), beta, *rate, rho_a)?);
                    }
                }
                #[derive(Serialize)]
                struct SirSim {
                    rho_h: f64,
                    mean: f64,
                    stderr: f64,
                    trials: u64,
                    bound: f64,
                    draief_bound: Option<f64>,
                    pass: bool,
                }
                simulation = Some(SirSim {
                    rho_h,
                    mean,
                    stderr,
                    trials,
                    bound: bound.bound,
                    draief_bound: comparison,
                    pass: mean <= bound.bound + 3.0 * stderr,
                });
            }

            #[derive(Serialize)]
            struct SirOutput<R: Serialize, S: Serialize> {
                version: String,
                master_seed: u64,
                transmission_probability: f64,
                thresholds: hazard_core::bounds::SirThresholdReport,
                ratio_table: Vec<R>,
                simulation: Option<S>,
            }
            let output = SirOutput {
                version: TOOL_VERSION.into(),
                master_seed: seed,
                transmission_probability: sir_transmission_probability(beta, &incubation)?,
                thresholds: report,
                ratio_table: ratio_rows,
                simulation,
            };
            if let Some(path) = &out {
                let mut table = CsvTable::new(&["ratio", "rho_h", "classical", "exp_form"]);
                table.metadata(seed, &config_hash(&beta));
                for row in &output.ratio_table {
                    table.push_row(vec![
                        fmt_f64(row.ratio),
                        fmt_f64(row.rho_h),
                        row.classical_holds.to_string(),
                        row.exp_form_holds.to_string(),
                    ]);
                }
                table.write(path)?;
            }
            let pass = output.simulation.as_ref().map(|s| s.pass).unwrap_or(true);
            emit_json(&output, json.as_ref())?;
            Ok(pass)
        }
        Command::Cascade {
            kind,
            path,
            scenario,
            trials,
            seed,
            json,
        } => {
            let scheme = parse_scenario(&scenario).map_err(|e| anyhow::anyhow!(e))?;
            let (spec, label) = match kind.as_str() {
                "dtic" => (hazard_core::from_edge_list(&path)?, "dtic"),
                "ctic" => {
                    let (n, lambdas) = read_rate_file(&path)?;
                    (
                        hazard_core::sim::ctic_to_dtic_spec(n, &lambdas, "ctic")?,
                        "ctic",
                    )
                }
                other => anyhow::bail!("unknown cascade kind `{other}` (dtic|ctic)"),
            };
            let config = ExperimentConfig {
                model: ModelSpec::File { path: path.clone() },
                scenario: Some(scheme.clone()),
                trials,
                master_seed: seed,
                outputs: vec![EstimandSpec::Influence],
                with_bounds: true,
            };
            // Run directly on the built spec (the config's model field is
            // only used for hashing here).
            let hazard = spec_hazard_radius(&spec)?;
            let values: Vec<f64> = (0..trials)
                .map(|t| {
                    let trial = TrialSeed::new(seed, t);
                    let mut rng = trial.rng(hazard_core::sim::StreamDomain::Scenario);
                    let influencers =
                        hazard_core::sim::draw_influencers(&scheme, spec.n(), &mut rng)?;
                    let set = hazard_core::sim::sample_dtic(&spec, &influencers, &trial)?;
                    Ok(set.len() as f64)
                })
                .collect::<hazard_core::Result<Vec<_>>>()?;
            let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
            let var = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
            } else {
                0.0
            };
            let stderr = (var / values.len().max(1) as f64).sqrt();
            let rho = hazard.rho_h;
            let bound = match &scheme {
                InfluencerScheme::Fixed { nodes } => worst_case_bound(spec.n(), nodes.len(), rho)?,
                InfluencerScheme::UniformK { n0 } => uniform_bound(spec.n(), *n0, rho)?,
                InfluencerScheme::Bernoulli { q } => bernoulli_bound(spec.n(), *q, rho)?,
            };
            #[derive(Serialize)]
            struct CascadeOutput {
                version: String,
                master_seed: u64,
                kind: String,
                config_hash: String,
                hazard: hazard_core::HazardSummary,
                mean: f64,
                stderr: f64,
                trials: u64,
                bound: f64,
                pass: bool,
            }
            let output = CascadeOutput {
                version: TOOL_VERSION.into(),
                master_seed: seed,
                kind: label.into(),
                config_hash: config_hash(&config),
                hazard,
                mean,
                stderr,
                trials,
                bound: bound.bound,
                pass: mean <= bound.bound + 3.0 * stderr,
            };
            let pass = output.pass;
            emit_json(&output, json.as_ref())?;
            Ok(pass)
        }
        Command::Sweep {
            model,
            param,
            values,
            scenario,
            outputs,
            trials,
            seed,
            out,
            json,
        } => {
            if values.is_empty() {
                anyhow::bail!("--values must contain at least one grid point");
            }
            let mut model = model;
            match param.as_str() {
                "c" => model.c = model.c.or(Some(values[0])),
                "p" => model.p = model.p.or(Some(values[0])),
                "a" => model.a = model.a.or(Some(values[0])),
                "b" => model.b = model.b.or(Some(values[0])),
                _ => {}
            }
            let model = model.to_model()?;
            let scheme = scenario
                .as_deref()
                .map(parse_scenario)
                .transpose()
                .map_err(|e| anyhow::anyhow!(e))?;
            let outputs = if outputs.is_empty() {
                if scheme.is_some() {
                    vec![EstimandSpec::Influence, EstimandSpec::C1]
                } else {
                    vec![EstimandSpec::C1]
                }
            } else {
                parse_outputs(&outputs)?
            };
            let config = ExperimentConfig {
                model: model.clone(),
                scenario: scheme,
                trials,
                master_seed: seed,
                outputs,
                with_bounds: true,
            };
            let rows = run_sweep(&model, &param, &values, &config)?;
            let mut table = CsvTable::new(&[
                "param",
                "value",
                "n",
                "rho_h",
                "rho_p",
                "regime",
                "estimand",
                "mean",
                "stderr",
                "bound",
                "bound_closed",
                "pass",
            ]);
            table.metadata(seed, &config_hash(&config));
            for row in &rows {
                table.push_row(vec![
                    row.param.clone(),
                    fmt_f64(row.value),
                    row.n.to_string(),
                    fmt_f64(row.rho_h),
                    fmt_f64(row.rho_p),
                    row.regime.clone(),
                    row.estimand.clone(),
                    fmt_f64(row.mean),
                    fmt_f64(row.stderr),
                    row.bound.map(fmt_f64).unwrap_or_default(),
                    row.bound_closed.map(fmt_f64).unwrap_or_default(),
                    row.pass.to_string(),
                ]);
            }
            if let Some(path) = &out {
                table.write(path)?;
            } else if json.is_none() {
                print!("{}", table.render());
            }
            if json.is_some() {
                emit_json(&rows, json.as_ref())?;
            }
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Tightness {
            rho,
            sizes,
            trials,
            seed,
            out,
            json,
        } => {
            let rows = run_tightness(rho, &sizes, trials, seed)?;
            let mut table = CsvTable::new(&[
                "n",
                "hub_p",
                "background_p",
                "rho_h",
                "trials",
                "sigma_mean",
                "sigma_stderr",
                "normalization",
                "normalized",
                "reference",
            ]);
            table.metadata(seed, &config_hash(&rho));
            for row in &rows {
                table.push_row(vec![
                    row.n.to_string(),
                    fmt_f64(row.hub_p),
                    fmt_f64(row.background_p),
                    fmt_f64(row.rho_h),
                    row.trials.to_string(),
                    fmt_f64(row.sigma_mean),
                    fmt_f64(row.sigma_stderr),
                    row.normalization.clone(),
                    fmt_f64(row.normalized),
                    row.reference.map(fmt_f64).unwrap_or_default(),
                ]);
            }
            if let Some(path) = &out {
                table.write(path)?;
            } else if json.is_none() {
                print!("{}", table.render());
            }
            if json.is_some() {
                #[derive(Serialize)]
                struct TightnessOutput<'a> {
                    version: String,
                    master_seed: u64,
                    rho: f64,
                    rows: &'a [hazard_cli::experiment::TightnessRow],
                }
                emit_json(
                    &TightnessOutput {
                        version: TOOL_VERSION.into(),
                        master_seed: seed,
                        rho,
                        rows: &rows,
                    },
                    json.as_ref(),
                )?;
            }
            Ok(true)
        }
        Command::Validate {
            seed,
            specs,
            trials,
            json,
        } => {
            let rows = validate_battery(seed, specs, trials)?;
            let all_pass = rows.iter().all(|r| r.pass);
            for row in &rows {
                println!(
                    "{} {} ({})",
                    if row.pass { "PASS" } else { "FAIL" },
                    row.name,
                    row.detail
                );
            }
            if json.is_some() {
                #[derive(Serialize)]
                struct ValidateOutput<'a> {
                    version: String,
                    master_seed: u64,
                    rows: &'a [hazard_cli::experiment::BatteryRow],
                }
                emit_json(
                    &ValidateOutput {
                        version: TOOL_VERSION.into(),
                        master_seed: seed,
                        rows: &rows,
                    },
                    json.as_ref(),
                )?;
            }
            Ok(all_pass)
        }
    }
}

fn run_percolate(command: PercolateCommand) -> anyhow::Result<bool> {
    match command {
        PercolateCommand::Bound { model, m, json } => {
            let spec = model.to_model()?.build()?;
            let hazard = spec_hazard_radius(&spec)?;
            let report = percolation_report(spec.n(), hazard.rho_h, &m)?;
            #[derive(Serialize)]
            struct PercoBoundOutput {
                version: String,
                model: String,
                hazard: hazard_core::HazardSummary,
                report: hazard_core::percolation::PercolationBoundReport,
            }
            emit_json(
                &PercoBoundOutput {
                    version: TOOL_VERSION.into(),
                    model: spec.label().into(),
                    hazard,
                    report,
                },
                json.as_ref(),
            )?;
            Ok(true)
        }
        PercolateCommand::Run {
            model,
            m,
            a,
            trials,
            seed,
            out,
            json,
        } => {
            let model = model.to_model()?;
            let trials = trials.unwrap_or_else(|| default_trials(&model));
            let mut outputs = vec![EstimandSpec::C1];
            outputs.extend(m.iter().map(|&m| EstimandSpec::NAtLeast { m }));
            if let Some(a) = a {
                outputs.push(EstimandSpec::LinkpercoLhs { a });
            }
            let config = ExperimentConfig {
                model,
                scenario: None,
                trials,
                master_seed: seed,
                outputs,
                with_bounds: true,
            };
            let report = run_monte_carlo(&config)?;
            if let Some(path) = &out {
                report_csv(&report).write(path)?;
            }
            let pass = report.all_checks_pass();
            emit_json(&report, json.as_ref())?;
            Ok(pass)
        }
        PercolateCommand::Site {
            model,
            site_p,
            trials,
            seed,
            json,
        } => {
            let spec = model.to_model()?.build()?;
            let n = spec.n();
            let mut edges = Vec::new();
            spec.for_each_entry(|i, j, p| {
                if p > 0.0 && i != j {
                    edges.push((i, j));
                }
            });
            let probs = vec![site_p; n];
            let matrix = site_percolation_hazard(n, &edges, &probs)?;
            let hazard = hazard_radius(&matrix, DEFAULT_SPECTRAL_TOL, DEFAULT_MAX_ITER)?;
            let report = percolation_report(n, hazard.rho_h, &[])?;
            let values: Vec<f64> = (0..trials)
                .map(|t| {
                    let trial = TrialSeed::new(seed, t);
                    sample_site_percolation(n, &edges, &probs, &trial)
                        .map(|stats| stats.largest() as f64)
                })
                .collect::<hazard_core::Result<Vec<_>>>()?;
            let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
            let var = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
            } else {
                0.0
            };
            let stderr = (var / values.len().max(1) as f64).sqrt();
            #[derive(Serialize)]
            struct SiteOutput {
                version: String,
                master_seed: u64,
                rho_h: f64,
                c1_bound: f64,
                c1_mean: f64,
                c1_stderr: f64,
                trials: u64,
                pass: bool,
            }
            let output = SiteOutput {
                version: TOOL_VERSION.into(),
                master_seed: seed,
                rho_h: hazard.rho_h,
                c1_bound: report.c1.bound,
                c1_mean: mean,
                c1_stderr: stderr,
                trials,
                pass: mean <= report.c1.bound + 3.0 * stderr,
            };
            let pass = output.pass;
            emit_json(&output, json.as_ref())?;
            Ok(pass)
        }
    }
}

/// Reads a directed rate-integral file in the edge-list layout, where the
/// third column is a nonnegative rate integral (values >= 1 are allowed).
fn read_rate_file(path: &PathBuf) -> anyhow::Result<(usize, Vec<(u32, u32, f64)>)> {
    let text = std::fs::read_to_string(path)?;
    let mut n = None;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match n {
            None => {
                if tokens.len() != 3 || tokens[0] != "n" || tokens[2] != "directed" {
                    anyhow::bail!(
                        "{}:{}: expected header `n <count> directed`",
                        path.display(),
                        idx + 1
                    );
                }
                n = Some(tokens[1].parse::<usize>()?);
            }
            Some(count) => {
                if tokens.len() != 3 {
                    anyhow::bail!("{}:{}: expected `i j lambda`", path.display(), idx + 1);
                }
                let i: u32 = tokens[0].parse()?;
                let j: u32 = tokens[1].parse()?;
                let lambda: f64 = tokens[2].parse()?;
                if i as usize >= count || j as usize >= count {
                    anyhow::bail!("{}:{}: node index out of range", path.display(), idx + 1);
                }
                entries.push((i, j, lambda));
            }
        }
    }
    let n = n.ok_or_else(|| anyhow::anyhow!("{}: missing header", path.display()))?;
    Ok((n, entries))
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
