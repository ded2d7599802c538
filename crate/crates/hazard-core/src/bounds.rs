//! Influence upper bounds for the three influencer scenarios, with regime
//! classification, plus the SIR reductions (hazard radius for general
//! incubation laws, epidemic thresholds, and the classical comparison
//! bound).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{gamma, gamma0, gamma1, DEFAULT_TOL};

/// Position of the hazard radius relative to the critical window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        };
        f.write_str(s)
    }
}

/// Whether a report came from the implicit-solver bound or its closed-form
/// relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundForm {
    Implicit,
    ClosedForm,
}

/// An influence upper bound with the intermediate constants that produced
/// it. `bound` is clamped to the trivial bound `n`; `clamped` records
/// whether clamping fired.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound: f64,
    pub regime: Regime,
    pub scenario: String,
    pub form: BoundForm,
    pub constants: BTreeMap<String, f64>,
    pub clamped: bool,
}

fn classify(rho: f64, window: f64) -> Regime {
    if rho < 1.0 - window {
        Regime::Subcritical
    } else if rho > 1.0 + window {
        Regime::Supercritical
    } else {
        Regime::Critical
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Domain(format!(
            "hazard radius {rho} must be finite and >= 0"
        )));
    }
    Ok(())
}

fn finish(
    mut bound: f64,
    n: usize,
    regime: Regime,
    scenario: String,
    form: BoundForm,
    constants: BTreeMap<String, f64>,
) -> BoundReport {
    let mut clamped = false;
    if bound > n as f64 {
        bound = n as f64;
        clamped = true;
    }
    BoundReport {
        bound,
        regime,
        scenario,
        form,
        constants,
        clamped,
    }
}

/// Critical-window half-width for the fixed-set scenario.
pub fn worst_case_window(n: usize, n0: usize) -> f64 {
    (n0 as f64 / (4.0 * (n - n0) as f64)).cbrt()
}

/// Critical-window half-width for the uniform scenario.
pub fn uniform_window(n: usize, n0: usize) -> f64 {
    (n0 as f64 / (2.0 * (n - n0) as f64)).sqrt()
}

/// Critical-window half-width for the Bernoulli scenario.
pub fn bernoulli_window(q: f64) -> f64 {
    (-(1.0 - q).ln() / 2.0).sqrt()
}

fn check_fixed_counts(n: usize, n0: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("graph must have at least one node".into()));
    }
    if n0 < 1 || n0 > n {
        return Err(Error::Domain(format!(
            "influencer count n0 = {n0} must satisfy 1 <= n0 <= n = {n}"
        )));
    }
    Ok(())
}

/// Fixed-set bound: `n0 + gamma1(rho, n0/(n - n0)) * (n - n0)`.
pub fn worst_case_bound(n: usize, n0: usize, rho: f64) -> Result<BoundReport> {
    check_fixed_counts(n, n0)?;
    check_rho(rho)?;
    let scenario = format!("worst-case(n0={n0})");
    let mut constants = BTreeMap::new();
    constants.insert("n0".into(), n0 as f64);
    constants.insert("rho_h".into(), rho);
    let window = if n0 < n {
        worst_case_window(n, n0)
    } else {
        f64::INFINITY
    };
    let regime = classify(rho, window);
    if n0 == n {
        return Ok(finish(
            n as f64,
            n,
            regime,
            scenario,
            BoundForm::Implicit,
            constants,
        ));
    }
    let a = n0 as f64 / (n - n0) as f64;
    let g1 = if rho == 0.0 {
        0.0
    } else {
        gamma1(rho, a, DEFAULT_TOL)?.value
    };
    constants.insert("a".into(), a);
    constants.insert("gamma1".into(), g1);
    let bound = n0 as f64 + g1 * (n - n0) as f64;
    Ok(finish(
        bound,
        n,
        regime,
        scenario,
        BoundForm::Implicit,
        constants,
    ))
}

/// Three-branch closed form for the fixed-set scenario.
pub fn worst_case_closed_form(n: usize, n0: usize, rho: f64) -> Result<BoundReport> {
    check_fixed_counts(n, n0)?;
    if n0 == n {
        return Err(Error::Domain("closed-form branches require n0 < n".into()));
    }
    check_rho(rho)?;
    let scenario = format!("worst-case(n0={n0})");
    let (n_f, n0_f) = (n as f64, n0 as f64);
    let rest = n_f - n0_f;
    let window = worst_case_window(n, n0);
    let regime = classify(rho, window);
    let mut constants = BTreeMap::new();
    constants.insert("n0".into(), n0_f);
    constants.insert("rho_h".into(), rho);
    constants.insert("delta_n".into(), window);
    let bound = match regime {
        Regime::Subcritical => n0_f + (rho / (1.0 - rho)).sqrt() * (n0_f * rest).sqrt(),
        Regime::Critical => n0_f + 2f64.powf(4.0 / 3.0) * n0_f.cbrt() * rest.powf(2.0 / 3.0),
        Regime::Supercritical => {
            let g0 = gamma0(rho, DEFAULT_TOL).value;
            let c_n = ((1.0 - g0) * rho / (1.0 - (1.0 - g0) * rho)).sqrt();
            constants.insert("gamma0".into(), g0);
            constants.insert("c_n".into(), c_n);
            n0_f + rest * g0 + c_n * (n0_f * rest).sqrt()
        }
    };
    Ok(finish(
        bound,
        n,
        regime,
        scenario,
        BoundForm::ClosedForm,
        constants,
    ))
}

fn check_uniform_counts(n: usize, n0: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("graph must have at least one node".into()));
    }
    if n0 > n {
        return Err(Error::Domain(format!(
            "influencer count n0 = {n0} must satisfy 0 <= n0 <= n = {n}"
        )));
    }
    Ok(())
}

/// Uniform-scenario bound: `n0 + gamma(rho, n0*rho/(n - n0)) * (n - n0)`.
pub fn uniform_bound(n: usize, n0: usize, rho: f64) -> Result<BoundReport> {
    check_uniform_counts(n, n0)?;
    check_rho(rho)?;
    let scenario = format!("uniform(n0={n0})");
    let mut constants = BTreeMap::new();
    constants.insert("n0".into(), n0 as f64);
    constants.insert("rho_h".into(), rho);
    let window = if n0 < n {
        uniform_window(n, n0)
    } else {
        f64::INFINITY
    };
    let regime = classify(rho, window);
    if n0 == n {
        return Ok(finish(
            n as f64,
            n,
            regime,
            scenario,
            BoundForm::Implicit,
            constants,
        ));
    }
    let a = n0 as f64 * rho / (n - n0) as f64;
    let g = gamma(rho, a, DEFAULT_TOL).value;
    constants.insert("a".into(), a);
    constants.insert("gamma".into(), g);
    let bound = n0 as f64 + g * (n - n0) as f64;
    Ok(finish(
        bound,
        n,
        regime,
        scenario,
        BoundForm::Implicit,
        constants,
    ))
}

/// Three-branch closed form for the uniform scenario.
pub fn uniform_closed_form(n: usize, n0: usize, rho: f64) -> Result<BoundReport> {
    check_uniform_counts(n, n0)?;
    if n0 == n {
        return Err(Error::Domain("closed-form branches require n0 < n".into()));
    }
    check_rho(rho)?;
    let scenario = format!("uniform(n0={n0})");
    let (n0_f, rest) = (n0 as f64, (n - n0) as f64);
    let window = uniform_window(n, n0);
    let regime = classify(rho, window);
    let mut constants = BTreeMap::new();
    constants.insert("n0".into(), n0_f);
    constants.insert("rho_h".into(), rho);
    constants.insert("delta_prime_n".into(), window);
    let bound = match regime {
        Regime::Subcritical => n0_f / (1.0 - rho),
        Regime::Critical => n0_f + (8.0 * n0_f * rest).sqrt(),
        Regime::Supercritical => {
            let g0 = gamma0(rho, DEFAULT_TOL).value;
            constants.insert("gamma0".into(), g0);
            rest * g0 + n0_f / (1.0 - rho * (1.0 - g0))
        }
    };
    Ok(finish(
        bound,
        n,
        regime,
        scenario,
        BoundForm::ClosedForm,
        constants,
    ))
}

fn check_q(q: f64) -> Result<()> {
    if !q.is_finite() || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "influencer probability q = {q} must lie in [0, 1]"
        )));
    }
    Ok(())
}

/// Bernoulli-scenario bound: `gamma(rho, -ln(1-q)) * n`.
pub fn bernoulli_bound(n: usize, q: f64, rho: f64) -> Result<BoundReport> {
    check_q(q)?;
    check_rho(rho)?;
    let scenario = format!("bernoulli(q={q})");
    let mut constants = BTreeMap::new();
    constants.insert("q".into(), q);
    constants.insert("rho_h".into(), rho);
    if q >= 1.0 {
        constants.insert("degenerate".into(), 1.0);
        return Ok(finish(
            n as f64,
            n,
            classify(rho, f64::INFINITY),
            scenario,
            BoundForm::Implicit,
            constants,
        ));
    }
    let a = -(1.0 - q).ln();
    let g = gamma(rho, a, DEFAULT_TOL).value;
    constants.insert("a".into(), a);
    constants.insert("gamma".into(), g);
    let regime = classify(rho, bernoulli_window(q));
    Ok(finish(
        g * n as f64,
        n,
        regime,
        scenario,
        BoundForm::Implicit,
        constants,
    ))
}

/// Three-branch closed form for the Bernoulli scenario.
///
/// The subcritical branch reads `-ln(1-q) n / (1 - rho)`; for small `q`
/// this agrees with `q n / (1 - rho)` to first order.
pub fn bernoulli_closed_form(n: usize, q: f64, rho: f64) -> Result<BoundReport> {
    check_q(q)?;
    check_rho(rho)?;
    let scenario = format!("bernoulli(q={q})");
    let mut constants = BTreeMap::new();
    constants.insert("q".into(), q);
    constants.insert("rho_h".into(), rho);
    if q >= 1.0 {
        constants.insert("degenerate".into(), 1.0);
        return Ok(finish(
            n as f64,
            n,
            classify(rho, f64::INFINITY),
            scenario,
            BoundForm::ClosedForm,
            constants,
        ));
    }
    let ln_term = -(1.0 - q).ln();
    let window = bernoulli_window(q);
    let regime = classify(rho, window);
    let n_f = n as f64;
    constants.insert("d_q".into(), window);
    let bound = match regime {
        Regime::Subcritical => ln_term * n_f / (1.0 - rho),
        Regime::Critical => n_f * (8.0 * ln_term).sqrt(),
        Regime::Supercritical => {
            let g0 = gamma0(rho, DEFAULT_TOL).value;
            constants.insert("gamma0".into(), g0);
            n_f * g0 + ln_term * (1.0 - g0) * n_f / (1.0 - rho * (1.0 - g0))
        }
    };
    Ok(finish(
        bound,
        n,
        regime,
        scenario,
        BoundForm::ClosedForm,
        constants,
    ))
}

/// Scenario selector for [`classify_regime`].
#[derive(Debug, Clone, Copy)]
pub enum ScenarioKind {
    WorstCase { n0: usize },
    Uniform { n0: usize },
    Bernoulli { q: f64 },
}

/// Returns the regime and the critical-window half-width used to pick it.
pub fn classify_regime(scenario: ScenarioKind, n: usize, rho: f64) -> Result<(Regime, f64)> {
    check_rho(rho)?;
    let window = match scenario {
        ScenarioKind::WorstCase { n0 } => {
            check_fixed_counts(n, n0)?;
            if n0 == n {
                f64::INFINITY
            } else {
                worst_case_window(n, n0)
            }
        }
        ScenarioKind::Uniform { n0 } => {
            check_uniform_counts(n, n0)?;
            if n0 == n {
                f64::INFINITY
            } else {
                uniform_window(n, n0)
            }
        }
        ScenarioKind::Bernoulli { q } => {
            check_q(q)?;
            if q >= 1.0 {
                f64::INFINITY
            } else {
                bernoulli_window(q)
            }
        }
    };
    Ok((classify(rho, window), window))
}

/// Incubation-time distribution of an SIR process; times share the unit of
/// `1/beta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncubationDist {
    Exponential { rate: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Deterministic { d: f64 },
}

impl IncubationDist {
    pub fn validate(&self) -> Result<()> {
        match self {
            IncubationDist::Exponential { rate } => {
                if !rate.is_finite() || *rate <= 0.0 {
                    return Err(Error::Domain(format!("recovery rate {rate} must be > 0")));
                }
            }
            IncubationDist::LogNormal { mu, sigma } => {
                if !mu.is_finite() || !sigma.is_finite() || *sigma < 0.0 {
                    return Err(Error::Domain(format!(
                        "log-normal parameters mu={mu} sigma={sigma}"
                    )));
                }
            }
            IncubationDist::Deterministic { d } => {
                if !d.is_finite() || *d <= 0.0 {
                    return Err(Error::Domain(format!("incubation time {d} must be > 0")));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            IncubationDist::Exponential { rate } => rate.recip(),
            IncubationDist::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            IncubationDist::Deterministic { d } => *d,
        }
    }

    /// Laplace transform `E[exp(-beta D)]`.
    pub fn laplace(&self, beta: f64) -> Result<f64> {
        self.validate()?;
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Domain(format!("rate beta = {beta} must be >= 0")));
        }
        match self {
            IncubationDist::Exponential { rate } => Ok(rate / (rate + beta)),
            IncubationDist::Deterministic { d } => Ok((-beta * d).exp()),
            IncubationDist::LogNormal { mu, sigma } => {
                if *sigma == 0.0 {
                    return Ok((-beta * mu.exp()).exp());
                }
                lognormal_laplace(beta, *mu, *sigma)
            }
        }
    }
}

/// `E[exp(-beta e^{mu + sigma Z})]` for standard normal Z, by adaptive
/// quadrature to relative tolerance 1e-10.
fn lognormal_laplace(beta: f64, mu: f64, sigma: f64) -> Result<f64> {
    const Z_CUT: f64 = 40.0;
    const REL_TOL: f64 = 1e-10;
    let inv_sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt().recip();
    let f = |z: f64| {
        let d = (mu + sigma * z).exp();
        (-beta * d).exp() * inv_sqrt_2pi * (-0.5 * z * z).exp()
    };
    adaptive_simpson(&f, -Z_CUT, Z_CUT, REL_TOL)
}

/// Adaptive Simpson integration with a relative-tolerance target.
pub(crate) fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Numerical(
                "adaptive quadrature exceeded its recursion depth".into(),
            ));
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?;
        Ok(l + r)
    }

    // Seed the scale with a composite pass so the relative tolerance has a
    // meaningful reference value.
    let mut coarse = 0.0;
    let panels = 64;
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        coarse += simpson(f(x0), f(x0 + 0.5 * h), f(x0 + h), h);
    }
    let eps = rel_tol * coarse.abs().max(f64::MIN_POSITIVE);
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, eps, 64)
}

/// Parameters of an SIR epidemic on a graph with adjacency spectral radius
/// `rho_a`.
#[derive(Debug, Clone, Serialize)]
pub struct SirParams {
    pub beta: f64,
    pub incubation: IncubationDist,
    pub rho_a: f64,
}

impl SirParams {
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(Error::Domain(format!(
                "transmission rate beta = {} must be > 0",
                self.beta
            )));
        }
        if !self.rho_a.is_finite() || self.rho_a < 0.0 {
            return Err(Error::Domain(format!(
                "adjacency radius {} must be >= 0",
                self.rho_a
            )));
        }
        self.incubation.validate()
    }
}

/// Per-edge transmission probability of the static SIR reduction:
/// `P(T < D) = 1 - E[exp(-beta D)]`.
pub fn sir_transmission_probability(beta: f64, incubation: &IncubationDist) -> Result<f64> {
    match incubation {
        IncubationDist::Exponential { rate } => {
            incubation.validate()?;
            Ok(beta / (beta + rate))
        }
        IncubationDist::Deterministic { d } => {
            incubation.validate()?;
            Ok(-(-beta * d).exp_m1())
        }
        IncubationDist::LogNormal { .. } => Ok(1.0 - incubation.laplace(beta)?),
    }
}

/// Hazard radius of the SIR reduction: `-rho(A) * ln E[exp(-beta D)]`.
///
/// Exponential and deterministic incubation take closed forms; log-normal
/// incubation goes through the quadrature of the Laplace transform.
pub fn sir_hazard_radius(rho_a: f64, beta: f64, incubation: &IncubationDist) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Domain(format!("beta = {beta} must be > 0")));
    }
    if !rho_a.is_finite() || rho_a < 0.0 {
        return Err(Error::Domain(format!("rho(A) = {rho_a} must be >= 0")));
    }
    incubation.validate()?;
    match incubation {
        IncubationDist::Exponential { rate } => Ok((beta / rate).ln_1p() * rho_a),
        IncubationDist::Deterministic { d } => Ok(beta * d * rho_a),
        IncubationDist::LogNormal { .. } => {
            let laplace = incubation.laplace(beta)?;
            if laplace <= 0.0 {
                return Err(Error::Numerical(
                    "Laplace transform underflowed to zero".into(),
                ));
            }
            Ok(-rho_a * laplace.ln())
        }
    }
}

/// The comparison bound `sqrt(n*n0) / (1 - (beta/delta) rho(A))`, defined
/// only when `beta * rho(A) < delta`.
pub fn draief_bound(n: usize, n0: usize, beta: f64, delta: f64, rho_a: f64) -> Result<f64> {
    check_fixed_counts(n, n0)?;
    if !(beta > 0.0 && delta > 0.0 && rho_a >= 0.0) {
        return Err(Error::Domain(
            "draief bound needs beta > 0, delta > 0, rho(A) >= 0".into(),
        ));
    }
    let ratio = beta / delta * rho_a;
    if ratio >= 1.0 {
        return Err(Error::Domain(format!(
            "comparison bound undefined: (beta/delta) * rho(A) = {ratio} >= 1"
        )));
    }
    Ok((n as f64 * n0 as f64).sqrt() / (1.0 - ratio))
}

/// The subcritical fixed-set expression
/// `n0 + sqrt(rho/(1-rho)) * sqrt(n0 (n - n0))`, valid for rho < 1.
pub fn sir_subcritical_bound(n: usize, n0: usize, rho_h: f64) -> Result<f64> {
    check_fixed_counts(n, n0)?;
    check_rho(rho_h)?;
    if rho_h >= 1.0 {
        return Err(Error::Domain(format!(
            "subcritical expression needs rho_H < 1, got {rho_h}"
        )));
    }
    let (n0_f, rest) = (n0 as f64, (n - n0) as f64);
    Ok(n0_f + (rho_h / (1.0 - rho_h)).sqrt() * (n0_f * rest).sqrt())
}

/// One sufficient condition for a subcritical epidemic.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdCondition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Strictly satisfied (`lhs < rhs`).
    pub holds: bool,
}

/// Evaluation of all applicable subcriticality conditions.
#[derive(Debug, Clone, Serialize)]
pub struct SirThresholdReport {
    pub rho_a: f64,
    pub rho_h: f64,
    pub conditions: Vec<ThresholdCondition>,
}

/// Evaluates each applicable sufficient condition for subcriticality and
/// reports which hold (strict inequalities).
pub fn sir_threshold_report(params: &SirParams) -> Result<SirThresholdReport> {
    params.validate()?;
    let rho_a = params.rho_a;
    let beta = params.beta;
    let rho_h = sir_hazard_radius(rho_a, beta, &params.incubation)?;
    let mut conditions = Vec::new();
    let mut push = |name: &str, lhs: f64, rhs: f64| {
        conditions.push(ThresholdCondition {
            name: name.to_string(),
            lhs,
            rhs,
            holds: lhs < rhs,
        });
    };

    push("hazard_radius_below_one", rho_h, 1.0);
    if let IncubationDist::Exponential { rate } = &params.incubation {
        push("classical_beta_rho_below_delta", beta * rho_a, *rate);
        push(
            "exponential_exp_form",
            beta / rate,
            (1.0 / rho_a).exp() - 1.0,
        );
    }
    push(
        "generic_mean_incubation",
        beta * rho_a * params.incubation.mean(),
        1.0,
    );
    if let IncubationDist::LogNormal { mu, sigma } = &params.incubation {
        push(
            "log_normal_parameter_form",
            mu + 0.5 * sigma * sigma,
            -(beta * rho_a).ln(),
        );
    }
    Ok(SirThresholdReport {
        rho_a,
        rho_h,
        conditions,
    })
}
