//! Acceptance suite: one test per numbered criterion, each printing a
//! PASS line (visible with `--nocapture`). Expected values come from
//! independent oracles implemented in this file (dense Jacobi eigensolve,
//! fixed-point iteration, Monte Carlo resampling), never from the code
//! paths under test.

use rand::{Rng, SeedableRng};
use rand_distr::Distribution;

use hazard_cli::config::{EstimandSpec, ExperimentConfig, ModelSpec};
use hazard_cli::experiment::{random_small_spec, run_monte_carlo, run_sweep, run_tightness};
use hazard_cli::report::fmt_f64;
use hazard_core::bounds::{
    bernoulli_bound, draief_bound, sir_hazard_radius, sir_subcritical_bound, sir_threshold_report,
    uniform_bound, worst_case_bound, IncubationDist, SirParams,
};
use hazard_core::gamma::{gamma, gamma0, gamma1, gamma_upper_estimates, DEFAULT_TOL};
use hazard_core::graph::InfluencerScheme;
use hazard_core::hazard::{hazard_matrix, hazard_radius, DEFAULT_MAX_ITER, DEFAULT_SPECTRAL_TOL};
use hazard_core::percolation::{
    eta, giant_component_bound, kappa, kappa1, n_components_bound, n_components_closed_form,
};
use hazard_core::sim::{
    ctic_to_dtic_spec, exact_influence, exact_influence_scheme, exact_sir_influence,
    sample_component_view, sample_sir_final, StreamDomain, TrialSeed,
};
use hazard_core::{
    erdos_spec, grid_spec, norros_reittu_spec, random_star_spec, spec_hazard_radius, star_spec,
    GraphSpec, WeightVector,
};

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Cyclic Jacobi eigensolver (independent of the power-iteration path).
fn jacobi_max_eigenvalue(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    for _ in 0..300 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn c01_solver_exactness() {
    for k in 1..=100 {
        let a = 0.01 + (5.0 - 0.01) * (k - 1) as f64 / 99.0;
        let solved = gamma(0.0, a, DEFAULT_TOL).value;
        let closed = -(-a).exp_m1();
        assert!(
            (solved - closed).abs() <= 1e-10,
            "gamma(0, {a}) = {solved} vs {closed}"
        );
    }
    let mut worst: f64 = 0.0;
    for rho in [0.2, 0.7, 1.0, 1.4, 2.0, 3.3] {
        for a in [1e-6, 1e-3, 0.05, 0.4, 1.7] {
            let sol = gamma(rho, a, DEFAULT_TOL);
            let residual = (sol.value - 1.0 + (-rho * sol.value - a).exp()).abs();
            worst = worst.max(residual);
            assert!(residual <= 1e-12, "gamma({rho},{a}) residual {residual}");

            let g1 = gamma1(rho, a, DEFAULT_TOL).unwrap();
            let residual = (g1.value - 1.0 + (-rho * g1.value - rho * a / g1.value).exp()).abs();
            worst = worst.max(residual);
            assert!(residual <= 1e-12, "gamma1({rho},{a}) residual {residual}");
        }
        if rho > 1.0 {
            let g0 = gamma0(rho, DEFAULT_TOL);
            let residual = (g0.value - 1.0 + (-rho * g0.value).exp()).abs();
            worst = worst.max(residual);
            assert!(residual <= 1e-12, "gamma0({rho}) residual {residual}");
        }
    }
    println!("criterion 01 PASS: gamma(0,a) closed form to 1e-10; worst residual {worst:.2e}");
}

#[test]
fn c02_gamma0_properties() {
    for k in 0..=100 {
        let rho = k as f64 / 100.0;
        assert_eq!(gamma0(rho, DEFAULT_TOL).value, 0.0, "gamma0({rho})");
    }
    // Independent oracle: damped fixed-point iteration of g = 1 - e^{-2g}.
    let mut oracle: f64 = 0.5;
    for _ in 0..400 {
        oracle = 1.0 - (-2.0 * oracle).exp();
    }
    let g0 = gamma0(2.0, DEFAULT_TOL).value;
    assert!((g0 - 0.79681).abs() <= 1e-4, "gamma0(2) = {g0}");
    assert!((g0 - oracle).abs() <= 1e-9);
    for k in 1..=1000 {
        let rho = 1.0 + 3.0 * k as f64 / 1000.0;
        let value = gamma0(rho, DEFAULT_TOL).value;
        assert!(value <= 2.0 * (rho - 1.0) + 1e-12, "slope bound at {rho}");
    }
    println!("criterion 02 PASS: gamma0(2) = {g0:.6} (oracle {oracle:.6}), slope bound on (1,4]");
}

#[test]
fn c03_gamma_upper_bound_lemma() {
    let mut worst_slack = f64::INFINITY;
    for i in 1..=100 {
        let rho = 0.04 * i as f64 - 0.02; // avoids exactly 1.0
        for j in 1..=100 {
            let a = 0.02 * j as f64;
            let g = gamma(rho, a, DEFAULT_TOL).value;
            let est = gamma_upper_estimates(rho, a);
            let slack_sqrt = est.sqrt_bound - g;
            assert!(slack_sqrt >= -1e-9, "sqrt bound at rho={rho} a={a}");
            worst_slack = worst_slack.min(slack_sqrt);
            let slack_linear = est.linear_bound - g;
            assert!(slack_linear >= -1e-9, "linear bound at rho={rho} a={a}");
            worst_slack = worst_slack.min(slack_linear);
        }
    }
    println!("criterion 03 PASS: 100x100 grid, worst slack {worst_slack:.3e} >= -1e-9");
}

#[test]
fn c04_hazard_radius() {
    // Remark sandwich on one instance of every generator family.
    let instances = vec![
        erdos_spec(100, 0.5).unwrap(),
        erdos_spec(1000, 2.0).unwrap(),
        norros_reittu_spec(&WeightVector::new(vec![1.0, 1.0, 2.0]).unwrap()).unwrap(),
        star_spec(101, 0.1).unwrap(),
        grid_spec(2, 4, 0.25).unwrap(),
        random_star_spec(40, 0.4, 0.05).unwrap(),
    ];
    for spec in &instances {
        let s = spec_hazard_radius(spec).unwrap();
        assert!(s.rho_p <= s.rho_h + 1e-9, "{}", spec.label());
        let amplify = -(1.0 - s.p_max).ln() / s.p_max;
        assert!(s.rho_h <= amplify * s.rho_p + 1e-9, "{}", spec.label());
    }

    // Dense Jacobi oracle at n <= 8.
    let small = vec![
        erdos_spec(7, 1.3).unwrap(),
        erdos_spec(8, 0.9).unwrap(),
        star_spec(8, 0.4).unwrap(),
        random_star_spec(8, 0.5, 0.2).unwrap(),
        norros_reittu_spec(&WeightVector::new(vec![0.5, 1.0, 2.0, 0.0, 1.5]).unwrap()).unwrap(),
        grid_spec(1, 5, 0.3).unwrap(),
        grid_spec(3, 2, 0.25).unwrap(),
        GraphSpec::from_entries(
            6,
            false,
            "directed",
            [
                (0, 1, 0.3),
                (1, 0, 0.6),
                (2, 3, 0.9),
                (4, 4, 0.5),
                (5, 0, 0.2),
            ],
        )
        .unwrap(),
    ];
    for spec in &small {
        let matrix = hazard_matrix(spec);
        let summary = hazard_radius(&matrix, DEFAULT_SPECTRAL_TOL, DEFAULT_MAX_ITER).unwrap();
        let oracle = jacobi_max_eigenvalue(matrix.to_dense_symmetric(true).unwrap());
        assert!(
            (summary.rho_h - oracle).abs() <= 1e-8,
            "{}: {} vs {}",
            spec.label(),
            summary.rho_h,
            oracle
        );
    }

    // Homogeneous closed form to 1e-10 and rank-one ratio to 1e-8.
    for (n, c) in [(100usize, 0.5f64), (1000, 2.0)] {
        let spec = erdos_spec(n, c).unwrap();
        let summary = spec_hazard_radius(&spec).unwrap();
        let p = c / n as f64;
        let expected = -(n as f64) * (-p).ln_1p();
        assert!(
            (summary.rho_h - expected).abs() <= 1e-10,
            "n={n} c={c}: {} vs {expected}",
            summary.rho_h
        );
    }
    let w = WeightVector::new(vec![1.0, 1.0, 2.0]).unwrap();
    let summary = spec_hazard_radius(&norros_reittu_spec(&w).unwrap()).unwrap();
    assert!((summary.rho_h - 1.5).abs() <= 1e-8);
    println!(
        "criterion 04 PASS: sandwich, dense oracle (1e-8), closed forms (1e-10), rank-one 1.5"
    );
}

#[test]
fn c05_exact_oracles_and_monte_carlo() {
    let triangle =
        GraphSpec::from_entries(3, true, "triangle", [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)])
            .unwrap();
    let sigma_triangle = exact_influence(&triangle, &[0]).unwrap();
    assert!(
        (sigma_triangle - 2.25).abs() <= 1e-13,
        "triangle {sigma_triangle}"
    );

    let star = star_spec(5, 0.3).unwrap();
    let sigma_star = exact_influence(&star, &[0]).unwrap();
    assert!((sigma_star - 2.2).abs() <= 1e-13, "star {sigma_star}");

    let sigma_sir = exact_sir_influence(3, &[(0, 1), (1, 2)], 1.0, 1.0, &[0]).unwrap();
    assert!((sigma_sir - 1.75).abs() <= 1e-10, "sir path {sigma_sir}");

    let trials = 100_000u64;
    for (spec, exact, master) in [
        (&triangle, sigma_triangle, 501u64),
        (&star, sigma_star, 502),
    ] {
        let values: Vec<f64> = (0..trials)
            .map(|t| {
                let view = sample_component_view(spec, &TrialSeed::new(master, t)).unwrap();
                view.influence_of(&[0]) as f64
            })
            .collect();
        let (mean, stderr) = mean_stderr(&values);
        assert!(
            (mean - exact).abs() <= 3.0 * stderr,
            "{}: mean {mean} exact {exact} stderr {stderr}",
            spec.label()
        );
    }
    let incubation = IncubationDist::Exponential { rate: 1.0 };
    let values: Vec<f64> = (0..trials)
        .map(|t| {
            sample_sir_final(
                3,
                &[(0, 1), (1, 2)],
                1.0,
                &incubation,
                &[0],
                &TrialSeed::new(503, t),
            )
            .unwrap()
            .len() as f64
        })
        .collect();
    let (mean, stderr) = mean_stderr(&values);
    assert!((mean - sigma_sir).abs() <= 3.0 * stderr, "sir mc {mean}");
    println!(
        "criterion 05 PASS: 2.25 / 2.2 / 1.75 exact; Monte Carlo within 3 sigma at {trials} trials"
    );
}

#[test]
fn c06_bound_validity_on_random_specs() {
    let mut rng = TrialSeed::new(606, 0).rng(StreamDomain::Scenario);
    let mut worst = f64::INFINITY;
    for case in 0..100 {
        let spec = random_small_spec(&mut rng, 14);
        let rho = spec_hazard_radius(&spec).unwrap().rho_h;
        let n = spec.n();
        let n0 = rng.random_range(1..=(n / 2).max(1));

        let fixed = InfluencerScheme::fixed((0..n0 as u32).collect());
        let exact = exact_influence_scheme(&spec, &fixed).unwrap();
        let bound = worst_case_bound(n, n0, rho).unwrap().bound;
        assert!(
            exact <= bound + 1e-9,
            "case {case}: worst-case {exact} > {bound}"
        );
        worst = worst.min(bound - exact);

        let exact_u = exact_influence_scheme(&spec, &InfluencerScheme::UniformK { n0 }).unwrap();
        let bound_u = uniform_bound(n, n0, rho).unwrap().bound;
        assert!(
            exact_u <= bound_u + 1e-9,
            "case {case}: uniform {exact_u} > {bound_u}"
        );
        worst = worst.min(bound_u - exact_u);

        let q = rng.random_range(0.02..0.5);
        let exact_b = exact_influence_scheme(&spec, &InfluencerScheme::Bernoulli { q }).unwrap();
        let bound_b = bernoulli_bound(n, q, rho).unwrap().bound;
        assert!(
            exact_b <= bound_b + 1e-9,
            "case {case}: bernoulli {exact_b} > {bound_b}"
        );
        worst = worst.min(bound_b - exact_b);
    }
    println!("criterion 06 PASS: 100 random specs, 3 scenarios each, min margin {worst:.3e}");
}

#[test]
fn c07_draief_dominance() {
    let mut points = 0usize;
    for &n in &[100usize, 1000, 10_000] {
        for n0 in 1..=n / 2 {
            for k in 1..=9 {
                let r = k as f64 / 10.0; // (beta/delta) * rho(A)
                let rho_a = 2.0;
                let beta_over_delta = r / rho_a;
                let rho_h = beta_over_delta.ln_1p() * rho_a;
                let ours = sir_subcritical_bound(n, n0, rho_h).unwrap();
                let comparison = draief_bound(n, n0, beta_over_delta, 1.0, rho_a).unwrap();
                assert!(
                    ours <= comparison + 1e-9,
                    "n={n} n0={n0} r={r}: {ours} > {comparison}"
                );
                points += 1;
            }
        }
    }
    println!("criterion 07 PASS: subcritical form dominated on {points} grid points");
}

fn erdos_c1_samples(n: usize, c: f64, trials: u64, master: u64) -> Vec<f64> {
    let spec = erdos_spec(n, c).unwrap();
    (0..trials)
        .map(|t| {
            let view = sample_component_view(&spec, &TrialSeed::new(master, t)).unwrap();
            view.stats().largest() as f64
        })
        .collect()
}

#[test]
fn c08_percolation_regimes() {
    let n = 10_000usize;
    let trials = 200u64;
    for (c, master) in [(0.5, 801u64), (1.0, 802), (2.0, 803)] {
        let rho = spec_hazard_radius(&erdos_spec(n, c).unwrap())
            .unwrap()
            .rho_h;
        let bound = giant_component_bound(n, rho).unwrap();
        let values = erdos_c1_samples(n, c, trials, master);
        let (mean, stderr) = mean_stderr(&values);
        assert!(
            mean <= bound.bound + 3.0 * stderr,
            "c={c}: mean {mean} bound {} ({:?})",
            bound.bound,
            bound.regime
        );
        if c == 0.5 {
            assert!(
                bound.bound <= 100.6,
                "subcritical bound value {}",
                bound.bound
            );
        }
        if c == 2.0 {
            let fraction = mean / n as f64;
            let g0 = gamma0(2.0, DEFAULT_TOL).value;
            assert!(
                (fraction - g0).abs() <= 0.02,
                "c=2 fraction {fraction} vs gamma0 {g0}"
            );
        }
        println!(
            "criterion 08: c={c} regime {:?} mean {mean:.1} <= bound {:.1}",
            bound.regime, bound.bound
        );
    }
    println!("criterion 08 PASS: giant-component bounds hold in all three regimes");
}

#[test]
fn c09_critical_exponent() {
    let sizes: Vec<usize> = (10..=16).map(|k| 1usize << k).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (idx, &n) in sizes.iter().enumerate() {
        let trials = if n <= 4096 {
            400
        } else if n <= 16_384 {
            200
        } else {
            100
        };
        let values = erdos_c1_samples(n, 1.0, trials, 900 + idx as u64);
        let (mean, _) = mean_stderr(&values);
        xs.push((n as f64).ln());
        ys.push(mean.ln());
    }
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xbar) * (x - xbar)).sum::<f64>();
    assert!(
        (0.55..=0.75).contains(&slope),
        "log-log slope {slope} outside [0.55, 0.75]"
    );
    println!("criterion 09 PASS: critical growth exponent {slope:.3} in [0.55, 0.75]");
}

#[test]
fn c10_component_count_bounds() {
    assert!((kappa() - 0.3435).abs() <= 5e-4, "kappa {}", kappa());
    assert!((kappa1() - 0.32).abs() <= 1e-2, "kappa1 {}", kappa1());
    let eta = eta();
    assert!((eta.exp() - 2.0 * eta - 1.0).abs() < 1e-12);

    let n = 10_000usize;
    let trials = 200u64;
    // Critical point: empirical counts against the minimized bound.
    let spec = erdos_spec(n, 1.0).unwrap();
    let rho = spec_hazard_radius(&spec).unwrap().rho_h;
    for &m in &[10usize, 100] {
        let values: Vec<f64> = (0..trials)
            .map(|t| {
                let view =
                    sample_component_view(&spec, &TrialSeed::new(1000 + m as u64, t)).unwrap();
                view.stats().n_at_least(m) as f64
            })
            .collect();
        let (mean, stderr) = mean_stderr(&values);
        let bound = n_components_bound(n, m, rho).unwrap();
        let closed = n_components_closed_form(n, m, rho).unwrap();
        assert!(bound <= closed + 1e-9);
        assert!(
            mean <= bound + 3.0 * stderr,
            "m={m}: mean {mean} bound {bound}"
        );
        println!(
            "criterion 10: c=1 m={m} mean {mean:.2} <= minimized {bound:.2} <= closed {closed:.2}"
        );
    }
    // Subcritical point against the stated closed-form value.
    let spec = erdos_spec(n, 0.5).unwrap();
    let rho = spec_hazard_radius(&spec).unwrap().rho_h;
    let values: Vec<f64> = (0..trials)
        .map(|t| {
            let view = sample_component_view(&spec, &TrialSeed::new(1050, t)).unwrap();
            view.stats().n_at_least(10) as f64
        })
        .collect();
    let (mean, stderr) = mean_stderr(&values);
    assert!(
        mean <= 111.1 + 3.0 * stderr,
        "subcritical N(10) mean {mean}"
    );
    let bound = n_components_bound(n, 10, rho).unwrap();
    assert!(mean <= bound + 3.0 * stderr);
    println!(
        "criterion 10 PASS: kappa {:.4}, kappa1 {:.4}, N(m) bounds hold",
        kappa(),
        kappa1()
    );
}

#[test]
fn c11_tightness_scalings() {
    let rows = run_tightness(0.5, &[1000, 10_000, 100_000], 400, 1100).unwrap();
    let normalized: Vec<f64> = rows.iter().map(|r| r.normalized).collect();
    let max = normalized.iter().cloned().fold(f64::MIN, f64::max);
    let min = normalized.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        max / min <= 1.2,
        "sqrt-n ratios vary too much: {normalized:?}"
    );

    let rows = run_tightness(2.0, &[100_000], 100, 1101).unwrap();
    let fraction = rows[0].normalized;
    let g0 = rows[0].reference.unwrap();
    assert!(
        (fraction - g0).abs() <= 0.03,
        "supercritical fraction {fraction} vs gamma0 {g0}"
    );
    println!(
        "criterion 11 PASS: sqrt-n ratio spread {:.3}, supercritical fraction {fraction:.4} vs {g0:.4}",
        max / min
    );
}

#[test]
fn c12_sir_correctness() {
    // Edge marginal beta/(beta+delta).
    let trials = 100_000u64;
    let incubation = IncubationDist::Exponential { rate: 1.0 };
    let mut hits = 0usize;
    for t in 0..trials {
        let set = sample_sir_final(
            2,
            &[(0, 1)],
            1.0,
            &incubation,
            &[0],
            &TrialSeed::new(1200, t),
        )
        .unwrap();
        if set.len() == 2 {
            hits += 1;
        }
    }
    let freq = hits as f64 / trials as f64;
    let sigma = (0.25 / trials as f64).sqrt();
    assert!((freq - 0.5).abs() <= 3.0 * sigma, "marginal {freq}");

    // Sibling out-edge covariance is nonnegative.
    let (mut x_sum, mut y_sum, mut xy_sum) = (0.0f64, 0.0f64, 0.0f64);
    let mut cross = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let set = sample_sir_final(
            3,
            &[(0, 1), (0, 2)],
            1.0,
            &incubation,
            &[0],
            &TrialSeed::new(1201, t),
        )
        .unwrap();
        let x = f64::from(set.contains(&1));
        let y = f64::from(set.contains(&2));
        x_sum += x;
        y_sum += y;
        xy_sum += x * y;
        cross.push((x, y));
    }
    let t = trials as f64;
    let cov = xy_sum / t - (x_sum / t) * (y_sum / t);
    let var = cross
        .iter()
        .map(|&(x, y)| {
            let c = (x - x_sum / t) * (y - y_sum / t) - cov;
            c * c
        })
        .sum::<f64>()
        / t;
    let stderr = (var / t).sqrt();
    assert!(cov >= -3.0 * stderr, "covariance {cov} stderr {stderr}");

    // Threshold gap on the cycle: rho(A) = 2.
    let report = sir_threshold_report(&SirParams {
        beta: 0.6,
        incubation: IncubationDist::Exponential { rate: 1.0 },
        rho_a: 2.0,
    })
    .unwrap();
    let classical = report
        .conditions
        .iter()
        .find(|c| c.name == "classical_beta_rho_below_delta")
        .unwrap();
    let exp_form = report
        .conditions
        .iter()
        .find(|c| c.name == "exponential_exp_form")
        .unwrap();
    assert!(!classical.holds && exp_form.holds);

    // Log-normal radius: adaptive quadrature vs a fixed-grid route (1e-8)
    // and vs a 1e7-sample Monte Carlo Laplace oracle (3 sigma).
    let (mu, sigma_d, beta, rho_a) = (0.4, 0.8, 0.6, 2.0);
    let incubation = IncubationDist::LogNormal { mu, sigma: sigma_d };
    let rho_quad = sir_hazard_radius(rho_a, beta, &incubation).unwrap();

    let inv = (2.0 * std::f64::consts::PI).sqrt().recip();
    let f = |z: f64| (-beta * (mu + sigma_d * z).exp()).exp() * inv * (-0.5 * z * z).exp();
    let (a, b, panels) = (-40.0, 40.0, 1 << 17);
    let h = (b - a) / panels as f64;
    let mut grid = 0.0;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        grid += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
    }
    let rho_grid = -rho_a * grid.ln();
    assert!(
        (rho_quad - rho_grid).abs() <= 1e-8,
        "quadrature {rho_quad} vs grid {rho_grid}"
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD1CE);
    let normal = rand_distr::Normal::new(mu, sigma_d).unwrap();
    let samples = 10_000_000usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let v = (-beta * normal.sample(&mut rng).exp()).exp();
        sum += v;
        sum_sq += v * v;
    }
    let mc_mean = sum / samples as f64;
    let mc_var = sum_sq / samples as f64 - mc_mean * mc_mean;
    let mc_stderr = (mc_var / samples as f64).sqrt();
    let laplace = incubation.laplace(beta).unwrap();
    assert!(
        (laplace - mc_mean).abs() <= 3.0 * mc_stderr,
        "laplace {laplace} vs mc {mc_mean} +- {mc_stderr}"
    );
    println!(
        "criterion 12 PASS: marginal {freq:.4}, covariance {cov:.4} >= 0, \
         threshold gap (0.6 < {:.4}, classical 1.2 >= 1), lognormal radius {rho_quad:.8}",
        exp_form.rhs
    );
}

#[test]
fn c13_cascade_equivalence() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1300);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(3..=7usize);
        let mut rates = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let target = rng.random_range(2..=10usize.min(n * (n - 1)));
        while rates.len() < target {
            let i = rng.random_range(0..n as u32);
            let j = rng.random_range(0..n as u32);
            if i != j && seen.insert((i, j)) {
                rates.push((i, j, rng.random_range(0.01..2.5f64)));
            }
        }
        let ctic = ctic_to_dtic_spec(n, &rates, "ctic").unwrap();
        let probs: Vec<(u32, u32, f64)> = rates
            .iter()
            .map(|&(i, j, l)| (i, j, 1.0 - (-l).exp()))
            .collect();
        let dtic = GraphSpec::from_entries(n, false, "dtic", probs).unwrap();
        let a = exact_influence(&ctic, &[0]).unwrap();
        let b = exact_influence(&dtic, &[0]).unwrap();
        worst = worst.max((a - b).abs());
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
    println!("criterion 13 PASS: 20 matched cascades, worst difference {worst:.2e}");
}

#[test]
fn c14_reproducibility() {
    let model = ModelSpec::Erdos { n: 2000, c: 1.0 };
    let config = ExperimentConfig {
        model: model.clone(),
        scenario: Some(InfluencerScheme::UniformK { n0: 3 }),
        trials: 100,
        master_seed: 14_000,
        outputs: vec![
            EstimandSpec::Influence,
            EstimandSpec::C1,
            EstimandSpec::NAtLeast { m: 10 },
            EstimandSpec::LinkpercoLhs { a: 0.1 },
        ],
        with_bounds: true,
    };
    let run_rows = |config: &ExperimentConfig| -> String {
        let rows = run_sweep(&model, "c", &[0.5, 1.0, 2.0], config).unwrap();
        let mut out = String::new();
        for row in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.param,
                fmt_f64(row.value),
                row.n,
                fmt_f64(row.rho_h),
                row.estimand,
                fmt_f64(row.mean),
                fmt_f64(row.stderr),
                row.bound.map(fmt_f64).unwrap_or_default(),
            ));
        }
        out
    };
    let first = run_rows(&config);
    let second = run_rows(&config);
    assert_eq!(first, second, "sweep data rows must be byte-identical");

    let a = run_monte_carlo(&config).unwrap();
    let b = run_monte_carlo(&config).unwrap();
    for (x, y) in a.estimates.iter().zip(&b.estimates) {
        assert_eq!(x.mean.to_bits(), y.mean.to_bits());
        assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
    }
    assert_eq!(a.config_hash, b.config_hash);
    println!("criterion 14 PASS: identical config + seed reproduces identical data rows");
}
