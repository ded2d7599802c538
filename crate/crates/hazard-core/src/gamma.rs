//! Implicit solvers for the hazard function and its variants.
//!
//! `gamma(rho, a)` is the unique root in [0, 1] of
//! `g - 1 + exp(-rho*g - a) = 0`; `gamma0(rho)` its limit as `a -> 0+`
//! (identically zero for rho <= 1); `gamma1(rho, a)` the smallest root in
//! [0, 1] of `g - 1 + exp(-rho*g - rho*a/g) = 0`.
//!
//! All solvers use bisection: the bracket is unconditional, so the returned
//! value always carries a verified residual.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default residual tolerance for the root solvers.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Bisection terminates once the bracket is this narrow.
const INTERVAL_TOL: f64 = 1e-14;
/// Grid resolution of the smallest-root scan.
const SCAN_POINTS: usize = 10_000;

/// Which root the solver reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaBranch {
    /// The unique root of the defining equation.
    Unique,
    /// The a -> 0+ limit (zero at or below the critical radius).
    LimitAtZero,
    /// Smallest root found by the grid scan.
    Smallest,
}

/// A solved hazard-function value with its verified residual.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaSolution {
    pub value: f64,
    /// |f(value)| with f the defining equation.
    pub residual: f64,
    pub branch: GammaBranch,
}

fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    debug_assert!(f_lo <= 0.0);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= INTERVAL_TOL {
            break;
        }
        let f_mid = f(mid);
        if f_mid <= 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // Report the endpoint with the smaller residual.
    let f_hi = f(hi);
    if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo.abs())
    } else {
        (hi, f_hi.abs())
    }
}

/// Unique root in [0, 1] of `g - 1 + exp(-rho*g - a) = 0`.
///
/// `a = 0` is resolved by continuity as [`gamma0`]. The tolerance is a
/// residual target; the bisection always narrows the bracket to ~1e-14
/// regardless.
///
/// ```
/// use hazard_core::gamma::{gamma, DEFAULT_TOL};
/// // At rho = 0 the equation is explicit: g = 1 - exp(-a).
/// let sol = gamma(0.0, 2f64.ln(), DEFAULT_TOL);
/// assert!((sol.value - 0.5).abs() < 1e-12);
/// ```
pub fn gamma(rho: f64, a: f64, tol: f64) -> GammaSolution {
    assert!(rho >= 0.0 && rho.is_finite(), "rho must be finite and >= 0");
    assert!(a >= 0.0 && a.is_finite(), "a must be finite and >= 0");
    assert!(tol > 0.0, "tolerance must be positive");
    if a == 0.0 {
        return gamma0(rho, tol);
    }
    let f = |g: f64| g - 1.0 + (-rho * g - a).exp();
    let f0 = f(0.0);
    debug_assert!(f0 < 0.0);
    let (value, residual) = bisect(0.0, 1.0, f0, f);
    GammaSolution {
        value,
        residual,
        branch: GammaBranch::Unique,
    }
}

/// Limit of [`gamma`] as a -> 0+: zero for rho <= 1, else the unique root in
/// (0, 1] of `g - 1 + exp(-rho*g) = 0`.
pub fn gamma0(rho: f64, tol: f64) -> GammaSolution {
    assert!(rho >= 0.0 && rho.is_finite(), "rho must be finite and >= 0");
    assert!(tol > 0.0, "tolerance must be positive");
    if rho <= 1.0 {
        return GammaSolution {
            value: 0.0,
            residual: 0.0,
            branch: GammaBranch::LimitAtZero,
        };
    }
    let f = |g: f64| g - 1.0 + (-rho * g).exp();
    // g = 0 is a spurious root; bracket from the largest epsilon with
    // f(eps) < 0. When even 2^-52 stays nonnegative the positive root is
    // below float resolution and zero is returned.
    let mut lo = None;
    let mut eps = 0.5;
    while eps > 1e-16 {
        if f(eps) < 0.0 {
            lo = Some(eps);
            break;
        }
        eps *= 0.5;
    }
    let Some(lo) = lo else {
        return GammaSolution {
            value: 0.0,
            residual: 0.0,
            branch: GammaBranch::LimitAtZero,
        };
    };
    let (value, residual) = bisect(lo, 1.0, f(lo), f);
    GammaSolution {
        value,
        residual,
        branch: GammaBranch::LimitAtZero,
    }
}

/// Smallest root in [0, 1] of `g - 1 + exp(-rho*g - rho*a/g) = 0`.
///
/// The equation may have several roots; a 10^4-point scan locates the first
/// sign change and bisection refines it, so the answer is the smallest root
/// up to the grid resolution. `rho = 0` returns 0 (the limit of the root as
/// rho -> 0+).
pub fn gamma1(rho: f64, a: f64, tol: f64) -> Result<GammaSolution> {
    assert!(rho >= 0.0 && rho.is_finite(), "rho must be finite and >= 0");
    assert!(a > 0.0 && a.is_finite(), "a must be finite and > 0");
    assert!(tol > 0.0, "tolerance must be positive");
    if rho == 0.0 {
        return Ok(GammaSolution {
            value: 0.0,
            residual: 0.0,
            branch: GammaBranch::Smallest,
        });
    }
    // f(0+) = -1: exp(-rho*a/g) vanishes as g -> 0.
    let f = |g: f64| {
        if g <= 0.0 {
            -1.0
        } else {
            g - 1.0 + (-rho * g - rho * a / g).exp()
        }
    };
    let step = 1.0 / SCAN_POINTS as f64;
    let mut prev_x = 0.0;
    let mut prev_f = -1.0;
    for k in 1..=SCAN_POINTS {
        let x = k as f64 * step;
        let fx = f(x);
        if fx >= 0.0 {
            let (value, residual) = bisect(prev_x, x, prev_f, f);
            return Ok(GammaSolution {
                value,
                residual,
                branch: GammaBranch::Smallest,
            });
        }
        prev_x = x;
        prev_f = fx;
    }
    // Unreachable for valid inputs: f(1) = exp(-rho - rho*a) > 0.
    Err(Error::Internal(
        "no sign change found for the smallest-root scan".into(),
    ))
}

/// The two closed-form upper estimates for `gamma(rho, a)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaUpperEstimates {
    /// gamma0(rho) + sqrt(2a) * min(1, 1/sqrt(rho)).
    pub sqrt_bound: f64,
    /// gamma0(rho) + a(1 - gamma0)/(1 - rho(1 - gamma0)); +inf at rho = 1
    /// where the denominator vanishes.
    pub linear_bound: f64,
}

pub fn gamma_upper_estimates(rho: f64, a: f64) -> GammaUpperEstimates {
    assert!(rho >= 0.0 && rho.is_finite(), "rho must be finite and >= 0");
    assert!(a >= 0.0 && a.is_finite(), "a must be finite and >= 0");
    let g0 = gamma0(rho, DEFAULT_TOL).value;
    let scale = if rho > 1.0 { rho.sqrt().recip() } else { 1.0 };
    let sqrt_bound = g0 + (2.0 * a).sqrt() * scale;
    let linear_bound = if rho == 1.0 {
        f64::INFINITY
    } else {
        g0 + a * (1.0 - g0) / (1.0 - rho * (1.0 - g0))
    };
    GammaUpperEstimates {
        sqrt_bound,
        linear_bound,
    }
}
