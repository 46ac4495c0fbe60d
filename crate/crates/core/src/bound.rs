//! Per-vertex first-moment bound and the threshold search built on it.
//!
//! At the stationary spreads `φ`, the `n`-th root of the expected number of
//! rigid colourings of a graph in the degree-restricted subspace is bounded,
//! in the limit, by
//!
//! ```text
//! F(c) = Π_x B(x,φ)^{p_x} / 2^c · Π_i (1 − 2φ_i)^{(1 − 4φ_i)c}
//! ```
//!
//! which [`bound_per_vertex`] evaluates in log space. `F(c) < 1` certifies
//! that graphs of density `c` are almost surely not 3-colourable, and `F`
//! decreases in `c`, so the smallest such `c` is an upper bound on the
//! colourability threshold.

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::model::{ModelParams, PoissonProfile};
use crate::solver::{solve_in, PhiSolution, SolverConfig};
use crate::spread::{ln_script_b, SpreadSystem, SpreadVector};

/// Working range of densities for bound computations.
pub const C_WORKING_MIN: f64 = 2.40;
pub const C_WORKING_MAX: f64 = 2.50;
/// The threshold search widens its lower end down to here if needed.
pub const C_SEARCH_FLOOR: f64 = 2.30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub c: f64,
    pub phi: SpreadVector,
    pub f_value: f64,
    pub log_f: f64,
    pub x_max: usize,
    pub residual_norm: f64,
}

/// `Σ_x p_x log B(x,φ)`.
fn log_b_moment(profile: &PoissonProfile, phi: &SpreadVector) -> f64 {
    profile
        .weights()
        .iter()
        .enumerate()
        .map(|(x, &p)| p * ln_script_b(x, phi))
        .sum()
}

/// `log F` with the exponents written as `(1 − 4φ_i)c`.
pub fn log_bound(profile: &PoissonProfile, c: f64, phi: &SpreadVector) -> f64 {
    let tail: f64 = (0..3)
        .map(|i| {
            let p = phi.get(i);
            (1.0 - 4.0 * p) * (1.0 - 2.0 * p).ln()
        })
        .sum();
    log_b_moment(profile, phi) - c * std::f64::consts::LN_2 + c * tail
}

/// `log F` with the exponents in the unsimplified form `(1 − 2φ_i)c − λφ_i`;
/// equal to [`log_bound`] whenever `λ = 2c`.
pub fn log_bound_unsimplified(profile: &PoissonProfile, c: f64, phi: &SpreadVector) -> f64 {
    let lambda = profile.lambda();
    let tail: f64 = (0..3)
        .map(|i| {
            let p = phi.get(i);
            ((1.0 - 2.0 * p) * c - lambda * p) * (1.0 - 2.0 * p).ln()
        })
        .sum();
    log_b_moment(profile, phi) - c * std::f64::consts::LN_2 + tail
}

fn report(system: &SpreadSystem, sol: &PhiSolution) -> BoundReport {
    let c = system.params().c();
    let log_f = log_bound(system.profile(), c, &sol.phi);
    BoundReport {
        c,
        phi: sol.phi,
        f_value: log_f.exp(),
        log_f,
        x_max: system.params().x_max(),
        residual_norm: sol.residual_norm,
    }
}

pub fn bound_per_vertex(params: &ModelParams, sol: &PhiSolution) -> Result<BoundReport> {
    if sol.c != params.c() || sol.x_max != params.x_max() {
        return Err(param(format!(
            "solution was computed at (c, x_max) = ({}, {}) but bound requested at ({}, {})",
            sol.c,
            sol.x_max,
            params.c(),
            params.x_max()
        )));
    }
    let system = SpreadSystem::with_mode(*params, sol.phi_two);
    Ok(report(&system, sol))
}

/// Solves the spread system at `(c, x_max)` and evaluates the bound there.
pub fn evaluate(c: f64, x_max: usize, config: &SolverConfig) -> Result<BoundReport> {
    let params = ModelParams::for_bound(c, x_max)?;
    let system = SpreadSystem::with_mode(params, config.phi_two);
    let sol = solve_in(&system, config)?;
    Ok(report(&system, &sol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// Midpoint of the final bracket.
    pub c_star: f64,
    /// Final bracket: `F(lo) ≥ 1 > F(hi)`.
    pub bracket: (f64, f64),
    pub f_at_bracket: (f64, f64),
    pub iterations: usize,
    pub x_max: usize,
}

/// Bisection on `c` for the crossing `F(c) = 1`, to bracket width `tol_c`.
pub fn threshold_search(x_max: usize, tol_c: f64, config: &SolverConfig) -> Result<ThresholdReport> {
    if !(tol_c.is_finite() && tol_c > 0.0) {
        return Err(param(format!("tol_c must be positive, got {tol_c}")));
    }
    let f = |c: f64| evaluate(c, x_max, config).map(|r| r.f_value);

    let mut hi = C_WORKING_MAX;
    let mut f_hi = f(hi)?;
    let mut lo = C_WORKING_MIN;
    let mut f_lo = f(lo)?;
    if f_lo < 1.0 {
        let widened = f(C_SEARCH_FLOOR)?;
        if widened < 1.0 {
            return Err(Error::Bracket(format!(
                "F({C_WORKING_MIN}) = {f_lo} and F({C_SEARCH_FLOOR}) = {widened} are both below 1"
            )));
        }
        lo = C_SEARCH_FLOOR;
        f_lo = widened;
    }
    if f_hi >= 1.0 {
        return Err(Error::Bracket(format!(
            "F({lo}) = {f_lo}, F({C_WORKING_MAX}) = {f_hi}: bound does not drop below 1"
        )));
    }

    let mut iterations = 0;
    while hi - lo > tol_c {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v >= 1.0 {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
            f_hi = v;
        }
        iterations += 1;
    }
    Ok(ThresholdReport {
        c_star: lo + 0.5 * (hi - lo),
        bracket: (lo, hi),
        f_at_bracket: (f_lo, f_hi),
        iterations,
        x_max,
    })
}

/// The `steps` grid values `c_lo, …, c_hi`, endpoints exact.
pub fn scan_grid(c_lo: f64, c_hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                c_hi
            } else {
                c_lo + (c_hi - c_lo) * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

/// Fresh solve and bound at each of `steps` equispaced densities, ordered
/// by `c`. Grid points are evaluated in parallel.
pub fn scan(
    c_lo: f64,
    c_hi: f64,
    steps: usize,
    x_max: usize,
    config: &SolverConfig,
) -> Result<Vec<BoundReport>> {
    if !(C_WORKING_MIN..=C_WORKING_MAX).contains(&c_lo)
        || !(C_WORKING_MIN..=C_WORKING_MAX).contains(&c_hi)
        || c_lo >= c_hi
    {
        return Err(param(format!(
            "scan needs {C_WORKING_MIN} <= c_lo < c_hi <= {C_WORKING_MAX}, got [{c_lo}, {c_hi}]"
        )));
    }
    if steps < 2 {
        return Err(param(format!("scan needs at least 2 steps, got {steps}")));
    }
    scan_grid(c_lo, c_hi, steps)
        .into_par_iter()
        .map(|c| {
            evaluate(c, x_max, config).map_err(|e| match e {
                Error::Parameter(m) => Error::Parameter(format!("at c = {c}: {m}")),
                Error::Domain(m) => Error::Domain(format!("at c = {c}: {m}")),
                Error::Bracket(m) => Error::Bracket(format!("at c = {c}: {m}")),
                Error::Convergence {
                    detail,
                    best,
                    residual,
                } => Error::Convergence {
                    detail: format!("at c = {c}: {detail}"),
                    best,
                    residual,
                },
                other => other,
            })
        })
        .collect()
}
