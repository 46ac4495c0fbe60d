//! Global model parameters, Poisson degree weights and the large-deviation
//! rate function for degree counts.
//!
//! The random multigraph on `n` vertices with `m = cn` ordered edges has
//! asymptotically Poisson(`λ = 2c`) vertex degrees. Everything downstream
//! (the spread system, the bound, the subspace test) is parameterised by
//! [`ModelParams`] and uses the truncated weights `p_0..p_{x_max}` held in a
//! [`PoissonProfile`].

use statrs::function::factorial::ln_factorial;

use crate::error::{param, Result};

/// Truncation used for bound computations unless the caller overrides it.
/// At `λ < 5` the Poisson mass beyond 60 is far below `1e-30`.
pub const DEFAULT_X_MAX: usize = 60;

/// Smallest truncation for which the spread system is non-degenerate.
pub const MIN_X_MAX: usize = 2;

/// Edge density and truncation knobs shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    c: f64,
    lambda: f64,
    x_max: usize,
    epsilon: f64,
}

impl ModelParams {
    /// `epsilon` only matters for the subspace test of the graph lab; the
    /// analytic bound ignores it.
    pub fn new(c: f64, x_max: usize, epsilon: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(param(format!("edge density c must be positive, got {c}")));
        }
        if x_max < MIN_X_MAX {
            return Err(param(format!(
                "x_max must be at least {MIN_X_MAX}, got {x_max}"
            )));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(param(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self {
            c,
            lambda: 2.0 * c,
            x_max,
            epsilon,
        })
    }

    /// Parameters for a bound computation: `epsilon` is irrelevant there.
    pub fn for_bound(c: f64, x_max: usize) -> Result<Self> {
        Self::new(c, x_max, 1.0)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Mean degree, always exactly `2c`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn x_max(&self) -> usize {
        self.x_max
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Poisson weights `p_0..p_{x_max}` together with the truncated first-moment
/// fraction `U(x_max) = λ⁻¹ Σ x p_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonProfile {
    lambda: f64,
    weights: Vec<f64>,
    u_trunc: f64,
}

impl PoissonProfile {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn u_trunc(&self) -> f64 {
        self.u_trunc
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn x_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// Total retained probability mass `Σ_{x ≤ x_max} p_x`.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `e^{-λ} λ^x / x!`, evaluated in log space so that large `x` neither
/// overflows `λ^x` nor `x!`.
pub fn poisson_pmf(x: usize, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(param(format!("Poisson mean must be positive, got {lambda}")));
    }
    Ok(ln_poisson_pmf(x, lambda).exp())
}

fn ln_poisson_pmf(x: usize, lambda: f64) -> f64 {
    -lambda + x as f64 * lambda.ln() - ln_factorial(x as u64)
}

pub fn build_profile(params: &ModelParams) -> PoissonProfile {
    let lambda = params.lambda();
    let weights: Vec<f64> = (0..=params.x_max())
        .map(|x| ln_poisson_pmf(x, lambda).exp())
        .collect();
    PoissonProfile {
        lambda,
        u_trunc: truncated_first_moment(lambda, params.x_max()),
        weights,
    }
}

/// `U(x_max) = λ⁻¹ Σ_{x ≤ x_max} x p_x`. Since `x p_x / λ = p_{x−1}` this is
/// the CDF `P(X ≤ x_max − 1)`, summed from whichever side is smaller so
/// that `U` is accurate to an ulp even when it rounds to 1.
fn truncated_first_moment(lambda: f64, x_max: usize) -> f64 {
    if x_max == 0 {
        return 0.0;
    }
    let k = x_max - 1;
    if (k as f64) < lambda {
        return (0..=k).map(|x| ln_poisson_pmf(x, lambda).exp()).sum();
    }
    // upper tail terms decrease geometrically once x > λ
    let mut tail = 0.0;
    let mut x = k + 1;
    loop {
        let term = ln_poisson_pmf(x, lambda).exp();
        tail += term;
        if term <= 1e-20 * tail || term == 0.0 {
            break;
        }
        x += 1;
    }
    1.0 - tail
}

/// Rate `min[(ξ+η)·log(1+ξ/η) − ξ, ξ²/(2η)]` governing the deviation of a
/// degree count from its Poisson mean.
pub fn large_deviation_rate(xi: f64, eta: f64) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(param(format!("eta must be positive, got {eta}")));
    }
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(param(format!("xi must be non-negative, got {xi}")));
    }
    let entropic = (xi + eta) * (xi / eta).ln_1p() - xi;
    let quadratic = xi * xi / (2.0 * eta);
    // the entropic branch can dip a few ulps below zero for tiny ξ
    Ok(entropic.min(quadratic).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADLINE_LAMBDA: f64 = 4.936310;

    #[test]
    fn pmf_at_zero_is_exp_minus_lambda() {
        for lambda in [0.1, 1.0, 4.93631, 17.5] {
            let p = poisson_pmf(0, lambda).unwrap();
            assert!((p - (-lambda).exp()).abs() <= 1e-15 * p);
        }
    }

    #[test]
    fn pmf_recurrence() {
        for lambda in [0.5, 2.0, HEADLINE_LAMBDA, 9.0] {
            for x in 0..200 {
                let lhs = poisson_pmf(x + 1, lambda).unwrap() * (x + 1) as f64 / lambda;
                let rhs = poisson_pmf(x, lambda).unwrap();
                if rhs > 0.0 && rhs.is_normal() {
                    assert!(((lhs - rhs) / rhs).abs() < 1e-12, "x = {x}, λ = {lambda}");
                }
            }
        }
    }

    #[test]
    fn pmf_high_precision_value() {
        // e^{-4.936310}·4.936310²/2 evaluated with 40-digit arithmetic
        let expected = 0.087_490_855_161_676_48;
        let got = poisson_pmf(2, HEADLINE_LAMBDA).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-12, "{got}");
    }

    #[test]
    fn pmf_survives_large_x() {
        let p = poisson_pmf(400, 200.0).unwrap();
        assert!(p.is_finite() && p > 0.0);
    }

    #[test]
    fn pmf_rejects_bad_lambda() {
        assert!(matches!(poisson_pmf(1, 0.0), Err(crate::Error::Parameter(_))));
        assert!(matches!(poisson_pmf(1, -2.0), Err(crate::Error::Parameter(_))));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(2.468155, 60, 0.1).is_ok());
        assert!(ModelParams::new(0.0, 60, 0.1).is_err());
        assert!(ModelParams::new(2.4, 1, 0.1).is_err());
        assert!(ModelParams::new(2.4, 60, 0.0).is_err());
        let p = ModelParams::for_bound(2.468155, 60).unwrap();
        assert_eq!(p.lambda(), 2.0 * 2.468155);
    }

    #[test]
    fn truncated_first_moment_tends_to_one() {
        let params = ModelParams::for_bound(2.49, 60).unwrap();
        let profile = build_profile(&params);
        assert!(profile.u_trunc() > 1.0 - 1e-15);
        assert!(profile.u_trunc() <= 1.0 + 1e-15);
    }

    #[test]
    fn truncated_first_moment_oracle() {
        // term-by-term summation at λ = 4.936310, x_max = 8 in 40-digit arithmetic
        let expected = 0.873_195_156_765_1;
        let params = ModelParams::for_bound(HEADLINE_LAMBDA / 2.0, 8).unwrap();
        let profile = build_profile(&params);
        assert!((profile.u_trunc() - expected).abs() < 1e-13, "{}", profile.u_trunc());
    }

    #[test]
    fn short_truncation_matches_definition() {
        // x_max − 1 < λ: the head sum is taken directly
        let lambda = HEADLINE_LAMBDA;
        let params = ModelParams::for_bound(lambda / 2.0, 3).unwrap();
        let profile = build_profile(&params);
        let by_definition: f64 = (0..=3)
            .map(|x| x as f64 * poisson_pmf(x, lambda).unwrap())
            .sum::<f64>()
            / lambda;
        let closed = (-lambda).exp() * (1.0 + lambda + lambda * lambda / 2.0);
        assert!((profile.u_trunc() - by_definition).abs() < 1e-15);
        assert!((profile.u_trunc() - closed).abs() < 1e-15);
    }

    #[test]
    fn truncated_first_moment_monotone_in_x_max() {
        let mut last = 0.0;
        for x_max in 2..80 {
            let params = ModelParams::for_bound(2.45, x_max).unwrap();
            let profile = build_profile(&params);
            let u = profile.u_trunc();
            assert!(u >= last && u <= 1.0 + 1e-15);
            assert!(profile.mass() <= 1.0 + 1e-15);
            assert!(profile.weights().iter().all(|&p| p > 0.0 && p < 1.0));
            last = u;
        }
    }

    #[test]
    fn rate_basic_values() {
        assert_eq!(large_deviation_rate(0.0, 0.7).unwrap(), 0.0);
        let r = large_deviation_rate(1.0, 1.0).unwrap();
        assert!((r - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!(large_deviation_rate(1.0, 0.0).is_err());
    }

    #[test]
    fn rate_increasing_in_xi() {
        let values: Vec<f64> = (1..=20)
            .map(|k| large_deviation_rate(0.1 * k as f64, 0.5).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rate_never_exceeds_quadratic_branch() {
        for xi in [0.0, 1e-3, 0.3, 1.0, 5.0, 40.0] {
            for eta in [0.01, 0.5, 2.0, 100.0] {
                let r = large_deviation_rate(xi, eta).unwrap();
                assert!(r >= 0.0 && r <= xi * xi / (2.0 * eta));
                if xi > 0.0 {
                    assert!(r > 0.0);
                }
            }
        }
    }
}
