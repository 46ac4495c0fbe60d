//! The closed-form stationary point of the rigid-colouring entropy problem.
//!
//! For a vertex of degree `x` and colour type `i`, the stationary occupation
//! fraction of "degree-x, type-i vertices with `j` edges to the next colour"
//! is `μ^i_{x,j} = C(x,j)(1−2φ_i)^x / B(x,φ)`, where `φ = (φ₀, φ₁, φ₂)` are
//! the reduced colour spreads and `B(x,φ)` normalises the three types. The
//! spreads themselves must be consistent with the fractions they generate,
//! which leaves two equations `E₀ = E₁ = 0` in the free spreads `φ₀, φ₁`
//! (with `φ₂ = U − φ₀ − φ₁`). [`SpreadSystem`] evaluates those residuals,
//! both directly and after the rotation `φ₀ = y₀ + y₁`, `φ₁ = y₀ − y₁`.
//!
//! Type multiplicities are `N₀(x) = max(0, 2^x − 2)`, `N₁(x) = 2^x − 1` and
//! `N₂(x) = 2^x`: the number of admissible `j` slots weighted by `C(x,j)`.
//! All products `N_i(x)(1−2φ_i)^x` are formed as `ν_i(x)(2−4φ_i)^x` with
//! `ν_i(x) = N_i(x)/2^x`, which avoids forming `2^x` for large truncations.

use statrs::function::factorial::ln_binomial;

use crate::error::{domain, param, Result};
use crate::model::{build_profile, ModelParams, PoissonProfile};

/// Lower edge of the region the optimum is restricted to, for every spread.
pub const PHI_MIN: f64 = 0.26;
/// Upper edge of the admissible spread region.
pub const PHI_MAX: f64 = 0.4;

/// Number of colour types.
pub const COLOURS: usize = 3;

/// Reduced blue, red and green spreads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadVector {
    phi: [f64; COLOURS],
}

impl SpreadVector {
    /// Every spread must lie strictly inside `(0, 1/2)`; the bound takes
    /// `log(1 − 2φ_i)`.
    pub fn new(phi0: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let phi = [phi0, phi1, phi2];
        for (i, &p) in phi.iter().enumerate() {
            if !(p.is_finite() && p > 0.0 && p < 0.5) {
                return Err(domain(format!("phi{i} = {p} is outside (0, 1/2)")));
            }
        }
        Ok(Self { phi })
    }

    /// Completes the two free spreads with `φ₂ = total − φ₀ − φ₁`.
    pub fn from_free(phi0: f64, phi1: f64, total: f64) -> Result<Self> {
        Self::new(phi0, phi1, total - phi0 - phi1)
    }

    pub fn get(&self, i: usize) -> f64 {
        self.phi[i]
    }

    pub fn as_array(&self) -> [f64; COLOURS] {
        self.phi
    }

    /// True when all three spreads are strictly inside `(PHI_MIN, PHI_MAX)`.
    pub fn is_admissible(&self) -> bool {
        self.phi.iter().all(|&p| p > PHI_MIN && p < PHI_MAX)
    }
}

/// Coordinates `(y₀, y₁)` with `φ₀ = y₀ + y₁` and `φ₁ = y₀ − y₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedPoint {
    pub y0: f64,
    pub y1: f64,
}

impl RotatedPoint {
    pub fn new(y0: f64, y1: f64) -> Self {
        Self { y0, y1 }
    }

    pub fn from_phi(phi0: f64, phi1: f64) -> Self {
        Self {
            y0: 0.5 * (phi0 + phi1),
            y1: 0.5 * (phi0 - phi1),
        }
    }

    pub fn phi0(&self) -> f64 {
        self.y0 + self.y1
    }

    pub fn phi1(&self) -> f64 {
        self.y0 - self.y1
    }
}

/// `N_i(x) / 2^x`.
fn scaled_multiplicity(i: usize, x: usize) -> f64 {
    if x == 0 {
        return if i == 2 { 1.0 } else { 0.0 };
    }
    let half_pow = 0.5f64.powi(x as i32);
    match i {
        0 => 1.0 - 2.0 * half_pow,
        1 => 1.0 - half_pow,
        _ => 1.0,
    }
}

/// The three summands `N_i(x)(1−2φ_i)^x` of `B(x,φ)`.
fn type_terms(x: usize, phi: &SpreadVector) -> [f64; COLOURS] {
    let mut terms = [0.0; COLOURS];
    for (i, term) in terms.iter_mut().enumerate() {
        let base = 2.0 - 4.0 * phi.phi[i];
        *term = scaled_multiplicity(i, x) * base.powi(x as i32);
    }
    terms
}

/// `B(x,φ) = max(0, 2^x−2)(1−2φ₀)^x + (2^x−1)(1−2φ₁)^x + 2^x(1−2φ₂)^x`.
pub fn script_b(x: usize, phi: &SpreadVector) -> f64 {
    type_terms(x, phi).iter().sum()
}

pub fn ln_script_b(x: usize, phi: &SpreadVector) -> f64 {
    script_b(x, phi).ln()
}

fn check_colour(i: usize) -> Result<()> {
    if i >= COLOURS {
        return Err(param(format!("colour index {i} is not in {{0, 1, 2}}")));
    }
    Ok(())
}

/// Fraction `α_x^i` of degree-`x` vertices that take type `i` at the
/// stationary point.
pub fn type_fraction(x: usize, i: usize, phi: &SpreadVector) -> Result<f64> {
    check_colour(i)?;
    let terms = type_terms(x, phi);
    Ok(terms[i] / terms.iter().sum::<f64>())
}

/// Whether `μ^i_{x,j}` is forced to zero by the rigidity constraints.
pub fn is_structural_zero(x: usize, j: usize, i: usize) -> bool {
    match i {
        0 => j == 0 || j == x,
        1 => j == 0,
        _ => false,
    }
}

/// Stationary occupation fraction `μ^i_{x,j}`.
pub fn mu_entry(x: usize, j: usize, i: usize, phi: &SpreadVector) -> Result<f64> {
    check_colour(i)?;
    if j > x {
        return Err(param(format!("j = {j} exceeds degree x = {x}")));
    }
    if is_structural_zero(x, j, i) {
        return Ok(0.0);
    }
    let ln_mu = ln_binomial(x as u64, j as u64) + x as f64 * (1.0 - 2.0 * phi.phi[i]).ln()
        - ln_script_b(x, phi);
    Ok(ln_mu.exp())
}

/// All `μ^i_{x,j}` for `0 ≤ j ≤ x ≤ x_max`, plus their row sums `α_x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuProfile {
    x_max: usize,
    // entries[i][x(x+1)/2 + j]
    entries: [Vec<f64>; COLOURS],
    alpha: Vec<[f64; COLOURS]>,
}

impl MuProfile {
    pub fn x_max(&self) -> usize {
        self.x_max
    }

    pub fn entry(&self, i: usize, x: usize, j: usize) -> Result<f64> {
        check_colour(i)?;
        if x > self.x_max || j > x {
            return Err(param(format!(
                "(x, j) = ({x}, {j}) outside 0 <= j <= x <= {}",
                self.x_max
            )));
        }
        Ok(self.entries[i][x * (x + 1) / 2 + j])
    }

    pub fn alpha(&self, x: usize, i: usize) -> f64 {
        self.alpha[x][i]
    }

    /// Row sum `Σ_j μ^i_{x,j}` recomputed from the stored entries.
    pub fn row_sum(&self, x: usize, i: usize) -> f64 {
        let start = x * (x + 1) / 2;
        self.entries[i][start..=start + x].iter().sum()
    }

    /// Constraint `C_x = α_x^0 + α_x^1 + α_x^2 − 1`.
    pub fn constraint(&self, x: usize) -> f64 {
        self.alpha[x].iter().sum::<f64>() - 1.0
    }
}

pub fn build_mu_profile(phi: &SpreadVector, params: &ModelParams) -> Result<MuProfile> {
    let x_max = params.x_max();
    let len = (x_max + 1) * (x_max + 2) / 2;
    let mut entries: [Vec<f64>; COLOURS] = std::array::from_fn(|_| Vec::with_capacity(len));
    let mut alpha = Vec::with_capacity(x_max + 1);
    for x in 0..=x_max {
        let mut row = [0.0; COLOURS];
        for (i, column) in entries.iter_mut().enumerate() {
            row[i] = type_fraction(x, i, phi)?;
            for j in 0..=x {
                column.push(mu_entry(x, j, i, phi)?);
            }
        }
        alpha.push(row);
    }
    Ok(MuProfile {
        x_max,
        entries,
        alpha,
    })
}

/// How the third spread is tied to the two free ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiTwoMode {
    /// `φ₂ = U(x_max) − φ₀ − φ₁` with the exact truncated first moment.
    #[default]
    Truncated,
    /// `φ₂ = 1 − φ₀ − φ₁`, the `x_max → ∞` limit.
    Unit,
}

/// The two-equation spread system at fixed model parameters.
#[derive(Debug, Clone)]
pub struct SpreadSystem {
    params: ModelParams,
    profile: PoissonProfile,
    mode: PhiTwoMode,
    total: f64,
}

impl SpreadSystem {
    pub fn new(params: ModelParams) -> Self {
        Self::with_mode(params, PhiTwoMode::default())
    }

    pub fn with_mode(params: ModelParams, mode: PhiTwoMode) -> Self {
        let profile = build_profile(&params);
        let total = match mode {
            PhiTwoMode::Truncated => profile.u_trunc(),
            PhiTwoMode::Unit => 1.0,
        };
        Self {
            params,
            profile,
            mode,
            total,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn profile(&self) -> &PoissonProfile {
        &self.profile
    }

    pub fn mode(&self) -> PhiTwoMode {
        self.mode
    }

    /// `φ₀ + φ₁ + φ₂`: either `U(x_max)` or 1.
    pub fn spread_total(&self) -> f64 {
        self.total
    }

    /// The admissible spread vector with free coordinates `(φ₀, φ₁)`.
    pub fn spread(&self, phi0: f64, phi1: f64) -> Result<SpreadVector> {
        let phi = SpreadVector::from_free(phi0, phi1, self.total)?;
        if !phi.is_admissible() {
            return Err(domain(format!(
                "phi = {:?} leaves the admissible box ({PHI_MIN}, {PHI_MAX})^3",
                phi.as_array()
            )));
        }
        Ok(phi)
    }

    /// `(E₀, E₁)` with `E_i = λφ_i − Σ_x x p_x α_x^i(φ)`.
    pub fn residual(&self, phi0: f64, phi1: f64) -> Result<[f64; 2]> {
        let phi = self.spread(phi0, phi1)?;
        Ok(self.residual_at(&phi))
    }

    /// `(K₀, K₁) = (E₀, E₁)` evaluated at `φ₀ = y₀ + y₁`, `φ₁ = y₀ − y₁`.
    pub fn rotated_residual(&self, y: RotatedPoint) -> Result<[f64; 2]> {
        self.residual(y.phi0(), y.phi1())
    }

    pub(crate) fn residual_at(&self, phi: &SpreadVector) -> [f64; 2] {
        let weights = self.profile.weights();
        let mut fed = [0.0; 2];
        for (x, &p) in weights.iter().enumerate().skip(1) {
            let terms = type_terms(x, phi);
            let b: f64 = terms.iter().sum();
            let scale = x as f64 * p / b;
            fed[0] += scale * terms[0];
            fed[1] += scale * terms[1];
        }
        let lambda = self.params.lambda();
        [lambda * phi.phi[0] - fed[0], lambda * phi.phi[1] - fed[1]]
    }
}
