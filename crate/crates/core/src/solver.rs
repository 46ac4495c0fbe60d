//! Root finding for the rotated spread system `K₀(y₀,y₁) = K₁(y₀,y₁) = 0`.
//!
//! Inside the admissible box the residuals have the derivative sign pattern
//! `∂K₀/∂y₀ > 0, ∂K₀/∂y₁ > 0, ∂K₁/∂y₀ > 0, ∂K₁/∂y₁ < 0`. The zero set of
//! `K₁` is therefore an increasing curve `y₁ = h(y₀)` and the zero set of
//! `K₀` a decreasing one, and the two cross exactly once. The default
//! [`SolveMethod::NestedBisection`] follows the `K₁` curve with an inner
//! bisection and bisects `g(y₀) = K₀(y₀, h(y₀))`, which is strictly
//! increasing. [`SolveMethod::Spiral`] alternates one-dimensional solves of
//! `E₀ = 0` in `φ₀` and `E₁ = 0` in `φ₁` from a corner of the admissible
//! rectangle. Both routes rely on the sign pattern, which is verified at
//! run time rather than assumed.

use crate::error::{param, Error, Result};
use crate::model::ModelParams;
use crate::spread::{PhiTwoMode, RotatedPoint, SpreadSystem, SpreadVector, PHI_MAX, PHI_MIN};

pub const DEFAULT_TOL_RESIDUAL: f64 = 1e-13;
pub const DEFAULT_MAX_OUTER_ITERS: usize = 200;
/// Two solves from opposite corners must agree this closely in every spread.
pub const UNIQUENESS_TOL: f64 = 1e-9;
/// Step for the central differences of the runtime sign check.
pub const FD_STEP: f64 = 1e-6;
/// A partial derivative only counts as signed above this magnitude.
pub const MIN_SLOPE: f64 = 1e-8;

// keeps evaluation points strictly inside the open box
const EDGE_INSET: f64 = 1e-12;
const MAX_BISECTION_STEPS: usize = 1100;
const SIGN_GRID: usize = 5;
const OUTER_GRID: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    #[default]
    NestedBisection,
    Spiral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Convergence threshold on `max(|E₀|, |E₁|)`.
    pub tol_residual: f64,
    pub max_outer_iters: usize,
    pub method: SolveMethod,
    pub phi_two: PhiTwoMode,
    /// Verify the derivative sign pattern on a grid before solving.
    pub check_monotonicity: bool,
    /// Re-solve with the spiral from two opposite corners and require
    /// agreement within [`UNIQUENESS_TOL`].
    pub cross_check_corners: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_residual: DEFAULT_TOL_RESIDUAL,
            max_outer_iters: DEFAULT_MAX_OUTER_ITERS,
            method: SolveMethod::default(),
            phi_two: PhiTwoMode::default(),
            check_monotonicity: true,
            cross_check_corners: true,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol_residual.is_finite() && self.tol_residual > 0.0) {
            return Err(param(format!(
                "tol_residual must be positive, got {}",
                self.tol_residual
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(param("max_outer_iters must be at least 1"));
        }
        Ok(())
    }
}

/// The image of the admissible `φ` box in rotated coordinates:
/// `PHI_MIN < y₀ ± y₁ < PHI_MAX` and `PHI_MIN < total − 2y₀ < PHI_MAX`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YBox {
    y0_lo: f64,
    y0_hi: f64,
}

impl YBox {
    pub fn new(total: f64) -> Result<Self> {
        let y0_lo = PHI_MIN.max(0.5 * (total - PHI_MAX));
        let y0_hi = PHI_MAX.min(0.5 * (total - PHI_MIN));
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(y0_hi - y0_lo > 4.0 * EDGE_INSET) {
            return Err(Error::Bracket(format!(
                "admissible y0 interval ({y0_lo}, {y0_hi}) is empty for spread total {total}"
            )));
        }
        Ok(Self { y0_lo, y0_hi })
    }

    pub fn for_system(system: &SpreadSystem) -> Result<Self> {
        Self::new(system.spread_total())
    }

    /// Open `y₀` interval.
    pub fn y0_bounds(&self) -> (f64, f64) {
        (self.y0_lo, self.y0_hi)
    }

    /// Largest `|y₁|` allowed at this `y₀` (open bound).
    pub fn y1_half_width(&self, y0: f64) -> f64 {
        (PHI_MAX - y0).min(y0 - PHI_MIN).max(0.0)
    }

    /// Closed `y₀` interval used for evaluation, inset from the open edges.
    pub fn y0_range(&self) -> (f64, f64) {
        (self.y0_lo + EDGE_INSET, self.y0_hi - EDGE_INSET)
    }

    /// Closed `y₁` interval used for evaluation at this `y₀`.
    pub fn y1_range(&self, y0: f64) -> (f64, f64) {
        let r = self.y1_half_width(y0) - EDGE_INSET;
        (-r, r)
    }

    pub fn contains(&self, y: RotatedPoint) -> bool {
        y.y0 > self.y0_lo && y.y0 < self.y0_hi && y.y1.abs() < self.y1_half_width(y.y0)
    }

    /// `k × k` interior grid at fractions `1/(k+1), …, k/(k+1)` of the `y₀`
    /// interval and of the local `y₁` interval.
    pub fn interior_grid(&self, k: usize) -> Vec<RotatedPoint> {
        let denom = (k + 1) as f64;
        let mut points = Vec::with_capacity(k * k);
        for a in 1..=k {
            let y0 = self.y0_lo + (self.y0_hi - self.y0_lo) * a as f64 / denom;
            let r = self.y1_half_width(y0);
            for b in 1..=k {
                let y1 = -r + 2.0 * r * b as f64 / denom;
                points.push(RotatedPoint::new(y0, y1));
            }
        }
        points
    }
}

/// Outcome of a bisection on an increasing function with a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub value: f64,
    pub steps: usize,
    /// Width of the final bracket.
    pub width: f64,
}

/// Bisects an increasing `f` on `[lo, hi]` given `f(lo) ≤ 0 ≤ f(hi)`, until
/// `|f| ≤ tol`, the bracket cannot be split further in `f64`, or `max_steps`.
/// Returns the evaluated point with the smallest `|f|`.
pub fn bisect_increasing<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_steps: usize,
) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo:e}, {f_hi:e})"
        )));
    }
    let mut best = if f_lo.abs() <= f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    let mut steps = 0;
    while best.1.abs() > tol && steps < max_steps {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        steps += 1;
        if v.abs() < best.1.abs() {
            best = (mid, v);
        }
        if v < 0.0 {
            lo = mid;
        } else if v > 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
    }
    Ok(Bisection {
        root: best.0,
        value: best.1,
        steps,
        width: hi - lo,
    })
}

/// Where the `K₁ = 0` curve is at a given `y₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum CurvePosition {
    Inside(f64),
    /// `K₁ > 0` on the whole `y₁` interval: the curve is above the box.
    Above,
    /// `K₁ < 0` on the whole `y₁` interval.
    Below,
}

fn k1(system: &SpreadSystem, y0: f64, y1: f64) -> Result<f64> {
    Ok(system.rotated_residual(RotatedPoint::new(y0, y1))?[1])
}

fn k0(system: &SpreadSystem, y0: f64, y1: f64) -> Result<f64> {
    Ok(system.rotated_residual(RotatedPoint::new(y0, y1))?[0])
}

fn locate_k1_curve(
    system: &SpreadSystem,
    ybox: &YBox,
    y0: f64,
    tol: f64,
) -> Result<CurvePosition> {
    let (lo, hi) = ybox.y1_range(y0);
    let at_lo = k1(system, y0, lo)?;
    let at_hi = k1(system, y0, hi)?;
    if at_lo > 0.0 && at_hi > 0.0 {
        return Ok(CurvePosition::Above);
    }
    if at_lo < 0.0 && at_hi < 0.0 {
        return Ok(CurvePosition::Below);
    }
    if at_lo < 0.0 && at_hi > 0.0 {
        return Err(Error::Monotonicity {
            c: system.params().c(),
            y0,
            y1: lo,
            detail: format!("K1 increases in y1 across [{lo}, {hi}]"),
        });
    }
    // K1 is decreasing in y1, so bisect -K1
    let b = bisect_increasing(|y1| Ok(-k1(system, y0, y1)?), lo, hi, tol, MAX_BISECTION_STEPS)?;
    Ok(CurvePosition::Inside(b.root))
}

/// Solves `K₁(y₀, y₁) = 0` for `y₁` by bisection; fails with a bracket
/// error when `K₁(y₀, ·)` keeps one sign over the admissible `y₁` interval.
pub fn inner_root_y1(system: &SpreadSystem, y0: f64, tol: f64) -> Result<f64> {
    let ybox = YBox::for_system(system)?;
    let (y0_lo, y0_hi) = ybox.y0_range();
    if !(y0 >= y0_lo && y0 <= y0_hi) {
        return Err(param(format!("y0 = {y0} outside [{y0_lo}, {y0_hi}]")));
    }
    match locate_k1_curve(system, &ybox, y0, tol)? {
        CurvePosition::Inside(y1) => Ok(y1),
        side => Err(Error::Bracket(format!(
            "K1(y0 = {y0}, ·) has no zero in the admissible y1 interval (curve {side:?} the box)"
        ))),
    }
}

/// Central-difference Jacobian `[[∂K₀/∂y₀, ∂K₀/∂y₁], [∂K₁/∂y₀, ∂K₁/∂y₁]]`.
pub fn rotated_jacobian(system: &SpreadSystem, y: RotatedPoint, h: f64) -> Result<[[f64; 2]; 2]> {
    let plus0 = system.rotated_residual(RotatedPoint::new(y.y0 + h, y.y1))?;
    let minus0 = system.rotated_residual(RotatedPoint::new(y.y0 - h, y.y1))?;
    let plus1 = system.rotated_residual(RotatedPoint::new(y.y0, y.y1 + h))?;
    let minus1 = system.rotated_residual(RotatedPoint::new(y.y0, y.y1 - h))?;
    let d = |p: f64, m: f64| (p - m) / (2.0 * h);
    Ok([
        [d(plus0[0], minus0[0]), d(plus1[0], minus1[0])],
        [d(plus0[1], minus0[1]), d(plus1[1], minus1[1])],
    ])
}

/// Whether a Jacobian shows `(+, +, +, −)` with every magnitude above
/// [`MIN_SLOPE`].
pub fn has_expected_signs(jac: &[[f64; 2]; 2]) -> bool {
    jac[0][0] > MIN_SLOPE && jac[0][1] > MIN_SLOPE && jac[1][0] > MIN_SLOPE && jac[1][1] < -MIN_SLOPE
}

/// Checks the derivative sign pattern on a `k × k` interior grid of the box.
pub fn check_sign_pattern(system: &SpreadSystem, ybox: &YBox, k: usize) -> Result<()> {
    for y in ybox.interior_grid(k) {
        let jac = rotated_jacobian(system, y, FD_STEP)?;
        if !has_expected_signs(&jac) {
            return Err(Error::Monotonicity {
                c: system.params().c(),
                y0: y.y0,
                y1: y.y1,
                detail: format!("finite-difference Jacobian {jac:?} breaks (+, +, +, -)"),
            });
        }
    }
    Ok(())
}

/// `g(y₀) = K₀` on the `K₁ = 0` curve, clamped to the box edge where the
/// curve leaves it. A clamped value only carries a sign, and only when the
/// `K₀ = 0` curve is still inside the box at that `y₀`.
fn outer_value(system: &SpreadSystem, ybox: &YBox, y0: f64, tol: f64) -> Result<(f64, f64, bool)> {
    let (lo, hi) = ybox.y1_range(y0);
    match locate_k1_curve(system, ybox, y0, tol)? {
        CurvePosition::Inside(y1) => Ok((k0(system, y0, y1)?, y1, true)),
        CurvePosition::Above => {
            let v = k0(system, y0, hi)?;
            if v > 0.0 {
                Ok((v, hi, false))
            } else {
                Err(Error::Bracket(format!(
                    "at y0 = {y0} both zero curves lie above the admissible box"
                )))
            }
        }
        CurvePosition::Below => {
            let v = k0(system, y0, lo)?;
            if v < 0.0 {
                Ok((v, lo, false))
            } else {
                Err(Error::Bracket(format!(
                    "at y0 = {y0} both zero curves lie below the admissible box"
                )))
            }
        }
    }
}

/// Solution of the spread system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSolution {
    pub phi: SpreadVector,
    /// Achieved `max(|E₀|, |E₁|)`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub c: f64,
    pub x_max: usize,
    pub phi_two: PhiTwoMode,
    /// Largest spread difference between the primary solve and the two
    /// corner-started spirals, when the cross-check ran.
    pub corner_agreement: Option<f64>,
}

impl PhiSolution {
    pub fn rotated(&self) -> RotatedPoint {
        RotatedPoint::from_phi(self.phi.get(0), self.phi.get(1))
    }
}

struct RawSolution {
    phi0: f64,
    phi1: f64,
    residual: f64,
    iterations: usize,
}

fn residual_norm(system: &SpreadSystem, phi0: f64, phi1: f64) -> Result<f64> {
    let e = system.residual(phi0, phi1)?;
    Ok(e[0].abs().max(e[1].abs()))
}

fn nested_bisection(system: &SpreadSystem, ybox: &YBox, cfg: &SolverConfig) -> Result<RawSolution> {
    let inner_tol = cfg.tol_residual * 1e-3;
    let (mut lo, mut hi) = ybox.y0_range();
    let (g_lo, _, _) = outer_value(system, ybox, lo, inner_tol)?;
    let (g_hi, _, _) = outer_value(system, ybox, hi, inner_tol)?;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::Bracket(format!(
            "g(y0) = K0 along K1 = 0 does not change sign on [{lo}, {hi}]: ({g_lo:e}, {g_hi:e})"
        )));
    }

    // coarse monotonicity check of g where the K1 curve is inside the box
    let mut previous: Option<(f64, f64)> = None;
    for a in 0..OUTER_GRID {
        let y0 = lo + (hi - lo) * a as f64 / (OUTER_GRID - 1) as f64;
        let (g, y1, inside) = outer_value(system, ybox, y0, inner_tol)?;
        if !inside {
            continue;
        }
        if let Some((_, g_prev)) = previous {
            if g <= g_prev {
                return Err(Error::Monotonicity {
                    c: system.params().c(),
                    y0,
                    y1,
                    detail: format!("g(y0) not increasing: {g_prev:e} then {g:e}"),
                });
            }
        }
        previous = Some((y0, g));
    }

    let mut best: Option<(f64, f64, f64)> = None;
    let mut iterations = 0;
    loop {
        let mid = lo + 0.5 * (hi - lo);
        let exhausted = mid <= lo || mid >= hi;
        let y0 = if exhausted { lo } else { mid };
        let (g, y1, inside) = outer_value(system, ybox, y0, inner_tol)?;
        if inside {
            let r = residual_norm(system, y0 + y1, y0 - y1)?;
            if best.is_none_or(|(_, _, rb)| r < rb) {
                best = Some((y0, y1, r));
            }
            if r <= cfg.tol_residual {
                break;
            }
        }
        if exhausted {
            break;
        }
        iterations += 1;
        if iterations >= cfg.max_outer_iters {
            let (y0, y1, r) = best.unwrap_or((mid, 0.0, f64::INFINITY));
            return Err(Error::Convergence {
                detail: format!("outer bisection hit the cap of {} iterations", cfg.max_outer_iters),
                best: [y0 + y1, y0 - y1, system.spread_total() - 2.0 * y0],
                residual: r,
            });
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let Some((y0, y1, residual)) = best else {
        return Err(Error::Bracket("the K1 = 0 curve never entered the admissible box".into()));
    };
    Ok(RawSolution {
        phi0: y0 + y1,
        phi1: y0 - y1,
        residual,
        iterations,
    })
}

/// Starting corner of the admissible `(φ₀, φ₁)` rectangle for the spiral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    /// `(PHI_MIN, PHI_MIN)`
    Low,
    /// `(PHI_MAX, PHI_MAX)`
    High,
}

/// Zero of the increasing map `f` on `[lo, hi]`, clamped to an end of the
/// interval when `f` keeps one sign.
fn clamped_zero<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f(lo)? >= 0.0 {
        return Ok(lo);
    }
    if f(hi)? <= 0.0 {
        return Ok(hi);
    }
    Ok(bisect_increasing(f, lo, hi, tol, MAX_BISECTION_STEPS)?.root)
}

fn free_range(total: f64, other: f64) -> (f64, f64) {
    let lo = PHI_MIN.max(total - other - PHI_MAX) + EDGE_INSET;
    let hi = PHI_MAX.min(total - other - PHI_MIN) - EDGE_INSET;
    (lo, hi)
}

/// Alternating solves of `E₀ = 0` in `φ₀` and `E₁ = 0` in `φ₁`; the iterates
/// wind around the crossing of the two zero curves.
pub fn spiral(system: &SpreadSystem, corner: Corner, cfg: &SolverConfig) -> Result<PhiSolution> {
    cfg.validate()?;
    let raw = spiral_raw(system, corner, cfg)?;
    finish(system, raw, cfg, None)
}

fn spiral_raw(system: &SpreadSystem, corner: Corner, cfg: &SolverConfig) -> Result<RawSolution> {
    let total = system.spread_total();
    let inner_tol = cfg.tol_residual * 1e-3;
    let start = match corner {
        Corner::Low => PHI_MIN + EDGE_INSET,
        Corner::High => PHI_MAX - EDGE_INSET,
    };
    let mut phi1 = start;
    let (lo, hi) = free_range(total, phi1);
    let mut phi0 = start.clamp(lo, hi);
    let mut best = (phi0, phi1, f64::INFINITY);
    for sweep in 1..=cfg.max_outer_iters {
        let (lo, hi) = free_range(total, phi1);
        let next0 = clamped_zero(|t| Ok(system.residual(t, phi1)?[0]), lo, hi, inner_tol)?;
        let (lo, hi) = free_range(total, next0);
        let next1 = clamped_zero(|t| Ok(system.residual(next0, t)?[1]), lo, hi, inner_tol)?;
        let r = residual_norm(system, next0, next1)?;
        if r < best.2 {
            best = (next0, next1, r);
        }
        if r <= cfg.tol_residual {
            return Ok(RawSolution {
                phi0: next0,
                phi1: next1,
                residual: r,
                iterations: sweep,
            });
        }
        if next0 == phi0 && next1 == phi1 {
            return Err(Error::Convergence {
                detail: format!("spiral from {corner:?} corner stalled after {sweep} sweeps"),
                best: [best.0, best.1, total - best.0 - best.1],
                residual: best.2,
            });
        }
        phi0 = next0;
        phi1 = next1;
    }
    Err(Error::Convergence {
        detail: format!(
            "spiral from {corner:?} corner hit the cap of {} sweeps",
            cfg.max_outer_iters
        ),
        best: [best.0, best.1, total - best.0 - best.1],
        residual: best.2,
    })
}

fn finish(
    system: &SpreadSystem,
    raw: RawSolution,
    cfg: &SolverConfig,
    corner_agreement: Option<f64>,
) -> Result<PhiSolution> {
    let phi = system.spread(raw.phi0, raw.phi1)?;
    if raw.residual > cfg.tol_residual {
        return Err(Error::Convergence {
            detail: format!(
                "residual {:e} above tolerance {:e}",
                raw.residual, cfg.tol_residual
            ),
            best: phi.as_array(),
            residual: raw.residual,
        });
    }
    Ok(PhiSolution {
        phi,
        residual_norm: raw.residual,
        iterations: raw.iterations,
        c: system.params().c(),
        x_max: system.params().x_max(),
        phi_two: system.mode(),
        corner_agreement,
    })
}

/// Solves the spread system at `params`.
pub fn solve_system(params: &ModelParams, config: &SolverConfig) -> Result<PhiSolution> {
    let system = SpreadSystem::with_mode(*params, config.phi_two);
    solve_in(&system, config)
}

/// As [`solve_system`] on an already assembled system; `config.phi_two` is
/// ignored in favour of the system's own mode.
pub fn solve_in(system: &SpreadSystem, config: &SolverConfig) -> Result<PhiSolution> {
    config.validate()?;
    let ybox = YBox::for_system(system)?;
    if config.check_monotonicity {
        check_sign_pattern(system, &ybox, SIGN_GRID)?;
    }
    let raw = match config.method {
        SolveMethod::NestedBisection => nested_bisection(system, &ybox, config)?,
        SolveMethod::Spiral => spiral_raw(system, Corner::Low, config)?,
    };
    let mut agreement = None;
    if config.cross_check_corners {
        let mut worst: f64 = 0.0;
        for corner in [Corner::Low, Corner::High] {
            let other = spiral_raw(system, corner, config)?;
            let total = system.spread_total();
            let diffs = [
                (other.phi0 - raw.phi0).abs(),
                (other.phi1 - raw.phi1).abs(),
                ((total - other.phi0 - other.phi1) - (total - raw.phi0 - raw.phi1)).abs(),
            ];
            let d = diffs.iter().copied().fold(0.0, f64::max);
            worst = worst.max(d);
        }
        if worst > UNIQUENESS_TOL {
            return Err(Error::Convergence {
                detail: format!("corner-started solves disagree by {worst:e}"),
                best: [raw.phi0, raw.phi1, system.spread_total() - raw.phi0 - raw.phi1],
                residual: raw.residual,
            });
        }
        agreement = Some(worst);
    }
    finish(system, raw, config, agreement)
}
