use proptest::prelude::*;

use rigidcol::bound::{evaluate, scan_grid, threshold_search};
use rigidcol::model::ModelParams;
use rigidcol::solver::{inner_root_y1, solve_system, SolveMethod, SolverConfig, YBox};
use rigidcol::spread::{build_mu_profile, is_structural_zero, SpreadSystem, SpreadVector};
use rigidcol::Error;

fn system(c: f64) -> SpreadSystem {
    SpreadSystem::new(ModelParams::for_bound(c, 60).unwrap())
}

#[test]
fn residual_matches_high_precision_reference() {
    // independent 50-digit evaluation at φ₀ = φ₁ = 0.33, c = 2.468155, x_max = 60
    let e = system(2.468155).residual(0.33, 0.33).unwrap();
    let want = [-0.113_905_176_572_288, -0.204_404_322_905_747];
    for (got, want) in e.iter().zip(want) {
        assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn inner_curve_rises_with_y0() {
    let sys = system(2.468155);
    let ybox = YBox::for_system(&sys).unwrap();
    let (lo, _) = ybox.y0_range();
    // the K₁ = 0 curve stays inside the box comfortably below y₀ = 0.35
    let hi = 0.35;
    let roots: Vec<f64> = (0..10)
        .map(|k| {
            let y0 = lo + (hi - lo) * (k as f64 + 0.5) / 10.0;
            inner_root_y1(&sys, y0, 1e-15).unwrap()
        })
        .collect();
    assert!(roots.windows(2).all(|w| w[1] > w[0]), "{roots:?}");
}

#[test]
fn inner_root_reports_missing_bracket() {
    let sys = system(2.468155);
    let (_, hi) = YBox::for_system(&sys).unwrap().y0_range();
    let err = inner_root_y1(&sys, hi - 1e-4, 1e-14).unwrap_err();
    assert!(matches!(err, Error::Bracket(_)), "{err}");
}

#[test]
fn solutions_move_continuously_and_bound_decreases() {
    let cfg = SolverConfig::default();
    let grid = scan_grid(2.40, 2.50, 21);
    let reports: Vec<_> = grid.iter().map(|&c| evaluate(c, 60, &cfg).unwrap()).collect();
    for w in reports.windows(2) {
        assert!(w[1].f_value < w[0].f_value, "F not decreasing at c = {}", w[1].c);
        for i in 0..3 {
            let jump = (w[1].phi.get(i) - w[0].phi.get(i)).abs();
            assert!(jump < 1e-2, "phi_{i} jumps by {jump} at c = {}", w[1].c);
        }
    }
}

#[test]
fn tighter_tolerance_moves_solution_little() {
    let params = ModelParams::for_bound(2.45, 60).unwrap();
    let loose = SolverConfig {
        tol_residual: 1e-11,
        ..SolverConfig::default()
    };
    let a = solve_system(&params, &loose).unwrap();
    let b = solve_system(&params, &SolverConfig::default()).unwrap();
    for i in 0..3 {
        assert!((a.phi.get(i) - b.phi.get(i)).abs() < 1e-9);
    }
}

#[test]
fn methods_agree_across_working_range() {
    for c in [2.40, 2.43, 2.47, 2.50] {
        let params = ModelParams::for_bound(c, 60).unwrap();
        let nested = solve_system(&params, &SolverConfig::default()).unwrap();
        let spiral = solve_system(
            &params,
            &SolverConfig {
                method: SolveMethod::Spiral,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        for i in 0..3 {
            assert!((nested.phi.get(i) - spiral.phi.get(i)).abs() < 1e-9, "c = {c}");
        }
    }
}

#[test]
fn threshold_insensitive_to_truncation() {
    let cfg = SolverConfig::default();
    let a = threshold_search(60, 1e-7, &cfg).unwrap();
    let b = threshold_search(120, 1e-7, &cfg).unwrap();
    assert!((a.c_star - b.c_star).abs() < 1e-5, "{} vs {}", a.c_star, b.c_star);
    assert!(a.bracket.1 - a.bracket.0 <= 1e-7);
    assert!(a.f_at_bracket.0 >= 1.0 && a.f_at_bracket.1 < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mu_rows_and_types_are_consistent(p0 in 0.26f64..0.4, p1 in 0.26f64..0.4, p2 in 0.26f64..0.4,
                                        c in 2.40f64..2.50) {
        let phi = SpreadVector::new(p0, p1, p2).unwrap();
        let params = ModelParams::for_bound(c, 60).unwrap();
        let mu = build_mu_profile(&phi, &params).unwrap();
        for x in 0..=60 {
            prop_assert!(mu.constraint(x).abs() < 1e-12);
            for i in 0..3 {
                prop_assert!((mu.row_sum(x, i) - mu.alpha(x, i)).abs() < 1e-12);
                for j in 0..=x {
                    let v = mu.entry(i, x, j).unwrap();
                    if is_structural_zero(x, j, i) {
                        prop_assert_eq!(v, 0.0);
                    } else {
                        prop_assert!(v > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_is_a_relabelling(p0 in 0.27f64..0.39, p1 in 0.27f64..0.39) {
        let sys = system(2.468155);
        prop_assume!(sys.spread(p0, p1).is_ok());
        let y = rigidcol::spread::RotatedPoint::from_phi(p0, p1);
        prop_assert_eq!(sys.rotated_residual(y).unwrap(), sys.residual(y.phi0(), y.phi1()).unwrap());
    }
}
