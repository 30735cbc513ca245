use fracreg_core::caputo::{l1_operator, l2_operator, SampledFunction, TimeGrid};
use fracreg_core::expr::Var;
use fracreg_core::regdiag::{assumption1_check, Assumption1, SteadyOperator};
use fracreg_core::specialfn::{gamma, ln_gamma, mittag_leffler};
use fracreg_core::tridiag::solve_tridiagonal;
use fracreg_core::{Expr, FractionalOrder, SeriesEvalConfig};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 96, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gamma_agrees_with_libm(x in 0.05f64..40.0) {
        let want = libm::tgamma(x);
        let got = gamma(x).unwrap();
        prop_assert!(((got - want) / want).abs() < 1e-12, "{x}: {got} vs {want}");
    }

    #[test]
    fn gamma_recurrence(x in 0.01f64..100.0) {
        let lhs = ln_gamma(x + 1.0).unwrap();
        let rhs = ln_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn looser_tolerance_stays_within_its_bound(alpha in 0.2f64..2.0, z in -2.0f64..6.0) {
        // the tail bound is rigorous, so truncation error never exceeds abs_tol
        let tight = mittag_leffler(alpha, z, &SeriesEvalConfig::default()).unwrap();
        let loose_cfg = SeriesEvalConfig::new(1e-7, 10_000, 50.0).unwrap();
        let loose = mittag_leffler(alpha, z, &loose_cfg).unwrap();
        prop_assert!((tight - loose).abs() <= 1e-7 + 1e-12 * tight.abs());
    }

    #[test]
    fn mittag_leffler_increases_on_positive_axis(alpha in 0.2f64..2.0, z in 0.0f64..10.0, dz in 0.01f64..1.0) {
        // E_alpha(z) ~ exp(z^(1/alpha)) / alpha leaves the f64 range beyond this
        prop_assume!((z + dz).powf(1.0 / alpha) < 600.0);
        let cfg = SeriesEvalConfig::default();
        prop_assert!(mittag_leffler(alpha, z + dz, &cfg).unwrap() > mittag_leffler(alpha, z, &cfg).unwrap());
    }

    #[test]
    fn l1_operator_is_linear(
        delta in 0.05f64..0.95,
        grading in 1.0f64..4.0,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        m in 2usize..40,
    ) {
        let d = FractionalOrder::new(delta).unwrap();
        let grid = TimeGrid::new(1.5, m, grading).unwrap();
        let f = SampledFunction::from_fn(grid.clone(), |t| t.sin());
        let g = SampledFunction::from_fn(grid.clone(), |t| t * t * t);
        let h = SampledFunction::from_fn(grid, |t| a * t.sin() + b * t * t * t);
        let (lf, lg, lh) = (l1_operator(&f, d).unwrap(), l1_operator(&g, d).unwrap(), l1_operator(&h, d).unwrap());
        for ((x, y), z) in lf.values().iter().zip(lg.values()).zip(lh.values()) {
            prop_assert!((a * x + b * y - z).abs() <= 1e-12 * (1.0 + z.abs()));
        }
    }

    #[test]
    fn l1_operator_is_exact_for_linear_functions(delta in 0.05f64..0.95, grading in 1.0f64..4.0, m in 1usize..40) {
        let d = FractionalOrder::new(delta).unwrap();
        let grid = TimeGrid::new(2.0, m, grading).unwrap();
        let f = SampledFunction::from_fn(grid, |t| 3.0 * t - 1.0);
        let out = l1_operator(&f, d).unwrap();
        let g2 = gamma(2.0 - delta).unwrap();
        for (&t, v) in f.grid().nodes().iter().zip(out.values()) {
            let want = 3.0 * t.powf(1.0 - delta) / g2;
            prop_assert!((v - want).abs() <= 1e-11 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn l2_operator_is_exact_for_quadratics(delta in 1.05f64..1.95, m in 1usize..40, v0 in -2.0f64..2.0) {
        let d = FractionalOrder::new(delta).unwrap();
        let grid = TimeGrid::uniform(1.0, m).unwrap();
        let f = SampledFunction::from_fn(grid, |t| 1.0 + v0 * t + t * t);
        let out = l2_operator(&f, d, v0).unwrap();
        let g = gamma(3.0 - delta).unwrap();
        for (&t, v) in f.grid().nodes().iter().zip(out.values()) {
            let want = 2.0 * t.powf(2.0 - delta) / g;
            prop_assert!((v - want).abs() <= 1e-10 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn max_principle_verdict_survives_larger_reaction(
        slope in -2.0f64..2.0,
        r0 in 0.0f64..3.0,
        extra in 0.0f64..10.0,
    ) {
        let op = |r: f64| SteadyOperator::new(0.0, 1.0, Expr::one(), Expr::constant(slope) * Expr::x(), Expr::constant(r) + Expr::x()).unwrap();
        prop_assert_eq!(assumption1_check(&op(r0)), Assumption1::MaxPrinciple);
        prop_assert_eq!(assumption1_check(&op(r0 + extra)), Assumption1::MaxPrinciple);
    }

    #[test]
    fn tridiagonal_residual_is_small(
        rows in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -5.0f64..5.0), 1..60),
    ) {
        let n = rows.len();
        let lower: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let upper: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let diag: Vec<f64> = rows.iter().map(|r| 2.5 + r.0.abs() + r.1.abs()).collect();
        let rhs: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for i in 0..n {
            let mut s = diag[i] * x[i];
            if i > 0 {
                s += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                s += upper[i] * x[i + 1];
            }
            prop_assert!((s - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn symbolic_derivative_matches_central_difference(x in 0.1f64..2.0, t in 0.1f64..2.0, c in 0.5f64..2.0) {
        let e = (Expr::constant(c) * Expr::x()).sin() * Expr::t().powf(1.5) + (Expr::x() / (Expr::one() + Expr::t())).exp();
        let h = 1e-5;
        for var in [Var::X, Var::T] {
            let (dx, dt) = if var == Var::X { (h, 0.0) } else { (0.0, h) };
            let fd = (e.eval(x + dx, t + dt) - e.eval(x - dx, t - dt)) / (2.0 * h);
            let d = e.diff(var).eval(x, t);
            prop_assert!((fd - d).abs() < 1e-7 * (1.0 + d.abs()));
        }
    }
}
