use num_complex::Complex64;
use proptest::prelude::*;

use nri_core::analysis::fit_circle_points;
use nri_core::config::{RunConfig, SyntheticSection};
use nri_core::crosscheck::relative_difference;
use nri_core::medium::{clausius_mossotti, refractive_index};
use nri_core::quantum::{
    polarizabilities_with_probe, steady_closed_form, steady_linear_solve, LocalDrive, ProbeDrive,
    SolverLimits, SystemParams,
};

const G: f64 = 1e8;

fn point() -> impl Strategy<Value = (SystemParams, LocalDrive)> {
    (
        prop::array::uniform3(0.01f64..1.0),
        prop::array::uniform3(-10.0f64..10.0),
        prop::array::uniform2(0.0f64..12.0),
    )
        .prop_map(|([g3, g4, g12], [dp, dc, ds], [oc, os])| {
            let params = SystemParams {
                gamma3: g3 * G,
                gamma4: g4 * G,
                gamma12: g12 * G,
                delta_p: dp * G,
                delta_c: dc * G,
                delta_s: ds * G,
                ..SystemParams::paper_defaults(0.0)
            };
            (params, LocalDrive::real(oc * G, os * G))
        })
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn routes_agree((params, drive) in point()) {
        let limits = SolverLimits::default();
        let probe = ProbeDrive::from_electric(&params, Complex64::new(1e-3 * G, 0.0));
        if let (Ok(a), Ok(b)) = (
            steady_closed_form(&params, &drive, &probe, &limits),
            steady_linear_solve(&params, &drive, &probe, &limits),
        ) {
            for ((_, x), (_, y)) in a.components().iter().zip(b.components().iter()) {
                prop_assert!(relative_difference(*x, *y) <= 1e-9);
            }
        }
    }

    #[test]
    fn amplitudes_are_linear_in_the_probe((params, drive) in point(), alpha in 1e-3f64..1e3) {
        let limits = SolverLimits::default();
        let probe = ProbeDrive::from_electric(&params, Complex64::new(1e-3 * G, 0.0));
        let base = steady_linear_solve(&params, &drive, &probe, &limits);
        let scaled = steady_linear_solve(&params, &drive, &probe.scaled(alpha), &limits);
        if let (Ok(a), Ok(b)) = (base, scaled) {
            for ((_, x), (_, y)) in a.components().iter().zip(b.components().iter()) {
                prop_assert!(relative_difference(*x * alpha, *y) <= 1e-12);
            }
        }
    }

    #[test]
    fn polarizabilities_ignore_probe_strength((params, drive) in point(), factor in 1e-3f64..1e3) {
        let limits = SolverLimits::default();
        let a = polarizabilities_with_probe(&params, &drive, 1e-3 * G, &limits);
        let b = polarizabilities_with_probe(&params, &drive, 1e-3 * G * factor, &limits);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!(relative_difference(a.gamma_e, b.gamma_e) <= 1e-12);
            prop_assert!(relative_difference(a.gamma_m, b.gamma_m) <= 1e-12);
        }
    }

    #[test]
    fn dilute_limit_bound(re in -1e-3f64..1e-3, im in -1e-3f64..1e-3) {
        let x = Complex64::new(re, im);
        prop_assume!(x.norm() <= 1e-3);
        let r = clausius_mossotti(1.0, x, 1e-9).unwrap();
        prop_assert!((r - (1.0 + x)).norm() <= 2.0 * x.norm_sqr());
    }

    #[test]
    fn index_squares_back(eps in complex(), mu in complex()) {
        let n = refractive_index(eps, mu, 1e-9).n;
        let prod = eps * mu;
        prop_assert!((n * n - prod).norm() <= 1e-12 * prod.norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn passive_media_have_non_negative_loss(
        er in -10.0f64..10.0, ei in 0.0f64..10.0, mr in -10.0f64..10.0, mi in 0.0f64..10.0,
    ) {
        let n = refractive_index(Complex64::new(er, ei), Complex64::new(mr, mi), 1e-9).n;
        prop_assert!(n.im >= 0.0);
        if er < 0.0 && mr < 0.0 {
            prop_assert!(n.re <= 0.0);
        }
    }

    #[test]
    fn circle_fit_recovers_exact_circles(
        cx in -1.0f64..1.0, cy in -1.0f64..1.0, r in 0.01f64..2.0, n in 3usize..64,
    ) {
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                (cx + r * t.cos(), cy + r * t.sin())
            })
            .collect();
        let fit = fit_circle_points(&pts).unwrap();
        prop_assert!((fit.radius - r).abs() <= 1e-9 * (1.0 + r));
        prop_assert!((fit.center_x - cx).abs() <= 1e-9 && (fit.center_y - cy).abs() <= 1e-9);
    }

    #[test]
    fn config_round_trips(
        density in 1e20f64..1e25, dp in prop::collection::vec(-20.0f64..20.0, 0..6),
        nx in 2usize..500, level in prop::option::of(-5.0f64..5.0),
        center in prop::option::of((0.0f64..2.0, 0.0f64..2.0)),
    ) {
        let mut cfg = RunConfig::paper();
        cfg.system.density = density;
        cfg.sweep.delta_p = dp;
        cfg.grid.nx = nx;
        cfg.analysis.level = level;
        cfg.synthetic = center.map(|(x, y)| SyntheticSection { center: [x, y] });
        prop_assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
    }
}
