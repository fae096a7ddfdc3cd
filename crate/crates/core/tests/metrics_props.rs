use proptest::prelude::*;
use tvopt_core::metrics::{
    contraction_certificate, dynamic_regret, path_length, plateau_bound, plateau_bound_k, regret_bound_check,
    tracking_error, ContractionParams, MetricSeries, RegretParams,
};
use tvopt_core::problems::{Drift, QuadraticStream, QuadraticStreamConfig};
use tvopt_core::runner::{oracle_sequence, run_online};
use tvopt_core::solvers::{BatchOptions, ProxGradState};
use tvopt_core::{DirectionRule, GradientNoiseModel, RegularizerSpec, Vector};

fn stream(seed: u64, rank: Option<usize>, amplitude: f64, reg: f64) -> QuadraticStream {
    let mut cfg = QuadraticStreamConfig::new(5, 0.5, 3.0, 80, seed);
    cfg.rank = rank;
    cfg.drift = Drift::sinusoid(amplitude, 0.07);
    if reg > 0.0 {
        cfg.reg = RegularizerSpec::l1(reg).unwrap();
    }
    QuadraticStream::new(cfg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contraction_certificate_holds(
        seed in 0u64..10_000,
        amplitude in 0.0f64..2.0,
        radius in 0.0f64..0.3,
        step in 0.2f64..1.0,
        reg in 0.0f64..0.5,
    ) {
        let p = stream(seed, None, amplitude, reg);
        let (mu, lip) = (p.mu(), p.lip());
        let alpha = step * 2.0 / lip;
        let noise = GradientNoiseModel::bounded(radius, DirectionRule::RandomUnit, seed).unwrap();
        let mut solver = ProxGradState::new(Vector::zeros(5), alpha, 1).unwrap();
        let trace = run_online(&p, &mut solver, &noise, None).unwrap();
        let oracle = oracle_sequence(&p, &BatchOptions::with_tol(1e-12)).unwrap();
        let report = contraction_certificate(&trace, &oracle, &ContractionParams::new(alpha, mu, lip)).unwrap();
        prop_assert!(report.applicable);
        prop_assert_eq!(report.violations, 0, "{}", report);
        prop_assert!(report.plateau.unwrap().holds);
    }

    #[test]
    fn regret_bound_holds_without_strong_convexity(
        seed in 0u64..10_000,
        amplitude in 0.0f64..2.0,
        radius in 0.0f64..0.3,
    ) {
        let p = stream(seed, Some(2), amplitude, 0.0);
        let lip = p.lip();
        let noise = GradientNoiseModel::bounded(radius, DirectionRule::RandomUnit, seed).unwrap();
        let mut solver = ProxGradState::new(Vector::zeros(5), 1.0 / lip, 1).unwrap();
        let trace = run_online(&p, &mut solver, &noise, None).unwrap();
        let oracle = oracle_sequence(&p, &BatchOptions::with_tol(1e-12)).unwrap();
        let report = regret_bound_check(&trace, &oracle, &RegretParams::new(1.0 / lip, lip)).unwrap();
        prop_assert!(report.applicable);
        prop_assert_eq!(report.violations, 0, "{}", report);
        // Every step has nonnegative instantaneous regret.
        let reg = dynamic_regret(&trace, &oracle).unwrap();
        prop_assert!(reg.values.iter().all(|r| *r >= -1e-9));
    }

    #[test]
    fn path_length_dominates_displacement(seed in 0u64..10_000, amplitude in 0.0f64..3.0) {
        let p = stream(seed, None, amplitude, 0.0);
        let oracle = oracle_sequence(&p, &BatchOptions::with_tol(1e-12)).unwrap();
        let (sigma, total) = path_length(&oracle).unwrap();
        prop_assert_eq!(sigma.values[0], 0.0);
        prop_assert!(sigma.values.iter().all(|s| *s >= 0.0));
        let span = (&oracle.last().unwrap().x_star - &oracle[0].x_star).norm();
        prop_assert!(total.total() + 1e-12 >= span);
    }

    #[test]
    fn oracle_has_zero_tracking_error(seed in 0u64..10_000) {
        let p = stream(seed, None, 1.0, 0.0);
        let oracle = oracle_sequence(&p, &BatchOptions::with_tol(1e-12)).unwrap();
        let mut tr = tvopt_core::IterateTrace::new("oracle", Vector::zeros(5), None, 1);
        for o in &oracle {
            tr.push(tvopt_core::TraceRecord {
                t: tr.len() + 1,
                x: o.x_star.clone(),
                lambda: None,
                objective: o.f_star,
                v: Vector::zeros(5),
                grad_error: 0.0,
                wall_time: 0.0,
            });
        }
        prop_assert!(tracking_error(&tr, &oracle).unwrap().values.iter().all(|e| *e == 0.0));
        prop_assert!(dynamic_regret(&tr, &oracle).unwrap().total().abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn running_sum_is_monotone(values in proptest::collection::vec(0.0f64..10.0, 1..50)) {
        let m = MetricSeries::running_sum("x", values.clone());
        prop_assert!(m.cumulative.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!((m.total() - values.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn running_max_tracks_the_maximum(values in proptest::collection::vec(-10.0f64..10.0, 1..50)) {
        let m = MetricSeries::running_max("x", values.clone());
        prop_assert_eq!(m.total(), values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }

    #[test]
    fn plateau_bound_k_generalizes_k1(alpha in 0.01f64..1.0, q in 0.0f64..0.99, e in 0.0f64..1.0, s in 0.0f64..1.0) {
        let a = plateau_bound(alpha, q, e, s);
        prop_assert!((plateau_bound_k(alpha, q, e, s, 1) - a).abs() <= 1e-12 * (1.0 + a));
        // More steps per slice never loosen the bound.
        prop_assert!(plateau_bound_k(alpha, q, e, s, 3) <= plateau_bound_k(alpha, q, e, s, 1) * (1.0 + 1e-12) + 1e-12);
    }
}
