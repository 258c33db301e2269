use proptest::prelude::*;

use hkdelay::dynamics::{integrate, read_trajectory_csv, write_trajectory_csv, IntegratorSpec, TrajectoryTable};
use hkdelay::experiment::{run_experiment, run_sweep, DatumSpec, ExperimentSpec, SweepParam};
use hkdelay::metrics::{diameter, radius, MetricSeries};
use hkdelay::model::{DelayKind, InfluenceFunction, InitialDatum, SystemConfig, WeightScheme};

fn kind() -> impl Strategy<Value = DelayKind> {
    prop_oneof![Just(DelayKind::Transmission), Just(DelayKind::Reaction)]
}

fn scheme() -> impl Strategy<Value = WeightScheme> {
    prop_oneof![Just(WeightScheme::ClassicalScaled), Just(WeightScheme::Normalized)]
}

/// System plus a constant datum with matching shape.
fn system() -> impl Strategy<Value = (SystemConfig, InitialDatum)> {
    (2usize..6, 1usize..4, 0.05f64..2.0, kind(), scheme(), 0.2f64..3.0).prop_flat_map(|(n, d, tau, k, s, gamma)| {
        let config = SystemConfig::new(n, d, tau, k, s, InfluenceFunction::AlgebraicDecay { gamma }).unwrap();
        prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), n)
            .prop_map(move |values| (config.clone(), InitialDatum::constant(values)))
    })
}

fn spec(config: SystemConfig, datum: InitialDatum, horizon: f64) -> ExperimentSpec {
    ExperimentSpec {
        config,
        datum: datum.into(),
        integrator: None,
        horizon: Some(horizon),
        outputs: vec![],
        seed: 0,
        consensus_rel_tol: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trajectory_csv_round_trip((config, datum) in system()) {
        let tr = integrate(&config, &datum, 3.0 * config.tau, &IntegratorSpec::rk4(config.tau / 8.0)).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&tr, &mut buf).unwrap();
        let table = read_trajectory_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(table, TrajectoryTable::from_trajectory(&tr));
    }

    #[test]
    fn metrics_csv_round_trip((config, datum) in system()) {
        let tr = integrate(&config, &datum, 3.0 * config.tau, &IntegratorSpec::rk4(config.tau / 8.0)).unwrap();
        let m = MetricSeries::compute(&tr, 1.0);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        prop_assert_eq!(MetricSeries::read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn diameter_within_twice_radius((config, datum) in system()) {
        let tr = integrate(&config, &datum, 4.0 * config.tau, &IntegratorSpec::rk4(config.tau / 16.0)).unwrap();
        for k in 0..tr.len() {
            let s = tr.node_state(k);
            prop_assert!(diameter(&s) <= 2.0 * radius(&s) * (1.0 + 1e-12) + 1e-15);
        }
        let m = MetricSeries::compute(&tr, 1.0);
        for (d, r) in m.d_x.iter().zip(&m.r_x) {
            prop_assert!(*d <= 2.0 * r * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn transmission_stays_in_initial_ball((config, datum) in system()) {
        prop_assume!(config.delay_kind == DelayKind::Transmission);
        let tr = integrate(&config, &datum, 10.0 * config.tau, &IntegratorSpec::rk4(config.tau / 16.0)).unwrap();
        let m = MetricSeries::compute(&tr, 1.0);
        let r0 = datum.max_radius(config.tau);
        prop_assert!(m.r_x.iter().all(|r| *r <= r0 + 1e-9));
    }

    #[test]
    fn report_replays_exactly((config, datum) in system()) {
        let horizon = 5.0 * config.tau;
        let first = run_experiment(&spec(config, datum, horizon)).unwrap();
        let text = serde_json::to_string(&first.report).unwrap();
        let second = run_experiment(&ExperimentSpec::from_json(&text).unwrap()).unwrap();
        prop_assert_eq!(&second.report, &first.report);
        prop_assert_eq!(second.metrics, first.metrics);
    }

    #[test]
    fn empirical_rate_is_finite_when_present((config, datum) in system()) {
        let out = run_experiment(&spec(config, datum, 10.0)).unwrap();
        if let Some(c) = out.report.c_emp {
            prop_assert!(c.is_finite());
            let fit = out.report.fit.unwrap();
            prop_assert!(fit.points >= 2);
        }
    }
}

#[test]
fn sweeps_are_deterministic_and_ordered() {
    let config = SystemConfig::new(6, 2, 0.5, DelayKind::Transmission, WeightScheme::Normalized, InfluenceFunction::default())
        .unwrap();
    let base = ExperimentSpec {
        config,
        datum: DatumSpec::RandomUniform { low: -1.0, high: 1.0 },
        integrator: None,
        horizon: Some(10.0),
        outputs: vec![],
        seed: 9,
        consensus_rel_tol: None,
    };
    let values = [0.9, 0.1, 2.0, 0.5, 1.3, 0.25];
    let a = run_sweep(&base, SweepParam::Tau, &values);
    let b = run_sweep(&base, SweepParam::Tau, &values);
    assert_eq!(a, b);
    assert_eq!(a.iter().map(|r| r.value).collect::<Vec<_>>(), values);
    // every row matches its own sequential run
    for (row, v) in a.iter().zip(values) {
        let mut s = base.clone();
        s.config.tau = v;
        assert_eq!(row.c_emp, run_experiment(&s).unwrap().report.c_emp);
    }
}

#[test]
fn agent_count_sweep_needs_resizable_datum() {
    let config = SystemConfig::new(3, 1, 0.5, DelayKind::Transmission, WeightScheme::Normalized, InfluenceFunction::default())
        .unwrap();
    let fixed = spec(config, InitialDatum::constant(vec![vec![0.0], vec![1.0], vec![2.0]]), 5.0);
    let rows = run_sweep(&fixed, SweepParam::NAgents, &[3.0, 4.0]);
    assert_eq!(rows[0].status, "ok");
    assert!(rows[1].status.starts_with("error"), "{}", rows[1].status);
}
