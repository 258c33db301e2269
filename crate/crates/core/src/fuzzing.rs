//! Byte-level entry points shared by the fuzz targets and the corpus
//! regression test. Each returns whether the input was accepted and panics
//! only if an accepted value breaks a round-trip or shape invariant.

use std::str;

use crate::dynamics::{read_trajectory_csv, write_trajectory_csv, Trajectory};
use crate::experiment::ExperimentSpec;
use crate::metrics::MetricSeries;
use crate::model::{check_icass, DelayKind, InfluenceFunction, InitialDatum, SystemConfig, WeightScheme};

pub fn experiment_spec(data: &[u8]) -> bool {
    let Ok(text) = str::from_utf8(data) else { return false };
    let Ok(spec) = ExperimentSpec::from_json(text) else { return false };
    let again = ExperimentSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(again, spec);
    true
}

pub fn system_config(data: &[u8]) -> bool {
    let Ok(text) = str::from_utf8(data) else { return false };
    let Ok(config) = SystemConfig::from_json(text) else { return false };
    let again = SystemConfig::from_json(&serde_json::to_string(&config).unwrap()).unwrap();
    assert_eq!(again, config);
    true
}

/// Parses a datum and, when it fits some system, evaluates it on the history
/// window of a unit delay.
pub fn initial_datum(data: &[u8]) -> bool {
    let Ok(text) = str::from_utf8(data) else { return false };
    let Ok(datum) = InitialDatum::from_json(text) else { return false };
    let dim = match &datum {
        InitialDatum::ConstantPerAgent { values } => values.first().map_or(0, Vec::len),
        InitialDatum::Sampled { agents } => agents.first().and_then(|a| a.values.first()).map_or(0, Vec::len),
    };
    let config = SystemConfig::new(
        datum.n_agents(),
        dim,
        1.0,
        DelayKind::Transmission,
        WeightScheme::Normalized,
        InfluenceFunction::default(),
    );
    if let Ok(config) = config {
        if datum.validate(&config).is_ok() {
            let d = datum.max_diameter(1.0);
            let r = datum.max_radius(1.0);
            if d.is_finite() && r.is_finite() {
                assert!(d <= 2.0 * r * (1.0 + 1e-12) + 1e-300, "diameter {d} exceeds twice radius {r}");
            }
            let _ = datum.coordinate_bounds(1.0);
            let _ = check_icass(&datum, &config);
        }
    }
    true
}

pub fn trajectory_csv(data: &[u8]) -> bool {
    let Ok(table) = read_trajectory_csv(data) else { return false };
    assert_eq!(table.grid.len(), table.states.len());
    assert!(table.states.iter().all(|s| s.n_agents() == table.n_agents && s.dim() == table.dim));
    true
}

pub fn trajectory_json(data: &[u8]) -> bool {
    let Ok(text) = str::from_utf8(data) else { return false };
    let Ok(tr) = Trajectory::from_json(text) else { return false };
    let again = Trajectory::from_json(&tr.to_json().unwrap()).unwrap();
    assert_eq!(again, tr);
    let mut csv = Vec::new();
    write_trajectory_csv(&tr, &mut csv).unwrap();
    let table = read_trajectory_csv(csv.as_slice()).unwrap();
    assert_eq!(table.grid, tr.grid());
    let _ = tr.sample(tr.end_time());
    let _ = tr.sample_delayed(tr.end_time());
    true
}

pub fn metrics_csv(data: &[u8]) -> bool {
    let Ok(series) = MetricSeries::read_csv(data) else { return false };
    let mut out = Vec::new();
    series.write_csv(&mut out).unwrap();
    assert_eq!(MetricSeries::read_csv(out.as_slice()).unwrap(), series);
    true
}

pub type Entry = fn(&[u8]) -> bool;

/// Named entry points, in the order of the fuzz target list.
pub const TARGETS: [(&str, Entry); 6] = [
    ("experiment_spec", experiment_spec),
    ("system_config", system_config),
    ("initial_datum", initial_datum),
    ("trajectory_csv", trajectory_csv),
    ("trajectory_json", trajectory_json),
    ("metrics_csv", metrics_csv),
];
