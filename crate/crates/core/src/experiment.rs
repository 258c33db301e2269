//! Experiment specifications, single runs and parameter sweeps.
//!
//! A spec names a system, an initial datum (possibly random), integrator
//! settings and the artifacts to produce. Running it resolves every default
//! and the random datum, so the report can embed a spec that replays the run
//! exactly.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, IntegratorSpec, Trajectory, DEFAULT_HORIZON_DELAYS};
use crate::error::{Error, Result};
use crate::metrics::{fit_decay_rate, DecayFit, MetricSeries};
use crate::model::{InfluenceFunction, InitialDatum, SampledPath, SystemConfig};
use crate::rates::{check_preconditions, PreconditionReport, RateResult};
use crate::toy::{classify_regime, ToyRegime};

/// Fits stop where `d_x` falls below this fraction of `d_x^0`.
pub const FIT_FLOOR: f64 = 1e-12;

/// Default consensus threshold relative to `d_x^0`.
pub const DEFAULT_CONSENSUS_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Trajectory,
    Metrics,
    Rates,
    Report,
}

impl OutputKind {
    pub const ALL: [OutputKind; 4] = [OutputKind::Trajectory, OutputKind::Metrics, OutputKind::Rates, OutputKind::Report];

    pub fn file_name(self) -> &'static str {
        match self {
            OutputKind::Trajectory => "trajectory.csv",
            OutputKind::Metrics => "metrics.csv",
            OutputKind::Rates => "rates.json",
            OutputKind::Report => "report.json",
        }
    }
}

/// Initial datum as written in a spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumSpec {
    ConstantPerAgent { values: Vec<Vec<f64>> },
    Sampled { agents: Vec<SampledPath> },
    /// Constant history per agent, each coordinate uniform in `[low, high)`.
    RandomUniform { low: f64, high: f64 },
}

impl DatumSpec {
    pub fn resolve(&self, config: &SystemConfig, seed: u64) -> Result<InitialDatum> {
        let datum = match self {
            DatumSpec::ConstantPerAgent { values } => InitialDatum::ConstantPerAgent { values: values.clone() },
            DatumSpec::Sampled { agents } => InitialDatum::Sampled { agents: agents.clone() },
            DatumSpec::RandomUniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(Error::InvalidDatum(format!("random range [{low}, {high}) is empty")));
                }
                InitialDatum::ConstantPerAgent { values: random_uniform(config.n_agents, config.dim, *low, *high, seed) }
            }
        };
        datum.validate(config)?;
        Ok(datum)
    }
}

impl From<InitialDatum> for DatumSpec {
    fn from(d: InitialDatum) -> Self {
        match d {
            InitialDatum::ConstantPerAgent { values } => DatumSpec::ConstantPerAgent { values },
            InitialDatum::Sampled { agents } => DatumSpec::Sampled { agents },
        }
    }
}

/// `n` points in `[low, high)^d` from a ChaCha8 stream seeded with `seed`.
pub fn random_uniform(n: usize, d: usize, low: f64, high: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(low..high)).collect()).collect()
}

fn default_outputs() -> Vec<OutputKind> {
    OutputKind::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub config: SystemConfig,
    pub datum: DatumSpec,
    /// RK4 with `dt = tau / 64` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorSpec>,
    /// `20 tau` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub seed: u64,
    /// Consensus threshold as a fraction of `d_x^0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consensus_rel_tol: Option<f64>,
}

impl ExperimentSpec {
    /// Parses a spec. A report is accepted too; its embedded spec is used.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            config: Option<serde::de::IgnoredAny>,
            spec: Option<serde::de::IgnoredAny>,
        }
        let probe: Probe = serde_json::from_str(text)?;
        let spec: ExperimentSpec = if probe.config.is_none() && probe.spec.is_some() {
            #[derive(Deserialize)]
            struct Wrapped {
                spec: ExperimentSpec,
            }
            serde_json::from_str::<Wrapped>(text)?.spec
        } else {
            serde_json::from_str(text)?
        };
        spec.config.validate()?;
        Ok(spec)
    }

    pub fn integrator(&self) -> IntegratorSpec {
        self.integrator.unwrap_or_else(|| IntegratorSpec::default_for(self.config.tau))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(DEFAULT_HORIZON_DELAYS * self.config.tau)
    }

    pub fn consensus_rel_tol(&self) -> f64 {
        self.consensus_rel_tol.unwrap_or(DEFAULT_CONSENSUS_REL_TOL)
    }

    /// Spec with every default filled in and the datum made explicit.
    pub fn resolve(&self) -> Result<ExperimentSpec> {
        self.config.validate()?;
        let datum = self.datum.resolve(&self.config, self.seed)?;
        let integrator = self.integrator();
        integrator.steps_per_delay(self.config.tau)?;
        Ok(ExperimentSpec {
            config: self.config.clone(),
            datum: datum.into(),
            integrator: Some(integrator),
            horizon: Some(self.horizon()),
            outputs: self.outputs.clone(),
            seed: self.seed,
            consensus_rel_tol: Some(self.consensus_rel_tol()),
        })
    }

    pub fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// Fully resolved spec; running it again reproduces this report.
    pub spec: ExperimentSpec,
    pub preconditions: PreconditionReport,
    /// Rate of the first applicable theorem that provides one.
    pub theoretical_rate: Option<RateResult>,
    #[serde(rename = "C_emp")]
    pub c_emp: Option<f64>,
    pub fit: Option<DecayFit>,
    pub d_x0: f64,
    pub d_x_final: f64,
    pub consensus_time: Option<f64>,
    pub blow_up_time: Option<f64>,
    pub end_time: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub trajectory: Trajectory,
    pub metrics: MetricSeries,
    pub report: ExperimentReport,
}

impl ExperimentOutcome {
    pub fn blew_up(&self) -> bool {
        self.report.blow_up_time.is_some()
    }
}

/// Least-squares decay rate of `d_x` over the samples with
/// `d_x >= FIT_FLOOR d_x^0`. Samples below the floor (exact consensus or a
/// zero crossing of a two-agent run) carry no rate information.
pub fn empirical_rate(metrics: &MetricSeries) -> Option<DecayFit> {
    let d0 = *metrics.d_x.first()?;
    if !(d0 > 0.0) {
        return None;
    }
    let floor = FIT_FLOOR * d0;
    let (times, vals): (Vec<f64>, Vec<f64>) = metrics
        .times
        .iter()
        .zip(&metrics.d_x)
        .filter(|(_, v)| **v >= floor)
        .map(|(t, v)| (*t, *v))
        .unzip();
    if times.len() < 2 {
        return None;
    }
    fit_decay_rate(&times, &vals, (times[0], times[times.len() - 1])).ok()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let resolved = spec.resolve()?;
    let config = &resolved.config;
    let datum = resolved.datum.resolve(config, resolved.seed)?;
    let (trajectory, blow_up_time) = match integrate(config, &datum, resolved.horizon(), &resolved.integrator()) {
        Ok(tr) => (tr, None),
        Err(Error::NonFinite(b)) => {
            let b = *b;
            (b.partial, Some(b.time))
        }
        Err(e) => return Err(e),
    };
    let metrics = MetricSeries::compute(&trajectory, 1.0);
    let preconditions = check_preconditions(config, &datum)?;
    let theoretical_rate = [&preconditions.prop2, &preconditions.react2]
        .into_iter()
        .find_map(|t| t.rate);
    let fit = empirical_rate(&metrics);
    let d_x0 = metrics.d_x.first().copied().unwrap_or(0.0);
    let consensus_time = if d_x0 > 0.0 {
        metrics.consensus_time(resolved.consensus_rel_tol() * d_x0)
    } else {
        Some(0.0)
    };
    let report = ExperimentReport {
        preconditions,
        theoretical_rate,
        c_emp: fit.map(|f| f.rate),
        fit,
        d_x0,
        d_x_final: metrics.d_x.last().copied().unwrap_or(0.0),
        consensus_time,
        blow_up_time,
        end_time: trajectory.end_time(),
        spec: resolved,
    };
    Ok(ExperimentOutcome { trajectory, metrics, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "N")]
    NAgents,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "horizon")]
    Horizon,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau" => Ok(SweepParam::Tau),
            "N" | "n" => Ok(SweepParam::NAgents),
            "gamma" => Ok(SweepParam::Gamma),
            "horizon" => Ok(SweepParam::Horizon),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep parameter '{other}' (expected tau, N, gamma or horizon)"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Tau => "tau",
            SweepParam::NAgents => "N",
            SweepParam::Gamma => "gamma",
            SweepParam::Horizon => "horizon",
        })
    }
}

/// `spec` with `param` set to `value`. A tau change keeps the number of steps
/// per delay.
pub fn apply_sweep_value(spec: &ExperimentSpec, param: SweepParam, value: f64) -> Result<ExperimentSpec> {
    let mut s = spec.clone();
    match param {
        SweepParam::Tau => {
            if let Some(ispec) = spec.integrator {
                let m = ispec.steps_per_delay(spec.config.tau)?;
                s.integrator = Some(IntegratorSpec { method: ispec.method, dt: value / m as f64 });
            }
            s.config.tau = value;
        }
        SweepParam::NAgents => {
            if !(value.fract() == 0.0 && (2.0..=1e6).contains(&value)) {
                return Err(Error::InvalidConfig(format!("N must be an integer >= 2, got {value}")));
            }
            s.config.n_agents = value as usize;
        }
        SweepParam::Gamma => s.config.influence = InfluenceFunction::AlgebraicDecay { gamma: value },
        SweepParam::Horizon => s.horizon = Some(value),
    }
    s.config.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub consensus_time: Option<f64>,
    #[serde(rename = "C_emp")]
    pub c_emp: Option<f64>,
    #[serde(rename = "C_theory")]
    pub c_theory: Option<f64>,
    /// Toy regime, two-agent runs only.
    pub regime: Option<ToyRegime>,
    /// Theorems whose preconditions hold.
    pub preconditions: Vec<String>,
    pub status: String,
}

pub const SWEEP_CSV_HEADER: [&str; 7] = ["value", "consensus_time", "C_emp", "C_theory", "regime", "preconditions", "status"];

fn sweep_one(spec: &ExperimentSpec, param: SweepParam, value: f64) -> SweepRow {
    let mut row = SweepRow {
        value,
        consensus_time: None,
        c_emp: None,
        c_theory: None,
        regime: None,
        preconditions: Vec::new(),
        status: String::new(),
    };
    let run = apply_sweep_value(spec, param, value).and_then(|s| {
        if s.config.n_agents == 2 {
            row.regime = Some(classify_regime(s.config.delay_kind, s.config.tau));
        }
        run_experiment(&s)
    });
    match run {
        Ok(out) => {
            let r = out.report;
            row.consensus_time = r.consensus_time;
            row.c_emp = r.c_emp;
            row.c_theory = r.theoretical_rate.map(|c| c.c);
            let p = &r.preconditions;
            for (name, check) in [("prop1", &p.prop1), ("prop2", &p.prop2), ("react1", &p.react1), ("react2", &p.react2)] {
                if check.applies {
                    row.preconditions.push(name.to_string());
                }
            }
            row.status = match r.blow_up_time {
                Some(t) => format!("blow_up at t={t}"),
                None => "ok".into(),
            };
        }
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

/// Independent runs in parallel; rows follow the order of `values`.
pub fn run_sweep(spec: &ExperimentSpec, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
    values.par_iter().map(|&v| sweep_one(spec, param, v)).collect()
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    use crate::dynamics::fmt_real;
    let opt = |v: Option<f64>| v.map(fmt_real).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for r in rows {
        let regime = r
            .regime
            .map(|g| serde_json::to_value(g).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default())
            .unwrap_or_default();
        w.write_record([
            fmt_real(r.value),
            opt(r.consensus_time),
            opt(r.c_emp),
            opt(r.c_theory),
            regime,
            r.preconditions.join("+"),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
