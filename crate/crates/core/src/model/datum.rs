use serde::{Deserialize, Serialize};

use super::state::{distance, norm, State};
use super::SystemConfig;
use crate::error::{Error, Result};

/// Tolerance for matching the sampled grid endpoints against `-tau` and `0`.
const ENDPOINT_TOL: f64 = 1e-12;

/// One agent's prescribed path on `[-tau, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledPath {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SampledPath {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let times = &self.times;
        let last = times.len() - 1;
        if last == 0 || t <= times[0] {
            out.copy_from_slice(&self.values[0]);
            return;
        }
        if t >= times[last] {
            out.copy_from_slice(&self.values[last]);
            return;
        }
        let hi = times.partition_point(|&s| s <= t);
        let (t0, t1) = (times[hi - 1], times[hi]);
        let w = (t - t0) / (t1 - t0);
        for ((o, a), b) in out.iter_mut().zip(&self.values[hi - 1]).zip(&self.values[hi]) {
            *o = a + w * (b - a);
        }
    }

    /// Slope of the linear piece active just after `t` (just before, at the
    /// right end of the grid).
    fn slope_into(&self, t: f64, out: &mut [f64]) {
        let times = &self.times;
        let last = times.len() - 1;
        if last == 0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let hi = times.partition_point(|&s| s <= t).clamp(1, last);
        let dt = times[hi] - times[hi - 1];
        for ((o, a), b) in out.iter_mut().zip(&self.values[hi - 1]).zip(&self.values[hi]) {
            *o = (b - a) / dt;
        }
    }

    fn max_slope(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| distance(&v[1], &v[0]) / (t[1] - t[0]))
            .fold(0.0, f64::max)
    }
}

/// Prescribed continuous trajectories on `[-tau, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDatum {
    /// Each agent sits still at `values[i]` on `[-tau, 0]`.
    ConstantPerAgent { values: Vec<Vec<f64>> },
    /// Each agent follows a piecewise-linear path through its samples.
    Sampled { agents: Vec<SampledPath> },
}

/// Outcome of the derivative-bound check on the initial datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcassReport {
    pub satisfied: bool,
    pub max_slope: f64,
    pub d_x0: f64,
}

impl InitialDatum {
    pub fn constant(values: Vec<Vec<f64>>) -> Self {
        InitialDatum::ConstantPerAgent { values }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn n_agents(&self) -> usize {
        match self {
            InitialDatum::ConstantPerAgent { values } => values.len(),
            InitialDatum::Sampled { agents } => agents.len(),
        }
    }

    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        let n = config.n_agents;
        let d = config.dim;
        if self.n_agents() != n {
            return Err(Error::InvalidDatum(format!(
                "datum has {} agents, configuration expects {n}",
                self.n_agents()
            )));
        }
        let check_vec = |v: &Vec<f64>, what: &str| -> Result<()> {
            if v.len() != d {
                return Err(Error::InvalidDatum(format!(
                    "{what} has dimension {}, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidDatum(format!("{what} is not finite")));
            }
            Ok(())
        };
        match self {
            InitialDatum::ConstantPerAgent { values } => {
                for (i, v) in values.iter().enumerate() {
                    check_vec(v, &format!("agent {i}"))?;
                }
            }
            InitialDatum::Sampled { agents } => {
                let tol = ENDPOINT_TOL * config.tau.max(1.0);
                for (i, path) in agents.iter().enumerate() {
                    if path.times.is_empty() {
                        return Err(Error::InvalidDatum(format!("agent {i} has an empty grid")));
                    }
                    if path.times.len() != path.values.len() {
                        return Err(Error::InvalidDatum(format!(
                            "agent {i}: {} times but {} values",
                            path.times.len(),
                            path.values.len()
                        )));
                    }
                    if path.times.iter().any(|t| !t.is_finite()) {
                        return Err(Error::InvalidDatum(format!("agent {i}: non-finite time")));
                    }
                    if path.times.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(Error::InvalidDatum(format!(
                            "agent {i}: grid times must be strictly increasing"
                        )));
                    }
                    let first = path.times[0];
                    let last = path.times[path.times.len() - 1];
                    if (first + config.tau).abs() > tol || last.abs() > tol {
                        return Err(Error::InvalidDatum(format!(
                            "agent {i}: grid must span [-tau, 0] = [{}, 0], got [{first}, {last}]",
                            -config.tau
                        )));
                    }
                    for (k, v) in path.values.iter().enumerate() {
                        check_vec(v, &format!("agent {i} sample {k}"))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Datum state at `t`, clamped to the sampled span.
    pub fn eval(&self, t: f64) -> State {
        match self {
            InitialDatum::ConstantPerAgent { values } => {
                State::from_rows(values).expect("validated datum")
            }
            InitialDatum::Sampled { agents } => {
                let dim = agents[0].values[0].len();
                let mut out = State::zeros(agents.len(), dim);
                for (i, path) in agents.iter().enumerate() {
                    path.eval_into(t, out.agent_mut(i));
                }
                out
            }
        }
    }

    /// Piecewise derivative of the datum at `t` (zero for constant data).
    pub fn slope(&self, t: f64) -> State {
        match self {
            InitialDatum::ConstantPerAgent { values } => {
                State::zeros(values.len(), values[0].len())
            }
            InitialDatum::Sampled { agents } => {
                let dim = agents[0].values[0].len();
                let mut out = State::zeros(agents.len(), dim);
                for (i, path) in agents.iter().enumerate() {
                    path.slope_into(t, out.agent_mut(i));
                }
                out
            }
        }
    }

    /// Union of all sample times; `[-tau, 0]` for constant data.
    ///
    /// Between consecutive breakpoints every agent moves affinely, so convex
    /// functionals of the state (pair distances, norms, coordinates) attain
    /// their maxima over `[-tau, 0]` on this set.
    pub fn breakpoints(&self, tau: f64) -> Vec<f64> {
        match self {
            InitialDatum::ConstantPerAgent { .. } => vec![-tau, 0.0],
            InitialDatum::Sampled { agents } => {
                let mut ts: Vec<f64> = agents.iter().flat_map(|p| p.times.iter().copied()).collect();
                ts.sort_by(f64::total_cmp);
                ts.dedup();
                ts
            }
        }
    }

    /// `d_x^0`: maximal group diameter over `[-tau, 0]`.
    pub fn max_diameter(&self, tau: f64) -> f64 {
        self.breakpoints(tau)
            .into_iter()
            .map(|t| crate::metrics::diameter(&self.eval(t)))
            .fold(0.0, f64::max)
    }

    /// `R_x^0`: maximal agent norm over `[-tau, 0]`.
    pub fn max_radius(&self, tau: f64) -> f64 {
        self.breakpoints(tau)
            .into_iter()
            .map(|t| {
                let s = self.eval(t);
                (0..s.n_agents()).map(|i| norm(s.agent(i))).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Per-coordinate `(min, max)` over all agents and `[-tau, 0]`.
    pub fn coordinate_bounds(&self, tau: f64) -> Vec<(f64, f64)> {
        let mut bounds: Vec<(f64, f64)> = Vec::new();
        for t in self.breakpoints(tau) {
            let s = self.eval(t);
            if bounds.is_empty() {
                bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); s.dim()];
            }
            for i in 0..s.n_agents() {
                for (b, &x) in bounds.iter_mut().zip(s.agent(i)) {
                    b.0 = b.0.min(x);
                    b.1 = b.1.max(x);
                }
            }
        }
        bounds
    }

    pub fn max_slope(&self) -> f64 {
        match self {
            InitialDatum::ConstantPerAgent { .. } => 0.0,
            InitialDatum::Sampled { agents } => {
                agents.iter().map(SampledPath::max_slope).fold(0.0, f64::max)
            }
        }
    }
}

/// Checks `max_i |dx_i/dt| <= d_x^0` on `(-tau, 0)`.
pub fn check_icass(datum: &InitialDatum, config: &SystemConfig) -> Result<IcassReport> {
    datum.validate(config)?;
    let d_x0 = datum.max_diameter(config.tau);
    let max_slope = datum.max_slope();
    Ok(IcassReport {
        satisfied: max_slope <= d_x0,
        max_slope,
        d_x0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DelayKind, InfluenceFunction, WeightScheme};

    fn cfg(n: usize, d: usize, tau: f64) -> SystemConfig {
        SystemConfig::new(
            n,
            d,
            tau,
            DelayKind::Reaction,
            WeightScheme::Normalized,
            InfluenceFunction::default(),
        )
        .unwrap()
    }

    #[test]
    fn constant_datum_satisfies_icass() {
        let datum = InitialDatum::constant(vec![vec![0.0], vec![2.0], vec![-1.0]]);
        let r = check_icass(&datum, &cfg(3, 1, 0.5)).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.max_slope, 0.0);
        assert_eq!(r.d_x0, 3.0);
    }

    #[test]
    fn identical_constant_samples_degenerate() {
        let path = SampledPath {
            times: vec![-1.0, -0.5, 0.0],
            values: vec![vec![4.0]; 3],
        };
        let datum = InitialDatum::Sampled {
            agents: vec![path.clone(), path],
        };
        let r = check_icass(&datum, &cfg(2, 1, 1.0)).unwrap();
        assert_eq!(r.d_x0, 0.0);
        assert_eq!(r.max_slope, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn linear_agent_against_resting_agent() {
        let datum = InitialDatum::Sampled {
            agents: vec![
                SampledPath {
                    times: vec![-1.0, 0.0],
                    values: vec![vec![0.0], vec![0.0]],
                },
                SampledPath {
                    times: vec![-1.0, 0.0],
                    values: vec![vec![1.0], vec![2.0]],
                },
            ],
        };
        let r = check_icass(&datum, &cfg(2, 1, 1.0)).unwrap();
        assert_eq!(r.d_x0, 2.0);
        assert_eq!(r.max_slope, 1.0);
        assert!(r.satisfied);
        assert_eq!(datum.eval(-0.5).agent(1), &[1.5]);
        assert_eq!(datum.slope(-0.25).agent(1), &[1.0]);
    }

    #[test]
    fn steep_datum_violates_icass() {
        let datum = InitialDatum::Sampled {
            agents: vec![
                SampledPath {
                    times: vec![-1.0, -0.9, 0.0],
                    values: vec![vec![0.0], vec![1.0], vec![1.0]],
                },
                SampledPath {
                    times: vec![-1.0, 0.0],
                    values: vec![vec![0.0], vec![0.0]],
                },
            ],
        };
        let r = check_icass(&datum, &cfg(2, 1, 1.0)).unwrap();
        assert!((r.max_slope - 10.0).abs() < 1e-12);
        assert!(!r.satisfied);
    }

    #[test]
    fn empty_grid_is_invalid() {
        let datum = InitialDatum::Sampled {
            agents: vec![
                SampledPath {
                    times: vec![],
                    values: vec![],
                },
                SampledPath {
                    times: vec![-1.0, 0.0],
                    values: vec![vec![0.0], vec![0.0]],
                },
            ],
        };
        assert!(matches!(
            check_icass(&datum, &cfg(2, 1, 1.0)),
            Err(Error::InvalidDatum(_))
        ));
    }

    #[test]
    fn grid_must_span_delay_interval() {
        let short = SampledPath {
            times: vec![-0.5, 0.0],
            values: vec![vec![0.0], vec![0.0]],
        };
        let datum = InitialDatum::Sampled {
            agents: vec![short.clone(), short],
        };
        assert!(datum.validate(&cfg(2, 1, 1.0)).is_err());
    }

    #[test]
    fn diameter_maximum_found_between_agent_grids() {
        // agents cross; their separation peaks at a knot of only one of them
        let datum = InitialDatum::Sampled {
            agents: vec![
                SampledPath {
                    times: vec![-1.0, -0.3, 0.0],
                    values: vec![vec![0.0], vec![3.0], vec![0.0]],
                },
                SampledPath {
                    times: vec![-1.0, 0.0],
                    values: vec![vec![0.0], vec![0.0]],
                },
            ],
        };
        assert_eq!(datum.max_diameter(1.0), 3.0);
        assert_eq!(datum.coordinate_bounds(1.0), vec![(0.0, 3.0)]);
    }
}
