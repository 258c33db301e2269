use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InitialDatum, State, SystemConfig};

/// Dense-output rule between stored nodes on `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Cubic Hermite from stored states and right-hand sides.
    Hermite,
    /// Piecewise linear.
    Linear,
}

/// Solution history on `[-tau, T]`.
///
/// The grid is uniform with `dt = tau / steps_per_delay`, so `t - tau` of any
/// node is again a node. On `[-tau, 0]` sampling defers to the initial datum,
/// which keeps the history exact even when the datum's own knots do not
/// coincide with the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub(crate) config: SystemConfig,
    pub(crate) datum: InitialDatum,
    pub(crate) interpolation: Interpolation,
    pub(crate) steps_per_delay: usize,
    pub(crate) dt: f64,
    pub(crate) grid: Vec<f64>,
    pub(crate) states: Vec<f64>,
    pub(crate) derivs: Vec<f64>,
}

/// Serialized layout of a [`Trajectory`]; node arrays are flattened row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryDoc {
    pub config: SystemConfig,
    pub datum: InitialDatum,
    pub interpolation: Interpolation,
    pub steps_per_delay: usize,
    pub grid: Vec<f64>,
    pub states: Vec<f64>,
    pub derivs: Vec<f64>,
}

pub(crate) fn uniform_grid(tau: f64, steps_per_delay: usize, n_forward: usize) -> (f64, Vec<f64>) {
    let m = steps_per_delay;
    let dt = tau / m as f64;
    let mut grid: Vec<f64> = (0..=m + n_forward)
        .map(|k| (k as f64 - m as f64) * dt)
        .collect();
    grid[0] = -tau;
    (dt, grid)
}

impl Trajectory {
    /// Assembles a trajectory from raw parts, validating shapes and the grid.
    pub fn from_parts(
        config: SystemConfig,
        datum: InitialDatum,
        interpolation: Interpolation,
        steps_per_delay: usize,
        grid: Vec<f64>,
        states: Vec<f64>,
        derivs: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        datum.validate(&config)?;
        if steps_per_delay == 0 {
            return Err(Error::Parse("steps_per_delay must be positive".into()));
        }
        let width = config.n_agents * config.dim;
        if grid.len() < steps_per_delay + 1 {
            return Err(Error::Parse(format!(
                "grid has {} nodes, needs at least {} to cover [-tau, 0]",
                grid.len(),
                steps_per_delay + 1
            )));
        }
        let expected = grid.len().checked_mul(width).ok_or_else(|| Error::Parse("grid too large".into()))?;
        if states.len() != expected || derivs.len() != expected {
            return Err(Error::Parse(format!(
                "node arrays must hold {expected} values (grid {} x {width}), got states {} / derivs {}",
                grid.len(),
                states.len(),
                derivs.len()
            )));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse("grid must be finite and strictly increasing".into()));
        }
        let dt = config.tau / steps_per_delay as f64;
        let tol = 1e-9 * dt;
        if (grid[0] + config.tau).abs() > tol || grid[steps_per_delay].abs() > tol {
            return Err(Error::Parse("grid must start at -tau and hit 0 after steps_per_delay nodes".into()));
        }
        if grid.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
            return Err(Error::Parse("grid spacing must equal tau / steps_per_delay".into()));
        }
        Ok(Trajectory {
            config,
            datum,
            interpolation,
            steps_per_delay,
            dt,
            grid,
            states,
            derivs,
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn tau(&self) -> f64 {
        self.config.tau
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_per_delay(&self) -> usize {
        self.steps_per_delay
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the node `t = 0`.
    pub fn origin_index(&self) -> usize {
        self.steps_per_delay
    }

    pub fn end_time(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    fn width(&self) -> usize {
        self.config.n_agents * self.config.dim
    }

    /// Stored state at node `k`.
    pub fn node_state(&self, k: usize) -> State {
        let w = self.width();
        State::from_flat(self.config.n_agents, self.config.dim, self.states[k * w..(k + 1) * w].to_vec())
    }

    /// Stored derivative at node `k`.
    pub fn node_deriv(&self, k: usize) -> State {
        let w = self.width();
        State::from_flat(self.config.n_agents, self.config.dim, self.derivs[k * w..(k + 1) * w].to_vec())
    }

    pub(crate) fn node_slice(&self, k: usize) -> &[f64] {
        let w = self.width();
        &self.states[k * w..(k + 1) * w]
    }

    fn range_tol(&self) -> f64 {
        1e-12 * (1.0 + self.config.tau + self.end_time().abs())
    }

    /// State at time `t` in `[-tau, T]`.
    pub fn sample(&self, t: f64) -> Result<State> {
        let lo = self.grid[0];
        let hi = self.end_time();
        let tol = self.range_tol();
        if !(t >= lo - tol && t <= hi + tol) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        let t = t.clamp(lo, hi);
        if t <= 0.0 {
            return Ok(self.datum.eval(t));
        }
        let k = self.grid.partition_point(|&s| s <= t) - 1;
        if self.grid[k] == t || k + 1 == self.grid.len() {
            return Ok(self.node_state(k));
        }
        Ok(self.interpolate_segment(k, t))
    }

    /// `x(t - tau)`; errors when the lookup precedes the stored history.
    pub fn sample_delayed(&self, t: f64) -> Result<State> {
        let s = t - self.config.tau;
        if s < self.grid[0] - self.range_tol() {
            return Err(Error::HistoryUnderflow { t: s, start: self.grid[0] });
        }
        self.sample(s)
    }

    /// Interpolates inside segment `[grid[k], grid[k+1]]` with `k >= origin`.
    pub(crate) fn interpolate_segment(&self, k: usize, t: f64) -> State {
        let w = self.width();
        let t0 = self.grid[k];
        let h = self.grid[k + 1] - t0;
        let s = (t - t0) / h;
        let y0 = &self.states[k * w..(k + 1) * w];
        let y1 = &self.states[(k + 1) * w..(k + 2) * w];
        let mut out = vec![0.0; w];
        match self.interpolation {
            Interpolation::Linear => {
                for ((o, a), b) in out.iter_mut().zip(y0).zip(y1) {
                    *o = a + s * (b - a);
                }
            }
            Interpolation::Hermite => {
                let f0 = &self.derivs[k * w..(k + 1) * w];
                let f1 = &self.derivs[(k + 1) * w..(k + 2) * w];
                let (h00, h10, h01, h11) = hermite_basis(s);
                for c in 0..w {
                    out[c] = h00 * y0[c] + h10 * h * f0[c] + h01 * y1[c] + h11 * h * f1[c];
                }
            }
        }
        State::from_flat(self.config.n_agents, self.config.dim, out)
    }

    /// Nodes whose time lies in the closed window `[a, b]`.
    pub fn nodes_in(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let tol = self.range_tol();
        let start = self.grid.partition_point(|&s| s < a - tol);
        let end = self.grid.partition_point(|&s| s <= b + tol);
        start..end.max(start)
    }

    /// Trajectory restricted to nodes `0..end` (used for partial results).
    pub(crate) fn truncated(mut self, end: usize) -> Self {
        let w = self.width();
        self.grid.truncate(end);
        self.states.truncate(end * w);
        self.derivs.truncate(end * w);
        self
    }

    pub fn to_doc(&self) -> TrajectoryDoc {
        TrajectoryDoc {
            config: self.config.clone(),
            datum: self.datum.clone(),
            interpolation: self.interpolation,
            steps_per_delay: self.steps_per_delay,
            grid: self.grid.clone(),
            states: self.states.clone(),
            derivs: self.derivs.clone(),
        }
    }

    pub fn from_doc(doc: TrajectoryDoc) -> Result<Self> {
        Trajectory::from_parts(
            doc.config,
            doc.datum,
            doc.interpolation,
            doc.steps_per_delay,
            doc.grid,
            doc.states,
            doc.derivs,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_doc())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Trajectory::from_doc(serde_json::from_str(text)?)
    }
}

#[inline]
fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

/// Free-standing sampler, mirroring [`Trajectory::sample`].
pub fn sample(trajectory: &Trajectory, t: f64) -> Result<State> {
    trajectory.sample(t)
}
