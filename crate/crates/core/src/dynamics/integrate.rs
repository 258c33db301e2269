use serde::{Deserialize, Serialize};

use super::oracle::integrate_oracle;
use super::rhs::rhs_from_states;
use super::trajectory::{uniform_grid, Interpolation, Trajectory};
use crate::error::{BlowUp, Error, Result};
use crate::model::{InitialDatum, State, SystemConfig};

/// States with any coordinate beyond this magnitude count as blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

/// Grid steps per delay interval used when no `dt` is given.
pub const DEFAULT_STEPS_PER_DELAY: usize = 64;

/// Default horizon in units of `tau`.
pub const DEFAULT_HORIZON_DELAYS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    RK4Steps,
    EulerOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub method: Method,
    pub dt: f64,
}

impl IntegratorSpec {
    pub fn rk4(dt: f64) -> Self {
        IntegratorSpec { method: Method::RK4Steps, dt }
    }

    pub fn euler(dt: f64) -> Self {
        IntegratorSpec { method: Method::EulerOracle, dt }
    }

    /// RK4 with `dt = tau / 64`.
    pub fn default_for(tau: f64) -> Self {
        IntegratorSpec::rk4(tau / DEFAULT_STEPS_PER_DELAY as f64)
    }

    /// Number of steps per delay interval; `tau / dt` must be an integer.
    pub fn steps_per_delay(&self, tau: f64) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidIntegrator(format!("dt must be positive, got {}", self.dt)));
        }
        let ratio = tau / self.dt;
        let m = ratio.round();
        if !(1.0..=1e9).contains(&m) {
            return Err(Error::InvalidIntegrator(format!(
                "tau/dt = {ratio} must be a positive integer of sane size"
            )));
        }
        // one ulp of slack on either side after rounding
        if (m * self.dt - tau).abs() > 2.0 * f64::EPSILON * tau.max(m * self.dt) {
            return Err(Error::InvalidIntegrator(format!(
                "dt = {} does not divide tau = {tau} (tau/dt = {ratio})",
                self.dt
            )));
        }
        Ok(m as usize)
    }
}

/// Integrates with the method selected in `spec`.
pub fn integrate(config: &SystemConfig, datum: &InitialDatum, horizon: f64, spec: &IntegratorSpec) -> Result<Trajectory> {
    match spec.method {
        Method::RK4Steps => integrate_rk4(config, datum, horizon, spec),
        Method::EulerOracle => integrate_oracle(config, datum, horizon, spec),
    }
}

pub(crate) fn check_inputs(config: &SystemConfig, datum: &InitialDatum, horizon: f64, spec: &IntegratorSpec) -> Result<(usize, usize)> {
    config.validate()?;
    datum.validate(config)?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidIntegrator(format!("horizon must be positive, got {horizon}")));
    }
    let m = spec.steps_per_delay(config.tau)?;
    let dt = config.tau / m as f64;
    let steps = (horizon / dt - 1e-9).ceil().max(1.0);
    if steps > 1e8 {
        return Err(Error::InvalidIntegrator(format!("{steps} steps requested")));
    }
    Ok((m, steps as usize))
}

/// History nodes on `[-tau, 0]` taken from the datum.
pub(crate) fn seed_history(datum: &InitialDatum, grid: &[f64], m: usize, width: usize) -> (Vec<f64>, Vec<f64>) {
    let mut states = Vec::with_capacity(grid.len() * width);
    let mut derivs = Vec::with_capacity(grid.len() * width);
    for &t in &grid[..=m] {
        states.extend_from_slice(datum.eval(t).as_slice());
        derivs.extend_from_slice(datum.slope(t).as_slice());
    }
    (states, derivs)
}

pub(crate) fn exceeds_threshold(s: &State) -> Option<usize> {
    (0..s.n_agents()).find(|&i| s.agent(i).iter().any(|x| !x.is_finite() || x.abs() > BLOW_UP_THRESHOLD))
}

/// Classical RK4 by the method of steps.
///
/// With `dt | tau` the delayed arguments of stages 1 and 4 are stored nodes and
/// the half-step stages need one Hermite evaluation on an already completed
/// segment, so no stage ever extrapolates.
pub fn integrate_rk4(config: &SystemConfig, datum: &InitialDatum, horizon: f64, spec: &IntegratorSpec) -> Result<Trajectory> {
    let (m, steps) = check_inputs(config, datum, horizon, spec)?;
    let (n, d) = (config.n_agents, config.dim);
    let width = n * d;
    let (dt, grid) = uniform_grid(config.tau, m, steps);
    let (mut states, mut derivs) = seed_history(datum, &grid, m, width);
    states.reserve(steps * width);
    derivs.reserve(steps * width);

    let mut tr = Trajectory {
        config: config.clone(),
        datum: datum.clone(),
        interpolation: Interpolation::Hermite,
        steps_per_delay: m,
        dt,
        grid,
        states,
        derivs,
    };

    let half = 0.5 * dt;
    let mut x = datum.eval(0.0);
    for k in m..m + steps {
        // t_k >= 0; the delayed arguments live on segment [k - m, k - m + 1]
        let lag0 = k - m;
        let d0 = tr.node_state(lag0);
        let d1 = tr.node_state(lag0 + 1);

        let k1 = rhs_from_states(config, &x, &d0);
        // replaces the datum slope at the origin, or last step's placeholder
        tr.derivs[k * width..(k + 1) * width].copy_from_slice(k1.as_slice());

        let t_half = tr.grid[lag0] + half;
        let dh = if lag0 < m {
            tr.datum.eval(t_half)
        } else {
            tr.interpolate_segment(lag0, t_half)
        };

        let k2 = rhs_from_states(config, &axpy(&x, half, &k1), &dh);
        let k3 = rhs_from_states(config, &axpy(&x, half, &k2), &dh);
        let k4 = rhs_from_states(config, &axpy(&x, dt, &k3), &d1);

        let (s1, s2, s3, s4) = (k1.as_slice(), k2.as_slice(), k3.as_slice(), k4.as_slice());
        for (c, v) in x.as_mut_slice().iter_mut().enumerate() {
            *v += dt / 6.0 * (s1[c] + 2.0 * s2[c] + 2.0 * s3[c] + s4[c]);
        }

        if let Some(agent) = exceeds_threshold(&x) {
            let time = tr.grid[k + 1];
            let partial = tr.truncated(k + 1);
            return Err(Error::NonFinite(Box::new(BlowUp { time, agent, partial })));
        }
        tr.states.extend_from_slice(x.as_slice());
        tr.derivs.extend_from_slice(s1);
    }

    let last = tr.grid.len() - 1;
    let fin = rhs_from_states(config, &tr.node_state(last), &tr.node_state(last - m));
    tr.derivs[last * width..(last + 1) * width].copy_from_slice(fin.as_slice());
    Ok(tr)
}

fn axpy(x: &State, a: f64, v: &State) -> State {
    let mut out = x.clone();
    for (o, dv) in out.as_mut_slice().iter_mut().zip(v.as_slice()) {
        *o += a * dv;
    }
    out
}
