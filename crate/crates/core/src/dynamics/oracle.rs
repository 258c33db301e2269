//! Explicit Euler reference integrator.
//!
//! Deliberately shares nothing with the RK4 path beyond the influence
//! function and the datum: weights and velocities are evaluated by its own
//! loops, and delayed lookups read stored nodes directly.

use super::integrate::{check_inputs, exceeds_threshold, IntegratorSpec, Method};
use super::trajectory::{uniform_grid, Interpolation, Trajectory};
use crate::error::{BlowUp, Error, Result};
use crate::model::{DelayKind, InitialDatum, State, SystemConfig, WeightScheme};

pub fn integrate_oracle(config: &SystemConfig, datum: &InitialDatum, horizon: f64, spec: &IntegratorSpec) -> Result<Trajectory> {
    if spec.method != Method::EulerOracle {
        return Err(Error::InvalidIntegrator("integrate_oracle requires the EulerOracle method".into()));
    }
    let (m, steps) = check_inputs(config, datum, horizon, spec)?;
    let n = config.n_agents;
    let d = config.dim;
    let w = n * d;
    let (dt, grid) = uniform_grid(config.tau, m, steps);

    let mut states: Vec<f64> = Vec::with_capacity(grid.len() * w);
    for &t in &grid[..=m] {
        states.extend_from_slice(datum.eval(t).as_slice());
    }
    let mut derivs = vec![0.0; (m + 1) * w];
    if let InitialDatum::Sampled { .. } = datum {
        for k in 0..m {
            for c in 0..w {
                derivs[k * w + c] = (states[(k + 1) * w + c] - states[k * w + c]) / dt;
            }
        }
    }

    let mut velocity = vec![0.0; w];
    let mut psi_row = vec![0.0; n];
    for k in m..m + steps {
        let (done, _) = states.split_at(k * w + w);
        let now = &done[k * w..];
        let lagged = &done[(k - m) * w..(k - m + 1) * w];
        for i in 0..n {
            let own = match config.delay_kind {
                DelayKind::Transmission => &now[i * d..(i + 1) * d],
                DelayKind::Reaction => &lagged[i * d..(i + 1) * d],
            };
            let mut total = 0.0;
            for j in 0..n {
                psi_row[j] = if j == i {
                    0.0
                } else {
                    let mut sq = 0.0;
                    for c in 0..d {
                        let diff = lagged[j * d + c] - own[c];
                        sq += diff * diff;
                    }
                    config.influence.eval(sq.sqrt())
                };
                total += psi_row[j];
            }
            let scale = match config.weight_scheme {
                WeightScheme::ClassicalScaled => 1.0 / (n as f64 - 1.0),
                WeightScheme::Normalized => 1.0 / total,
            };
            for c in 0..d {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += psi_row[j] * (lagged[j * d + c] - own[c]);
                }
                velocity[i * d + c] = scale * acc;
            }
        }
        derivs.truncate(k * w);
        derivs.extend_from_slice(&velocity);
        let next: Vec<f64> = now.iter().zip(&velocity).map(|(x, v)| x + dt * v).collect();
        let next_state = State::from_flat(n, d, next);
        if let Some(agent) = exceeds_threshold(&next_state) {
            let partial = Trajectory {
                config: config.clone(),
                datum: datum.clone(),
                interpolation: Interpolation::Linear,
                steps_per_delay: m,
                dt,
                grid: grid[..=k].to_vec(),
                states,
                derivs,
            };
            return Err(Error::NonFinite(Box::new(BlowUp { time: grid[k + 1], agent, partial })));
        }
        states.extend_from_slice(next_state.as_slice());
        derivs.extend_from_slice(&velocity);
    }

    Ok(Trajectory {
        config: config.clone(),
        datum: datum.clone(),
        interpolation: Interpolation::Linear,
        steps_per_delay: m,
        dt,
        grid,
        states,
        derivs,
    })
}
