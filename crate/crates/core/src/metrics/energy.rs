use super::geometry::{fluctuation, mean};
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::{distance, weights_from_states, DelayKind, State, SystemConfig};

/// `D = (1 / (2(N-1))) sum_i sum_{j != i} psi_ij |x~_j - x~_i|^2` from snapshots.
pub fn dissipation_from_states(config: &SystemConfig, current: &State, delayed: &State) -> f64 {
    let w = weights_from_states(config, current, delayed);
    let n = config.n_agents;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let r = distance(delayed.agent(j), delayed.agent(i));
                total += w.get(i, j) * r * r;
            }
        }
    }
    total / (2.0 * (n as f64 - 1.0))
}

/// Dissipation at time `t >= 0`.
pub fn dissipation(config: &SystemConfig, trajectory: &Trajectory, t: f64) -> Result<f64> {
    let delayed = trajectory.sample_delayed(t)?;
    let current = match config.delay_kind {
        DelayKind::Transmission => trajectory.sample(t)?,
        DelayKind::Reaction => delayed.clone(),
    };
    Ok(dissipation_from_states(config, &current, &delayed))
}

/// `int_{t-tau}^t int_theta^t D(s) ds dtheta = int_{t-tau}^t (s - t + tau) D(s) ds`
/// by the composite trapezoid rule on the supplied nodes.
pub(crate) fn triangle_integral(times: &[f64], values: &[f64], start: f64) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * ((t[0] - start) * v[0] + (t[1] - start) * v[1]))
        .sum()
}

/// `L(t) = X(t) + lambda int_{t-tau}^t int_theta^t D(s) ds dtheta`, with `X`
/// taken around the mean at `t = 0`. Requires `t >= tau`.
pub fn lyapunov(config: &SystemConfig, trajectory: &Trajectory, t: f64, lambda: f64) -> Result<f64> {
    let tau = config.tau;
    let start = t - tau;
    if start < -1e-12 * (1.0 + tau) {
        return Err(Error::HistoryUnderflow { t: start - tau, start: -tau });
    }
    let start = start.max(0.0);
    let mut nodes = vec![start];
    let inner = trajectory.nodes_in(start, t);
    nodes.extend(
        trajectory.grid()[inner]
            .iter()
            .copied()
            .filter(|&s| s > start && s < t),
    );
    nodes.push(t);
    let values = nodes
        .iter()
        .map(|&s| dissipation(config, trajectory, s))
        .collect::<Result<Vec<_>>>()?;
    let x_ref = mean(&trajectory.sample(0.0)?);
    let x = fluctuation(&trajectory.sample(t)?, &x_ref);
    Ok(x + lambda * triangle_integral(&nodes, &values, start))
}
