use super::Trajectory;
use crate::error::Result;
use crate::model::{weights_from_states, DelayKind, State, SystemConfig};

/// Velocities from explicit snapshots `x(t)` and `x(t - tau)`.
///
/// Transmission: `dx_i/dt = sum_j psi_ij (x_j(t - tau) - x_i(t))`.
/// Reaction: `dx_i/dt = sum_j psi_ij (x_j(t - tau) - x_i(t - tau))`.
pub fn rhs_from_states(config: &SystemConfig, current: &State, delayed: &State) -> State {
    let w = weights_from_states(config, current, delayed);
    let own = match config.delay_kind {
        DelayKind::Transmission => current,
        DelayKind::Reaction => delayed,
    };
    let mut out = State::zeros(config.n_agents, config.dim);
    for i in 0..config.n_agents {
        let xi = own.agent(i);
        let vi = out.agent_mut(i);
        for (j, &wij) in w.row(i).iter().enumerate() {
            if j == i {
                continue;
            }
            for ((v, xj), x) in vi.iter_mut().zip(delayed.agent(j)).zip(xi) {
                *v += wij * (xj - x);
            }
        }
    }
    out
}

/// Right-hand side evaluated against a trajectory's history at time `t`.
pub fn rhs(config: &SystemConfig, history: &Trajectory, t: f64) -> Result<State> {
    let delayed = history.sample_delayed(t)?;
    let current = match config.delay_kind {
        DelayKind::Transmission => history.sample(t)?,
        DelayKind::Reaction => delayed.clone(),
    };
    Ok(rhs_from_states(config, &current, &delayed))
}
