//! Diameter shrink factor for transmission-delay dynamics and its iteration
//! over the windows `I_k = [(6k - 1) tau, 6k tau]`.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::{psi_floor, DelayKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkRecord {
    pub k: usize,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    /// `M_k - m_k`.
    #[serde(rename = "D")]
    pub spread: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkEstimate {
    pub psi_lower: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    #[serde(default)]
    pub iterations: Vec<ShrinkRecord>,
}

impl ShrinkEstimate {
    /// Largest violation of `D_{k+1} <= (1 - Gamma_k) D_k` over the records.
    pub fn worst_excess(&self) -> f64 {
        self.iterations
            .windows(2)
            .map(|w| w[1].spread - (1.0 - w[0].gamma) * w[0].spread)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contraction_holds(&self, tol: f64) -> bool {
        self.iterations.len() < 2 || self.worst_excess() <= tol
    }
}

/// `Gamma = (1 - e^{-psi tau/(N-1)})^2 (1 - e^{-sigma}) e^{-6 tau} psi/(N-1)`
/// with `sigma = min{tau, (M - m)/(2M)}`.
pub fn shrink_factor(psi_lower: f64, tau: f64, n_agents: usize, m: f64, big_m: f64) -> Result<ShrinkEstimate> {
    if !(m.is_finite() && big_m.is_finite()) || m <= 0.0 || m > big_m {
        return Err(Error::InvalidInterval(format!("need 0 < m <= M, got m = {m}, M = {big_m}")));
    }
    if !(psi_lower > 0.0 && psi_lower <= 1.0) {
        return Err(Error::InvalidProblem(format!("psi lower bound must lie in (0, 1], got {psi_lower}")));
    }
    if !(tau > 0.0 && tau.is_finite()) || n_agents < 2 {
        return Err(Error::InvalidProblem(format!("need tau > 0 and N >= 2, got tau = {tau}, N = {n_agents}")));
    }
    let q = psi_lower / (n_agents as f64 - 1.0);
    let sigma = tau.min((big_m - m) / (2.0 * big_m));
    let first = -(-q * tau).exp_m1();
    let gamma = first * first * (-(-sigma).exp_m1()) * (-6.0 * tau).exp() * q;
    Ok(ShrinkEstimate { psi_lower, sigma, gamma, m, big_m, iterations: Vec::new() })
}

/// Runs the window iteration on each coordinate of a transmission-delay run.
///
/// The lemma needs `0 < m`; each coordinate is translated so that its datum
/// minimum equals its datum spread (or 1 for a degenerate spread). The
/// dynamics commute with translations, so the recorded spreads are unchanged.
pub fn shrink_iteration(trajectory: &Trajectory) -> Result<Vec<ShrinkEstimate>> {
    let config = trajectory.config();
    if config.delay_kind != DelayKind::Transmission {
        return Err(Error::PreconditionViolated("window iteration requires transmission-type delay".into()));
    }
    let tau = config.tau;
    let n = config.n_agents;
    let bounds = trajectory.datum().coordinate_bounds(tau);
    let diag = bounds.iter().map(|(lo, hi)| (hi - lo) * (hi - lo)).sum::<f64>().sqrt();
    let psi_lower = psi_floor(&config.influence, diag);
    let windows = ((trajectory.end_time() + 1e-9 * tau) / (6.0 * tau)).floor() as usize;

    let mut out = Vec::with_capacity(config.dim);
    for (c, &(m0, big_m0)) in bounds.iter().enumerate() {
        let spread0 = big_m0 - m0;
        let shift = if spread0 > 0.0 { spread0 - m0 } else { 1.0 - m0 };
        let mut est = shrink_factor(psi_lower, tau, n, m0 + shift, big_m0 + shift)?;
        est.iterations.push(ShrinkRecord { k: 0, m: m0, big_m: big_m0, spread: spread0, gamma: est.gamma });
        for k in 1..=windows {
            let range = trajectory.nodes_in((6 * k - 1) as f64 * tau, (6 * k) as f64 * tau);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for node in range {
                let s = trajectory.node_state(node);
                for i in 0..n {
                    lo = lo.min(s.agent(i)[c]);
                    hi = hi.max(s.agent(i)[c]);
                }
            }
            let mk = (lo + shift).max(f64::MIN_POSITIVE);
            let big_mk = (hi + shift).max(mk);
            let gamma = shrink_factor(psi_lower, tau, n, mk, big_mk)?.gamma;
            est.iterations.push(ShrinkRecord { k, m: lo, big_m: hi, spread: hi - lo, gamma });
        }
        out.push(est);
    }
    Ok(out)
}
