//! Theoretical rates and applicability checks for the four consensus theorems.

use serde::{Deserialize, Serialize};

use super::halanay::{solve_halanay, HalanayProblem, Measure, RateResult};
use crate::error::{Error, Result};
use crate::model::{check_icass, psi_floor, weights_from_states, DelayKind, IcassReport, InitialDatum, SystemConfig, WeightScheme};

/// `1 - C = (1 - psi (N-2)/(N-1)) e^{C tau}`.
pub fn rate_transmission_normalized(n_agents: usize, psi_lower: f64, tau: f64) -> Result<RateResult> {
    if !(psi_lower > 0.0 && psi_lower <= 1.0) {
        return Err(Error::InvalidProblem(format!("psi lower bound must lie in (0, 1], got {psi_lower}")));
    }
    if n_agents < 2 {
        return Err(Error::InvalidProblem(format!("need at least 2 agents, got {n_agents}")));
    }
    let n = n_agents as f64;
    let alpha = 1.0 - psi_lower * (n - 2.0) / (n - 1.0);
    solve_halanay(&HalanayProblem { alpha, beta: 1.0, tau, measure: Measure::DiracAtZero })
}

/// `psi0 - C = 4 e^{C tau} (e^{C tau} - 1) / C`, valid for `4 tau < psi0`.
pub fn rate_reaction_nonsymmetric(psi0_lower: f64, tau: f64) -> Result<RateResult> {
    if !(psi0_lower > 0.0 && psi0_lower <= 1.0) {
        return Err(Error::InvalidProblem(format!("psi0 lower bound must lie in (0, 1], got {psi0_lower}")));
    }
    if !(4.0 * tau < psi0_lower) {
        return Err(Error::PreconditionViolated(format!(
            "4 tau < psi0 fails: 4 tau = {}, psi0 = {psi0_lower}",
            4.0 * tau
        )));
    }
    solve_halanay(&HalanayProblem {
        alpha: 4.0 * tau,
        beta: psi0_lower,
        tau,
        measure: Measure::UniformOnDelay,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub applies: bool,
    /// Failed conditions; empty when `applies`.
    pub reasons: Vec<String>,
    /// Theoretical decay rate where the theorem provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateResult>,
}

impl TheoremCheck {
    fn from_reasons(reasons: Vec<String>) -> Self {
        TheoremCheck { applies: reasons.is_empty(), reasons, rate: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreconditionReport {
    /// Transmission delay, any weights: asymptotic consensus.
    pub prop1: TheoremCheck,
    /// Transmission delay, normalized weights: exponential rate.
    pub prop2: TheoremCheck,
    /// Reaction delay, symmetric weights, `tau <= 1/2`.
    pub react1: TheoremCheck,
    /// Reaction delay, general weights, slope condition and `4 tau < psi0`.
    pub react2: TheoremCheck,
    pub icass: IcassReport,
    /// `psi_floor(2 R_x^0)`, a lower bound of `psi` along transmission runs.
    pub psi_lower: f64,
    /// `(N-1) min_{i != j} psi_ij(0)`.
    pub psi0_lower: f64,
}

/// `(N-1) min_{i != j} psi_ij(0)` with weights evaluated on the datum.
pub fn psi0_lower(config: &SystemConfig, datum: &InitialDatum) -> f64 {
    let current = match config.delay_kind {
        DelayKind::Transmission => datum.eval(0.0),
        DelayKind::Reaction => datum.eval(-config.tau),
    };
    let delayed = datum.eval(-config.tau);
    let w = weights_from_states(config, &current, &delayed);
    (config.n_agents as f64 - 1.0) * w.min_off_diagonal()
}

pub fn check_preconditions(config: &SystemConfig, datum: &InitialDatum) -> Result<PreconditionReport> {
    config.validate()?;
    let icass = check_icass(datum, config)?;
    let tau = config.tau;
    let n = config.n_agents;
    let transmission = config.delay_kind == DelayKind::Transmission;
    let psi_lower = psi_floor(&config.influence, 2.0 * datum.max_radius(tau));
    let psi0 = psi0_lower(config, datum);

    let mut reasons = Vec::new();
    if !transmission {
        reasons.push("requires transmission-type delay".to_string());
    }
    let prop1 = TheoremCheck::from_reasons(reasons);

    let mut reasons = Vec::new();
    if !transmission {
        reasons.push("requires transmission-type delay".to_string());
    }
    if config.weight_scheme != WeightScheme::Normalized {
        reasons.push("requires normalized weights".to_string());
    }
    if n < 3 {
        reasons.push("requires N >= 3 (N = 2 gives alpha = beta)".to_string());
    }
    let mut prop2 = TheoremCheck::from_reasons(reasons);
    if prop2.applies {
        prop2.rate = Some(rate_transmission_normalized(n, psi_lower, tau)?);
    }

    let mut reasons = Vec::new();
    if transmission {
        reasons.push("requires reaction-type delay".to_string());
    }
    if config.weight_scheme != WeightScheme::ClassicalScaled {
        reasons.push("requires symmetric (classical scaled) weights".to_string());
    }
    if tau > 0.5 {
        reasons.push(format!("tau <= 1/2 fails (tau = {tau})"));
    }
    let react1 = TheoremCheck::from_reasons(reasons);

    let mut reasons = Vec::new();
    if transmission {
        reasons.push("requires reaction-type delay".to_string());
    }
    if !icass.satisfied {
        reasons.push(format!(
            "initial slope condition fails: max slope {} > d_x0 {}",
            icass.max_slope, icass.d_x0
        ));
    }
    if !(4.0 * tau < psi0) {
        reasons.push(format!("4 tau < psi0 fails ({} >= {psi0})", 4.0 * tau));
    }
    let mut react2 = TheoremCheck::from_reasons(reasons);
    if react2.applies {
        react2.rate = Some(rate_reaction_nonsymmetric(psi0, tau)?);
    }

    Ok(PreconditionReport { prop1, prop2, react1, react2, icass, psi_lower, psi0_lower: psi0 })
}
