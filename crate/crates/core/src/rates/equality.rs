//! Equality case of the Halanay inequality, integrated from the unit history.
//!
//! Dirac measure: `u' = alpha u(t - tau) - beta u`, history `u = 1` on
//! `[-tau, 0]`. Uniform measure: `u' = (alpha/tau) v - beta u` with
//! `v(t) = int_{t-2tau}^{t-tau} u`, so `v' = u(t - tau) - u(t - 2 tau)` and
//! `v(0) = tau` for `u = 1` on `[-2tau, 0]`.

use super::halanay::{HalanayProblem, Measure};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct HalanayTrace {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
}

struct History {
    h: f64,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl History {
    /// `u(t_idx + frac h)` for a segment index that may precede the origin.
    fn at(&self, idx: isize, frac: f64) -> f64 {
        if idx < 0 {
            return 1.0;
        }
        let k = idx as usize;
        if frac == 0.0 {
            return self.u[k];
        }
        if frac == 1.0 {
            return self.u[k + 1];
        }
        let s = frac;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.u[k] + h10 * self.h * self.du[k] + h01 * self.u[k + 1] + h11 * self.h * self.du[k + 1]
    }
}

/// RK4 on a grid with `steps_per_delay` steps per `tau` up to `horizon`.
pub fn simulate_halanay_equality(p: &HalanayProblem, horizon: f64, steps_per_delay: usize) -> Result<HalanayTrace> {
    p.validate()?;
    let m = steps_per_delay.max(1);
    let h = p.tau / m as f64;
    let steps = (horizon / h).ceil() as usize;
    let (alpha, beta, tau) = (p.alpha, p.beta, p.tau);

    let f = |u: f64, v: f64, lag1: f64, lag2: f64| match p.measure {
        Measure::DiracAtZero => (alpha * lag1 - beta * u, 0.0),
        Measure::UniformOnDelay => (alpha / tau * v - beta * u, lag1 - lag2),
    };

    let mut hist = History { h, u: vec![1.0], du: Vec::with_capacity(steps + 1) };
    let mut v = tau;
    let mi = m as isize;
    for k in 0..steps {
        let ki = k as isize;
        let u0 = hist.u[k];
        let (k1u, k1v) = f(u0, v, hist.at(ki - mi, 0.0), hist.at(ki - 2 * mi, 0.0));
        hist.du.push(k1u);
        let (l1, l2) = (hist.at(ki - mi, 0.5), hist.at(ki - 2 * mi, 0.5));
        let (k2u, k2v) = f(u0 + 0.5 * h * k1u, v + 0.5 * h * k1v, l1, l2);
        let (k3u, k3v) = f(u0 + 0.5 * h * k2u, v + 0.5 * h * k2v, l1, l2);
        let (e1, e2) = (hist.at(ki - mi, 1.0), hist.at(ki - 2 * mi, 1.0));
        let (k4u, k4v) = f(u0 + h * k3u, v + h * k3v, e1, e2);
        hist.u.push(u0 + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u));
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    let times = (0..=steps).map(|k| k as f64 * h).collect();
    Ok(HalanayTrace { times, u: hist.u })
}

/// Largest `u(t) e^{Ct}` along the equality-case trace.
pub fn max_normalized_excess(trace: &HalanayTrace, c: f64) -> f64 {
    trace
        .times
        .iter()
        .zip(&trace.u)
        .map(|(t, u)| u * (c * t).exp())
        .fold(f64::NEG_INFINITY, f64::max)
}
