//! Two-agent normalized systems reduced to the scalar difference
//! `w = x_1 - x_2`:
//!
//! * transmission: `w'(t) = -w(t - tau) - w(t)`, characteristic `xi + e^{-xi tau} + 1`;
//! * reaction: `w'(t) = -2 w(t - tau)`, characteristic `xi + 2 e^{-xi tau}`.
//!
//! Time is not rescaled, so the reaction thresholds read `2 tau = e^{-1}` and
//! `2 tau = pi/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, IntegratorSpec};
use crate::error::{Error, Result};
use crate::metrics::{count_sign_changes, envelope_peaks, fit_decay_rate};
use crate::model::{DelayKind, InfluenceFunction, InitialDatum, SystemConfig, WeightScheme};

/// Distance in `2 tau` within which a threshold is reported as a boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// Samples below this fraction of `|w0|` sit at the cancellation floor of
/// `x_1 - x_2` and are left out of rate fits.
const FIT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ToyRegime {
    NonOscillatoryStable,
    OscillatoryStable,
    Unstable,
    /// Transmission delay: stable for every `tau`.
    AlwaysStable,
    /// `2 tau` within [`BOUNDARY_TOL`] of `e^{-1}`.
    OscillationBoundary,
    /// `2 tau` within [`BOUNDARY_TOL`] of `pi/2`.
    StabilityBoundary,
}

impl ToyRegime {
    pub fn is_boundary(self) -> bool {
        matches!(self, ToyRegime::OscillationBoundary | ToyRegime::StabilityBoundary)
    }

    /// `None` on a boundary.
    pub fn is_stable(self) -> Option<bool> {
        match self {
            ToyRegime::NonOscillatoryStable | ToyRegime::OscillatoryStable | ToyRegime::AlwaysStable => Some(true),
            ToyRegime::Unstable => Some(false),
            _ => None,
        }
    }

    /// `None` on a boundary and for transmission delay.
    pub fn oscillates(self) -> Option<bool> {
        match self {
            ToyRegime::NonOscillatoryStable => Some(false),
            ToyRegime::OscillatoryStable | ToyRegime::Unstable => Some(true),
            _ => None,
        }
    }
}

pub fn classify_regime(kind: DelayKind, tau: f64) -> ToyRegime {
    if kind == DelayKind::Transmission {
        return ToyRegime::AlwaysStable;
    }
    let x = 2.0 * tau;
    let e_inv = (-1.0f64).exp();
    if (x - e_inv).abs() <= BOUNDARY_TOL {
        ToyRegime::OscillationBoundary
    } else if (x - FRAC_PI_2).abs() <= BOUNDARY_TOL {
        ToyRegime::StabilityBoundary
    } else if x < e_inv {
        ToyRegime::NonOscillatoryStable
    } else if x < FRAC_PI_2 {
        ToyRegime::OscillatoryStable
    } else {
        ToyRegime::Unstable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoot {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

/// Characteristic function and its derivative.
pub fn characteristic(kind: DelayKind, tau: f64, xi: Complex64) -> (Complex64, Complex64) {
    let e = (-xi * tau).exp();
    match kind {
        DelayKind::Transmission => (xi + e + 1.0, 1.0 - tau * e),
        DelayKind::Reaction => (xi + 2.0 * e, 1.0 - 2.0 * tau * e),
    }
}

fn newton(kind: DelayKind, tau: f64, start: Complex64) -> Option<Complex64> {
    let mut xi = start;
    for _ in 0..100 {
        let (f, df) = characteristic(kind, tau, xi);
        if !(f.is_finite() && df.is_finite()) || df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        xi -= step;
        if !xi.is_finite() || xi.re.abs() > 1e3 {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + xi.norm()) {
            break;
        }
    }
    let r = characteristic(kind, tau, xi).0.norm();
    (r <= ROOT_RESIDUAL_TOL).then_some(xi)
}

/// Rightmost characteristic root from a grid of Newton starts over
/// `Re in [-10, 5]`, `Im in [0, 4 pi / tau]`.
pub fn rightmost_root(kind: DelayKind, tau: f64) -> Result<CharRoot> {
    let (re_lo, re_hi) = (-10.0, 5.0);
    let im_hi = 4.0 * PI / tau;
    let im_step = PI / (2.0 * tau);
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidConfig(format!("tau must be positive and finite, got {tau}")));
    }
    let mut roots: Vec<Complex64> = Vec::new();
    for a in 0..=60 {
        let re = re_lo + 0.25 * a as f64;
        for b in 0..=8 {
            let im = im_step * b as f64;
            let Some(mut xi) = newton(kind, tau, Complex64::new(re, im)) else { continue };
            xi.im = xi.im.abs();
            if xi.im <= 1e-12 * (1.0 + xi.re.abs()) {
                let real = Complex64::new(xi.re, 0.0);
                if characteristic(kind, tau, real).0.norm() <= ROOT_RESIDUAL_TOL {
                    xi = real;
                }
            }
            if !roots.iter().any(|r| (r - xi).norm() <= 1e-6 * (1.0 + xi.norm())) {
                roots.push(xi);
            }
        }
    }
    let best = roots
        .into_iter()
        .max_by(|a, b| a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)))
        .ok_or(Error::NoRootFound { re_lo, re_hi, im_lo: 0.0, im_hi })?;
    let residual = characteristic(kind, tau, best).0.norm();
    Ok(CharRoot { re: best.re, im: best.im, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToySeries {
    pub times: Vec<f64>,
    pub w: Vec<f64>,
    /// Set when the run was cut short by the blow-up threshold.
    pub blow_up_time: Option<f64>,
}

/// Integrates the two-agent system with `x_1 = w0`, `x_2 = 0` on the history
/// and returns `w = x_1 - x_2` on `[0, horizon]`.
pub fn simulate_toy(kind: DelayKind, tau: f64, w0: f64, horizon: f64, dt: f64) -> Result<ToySeries> {
    let config = SystemConfig::new(2, 1, tau, kind, WeightScheme::Normalized, InfluenceFunction::Constant { c: 1.0 })?;
    let datum = InitialDatum::constant(vec![vec![w0], vec![0.0]]);
    let (trajectory, blow_up_time) = match integrate(&config, &datum, horizon, &IntegratorSpec::rk4(dt)) {
        Ok(tr) => (tr, None),
        Err(Error::NonFinite(b)) => {
            let b = *b;
            (b.partial, Some(b.time))
        }
        Err(e) => return Err(e),
    };
    let start = trajectory.origin_index();
    let times = trajectory.grid()[start..].to_vec();
    let w = (start..trajectory.len())
        .map(|k| {
            let s = trajectory.node_state(k);
            s.agent(0)[0] - s.agent(1)[0]
        })
        .collect();
    Ok(ToySeries { times, w, blow_up_time })
}

impl ToySeries {
    pub fn sign_changes(&self) -> usize {
        count_sign_changes(&self.w)
    }

    pub fn sign_changes_in(&self, a: f64, b: f64) -> usize {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(&self.w)
            .filter(|(t, _)| **t >= a && **t <= b)
            .map(|(_, w)| *w)
            .collect();
        count_sign_changes(&vals)
    }

    /// Decay rate of `|w|` on `[a, b]`; through the envelope peaks when the
    /// signal changes sign at least twice there.
    pub fn fitted_rate(&self, a: f64, b: f64) -> Option<f64> {
        let scale = self.w.first().map_or(0.0, |w| w.abs());
        let floor = FIT_FLOOR * scale;
        let (ts, vs) = if self.sign_changes_in(a, b) >= 2 {
            envelope_peaks(&self.times, &self.w)
        } else {
            (self.times.clone(), self.w.iter().map(|w| w.abs()).collect())
        };
        let (ts, vs): (Vec<f64>, Vec<f64>) = ts
            .into_iter()
            .zip(vs)
            .filter(|(t, v)| *t >= a && *t <= b && *v > floor)
            .unzip();
        if ts.len() < 2 {
            return None;
        }
        let end = ts[ts.len() - 1];
        fit_decay_rate(&ts, &vs, (ts[0], end)).ok().map(|f| f.rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootPoint {
    pub re: f64,
    pub im: f64,
}

/// Summary of one toy run: `w0 = 1`, horizon `40 tau`, step `tau / 64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyReport {
    pub tau: f64,
    pub regime: ToyRegime,
    pub rightmost_root: RootPoint,
    pub sign_changes: usize,
    pub fitted_rate: Option<f64>,
}

pub fn toy_report(kind: DelayKind, tau: f64) -> Result<ToyReport> {
    let root = rightmost_root(kind, tau)?;
    let series = simulate_toy(kind, tau, 1.0, 40.0 * tau, tau / 64.0)?;
    Ok(ToyReport {
        tau,
        regime: classify_regime(kind, tau),
        rightmost_root: RootPoint { re: root.re, im: root.im },
        sign_changes: series.sign_changes(),
        fitted_rate: series.fitted_rate(5.0 * tau, 40.0 * tau),
    })
}
