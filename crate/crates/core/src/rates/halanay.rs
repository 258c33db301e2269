//! Rate equation `beta - C = alpha * int_0^tau e^{C(s + tau)} dP(s)` for the two
//! probability measures used in the consensus proofs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the final bisection bracket.
pub const BRACKET_WIDTH: f64 = 1e-13;

/// Below this value of `C tau` the factor `(e^x - 1) / x` is replaced by its
/// Taylor polynomial.
const SERIES_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Point mass at `s = 0`: kernel `e^{C tau}`.
    #[serde(alias = "dirac")]
    DiracAtZero,
    /// `tau^{-1}` on `[0, tau]`: kernel `e^{C tau} (e^{C tau} - 1) / (C tau)`.
    #[serde(alias = "uniform")]
    UniformOnDelay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalanayProblem {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub measure: Measure,
}

/// Solution of the rate equation together with the problem it solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub measure: Measure,
    #[serde(rename = "C")]
    pub c: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// The derivative `(e^x - g) / x` cancels badly for small `x`; it only feeds
/// the Newton polish, so it switches to its series much earlier.
const DERIVATIVE_SERIES_CUTOFF: f64 = 1e-4;

/// `(e^x - 1) / x` and its derivative in `x`.
fn expm1_ratio(x: f64) -> (f64, f64) {
    let g = if x.abs() < SERIES_CUTOFF {
        1.0 + x / 2.0 + x * x / 6.0
    } else {
        x.exp_m1() / x
    };
    let dg = if x.abs() < DERIVATIVE_SERIES_CUTOFF {
        0.5 + x / 3.0 + x * x / 8.0
    } else {
        (x.exp() - g) / x
    };
    (g, dg)
}

impl HalanayProblem {
    pub fn new(alpha: f64, beta: f64, tau: f64, measure: Measure) -> Result<Self> {
        let p = HalanayProblem { alpha, beta, tau, measure };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let HalanayProblem { alpha, beta, tau, .. } = *self;
        if !(alpha.is_finite() && beta.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidProblem("alpha, beta and tau must be finite".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidProblem(format!("alpha > 0 violated (alpha = {alpha})")));
        }
        if !(alpha < beta) {
            return Err(Error::InvalidProblem(format!(
                "alpha < beta violated (alpha = {alpha}, beta = {beta})"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidProblem(format!("tau > 0 violated (tau = {tau})")));
        }
        Ok(())
    }

    /// Kernel `int_0^tau e^{C(s + tau)} dP(s)` and its derivative in `C`.
    pub fn kernel(&self, c: f64) -> (f64, f64) {
        let x = c * self.tau;
        let e = x.exp();
        match self.measure {
            Measure::DiracAtZero => (e, self.tau * e),
            Measure::UniformOnDelay => {
                let (g, dg) = expm1_ratio(x);
                (e * g, self.tau * e * (g + dg))
            }
        }
    }

    /// `beta - C - alpha K(C)`; positive at `0`, negative at `beta - alpha`.
    pub fn residual(&self, c: f64) -> f64 {
        self.beta - c - self.alpha * self.kernel(c).0
    }
}

pub fn solve_halanay(p: &HalanayProblem) -> Result<RateResult> {
    p.validate()?;
    let mut lo = 0.0;
    let mut hi = p.beta - p.alpha;
    let mut iterations = 0;
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut c = 0.5 * (lo + hi);
    let mut r = p.residual(c);

    let slope = -1.0 - p.alpha * p.kernel(c).1;
    let polished = c - r / slope;
    if polished > lo && polished < hi {
        let rp = p.residual(polished);
        if rp.abs() < r.abs() {
            c = polished;
            r = rp;
            iterations += 1;
        }
    }
    Ok(RateResult {
        alpha: p.alpha,
        beta: p.beta,
        tau: p.tau,
        measure: p.measure,
        c,
        residual: r.abs(),
        iterations,
    })
}
