use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitudes below this are treated as zero when counting sign changes.
pub const SIGN_ATOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Least-squares slope of `-ln(series)` against time.
    pub rate: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits `series ~ A exp(-rate t)` on the samples with `t` in `window`.
pub fn fit_decay_rate(times: &[f64], series: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if times.len() != series.len() {
        return Err(Error::InvalidInterval(format!(
            "{} times but {} values",
            times.len(),
            series.len()
        )));
    }
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInterval(format!("fit window [{a}, {b}] is empty")));
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(series) {
        if t < a || t > b {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveSeries { t });
        }
        ts.push(t);
        ys.push(-v.ln());
    }
    if ts.len() < 2 {
        return Err(Error::InvalidInterval(format!(
            "fit window [{a}, {b}] holds {} samples",
            ts.len()
        )));
    }
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (t, y) in ts.iter().zip(&ys) {
        stt += (t - tm) * (t - tm);
        sty += (t - tm) * (y - ym);
        syy += (y - ym) * (y - ym);
    }
    if stt == 0.0 {
        return Err(Error::InvalidInterval("fit window samples share one time".into()));
    }
    let rate = sty / stt;
    let sse: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| {
            let r = y - (ym + rate * (t - tm));
            r * r
        })
        .sum();
    let scale = ys.iter().map(|y| y.abs()).fold(0.0, f64::max).max(1.0);
    let r2 = if syy <= 1e-24 * scale * scale * n { 1.0 } else { (1.0 - sse / syy).max(0.0) };
    Ok(DecayFit { rate, r2, points: ts.len() })
}

/// Number of strict sign alternations, skipping entries with `|v| < SIGN_ATOL`.
pub fn count_sign_changes(series: &[f64]) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for &v in series {
        if !(v.abs() >= SIGN_ATOL) {
            continue;
        }
        let positive = v > 0.0;
        if let Some(prev) = last {
            if prev != positive {
                changes += 1;
            }
        }
        last = Some(positive);
    }
    changes
}

/// First time from which `values < tol` holds through the end of the series.
pub fn first_sustained_below(times: &[f64], values: &[f64], tol: f64) -> Option<f64> {
    let mut first = None;
    for (k, &v) in values.iter().enumerate().rev() {
        if v < tol {
            first = Some(k);
        } else {
            break;
        }
    }
    first.map(|k| times[k])
}

/// Local maxima of `|v|`, used as the envelope of an oscillating signal.
pub fn envelope_peaks(times: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pt = Vec::new();
    let mut pv = Vec::new();
    let n = values.len().min(times.len());
    for k in 1..n.saturating_sub(1) {
        let (l, c, r) = (values[k - 1].abs(), values[k].abs(), values[k + 1].abs());
        if c >= l && c > r && c > 0.0 {
            pt.push(times[k]);
            pv.push(c);
        }
    }
    (pt, pv)
}
