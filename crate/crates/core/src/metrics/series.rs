//! Diagnostic time series over the forward grid `[0, T]`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::energy::{dissipation_from_states, triangle_integral};
use super::fit::first_sustained_below;
use super::geometry::{diameter, fluctuation, mean, radius};
use crate::dynamics::{fmt_real, Trajectory};
use crate::error::{Error, Result};
use crate::model::{distance, DelayKind};

pub const METRICS_CSV_HEADER: [&str; 7] = ["t", "d_x", "r_x", "mean_drift", "X", "D", "L"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    pub d_x: Vec<f64>,
    pub r_x: Vec<f64>,
    pub mean_drift: Vec<f64>,
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    /// Present for `t >= tau` when the weights are symmetric.
    #[serde(rename = "L")]
    pub l: Vec<Option<f64>>,
}

impl MetricSeries {
    /// Evaluates every diagnostic at the stored nodes with `t >= 0`.
    ///
    /// At `t = 0` the diameter and radius take their maxima over the datum
    /// window, so `d_x(0) = d_x^0`.
    pub fn compute(trajectory: &Trajectory, lambda: f64) -> MetricSeries {
        let config = trajectory.config();
        let tau = config.tau;
        let m = trajectory.origin_index();
        let grid = trajectory.grid();
        let len = grid.len() - m;
        let with_l = config.has_symmetric_weights();

        let origin = trajectory.node_state(m);
        let x_ref = mean(&origin);
        let mut out = MetricSeries {
            times: grid[m..].to_vec(),
            d_x: Vec::with_capacity(len),
            r_x: Vec::with_capacity(len),
            mean_drift: Vec::with_capacity(len),
            x: Vec::with_capacity(len),
            d: Vec::with_capacity(len),
            l: Vec::with_capacity(len),
        };
        for k in m..grid.len() {
            let now = trajectory.node_state(k);
            let lagged = trajectory.node_state(k - m);
            if k == m {
                out.d_x.push(trajectory.datum().max_diameter(tau));
                out.r_x.push(trajectory.datum().max_radius(tau));
            } else {
                out.d_x.push(diameter(&now));
                out.r_x.push(radius(&now));
            }
            out.mean_drift.push(distance(&mean(&now), &x_ref));
            out.x.push(fluctuation(&now, &x_ref));
            let current = match config.delay_kind {
                DelayKind::Transmission => &now,
                DelayKind::Reaction => &lagged,
            };
            out.d.push(dissipation_from_states(config, current, &lagged));
        }
        for j in 0..len {
            let value = if with_l && j >= m {
                let lo = j - m;
                let tri = triangle_integral(&out.times[lo..=j], &out.d[lo..=j], out.times[lo]);
                Some(out.x[j] + lambda * tri)
            } else {
                None
            };
            out.l.push(value);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// First grid time with `d_x < tol` sustained to the end of the series.
    pub fn consensus_time(&self, tol: f64) -> Option<f64> {
        first_sustained_below(&self.times, &self.d_x, tol)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(METRICS_CSV_HEADER)?;
        for k in 0..self.len() {
            let l = self.l[k].map(fmt_real).unwrap_or_default();
            w.write_record([
                fmt_real(self.times[k]),
                fmt_real(self.d_x[k]),
                fmt_real(self.r_x[k]),
                fmt_real(self.mean_drift[k]),
                fmt_real(self.x[k]),
                fmt_real(self.d[k]),
                l,
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<MetricSeries> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(input);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if header != METRICS_CSV_HEADER {
            return Err(Error::Parse(format!("unexpected header {header:?}")));
        }
        let mut s = MetricSeries {
            times: vec![],
            d_x: vec![],
            r_x: vec![],
            mean_drift: vec![],
            x: vec![],
            d: vec![],
            l: vec![],
        };
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != METRICS_CSV_HEADER.len() {
                return Err(Error::Parse(format!("line {line}: expected 7 fields, got {}", rec.len())));
            }
            let mut vals = [0.0; 6];
            for (c, v) in vals.iter_mut().enumerate() {
                *v = parse_field(&rec[c], METRICS_CSV_HEADER[c], line)?;
            }
            let t = vals[0];
            if let Some(&prev) = s.times.last() {
                if !(t > prev) {
                    return Err(Error::Parse(format!("line {line}: time {t} does not increase")));
                }
            }
            if vals[1..].iter().any(|v| *v < 0.0) {
                return Err(Error::Parse(format!("line {line}: negative diagnostic")));
            }
            let l = if rec[6].is_empty() {
                None
            } else {
                Some(parse_field(&rec[6], "L", line)?)
            };
            s.times.push(t);
            s.d_x.push(vals[1]);
            s.r_x.push(vals[2]);
            s.mean_drift.push(vals[3]);
            s.x.push(vals[4]);
            s.d.push(vals[5]);
            s.l.push(l);
        }
        Ok(s)
    }
}

fn parse_field(field: &str, what: &str, line: u64) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: {what} '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: {what} is not finite")));
    }
    Ok(v)
}

/// `first grid time with d_x < tol`, held through the horizon.
pub fn consensus_time(series: &MetricSeries, tol: f64) -> Option<f64> {
    series.consensus_time(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorSpec};
    use crate::metrics::lyapunov;
    use crate::model::{InfluenceFunction, InitialDatum, SystemConfig, WeightScheme};

    fn reaction_run(tau: f64, m: usize, horizon: f64) -> Trajectory {
        let cfg = SystemConfig::new(4, 2, tau, DelayKind::Reaction, WeightScheme::ClassicalScaled, InfluenceFunction::default()).unwrap();
        let datum = InitialDatum::constant(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.5, 2.0], vec![1.5, -1.0]]);
        integrate(&cfg, &datum, horizon, &IntegratorSpec::rk4(tau / m as f64)).unwrap()
    }

    #[test]
    fn shape_and_invariants() {
        let tr = reaction_run(0.4, 32, 16.0);
        let s = MetricSeries::compute(&tr, 1.0);
        assert_eq!(s.len(), tr.len() - tr.origin_index());
        assert_eq!(s.times[0], 0.0);
        assert_eq!(s.d_x[0], tr.datum().max_diameter(0.4));
        for k in 0..s.len() {
            for v in [s.d_x[k], s.r_x[k], s.mean_drift[k], s.x[k], s.d[k]] {
                assert!(v >= 0.0);
            }
            assert!(s.d_x[k] <= 2.0 * s.r_x[k] + 1e-12);
            assert_eq!(s.l[k].is_some(), s.times[k] >= 0.4 - 1e-12);
        }
        assert!(s.consensus_time(1e-3).is_some());
    }

    #[test]
    fn series_lyapunov_matches_pointwise() {
        let tr = reaction_run(0.4, 16, 4.0);
        let s = MetricSeries::compute(&tr, 1.0);
        for k in [16usize, 40, 64] {
            let direct = lyapunov(tr.config(), &tr, s.times[k], 1.0).unwrap();
            let cached = s.l[k].unwrap();
            assert!((direct - cached).abs() < 1e-12 * (1.0 + direct), "{direct} vs {cached}");
        }
    }

    #[test]
    fn lyapunov_refinement() {
        let t = 2.0;
        let coarse = reaction_run(0.4, 16, t);
        let fine = reaction_run(0.4, 32, t);
        let a = lyapunov(coarse.config(), &coarse, t, 1.0).unwrap();
        let b = lyapunov(fine.config(), &fine, t, 1.0).unwrap();
        assert!((a - b).abs() <= 0.01 * b, "{a} vs {b}");
    }

    #[test]
    fn transmission_has_no_lyapunov_column() {
        let cfg = SystemConfig::new(3, 1, 0.5, DelayKind::Transmission, WeightScheme::Normalized, InfluenceFunction::default()).unwrap();
        let datum = InitialDatum::constant(vec![vec![0.0], vec![1.0], vec![2.0]]);
        let tr = integrate(&cfg, &datum, 3.0, &IntegratorSpec::default_for(0.5)).unwrap();
        let s = MetricSeries::compute(&tr, 1.0);
        assert!(s.l.iter().all(Option::is_none));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn csv_round_trip() {
        let tr = reaction_run(0.4, 16, 3.0);
        let s = MetricSeries::compute(&tr, 1.0);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"t,d_x,r_x,mean_drift,X,D,L\n"));
        let back = MetricSeries::read_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_spaced_header_and_errors() {
        let ok = "t, d_x, r_x, mean_drift, X, D, L\n0, 1, 1, 0, 0.5, 0.1,\n0.5, 0.5, 1, 0, 0.2, 0.05, 0.3\n";
        let s = MetricSeries::read_csv(ok.as_bytes()).unwrap();
        assert_eq!(s.l, vec![None, Some(0.3)]);
        for bad in [
            "",
            "t,d_x\n",
            "t,d_x,r_x,mean_drift,X,D,L\n0,1,1,0,0.5,0.1\n",
            "t,d_x,r_x,mean_drift,X,D,L\n0,1,1,0,0.5,inf,\n",
            "t,d_x,r_x,mean_drift,X,D,L\n0,-1,1,0,0.5,0.1,\n",
            "t,d_x,r_x,mean_drift,X,D,L\n1,1,1,0,0.5,0.1,\n1,1,1,0,0.5,0.1,\n",
        ] {
            assert!(MetricSeries::read_csv(bad.as_bytes()).is_err(), "accepted {bad:?}");
        }
    }
}
