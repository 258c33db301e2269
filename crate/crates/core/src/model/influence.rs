use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bounded positive influence function `psi: [0, inf) -> (0, 1]`.
///
/// No monotonicity is assumed; the `Table` kind can describe arbitrary
/// continuous profiles through linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InfluenceFunction {
    /// `psi(s) = c`, with `c` in `(0, 1]`.
    Constant { c: f64 },
    /// `psi(s) = (1 + s^2)^(-gamma)`, with `gamma >= 0`.
    AlgebraicDecay { gamma: f64 },
    /// Piecewise-linear through `(s, psi(s))` samples, constant beyond both ends.
    Table { samples: Vec<(f64, f64)> },
}

impl Default for InfluenceFunction {
    fn default() -> Self {
        InfluenceFunction::AlgebraicDecay { gamma: 1.0 }
    }
}

impl InfluenceFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            InfluenceFunction::Constant { c } => {
                if !(c.is_finite() && *c > 0.0 && *c <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "constant influence must lie in (0, 1], got {c}"
                    )));
                }
            }
            InfluenceFunction::AlgebraicDecay { gamma } => {
                if !(gamma.is_finite() && *gamma >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "algebraic decay exponent must be >= 0, got {gamma}"
                    )));
                }
            }
            InfluenceFunction::Table { samples } => {
                if samples.is_empty() {
                    return Err(Error::InvalidConfig("influence table is empty".into()));
                }
                for (k, &(s, v)) in samples.iter().enumerate() {
                    if !(s.is_finite() && s >= 0.0) {
                        return Err(Error::InvalidConfig(format!(
                            "influence table abscissa {k} must be finite and >= 0, got {s}"
                        )));
                    }
                    if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                        return Err(Error::InvalidConfig(format!(
                            "influence table value {k} must lie in (0, 1], got {v}"
                        )));
                    }
                    if k > 0 && s <= samples[k - 1].0 {
                        return Err(Error::InvalidConfig(format!(
                            "influence table abscissae must be strictly increasing (entry {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates `psi(s)` for `s >= 0`.
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            InfluenceFunction::Constant { c } => *c,
            InfluenceFunction::AlgebraicDecay { gamma } => {
                if *gamma == 0.0 {
                    1.0
                } else if *gamma == 1.0 {
                    1.0 / (1.0 + s * s)
                } else {
                    (1.0 + s * s).powf(-gamma)
                }
            }
            InfluenceFunction::Table { samples } => table_eval(samples, s),
        }
    }

    /// `min_{s in [0, d]} psi(s)`.
    ///
    /// Exact for every kind: the algebraic decay is non-increasing, and a
    /// piecewise-linear table attains its minimum at a knot or an endpoint.
    pub fn floor(&self, d: f64) -> f64 {
        let d = d.max(0.0);
        match self {
            InfluenceFunction::Constant { c } => *c,
            InfluenceFunction::AlgebraicDecay { .. } => self.eval(d),
            InfluenceFunction::Table { samples } => samples
                .iter()
                .filter(|(s, _)| *s > 0.0 && *s < d)
                .map(|&(_, v)| v)
                .fold(table_eval(samples, 0.0).min(table_eval(samples, d)), f64::min),
        }
    }
}

fn table_eval(samples: &[(f64, f64)], s: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if s <= first.0 {
        return first.1;
    }
    if s >= last.0 {
        return last.1;
    }
    // first index with abscissa > s; guaranteed in 1..len
    let hi = samples.partition_point(|&(x, _)| x <= s);
    let (s0, v0) = samples[hi - 1];
    let (s1, v1) = samples[hi];
    let w = (s - s0) / (s1 - s0);
    v0 + w * (v1 - v0)
}

/// `Psi(d) := min_{s in [0, d]} psi(s)`, the continuous lower bound on the
/// weights as a function of a diameter bound.
pub fn psi_floor(influence: &InfluenceFunction, d: f64) -> f64 {
    influence.floor(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dip_table() -> InfluenceFunction {
        InfluenceFunction::Table {
            samples: vec![(0.0, 1.0), (0.5, 0.9), (1.0, 0.2), (1.5, 0.8), (3.0, 0.6)],
        }
    }

    #[test]
    fn constant_floor_is_constant() {
        let psi = InfluenceFunction::Constant { c: 0.3 };
        for d in [0.0, 0.5, 10.0, 1e6] {
            assert_eq!(psi_floor(&psi, d), 0.3);
        }
    }

    #[test]
    fn algebraic_floor_at_one() {
        let psi = InfluenceFunction::AlgebraicDecay { gamma: 1.0 };
        assert_eq!(psi_floor(&psi, 1.0), 0.5);
    }

    #[test]
    fn table_dip_matches_dense_scan() {
        let psi = dip_table();
        for d in [0.3, 0.9, 1.0, 1.2, 2.0, 5.0] {
            // oracle: dense scan of the evaluator over [0, d]
            let n = 200_000;
            let scan = (0..=n)
                .map(|k| psi.eval(d * k as f64 / n as f64))
                .fold(f64::INFINITY, f64::min);
            let got = psi_floor(&psi, d);
            assert!(got <= scan + 1e-15, "d={d}: floor {got} above scan {scan}");
            assert!(scan - got < 1e-4, "d={d}: floor {got} far below scan {scan}");
        }
        assert_eq!(psi_floor(&psi, 2.0), 0.2);
    }

    #[test]
    fn table_interpolates_and_extends() {
        let psi = dip_table();
        assert!((psi.eval(0.25) - 0.95).abs() < 1e-15);
        assert_eq!(psi.eval(3.0), 0.6);
        assert_eq!(psi.eval(100.0), 0.6);
        let shifted = InfluenceFunction::Table {
            samples: vec![(1.0, 0.5), (2.0, 0.25)],
        };
        assert_eq!(shifted.eval(0.0), 0.5);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(InfluenceFunction::Constant { c: 0.0 }.validate().is_err());
        assert!(InfluenceFunction::Constant { c: 1.5 }.validate().is_err());
        assert!(InfluenceFunction::AlgebraicDecay { gamma: -1.0 }.validate().is_err());
        assert!(InfluenceFunction::Table { samples: vec![] }.validate().is_err());
        assert!(InfluenceFunction::Table {
            samples: vec![(0.0, 1.0), (0.0, 0.5)]
        }
        .validate()
        .is_err());
        assert!(InfluenceFunction::Table {
            samples: vec![(0.0, 1.0), (1.0, 0.0)]
        }
        .validate()
        .is_err());
        assert!(dip_table().validate().is_ok());
    }

    proptest! {
        #[test]
        fn eval_stays_in_unit_interval(gamma in 0.0f64..5.0, s in 0.0f64..1e3) {
            let v = InfluenceFunction::AlgebraicDecay { gamma }.eval(s);
            prop_assert!(v > 0.0 && v <= 1.0);
            let t = dip_table().eval(s);
            prop_assert!(t > 0.0 && t <= 1.0);
        }

        #[test]
        fn floor_non_increasing(d1 in 0.0f64..5.0, extra in 0.0f64..5.0, gamma in 0.0f64..3.0) {
            for psi in [dip_table(), InfluenceFunction::AlgebraicDecay { gamma }] {
                prop_assert!(psi_floor(&psi, d1 + extra) <= psi_floor(&psi, d1));
                prop_assert_eq!(psi_floor(&psi, 0.0), psi.eval(0.0));
            }
        }
    }
}
