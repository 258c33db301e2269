use serde::{Deserialize, Serialize};

use super::state::{distance, State};
use super::{DelayKind, SystemConfig, WeightScheme};
use crate::dynamics::Trajectory;
use crate::error::Result;

/// Numerical slack on row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSumContract {
    AtMostOne,
    ExactlyOne,
}

/// Snapshot `psi_ij(t)` of the communication weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    entries: Vec<f64>,
    contract: RowSumContract,
}

impl WeightMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn contract(&self) -> RowSumContract {
        self.contract
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    /// Smallest off-diagonal entry.
    pub fn min_off_diagonal(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.min(self.get(i, j));
                }
            }
        }
        m
    }

    /// Whether every row obeys the declared contract and the diagonal is zero.
    pub fn satisfies_contract(&self) -> bool {
        (0..self.n).all(|i| {
            let s = self.row_sum(i);
            let row_ok = match self.contract {
                RowSumContract::AtMostOne => s <= 1.0 + ROW_SUM_TOL,
                RowSumContract::ExactlyOne => (s - 1.0).abs() <= ROW_SUM_TOL,
            };
            row_ok && self.get(i, i) == 0.0 && self.row(i).iter().all(|w| *w >= 0.0)
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Weights from explicit state snapshots.
///
/// `current` is `x(t)` and `delayed` is `x(t - tau)`. Transmission weights use
/// `|x_j(t - tau) - x_i(t)|`; reaction weights use `|x_j(t - tau) - x_i(t - tau)|`
/// and ignore `current`.
pub fn weights_from_states(config: &SystemConfig, current: &State, delayed: &State) -> WeightMatrix {
    let n = config.n_agents;
    let mut entries = vec![0.0; n * n];
    let own = match config.delay_kind {
        DelayKind::Transmission => current,
        DelayKind::Reaction => delayed,
    };
    for i in 0..n {
        let xi = own.agent(i);
        let row = &mut entries[i * n..(i + 1) * n];
        for (j, w) in row.iter_mut().enumerate() {
            if j != i {
                *w = config.influence.eval(distance(delayed.agent(j), xi));
            }
        }
        let denom = match config.weight_scheme {
            WeightScheme::ClassicalScaled => (n - 1) as f64,
            WeightScheme::Normalized => row.iter().sum(),
        };
        row.iter_mut().for_each(|w| *w /= denom);
    }
    WeightMatrix {
        n,
        entries,
        contract: match config.weight_scheme {
            WeightScheme::ClassicalScaled => RowSumContract::AtMostOne,
            WeightScheme::Normalized => RowSumContract::ExactlyOne,
        },
    }
}

/// `psi_ij(t)` read from a trajectory's history.
pub fn eval_weights(config: &SystemConfig, history: &Trajectory, t: f64) -> Result<WeightMatrix> {
    let delayed = history.sample_delayed(t)?;
    let current = match config.delay_kind {
        DelayKind::Transmission => history.sample(t)?,
        DelayKind::Reaction => delayed.clone(),
    };
    Ok(weights_from_states(config, &current, &delayed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InfluenceFunction;
    use proptest::prelude::*;

    fn config(n: usize, d: usize, kind: DelayKind, scheme: WeightScheme, psi: InfluenceFunction) -> SystemConfig {
        SystemConfig::new(n, d, 1.0, kind, scheme, psi).unwrap()
    }

    fn state(rows: &[&[f64]]) -> State {
        State::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_agents_normalized_are_unit() {
        for kind in [DelayKind::Transmission, DelayKind::Reaction] {
            let cfg = config(2, 1, kind, WeightScheme::Normalized, InfluenceFunction::default());
            let w = weights_from_states(&cfg, &state(&[&[0.3], &[-4.0]]), &state(&[&[7.0], &[1.0]]));
            assert_eq!(w.get(0, 1), 1.0);
            assert_eq!(w.get(1, 0), 1.0);
            assert_eq!(w.get(0, 0), 0.0);
        }
    }

    #[test]
    fn classical_constant_psi_three_agents() {
        let cfg = config(
            3,
            2,
            DelayKind::Transmission,
            WeightScheme::ClassicalScaled,
            InfluenceFunction::Constant { c: 1.0 },
        );
        let s = state(&[&[0.0, 1.0], &[5.0, 2.0], &[-1.0, 3.0]]);
        let w = weights_from_states(&cfg, &s, &s.translated(&[0.1, 0.2]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w.get(i, j), if i == j { 0.0 } else { 0.5 });
            }
            assert_eq!(w.row_sum(i), 1.0);
        }
        assert!(w.satisfies_contract());
    }

    #[test]
    fn normalized_reaction_matches_hand_evaluation() {
        // delayed positions 0, 1, 3 in 1D; psi(s) = 1/(1+s^2)
        let cfg = config(3, 1, DelayKind::Reaction, WeightScheme::Normalized, InfluenceFunction::default());
        let delayed = state(&[&[0.0], &[1.0], &[3.0]]);
        let w = weights_from_states(&cfg, &state(&[&[9.0], &[9.0], &[9.0]]), &delayed);
        let p = |s: f64| 1.0 / (1.0 + s * s);
        let expected = [
            [0.0, p(1.0) / (p(1.0) + p(3.0)), p(3.0) / (p(1.0) + p(3.0))],
            [p(1.0) / (p(1.0) + p(2.0)), 0.0, p(2.0) / (p(1.0) + p(2.0))],
            [p(3.0) / (p(3.0) + p(2.0)), p(2.0) / (p(3.0) + p(2.0)), 0.0],
        ];
        // 0.5/0.6, 0.1/0.6, ...
        assert!((expected[0][1] - 5.0 / 6.0).abs() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                assert!((w.get(i, j) - expected[i][j]).abs() < 1e-15);
            }
            assert!((w.row_sum(i) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn transmission_uses_current_own_position() {
        let cfg = config(2, 1, DelayKind::Transmission, WeightScheme::ClassicalScaled, InfluenceFunction::default());
        let current = state(&[&[0.0], &[0.0]]);
        let delayed = state(&[&[5.0], &[2.0]]);
        let w = weights_from_states(&cfg, &current, &delayed);
        assert_eq!(w.get(0, 1), 1.0 / 5.0);
        assert_eq!(w.get(1, 0), 1.0 / 26.0);
    }

    fn states(n: usize, d: usize) -> impl Strategy<Value = (State, State)> {
        (
            prop::collection::vec(-10.0f64..10.0, n * d),
            prop::collection::vec(-10.0f64..10.0, n * d),
        )
            .prop_map(move |(a, b)| (State::from_flat(n, d, a), State::from_flat(n, d, b)))
    }

    fn any_case() -> impl Strategy<Value = (usize, usize, State, State, f64)> {
        (2usize..8, 1usize..4)
            .prop_flat_map(|(n, d)| (Just(n), Just(d), states(n, d), 0.0f64..4.0))
            .prop_map(|(n, d, (a, b), g)| (n, d, a, b, g))
    }

    proptest! {
        #[test]
        fn contract_holds_for_all_schemes((n, d, cur, del, gamma) in any_case()) {
            for kind in [DelayKind::Transmission, DelayKind::Reaction] {
                for scheme in [WeightScheme::ClassicalScaled, WeightScheme::Normalized] {
                    let cfg = config(n, d, kind, scheme, InfluenceFunction::AlgebraicDecay { gamma });
                    let w = weights_from_states(&cfg, &cur, &del);
                    prop_assert!(w.satisfies_contract());
                }
            }
        }

        #[test]
        fn normalized_scale_invariant((n, d, cur, del, _g) in any_case(), c in 0.05f64..1.0) {
            let table = vec![(0.0, 1.0), (2.0, 0.3), (5.0, 0.7), (9.0, 0.2)];
            let scaled: Vec<(f64, f64)> = table.iter().map(|&(s, v)| (s, c * v)).collect();
            for kind in [DelayKind::Transmission, DelayKind::Reaction] {
                let a = weights_from_states(&config(n, d, kind, WeightScheme::Normalized,
                    InfluenceFunction::Table { samples: table.clone() }), &cur, &del);
                let b = weights_from_states(&config(n, d, kind, WeightScheme::Normalized,
                    InfluenceFunction::Table { samples: scaled.clone() }), &cur, &del);
                for i in 0..n {
                    for j in 0..n {
                        prop_assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-12);
                    }
                }
            }
        }

        #[test]
        fn classical_reaction_exactly_symmetric((n, d, cur, del, gamma) in any_case()) {
            let cfg = config(n, d, DelayKind::Reaction, WeightScheme::ClassicalScaled,
                InfluenceFunction::AlgebraicDecay { gamma });
            prop_assert!(weights_from_states(&cfg, &cur, &del).is_symmetric());
        }
    }
}
