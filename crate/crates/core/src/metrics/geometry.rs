use crate::model::{distance, norm, State};

/// `d_x`: largest pairwise Euclidean distance.
pub fn diameter(state: &State) -> f64 {
    let n = state.n_agents();
    let mut best = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            best = best.max(distance(state.agent(i), state.agent(j)));
        }
    }
    best
}

/// `R_x`: largest agent norm.
pub fn radius(state: &State) -> f64 {
    (0..state.n_agents())
        .map(|i| norm(state.agent(i)))
        .fold(0.0, f64::max)
}

/// Arithmetic mean position.
pub fn mean(state: &State) -> Vec<f64> {
    let n = state.n_agents() as f64;
    let mut m = vec![0.0; state.dim()];
    for i in 0..state.n_agents() {
        for (acc, x) in m.iter_mut().zip(state.agent(i)) {
            *acc += x;
        }
    }
    m.iter_mut().for_each(|v| *v /= n);
    m
}

/// `X = (1 / (2(N-1))) sum_i |x_i - mean_ref|^2`.
pub fn fluctuation(state: &State, mean_ref: &[f64]) -> f64 {
    let n = state.n_agents();
    let total: f64 = (0..n)
        .map(|i| {
            let d = distance(state.agent(i), mean_ref);
            d * d
        })
        .sum();
    total / (2.0 * (n as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(points: &[f64]) -> State {
        State::from_flat(points.len(), 1, points.to_vec())
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(diameter(&line(&[2.0, 2.0, 2.0])), 0.0);
        assert_eq!(diameter(&line(&[0.0, 3.0])), 3.0);
        let cluster = line(&[0.0, 0.0, 0.0]);
        assert_eq!(radius(&cluster), 0.0);
        assert_eq!(mean(&cluster), vec![0.0]);
        let pair = line(&[-1.0, 1.0]);
        assert_eq!(radius(&pair), 1.0);
        assert_eq!(mean(&pair), vec![0.0]);
        assert_eq!(fluctuation(&pair, &[0.0]), 1.0);
        assert_eq!(fluctuation(&line(&[4.0, 4.0]), &[4.0]), 0.0);
    }

    #[test]
    fn random_cloud_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, d) = (50, 3);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let state = State::from_rows(&pts).unwrap();

        // independent folds over the raw rows
        let mut dia = 0.0f64;
        for a in &pts {
            for b in &pts {
                let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
                dia = dia.max(s.sqrt());
            }
        }
        assert_eq!(diameter(&state), dia);

        let rad = pts.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
        assert_eq!(radius(&state), rad);

        let mut mu = vec![0.0; d];
        for c in 0..d {
            mu[c] = pts.iter().map(|p| p[c]).sum::<f64>() / n as f64;
        }
        let m = mean(&state);
        for c in 0..d {
            assert!((m[c] - mu[c]).abs() < 1e-14);
        }

        let mut fl = 0.0;
        for p in &pts {
            for c in 0..d {
                fl += (p[c] - mu[c]).powi(2);
            }
        }
        fl /= 2.0 * (n as f64 - 1.0);
        assert!((fluctuation(&state, &mu) - fl).abs() < 1e-12 * fl);
    }

    fn cloud() -> impl Strategy<Value = State> {
        (2usize..10, 1usize..4).prop_flat_map(|(n, d)| {
            prop::collection::vec(-10.0f64..10.0, n * d).prop_map(move |v| State::from_flat(n, d, v))
        })
    }

    proptest! {
        #[test]
        fn diameter_symmetries(s in cloud(), shift in -5.0f64..5.0, scale in 0.1f64..10.0, rot in 0usize..10) {
            let base = diameter(&s);
            let mut rows = s.rows();
            let r = rot % rows.len();
            rows.rotate_left(r);
            let last = rows.len() - 1;
            rows.swap(0, last);
            prop_assert_eq!(diameter(&State::from_rows(&rows).unwrap()), base);

            let shifted = s.translated(&vec![shift; s.dim()]);
            prop_assert!((diameter(&shifted) - base).abs() <= 1e-12 * (1.0 + base + shift.abs()));

            let scaled = State::from_flat(s.n_agents(), s.dim(), s.as_slice().iter().map(|x| x * scale).collect());
            prop_assert!((diameter(&scaled) - scale * base).abs() <= 1e-12 * (1.0 + scale * base));

            prop_assert!(base <= 2.0 * radius(&s) + 1e-12);
        }
    }
}
