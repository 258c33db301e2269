use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::diameter;
use crate::model::{distance, State};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// One convex combination `sum_{j != owner} weights[j] x_j`; `weights[owner]`
/// must be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexWeights<'a> {
    pub owner: usize,
    pub weights: &'a [f64],
}

impl ConvexWeights<'_> {
    fn validate(&self, n: usize) -> Result<()> {
        let w = self.weights;
        if w.len() != n {
            return Err(Error::InvalidWeights(format!("expected {n} weights, got {}", w.len())));
        }
        if self.owner >= n {
            return Err(Error::InvalidWeights(format!("owner {} out of range", self.owner)));
        }
        if w[self.owner] != 0.0 {
            return Err(Error::InvalidWeights(format!("self weight of agent {} must be 0", self.owner)));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(())
    }

    fn min_entry(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.owner)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    }

    fn combine(&self, x: &State) -> Vec<f64> {
        let mut out = vec![0.0; x.dim()];
        for (j, &w) in self.weights.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(x.agent(j)) {
                *o += w * v;
            }
        }
        out
    }
}

/// Compares `|sum eta^i_j x_j - sum eta^k_j x_j|` with `(1 - (N-2) mu) d_x`.
pub fn convexity_bound_check(vectors: &State, eta_i: &ConvexWeights, eta_k: &ConvexWeights, mu: f64) -> Result<ConvexityCheck> {
    let n = vectors.n_agents();
    if n < 3 {
        return Err(Error::InvalidWeights(format!("need N >= 3 vectors, got {n}")));
    }
    if eta_i.owner == eta_k.owner {
        return Err(Error::InvalidWeights("the two combinations must belong to different agents".into()));
    }
    eta_i.validate(n)?;
    eta_k.validate(n)?;
    let cap = eta_i.min_entry().min(eta_k.min_entry());
    if !(mu >= 0.0 && mu <= cap) {
        return Err(Error::InvalidWeights(format!("mu = {mu} must lie in [0, {cap}]")));
    }
    let lhs = distance(&eta_i.combine(vectors), &eta_k.combine(vectors));
    let rhs = (1.0 - (n as f64 - 2.0) * mu) * diameter(vectors);
    Ok(ConvexityCheck { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts() -> State {
        State::from_flat(4, 2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 2.0, -1.0, 1.0])
    }

    #[test]
    fn identical_weights() {
        let w = [0.0, 0.0, 0.5, 0.5];
        let a = ConvexWeights { owner: 0, weights: &w };
        let b = ConvexWeights { owner: 1, weights: &w };
        let r = convexity_bound_check(&pts(), &a, &b, 0.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn zero_mu_is_triangle_case() {
        let a = [0.0, 1.0, 0.0, 0.0];
        let b = [0.0, 0.0, 0.0, 1.0];
        let s = pts();
        let r = convexity_bound_check(&s, &ConvexWeights { owner: 0, weights: &a }, &ConvexWeights { owner: 2, weights: &b }, 0.0).unwrap();
        assert_eq!(r.rhs, diameter(&s));
        assert!(r.holds);
    }

    #[test]
    fn rejects_bad_weights() {
        let s = pts();
        let good = [0.0, 0.5, 0.25, 0.25];
        let g = ConvexWeights { owner: 0, weights: &good };
        let cases: [&[f64]; 4] = [&[0.0, 0.5, 0.5], &[0.1, 0.4, 0.25, 0.25], &[0.0, 0.5, 0.25, 0.2], &[0.0, 1.5, -0.25, -0.25]];
        for bad in cases {
            let b = ConvexWeights { owner: 1, weights: bad };
            assert!(convexity_bound_check(&s, &g, &b, 0.0).is_err(), "{bad:?}");
        }
        assert!(convexity_bound_check(&s, &g, &g, 0.0).is_err());
        let other = [0.25, 0.0, 0.5, 0.25];
        let o = ConvexWeights { owner: 1, weights: &other };
        assert!(convexity_bound_check(&s, &g, &o, 0.3).is_err());
        let two = State::from_flat(2, 1, vec![0.0, 1.0]);
        assert!(convexity_bound_check(&two, &ConvexWeights { owner: 0, weights: &[0.0, 1.0] }, &ConvexWeights { owner: 1, weights: &[1.0, 0.0] }, 0.0).is_err());
    }

    fn dirichlet(rng: &mut ChaCha8Rng, n: usize, owner: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..n).map(|j| if j == owner { 0.0 } else { -rng.gen::<f64>().max(1e-300).ln() }).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        // exact unit sum up to rounding in the last entry
        let last = if owner == n - 1 { n - 2 } else { n - 1 };
        let rest: f64 = w.iter().enumerate().filter(|(j, _)| *j != last).map(|(_, v)| v).sum();
        w[last] = (1.0 - rest).max(0.0);
        w
    }

    #[test]
    fn random_instances_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let n = rng.gen_range(3..=8);
            let d = rng.gen_range(1..=3);
            let x = State::from_flat(n, d, (0..n * d).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let i = rng.gen_range(0..n);
            let k = (i + rng.gen_range(1..n)) % n;
            let wi = dirichlet(&mut rng, n, i);
            let wk = dirichlet(&mut rng, n, k);
            let a = ConvexWeights { owner: i, weights: &wi };
            let b = ConvexWeights { owner: k, weights: &wk };
            let mu = a.min_entry().min(b.min_entry());
            let r = convexity_bound_check(&x, &a, &b, mu).unwrap();
            assert!(r.holds, "lhs {} rhs {}", r.lhs, r.rhs);
        }
    }
}
