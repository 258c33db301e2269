use serde::{Deserialize, Serialize};

/// Positions (or velocities) of all agents at one instant, row-major `N x d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl State {
    pub fn zeros(n: usize, dim: usize) -> Self {
        State {
            n,
            dim,
            data: vec![0.0; n * dim],
        }
    }

    /// Panics if `data.len() != n * dim`.
    pub fn from_flat(n: usize, dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * dim, "state buffer has wrong length");
        State { n, dim, data }
    }

    /// Builds a state from one vector per agent; all rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let dim = rows.first()?.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(State {
            n: rows.len(),
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn n_agents(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn agent(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn agent_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// Returns `self + shift` applied to every agent.
    pub fn translated(&self, shift: &[f64]) -> State {
        assert_eq!(shift.len(), self.dim);
        let mut out = self.clone();
        for row in out.data.chunks_mut(self.dim) {
            for (x, s) in row.iter_mut().zip(shift) {
                *x += s;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Euclidean distance between two points of equal dimension.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        let s = State::from_rows(&rows).unwrap();
        assert_eq!(s.n_agents(), 3);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.agent(1), &[3.0, 4.0]);
        assert_eq!(s.rows(), rows);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(State::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_none());
        assert!(State::from_rows(&[]).is_none());
    }

    #[test]
    fn distance_is_symmetric_bitwise() {
        let a = [0.1, -2.3, 7.7];
        let b = [1.9, 0.4, -3.3];
        assert_eq!(distance(&a, &b).to_bits(), distance(&b, &a).to_bits());
    }
}
