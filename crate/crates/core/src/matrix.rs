//! Dense count and transition matrices, damping, and the power iteration.
//!
//! Convention throughout: entry (i, j) is the mass flowing from user j
//! (column, the voter) to user i (row, the recipient). Columns of a
//! [`StochasticMatrix`] are probability distributions.

use thiserror::Error;

use crate::config::SignalType;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("matrix dimension is zero")]
    EmptyMatrix,
    #[error("damping factor {0} is outside [0,1]")]
    BadDamping(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Raw nonnegative vote counts for one signal type. Zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    n: usize,
    data: Vec<u32>,
    signal: SignalType,
}

impl CountMatrix {
    pub fn zeros(n: usize, signal: SignalType) -> CountMatrix {
        CountMatrix {
            n,
            data: vec![0; n * n],
            signal,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signal(&self) -> SignalType {
        self.signal
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.data[row * self.n + col]
    }

    pub fn add(&mut self, row: usize, col: usize, count: u32) {
        debug_assert_ne!(row, col, "diagonal must stay zero");
        self.data[row * self.n + col] += count;
    }

    /// Entrywise sum with another count matrix of the same size. The result
    /// keeps `self`'s signal tag.
    pub fn plus(&self, other: &CountMatrix) -> Result<CountMatrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CountMatrix {
            n: self.n,
            data,
            signal: self.signal,
        })
    }

    pub fn total(&self) -> u64 {
        self.data.iter().map(|&c| c as u64).sum()
    }

    pub fn row_sum(&self, row: usize) -> u64 {
        self.data[row * self.n..(row + 1) * self.n]
            .iter()
            .map(|&c| c as u64)
            .sum()
    }

    pub fn col_sum(&self, col: usize) -> u64 {
        (0..self.n).map(|i| self.get(i, col) as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Column-normalize into a transition matrix. All-zero columns become
    /// the uniform column 1/n so every column stays a distribution.
    pub fn column_normalize(&self) -> Result<StochasticMatrix, MatrixError> {
        if self.n == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        let n = self.n;
        let mut data = vec![0.0f64; n * n];
        for j in 0..n {
            let s = self.col_sum(j);
            if s == 0 {
                let u = 1.0 / n as f64;
                for i in 0..n {
                    data[i * n + j] = u;
                }
            } else {
                let s = s as f64;
                for i in 0..n {
                    data[i * n + j] = self.get(i, j) as f64 / s;
                }
            }
        }
        Ok(StochasticMatrix { n, data })
    }
}

/// Column-stochastic transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    /// Build from raw entries, checking that each column sums to 1.
    pub fn from_columns(n: usize, data: Vec<f64>) -> Result<StochasticMatrix, MatrixError> {
        if n == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        assert_eq!(data.len(), n * n);
        let m = StochasticMatrix { n, data };
        for j in 0..n {
            let s: f64 = (0..n).map(|i| m.get(i, j)).sum();
            assert!(
                (s - 1.0).abs() < 1e-12,
                "column {j} sums to {s}, not 1"
            );
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    /// Convex combination `(1-w)*self + w*other`; stays column-stochastic.
    pub fn mix(&self, other: &StochasticMatrix, w: f64) -> Result<StochasticMatrix, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::DimensionMismatch(self.n, other.n));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect();
        Ok(StochasticMatrix { n: self.n, data })
    }

    /// Teleportation transform: each entry becomes `d*m + (1-d)/n`.
    pub fn damp(&self, d: f64) -> Result<DampedMatrix, MatrixError> {
        if !(0.0..=1.0).contains(&d) || !d.is_finite() {
            return Err(MatrixError::BadDamping(d));
        }
        let floor = (1.0 - d) / self.n as f64;
        let data = self.data.iter().map(|m| d * m + floor).collect();
        Ok(DampedMatrix {
            n: self.n,
            data,
            d,
        })
    }
}

/// Damped transition matrix; columns still sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedMatrix {
    n: usize,
    data: Vec<f64>,
    d: f64,
}

/// Result of a power iteration run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    pub vector: Vec<f64>,
    pub iterations: u32,
    pub converged: bool,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: u32 = 1000;

impl DampedMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn damping(&self) -> f64 {
        self.d
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    /// Dense matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *o = row.iter().zip(v).map(|(m, x)| m * x).sum();
        }
        out
    }

    /// Power iteration from the uniform start vector until the L1 change
    /// drops below `tol` or `max_iter` is reached. Non-convergence is
    /// reported via the `converged` flag, not an error.
    pub fn power_iterate(&self, tol: f64, max_iter: u32) -> PowerIteration {
        let n = self.n;
        let mut r = vec![1.0 / n as f64; n];
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            let next = self.apply(&r);
            iterations += 1;
            let delta: f64 = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
            r = next;
            if delta < tol {
                converged = true;
                break;
            }
        }
        PowerIteration {
            vector: r,
            iterations,
            converged,
        }
    }
}
