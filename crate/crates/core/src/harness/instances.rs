use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::privacy::RandomSource;

/// Secret bit vector `x` and public query vectors `q^1..q^m`, all of length `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerProductInstance {
    pub x: Vec<bool>,
    pub queries: Vec<Vec<bool>>,
}

impl InnerProductInstance {
    pub fn new(x: Vec<bool>, queries: Vec<Vec<bool>>) -> Result<Self> {
        if x.is_empty() {
            return Err(param("inner-product dimension d must be at least 1"));
        }
        if queries.is_empty() {
            return Err(param("at least one query vector is required"));
        }
        if let Some(q) = queries.iter().find(|q| q.len() != x.len()) {
            return Err(param(format!("query of length {} for dimension {}", q.len(), x.len())));
        }
        Ok(Self { x, queries })
    }

    /// Uniformly random secret and `m = max(1, round(psi * d))` uniformly random queries.
    pub fn random(d: usize, psi: f64, rng: &mut RandomSource) -> Result<Self> {
        if !(psi > 0.0 && psi.is_finite()) {
            return Err(param(format!("query ratio psi must be positive, got {psi}")));
        }
        let m = ((psi * d as f64).round() as usize).max(1);
        let x = (0..d).map(|_| rng.bernoulli(0.5)).collect();
        let queries = (0..m).map(|_| (0..d).map(|_| rng.bernoulli(0.5)).collect()).collect();
        Self::new(x, queries)
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    pub fn query_count(&self) -> usize {
        self.queries.len()
    }

    /// `<x, q^j>` for 1-based `j`.
    pub fn answer(&self, j: usize) -> usize {
        self.x.iter().zip(&self.queries[j - 1]).filter(|(a, b)| **a && **b).count()
    }

    pub fn answers(&self) -> Vec<usize> {
        (1..=self.query_count()).map(|j| self.answer(j)).collect()
    }

    /// Copy with secret bit `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.x[i] = !out.x[i];
        out
    }
}

/// Binary matrix `Y` with `n` rows and `d` columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalsInstance {
    rows: Vec<Vec<bool>>,
}

impl MarginalsInstance {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || d == 0 {
            return Err(param("marginals matrix needs at least one row and one column"));
        }
        if rows.iter().any(|r| r.len() != d) {
            return Err(param("marginals rows must all have the same length"));
        }
        Ok(Self { rows })
    }

    pub fn random(n: usize, d: usize, rng: &mut RandomSource) -> Result<Self> {
        Self::new((0..n).map(|_| (0..d).map(|_| rng.bernoulli(0.5)).collect()).collect())
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j]
    }

    /// Number of ones in 0-based column `j`.
    pub fn column_sum(&self, j: usize) -> usize {
        self.rows.iter().filter(|r| r[j]).count()
    }

    pub fn normalized_marginals(&self) -> Vec<f64> {
        (0..self.d()).map(|j| self.column_sum(j) as f64 / self.n() as f64).collect()
    }

    /// Copy with row `i` replaced by its complement.
    pub fn with_row_flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.rows[i].iter_mut().for_each(|b| *b = !*b);
        out
    }
}
