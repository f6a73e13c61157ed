use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Which conditional margin: `Y1 | X` or `Y2 | X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Margin {
    First,
    Second,
}

impl Margin {
    /// 1 or 2.
    pub fn number(self) -> u64 {
        match self {
            Margin::First => 1,
            Margin::Second => 2,
        }
    }
}

/// `n` samples of `(X, Y1, Y2)` with `X ∈ R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    x: Vec<f64>,
    y1: Vec<f64>,
    y2: Vec<f64>,
}

impl Dataset {
    /// `x` is row-major with `d` columns.
    pub fn new(x: Vec<f64>, d: usize, y1: Vec<f64>, y2: Vec<f64>) -> Result<Self> {
        let n = y1.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if d == 0 {
            return Err(Error::InvalidDataset(
                "covariate dimension must be at least 1".into(),
            ));
        }
        if y2.len() != n || x.len() != n * d {
            return Err(Error::InvalidDataset(format!(
                "inconsistent lengths: x has {} values for d = {d}, y1 has {n}, y2 has {}",
                x.len(),
                y2.len()
            )));
        }
        for (i, row) in x.chunks_exact(d).enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: i,
                    column: format!("x{}", j + 1),
                });
            }
            if !y1[i].is_finite() {
                return Err(Error::NonFinite {
                    row: i,
                    column: "y1".into(),
                });
            }
            if !y2[i].is_finite() {
                return Err(Error::NonFinite {
                    row: i,
                    column: "y2".into(),
                });
            }
        }
        Ok(Self { n, d, x, y1, y2 })
    }

    pub fn from_rows(rows: &[Vec<f64>], y1: Vec<f64>, y2: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidDataset("ragged covariate rows".into()));
        }
        Self::new(rows.concat(), d, y1, y2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Row-major covariates.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, f64> {
        self.x.chunks_exact(self.d)
    }

    pub fn y1(&self) -> &[f64] {
        &self.y1
    }

    pub fn y2(&self) -> &[f64] {
        &self.y2
    }

    pub fn y(&self, margin: Margin) -> &[f64] {
        match margin {
            Margin::First => &self.y1,
            Margin::Second => &self.y2,
        }
    }

    /// Copy with every covariate column centered and scaled to unit sample
    /// standard deviation. Constant columns are only centered.
    pub fn standardized(&self) -> Self {
        let n = self.n as f64;
        let mut x = self.x.clone();
        for j in 0..self.d {
            let mean = self.rows().map(|r| r[j]).sum::<f64>() / n;
            let var = self
                .rows()
                .map(|r| (r[j] - mean) * (r[j] - mean))
                .sum::<f64>()
                / n;
            let sd = libm::sqrt(var);
            let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
            for row in x.chunks_exact_mut(self.d) {
                row[j] = (row[j] - mean) * scale;
            }
        }
        Self { x, ..self.clone() }
    }

    /// New dataset made of the rows `indices` (repetitions allowed).
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut x = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            x.extend_from_slice(self.row(i));
        }
        Self {
            n: indices.len(),
            d: self.d,
            x,
            y1: indices.iter().map(|&i| self.y1[i]).collect(),
            y2: indices.iter().map(|&i| self.y2[i]).collect(),
        }
    }
}
