//! Pairwise conditional independence: column `j ⟂ column j′ | all others`.

use rayon::prelude::*;
use wpc_core::bootstrap::{KSelection, MarginSpec};
use wpc_core::rng::derive_seed;
use wpc_core::{run_test, Dataset, TestConfig, TestOutcome, TieBreak};

/// Unordered pairs `(j, j′)`, `j < j′`, in lexicographic order; the position
/// of a pair in this list is its pair index.
pub fn pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p)
        .flat_map(|j| (j + 1..p).map(move |k| (j, k)))
        .collect()
}

/// Symmetric results; the diagonal is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CiMatrix {
    pub p_values: Vec<Vec<Option<f64>>>,
    pub adjacency: Vec<Vec<Option<bool>>>,
    /// Per unordered pair, in [`pairs`] order.
    pub outcomes: Vec<TestOutcome>,
}

/// Dataset for the pair `(j, k)`: `Y1 = column j`, `Y2 = column k`, `X` the
/// remaining columns in their original order.
pub fn pair_dataset(columns: &[Vec<f64>], j: usize, k: usize) -> wpc_core::Result<Dataset> {
    let rest: Vec<&Vec<f64>> = columns
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != j && c != k)
        .map(|(_, col)| col)
        .collect();
    let n = columns[j].len();
    let mut x = Vec::with_capacity(n * rest.len());
    for i in 0..n {
        x.extend(rest.iter().map(|col| col[i]));
    }
    Dataset::new(x, rest.len(), columns[j].clone(), columns[k].clone())
}

/// Runs one test per unordered pair. Pair `q` uses seed
/// `derive_seed(test.bootstrap.seed, q)` for its bootstrap, cross-validation
/// and tie-breaking.
pub fn ci_matrix(columns: &[Vec<f64>], test: &TestConfig) -> wpc_core::Result<CiMatrix> {
    let p = columns.len();
    if p < 3 {
        return Err(wpc_core::Error::InvalidDataset(format!(
            "need at least 3 variables, got {p}"
        )));
    }
    let pairs = pairs(p);
    let outcomes: Vec<TestOutcome> = pairs
        .par_iter()
        .enumerate()
        .map(|(q, &(j, k))| {
            let data = pair_dataset(columns, j, k)?;
            let mut cfg = test.clone();
            let seed = derive_seed(test.bootstrap.seed, q as u64);
            cfg.bootstrap.seed = seed;
            if let MarginSpec::Knn(KSelection::Cv(cv)) = &mut cfg.margin {
                cv.seed = seed;
            }
            if let TieBreak::Random(s) = &mut cfg.ties {
                *s = seed;
            }
            run_test(&data, &cfg)
        })
        .collect::<wpc_core::Result<_>>()?;

    let mut p_values = vec![vec![None; p]; p];
    let mut adjacency = vec![vec![None; p]; p];
    for (&(j, k), outcome) in pairs.iter().zip(&outcomes) {
        p_values[j][k] = Some(outcome.p_value);
        p_values[k][j] = Some(outcome.p_value);
        adjacency[j][k] = Some(outcome.reject);
        adjacency[k][j] = Some(outcome.reject);
    }
    Ok(CiMatrix {
        p_values,
        adjacency,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_order_and_count() {
        assert_eq!(pairs(3), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(pairs(6).len(), 15);
    }

    #[test]
    fn pair_dataset_keeps_the_other_columns_in_order() {
        let cols: Vec<Vec<f64>> = (0..4).map(|c| vec![c as f64, 10.0 + c as f64]).collect();
        let data = pair_dataset(&cols, 1, 3).unwrap();
        assert_eq!(data.d(), 2);
        assert_eq!(data.row(0), &[0.0, 2.0]);
        assert_eq!(data.row(1), &[10.0, 12.0]);
        assert_eq!(data.y1(), &[1.0, 11.0]);
        assert_eq!(data.y2(), &[3.0, 13.0]);
    }
}
