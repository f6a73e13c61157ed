//! L-fold cross-validation of the neighbor count, scored by the squared
//! error of the k-NN regression mean on held-out folds.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::neighbors::NeighborIndex;
use crate::dataset::{Dataset, Margin};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    /// Ascending candidate neighbor counts; `None` uses [`default_grid`].
    pub grid: Option<Vec<usize>>,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            grid: None,
            seed: 0,
        }
    }
}

/// Largest k that fits inside every training fold: `floor(n (L-1) / L)`.
pub fn max_k(n: usize, folds: usize) -> usize {
    n * (folds - 1) / folds
}

/// Ten geometrically spaced values from `⌈n^{1/3}⌉` to `⌈n^{4/5}⌉`, capped at
/// [`max_k`] and deduplicated.
pub fn default_grid(n: usize, folds: usize) -> Vec<usize> {
    const POINTS: usize = 10;
    let cap = max_k(n, folds).max(1);
    // The slack keeps exact powers (1000^{1/3} = 10) from rounding up.
    let lo = libm::ceil(libm::pow(n as f64, 1.0 / 3.0) - 1e-9);
    let hi = libm::ceil(libm::pow(n as f64, 0.8) - 1e-9).max(lo);
    let ratio = hi / lo;
    let mut grid: Vec<usize> = (0..POINTS)
        .map(|i| {
            let v = lo * libm::pow(ratio, i as f64 / (POINTS - 1) as f64);
            (libm::round(v) as usize).clamp(1, cap)
        })
        .collect();
    grid.dedup();
    grid
}

/// Split `0..n` into `folds` near-equal groups after a seeded shuffle.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, 0));
    let (base, extra) = (n / folds, n % folds);
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for l in 0..folds {
        let len = base + usize::from(l < extra);
        out.push(idx[start..start + len].to_vec());
        start += len;
    }
    out
}

/// Select `k` for margin `target`. Folds are drawn with seed `cfg.seed + j`
/// for margin `j`; ties in the CV score go to the smaller k.
pub fn cross_validate_k(data: &Dataset, target: Margin, cfg: &CvConfig) -> Result<usize> {
    let n = data.n();
    if cfg.folds < 2 || cfg.folds > n {
        return Err(Error::InvalidConfig(alloc::format!(
            "need 2 <= folds <= n, got {} folds for n = {n}",
            cfg.folds
        )));
    }
    let grid = match &cfg.grid {
        Some(g) => {
            if g.is_empty() || g.contains(&0) || g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(
                    "candidate grid must be a nonempty ascending list of positive integers".into(),
                ));
            }
            g.clone()
        }
        None => default_grid(n, cfg.folds),
    };
    let limit = max_k(n, cfg.folds);
    if let Some(&k) = grid.iter().find(|&&k| k > limit) {
        return Err(Error::FoldTooSmall { train: limit, k });
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }

    let folds = fold_assignment(n, cfg.folds, cfg.seed.wrapping_add(target.number()));
    let y = data.y(target);
    let k_max = *grid.last().unwrap();
    let mut score = alloc::vec![0.0; grid.len()];
    let mut in_fold = alloc::vec![false; n];
    for fold in &folds {
        for &i in fold {
            in_fold[i] = true;
        }
        let train: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
        for &i in fold {
            in_fold[i] = false;
        }
        let index = NeighborIndex::new(data.select(&train).x().to_vec(), data.d());
        let mut sse = alloc::vec![0.0; grid.len()];
        let mut prefix = Vec::new();
        for &i in fold {
            let ordered = index.ordered(data.row(i), k_max);
            prefix.clear();
            let mut acc = 0.0;
            prefix.push(0.0);
            for &(_, j) in &ordered {
                acc += y[train[j]];
                prefix.push(acc);
            }
            for (g, &k) in grid.iter().enumerate() {
                // All points tied with the k-th nearest belong to the ball.
                let radius = ordered[k - 1].0;
                let end = k + ordered[k..].partition_point(|&(dist, _)| dist <= radius);
                let err = y[i] - prefix[end] / end as f64;
                sse[g] += err * err;
            }
        }
        for (s, e) in score.iter_mut().zip(&sse) {
            *s += e / fold.len() as f64;
        }
    }
    let mut best = 0;
    for g in 1..grid.len() {
        if score[g] < score[best] {
            best = g;
        }
    }
    Ok(grid[best])
}
