//! k-nearest-neighbor conditional CDF: the empirical CDF of the responses
//! whose covariates fall in `B_k(x)`.

use alloc::vec::Vec;

use rand::Rng;

use super::neighbors::NeighborIndex;
use super::ConditionalMargin;
use crate::dataset::{Dataset, Margin};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KnnMarginModel {
    index: NeighborIndex,
    y: Vec<f64>,
    k: usize,
    target: Margin,
}

pub fn knn_fit(data: &Dataset, target: Margin, k: usize) -> Result<KnnMarginModel> {
    let n = data.n();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(KnnMarginModel {
        index: NeighborIndex::new(data.x().to_vec(), data.d()),
        y: data.y(target).to_vec(),
        k,
        target,
    })
}

impl KnnMarginModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn target(&self) -> Margin {
        self.target
    }

    /// Training indices inside `B_k(x)`.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        self.index.ball(x, self.k)
    }

    /// k-NN regression estimate: mean response over `B_k(x)`.
    pub fn mean(&self, x: &[f64]) -> f64 {
        let ball = self.neighbors(x);
        ball.iter().map(|&i| self.y[i]).sum::<f64>() / ball.len() as f64
    }
}

impl ConditionalMargin for KnnMarginModel {
    fn cdf(&self, y: f64, x: &[f64]) -> f64 {
        let ball = self.neighbors(x);
        let below = ball.iter().filter(|&&i| self.y[i] <= y).count();
        below as f64 / ball.len() as f64
    }

    fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        let ball = self.neighbors(x);
        self.y[ball[rng.random_range(0..ball.len())]]
    }
}
