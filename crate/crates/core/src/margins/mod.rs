//! Conditional margin estimators `F_j(y | x)`.
//!
//! Two estimators ship: the k-nearest-neighbor empirical CDF ([`knn`]) and
//! the Gaussian linear model ([`lr`]). Both can evaluate the CDF and draw from
//! the fitted conditional law, which is all the test and its bootstrap need.

pub mod cv;
pub mod knn;
pub mod lr;
mod neighbors;

use rand::Rng;

pub use cv::{cross_validate_k, default_grid, CvConfig};
pub use knn::{knn_fit, KnnMarginModel};
pub use lr::{lr_fit, LrMarginModel, SIGMA_MIN};

/// A fitted conditional distribution of one response given the covariates.
pub trait ConditionalMargin {
    /// `F(y | x)`.
    fn cdf(&self, y: f64, x: &[f64]) -> f64;

    /// One draw from `F(· | x)`.
    fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64;
}

#[derive(Debug, Clone)]
pub enum MarginModel {
    Knn(KnnMarginModel),
    Lr(LrMarginModel),
}

impl MarginModel {
    /// Neighbor count for k-NN margins.
    pub fn k(&self) -> Option<usize> {
        match self {
            MarginModel::Knn(m) => Some(m.k()),
            MarginModel::Lr(_) => None,
        }
    }
}

impl ConditionalMargin for MarginModel {
    fn cdf(&self, y: f64, x: &[f64]) -> f64 {
        match self {
            MarginModel::Knn(m) => m.cdf(y, x),
            MarginModel::Lr(m) => m.cdf(y, x),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        match self {
            MarginModel::Knn(m) => m.sample(x, rng),
            MarginModel::Lr(m) => m.sample(x, rng),
        }
    }
}

impl From<KnnMarginModel> for MarginModel {
    fn from(m: KnnMarginModel) -> Self {
        MarginModel::Knn(m)
    }
}

impl From<LrMarginModel> for MarginModel {
    fn from(m: LrMarginModel) -> Self {
        MarginModel::Lr(m)
    }
}
