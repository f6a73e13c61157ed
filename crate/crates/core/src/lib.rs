//! Weighted partial copula test of conditional independence `Y1 ⟂ Y2 | X`.
//!
//! The pipeline is:
//!
//! 1. estimate the conditional margins `F1(·|x)` and `F2(·|x)` ([`margins`]),
//!    either with k-nearest neighbors (k chosen by cross-validation) or with a
//!    Gaussian linear model;
//! 2. turn the sample into pseudo-observations and their ranks, then evaluate
//!    the Cramér–von Mises type statistic in closed form ([`wpc`]); k-NN
//!    margins produce many tied pseudo-observations, which the test ranks in a
//!    seeded random order by default ([`TieBreak`]);
//! 3. calibrate the rejection threshold with a bootstrap that samples from the
//!    product of the estimated margins ([`bootstrap`]).
//!
//! [`sim`] holds the synthetic models and the Monte Carlo power harness.
//!
//! The crate is `no_std` with `alloc` when built without the default `std`
//! feature. The `parallel` feature (on by default) spreads bootstrap
//! replicates, simulation trials and the pairwise kernel sum over a rayon pool;
//! results do not depend on the number of threads.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bootstrap;
mod dataset;
mod error;
pub mod margins;
mod math;
pub mod rng;
pub mod sim;
pub mod wpc;

pub use bootstrap::{
    bootstrap_sample, quantile, run_test, BootstrapConfig, KSelection, MarginSpec, TestConfig,
    TestOutcome,
};
pub use dataset::{Dataset, Margin};
pub use error::{Error, Result};
pub use margins::{
    cross_validate_k, knn_fit, lr_fit, ConditionalMargin, CvConfig, KnnMarginModel, LrMarginModel,
    MarginModel,
};
pub use math::{normal_cdf, pairwise_sum};
pub use wpc::{
    empirical_wpc, m_kernel, pseudo_observations, pseudo_observations_with, statistic,
    statistic_bruteforce, KernelSpec, PseudoObs, TieBreak,
};
