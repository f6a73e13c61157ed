//! Bootstrap calibration under the null.
//!
//! Each replicate draws `X*` from the empirical law of the covariates and then
//! `Y1*`, `Y2*` independently from the fitted conditional margins at `X*`, so
//! the replicate is conditionally independent by construction while keeping
//! the estimated margins. The statistic is recomputed on every replicate and
//! the test rejects when the observed statistic exceeds the empirical
//! `(1 − α)` quantile of the replicates.

use alloc::borrow::Cow;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dataset::{Dataset, Margin};
use crate::error::{Error, Result};
use crate::margins::{cross_validate_k, knn_fit, lr_fit, ConditionalMargin, CvConfig, MarginModel};
use crate::rng;
use crate::wpc::{
    pseudo_observations_with, statistic, statistic_from_gram, KernelGram, KernelSpec, TieBreak,
};

/// Default ceiling on `B · n²` pair evaluations.
pub const DEFAULT_COST_CEILING: f64 = 1e12;

/// Above this many samples the `n × n` kernel matrix is not cached.
const GRAM_LIMIT: usize = 3000;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    /// Number of replicates `B`.
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Re-estimate the margins on every replicate (k stays as selected on the
    /// original sample).
    pub refit_margins: bool,
    /// With refitting and CV-selected k-NN margins, also re-run the
    /// cross-validation on every replicate instead of reusing the original k.
    pub reselect_k: bool,
    pub cost_ceiling: f64,
    /// Ignore `cost_ceiling`.
    pub force: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 200,
            alpha: 0.05,
            seed: 0,
            refit_margins: true,
            reselect_k: false,
            cost_ceiling: DEFAULT_COST_CEILING,
            force: false,
        }
    }
}

impl BootstrapConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig(
                "need at least one bootstrap replicate".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// How the number of neighbors is chosen for k-NN margins.
#[derive(Debug, Clone, PartialEq)]
pub enum KSelection {
    Cv(CvConfig),
    Fixed(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarginSpec {
    Knn(KSelection),
    Lr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    pub margin: MarginSpec,
    pub kernel: KernelSpec,
    pub bootstrap: BootstrapConfig,
    /// z-score the covariates before anything else.
    pub standardize: bool,
    /// Ranking of tied pseudo-observations. With `Random`, the key seed is
    /// mixed with the replicate number (`u64::MAX` for the observed sample).
    pub ties: TieBreak,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            margin: MarginSpec::Knn(KSelection::Cv(CvConfig::default())),
            kernel: KernelSpec::default(),
            bootstrap: BootstrapConfig::default(),
            standardize: false,
            ties: TieBreak::Random(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub boot_stats: Vec<f64>,
    /// `ξ(α)`, the `(1 − α)` empirical quantile of `boot_stats`.
    pub quantile: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    /// `(k1, k2)` for k-NN margins.
    pub k_selected: Option<(usize, usize)>,
}

/// Order statistic of rank `⌈(1 − alpha) B⌉` (1-based) of `values`.
pub fn quantile(values: &[f64], alpha: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let b = sorted.len();
    // The slack absorbs representation error, e.g. (1 − 0.05) · 100.
    let rank = libm::ceil((1.0 - alpha) * b as f64 - 1e-9) as usize;
    Ok(sorted[rank.clamp(1, b) - 1])
}

/// `(1 + #{b : T*_b >= T}) / (B + 1)`.
pub fn p_value(statistic: f64, boot_stats: &[f64]) -> f64 {
    let exceed = boot_stats.iter().filter(|&&t| t >= statistic).count();
    (1 + exceed) as f64 / (boot_stats.len() + 1) as f64
}

/// One null-mimicking resample of the same size as `data`.
pub fn bootstrap_sample<M1, M2, R>(data: &Dataset, m1: &M1, m2: &M2, rng: &mut R) -> Dataset
where
    M1: ConditionalMargin + ?Sized,
    M2: ConditionalMargin + ?Sized,
    R: Rng + ?Sized,
{
    draw(data, m1, m2, rng).0
}

/// Resample plus the source row of every drawn `X*`. Rows come out sorted by
/// source index; the sample is exchangeable so the order carries no
/// information.
fn draw<M1, M2, R>(data: &Dataset, m1: &M1, m2: &M2, rng: &mut R) -> (Dataset, Vec<usize>)
where
    M1: ConditionalMargin + ?Sized,
    M2: ConditionalMargin + ?Sized,
    R: Rng + ?Sized,
{
    let n = data.n();
    let mut source: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    source.sort_unstable();
    let mut y1 = Vec::with_capacity(n);
    let mut y2 = Vec::with_capacity(n);
    for &i in &source {
        let x = data.row(i);
        y1.push(m1.sample(x, rng));
        y2.push(m2.sample(x, rng));
    }
    let x = data.select(&source).x().to_vec();
    let sample = Dataset::new(x, data.d(), y1, y2).expect("resampled rows are finite");
    (sample, source)
}

#[derive(Debug, Clone, Copy)]
enum Fitted {
    Knn(usize, usize),
    Lr,
}

fn fit_margins(data: &Dataset, kind: Fitted) -> Result<(MarginModel, MarginModel)> {
    Ok(match kind {
        Fitted::Knn(k1, k2) => (
            knn_fit(data, Margin::First, k1)?.into(),
            knn_fit(data, Margin::Second, k2)?.into(),
        ),
        Fitted::Lr => (
            lr_fit(data, Margin::First)?.into(),
            lr_fit(data, Margin::Second)?.into(),
        ),
    })
}

/// Full test: fit margins, compute the statistic, calibrate by bootstrap.
pub fn run_test(data: &Dataset, cfg: &TestConfig) -> Result<TestOutcome> {
    let boot = &cfg.bootstrap;
    boot.validate()?;
    let n = data.n();
    if n < 2 {
        return Err(Error::InvalidDataset("the test needs n >= 2".into()));
    }
    let cost = boot.replicates as f64 * (n as f64) * (n as f64);
    if cost > boot.cost_ceiling && !boot.force {
        return Err(Error::CostExceeded {
            cost,
            ceiling: boot.cost_ceiling,
        });
    }
    let data: Cow<'_, Dataset> = if cfg.standardize {
        Cow::Owned(data.standardized())
    } else {
        Cow::Borrowed(data)
    };
    let data = data.as_ref();

    let kind = match &cfg.margin {
        MarginSpec::Lr => Fitted::Lr,
        MarginSpec::Knn(KSelection::Fixed(k1, k2)) => Fitted::Knn(*k1, *k2),
        MarginSpec::Knn(KSelection::Cv(cv)) => Fitted::Knn(
            cross_validate_k(data, Margin::First, cv)?,
            cross_validate_k(data, Margin::Second, cv)?,
        ),
    };
    let (m1, m2) = fit_margins(data, kind)?;
    let ties_for = |key: u64| match cfg.ties {
        TieBreak::Max => TieBreak::Max,
        TieBreak::Random(seed) => TieBreak::Random(rng::derive_seed(seed, key)),
    };
    let pobs = pseudo_observations_with(data, &m1, &m2, ties_for(u64::MAX))?;
    let observed = statistic(data, &pobs, &cfg.kernel)?;

    let gram = (n <= GRAM_LIMIT).then(|| KernelGram::new(data, &cfg.kernel));
    let replicate = |b: usize| -> Result<f64> {
        let mut rng = rng::stream(boot.seed, b as u64);
        let (sample, source) = draw(data, &m1, &m2, &mut rng);
        let pobs = if boot.refit_margins {
            let kind = match (&cfg.margin, kind) {
                (MarginSpec::Knn(KSelection::Cv(cv)), Fitted::Knn(..)) if boot.reselect_k => {
                    let cv = CvConfig {
                        seed: rng::derive_seed(cv.seed, b as u64),
                        ..cv.clone()
                    };
                    Fitted::Knn(
                        cross_validate_k(&sample, Margin::First, &cv)?,
                        cross_validate_k(&sample, Margin::Second, &cv)?,
                    )
                }
                _ => kind,
            };
            let (r1, r2) = fit_margins(&sample, kind)?;
            pseudo_observations_with(&sample, &r1, &r2, ties_for(b as u64))?
        } else {
            pseudo_observations_with(&sample, &m1, &m2, ties_for(b as u64))?
        };
        match &gram {
            Some(gram) => statistic_from_gram(gram, &source, &pobs),
            None => statistic(&sample, &pobs, &cfg.kernel),
        }
    };
    #[cfg(feature = "parallel")]
    let boot_stats: Vec<f64> = (0..boot.replicates)
        .into_par_iter()
        .map(replicate)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let boot_stats: Vec<f64> = (0..boot.replicates).map(replicate).collect::<Result<_>>()?;

    let xi = quantile(&boot_stats, boot.alpha)?;
    Ok(TestOutcome {
        statistic: observed,
        p_value: p_value(observed, &boot_stats),
        reject: observed > xi,
        quantile: xi,
        alpha: boot.alpha,
        k_selected: match kind {
            Fitted::Knn(k1, k2) => Some((k1, k2)),
            Fitted::Lr => None,
        },
        boot_stats,
    })
}
