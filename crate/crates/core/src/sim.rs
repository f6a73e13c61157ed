//! Synthetic conditional-independence models and the Monte Carlo harness
//! that estimates rejection frequencies over parameter sweeps.
//!
//! | model             | H0 holds when |
//! |-------------------|---------------|
//! | `linear`          | `a = 0`       |
//! | `disturbed_linear`| `a = 0`       |
//! | `latent_cause`    | `a = 0`       |
//! | `post_nonlinear`  | `a = 0`       |

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bootstrap::{run_test, KSelection, MarginSpec, TestConfig, TestOutcome};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math::dot;
use crate::rng::{self, derive_seed, StreamRng};
use crate::wpc::TieBreak;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimModel {
    /// `Y_j = Xᵀβ_j + ε_j`, `X ~ N(0, I_d)`, `Cov(ε1, ε2) = a`.
    Linear,
    /// Linear, with `Y2 = c‖X‖ + Xᵀβ2 + ε2`.
    DisturbedLinear,
    /// `X ~ N(0, 1)`, `Y1 | X ~ N(X, 1)`, `Y2 | X, Y1 ~ N(X + a Y1, 1)`.
    LatentCause,
    /// Linear model pushed through `g(z) = z³` on both responses.
    PostNonlinear,
}

impl SimModel {
    pub const ALL: [SimModel; 4] = [
        SimModel::Linear,
        SimModel::DisturbedLinear,
        SimModel::LatentCause,
        SimModel::PostNonlinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimModel::Linear => "linear",
            SimModel::DisturbedLinear => "disturbed_linear",
            SimModel::LatentCause => "latent_cause",
            SimModel::PostNonlinear => "post_nonlinear",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    fn uses_noise_correlation(self) -> bool {
        !matches!(self, SimModel::LatentCause)
    }
}

/// One synthetic design. `beta1` and `beta2` are drawn uniformly on `[0,1]^d`
/// from `seed`, so every spec with the same seed and `d` shares them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub model: SimModel,
    pub n: usize,
    pub d: usize,
    pub a: f64,
    pub c: f64,
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    pub seed: u64,
}

const BETA_STREAM: u64 = u64::MAX;

impl SimSpec {
    pub fn new(model: SimModel, n: usize, d: usize, a: f64, c: f64, seed: u64) -> Result<Self> {
        let (beta1, beta2) = draw_betas(seed, d);
        let spec = Self {
            model,
            n,
            d,
            a,
            c,
            beta1,
            beta2,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidConfig("n and d must be positive".into()));
        }
        if self.model.uses_noise_correlation() && !(self.a.abs() < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "noise covariance a must satisfy |a| < 1, got {}",
                self.a
            )));
        }
        if !self.a.is_finite() || !self.c.is_finite() {
            return Err(Error::InvalidConfig("a and c must be finite".into()));
        }
        if self.model == SimModel::LatentCause && self.d != 1 {
            return Err(Error::InvalidConfig("latent_cause requires d = 1".into()));
        }
        if self.beta1.len() != self.d || self.beta2.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: self.beta1.len(),
            });
        }
        Ok(())
    }

    /// Copy with one parameter replaced. Changing `d` redraws the betas.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut spec = self.clone();
        match param {
            SweepParam::A => spec.a = value,
            SweepParam::C => spec.c = value,
            SweepParam::N | SweepParam::D => {
                if !(value >= 1.0 && libm::trunc(value) == value) {
                    return Err(Error::InvalidConfig(format!(
                        "{} must be a positive integer, got {value}",
                        param.name()
                    )));
                }
                if param == SweepParam::N {
                    spec.n = value as usize;
                } else {
                    spec.d = value as usize;
                    (spec.beta1, spec.beta2) = draw_betas(spec.seed, spec.d);
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Dataset> {
        match self.model {
            SimModel::Linear => gen_linear(self, rng),
            SimModel::DisturbedLinear => gen_disturbed_linear(self, rng),
            SimModel::LatentCause => gen_latent_cause(self, rng),
            SimModel::PostNonlinear => gen_post_nonlinear(self, rng),
        }
    }
}

fn draw_betas(seed: u64, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng::stream(seed, BETA_STREAM);
    let beta1 = (0..d).map(|_| rng.random::<f64>()).collect();
    let beta2 = (0..d).map(|_| rng.random::<f64>()).collect();
    (beta1, beta2)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn expect_model(spec: &SimSpec, model: SimModel) -> Result<()> {
    if spec.model != model {
        return Err(Error::InvalidConfig(format!(
            "spec is for model {}, not {}",
            spec.model.name(),
            model.name()
        )));
    }
    spec.validate()
}

/// Shared draw for the linear family: covariates, `Xᵀβ1 + ε1`, `Xᵀβ2 + ε2`,
/// and `‖X‖`. Noises are `ε2 = a ε1 + √(1 − a²) η`.
fn linear_parts<R: Rng + ?Sized>(
    spec: &SimSpec,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let (n, d) = (spec.n, spec.d);
    let tail = libm::sqrt(1.0 - spec.a * spec.a);
    let mut x = Vec::with_capacity(n * d);
    let (mut z1, mut z2, mut norms) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for _ in 0..n {
        let start = x.len();
        for _ in 0..d {
            x.push(normal(rng));
        }
        let row = &x[start..];
        let e1 = normal(rng);
        let eta = normal(rng);
        let e2 = spec.a * e1 + tail * eta;
        z1.push(dot(row, &spec.beta1) + e1);
        z2.push(dot(row, &spec.beta2) + e2);
        norms.push(libm::sqrt(dot(row, row)));
    }
    (x, z1, z2, norms)
}

pub fn gen_linear<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<Dataset> {
    expect_model(spec, SimModel::Linear)?;
    let (x, y1, y2, _) = linear_parts(spec, rng);
    Dataset::new(x, spec.d, y1, y2)
}

pub fn gen_disturbed_linear<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<Dataset> {
    expect_model(spec, SimModel::DisturbedLinear)?;
    let (x, y1, z2, norms) = linear_parts(spec, rng);
    let y2 = z2.iter().zip(&norms).map(|(z, r)| spec.c * r + z).collect();
    Dataset::new(x, spec.d, y1, y2)
}

pub fn gen_latent_cause<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<Dataset> {
    expect_model(spec, SimModel::LatentCause)?;
    let n = spec.n;
    let (mut x, mut y1, mut y2) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for _ in 0..n {
        let xi = normal(rng);
        let a = xi + normal(rng);
        let b = xi + spec.a * a + normal(rng);
        x.push(xi);
        y1.push(a);
        y2.push(b);
    }
    Dataset::new(x, 1, y1, y2)
}

/// Post-nonlinearity applied to both responses.
pub fn post_nonlinearity(z: f64) -> f64 {
    z * z * z
}

pub fn gen_post_nonlinear<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> Result<Dataset> {
    expect_model(spec, SimModel::PostNonlinear)?;
    let (x, z1, z2, _) = linear_parts(spec, rng);
    let y1 = z1.into_iter().map(post_nonlinearity).collect();
    let y2 = z2.into_iter().map(post_nonlinearity).collect();
    Dataset::new(x, spec.d, y1, y2)
}

/// Parameter swept by [`run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    A,
    C,
    N,
    D,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::A => "a",
            SweepParam::C => "c",
            SweepParam::N => "n",
            SweepParam::D => "d",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [SweepParam::A, SweepParam::C, SweepParam::N, SweepParam::D]
            .into_iter()
            .find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    /// Test applied to every generated dataset; its bootstrap, CV and
    /// tie-break seeds are replaced by a per-trial seed.
    pub test: TestConfig,
    /// Also run `trials` null datasets (`a = 0`) per cell and report the ROC
    /// AUC of `1 − p` between null and cell.
    pub with_auc: bool,
    /// Ceiling on `trials · B · n²` summed over cells.
    pub cost_ceiling: f64,
    pub force: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            test: TestConfig::default(),
            with_auc: false,
            cost_ceiling: 1e14,
            force: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub value: f64,
    pub trials: usize,
    pub rejections: usize,
    pub rejection_freq: f64,
    /// `sqrt(p̂ (1 − p̂) / trials)`.
    pub std_err: f64,
    pub mean_p_value: f64,
    pub auc: Option<f64>,
    pub p_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub model: SimModel,
    pub param: SweepParam,
    pub trials: usize,
    pub cells: Vec<CellReport>,
    /// Filled when built with `std`.
    pub wall_time_secs: Option<f64>,
}

/// Progress notification: one finished trial of cell `cell`.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub cell: usize,
    pub trial: usize,
}

pub fn run_experiment(
    base: &SimSpec,
    param: SweepParam,
    values: &[f64],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    run_experiment_with_progress(base, param, values, cfg, &|_| {})
}

/// Trial `t` of cell `c` is [`run_trial`]`(spec_c, c, t, ..)`; null companions
/// for the AUC use cell key `c + values.len()`. The cost guard covers the
/// whole experiment.
pub fn run_experiment_with_progress(
    base: &SimSpec,
    param: SweepParam,
    values: &[f64],
    cfg: &ExperimentConfig,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let specs: Vec<SimSpec> = values
        .iter()
        .map(|&v| base.with_param(param, v))
        .collect::<Result<_>>()?;
    let replicates = cfg.test.bootstrap.replicates as f64;
    let passes = if cfg.with_auc { 2.0 } else { 1.0 };
    let cost: f64 = specs
        .iter()
        .map(|s| passes * cfg.trials as f64 * replicates * (s.n as f64) * (s.n as f64))
        .sum();
    if cost > cfg.cost_ceiling && !cfg.force {
        return Err(Error::CostExceeded {
            cost,
            ceiling: cfg.cost_ceiling,
        });
    }
    #[cfg(feature = "std")]
    let started = std::time::Instant::now();

    let cells = values.len();
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for c in 0..cells {
        for t in 0..cfg.trials {
            jobs.push((c, t));
        }
    }
    if cfg.with_auc {
        for c in 0..cells {
            for t in 0..cfg.trials {
                jobs.push((c + cells, t));
            }
        }
    }
    let null_specs: Vec<SimSpec> = if cfg.with_auc {
        specs
            .iter()
            .map(|s| s.with_param(SweepParam::A, 0.0))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let run = |&(key, trial): &(usize, usize)| -> Result<(bool, f64)> {
        let spec = if key < cells {
            &specs[key]
        } else {
            &null_specs[key - cells]
        };
        let outcome = run_trial(spec, key, trial, &cfg.test)?;
        progress(Progress {
            cell: key % cells,
            trial,
        });
        Ok((outcome.reject, outcome.p_value))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(bool, f64)> = jobs.par_iter().map(run).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(bool, f64)> = jobs.iter().map(run).collect::<Result<_>>()?;

    let trials = cfg.trials;
    let mut out = Vec::with_capacity(cells);
    for (c, &value) in values.iter().enumerate() {
        let slice = &results[c * trials..(c + 1) * trials];
        let rejections = slice.iter().filter(|r| r.0).count();
        let freq = rejections as f64 / trials as f64;
        let p_values: Vec<f64> = slice.iter().map(|r| r.1).collect();
        let auc = if cfg.with_auc {
            let null = &results[(cells + c) * trials..(cells + c + 1) * trials];
            let h0: Vec<f64> = null.iter().map(|r| 1.0 - r.1).collect();
            let h1: Vec<f64> = p_values.iter().map(|p| 1.0 - p).collect();
            Some(roc_auc(&h0, &h1)?)
        } else {
            None
        };
        out.push(CellReport {
            value,
            trials,
            rejections,
            rejection_freq: freq,
            std_err: libm::sqrt(freq * (1.0 - freq) / trials as f64),
            mean_p_value: crate::math::pairwise_sum(&p_values) / trials as f64,
            auc,
            p_values,
        });
    }
    #[cfg(feature = "std")]
    let wall_time_secs = Some(started.elapsed().as_secs_f64());
    #[cfg(not(feature = "std"))]
    let wall_time_secs = None;
    Ok(ExperimentReport {
        model: base.model,
        param,
        trials,
        cells: out,
        wall_time_secs,
    })
}

/// One generate-then-test cycle: trial `trial` of cell `cell` of an
/// experiment seeded with `spec.seed`.
///
/// The data come from `stream(derive_seed(spec.seed, cell), trial)`; the
/// bootstrap, CV and tie-break seeds of `test` are all replaced by
/// `derive_seed(derive_seed(spec.seed, cell), trial)`. The cost ceiling of
/// `test` is not applied.
pub fn run_trial(
    spec: &SimSpec,
    cell: usize,
    trial: usize,
    test: &TestConfig,
) -> Result<TestOutcome> {
    let cell_seed = derive_seed(spec.seed, cell as u64);
    let mut rng: StreamRng = rng::stream(cell_seed, trial as u64);
    let data = spec.generate(&mut rng)?;
    let mut test = test.clone();
    test.bootstrap.seed = derive_seed(cell_seed, trial as u64);
    test.bootstrap.force = true;
    if let MarginSpec::Knn(KSelection::Cv(cv)) = &mut test.margin {
        cv.seed = test.bootstrap.seed;
    }
    if let TieBreak::Random(seed) = &mut test.ties {
        *seed = test.bootstrap.seed;
    }
    run_test(&data, &test)
}

/// Mann–Whitney estimate of `P(h1 > h0) + ½ P(h1 = h0)`, via midranks of the
/// pooled scores.
pub fn roc_auc(h0_scores: &[f64], h1_scores: &[f64]) -> Result<f64> {
    if h0_scores.is_empty() || h1_scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (m, n) = (h0_scores.len(), h1_scores.len());
    let mut pooled: Vec<(f64, bool)> = h0_scores
        .iter()
        .map(|&s| (s, false))
        .chain(h1_scores.iter().map(|&s| (s, true)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        // Midrank of positions start+1 ..= end.
        let midrank = (start + 1 + end) as f64 / 2.0;
        rank_sum += midrank * pooled[start..end].iter().filter(|p| p.1).count() as f64;
        start = end;
    }
    let u = rank_sum - (n * (n + 1)) as f64 / 2.0;
    Ok(u / (m * n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::margins::{lr_fit, ConditionalMargin};
    use crate::Margin;
    use alloc::vec;

    fn spec(model: SimModel, n: usize, d: usize, a: f64, c: f64) -> SimSpec {
        SimSpec::new(model, n, d, a, c, 42).unwrap()
    }

    /// Residuals of the true regression, `Y_j − Xᵀβ_j`.
    fn residuals(s: &SimSpec, data: &Dataset) -> (Vec<f64>, Vec<f64>) {
        data.rows()
            .zip(data.y1().iter().zip(data.y2()))
            .map(|(r, (y1, y2))| (y1 - dot(r, &s.beta1), y2 - dot(r, &s.beta2)))
            .unzip()
    }

    fn cov(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / n
    }

    #[test]
    fn spec_validation() {
        assert!(SimSpec::new(SimModel::Linear, 10, 1, 1.0, 0.0, 0).is_err());
        assert!(SimSpec::new(SimModel::LatentCause, 10, 2, 0.0, 0.0, 0).is_err());
        assert!(SimSpec::new(SimModel::LatentCause, 10, 1, 3.0, 0.0, 0).is_ok());
        let s = spec(SimModel::Linear, 10, 3, 0.0, 0.0);
        assert!(s
            .beta1
            .iter()
            .chain(&s.beta2)
            .all(|b| (0.0..1.0).contains(b)));
        assert_eq!(
            SimModel::from_name("post_nonlinear"),
            Some(SimModel::PostNonlinear)
        );
        assert_eq!(SimModel::from_name("foo"), None);
        let wrong = spec(SimModel::Linear, 10, 1, 0.0, 0.0);
        assert!(gen_latent_cause(&wrong, &mut rng::stream(0, 0)).is_err());
    }

    #[test]
    fn linear_noise_covariance() {
        let s = spec(SimModel::Linear, 100_000, 2, 0.5, 0.0);
        let data = s.generate(&mut rng::stream(1, 0)).unwrap();
        let (e1, e2) = residuals(&s, &data);
        assert!((cov(&e1, &e2) - 0.5).abs() <= 0.02);

        let s = spec(SimModel::Linear, 2000, 1, 0.0, 0.0);
        let data = s.generate(&mut rng::stream(2, 0)).unwrap();
        let (e1, e2) = residuals(&s, &data);
        assert!(cov(&e1, &e2).abs() <= 4.0 / libm::sqrt(2000.0));
    }

    #[test]
    fn zero_coefficients_give_standard_normal_margins() {
        let mut s = spec(SimModel::Linear, 50_000, 3, 0.3, 0.0);
        s.beta1 = vec![0.0; 3];
        s.beta2 = vec![0.0; 3];
        let data = s.generate(&mut rng::stream(3, 0)).unwrap();
        for y in [data.y1(), data.y2()] {
            let n = y.len() as f64;
            let mean = y.iter().sum::<f64>() / n;
            let var = cov(y, y);
            assert!(mean.abs() < 4.0 / libm::sqrt(n));
            assert!((var - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn disturbed_linear_with_zero_c_is_linear() {
        let lin = spec(SimModel::Linear, 300, 2, 0.2, 0.0);
        let dis = SimSpec {
            model: SimModel::DisturbedLinear,
            ..lin.clone()
        };
        let a = lin.generate(&mut rng::stream(4, 0)).unwrap();
        let b = dis.generate(&mut rng::stream(4, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disturbance_slope_is_recovered() {
        let mut s = spec(SimModel::DisturbedLinear, 20_000, 2, 0.0, 10.0);
        s.beta2 = vec![0.0; 2];
        let data = s.generate(&mut rng::stream(5, 0)).unwrap();
        let norms: Vec<f64> = data.rows().map(|r| libm::sqrt(dot(r, r))).collect();
        let slope = cov(&norms, data.y2()) / cov(&norms, &norms);
        assert!((slope - 10.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn latent_cause_partial_correlation() {
        let s = spec(SimModel::LatentCause, 100_000, 1, 1.0, 0.0);
        let data = s.generate(&mut rng::stream(6, 0)).unwrap();
        let r1: Vec<f64> = data.rows().zip(data.y1()).map(|(x, y)| y - x[0]).collect();
        let r2: Vec<f64> = data
            .rows()
            .zip(data.y2())
            .map(|(x, y)| y - 2.0 * x[0])
            .collect();
        let pc = cov(&r1, &r2) / libm::sqrt(cov(&r1, &r1) * cov(&r2, &r2));
        assert!((pc - core::f64::consts::FRAC_1_SQRT_2).abs() < 0.01, "{pc}");
        // The same from least-squares residuals on X.
        let m1 = lr_fit(&data, Margin::First).unwrap();
        let m2 = lr_fit(&data, Margin::Second).unwrap();
        let f1: Vec<f64> = data
            .rows()
            .zip(data.y1())
            .map(|(x, y)| y - m1.mean(x))
            .collect();
        let f2: Vec<f64> = data
            .rows()
            .zip(data.y2())
            .map(|(x, y)| y - m2.mean(x))
            .collect();
        let pc_fit = cov(&f1, &f2) / libm::sqrt(cov(&f1, &f1) * cov(&f2, &f2));
        assert!((pc_fit - core::f64::consts::FRAC_1_SQRT_2).abs() < 0.01);
        let _ = m1.cdf(0.0, &[0.0]);

        for a in [0.0, 0.5, 2.0] {
            let s = spec(SimModel::LatentCause, 100_000, 1, a, 0.0);
            let data = s.generate(&mut rng::stream(7, 0)).unwrap();
            let mean = data.y2().iter().sum::<f64>() / 1e5;
            let sd = libm::sqrt(cov(data.y2(), data.y2()));
            assert!(mean.abs() < 4.0 * sd / libm::sqrt(1e5));
        }
    }

    #[test]
    fn post_nonlinear_inverts() {
        let s = spec(SimModel::PostNonlinear, 500, 2, 0.4, 0.0);
        let lin = SimSpec {
            model: SimModel::Linear,
            ..s.clone()
        };
        let y = s.generate(&mut rng::stream(8, 0)).unwrap();
        let z = lin.generate(&mut rng::stream(8, 0)).unwrap();
        for (a, b) in y.y1().iter().zip(z.y1()).chain(y.y2().iter().zip(z.y2())) {
            assert!((libm::cbrt(*a) - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn generators_are_deterministic() {
        for model in SimModel::ALL {
            let s = spec(model, 50, 1, 0.3, 1.0);
            assert_eq!(
                s.generate(&mut rng::stream(9, 1)).unwrap(),
                s.generate(&mut rng::stream(9, 1)).unwrap()
            );
        }
    }

    #[test]
    fn roc_auc_cases() {
        assert_eq!(roc_auc(&[0.1, 0.2], &[0.8, 0.9]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.8, 0.9], &[0.1, 0.2]).unwrap(), 0.0);
        assert_eq!(roc_auc(&[0.5], &[0.5]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[0.1, 0.5], &[0.5]).unwrap(), 0.75);
        assert_eq!(roc_auc(&[], &[0.5]), Err(Error::EmptyInput));
        let mut r = rng::stream(10, 0);
        let trials = 400;
        let a: Vec<f64> = (0..trials).map(|_| r.random()).collect();
        let b: Vec<f64> = (0..trials).map(|_| r.random()).collect();
        assert!((roc_auc(&a, &b).unwrap() - 0.5).abs() < 3.0 / libm::sqrt(trials as f64));
    }

    #[test]
    fn with_param_redraws_betas_for_d() {
        let s = spec(SimModel::Linear, 100, 1, 0.0, 0.0);
        let s3 = s.with_param(SweepParam::D, 3.0).unwrap();
        assert_eq!(s3.beta1.len(), 3);
        assert_eq!(s3.with_param(SweepParam::D, 1.0).unwrap(), s);
        assert!(s.with_param(SweepParam::N, 2.5).is_err());
        assert!(s.with_param(SweepParam::A, 1.5).is_err());
    }
}
