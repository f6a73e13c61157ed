//! Gaussian linear margin `F(y | x) = Φ((y − xᵀβ) / σ)` fitted by least
//! squares, with `σ²` the mean squared residual. No intercept is added.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ConditionalMargin;
use crate::dataset::{Dataset, Margin};
use crate::error::{Error, Result};
use crate::math::{dot, normal_cdf};

/// Floor on the residual standard deviation.
pub const SIGMA_MIN: f64 = 1e-12;

const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LrMarginModel {
    beta: Vec<f64>,
    sigma: f64,
    target: Margin,
}

impl LrMarginModel {
    pub fn new(beta: Vec<f64>, sigma: f64, target: Margin) -> Result<Self> {
        if !(sigma > 0.0) || beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig(
                "sigma must be positive and beta finite".into(),
            ));
        }
        Ok(Self {
            beta,
            sigma,
            target,
        })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn target(&self) -> Margin {
        self.target
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        dot(x, &self.beta)
    }
}

pub fn lr_fit(data: &Dataset, target: Margin) -> Result<LrMarginModel> {
    let (n, d) = (data.n(), data.d());
    if n <= d {
        return Err(Error::Underdetermined { n, d });
    }
    let y = data.y(target);
    let beta = least_squares(data, y)?;
    let sse: f64 = data
        .rows()
        .zip(y)
        .map(|(row, &yi)| {
            let r = yi - dot(row, &beta);
            r * r
        })
        .sum();
    let sigma = libm::sqrt(sse / n as f64).max(SIGMA_MIN);
    Ok(LrMarginModel {
        beta,
        sigma,
        target,
    })
}

/// Householder QR least squares. Columns whose pivot collapses relative to
/// their original norm are reported as rank deficient.
fn least_squares(data: &Dataset, y: &[f64]) -> Result<Vec<f64>> {
    let (n, d) = (data.n(), data.d());
    // Column-major copy of the design.
    let mut a = vec![0.0; n * d];
    for (i, row) in data.rows().enumerate() {
        for j in 0..d {
            a[j * n + i] = row[j];
        }
    }
    let mut b = y.to_vec();
    let norms: Vec<f64> = (0..d).map(|j| col_norm(&a[j * n..(j + 1) * n])).collect();
    let mut diag = vec![0.0; d];
    let mut singular = Vec::new();
    for j in 0..d {
        let tail = &mut a[j * n..];
        let col = &mut tail[..n];
        let alpha = col_norm(&col[j..]);
        if alpha <= RANK_TOL * norms[j] || norms[j] == 0.0 {
            singular.push(j);
            continue;
        }
        let alpha = if col[j] > 0.0 { -alpha } else { alpha };
        // v = col[j..] - alpha e_1, stored in place.
        col[j] -= alpha;
        let vnorm2: f64 = col[j..].iter().map(|v| v * v).sum();
        diag[j] = alpha;
        let reflect = |target: &mut [f64], v: &[f64]| {
            let s: f64 = target[j..].iter().zip(&v[j..]).map(|(t, v)| t * v).sum();
            let f = 2.0 * s / vnorm2;
            for (t, v) in target[j..].iter_mut().zip(&v[j..]) {
                *t -= f * v;
            }
        };
        let v = col.to_vec();
        for jj in j + 1..d {
            reflect(&mut tail[(jj - j) * n..(jj - j + 1) * n], &v);
        }
        reflect(&mut b, &v);
    }
    if !singular.is_empty() {
        return Err(Error::RankDeficient { columns: singular });
    }
    // Back substitution on R (diagonal in `diag`, strict upper part in `a`).
    let mut beta = vec![0.0; d];
    for j in (0..d).rev() {
        let mut s = b[j];
        for jj in j + 1..d {
            s -= a[jj * n + j] * beta[jj];
        }
        beta[j] = s / diag[j];
    }
    Ok(beta)
}

fn col_norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

impl ConditionalMargin for LrMarginModel {
    fn cdf(&self, y: f64, x: &[f64]) -> f64 {
        normal_cdf((y - self.mean(x)) / self.sigma)
    }

    fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean(x) + self.sigma * z
    }
}
