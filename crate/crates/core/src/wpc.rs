//! Empirical weighted partial copula and its Cramér–von Mises statistic.
//!
//! With pseudo-observations `Û_ij = F̂_j(Y_ij | X_i)`, ranks `R̂_ij` and
//! normalized ranks `Ĝ_i = (R̂_i − 1) / n`, the statistic
//! `T̂ = ∫ Ŵ(u, t)² du dt` has the closed form
//! `n⁻² Σ_{i,j} M(Ĝ_i, Ĝ_j) w⋆(X_i − X_j)`, where `w⋆` is the
//! self-convolution of the weight function `w`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::margins::ConditionalMargin;
use crate::math::{pairwise_sum, sq_dist};
use crate::rng;
use rand::Rng;

/// Pseudo-observations with their per-column ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoObs {
    u_hat: Vec<[f64; 2]>,
    ranks: Vec<[usize; 2]>,
    g_hat: Vec<[f64; 2]>,
}

/// How equal pseudo-observations are ranked.
///
/// k-NN margins take at most `k + 1` distinct values, so ties are the rule.
/// Under `Max` every tie group shares its largest rank and the normalized ranks
/// are far from uniform; `Random` orders each group by a seeded random key,
/// which keeps `Ĝ` on the grid `{0, 1/n, …, (n − 1)/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Max,
    Random(u64),
}

impl PseudoObs {
    /// Ranks with the max-rank convention.
    pub fn from_columns(u1: &[f64], u2: &[f64]) -> Result<Self> {
        Self::from_columns_with(u1, u2, TieBreak::Max)
    }

    pub fn from_columns_with(u1: &[f64], u2: &[f64], ties: TieBreak) -> Result<Self> {
        if u1.len() != u2.len() {
            return Err(Error::DimensionMismatch {
                expected: u1.len(),
                got: u2.len(),
            });
        }
        if u1.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (name, col) in [("u1", u1), ("u2", u2)] {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row,
                    column: name.into(),
                });
            }
        }
        let n = u1.len();
        let (r1, r2) = match ties {
            TieBreak::Max => (max_ranks(u1), max_ranks(u2)),
            TieBreak::Random(seed) => (
                random_tie_ranks(u1, rng::derive_seed(seed, 1)),
                random_tie_ranks(u2, rng::derive_seed(seed, 2)),
            ),
        };
        let ranks: Vec<[usize; 2]> = r1.into_iter().zip(r2).map(|(a, b)| [a, b]).collect();
        let g_hat = ranks
            .iter()
            .map(|r| [(r[0] - 1) as f64 / n as f64, (r[1] - 1) as f64 / n as f64])
            .collect();
        let u_hat = u1.iter().zip(u2).map(|(&a, &b)| [a, b]).collect();
        Ok(Self {
            u_hat,
            ranks,
            g_hat,
        })
    }

    pub fn n(&self) -> usize {
        self.u_hat.len()
    }

    pub fn u_hat(&self) -> &[[f64; 2]] {
        &self.u_hat
    }

    pub fn ranks(&self) -> &[[usize; 2]] {
        &self.ranks
    }

    pub fn g_hat(&self) -> &[[f64; 2]] {
        &self.g_hat
    }
}

/// Ranks in `1..=n`; tied values all get the largest rank of their group,
/// i.e. `R_i = #{j : v_j <= v_i}`.
pub fn max_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        for &i in &order[start..end] {
            ranks[i] = end;
        }
        start = end;
    }
    ranks
}

/// Ranks in `1..=n`, all distinct; values are ordered first, ties by a
/// random key drawn from `seed`, then by index.
pub fn random_tie_ranks(values: &[f64], seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, 0);
    let keys: Vec<u64> = values.iter().map(|_| rng.random()).collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .total_cmp(&values[b])
            .then(keys[a].cmp(&keys[b]))
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// `Û_ij = F̂_j(Y_ij | X_i)` for both margins, then max-ranks.
pub fn pseudo_observations<M1, M2>(data: &Dataset, m1: &M1, m2: &M2) -> Result<PseudoObs>
where
    M1: ConditionalMargin + ?Sized,
    M2: ConditionalMargin + ?Sized,
{
    pseudo_observations_with(data, m1, m2, TieBreak::Max)
}

pub fn pseudo_observations_with<M1, M2>(
    data: &Dataset,
    m1: &M1,
    m2: &M2,
    ties: TieBreak,
) -> Result<PseudoObs>
where
    M1: ConditionalMargin + ?Sized,
    M2: ConditionalMargin + ?Sized,
{
    let u1: Vec<f64> = data
        .rows()
        .zip(data.y1())
        .map(|(x, &y)| m1.cdf(y, x))
        .collect();
    let u2: Vec<f64> = data
        .rows()
        .zip(data.y2())
        .map(|(x, &y)| m2.cdf(y, x))
        .collect();
    PseudoObs::from_columns_with(&u1, &u2, ties)
}

#[inline]
fn corner(u: [f64; 2]) -> f64 {
    (1.0 - u[0] * u[0]) * (1.0 - u[1] * u[1])
}

#[inline]
fn m_with_corners(u: [f64; 2], v: [f64; 2], cu: f64, cv: f64) -> f64 {
    (1.0 - u[0].max(v[0])) * (1.0 - u[1].max(v[1])) - 0.25 * (cu + cv) + 1.0 / 9.0
}

/// `M(u, v) = (1 − u₁∨v₁)(1 − u₂∨v₂) − ¼[(1 − u₁²)(1 − u₂²) + (1 − v₁²)(1 − v₂²)] + 1/9`.
pub fn m_kernel(u: [f64; 2], v: [f64; 2]) -> f64 {
    m_with_corners(u, v, corner(u), corner(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// `w(t) = exp(−‖t‖² / s²)`.
    Gaussian,
}

/// Weight function `w` of the partial copula. Only the Gaussian family
/// ships; its Fourier transform never vanishes, which is what makes
/// `W ≡ 0` equivalent to conditional independence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    scale: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self {
            family: KernelFamily::Gaussian,
            scale: 1.0,
        }
    }
}

impl KernelSpec {
    pub fn gaussian(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "kernel scale must be positive, got {scale}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Gaussian,
            scale,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `w(t)`.
    pub fn w(&self, t: &[f64]) -> f64 {
        let r2: f64 = t.iter().map(|v| v * v).sum();
        libm::exp(-r2 / (self.scale * self.scale))
    }

    /// `w⋆(δ) = (π/2)^{d/2} s^d exp(−‖δ‖² / (2 s²))`, with `d = δ.len()`.
    pub fn w_star(&self, delta: &[f64]) -> f64 {
        let r2: f64 = delta.iter().map(|v| v * v).sum();
        self.w_star_sq(r2, delta.len())
    }

    #[inline]
    fn w_star_sq(&self, r2: f64, d: usize) -> f64 {
        self.w_star_origin(d) * libm::exp(-r2 / (2.0 * self.scale * self.scale))
    }

    /// `w⋆(0)` in dimension `d`.
    pub fn w_star_origin(&self, d: usize) -> f64 {
        libm::pow(FRAC_PI_2, d as f64 / 2.0) * libm::pow(self.scale, d as f64)
    }
}

/// `w⋆(X_i − X_j)` for every pair of rows of a dataset. Lets bootstrap
/// replicates, whose covariates are rows of the original sample, skip the
/// exponentials.
#[derive(Debug, Clone)]
pub struct KernelGram {
    n: usize,
    values: Vec<f64>,
}

impl KernelGram {
    pub fn new(data: &Dataset, kernel: &KernelSpec) -> Self {
        let (n, d) = (data.n(), data.d());
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let w = kernel.w_star_sq(sq_dist(data.row(i), data.row(j)), d);
                values[i * n + j] = w;
                values[j * n + i] = w;
            }
        }
        Self { n, values }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Closed-form statistic `n⁻² Σ_{i,j} M(Ĝ_i, Ĝ_j) w⋆(X_i − X_j)`.
pub fn statistic(data: &Dataset, pobs: &PseudoObs, kernel: &KernelSpec) -> Result<f64> {
    check_sizes(data, pobs)?;
    let d = data.d();
    closed_form(pobs.g_hat(), |i, j| {
        kernel.w_star_sq(sq_dist(data.row(i), data.row(j)), d)
    })
}

/// Closed-form statistic for a sample whose row `i` is row `source[i]` of the
/// dataset behind `gram`.
pub fn statistic_from_gram(gram: &KernelGram, source: &[usize], pobs: &PseudoObs) -> Result<f64> {
    if source.len() != pobs.n() {
        return Err(Error::DimensionMismatch {
            expected: source.len(),
            got: pobs.n(),
        });
    }
    if source.len() < 2 {
        return Err(Error::InvalidDataset("the statistic needs n >= 2".into()));
    }
    closed_form(pobs.g_hat(), |i, j| gram.get(source[i], source[j]))
}

fn check_sizes(data: &Dataset, pobs: &PseudoObs) -> Result<()> {
    if data.n() != pobs.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            got: pobs.n(),
        });
    }
    if data.n() < 2 {
        return Err(Error::InvalidDataset("the statistic needs n >= 2".into()));
    }
    Ok(())
}

const ROW_BLOCK: usize = 32;

/// Double sum over all ordered pairs, diagonal included. Rows are summed in
/// fixed blocks whose partial sums are tree-reduced, so the result does not
/// depend on how blocks are scheduled.
fn closed_form<W>(g: &[[f64; 2]], weight: W) -> Result<f64>
where
    W: Fn(usize, usize) -> f64 + Sync,
{
    let n = g.len();
    let corners: Vec<f64> = g.iter().map(|&u| corner(u)).collect();
    let block = |b: usize| -> (f64, f64) {
        let (mut signed, mut abs) = (0.0, 0.0);
        for i in b * ROW_BLOCK..((b + 1) * ROW_BLOCK).min(n) {
            let (gi, ci) = (g[i], corners[i]);
            let m = m_with_corners(gi, gi, ci, ci);
            let w = weight(i, i);
            let (mut row, mut row_abs) = (0.0, 0.0);
            for j in i + 1..n {
                let m = m_with_corners(gi, g[j], ci, corners[j]);
                let w = weight(i, j);
                row += m * w;
                row_abs += m.abs() * w;
            }
            signed += m * w + 2.0 * row;
            abs += m.abs() * w + 2.0 * row_abs;
        }
        (signed, abs)
    };
    let blocks = n.div_ceil(ROW_BLOCK);
    #[cfg(feature = "parallel")]
    let partial: Vec<(f64, f64)> = (0..blocks).into_par_iter().map(block).collect();
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<(f64, f64)> = (0..blocks).map(block).collect();

    let norm = (n * n) as f64;
    let signed: Vec<f64> = partial.iter().map(|p| p.0).collect();
    let abs: Vec<f64> = partial.iter().map(|p| p.1).collect();
    let total = pairwise_sum(&signed) / norm;
    let magnitude = pairwise_sum(&abs) / norm;
    if total >= 0.0 {
        Ok(total)
    } else if total >= -1e-10 * magnitude {
        Ok(0.0)
    } else {
        Err(Error::Numerical(alloc::format!(
            "statistic {total:e} is negative beyond rounding (scale {magnitude:e})"
        )))
    }
}

/// `Ŵ(u, t) = n⁻¹ Σ_i (1{R̂_i1 − 1 < n u₁} 1{R̂_i2 − 1 < n u₂} − u₁u₂) w(t − X_i)`.
pub fn empirical_wpc(
    data: &Dataset,
    pobs: &PseudoObs,
    kernel: &KernelSpec,
    u: [f64; 2],
    t: &[f64],
) -> f64 {
    wpc_with_weights(pobs.ranks(), u, &kernel_weights(data, kernel, t))
}

/// `w(t − X_i)` for every row.
fn kernel_weights(data: &Dataset, kernel: &KernelSpec, t: &[f64]) -> Vec<f64> {
    let mut diff = vec![0.0; data.d()];
    data.rows()
        .map(|row| {
            for ((dst, &ti), &xi) in diff.iter_mut().zip(t).zip(row) {
                *dst = ti - xi;
            }
            kernel.w(&diff)
        })
        .collect()
}

fn wpc_with_weights(ranks: &[[usize; 2]], u: [f64; 2], weights: &[f64]) -> f64 {
    let n = ranks.len() as f64;
    let mut acc = 0.0;
    for (r, &w) in ranks.iter().zip(weights) {
        let inside = ((r[0] - 1) as f64) < n * u[0] && ((r[1] - 1) as f64) < n * u[1];
        let indicator = if inside { 1.0 } else { 0.0 };
        acc += (indicator - u[0] * u[1]) * w;
    }
    acc / n
}

/// Half-width `T` of the `t` box for [`statistic_bruteforce`]: the covariate
/// range plus four kernel scales, beyond which `w(t − X_i)²` is below `e^{-32}`.
pub fn default_half_width(data: &Dataset, kernel: &KernelSpec) -> f64 {
    let reach = data.x().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    reach + 4.0 * kernel.scale()
}

/// Nodes and weights on `[0, 1]`: `resolution` equal cells, each split
/// further at the jump points `j / n` of the rank indicators, with two
/// Gauss–Legendre nodes per piece. `Ŵ²` is quadratic in each `u_j` between
/// jumps, so this integrates the `u` part exactly.
fn u_rule(resolution: usize, n: usize) -> Vec<(f64, f64)> {
    let offset = 0.5 / libm::sqrt(3.0);
    let mut cuts: Vec<f64> = (0..=resolution)
        .map(|a| a as f64 / resolution as f64)
        .collect();
    cuts.extend((1..n).map(|j| j as f64 / n as f64));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    cuts.windows(2)
        .flat_map(|w| {
            let (mid, h) = (0.5 * (w[0] + w[1]), w[1] - w[0]);
            [(mid - offset * h, 0.5 * h), (mid + offset * h, 0.5 * h)]
        })
        .collect()
}

/// Direct quadrature of `Ŵ(u, t)²` over `[0,1]² × [−T, T]^d` with
/// `resolution` cells per axis: midpoint rule in `t`, piecewise Gauss–Legendre
/// in `u` (see [`u_rule`]).
/// Quadrature oracle for the closed form; only practical for `d ≤ 2`.
pub fn statistic_bruteforce(
    data: &Dataset,
    pobs: &PseudoObs,
    kernel: &KernelSpec,
    resolution: usize,
    half_width: f64,
) -> Result<f64> {
    check_sizes(data, pobs)?;
    if resolution < 32 {
        return Err(Error::InvalidConfig(alloc::format!(
            "resolution {resolution} < 32"
        )));
    }
    let d = data.d();
    if d > 2 {
        return Err(Error::InvalidConfig(
            "quadrature oracle supports d <= 2 only".into(),
        ));
    }
    if !(half_width > 0.0) {
        return Err(Error::InvalidConfig("half-width must be positive".into()));
    }
    let r = resolution;
    let u_nodes = u_rule(r, data.n());
    let t_step = 2.0 * half_width / r as f64;
    let t_axis: Vec<f64> = (0..r)
        .map(|a| -half_width + (a as f64 + 0.5) * t_step)
        .collect();
    let t_count = r.pow(d as u32);

    let mut slices = Vec::with_capacity(t_count);
    let mut t = vec![0.0; d];
    for flat in 0..t_count {
        let mut rest = flat;
        for v in t.iter_mut() {
            *v = t_axis[rest % r];
            rest /= r;
        }
        let weights = kernel_weights(data, kernel, &t);
        let mut slice = 0.0;
        for &(u1, h1) in &u_nodes {
            for &(u2, h2) in &u_nodes {
                let w = wpc_with_weights(pobs.ranks(), [u1, u2], &weights);
                slice += w * w * h1 * h2;
            }
        }
        slices.push(slice);
    }
    Ok(pairwise_sum(&slices) * libm::pow(t_step, d as f64))
}
