//! Experiment kernels (distance matrices, distance MSE, retrieval error,
//! distortion counts) and the Monte Carlo and exhaustive oracles used to
//! validate the closed-form moments.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{check_dim, param, Error, Result};
use crate::projector::ProjectionModel;
use crate::rng::derive_seed;

/// Pairwise Euclidean distances (not squared), stored as the strict upper
/// triangle in row order: `(0,1), (0,2), …, (0,n−1), (1,2), …`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_condensed(n: usize, upper: Vec<f64>) -> Result<Self> {
        let want = n * n.saturating_sub(1) / 2;
        if upper.len() != want {
            return Err(Error::Dimension { expected: want, found: upper.len() });
        }
        if let Some(index) = upper.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn condensed(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[self.offset(i, j)],
            std::cmp::Ordering::Greater => self.upper[self.offset(j, i)],
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn pairwise_distances(data: &Dataset) -> DistanceMatrix {
    let n = data.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = data.row(i);
            ((i + 1)..n).map(|j| euclidean(a, data.row(j))).collect()
        })
        .collect();
    DistanceMatrix { n, upper: rows.concat() }
}

/// Mean of `(a(i,j) − b(i,j))²` over the `n(n−1)/2` pairs `i < j`.
pub fn distance_mse(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<f64> {
    check_dim(a.n, b.n)?;
    if a.upper.is_empty() {
        return Err(param("distance MSE needs at least two samples"));
    }
    let sum: f64 = a.upper.iter().zip(&b.upper).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.upper.len() as f64)
}

/// The `r` nearest candidates of `query` (itself excluded), ordered by
/// distance with ties going to the lower index.
pub fn nearest_neighbors(dist: &DistanceMatrix, query: usize, r: usize) -> Result<Vec<usize>> {
    let n = dist.n;
    if query >= n {
        return Err(param(format!("query index {query} out of range for n={n}")));
    }
    if r == 0 || r >= n {
        return Err(param(format!("neighbor count must satisfy 1 <= r < n, got r={r}, n={n}")));
    }
    let mut cand: Vec<(f64, usize)> = (0..n).filter(|&j| j != query).map(|j| (dist.get(query, j), j)).collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if r < cand.len() {
        cand.select_nth_unstable_by(r - 1, cmp);
        cand.truncate(r);
    }
    cand.sort_unstable_by(cmp);
    Ok(cand.into_iter().map(|(_, j)| j).collect())
}

/// `1 − |N_d ∩ N_m| / r` for the `r`-nearest-neighbor sets of one query.
pub fn retrieval_error(original: &DistanceMatrix, projected: &DistanceMatrix, r: usize, query: usize) -> Result<f64> {
    check_dim(original.n, projected.n)?;
    let mut a = nearest_neighbors(original, query, r)?;
    let mut b = nearest_neighbors(projected, query, r)?;
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(1.0 - common as f64 / r as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport {
    pub r: usize,
    pub per_query: Vec<f64>,
    pub mean: f64,
}

/// Retrieval error with every sample taking its turn as the query.
pub fn retrieval_report(original: &DistanceMatrix, projected: &DistanceMatrix, r: usize) -> Result<RetrievalReport> {
    check_dim(original.n, projected.n)?;
    let per_query = (0..original.n)
        .into_par_iter()
        .map(|q| retrieval_error(original, projected, r, q))
        .collect::<Result<Vec<f64>>>()?;
    let mean = per_query.iter().sum::<f64>() / per_query.len() as f64;
    Ok(RetrievalReport { r, per_query, mean })
}

/// Sample mean and unbiased sample variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMoments {
    pub mean: f64,
    pub variance: f64,
    pub count: usize,
}

impl SampleMoments {
    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Two-pass moments, summed in index order.
pub fn sample_moments(values: &[f64]) -> Result<SampleMoments> {
    if values.len() < 2 {
        return Err(param(format!("need at least 2 values, got {}", values.len())));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(SampleMoments { mean, variance, count: values.len() })
}

/// Evaluates `trial(t)` for `t = 0..trials` in parallel and reduces in index
/// order, so the result does not depend on scheduling.
pub fn mc_moments<F>(trials: usize, trial: F) -> Result<SampleMoments>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    if trials < 2 {
        return Err(param(format!("need at least 2 trials, got {trials}")));
    }
    let values = (0..trials as u64).into_par_iter().map(trial).collect::<Result<Vec<f64>>>()?;
    sample_moments(&values)
}

/// Monte Carlo moments of `‖η‖²`; trial `t` draws a fresh matrix with seed
/// `derive_seed(seed, t)`.
pub fn mc_variance(model: &ProjectionModel, x: &[f64], trials: usize, seed: u64) -> Result<SampleMoments> {
    check_dim(model.d(), x.len())?;
    mc_moments(trials, |t| {
        let eta = model.with_seed(derive_seed(seed, t)).materialize()?.project(x)?;
        Ok(eta.iter().map(|v| v * v).sum())
    })
}

/// Exact mean and variance of a discrete statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMoments {
    pub mean: f64,
    pub variance: f64,
}

pub const MAX_EXHAUSTIVE_D: usize = 20;
pub const MAX_EXHAUSTIVE_SUBSETS: u64 = 1_000_000;

fn finite_sum(x: &[f64]) -> Result<f64> {
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(x.iter().sum())
}

fn weighted_moments(outcomes: impl Iterator<Item = (f64, f64)> + Clone) -> ExactMoments {
    let mean: f64 = outcomes.clone().map(|(w, s)| w * s).sum();
    let variance = outcomes.map(|(w, s)| w * (s - mean) * (s - mean)).sum();
    ExactMoments { mean, variance }
}

/// Exact moments of the one-row scaled Bernoulli statistic
/// `(Σ_{j∈S} xⱼ − p·s_x)² / (p(1−p))`, enumerating all `2^d` supports `S`
/// with weight `p^|S|·(1−p)^(d−|S|)`.
pub fn exhaustive_variance_bernoulli(x: &[f64], p: f64) -> Result<ExactMoments> {
    let d = x.len();
    if d > MAX_EXHAUSTIVE_D {
        return Err(param(format!("exhaustive enumeration limited to d <= {MAX_EXHAUSTIVE_D}, got {d}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(param(format!("p must lie in (0, 1), got {p}")));
    }
    let s_x = finite_sum(x)?;
    let pq = p * (1.0 - p);
    let outcomes = (0u32..1 << d).map(move |mask| {
        let k = mask.count_ones() as i32;
        let weight = p.powi(k) * (1.0 - p).powi(d as i32 - k);
        let picked: f64 = (0..d).filter(|j| mask >> j & 1 == 1).map(|j| x[j]).sum();
        let raw = picked - p * s_x;
        (weight, raw * raw / pq)
    });
    Ok(weighted_moments(outcomes))
}

/// Lexicographic `c`-combinations of `0..d`.
fn combinations(d: usize, c: usize) -> impl Iterator<Item = Vec<usize>> + Clone {
    let mut next = Some((0..c).collect::<Vec<usize>>());
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        let mut i = c;
        while i > 0 {
            i -= 1;
            if succ[i] < d - c + i {
                succ[i] += 1;
                for k in i + 1..c {
                    succ[k] = succ[k - 1] + 1;
                }
                next = Some(succ);
                break;
            }
        }
        Some(cur)
    })
}

fn subset_count(d: usize, c: usize) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..c as u128 {
        acc = acc * (d as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact moments of the one-row scaled fixed-sparsity statistic
/// `d(d−1)/(c(d−c))·(Σ_{j∈J} xⱼ − c·q·s_x)²` over all `C(d, c)` subsets `J`.
pub fn exhaustive_variance_fixed(x: &[f64], c: usize) -> Result<ExactMoments> {
    let d = x.len();
    if d < 2 || c == 0 || 2 * c > d {
        return Err(param(format!("c must satisfy 1 <= c <= d/2, got c={c}, d={d}")));
    }
    let total = subset_count(d, c);
    if total > MAX_EXHAUSTIVE_SUBSETS {
        return Err(param(format!("C({d},{c}) = {total} exceeds the enumeration limit")));
    }
    let s_x = finite_sum(x)?;
    let (df, cf) = (d as f64, c as f64);
    let q = (1.0 + ((df - cf) / (cf * (df - 1.0))).sqrt()) / df;
    let scale = df * (df - 1.0) / (cf * (df - cf));
    let weight = 1.0 / total as f64;
    let outcomes = combinations(d, c).map(move |subset| {
        let raw = subset.iter().map(|&j| x[j]).sum::<f64>() - cf * q * s_x;
        (weight, scale * raw * raw)
    });
    Ok(weighted_moments(outcomes))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionStats {
    /// Pairs with nonzero original distance.
    pub pairs: usize,
    /// Pairs whose squared distance left `((1−ε)·D, (1+ε)·D)`.
    pub outside: usize,
    /// Coincident pairs, excluded from `pairs`.
    pub skipped_duplicates: usize,
    pub fraction: f64,
}

pub fn distortion_stats(original: &Dataset, projected: &Dataset, eps: f64) -> Result<DistortionStats> {
    check_dim(original.n(), projected.n())?;
    if eps.is_nan() || eps < 0.0 {
        return Err(param(format!("eps must be non-negative, got {eps}")));
    }
    let n = original.n();
    let (pairs, outside, skipped) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = (0usize, 0usize, 0usize);
            for j in i + 1..n {
                let before = sq_distance(original.row(i), original.row(j));
                if before == 0.0 {
                    acc.2 += 1;
                    continue;
                }
                let after = sq_distance(projected.row(i), projected.row(j));
                acc.0 += 1;
                if !(after > (1.0 - eps) * before && after < (1.0 + eps) * before) {
                    acc.1 += 1;
                }
            }
            acc
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let fraction = if pairs == 0 { 0.0 } else { outside as f64 / pairs as f64 };
    Ok(DistortionStats { pairs, outside, skipped_duplicates: skipped, fraction })
}
