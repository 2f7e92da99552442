//! Closed-form moments of the squared-norm estimator `‖η‖²` for every model.
//!
//! All variances are for the scaled estimators, whose mean is `‖x‖²`.

use crate::error::{check_dim, param, Error, Result};
use crate::norms::{center_fixed, check_fixed_params, norm_profile};
use crate::projector::ModelKind;

fn check_p_half(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(param(format!("p must lie in (0, 1/2], got {p}")))
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        Err(param("m must be at least 1"))
    } else {
        Ok(())
    }
}

/// Bias of the uncentered Bernoulli estimator:
/// `E‖u'−v'‖² − ‖u−v‖² = (p/(1−p))·(Σₖ (uₖ−vₖ))²`.
pub fn naive_bias(u: &[f64], v: &[f64], p: f64) -> Result<f64> {
    check_dim(u.len(), v.len())?;
    check_p_half(p)?;
    let mut s = 0.0;
    for (index, (a, b)) in u.iter().zip(v).enumerate() {
        let diff = a - b;
        if !diff.is_finite() {
            return Err(Error::NonFinite { index });
        }
        s += diff;
    }
    Ok(p / (1.0 - p) * s * s)
}

/// `E ηᵢ⁴` of one unscaled centered Bernoulli coordinate,
/// `p(1−p)(1−6p+6p²)‖x‖₄⁴ + 3p²(1−p)²‖x‖⁴`.
pub fn fourth_moment_bernoulli(x: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(param(format!("p must lie in (0, 1), got {p}")));
    }
    let n = norm_profile(x)?;
    let pq = p * (1.0 - p);
    Ok(pq * (1.0 - 6.0 * p + 6.0 * p * p) * n.norm4_4 + 3.0 * pq * pq * n.sq_norm_squared())
}

/// `Var ‖η_B‖² = (1/m)[1/(p(1−p)) − 6]‖x‖₄⁴ + (2/m)‖x‖⁴`.
///
/// Non-increasing in `p` on `(0, 1/2]`, and below the Gaussian variance once
/// `p > (3−√3)/6`.
pub fn var_bernoulli(x: &[f64], m: usize, p: f64) -> Result<f64> {
    check_p_half(p)?;
    check_m(m)?;
    let n = norm_profile(x)?;
    let m = m as f64;
    Ok((1.0 / (p * (1.0 - p)) - 6.0) * n.norm4_4 / m + 2.0 * n.sq_norm_squared() / m)
}

/// `Var ‖η_G‖² = (2/m)‖x‖⁴`.
pub fn var_gaussian(x: &[f64], m: usize) -> Result<f64> {
    check_m(m)?;
    let n = norm_profile(x)?;
    Ok(2.0 * n.sq_norm_squared() / m as f64)
}

/// Entries i.i.d. symmetric on `{−1, 0, +1}` with `P(≠0) = ρ`, scaled to
/// unit expected norm: `(1/m)[(1/ρ − 3)‖x‖₄⁴ + 2‖x‖⁴]`.
fn var_ternary(x: &[f64], m: usize, density: f64) -> Result<f64> {
    check_m(m)?;
    let n = norm_profile(x)?;
    Ok(((1.0 / density - 3.0) * n.norm4_4 + 2.0 * n.sq_norm_squared()) / m as f64)
}

/// Achlioptas (`ρ = 1/3`): identical to the Gaussian variance.
pub fn var_achlioptas(x: &[f64], m: usize) -> Result<f64> {
    var_ternary(x, m, 1.0 / 3.0)
}

/// Ping (`ρ = 1/√d`).
pub fn var_ping(x: &[f64], m: usize) -> Result<f64> {
    var_ternary(x, m, crate::genmat::ping_density(x.len()))
}

/// Bourgain rows (uniform `c`-subset, Rademacher signs):
/// `(1/m)[(d/c)‖x‖₄⁴ + 3d(c−1)/(c(d−1))·(‖x‖⁴ − ‖x‖₄⁴) − ‖x‖⁴]`.
pub fn var_bourgain(x: &[f64], m: usize, c: usize) -> Result<f64> {
    check_m(m)?;
    let d = x.len();
    if d < 2 || c == 0 || c > d {
        return Err(param(format!("c must satisfy 1 <= c <= d, got c={c}, d={d}")));
    }
    let n = norm_profile(x)?;
    let (df, cf) = (d as f64, c as f64);
    let x4 = n.sq_norm_squared();
    let cross = 3.0 * df * (cf - 1.0) / (cf * (df - 1.0)) * (x4 - n.norm4_4);
    Ok((df / cf * n.norm4_4 + cross - x4) / m as f64)
}

/// Coefficients of the fixed-sparsity fourth moment, each already divided
/// by `C(d, c)`:
///
/// ```text
/// α = 3C(d−2,c−2) − 6C(d−3,c−3) + 3C(d−4,c−4)
/// β =  C(d−1,c−1) − 7C(d−2,c−2) + 12C(d−3,c−3) − 6C(d−4,c−4)
/// γ =  C(d−4,c−4)
/// θ = 4C(d−2,c−2) − 12C(d−3,c−3) + 8C(d−4,c−4)
/// λ = 6C(d−3,c−3) − 6C(d−4,c−4)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedVarianceCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub lambda: f64,
}

/// `C(d−k, c−k) / C(d, c) = Π_{i<k} (c−i)/(d−i)`, exactly zero when `c < k`.
fn binomial_ratio(d: usize, c: usize, k: usize) -> f64 {
    if c < k {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (c - i) as f64 / (d - i) as f64)
}

pub fn fixed_coeffs(d: usize, c: usize) -> Result<FixedVarianceCoeffs> {
    check_fixed_params(d, c)?;
    let r = |k| binomial_ratio(d, c, k);
    let (r1, r2, r3, r4) = (r(1), r(2), r(3), r(4));
    Ok(FixedVarianceCoeffs {
        alpha: 3.0 * r2 - 6.0 * r3 + 3.0 * r4,
        beta: r1 - 7.0 * r2 + 12.0 * r3 - 6.0 * r4,
        gamma: r4,
        theta: 4.0 * r2 - 12.0 * r3 + 8.0 * r4,
        lambda: 6.0 * r3 - 6.0 * r4,
    })
}

/// `E ηᵢ⁴` of one unscaled fixed-sparsity coordinate, i.e. the mean of
/// `(Σ_{j∈J} yⱼ)⁴` over all `c`-subsets `J`.
pub fn fourth_moment_fixed(x: &[f64], c: usize) -> Result<f64> {
    let coeffs = fixed_coeffs(x.len(), c)?;
    let cv = center_fixed(x, c)?;
    let y = norm_profile(&cv.y)?;
    let s = cv.s_y;
    Ok(coeffs.alpha * y.sq_norm_squared()
        + coeffs.beta * y.norm4_4
        + coeffs.gamma * s.powi(4)
        + coeffs.theta * y.norm3_cubed * s
        + coeffs.lambda * y.sq_norm * s * s)
}

/// `Var ‖η_F‖²`: `d²(d−1)²/(m·c²(d−c)²)·E ηᵢ⁴ − ‖x‖⁴/m`.
pub fn var_fixed(x: &[f64], m: usize, d: usize, c: usize) -> Result<f64> {
    check_dim(d, x.len())?;
    check_m(m)?;
    let e4 = fourth_moment_fixed(x, c)?;
    let x4 = norm_profile(x)?.sq_norm_squared();
    let (df, cf, mf) = (d as f64, c as f64, m as f64);
    let g = df * (df - 1.0) / (cf * (df - cf));
    Ok(g * g * e4 / mf - x4 / mf)
}

/// `E ηᵢ² = c(d−c)/(d(d−1))·‖x‖²` for one unscaled fixed-sparsity coordinate.
pub fn expected_sq_norm_fixed_unscaled(x: &[f64], d: usize, c: usize) -> Result<f64> {
    check_dim(d, x.len())?;
    check_fixed_params(d, c)?;
    let (df, cf) = (d as f64, c as f64);
    Ok(cf * (df - cf) / (df * (df - 1.0)) * norm_profile(x)?.sq_norm)
}

/// Upper bound `E ηᵢ⁴ ≤ (5c/d)‖x‖⁴`, proven for `5 ≤ c ≤ d/2`.
pub fn fourth_moment_bound_fixed(x: &[f64], d: usize, c: usize) -> Result<f64> {
    check_dim(d, x.len())?;
    check_fixed_params(d, c)?;
    if c < 5 {
        return Err(Error::Domain(format!("fourth-moment bound needs c >= 5, got {c}")));
    }
    Ok(5.0 * c as f64 / d as f64 * norm_profile(x)?.sq_norm_squared())
}

/// Closed-form `Var ‖η‖²` for any model applied to `x` with `m` rows.
pub fn model_variance(kind: ModelKind, x: &[f64], m: usize) -> Result<f64> {
    match kind {
        ModelKind::Bernoulli { p } => var_bernoulli(x, m, p),
        ModelKind::FixedSparsity { c } => var_fixed(x, m, x.len(), c),
        ModelKind::Gaussian => var_gaussian(x, m),
        ModelKind::Achlioptas => var_achlioptas(x, m),
        ModelKind::Ping => var_ping(x, m),
        ModelKind::Bourgain { c } => var_bourgain(x, m, c),
    }
}
