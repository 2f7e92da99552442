//! Tail bounds for the squared-norm estimators and the projection dimensions
//! they imply. `log` is the natural logarithm throughout. Bound values are not
//! clamped to 1; a value above 1 is a vacuous bound.

use crate::error::{param, Error, Result};
use crate::norms::check_fixed_params;

/// Inputs to Bennett's inequality for `S = Σ (Zᵢ − E Zᵢ)` with `0 ≤ Zᵢ ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundQuery {
    /// Second-moment budget, `w ≥ Σ E Zᵢ²`.
    pub w: f64,
    /// Almost-sure bound on each `Zᵢ`.
    pub b: f64,
    /// Deviation.
    pub t: f64,
}

impl TailBoundQuery {
    pub fn new(w: f64, b: f64, t: f64) -> Result<Self> {
        let q = Self { w, b, t };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.w.is_finite() && self.w > 0.0) {
            return Err(param(format!("w must be positive and finite, got {}", self.w)));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(param(format!("b must be positive and finite, got {}", self.b)));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(param(format!("t must be non-negative and finite, got {}", self.t)));
        }
        Ok(())
    }
}

/// `h(a) = (1+a)·log(1+a) − a`.
pub fn bennett_h(a: f64) -> Result<f64> {
    if a.is_nan() || a < 0.0 {
        return Err(param(format!("h is defined for a >= 0, got {a}")));
    }
    Ok((1.0 + a) * a.ln_1p() - a)
}

/// `P{S ≥ t} ≤ exp(−(w/b²)·h(bt/w))`.
pub fn bennett_upper_tail(q: &TailBoundQuery) -> Result<f64> {
    q.validate()?;
    let h = bennett_h(q.b * q.t / q.w)?;
    Ok((-(q.w / (q.b * q.b)) * h).exp())
}

/// Sub-Gaussian lower tail for sums of nonnegative variables,
/// `P{S ≤ −t} ≤ exp(−t²/(2w))`.
pub fn lower_tail(w: f64, t: f64) -> Result<f64> {
    if !(w.is_finite() && w > 0.0) {
        return Err(param(format!("w must be positive and finite, got {w}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(param(format!("t must be non-negative and finite, got {t}")));
    }
    Ok((-t * t / (2.0 * w)).exp())
}

fn check_p_half(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(param(format!("p must lie in (0, 1/2], got {p}")))
    }
}

/// Largest ε the Bernoulli bound covers, `8/(d·p)`.
pub fn bernoulli_eps_max(d: usize, p: f64) -> f64 {
    8.0 / (d as f64 * p)
}

/// Largest ε the fixed-sparsity bound covers, `20/c`.
pub fn fixed_eps_max(c: usize) -> f64 {
    20.0 / c as f64
}

fn check_eps(eps: f64, max: f64) -> Result<()> {
    if eps > 0.0 && eps <= max {
        Ok(())
    } else {
        Err(Error::Domain(format!("eps must lie in (0, {max}], got {eps}")))
    }
}

/// `P{‖η_B‖² ∉ [(1−ε)‖x‖², (1+ε)‖x‖²]} < 2·exp(−ε²·m·p²/(8(1−p)))`,
/// valid for `0 < ε ≤ 8/(d·p)`.
pub fn bernoulli_two_sided(eps: f64, m: usize, d: usize, p: f64) -> Result<f64> {
    check_p_half(p)?;
    if m == 0 || d == 0 {
        return Err(param("m and d must be positive"));
    }
    check_eps(eps, bernoulli_eps_max(d, p))?;
    Ok(2.0 * (-eps * eps * m as f64 * p * p / (8.0 * (1.0 - p))).exp())
}

fn check_fixed_theory(d: usize, c: usize) -> Result<()> {
    check_fixed_params(d, c)?;
    if c < 5 {
        return Err(Error::Domain(format!("fixed-sparsity bounds need c >= 5, got {c}")));
    }
    Ok(())
}

/// `2·exp(−ε²·m·p(1−p)²/20)` with `p = c/d`, valid for `5 ≤ c ≤ d/2` and
/// `0 < ε ≤ 20/c`.
pub fn fixed_two_sided(eps: f64, m: usize, d: usize, c: usize) -> Result<f64> {
    check_fixed_theory(d, c)?;
    if m == 0 {
        return Err(param("m must be positive"));
    }
    check_eps(eps, fixed_eps_max(c))?;
    let p = c as f64 / d as f64;
    Ok(2.0 * (-eps * eps * m as f64 * p * (1.0 - p) * (1.0 - p) / 20.0).exp())
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        Err(param(format!("need at least two points, got n={n}")))
    } else {
        Ok(())
    }
}

/// Smallest `m ≥ 16(1−p)·log n/(ε²p²)`: enough rows for a centered Bernoulli
/// matrix preserving all pairwise distances of `n` points to exist.
///
/// The caller is responsible for `ε ≤ 8/(d·p)`; see [`bernoulli_eps_max`].
pub fn min_m_bernoulli(n: u64, eps: f64, p: f64) -> Result<u64> {
    check_n(n)?;
    check_p_half(p)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let bound = 16.0 * (1.0 - p) * (n as f64).ln() / (eps * eps * p * p);
    Ok(bound.ceil() as u64)
}

/// Smallest `m ≥ 40·log n/(ε²·p(1−p)²)` with `p = c/d`, for `5 ≤ c ≤ d/2`
/// and `0 < ε ≤ 20/c`.
pub fn min_m_fixed(n: u64, eps: f64, d: usize, c: usize) -> Result<u64> {
    check_n(n)?;
    check_fixed_theory(d, c)?;
    check_eps(eps, fixed_eps_max(c))?;
    let p = c as f64 / d as f64;
    let bound = 40.0 * (n as f64).ln() / (eps * eps * p * (1.0 - p) * (1.0 - p));
    Ok(bound.ceil() as u64)
}
