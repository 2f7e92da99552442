//! Power sums of a vector and the centering used by the fixed-sparsity model.
//!
//! The all-ones centering matrix is never built. Every model only needs the
//! coordinate sum `s_x`, so centering reduces to a scalar shift.

use crate::error::{param, Error, Result};

/// Power sums of one vector, accumulated left to right in a single pass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormProfile {
    /// `Σ xₖ²`
    pub sq_norm: f64,
    /// `Σ xₖ³`, signed.
    pub norm3_cubed: f64,
    /// `Σ xₖ⁴`
    pub norm4_4: f64,
    /// `Σ xₖ`
    pub coord_sum: f64,
}

impl NormProfile {
    /// `‖x‖⁴ = (Σ xₖ²)²`
    pub fn sq_norm_squared(&self) -> f64 {
        self.sq_norm * self.sq_norm
    }
}

pub fn norm_profile(x: &[f64]) -> Result<NormProfile> {
    let mut out = NormProfile::default();
    for (index, &v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { index });
        }
        let v2 = v * v;
        out.sq_norm += v2;
        out.norm3_cubed += v2 * v;
        out.norm4_4 += v2 * v2;
        out.coord_sum += v;
    }
    Ok(out)
}

/// Validates `1 ≤ c ≤ d/2` with `d ≥ 2`.
pub fn check_fixed_params(d: usize, c: usize) -> Result<()> {
    if d < 2 {
        return Err(param(format!("d must be at least 2, got {d}")));
    }
    if c == 0 || 2 * c > d {
        return Err(param(format!("c must satisfy 1 <= c <= d/2, got c={c}, d={d}")));
    }
    Ok(())
}

/// `√((d−c)/(c(d−1)))`, the magnitude of `1 − d·q`.
fn centering_ratio(d: usize, c: usize) -> f64 {
    let (d, c) = (d as f64, c as f64);
    ((d - c) / (c * (d - 1.0))).sqrt()
}

/// Centering constant of the fixed-sparsity model,
/// `q = (1 + √((d−c)/(c(d−1)))) / d`.
pub fn fixed_q(d: usize, c: usize) -> Result<f64> {
    check_fixed_params(d, c)?;
    Ok((1.0 + centering_ratio(d, c)) / d as f64)
}

/// `x` shifted by `q·s_x` in every coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredVector {
    pub y: Vec<f64>,
    /// `Σ yₖ`, evaluated as `(1 − d·q)·s_x = −√((d−c)/(c(d−1)))·s_x`.
    pub s_y: f64,
    pub q: f64,
}

pub fn center_fixed(x: &[f64], c: usize) -> Result<CenteredVector> {
    let d = x.len();
    check_fixed_params(d, c)?;
    let profile = norm_profile(x)?;
    let ratio = centering_ratio(d, c);
    let q = (1.0 + ratio) / d as f64;
    let shift = q * profile.coord_sum;
    Ok(CenteredVector { y: x.iter().map(|&v| v - shift).collect(), s_y: -ratio * profile.coord_sum, q })
}
