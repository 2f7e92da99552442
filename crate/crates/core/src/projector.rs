//! Applying a materialized matrix to vectors.
//!
//! Binary models subtract the implicit all-ones term as a scalar: with
//! `s_x = Σ xₖ`, a Bernoulli output is `(Σ_{j∈row} xⱼ − p·s_x)` and a
//! fixed-sparsity output is `(Σ_{j∈row} xⱼ − c·q·s_x)`, each then scaled so
//! that `E‖η‖² = ‖x‖²`. The signed baselines use the constant `κ` that gives
//! the same expectation:
//!
//! | model      | scale                        |
//! |------------|------------------------------|
//! | Bernoulli  | `1/√(m·p·(1−p))`             |
//! | fixed      | `√(d(d−1)/(m·c·(d−c)))`      |
//! | Gaussian   | `1/√m`                       |
//! | Achlioptas | `√(3/m)`                     |
//! | Ping       | `d^{1/4}/√m`                 |
//! | Bourgain   | `√(d/(m·c))`                 |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{check_dim, param, Error, Result};
use crate::genmat::{self, BinaryKind, DenseMatrix, SignedKind, SignedSparseMatrix, SparseBinaryMatrix};
use crate::norms::{check_fixed_params, fixed_q};

/// Model family without parameters; the names are the CLI and report spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelFamily {
    Bernoulli,
    FixedSparsity,
    Gaussian,
    Achlioptas,
    Ping,
    Bourgain,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 6] = [
        ModelFamily::Gaussian,
        ModelFamily::Achlioptas,
        ModelFamily::Ping,
        ModelFamily::Bourgain,
        ModelFamily::Bernoulli,
        ModelFamily::FixedSparsity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Bernoulli => "bernoulli",
            ModelFamily::FixedSparsity => "fixed",
            ModelFamily::Gaussian => "gaussian",
            ModelFamily::Achlioptas => "achlioptas",
            ModelFamily::Ping => "ping",
            ModelFamily::Bourgain => "bourgain",
        }
    }

    /// Bernoulli is parameterized by `p`; fixed and Bourgain by `c`.
    pub fn takes_p(self) -> bool {
        self == ModelFamily::Bernoulli
    }

    pub fn takes_c(self) -> bool {
        matches!(self, ModelFamily::FixedSparsity | ModelFamily::Bourgain)
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bernoulli" => Ok(ModelFamily::Bernoulli),
            "fixed" | "fix-sparsity" | "fixed-sparsity" => Ok(ModelFamily::FixedSparsity),
            "gaussian" => Ok(ModelFamily::Gaussian),
            "achlioptas" => Ok(ModelFamily::Achlioptas),
            "ping" => Ok(ModelFamily::Ping),
            "bourgain" => Ok(ModelFamily::Bourgain),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Bernoulli { p: f64 },
    FixedSparsity { c: usize },
    Gaussian,
    Achlioptas,
    Ping,
    Bourgain { c: usize },
}

impl ModelKind {
    pub fn family(&self) -> ModelFamily {
        match self {
            ModelKind::Bernoulli { .. } => ModelFamily::Bernoulli,
            ModelKind::FixedSparsity { .. } => ModelFamily::FixedSparsity,
            ModelKind::Gaussian => ModelFamily::Gaussian,
            ModelKind::Achlioptas => ModelFamily::Achlioptas,
            ModelKind::Ping => ModelFamily::Ping,
            ModelKind::Bourgain { .. } => ModelFamily::Bourgain,
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            ModelKind::Bernoulli { p } => Some(p),
            _ => None,
        }
    }

    pub fn c(&self) -> Option<usize> {
        match *self {
            ModelKind::FixedSparsity { c } | ModelKind::Bourgain { c } => Some(c),
            _ => None,
        }
    }
}

/// A fully specified ensemble: kind with its parameter, shape and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionModel {
    kind: ModelKind,
    d: usize,
    m: usize,
    seed: u64,
}

impl ProjectionModel {
    /// Requires `d ≥ 2`, `m ≥ 1`, `p ∈ (0, 1/2]` and `c ∈ [1, d/2]`.
    pub fn new(kind: ModelKind, d: usize, m: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(param(format!("d must be at least 2, got {d}")));
        }
        if m == 0 {
            return Err(param("m must be at least 1"));
        }
        match kind {
            ModelKind::Bernoulli { p } => check_p(p)?,
            ModelKind::FixedSparsity { c } | ModelKind::Bourgain { c } => check_fixed_params(d, c)?,
            _ => {}
        }
        Ok(Self { kind, d, m, seed })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Draws the matrix.
    pub fn materialize(&self) -> Result<Projector> {
        let (d, m, seed) = (self.d, self.m, self.seed);
        let matrix = match self.kind {
            ModelKind::Bernoulli { p } => Matrix::Binary(genmat::gen_bernoulli(d, m, p, seed)?),
            ModelKind::FixedSparsity { c } => Matrix::Binary(genmat::gen_fixed_sparsity(d, m, c, seed)?),
            ModelKind::Gaussian => Matrix::Dense(genmat::gen_gaussian(d, m, seed)?),
            ModelKind::Achlioptas => Matrix::Signed(genmat::gen_achlioptas(d, m, seed)?),
            ModelKind::Ping => Matrix::Signed(genmat::gen_ping(d, m, seed)?),
            ModelKind::Bourgain { c } => Matrix::Signed(genmat::gen_bourgain(d, m, c, seed)?),
        };
        Projector::new(matrix)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(param(format!("p must lie in (0, 1/2], got {p}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Binary(SparseBinaryMatrix),
    Signed(SignedSparseMatrix),
    Dense(DenseMatrix),
}

impl Matrix {
    pub fn d(&self) -> usize {
        match self {
            Matrix::Binary(w) => w.d(),
            Matrix::Signed(w) => w.d(),
            Matrix::Dense(w) => w.d(),
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Matrix::Binary(w) => w.m(),
            Matrix::Signed(w) => w.m(),
            Matrix::Dense(w) => w.m(),
        }
    }
}

/// A materialized matrix with its centering coefficient and output scale.
#[derive(Debug, Clone)]
pub struct Projector {
    matrix: Matrix,
    /// Multiplies `s_x` before subtraction; zero for uncentered kinds.
    shift: f64,
    scale: f64,
}

impl Projector {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let m = matrix.m() as f64;
        let (shift, scale) = match &matrix {
            Matrix::Binary(w) => match w.kind() {
                BinaryKind::Bernoulli { p } => {
                    check_p(p)?;
                    (p, bernoulli_scale(w.m(), p))
                }
                BinaryKind::FixedSparsity { c } => {
                    let q = fixed_q(w.d(), c)?;
                    (c as f64 * q, fixed_scale(w.d(), w.m(), c))
                }
            },
            Matrix::Signed(w) => (0.0, signed_scale(w.kind(), w.d(), w.m())),
            Matrix::Dense(_) => (0.0, 1.0 / m.sqrt()),
        };
        Ok(Self { matrix, shift, scale })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.matrix.d()
    }

    pub fn m(&self) -> usize {
        self.matrix.m()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m()];
        self.project_into(x, &mut out)?;
        Ok(out)
    }

    pub fn project_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.d(), x.len())?;
        check_dim(self.m(), out.len())?;
        let s_x = checked_sum(x)?;
        let offset = self.shift * s_x;
        match &self.matrix {
            Matrix::Binary(w) => binary_kernel(w, x, offset, self.scale, out),
            Matrix::Signed(w) => signed_kernel(w, x, self.scale, out),
            Matrix::Dense(w) => dense_kernel(w, x, self.scale, out),
        }
        Ok(())
    }

    /// Projects every sample, in parallel over samples.
    pub fn project_batch(&self, data: &Dataset) -> Result<Dataset> {
        if data.is_empty() {
            return Dataset::new(0, self.m(), Vec::new());
        }
        check_dim(self.d(), data.d())?;
        let m = self.m();
        let mut out = Dataset::new(data.n(), m, vec![0.0; data.n() * m])?;
        out.as_mut_slice()
            .par_chunks_mut(m)
            .zip(data.as_slice().par_chunks(data.d()))
            .try_for_each(|(o, x)| self.project_into(x, o))?;
        Ok(out)
    }
}

pub fn project_batch(projector: &Projector, data: &Dataset) -> Result<Dataset> {
    projector.project_batch(data)
}

fn bernoulli_scale(m: usize, p: f64) -> f64 {
    1.0 / (m as f64 * p * (1.0 - p)).sqrt()
}

fn fixed_scale(d: usize, m: usize, c: usize) -> f64 {
    let (d, m, c) = (d as f64, m as f64, c as f64);
    (d * (d - 1.0) / (m * c * (d - c))).sqrt()
}

fn signed_scale(kind: SignedKind, d: usize, m: usize) -> f64 {
    let (d, m) = (d as f64, m as f64);
    match kind {
        SignedKind::Achlioptas => (3.0 / m).sqrt(),
        SignedKind::Ping => d.sqrt().sqrt() / m.sqrt(),
        SignedKind::Bourgain { c } => (d / (m * c as f64)).sqrt(),
    }
}

/// `Σ xₖ`; a non-finite sum means some entry is non-finite (or the sum
/// overflowed), and the first offending index is reported.
fn checked_sum(x: &[f64]) -> Result<f64> {
    let s: f64 = x.iter().sum();
    if s.is_finite() {
        return Ok(s);
    }
    let index = x.iter().position(|v| !v.is_finite()).unwrap_or(x.len().saturating_sub(1));
    Err(Error::NonFinite { index })
}

#[inline]
fn gather_sum(row: &[u32], x: &[f64]) -> f64 {
    row.iter().map(|&j| x[j as usize]).sum()
}

fn binary_kernel(w: &SparseBinaryMatrix, x: &[f64], offset: f64, scale: f64, out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(w.rows()) {
        *o = (gather_sum(row, x) - offset) * scale;
    }
}

fn signed_kernel(w: &SignedSparseMatrix, x: &[f64], scale: f64, out: &mut [f64]) {
    for (o, (idx, signs)) in out.iter_mut().zip(w.rows()) {
        let acc: f64 = idx.iter().zip(signs).map(|(&j, &s)| f64::from(s) * x[j as usize]).sum();
        *o = acc * scale;
    }
}

/// Four independent accumulators per row so the dot product vectorizes.
fn dense_kernel(w: &DenseMatrix, x: &[f64], scale: f64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let row = w.row(i);
        let mut acc = [0.0f64; 4];
        let (rc, xc) = (row.chunks_exact(4), x.chunks_exact(4));
        let tail: f64 = rc.remainder().iter().zip(xc.remainder()).map(|(a, b)| a * b).sum();
        for (r, v) in rc.zip(xc) {
            for k in 0..4 {
                acc[k] += r[k] * v[k];
            }
        }
        *o = ((acc[0] + acc[1]) + (acc[2] + acc[3]) + tail) * scale;
    }
}

fn expect_binary(w: &SparseBinaryMatrix, x: &[f64]) -> Result<()> {
    check_dim(w.d(), x.len())
}

/// Centered Bernoulli projection `(W − pE)x / √(m·p·(1−p))`.
pub fn project_bernoulli(w: &SparseBinaryMatrix, x: &[f64], p: f64) -> Result<Vec<f64>> {
    if !matches!(w.kind(), BinaryKind::Bernoulli { .. }) {
        return Err(param("project_bernoulli needs a Bernoulli matrix"));
    }
    check_p(p)?;
    expect_binary(w, x)?;
    let s_x = checked_sum(x)?;
    let mut out = vec![0.0; w.m()];
    binary_kernel(w, x, p * s_x, bernoulli_scale(w.m(), p), &mut out);
    Ok(out)
}

/// Centered fixed-sparsity projection `√(d(d−1)/(m·c·(d−c)))·(W − cqE)x`.
pub fn project_fixed(w: &SparseBinaryMatrix, x: &[f64], c: usize) -> Result<Vec<f64>> {
    match w.kind() {
        BinaryKind::FixedSparsity { c: wc } if wc == c => {}
        _ => return Err(param(format!("project_fixed needs a fixed-sparsity matrix with c={c}"))),
    }
    let q = fixed_q(w.d(), c)?;
    expect_binary(w, x)?;
    let s_x = checked_sum(x)?;
    let mut out = vec![0.0; w.m()];
    binary_kernel(w, x, c as f64 * q * s_x, fixed_scale(w.d(), w.m(), c), &mut out);
    Ok(out)
}

/// `W x / √m`.
pub fn project_gaussian(w: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(w.d(), x.len())?;
    checked_sum(x)?;
    let mut out = vec![0.0; w.m()];
    dense_kernel(w, x, 1.0 / (w.m() as f64).sqrt(), &mut out);
    Ok(out)
}

/// `κ·W x` for the signed baselines, `κ` from the module table.
pub fn project_signed(w: &SignedSparseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(w.d(), x.len())?;
    checked_sum(x)?;
    let mut out = vec![0.0; w.m()];
    signed_kernel(w, x, signed_scale(w.kind(), w.d(), w.m()), &mut out);
    Ok(out)
}

/// Uncentered Bernoulli projection `W x / √(m·p·(1−p))`. Its squared
/// distances are biased upward by `(p/(1−p))·(Σₖ (u−v)ₖ)²`.
pub fn naive_project(w: &SparseBinaryMatrix, x: &[f64], p: f64) -> Result<Vec<f64>> {
    if !matches!(w.kind(), BinaryKind::Bernoulli { .. }) {
        return Err(param("naive_project needs a Bernoulli matrix"));
    }
    check_p(p)?;
    expect_binary(w, x)?;
    checked_sum(x)?;
    let mut out = vec![0.0; w.m()];
    binary_kernel(w, x, 0.0, bernoulli_scale(w.m(), p), &mut out);
    Ok(out)
}
