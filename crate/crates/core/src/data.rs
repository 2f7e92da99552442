//! Data files and synthetic stand-ins for real corpora.
//!
//! Dense files hold one sample per line as comma-separated decimals. Sparse
//! files hold one sample per line as space-separated `index:value` tokens with
//! 0-based, strictly ascending indices; a blank line is the zero vector.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{self, NormalPair};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_dense(path: &Path) -> Result<Dataset> {
    let data = parse_dense(&read(path)?, path)?;
    if data.is_empty() {
        log::warn!("{}: no samples", path.display());
    }
    Ok(data)
}

pub fn parse_dense(text: &str, path: &Path) -> Result<Dataset> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut values = Vec::new();
    let mut d: Option<usize> = None;
    let mut n = 0;
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = values.len();
        for tok in line.split(',') {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| err(lineno, format!("cannot parse {tok:?} as a number")))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("non-finite value {tok:?}")));
            }
            values.push(v);
        }
        let width = values.len() - before;
        match d {
            None => d = Some(width),
            Some(d) if d != width => {
                return Err(err(lineno, format!("expected {d} values, found {width}")));
            }
            _ => {}
        }
        n += 1;
    }
    Dataset::new(n, d.unwrap_or(0), values)
}

pub fn load_sparse(path: &Path, d: usize) -> Result<Dataset> {
    let data = parse_sparse(&read(path)?, d, path)?;
    if data.is_empty() {
        log::warn!("{}: no samples", path.display());
    }
    Ok(data)
}

pub fn parse_sparse(text: &str, d: usize, path: &Path) -> Result<Dataset> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
    let mut values = Vec::new();
    let mut n = 0;
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let start = values.len();
        values.resize(start + d, 0.0);
        let mut last: Option<usize> = None;
        for tok in line.split_whitespace() {
            let (i, v) =
                tok.split_once(':').ok_or_else(|| err(lineno, format!("expected index:value, found {tok:?}")))?;
            let i: usize = i.parse().map_err(|_| err(lineno, format!("bad index in {tok:?}")))?;
            let v: f64 = v.parse().map_err(|_| err(lineno, format!("bad value in {tok:?}")))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("non-finite value in {tok:?}")));
            }
            if i >= d {
                return Err(err(lineno, format!("index {i} out of range for d={d}")));
            }
            if last.is_some_and(|l| i <= l) {
                return Err(err(lineno, format!("index {i} is not strictly ascending")));
            }
            last = Some(i);
            values[start + i] = v;
        }
        n += 1;
    }
    Dataset::new(n, d, values)
}

/// Shortest round-trip representation of every value.
pub fn to_dense_text(data: &Dataset) -> String {
    let mut out = String::new();
    for row in data.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn to_sparse_text(data: &Dataset) -> String {
    let mut out = String::new();
    for row in data.rows() {
        let mut first = true;
        for (j, v) in row.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{j}:{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntheticKind {
    /// I.i.d. standard normal coordinates.
    DenseGaussian,
    /// Each coordinate nonzero with probability `density`, value uniform on `(0, 1]`.
    SparseNonnegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub d: usize,
    pub density: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Config(format!("synthetic data needs n, d >= 1, got n={}, d={}", self.n, self.d)));
        }
        if self.kind == SyntheticKind::SparseNonnegative
            && !(self.density > 0.0 && self.density <= 1.0 && self.density * self.d as f64 >= 1.0)
        {
            return Err(Error::Config(format!(
                "density must lie in (0, 1] with density*d >= 1, got {} at d={}",
                self.density, self.d
            )));
        }
        Ok(())
    }
}

/// Parses `kind,n,d[,density]`, kind being `dense-gaussian` or `sparse-nonnegative`.
/// The seed is supplied separately.
impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected kind,n,d[,density], got {s:?}"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad());
        }
        let kind = match parts[0] {
            "dense-gaussian" => SyntheticKind::DenseGaussian,
            "sparse-nonnegative" => SyntheticKind::SparseNonnegative,
            other => return Err(Error::Config(format!("unknown synthetic kind {other:?}"))),
        };
        let n = parts[1].parse().map_err(|_| bad())?;
        let d = parts[2].parse().map_err(|_| bad())?;
        let density = match parts.get(3) {
            Some(v) => v.parse().map_err(|_| bad())?,
            None => 1.0,
        };
        Ok(SyntheticSpec { kind, n, d, density, seed: 0 })
    }
}

/// Sample `i` is drawn from `rng::substream(seed, i)`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut values = Vec::with_capacity(spec.n * spec.d);
    for i in 0..spec.n {
        let mut s = rng::substream(spec.seed, i as u64);
        match spec.kind {
            SyntheticKind::DenseGaussian => {
                let mut normal = NormalPair::new();
                values.extend((0..spec.d).map(|_| normal.sample(&mut s)));
            }
            SyntheticKind::SparseNonnegative => {
                for _ in 0..spec.d {
                    let v = if rng::unit_f64(&mut s) < spec.density { 1.0 - rng::unit_f64(&mut s) } else { 0.0 };
                    values.push(v);
                }
            }
        }
    }
    Dataset::new(spec.n, spec.d, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.csv")
    }

    #[test]
    fn dense_two_lines() {
        let ds = parse_dense("1,2\n3,4\n", p()).unwrap();
        assert_eq!(ds.to_rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn dense_empty_file() {
        let ds = parse_dense("", p()).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn dense_parse_error_names_line() {
        match parse_dense("1,x\n", p()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse_dense("1,2\n3\n", p()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sparse_line() {
        let ds = parse_sparse("0:1.5 3:2.0\n\n", 4, p()).unwrap();
        assert_eq!(ds.to_rows(), vec![vec![1.5, 0.0, 0.0, 2.0], vec![0.0; 4]]);
    }

    #[test]
    fn sparse_errors() {
        assert!(matches!(parse_sparse("3:1 1:2\n", 4, p()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_sparse("0:1\n4:1\n", 4, p()), Err(Error::Parse { line: 2, .. })));
        assert!(parse_sparse("0-1\n", 4, p()).is_err());
        assert!(parse_sparse("1:1 1:2\n", 4, p()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let spec = SyntheticSpec { kind: SyntheticKind::SparseNonnegative, n: 20, d: 30, density: 0.2, seed: 4 };
        let ds = gen_synthetic(&spec).unwrap();
        assert_eq!(parse_sparse(&to_sparse_text(&ds), 30, p()).unwrap(), ds);
        assert_eq!(parse_dense(&to_dense_text(&ds), p()).unwrap(), ds);
    }

    #[test]
    fn synthetic_density() {
        let spec = SyntheticSpec { kind: SyntheticKind::SparseNonnegative, n: 1000, d: 1000, density: 0.03, seed: 11 };
        let ds = gen_synthetic(&spec).unwrap();
        let nnz = ds.as_slice().iter().filter(|&&v| v != 0.0).count() as f64;
        let sigma = (1e6f64 * 0.03 * 0.97).sqrt();
        assert!((nnz - 3e4).abs() <= 3.0 * sigma, "nnz {nnz}");
        assert!(ds.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(gen_synthetic(&spec).unwrap(), ds);
    }

    #[test]
    fn synthetic_full_density_is_dense() {
        let spec = SyntheticSpec { kind: SyntheticKind::SparseNonnegative, n: 10, d: 50, density: 1.0, seed: 1 };
        assert!(gen_synthetic(&spec).unwrap().as_slice().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn synthetic_spec_parsing() {
        let s: SyntheticSpec = "sparse-nonnegative,200,300,0.03".parse().unwrap();
        assert_eq!((s.n, s.d, s.density), (200, 300, 0.03));
        let s: SyntheticSpec = "dense-gaussian,5,7".parse().unwrap();
        assert_eq!(s.kind, SyntheticKind::DenseGaussian);
        assert!("blob,1,2".parse::<SyntheticSpec>().is_err());
        let bad = SyntheticSpec { kind: SyntheticKind::SparseNonnegative, n: 1, d: 10, density: 0.05, seed: 0 };
        assert!(bad.validate().is_err());
    }
}
