//! Seeded construction of the projection-matrix ensembles.
//!
//! Row `i` of every matrix is drawn from `rng::substream(seed, i)`, so a
//! matrix is a pure function of its parameters and rows can be produced in
//! parallel. Sparse rows are stored as sorted column supports (CSR layout).

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::norms::check_fixed_params;
use crate::rng::{self, NormalPair, Stream};

/// Below this many entries rows are generated on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinaryKind {
    Bernoulli { p: f64 },
    FixedSparsity { c: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignedKind {
    Achlioptas,
    Ping,
    Bourgain { c: usize },
}

/// 0/1 matrix stored by row supports.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBinaryMatrix {
    d: usize,
    m: usize,
    kind: BinaryKind,
    seed: u64,
    indptr: Vec<usize>,
    indices: Vec<u32>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from explicit row supports. Each row must be strictly
    /// increasing and below `d`; a fixed-sparsity row must hold exactly `c`.
    pub fn from_rows(d: usize, kind: BinaryKind, seed: u64, rows: Vec<Vec<u32>>) -> Result<Self> {
        check_shape(d, rows.len())?;
        for row in &rows {
            check_support(d, row)?;
            if let BinaryKind::FixedSparsity { c } = kind {
                if row.len() != c {
                    return Err(param(format!("fixed-sparsity row has {} entries, expected {c}", row.len())));
                }
            }
        }
        let m = rows.len();
        let (indptr, indices) = to_csr(rows);
        Ok(Self { d, m, kind, seed, indptr, indices })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn kind(&self) -> BinaryKind {
        self.kind
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
    pub fn row(&self, i: usize) -> &[u32] {
        &self.indices[self.indptr[i]..self.indptr[i + 1]]
    }
    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.indptr.windows(2).map(|w| &self.indices[w[0]..w[1]])
    }
}

/// {−1, 0, +1} matrix stored by row supports with one sign per entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSparseMatrix {
    d: usize,
    m: usize,
    kind: SignedKind,
    seed: u64,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    signs: Vec<i8>,
}

impl SignedSparseMatrix {
    /// Builds a matrix from explicit `(column, sign)` rows.
    pub fn from_rows(d: usize, kind: SignedKind, seed: u64, rows: Vec<Vec<(u32, i8)>>) -> Result<Self> {
        check_shape(d, rows.len())?;
        for row in &rows {
            let cols: Vec<u32> = row.iter().map(|e| e.0).collect();
            check_support(d, &cols)?;
            if row.iter().any(|e| e.1 != 1 && e.1 != -1) {
                return Err(param("signs must be +1 or -1"));
            }
        }
        let m = rows.len();
        Ok(signed_from_rows(d, m, kind, seed, rows))
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn kind(&self) -> SignedKind {
        self.kind
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
    pub fn row(&self, i: usize) -> (&[u32], &[i8]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.signs[r])
    }
    pub fn rows(&self) -> impl ExactSizeIterator<Item = (&[u32], &[i8])> + '_ {
        (0..self.m).map(move |i| self.row(i))
    }
}

/// Row-major `m × d` matrix of standard normal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    d: usize,
    m: usize,
    seed: u64,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps `m × d` row-major entries.
    pub fn from_row_major(d: usize, m: usize, seed: u64, data: Vec<f64>) -> Result<Self> {
        check_shape(d, m)?;
        if data.len() != m * d {
            return Err(Error::Dimension { expected: m * d, found: data.len() });
        }
        Ok(Self { d, m, seed, data })
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
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn check_shape(d: usize, m: usize) -> Result<()> {
    if d == 0 || m == 0 {
        return Err(param(format!("d and m must be positive, got d={d}, m={m}")));
    }
    if d > u32::MAX as usize {
        return Err(param(format!("d={d} exceeds the supported column range")));
    }
    Ok(())
}

fn check_support(d: usize, row: &[u32]) -> Result<()> {
    if row.windows(2).any(|w| w[0] >= w[1]) || row.last().is_some_and(|&j| j as usize >= d) {
        return Err(param(format!("row support {row:?} must be strictly increasing and below d={d}")));
    }
    Ok(())
}

fn build_rows<T, F>(m: usize, d: usize, seed: u64, row: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream) -> T + Sync,
{
    let gen = |i: usize| row(&mut rng::substream(seed, i as u64));
    if m.saturating_mul(d) >= PARALLEL_THRESHOLD {
        (0..m).into_par_iter().map(gen).collect()
    } else {
        (0..m).map(gen).collect()
    }
}

fn to_csr<T>(rows: Vec<Vec<T>>) -> (Vec<usize>, Vec<T>) {
    let mut indptr = Vec::with_capacity(rows.len() + 1);
    indptr.push(0);
    let mut flat = Vec::with_capacity(rows.iter().map(Vec::len).sum());
    for r in rows {
        flat.extend(r);
        indptr.push(flat.len());
    }
    (indptr, flat)
}

/// Uniform `c`-subset of `{0, …, d−1}`, sorted ascending.
///
/// Floyd's algorithm: for `j = d−c, …, d−1` draw `t` uniform on `[0, j]`;
/// keep `t` if unseen, otherwise keep `j`. Exactly `c` draws and `O(c)`
/// memory; the set is kept sorted so membership is a binary search.
pub fn sample_c_subset(d: usize, c: usize, stream: &mut Stream) -> Result<Vec<u32>> {
    if c == 0 || c > d {
        return Err(param(format!("subset size must satisfy 1 <= c <= d, got c={c}, d={d}")));
    }
    if d > u32::MAX as usize {
        return Err(param(format!("d={d} exceeds the supported column range")));
    }
    Ok(floyd(d, c, stream))
}

fn floyd(d: usize, c: usize, stream: &mut Stream) -> Vec<u32> {
    let mut chosen: Vec<u32> = Vec::with_capacity(c);
    for j in (d - c)..d {
        let t = rng::below(stream, j as u64 + 1) as u32;
        match chosen.binary_search(&t) {
            // j exceeds every earlier pick, so it belongs at the end.
            Ok(_) => chosen.push(j as u32),
            Err(pos) => chosen.insert(pos, t),
        }
    }
    chosen
}

/// Each entry is one independently with probability `p`.
///
/// Row `i` reads one [`rng::unit_f64`] per column, in column order, and
/// keeps column `j` when the draw is below `p`.
pub fn gen_bernoulli(d: usize, m: usize, p: f64, seed: u64) -> Result<SparseBinaryMatrix> {
    check_shape(d, m)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(param(format!("p must lie in (0, 1), got {p}")));
    }
    let rows = build_rows(m, d, seed, |s| (0..d as u32).filter(|_| rng::unit_f64(s) < p).collect::<Vec<u32>>());
    let (indptr, indices) = to_csr(rows);
    Ok(SparseBinaryMatrix { d, m, kind: BinaryKind::Bernoulli { p }, seed, indptr, indices })
}

/// Every row is an independent uniform `c`-subset.
pub fn gen_fixed_sparsity(d: usize, m: usize, c: usize, seed: u64) -> Result<SparseBinaryMatrix> {
    check_shape(d, m)?;
    check_fixed_params(d, c)?;
    let rows = build_rows(m, c, seed, |s| floyd(d, c, s));
    let (indptr, indices) = to_csr(rows);
    Ok(SparseBinaryMatrix { d, m, kind: BinaryKind::FixedSparsity { c }, seed, indptr, indices })
}

/// I.i.d. `N(0, 1)` entries, row by row from the polar method.
pub fn gen_gaussian(d: usize, m: usize, seed: u64) -> Result<DenseMatrix> {
    check_shape(d, m)?;
    let rows = build_rows(m, d, seed, |s| {
        let mut normal = NormalPair::new();
        (0..d).map(|_| normal.sample(s)).collect::<Vec<f64>>()
    });
    Ok(DenseMatrix { d, m, seed, data: rows.concat() })
}

fn ternary_rows(d: usize, m: usize, seed: u64, density: f64) -> Vec<Vec<(u32, i8)>> {
    let half = density / 2.0;
    build_rows(m, d, seed, |s| {
        (0..d as u32)
            .filter_map(|j| {
                let u = rng::unit_f64(s);
                if u < half {
                    Some((j, 1))
                } else if u < density {
                    Some((j, -1))
                } else {
                    None
                }
            })
            .collect()
    })
}

fn signed_from_rows(d: usize, m: usize, kind: SignedKind, seed: u64, rows: Vec<Vec<(u32, i8)>>) -> SignedSparseMatrix {
    let (indptr, flat) = to_csr(rows);
    let (indices, signs) = flat.into_iter().unzip();
    SignedSparseMatrix { d, m, kind, seed, indptr, indices, signs }
}

/// Entries `+1, 0, −1` with probabilities `1/6, 2/3, 1/6`.
pub fn gen_achlioptas(d: usize, m: usize, seed: u64) -> Result<SignedSparseMatrix> {
    check_shape(d, m)?;
    let rows = ternary_rows(d, m, seed, 1.0 / 3.0);
    Ok(signed_from_rows(d, m, SignedKind::Achlioptas, seed, rows))
}

/// Entries `+1, 0, −1` with probabilities `1/(2√d), 1 − 1/√d, 1/(2√d)`.
pub fn gen_ping(d: usize, m: usize, seed: u64) -> Result<SignedSparseMatrix> {
    check_shape(d, m)?;
    let rows = ternary_rows(d, m, seed, ping_density(d));
    Ok(signed_from_rows(d, m, SignedKind::Ping, seed, rows))
}

pub fn ping_density(d: usize) -> f64 {
    1.0 / (d as f64).sqrt()
}

/// Every row has exactly `c` nonzeros at a uniform subset, each an
/// independent random sign. Signs are drawn after the subset, in ascending
/// column order.
pub fn gen_bourgain(d: usize, m: usize, c: usize, seed: u64) -> Result<SignedSparseMatrix> {
    check_shape(d, m)?;
    if c == 0 || c > d {
        return Err(param(format!("c must satisfy 1 <= c <= d, got c={c}, d={d}")));
    }
    let rows = build_rows(m, c, seed, |s| {
        let support = floyd(d, c, s);
        support.into_iter().map(|j| (j, rng::sign(s) as i8)).collect()
    });
    Ok(signed_from_rows(d, m, SignedKind::Bourgain { c }, seed, rows))
}

/// Text export: a header line `kind d m param seed`, then one line per row of
/// ascending 0-based `index` (binary) or `index:sign` (signed) tokens.
/// `param` is `p`, `c`, or `-` when the kind has none.
pub fn export_binary(w: &SparseBinaryMatrix) -> String {
    let (kind, par) = match w.kind {
        BinaryKind::Bernoulli { p } => ("bernoulli", p.to_string()),
        BinaryKind::FixedSparsity { c } => ("fixed", c.to_string()),
    };
    let mut out = format!("{kind} {} {} {par} {}\n", w.d, w.m, w.seed);
    for row in w.rows() {
        let mut first = true;
        for j in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{j}");
        }
        out.push('\n');
    }
    out
}

pub fn export_signed(w: &SignedSparseMatrix) -> String {
    let (kind, par) = match w.kind {
        SignedKind::Achlioptas => ("achlioptas", "-".to_string()),
        SignedKind::Ping => ("ping", "-".to_string()),
        SignedKind::Bourgain { c } => ("bourgain", c.to_string()),
    };
    let mut out = format!("{kind} {} {} {par} {}\n", w.d, w.m, w.seed);
    for (idx, signs) in w.rows() {
        let tokens: Vec<String> = idx.iter().zip(signs).map(|(j, s)| format!("{j}:{s}")).collect();
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}

/// A matrix read back from the text export.
#[derive(Debug, Clone, PartialEq)]
pub enum ExportedMatrix {
    Binary(SparseBinaryMatrix),
    Signed(SignedSparseMatrix),
}

pub fn parse_export(text: &str) -> Result<ExportedMatrix> {
    let bad = |line: usize, msg: String| Error::Parse { path: "<matrix>".into(), line, message: msg };
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    let [kind, d, m, par, seed] = header[..] else {
        return Err(bad(1, "expected header `kind d m param seed`".into()));
    };
    let num = |s: &str| s.parse::<usize>().map_err(|e| bad(1, format!("{s:?}: {e}")));
    let (d, m) = (num(d)?, num(m)?);
    let seed: u64 = seed.parse().map_err(|e| bad(1, format!("seed {seed:?}: {e}")))?;
    let row_lines: Vec<&str> = lines.collect();
    if row_lines.len() != m {
        return Err(bad(1, format!("header declares {m} rows, found {}", row_lines.len())));
    }
    let mut indptr = vec![0usize];
    let mut indices = Vec::new();
    let mut signs = Vec::new();
    let signed = matches!(kind, "achlioptas" | "ping" | "bourgain");
    for (k, line) in row_lines.iter().enumerate() {
        let lineno = k + 2;
        let mut last: Option<u32> = None;
        for tok in line.split_whitespace() {
            let (idx, sign) = match (signed, tok.split_once(':')) {
                (true, Some((i, s))) => (i, Some(s)),
                (false, None) => (tok, None),
                _ => return Err(bad(lineno, format!("malformed token {tok:?}"))),
            };
            let j: u32 = idx.parse().map_err(|e| bad(lineno, format!("{tok:?}: {e}")))?;
            if j as usize >= d || last.is_some_and(|l| j <= l) {
                return Err(bad(lineno, format!("index {j} out of order or range")));
            }
            last = Some(j);
            indices.push(j);
            if let Some(s) = sign {
                match s {
                    "1" => signs.push(1),
                    "-1" => signs.push(-1),
                    _ => return Err(bad(lineno, format!("bad sign in {tok:?}"))),
                }
            }
        }
        indptr.push(indices.len());
    }
    let c_param = || num(par);
    Ok(match kind {
        "bernoulli" => {
            let p: f64 = par.parse().map_err(|e| bad(1, format!("p {par:?}: {e}")))?;
            ExportedMatrix::Binary(SparseBinaryMatrix {
                d,
                m,
                kind: BinaryKind::Bernoulli { p },
                seed,
                indptr,
                indices,
            })
        }
        "fixed" => ExportedMatrix::Binary(SparseBinaryMatrix {
            d,
            m,
            kind: BinaryKind::FixedSparsity { c: c_param()? },
            seed,
            indptr,
            indices,
        }),
        "achlioptas" => ExportedMatrix::Signed(SignedSparseMatrix {
            d,
            m,
            kind: SignedKind::Achlioptas,
            seed,
            indptr,
            indices,
            signs,
        }),
        "ping" => {
            ExportedMatrix::Signed(SignedSparseMatrix { d, m, kind: SignedKind::Ping, seed, indptr, indices, signs })
        }
        "bourgain" => ExportedMatrix::Signed(SignedSparseMatrix {
            d,
            m,
            kind: SignedKind::Bourgain { c: c_param()? },
            seed,
            indptr,
            indices,
            signs,
        }),
        other => return Err(bad(1, format!("unknown matrix kind {other:?}"))),
    })
}
