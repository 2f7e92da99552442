//! Reference computations for the integration tests, written without
//! reference to the library internals.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform on `[-1, 1)`.
pub fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

/// Mean and variance of a discrete distribution given as `(probability, value)`.
pub fn discrete_moments(outcomes: &[(f64, f64)]) -> (f64, f64) {
    let mean: f64 = outcomes.iter().map(|(w, v)| w * v).sum();
    let var = outcomes.iter().map(|(w, v)| w * (v - mean) * (v - mean)).sum();
    (mean, var)
}

/// One row of the centered Bernoulli model, every support enumerated.
pub fn oracle_bernoulli(x: &[f64], p: f64) -> (f64, f64) {
    let d = x.len();
    let total: f64 = x.iter().sum();
    let mut outcomes = Vec::with_capacity(1 << d);
    for mask in 0u64..(1u64 << d) {
        let mut prob = 1.0;
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            if mask & (1 << j) != 0 {
                prob *= p;
                acc += xj;
            } else {
                prob *= 1.0 - p;
            }
        }
        let eta = (acc - p * total) / (p * (1.0 - p)).sqrt();
        outcomes.push((prob, eta * eta));
    }
    discrete_moments(&outcomes)
}

/// One row of the centered fixed-sparsity model, every `c`-subset enumerated.
pub fn oracle_fixed(x: &[f64], c: usize) -> (f64, f64) {
    let d = x.len();
    let (df, cf) = (d as f64, c as f64);
    let q = (1.0 + ((df - cf) / (cf * (df - 1.0))).sqrt()) / df;
    let total: f64 = x.iter().sum();
    let scale = (df * (df - 1.0) / (cf * (df - cf))).sqrt();
    let subsets: Vec<u64> = (0u64..(1u64 << d)).filter(|m| m.count_ones() as usize == c).collect();
    let w = 1.0 / subsets.len() as f64;
    let outcomes: Vec<(f64, f64)> = subsets
        .iter()
        .map(|mask| {
            let acc: f64 = (0..d).filter(|j| mask & (1 << j) != 0).map(|j| x[j]).sum();
            let eta = scale * (acc - cf * q * total);
            (w, eta * eta)
        })
        .collect();
    discrete_moments(&outcomes)
}

/// One row with i.i.d. entries `±1` w.p. `ρ/2` each and `0` otherwise,
/// scaled by `1/√ρ`; all `3^d` outcomes enumerated.
pub fn oracle_ternary(x: &[f64], density: f64) -> (f64, f64) {
    let d = x.len();
    let mut outcomes = Vec::new();
    let count = 3usize.pow(d as u32);
    for code in 0..count {
        let (mut k, mut prob, mut acc) = (code, 1.0, 0.0);
        for xj in x {
            match k % 3 {
                0 => prob *= 1.0 - density,
                1 => {
                    prob *= density / 2.0;
                    acc += xj;
                }
                _ => {
                    prob *= density / 2.0;
                    acc -= xj;
                }
            }
            k /= 3;
        }
        let eta2 = acc * acc / density;
        outcomes.push((prob, eta2));
    }
    discrete_moments(&outcomes)
}

/// One Bourgain row: uniform `c`-subset with independent signs, scaled by `√(d/c)`.
pub fn oracle_bourgain(x: &[f64], c: usize) -> (f64, f64) {
    let d = x.len();
    let subsets: Vec<Vec<usize>> = (0u64..(1u64 << d))
        .filter(|m| m.count_ones() as usize == c)
        .map(|m| (0..d).filter(|j| m & (1 << j) != 0).collect())
        .collect();
    let w = 1.0 / (subsets.len() as f64 * (1u64 << c) as f64);
    let mut outcomes = Vec::new();
    for s in &subsets {
        for signs in 0u64..(1u64 << c) {
            let acc: f64 = s.iter().enumerate().map(|(k, &j)| if signs & (1 << k) != 0 { x[j] } else { -x[j] }).sum();
            outcomes.push((w, d as f64 / c as f64 * acc * acc));
        }
    }
    discrete_moments(&outcomes)
}

/// Double-double arithmetic (about 106 significant bits), enough to decide
/// the ceiling of the projection-dimension formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_u64(n: u64) -> Dd {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        quick_two_sum(hi, lo)
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn mul_f(self, f: f64) -> Dd {
        self.mul(Dd::from(f))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f(q2));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    pub fn exp(self) -> Dd {
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self.sub(Dd::LN2.mul_f(k));
        let r = r.mul_f(1.0 / 1024.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..30 {
            term = term.mul(r).div(Dd::from(i as f64));
            sum = sum.add(term);
        }
        for _ in 0..10 {
            sum = sum.mul(sum);
        }
        let scale = 2f64.powi(k as i32);
        Dd { hi: sum.hi * scale, lo: sum.lo * scale }
    }

    /// Newton iteration on `exp(y) = self`.
    pub fn ln(self) -> Dd {
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..3 {
            y = y.add(self.mul(y.neg().exp())).sub(Dd::ONE);
        }
        y
    }

    /// Smallest integer `≥ self`.
    pub fn ceil(self) -> u64 {
        let h = self.hi.ceil();
        let c = if h == self.hi {
            if self.lo > 0.0 {
                h + 1.0
            } else {
                h
            }
        } else {
            h
        };
        c as u64
    }
}
