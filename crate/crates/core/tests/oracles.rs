//! Closed-form variances of the baseline models and of the binary models at
//! larger `m`, against exhaustive enumeration of a single row.

mod common;

use common::{
    oracle_bernoulli, oracle_bourgain, oracle_fixed, oracle_ternary, random_vector, rel_err, sq_norm, test_rng,
};
use sbproj::genmat::ping_density;
use sbproj::moments::{
    fourth_moment_bound_fixed, fourth_moment_fixed, model_variance, naive_bias, var_achlioptas, var_bernoulli,
    var_bourgain, var_fixed, var_gaussian, var_ping,
};
use sbproj::ModelKind;

#[test]
fn ternary_baselines_match_enumeration() {
    let mut rng = test_rng(100);
    for d in 2..=7 {
        for _ in 0..20 {
            let x = random_vector(&mut rng, d);
            let (mean, var) = oracle_ternary(&x, 1.0 / 3.0);
            assert!(rel_err(mean, sq_norm(&x)) < 1e-12);
            assert!(rel_err(var_achlioptas(&x, 1).unwrap(), var) < 1e-10, "achlioptas d={d}");
            let (mean, var) = oracle_ternary(&x, ping_density(d));
            assert!(rel_err(mean, sq_norm(&x)) < 1e-12);
            assert!(rel_err(var_ping(&x, 1).unwrap(), var) < 1e-10, "ping d={d}");
        }
    }
}

#[test]
fn bourgain_matches_enumeration() {
    let mut rng = test_rng(101);
    for d in 2..=9 {
        for c in 1..=d {
            let x = random_vector(&mut rng, d);
            let (mean, var) = oracle_bourgain(&x, c);
            assert!(rel_err(mean, sq_norm(&x)) < 1e-12);
            let got = var_bourgain(&x, 1, c).unwrap();
            let scale = sq_norm(&x).powi(2);
            assert!((got - var).abs() <= 1e-10 * scale, "d={d} c={c}: {got} vs {var}");
        }
    }
}

#[test]
fn gaussian_row_variance() {
    // E(g·x)⁴ = 3‖x‖⁴ for standard normal g, so Var (g·x)² = 2‖x‖⁴.
    let x = random_vector(&mut test_rng(102), 9);
    assert!(rel_err(var_gaussian(&x, 1).unwrap(), 2.0 * sq_norm(&x).powi(2)) < 1e-14);
}

#[test]
fn rows_are_independent_so_variance_divides_by_m() {
    let mut rng = test_rng(103);
    for d in [5, 8, 11] {
        let x = random_vector(&mut rng, d);
        let (_, vb) = oracle_bernoulli(&x, 0.3);
        let (_, vf) = oracle_fixed(&x, 2);
        for m in [1, 3, 17] {
            assert!(rel_err(var_bernoulli(&x, m, 0.3).unwrap(), vb / m as f64) < 1e-10);
            assert!(rel_err(var_fixed(&x, m, d, 2).unwrap(), vf / m as f64) < 1e-9);
        }
    }
}

#[test]
fn fixed_fourth_moment_bound_holds() {
    let mut rng = test_rng(104);
    for d in 10..=16 {
        for c in 5..=d / 2 {
            let x = random_vector(&mut rng, d);
            let df = d as f64;
            let cf = c as f64;
            // Raw fourth moment of one row before scaling.
            let scale = df * (df - 1.0) / (cf * (df - cf));
            let (mean, var) = oracle_fixed(&x, c);
            let raw4 = (var + mean * mean) / (scale * scale);
            let lib = fourth_moment_fixed(&x, c).unwrap();
            assert!(rel_err(lib, raw4) < 1e-9, "d={d} c={c}: {lib} vs {raw4}");
            assert!(lib <= fourth_moment_bound_fixed(&x, d, c).unwrap() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn naive_bias_formula() {
    let u = [1.0, 2.0, 3.0, 0.0];
    let v = [0.0, 1.0, 3.0, 0.0];
    assert!(rel_err(naive_bias(&u, &v, 0.25).unwrap(), 4.0 / 3.0) < 1e-15);
    assert!(rel_err(naive_bias(&u, &v, 0.5).unwrap(), 4.0) < 1e-15);
    let x = [1.0, -1.0, 2.0, -2.0];
    assert_eq!(naive_bias(&x, &[0.0; 4], 0.5).unwrap(), 0.0);
}

#[test]
fn dispatch_agrees_with_direct_calls() {
    let x = random_vector(&mut test_rng(105), 12);
    assert_eq!(model_variance(ModelKind::Bernoulli { p: 0.2 }, &x, 3).unwrap(), var_bernoulli(&x, 3, 0.2).unwrap());
    assert_eq!(model_variance(ModelKind::FixedSparsity { c: 4 }, &x, 3).unwrap(), var_fixed(&x, 3, 12, 4).unwrap());
    assert_eq!(model_variance(ModelKind::Gaussian, &x, 3).unwrap(), var_gaussian(&x, 3).unwrap());
    assert_eq!(model_variance(ModelKind::Ping, &x, 3).unwrap(), var_ping(&x, 3).unwrap());
    assert_eq!(model_variance(ModelKind::Bourgain { c: 4 }, &x, 3).unwrap(), var_bourgain(&x, 3, 4).unwrap());
}
