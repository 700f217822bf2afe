use std::f64::consts::{PI, SQRT_2};

use lissajous_interp::cheb::ChebSeries2D;
use lissajous_interp::interp::{fundamental_polynomial, interpolate, interpolate_values};
use lissajous_interp::measure::{discrete_lp_norm, lp_weighted_norm_2d_fn, random_series, NormSpec};
use lissajous_interp::nodes::{node_set_from_grid, spectral_set, DegreePair};
use lissajous_interp::testbed::{self, SampledFunction};
use lissajous_interp::variation::{
    d_tilde, hardy_krause, modulus_estimate, total_variation_1d, Axis, DerivativePath, GridFunction2D,
    Partition1D, SmoothnessQuery,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(m: usize, n: usize) -> DegreePair {
    DegreePair::new(m, n).unwrap()
}

/// `Ĉ_k(x)` through the trigonometric definition.
fn c_hat(k: usize, x: f64) -> f64 {
    let c = (k as f64 * x.acos()).cos();
    if k == 0 {
        c
    } else {
        SQRT_2 * c
    }
}

#[test]
fn random_series_match_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let mut terms = std::collections::BTreeMap::new();
        while terms.len() < 20 {
            let key = (rng.random_range(0..12usize), rng.random_range(0..12usize));
            terms.insert(key, rng.random_range(-1.0..1.0));
        }
        let s = ChebSeries2D::from_terms(terms.clone()).unwrap();
        for _ in 0..5 {
            let (x, y) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            let direct: f64 = terms.iter().map(|(&(i, j), c)| c * c_hat(i, x) * c_hat(j, y)).sum();
            assert!((s.eval(x, y).unwrap() - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn cubic_matches_dense_solve() {
    let d = pair(3, 2);
    let nodes = node_set_from_grid(d);
    let gamma = spectral_set(d);
    assert!(!gamma.contains(3, 0));
    let k = nodes.len();
    let a = DMatrix::from_fn(k, k, |r, c| {
        let nd = nodes.nodes()[r];
        let (i, j) = gamma.exponents()[c];
        c_hat(i, nd.x) * c_hat(j, nd.y)
    });
    let b = DVector::from_iterator(k, nodes.nodes().iter().map(|nd| nd.x.powi(3)));
    let sol = a.lu().solve(&b).expect("the interpolation problem is unisolvent");
    let ip = interpolate(|x, _| x * x * x, d).unwrap();
    for (c, &(i, j)) in gamma.exponents().iter().enumerate() {
        assert!((ip.series().coeff(i, j) - sol[c]).abs() < 1e-12, "({i},{j})");
    }
    // x³ is not reproduced
    assert!((ip.evaluate(0.5, 0.3).unwrap() - 0.125).abs() > 1e-3);
}

#[test]
fn member_reproduced_on_grid() {
    let d = pair(5, 4);
    let nodes = node_set_from_grid(d);
    for p in random_series(d, 10, 9) {
        let values = nodes.nodes().iter().map(|nd| p.eval(nd.x, nd.y).unwrap()).collect();
        let ip = interpolate_values(d, values).unwrap();
        for a in 0..33 {
            for b in 0..33 {
                let (x, y) = (-1.0 + a as f64 / 16.0, -1.0 + b as f64 / 16.0);
                assert!((ip.evaluate(x, y).unwrap() - p.eval(x, y).unwrap()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn fundamental_form_equals_transform() {
    let f = |x: f64, y: f64| (2.0 * x - y).sin() + x * y * y;
    for (m, n) in [(3, 2), (5, 4), (7, 5)] {
        let d = pair(m, n);
        let ip = interpolate(f, d).unwrap();
        let gamma = spectral_set(d);
        let mut sum = vec![0.0; gamma.len()];
        for nd in node_set_from_grid(d).nodes() {
            let ell = fundamental_polynomial(d, nd).unwrap();
            for (s, c) in sum.iter_mut().zip(ell.coeffs()) {
                *s += f(nd.x, nd.y) * c;
            }
        }
        for (a, b) in sum.iter().zip(ip.series().coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn basis_norms_are_pi() {
    let spec = NormSpec::smooth(2.0).with_points(128);
    for i in 0..=8 {
        for j in 0..=8 {
            if (i, j) == (0, 0) {
                continue;
            }
            let f = move |x: f64, y: f64| c_hat(i, x) * c_hat(j, y);
            let v = lp_weighted_norm_2d_fn(&f, &[], &[], &spec).unwrap();
            assert!((v / PI - 1.0).abs() < 1e-8, "({i},{j}) -> {v}");
        }
    }
}

#[test]
fn linear_function_modulus() {
    let f = SampledFunction::new("x", |x, _| x);
    let mut q = SmoothnessQuery::new(1, 0.0, 0.01, 2.0);
    q.x_grid_size = 256;
    q.h_grid_size = 16;
    let sweep = modulus_estimate(&f, &q, Axis::X).unwrap();
    let mut at_t = q;
    at_t.h_grid_size = 1;
    let single = modulus_estimate(&f, &at_t, Axis::X).unwrap();
    assert!((sweep - single).abs() < 1e-8);
    // Δ = tφ(x) wherever x ± tφ(x)/2 stays in J, so the value is close to t·‖φ‖
    let closed = 0.01 * (PI * 4.0 / 3.0).sqrt();
    assert!((single - closed).abs() / closed < 1e-2, "{single} vs {closed}");
}

#[test]
fn d_tilde_paths_agree() {
    let interior: Vec<f64> = (1..=33).map(|k| -1.0 + 2.0 * k as f64 / 34.0).collect();
    for f in testbed::corpus().into_iter().filter(|f| f.trig_derivatives.is_some()) {
        for (r, s) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
            let (Ok(a), Ok(b)) = (
                d_tilde(&f, r, s, DerivativePath::Analytic),
                d_tilde(&f, r, s, DerivativePath::Numeric),
            ) else {
                continue;
            };
            for &x in &interior {
                for &y in &interior {
                    let gap = (a.eval(x, y) - b.eval(x, y)).abs();
                    assert!(gap <= 1e-5, "{} ({r},{s}) at ({x},{y}): {gap}", f.id);
                }
            }
        }
    }
}

#[test]
fn hardy_krause_adds_over_disjoint_steps() {
    let corners = [(-0.61, -0.53), (-0.2, 0.11), (0.13, -0.37), (0.41, 0.52), (0.77, 0.87)];
    let weights = [1.0, -2.0, 0.5, 3.0, -0.25];
    let xs = Partition1D::uniform(-1.0, 1.0, 41).unwrap();
    let ys = Partition1D::uniform(-1.0, 1.0, 41).unwrap();
    let term = |k: usize| {
        let (a, b) = corners[k];
        let w = weights[k];
        move |x: f64, y: f64| if x >= a && y >= b { w } else { 0.0 }
    };
    let total = GridFunction2D::sample(xs.clone(), ys.clone(), |x, y| (0..5).map(|k| term(k)(x, y)).sum()).unwrap();
    let parts: f64 = (0..5)
        .map(|k| hardy_krause(&GridFunction2D::sample(xs.clone(), ys.clone(), term(k)).unwrap()).unwrap())
        .sum();
    assert!((hardy_krause(&total).unwrap() - parts).abs() < 1e-12);
    assert!((parts - weights.iter().map(|w: &f64| w.abs()).sum::<f64>()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn refinement_never_decreases_variation(mut pts in prop::collection::vec(-1.0f64..1.0, 3..40), extra in prop::collection::vec(-1.0f64..1.0, 1..20)) {
        let f = |x: f64| (5.0 * x).sin() + if x > 0.2 { 1.0 } else { 0.0 };
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        prop_assume!(pts.len() >= 2);
        let coarse = Partition1D::new(pts.clone()).unwrap();
        let mut fine = pts;
        fine.extend(extra);
        fine.sort_by(f64::total_cmp);
        fine.dedup();
        let fine = Partition1D::new(fine).unwrap();
        let v = |p: &Partition1D| total_variation_1d(p, &p.points().iter().map(|&x| f(x)).collect::<Vec<_>>()).unwrap();
        prop_assert!(v(&fine) >= v(&coarse) - 1e-12);
    }

    #[test]
    fn interpolation_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0usize..3) {
        let d = [pair(3, 2), pair(5, 4), pair(7, 5)][k];
        let f = |x: f64, y: f64| (x * 3.0).exp() - y;
        let g = |x: f64, y: f64| (x + y).abs();
        let combo = interpolate(|x, y| a * f(x, y) + b * g(x, y), d).unwrap();
        let (lf, lg) = (interpolate(f, d).unwrap(), interpolate(g, d).unwrap());
        for ((c, u), v) in combo.series().coeffs().iter().zip(lf.series().coeffs()).zip(lg.series().coeffs()) {
            prop_assert!((c - (a * u + b * v)).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_norm_is_a_norm(u in prop::collection::vec(-5.0f64..5.0, 1..30), s in -4.0f64..4.0, p in 1.0f64..6.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = u.iter().map(|_| rng.random_range(-5.0..5.0)).collect();
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = u.iter().map(|a| s * a).collect();
        let n = |w: &[f64]| discrete_lp_norm(w, p).unwrap();
        prop_assert!(n(&sum) <= n(&u) + n(&v) + 1e-12);
        prop_assert!((n(&scaled) - s.abs() * n(&u)).abs() <= 1e-12 * (1.0 + n(&scaled)));
    }

    #[test]
    fn weighted_norm_is_a_norm(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4), s in -3.0f64..3.0, p in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let spec = NormSpec { refinement_tolerance: 1e-3, ..NormSpec::smooth(p).with_points(64) };
        let poly = |c: Vec<f64>| move |x: f64, y: f64| c[0] + c[1] * x + c[2] * y * y + c[3] * x * y;
        let (f, g) = (poly(a), poly(b));
        let sum = |x: f64, y: f64| f(x, y) + g(x, y);
        let scaled = |x: f64, y: f64| s * f(x, y);
        let n = |h: &(dyn Fn(f64, f64) -> f64 + Sync)| lp_weighted_norm_2d_fn(h, &[], &[], &spec).unwrap();
        let (nf, ng) = (n(&f), n(&g));
        prop_assert!(n(&sum) <= (nf + ng) * (1.0 + 1e-6) + 1e-12);
        prop_assert!((n(&scaled) - s.abs() * nf).abs() <= 1e-9 * (1.0 + nf));
    }
}
