//! Special functions, limit formulas, samplers and estimators.

use proptest::prelude::*;
use rug::Rational;
use xorsat2::enumeration::{exact_solvability, ExactModel};
use xorsat2::montecarlo::{conditional_solvability, estimate_solvability, merge, Method};
use xorsat2::sampler::{critical_p, labels_with, sample_gnm, sample_gnp, sample_labels};
use xorsat2::special::{a_contour, a_series, default_contour_abscissa, reciprocal_gamma};
use xorsat2::theory::{
    bad_cycles_partial_sum, c_lambda, expected_bad_cycles, subcritical_graph, subcritical_multigraph,
};
use xorsat2::{ModelKind, ModelSpec, SeedSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_and_contour_agree(y in 0.1f64..10.0, mu in -5.0f64..5.0) {
        let s = a_series(y, mu).unwrap().value;
        let c = a_contour(y, mu, default_contour_abscissa(y, mu)).unwrap().value;
        prop_assert!((s - c).abs() <= 1e-8 * s.abs().max(1e-300), "{} vs {}", s, c);
    }

    #[test]
    fn contour_independent_of_line(y in 0.5f64..8.0, mu in -3.0f64..3.0, a in 0.5f64..3.0) {
        // admissible lines only: the Gaussian width mu/2 + a must stay positive
        prop_assume!(mu / 2.0 + a > 0.25);
        let base = a_contour(y, mu, default_contour_abscissa(y, mu)).unwrap().value;
        let moved = a_contour(y, mu, a).unwrap().value;
        prop_assert!((moved - base).abs() <= 1e-9 * base.abs(), "{} vs {}", moved, base);
    }

    #[test]
    fn a_positive_for_large_y(y in 2.0f64..10.0, mu in -10.0f64..10.0) {
        prop_assert!(a_series(y, mu).unwrap().value > 0.0);
    }

    #[test]
    fn bad_cycle_identity(gamma in 0.0f64..0.95, phat in 0.0f64..=1.0) {
        let bad = expected_bad_cycles(gamma, phat).unwrap();
        prop_assert!(bad >= -1e-15);
        let lhs = (-bad).exp();
        let rhs = subcritical_graph(gamma, phat).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        let partial = bad_cycles_partial_sum(gamma, phat, 4000).unwrap();
        prop_assert!((partial - bad).abs() <= 1e-12);
        prop_assert!(subcritical_multigraph(gamma, phat).unwrap() <= 1.0);
    }

    #[test]
    fn half_bias_closed_form(gamma in 0.0f64..0.99) {
        let want = (1.0 - gamma).powf(0.25) * (gamma / 4.0 + gamma * gamma / 8.0).exp();
        prop_assert!((subcritical_graph(gamma, 0.5).unwrap() - want).abs() <= 1e-14 * want);
    }

    #[test]
    fn identical_seeds_give_identical_draws(master in any::<u64>(), stream in any::<u64>(), n in 2usize..300) {
        let seed = SeedSpec::new(master, stream);
        let p = (3.0 / n as f64).min(1.0);
        let g = sample_gnp(n, p, seed);
        prop_assert_eq!(&g, &sample_gnp(n, p, seed));
        let m = (n as u64).min(n as u64 * (n as u64 - 1) / 2);
        prop_assert_eq!(sample_gnm(n, m, seed), sample_gnm(n, m, seed));
        prop_assert_eq!(sample_labels(g.edge_count(), 0.3, seed), sample_labels(g.edge_count(), 0.3, seed));
    }

    #[test]
    fn merge_is_order_independent(split in 1u64..5, seed in any::<u64>()) {
        let spec = ModelSpec::new(ModelKind::Gnp, 300, 0.0, 0.5).unwrap();
        let parts: Vec<_> = (0..split)
            .map(|k| estimate_solvability(&spec, 1500, SeedSpec::new(seed, 10 * k), Method::RaoBlackwell).unwrap())
            .collect();
        let forward = merge(&parts).unwrap();
        let mut rev = parts.clone();
        rev.reverse();
        prop_assert_eq!(&forward, &merge(&rev).unwrap());
        prop_assert_eq!(forward.samples, 1500 * split);
        if split >= 2 {
            let nested = merge(&[merge(&parts[..1]).unwrap(), merge(&parts[1..]).unwrap()]).unwrap();
            prop_assert_eq!(&forward, &nested);
        }
    }
}

#[test]
fn c_lambda_positive_and_continuous() {
    let grid: Vec<f64> = (0..=64).map(|k| -10.0 + 0.25 * k as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&l| c_lambda(l).unwrap()).collect();
    assert!(values.iter().all(|&c| c > 0.0 && c.is_finite()));
    for (w, l) in values.windows(2).zip(&grid) {
        // decreasing on the grid, and the midpoint sits between its neighbours
        assert!(w[1] < w[0], "not decreasing at lambda={l}");
        let mid = c_lambda(l + 0.125).unwrap();
        assert!(mid <= w[0].max(w[1]) * 1.001 && mid >= w[0].min(w[1]) * 0.999, "lambda={l}");
    }
}

#[test]
fn reciprocal_gamma_recurrence() {
    for k in 0..200 {
        let x = -7.3 + 0.091 * k as f64;
        let lhs = reciprocal_gamma(x);
        let rhs = x * reciprocal_gamma(x + 1.0);
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300) + 1e-300, "x={x}");
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

#[test]
fn gnp_edge_count_is_binomial() {
    let n = 10_000usize;
    let p = 1.0 / n as f64;
    let pairs = (n * (n - 1) / 2) as f64;
    let counts: Vec<f64> =
        (0..2000).map(|k| sample_gnp(n, p, SeedSpec::new(5, k)).edge_count() as f64).collect();
    let (m, sd) = mean_sd(&counts);
    let mean = pairs * p;
    let var = pairs * p * (1.0 - p);
    assert!((m - mean).abs() <= 4.0 * (var / 2000.0).sqrt(), "mean {m} vs {mean}");
    // sample variance of 2000 draws lies within about 10% of the true one
    assert!((sd * sd / var - 1.0).abs() < 0.15, "variance {} vs {var}", sd * sd);
}

#[test]
fn gnm_is_uniform_on_small_graphs() {
    let draws = 100_000u64;
    let mut freq = std::collections::HashMap::new();
    let mut rng = SeedSpec::new(9, 0).rng();
    for _ in 0..draws {
        let g = xorsat2::sampler::gnm_with(&mut rng, 5, 2);
        *freq.entry(g.edges().to_vec()).or_insert(0u64) += 1;
    }
    assert_eq!(freq.len(), 45);
    let expected = draws as f64 / 45.0;
    let sigma = (expected * (1.0 - 1.0 / 45.0)).sqrt();
    let chi2: f64 = freq.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(freq.values().all(|&c| (c as f64 - expected).abs() <= 4.0 * sigma));
    // 44 degrees of freedom: mean 44, sd about 9.4
    assert!(chi2 < 44.0 + 5.0 * 9.4, "chi2 = {chi2}");
}

#[test]
fn labels_are_fair_bits() {
    let mut rng = SeedSpec::new(2, 0).rng();
    let l = labels_with(&mut rng, 1_000_000, 0.5);
    let sigma = (1e6f64 * 0.25).sqrt();
    assert!((l.weight() as f64 - 5e5).abs() <= 4.0 * sigma);
}

#[test]
fn independent_streams_are_uncorrelated() {
    use rand::Rng;
    let (mut a, mut b) = (SeedSpec::new(1, 0).rng(), SeedSpec::new(1, 1).rng());
    let xs: Vec<f64> = (0..100_000).map(|_| a.gen::<f64>() - 0.5).collect();
    let ys: Vec<f64> = (0..100_000).map(|_| b.gen::<f64>() - 0.5).collect();
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / 1e5;
    // correlation of independent uniforms has sd 1/sqrt(N)
    assert!((cov * 12.0).abs() < 4.0 / (1e5f64).sqrt(), "correlation {}", cov * 12.0);
}

#[test]
fn rao_blackwell_matches_exact_enumeration() {
    let n = 5;
    let lambda = (0.3 * n as f64 - 1.0) * (n as f64).cbrt();
    assert!((critical_p(n, lambda).unwrap() - 0.3).abs() < 1e-15);
    let spec = ModelSpec::new(ModelKind::Gnp, n, lambda, 0.5).unwrap();
    let rb = estimate_solvability(&spec, 1_000_000, SeedSpec::new(21, 0), Method::RaoBlackwell).unwrap();
    let exact = exact_solvability(n, &ExactModel::Gnp(Rational::from((3, 10))), &Rational::from((1, 2))).unwrap();
    assert!((rb.mean - exact.to_f64()).abs() <= 4.0 * rb.stderr, "{} vs {}", rb.mean, exact.to_f64());

    let ind = estimate_solvability(&spec, 1_000_000, SeedSpec::new(22, 0), Method::Indicator).unwrap();
    let combined = (rb.stderr.powi(2) + ind.stderr.powi(2)).sqrt();
    assert!((rb.mean - ind.mean).abs() <= 4.0 * combined);
    assert!(rb.stderr < ind.stderr);
}

#[test]
fn small_excess_raises_solvability() {
    let spec = ModelSpec::new(ModelKind::Gnp, 10_000, 0.0, 0.5).unwrap();
    let c = conditional_solvability(&spec, 20_000, SeedSpec::new(31, 0), Method::RaoBlackwell, 1).unwrap();
    assert!(c.within.1 > c.unconditional);
    assert!(c.z > 3.0, "z = {}", c.z);
}
