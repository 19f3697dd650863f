use levyzoom::simulate::{batch_sample, batch_stable, batch_toy, SimConfig, ToyModelParams};
use levyzoom::stats::{chi_square_p, ks_distance, mean_and_se};
use levyzoom::{Atom, JumpDist, LevyMeasure, LevyTriplet};
use proptest::prelude::*;
use statrs::distribution::{Discrete, Poisson};

fn ks_critical(n: usize, m: usize) -> f64 {
    // 99.9% two-sample level
    1.95 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

#[test]
fn stable_self_similarity() {
    let n = 20_000;
    for &(alpha, cp, cm) in &[(0.6, 1.0, 0.3), (1.0, 0.7, 0.7), (1.4, 0.2, 1.0)] {
        let whole = batch_stable(alpha, cp, cm, 2.0, n, &SimConfig::with_seed(1)).unwrap();
        let small: Vec<f64> = batch_stable(alpha, cp, cm, 2.0 / 16.0, n, &SimConfig::with_seed(2))
            .unwrap()
            .into_iter()
            .map(|x| x * 16f64.powf(1.0 / alpha))
            .collect();
        let d = ks_distance(&whole, &small);
        assert!(d < ks_critical(n, n), "alpha={alpha}: KS {d}");
    }
}

#[test]
fn stable_like_increments_add_up() {
    // X(1) against the sum of four X(1/4), through the triplet sampler
    for &(alpha, cp, cm) in &[(0.6, 1.0, 0.3), (1.0, 1.0, 0.3), (1.5, 0.4, 1.0)] {
        let t = LevyTriplet::new(0.3, 0.0, LevyMeasure::StableLike { c_plus: cp, c_minus: cm, alpha }).unwrap();
        let n = 20_000;
        let whole = batch_sample(&t, 1.0, n, &SimConfig::with_seed(3)).unwrap();
        let parts = batch_sample(&t, 0.25, 4 * n, &SimConfig::with_seed(4)).unwrap();
        let sums: Vec<f64> = parts.chunks(4).map(|c| c.iter().sum()).collect();
        let d = ks_distance(&whole, &sums);
        assert!(d < ks_critical(n, n), "alpha={alpha}: KS {d}");
    }
}

#[test]
fn truncation_consistency_for_tempered_half() {
    let t = LevyTriplet::new(
        0.0,
        0.0,
        LevyMeasure::TemperedStable { c_plus: 1.0, c_minus: 1.0, alpha: 0.5, lambda_plus: 1.0, lambda_minus: 1.0 },
    )
    .unwrap();
    let moment = |delta: f64, seed: u64| {
        let cfg = SimConfig { truncation_delta: delta, ..SimConfig::with_seed(seed) };
        let xs: Vec<f64> = batch_sample(&t, 1.0, 100_000, &cfg).unwrap().iter().map(|x| x.abs().powf(0.25)).collect();
        mean_and_se(&xs)
    };
    let (m4, s4) = moment(1e-4, 10);
    let (m5, s5) = moment(1e-5, 11);
    let se = (s4 * s4 + s5 * s5).sqrt();
    assert!((m4 - m5).abs() < 3.0 * se, "{m4} vs {m5} (se {se})");
}

#[test]
fn compound_poisson_counts_are_poisson() {
    // unit atoms at 1 are uncompensated, so X(1) is the jump count
    let rate = 2.5;
    let t = LevyTriplet::new(
        0.0,
        0.0,
        LevyMeasure::CompoundPoisson { rate, jump_dist: JumpDist::Discrete { atoms: vec![Atom { size: 1.0, prob: 1.0 }] } },
    )
    .unwrap();
    let n = 100_000;
    let xs = batch_sample(&t, 1.0, n, &SimConfig::with_seed(5)).unwrap();
    let top = 8usize;
    let mut observed = vec![0.0; top + 1];
    for x in &xs {
        assert_eq!(x.fract(), 0.0);
        observed[(*x as usize).min(top)] += 1.0;
    }
    let law = Poisson::new(rate).unwrap();
    let mut expected: Vec<f64> = (0..top).map(|k| n as f64 * law.pmf(k as u64)).collect();
    expected.push(n as f64 - expected.iter().sum::<f64>());
    let p = chi_square_p(&observed, &expected);
    assert!(p > 1e-3, "chi-square p = {p}");
}

#[test]
fn gaussian_with_drift_over_long_times() {
    let t = LevyTriplet::new(-1.5, 2.0, LevyMeasure::Zero).unwrap();
    let xs = batch_sample(&t, 4.0, 200_000, &SimConfig::with_seed(6)).unwrap();
    let (m, se) = mean_and_se(&xs);
    assert!((m + 6.0).abs() < 4.0 * se);
    let v = levyzoom::stats::variance(&xs);
    assert!((v / 16.0 - 1.0).abs() < 0.02, "{v}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identical_streams_for_any_worker_count(seed in any::<u64>(), workers in 2usize..9, n in 1usize..5000) {
        let t = LevyTriplet::new(
            0.1,
            0.5,
            LevyMeasure::TemperedStable { c_plus: 1.0, c_minus: 0.5, alpha: 1.2, lambda_plus: 2.0, lambda_minus: 1.0 },
        )
        .unwrap();
        let a = batch_sample(&t, 0.01, n, &SimConfig::with_seed(seed)).unwrap();
        let b = batch_sample(&t, 0.01, n, &SimConfig { workers, ..SimConfig::with_seed(seed) }).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        let p = ToyModelParams::new(1.0, 50).unwrap();
        let a = batch_toy(&p, n, &SimConfig::with_seed(seed)).unwrap();
        let b = batch_toy(&p, n, &SimConfig { workers, ..SimConfig::with_seed(seed) }).unwrap();
        prop_assert_eq!(a, b);
    }
}
