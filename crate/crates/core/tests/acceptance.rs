//! Acceptance suite (`harness = false`). Every criterion runs and prints one
//! `criterion N: PASS|FAIL` line with the measured values; the process exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;

use levyzoom::estimate::{
    dyadic_grid, fit_tau0, gaussian_tail_compare, ldp_probability, ldp_sandwich, lemma2_check, toy_moment_exact,
    toy_moment_mc, LdpWindow,
};
use levyzoom::scaling::{
    check_tau_properties, legendre_transform, rate_function_from, tau0_monofractal, tau0_unified, theoretical_tau0,
    PiecewiseLinearFn,
};
use levyzoom::simulate::{batch_sample, batch_stable, SimConfig, ToyModelParams};
use levyzoom::spectrum::{formalism_spectrum, levy_spectrum, spectra_agree, zeta_from_tau0, FORMALISM_TOL};
use levyzoom::stats::{ks_distance, ols};
use levyzoom::{Atom, JumpDist, LevyMeasure, LevyTriplet};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

fn verdict(id: u32, pass: bool, detail: &str) -> bool {
    println!("criterion {id}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn cfg(seed: u64) -> SimConfig {
    SimConfig { workers: workers(), ..SimConfig::with_seed(seed) }
}

fn unit_atom(rate: f64, size: f64) -> LevyMeasure {
    LevyMeasure::CompoundPoisson { rate, jump_dist: JumpDist::Discrete { atoms: vec![Atom { size, prob: 1.0 }] } }
}

fn bm_cp() -> LevyTriplet {
    LevyTriplet::new(0.0, 1.0, unit_atom(1.0, 1.0)).unwrap()
}

fn pure_bm() -> LevyTriplet {
    LevyTriplet::new(0.0, 1.0, LevyMeasure::Zero).unwrap()
}

fn drift_cp() -> LevyTriplet {
    LevyTriplet::new(1.0, 0.0, unit_atom(1.0, 2.0)).unwrap()
}

fn tempered(alpha: f64) -> LevyTriplet {
    LevyTriplet::new(
        0.0,
        0.0,
        LevyMeasure::TemperedStable { c_plus: 1.0, c_minus: 1.0, alpha, lambda_plus: 1.0, lambda_minus: 1.0 },
    )
    .unwrap()
}

/// `(q_lo, q_hi, slope, value_at_lo)`.
type Shape = Vec<(f64, f64, f64, f64)>;

fn shape(f: &PiecewiseLinearFn) -> Shape {
    f.segments().iter().map(|s| (s.q_lo, s.q_hi, s.slope, s.value_at_lo)).collect()
}

fn same_shape(a: &Shape, b: &Shape, tol: f64) -> bool {
    let close = |x: f64, y: f64| x == y || (x - y).abs() <= tol;
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| close(x.0, y.0) && close(x.1, y.1) && close(x.2, y.2) && close(x.3, y.3))
}

fn criterion_1_closed_forms() -> bool {
    let inf = f64::INFINITY;
    let cases: Vec<(&str, LevyTriplet, Shape)> = vec![
        ("bm+cp", bm_cp(), vec![(0.0, 2.0, -0.5, 0.0), (2.0, inf, 0.0, -1.0)]),
        ("bm", pure_bm(), vec![(0.0, inf, -0.5, 0.0)]),
        ("drift+cp", drift_cp(), vec![(0.0, 1.0, -1.0, 0.0), (1.0, inf, 0.0, -1.0)]),
        ("tempered 0.8", tempered(0.8), vec![(0.0, 0.8, -1.25, 0.0), (0.8, inf, 0.0, -1.0)]),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, t, expected) in cases {
        let got = shape(&theoretical_tau0(&t).unwrap());
        let ok = same_shape(&got, &expected, 1e-12);
        pass &= ok;
        detail.push(format!("{name}:{}", if ok { "ok" } else { "mismatch" }));
    }
    verdict(1, pass, &detail.join(" "))
}

fn criterion_2_rate_function_display() -> bool {
    let mut pass = true;
    let mut worst = 0.0f64;
    for &(a, b) in &[(2.0, f64::INFINITY), (1.0, 3.0), (0.8, f64::INFINITY)] {
        let conj = legendre_transform(&tau0_unified(a, b).unwrap()).unwrap();
        let rate = rate_function_from(a, b).unwrap();
        let (lo, hi) = (-1.0 / a, 1.0);
        for i in 0..1000 {
            let x = lo + (hi - lo) * i as f64 / 999.0;
            let display = if x <= 0.0 {
                a * x + 1.0
            } else if b.is_finite() {
                b * x + 1.0
            } else {
                f64::INFINITY
            };
            for v in [conj.eval(x), rate.eval(x)] {
                if display.is_infinite() {
                    pass &= v == display;
                } else {
                    worst = worst.max((v - display).abs());
                }
            }
        }
    }
    pass &= worst <= 1e-12;
    verdict(2, pass, &format!("max |conjugate - display| = {worst:.3e} over 3x1000 points"))
}

fn criterion_3_toy_model_oracle() -> bool {
    let mut pass = true;
    let mut worst_z = 0.0f64;
    let mut seed = 300;
    for &alpha in &[0.5, 1.0, 2.0] {
        for &n in &[100u64, 1_000, 10_000] {
            let p = ToyModelParams::new(alpha, n).unwrap();
            for &q in &[0.5, alpha, 2.0 * alpha] {
                seed += 1;
                let r = toy_moment_mc(&p, q, 1_000_000, &cfg(seed)).unwrap();
                let exact = toy_moment_exact(&p, q).unwrap();
                let z = (r.estimate - exact).abs() / r.std_error;
                worst_z = worst_z.max(z);
                pass &= z <= 4.0;
            }
        }
    }
    let mut worst_slope = 0.0f64;
    let ns = dyadic_grid(4, 20);
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    for &alpha in &[0.5, 1.0, 2.0] {
        for &q in &[0.5, alpha, 2.0 * alpha] {
            let y: Vec<f64> = ns
                .iter()
                .map(|&n| toy_moment_exact(&ToyModelParams::new(alpha, n).unwrap(), q).unwrap().ln())
                .collect();
            let limit = if q < alpha { -q / alpha } else { -1.0 };
            worst_slope = worst_slope.max((ols(&x, &y).slope - limit).abs());
        }
    }
    pass &= worst_slope <= 0.02;
    verdict(3, pass, &format!("max |z| = {worst_z:.2} (<= 4) over 27 points; max slope error = {worst_slope:.4} (<= 0.02)"))
}

fn criterion_4_empirical_scaling_function() -> bool {
    let grid = dyadic_grid(4, 14);
    let mut pass = true;
    let mut detail = Vec::new();
    let cases = [
        ("bm+cp", bm_cp(), vec![(0.5, -0.25), (1.0, -0.5), (3.0, -1.0), (4.0, -1.0)]),
        ("tempered", tempered(0.8), vec![(0.4, -0.5), (2.0, -1.0)]),
    ];
    let mut seed = 400;
    for (name, t, qs) in cases {
        for (q, expected) in qs {
            seed += 1;
            let f = fit_tau0(&t, q, &grid, 100_000, &cfg(seed)).unwrap();
            let theory = theoretical_tau0(&t).unwrap().eval(q);
            assert_eq!(theory, expected);
            let ok = (f.slope - expected).abs() <= 0.05;
            pass &= ok;
            detail.push(format!("{name} q={q}: {:.4}±{:.4} vs {expected}{}", f.slope, f.slope_std_error, if ok { "" } else { " (off)" }));
        }
    }
    verdict(4, pass, &detail.join("; "))
}

fn criterion_5_small_time_moment_constants() -> bool {
    let n = 1u64 << 12;
    let cases = [
        ("drift q=3", LevyTriplet::new(2.0, 0.0, LevyMeasure::Zero).unwrap(), 3.0, 8.0),
        ("bm q=3", pure_bm(), 3.0, 2.0 * (2.0 / PI).sqrt()),
        ("tempered q=1.5", tempered(0.8), 1.5, 2.0 * gamma(0.7)),
        ("bm+cp q=2", LevyTriplet::new(0.0, 1.0, unit_atom(1.0, 2.0)).unwrap(), 2.0, 5.0),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, (name, t, q, target)) in cases.into_iter().enumerate() {
        let r = lemma2_check(&t, q, 1.0, &[n], 1_000_000, &cfg(500 + i as u64)).unwrap();
        assert!((r.asymptotic.constant - target).abs() <= 1e-7 * target, "{name}: constant {}", r.asymptotic.constant);
        let row = &r.rows[0];
        let rel = (row.scaled_moment - target).abs() / target;
        pass &= rel <= 0.10;
        detail.push(format!("{name}: {:.4} vs {target:.4} ({:.1}%)", row.scaled_moment, 100.0 * rel));
    }
    verdict(5, pass, &detail.join("; "))
}

fn criterion_6_ldp_windows() -> bool {
    let t = tempered(0.8);
    let n = 1u64 << 12;
    let central = LdpWindow::around(-1.25, 0.2).unwrap();
    let order_one = LdpWindow::around(0.0, 0.1).unwrap();
    let rc = ldp_probability(&t, n, &central, 10_000_000, &cfg(601)).unwrap();
    let ro = ldp_probability(&t, n, &order_one, 10_000_000, &cfg(602)).unwrap();
    let lc = rc.meta_f64("normalized_log").unwrap();
    let lo = ro.meta_f64("normalized_log").unwrap();
    let sc = ldp_sandwich(&t, &central).unwrap();
    let so = ldp_sandwich(&t, &order_one).unwrap();
    let ok_c = lc.abs() <= 0.05;
    let ok_o = (-1.05..=-0.87).contains(&lo);
    let detail = format!(
        "central: {lc:.4} (target 0 ± 0.05, sandwich [{}, {}]); order-one: {lo:.4} (target [-1.05, -0.87], sandwich [{}, {:.2}])",
        sc.lower, sc.upper, so.lower, so.upper
    );
    verdict(6, ok_c && ok_o, &detail)
}

fn criterion_7_brownian_contrast() -> bool {
    let g = gaussian_tail_compare(1.0, 1e4, 0.25).unwrap();
    let ratio_ok = (g.ratio() - 1.0).abs() <= 0.02;

    // |B(1/n)| > n^{-1/2 + 0.2}
    let n = 1u64 << 12;
    let eps = 0.2;
    let window = LdpWindow::new(-0.5 + eps, 10.0).unwrap();
    let r = ldp_probability(&pure_bm(), n, &window, 1_000_000, &cfg(701)).unwrap();
    let ln_n = (n as f64).ln();
    let exact = erfc((n as f64).powf(eps) / std::f64::consts::SQRT_2).ln() / ln_n;
    let hits = r.meta.get("hits").and_then(|v| v.as_u64()).unwrap();
    // evidence the run can resolve: the point estimate, or the 95% bound when nothing was hit
    let resolved = if hits == 0 { r.meta_f64("normalized_log_upper_bound_95").unwrap() } else { r.meta_f64("normalized_log").unwrap() };
    let probe_ok = resolved < -3.0 && exact < -3.0;
    let detail = format!(
        "tail ratio = {:.4} (1 ± 0.02); probe n=2^12 eps={eps}: hits = {hits}/1e6, resolvable normalized log <= {resolved:.3}, exact normalized log = {exact:.3} (need < -3)",
        g.ratio()
    );
    verdict(7, ratio_ok && probe_ok, &detail)
}

fn criterion_8_multifractal_formalism() -> bool {
    let mut pass = true;
    for &a in &[0.3, 0.8, 1.2, 1.7] {
        let d = formalism_spectrum(&zeta_from_tau0(&theoretical_tau0(&tempered(a)).unwrap())).unwrap();
        pass &= spectra_agree(&d, &levy_spectrum(a).unwrap(), FORMALISM_TOL);
    }
    let bm = formalism_spectrum(&zeta_from_tau0(&tau0_monofractal(0.5).unwrap())).unwrap();
    let point = bm.support == (0.5, 0.5) && bm.eval(0.5) == 1.0 && bm.eval(0.49) == f64::NEG_INFINITY;
    verdict(8, pass && point, &format!("alpha in {{0.3, 0.8, 1.2, 1.7}} agree: {pass}; BM point spectrum d(1/2)=1: {point}"))
}

fn criterion_9_property_suites() -> bool {
    let grid: Vec<f64> = (1..=400).map(|i| i as f64 * 0.02).collect();
    let mut taus: Vec<(f64, PiecewiseLinearFn)> = Vec::new();
    for t in [bm_cp(), drift_cp(), tempered(0.3), tempered(0.8), tempered(1.5)] {
        let alpha = t.classify_small_time_limit().unwrap().alpha.unwrap();
        taus.push((alpha, theoretical_tau0(&t).unwrap()));
    }
    for &a in &[0.1, 0.5, 1.0, 1.9, 2.0] {
        for &b in &[2.5, 4.0, f64::INFINITY] {
            taus.push((a, tau0_unified(a, b).unwrap()));
        }
    }
    let mut props = true;
    let mut neg_bound = true;
    for (alpha, tau) in &taus {
        let r = check_tau_properties(tau, &grid);
        props &= r.convex && r.ratio_nondecreasing;
        for &q in &[-0.5, -1.0, -3.0] {
            neg_bound &= (r.negative_q_bound(q) - (-q / alpha)).abs() <= 1e-12;
        }
    }

    let mut deterministic = true;
    for t in [bm_cp(), tempered(0.8), drift_cp(), LevyTriplet::new(0.0, 0.0, LevyMeasure::StableLike { c_plus: 1.0, c_minus: 0.3, alpha: 1.0 }).unwrap()] {
        let base = batch_sample(&t, 1.0 / 64.0, 5_000, &SimConfig::with_seed(9)).unwrap();
        for w in [2, 3, 8] {
            let other = batch_sample(&t, 1.0 / 64.0, 5_000, &SimConfig { workers: w, ..SimConfig::with_seed(9) }).unwrap();
            deterministic &= base.iter().zip(&other).all(|(a, b)| a.to_bits() == b.to_bits());
        }
    }

    // X(1) against k^{1/α} X(1/k) and against a sum of k increments of length 1/k
    let n = 20_000;
    let k = 8usize;
    let crit = 1.95 * (2.0 / n as f64).sqrt();
    let mut worst_ks = 0.0f64;
    for &(alpha, cp, cm) in &[(0.6, 1.0, 0.4), (1.0, 1.0, 1.0), (1.4, 0.5, 1.0)] {
        let whole = batch_stable(alpha, cp, cm, 1.0, n, &SimConfig::with_seed(91)).unwrap();
        let scaled: Vec<f64> = batch_stable(alpha, cp, cm, 1.0 / k as f64, n, &SimConfig::with_seed(92))
            .unwrap()
            .iter()
            .map(|x| x * (k as f64).powf(1.0 / alpha))
            .collect();
        let parts = batch_stable(alpha, cp, cm, 1.0 / k as f64, n * k, &SimConfig::with_seed(93)).unwrap();
        let sums: Vec<f64> = parts.chunks(k).map(|c| c.iter().sum()).collect();
        worst_ks = worst_ks.max(ks_distance(&whole, &scaled)).max(ks_distance(&whole, &sums));
    }
    let ks_ok = worst_ks <= crit;
    let pass = props && neg_bound && deterministic && ks_ok;
    let detail = format!(
        "{} scaling functions convex/ratio: {props}; negative-q bound -q/alpha: {neg_bound}; worker determinism: {deterministic}; self-similarity max KS = {worst_ks:.4} (<= {crit:.4})",
        taus.len()
    );
    verdict(9, pass, &detail)
}

fn main() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_closed_forms,
        criterion_2_rate_function_display,
        criterion_3_toy_model_oracle,
        criterion_4_empirical_scaling_function,
        criterion_5_small_time_moment_constants,
        criterion_6_ldp_windows,
        criterion_7_brownian_contrast,
        criterion_8_multifractal_formalism,
        criterion_9_property_suites,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
