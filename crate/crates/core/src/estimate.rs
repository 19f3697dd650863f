//! Monte Carlo estimators: moments and scaling exponents of `X(1/n)`, the
//! small-time moment constants, probabilities of the rate sequence
//! `log|X(1/n)|/log n` falling in a window, the toy-model oracle, and the
//! Brownian tail comparison.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::error::{LevyError, Result};
use crate::scaling::{rate_function, PiecewiseLinearFn};
use crate::simulate::{batch_sample, batch_with, mix_seed, IncrementSampler, SimConfig, ToyModelParams};
use crate::stats::{mean_and_se, ols};
use crate::triplet::{bg_index, frac_moment_measure, tail_index, LevyMeasure, LevyTriplet, Region, ZERO_DRIFT_TOL};

/// Minimum sample count of a moment estimate.
pub const MIN_MOMENT_SAMPLES: usize = 100;

/// Distance to the kink `q = α` below which a slow-convergence warning is emitted.
pub const KINK_WARNING_DISTANCE: f64 = 0.1;

/// JSON value of an extended real (`"inf"` / `"-inf"` for infinities).
pub fn ext_value(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        Value::String(crate::ext::fmt_csv(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub meta: BTreeMap<String, Value>,
}

impl EstimateReport {
    fn new(estimate: f64, std_error: f64, n_samples: usize, seed: u64) -> Self {
        Self { estimate, std_error, n_samples, seed, meta: BTreeMap::new() }
    }

    fn with(mut self, key: &str, v: Value) -> Self {
        self.meta.insert(key.to_string(), v);
        self
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        match self.meta.get(key)? {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => crate::ext::parse_ext(s),
            _ => None,
        }
    }
}

fn moment_report(xs: &[f64], q: f64, seed: u64) -> EstimateReport {
    let powers: Vec<f64> = xs.iter().map(|x| x.abs().powf(q)).collect();
    let (m, se) = mean_and_se(&powers);
    EstimateReport::new(m, se, xs.len(), seed)
}

fn check_moment_inputs(q: f64, n_samples: usize) -> Result<()> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(LevyError::InvalidParameter(format!("moment order must be positive, got {q}")));
    }
    if n_samples < MIN_MOMENT_SAMPLES {
        return Err(LevyError::InvalidParameter(format!(
            "moment estimates need at least {MIN_MOMENT_SAMPLES} samples, got {n_samples}"
        )));
    }
    Ok(())
}

/// Sample mean of `|X(dt)|^q` with plug-in standard error.
pub fn empirical_moment(t: &LevyTriplet, q: f64, dt: f64, n_samples: usize, cfg: &SimConfig) -> Result<EstimateReport> {
    check_moment_inputs(q, n_samples)?;
    let xs = batch_sample(t, dt, n_samples, cfg)?;
    Ok(moment_report(&xs, q, cfg.seed).with("q", ext_value(q)).with("dt", ext_value(dt)))
}

/// Per-grid-point configuration: the seed is derived from `(seed, n)`.
fn grid_config(cfg: &SimConfig, n: u64) -> SimConfig {
    SimConfig { seed: mix_seed(cfg.seed, n), ..*cfg }
}

/// `2^lo, …, 2^hi`.
pub fn dyadic_grid(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|k| 1u64 << k).collect()
}

fn check_grid(n_grid: &[u64], min_len: usize) -> Result<()> {
    if n_grid.len() < min_len {
        return Err(LevyError::InvalidParameter(format!("n-grid needs at least {min_len} points, got {}", n_grid.len())));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] < 1 {
        return Err(LevyError::InvalidParameter("n-grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauGridPoint {
    pub n: u64,
    pub log_moment: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauFit {
    pub q: f64,
    /// `τ̂⁰(q)`, the slope of `log Ê|X(1/n)|^q` against `log n`.
    pub slope: f64,
    /// Monte Carlo standard error of the slope, propagated from the grid points.
    pub slope_std_error: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub grid: Vec<TauGridPoint>,
    pub warnings: Vec<String>,
}

/// Least-squares estimate of `τ⁰(q)` over `n_grid`, uniform weights.
pub fn fit_tau0(t: &LevyTriplet, q: f64, n_grid: &[u64], n_per_point: usize, cfg: &SimConfig) -> Result<TauFit> {
    check_moment_inputs(q, n_per_point)?;
    check_grid(n_grid, 3)?;
    let mut warnings = Vec::new();
    if let Ok(limit) = t.classify_small_time_limit() {
        if let Some(a) = limit.alpha {
            if !t.measure.is_zero() && (q - a).abs() < KINK_WARNING_DISTANCE {
                warnings.push(format!("q = {q} is within {KINK_WARNING_DISTANCE} of the kink at alpha = {a}; convergence is slow"));
            }
        }
    }
    let beta_inf = tail_index(&t.measure);
    if q >= beta_inf {
        warnings.push(format!("q = {q} is not below the tail index {beta_inf}; moments are infinite"));
    }
    let mut grid = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let c = grid_config(cfg, n);
        let xs = batch_sample(t, 1.0 / n as f64, n_per_point, &c)?;
        let r = moment_report(&xs, q, c.seed);
        if !(r.estimate > 0.0) {
            return Err(LevyError::DegenerateFit(format!("all {} samples are zero at n = {n}", r.n_samples)));
        }
        grid.push(TauGridPoint { n, log_moment: r.estimate.ln(), std_error: r.std_error / r.estimate });
    }
    let x: Vec<f64> = grid.iter().map(|p| (p.n as f64).ln()).collect();
    let y: Vec<f64> = grid.iter().map(|p| p.log_moment).collect();
    let fit = ols(&x, &y);
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let slope_var: f64 = x.iter().zip(&grid).map(|(v, p)| ((v - mx) / sxx).powi(2) * p.std_error.powi(2)).sum();
    Ok(TauFit {
        q,
        slope: fit.slope,
        slope_std_error: slope_var.sqrt(),
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        grid,
        warnings,
    })
}

/// The cases of the small-time moment lemma for orders above `β⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentCase {
    /// `σ = 0, Π ≡ 0`: `n^q E|X(t/n)|^q → t^q|γ|^q`.
    PureDrift,
    /// `σ > 0, Π ≡ 0`: `n^{q/2} E|X(t/n)|^q → t^{q/2} E|N(0, σ²)|^q`.
    Gaussian,
    /// `σ = 0, Π ≢ 0`, jump regime: `n E|X(t/n)|^q → t ∫|x|^q Π(dx)`.
    Jumps,
    /// `σ = 0, Π ≢ 0`, `β⁰ < 1`, `γ′ ≠ 0`, `q < 1`: `n^q E|X(t/n)|^q → t^q|γ′|^q`.
    JumpsWithDrift,
    /// `σ > 0, Π ≢ 0`, `q > 2`: `n E|X(t/n)|^q → t ∫|x|^q Π(dx)`.
    GaussianJumpsAbove2,
    /// `σ > 0, Π ≢ 0`, `q = 2`: `n E|X(t/n)|² → tσ² + t ∫x² Π(dx)`.
    GaussianJumpsAt2,
    /// `σ > 0, Π ≢ 0`, `q < 2`: `n^{q/2} E|X(t/n)|^q → t^{q/2} E|N(0, σ²)|^q`.
    GaussianJumpsBelow2,
}

/// `E|X(t/n)|^q ≈ constant · n^{−decay}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentAsymptotic {
    pub q: f64,
    pub decay: f64,
    pub constant: f64,
}

/// `E|N(0, σ²)|^q = σ^q 2^{q/2} Γ((q+1)/2) / √π`.
pub fn normal_abs_moment(sigma: f64, q: f64) -> f64 {
    sigma.powf(q) * 2f64.powf(q / 2.0) * gamma((q + 1.0) / 2.0) / PI.sqrt()
}

fn out_of_case(q: f64, reason: impl Into<String>) -> LevyError {
    LevyError::OutOfCase { q, reason: reason.into() }
}

/// Selects the lemma case for `(t, q)` and the limit at time `t_fixed`.
pub fn moment_asymptotic(t: &LevyTriplet, q: f64, t_fixed: f64) -> Result<(MomentCase, MomentAsymptotic)> {
    if !(q > 0.0) {
        return Err(LevyError::InvalidParameter(format!("moment order must be positive, got {q}")));
    }
    if !(t_fixed > 0.0) {
        return Err(LevyError::InvalidParameter(format!("t must be positive, got {t_fixed}")));
    }
    let (b0, binf) = (bg_index(&t.measure), tail_index(&t.measure));
    if !(q > b0) {
        return Err(out_of_case(q, format!("q must exceed the Blumenthal–Getoor index {b0}")));
    }
    if !(q < binf) {
        return Err(out_of_case(q, format!("q must be below the tail index {binf}")));
    }
    let jump_constant = || -> Result<f64> { Ok(t_fixed * frac_moment_measure(&t.measure, q, Region::All)?) };
    let gauss = || t_fixed.powf(q / 2.0) * normal_abs_moment(t.sigma, q);
    let (case, decay, constant) = match (t.sigma > 0.0, t.measure.is_zero()) {
        (false, true) => (MomentCase::PureDrift, q, (t_fixed * t.gamma.abs()).powf(q)),
        (true, true) => (MomentCase::Gaussian, q / 2.0, gauss()),
        (false, false) => {
            if q > 1.0 {
                (MomentCase::Jumps, 1.0, jump_constant()?)
            } else {
                // here β⁰ < q ≤ 1, so the paths have bounded variation
                let drift = t.bv_drift()?;
                if drift.abs() <= ZERO_DRIFT_TOL {
                    (MomentCase::Jumps, 1.0, jump_constant()?)
                } else if q < 1.0 {
                    (MomentCase::JumpsWithDrift, q, (t_fixed * drift.abs()).powf(q))
                } else {
                    return Err(out_of_case(q, "q = 1 with non-zero drift is not covered by the moment lemma"));
                }
            }
        }
        (true, false) => {
            if q > 2.0 {
                (MomentCase::GaussianJumpsAbove2, 1.0, jump_constant()?)
            } else if q == 2.0 {
                let c = t_fixed * t.sigma * t.sigma + t_fixed * frac_moment_measure(&t.measure, 2.0, Region::All)?;
                (MomentCase::GaussianJumpsAt2, 1.0, c)
            } else {
                (MomentCase::GaussianJumpsBelow2, q / 2.0, gauss())
            }
        }
    };
    Ok((case, MomentAsymptotic { q, decay, constant }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Row {
    pub n: u64,
    pub scaled_moment: f64,
    pub std_error: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub case: MomentCase,
    pub asymptotic: MomentAsymptotic,
    pub rows: Vec<Lemma2Row>,
}

/// Scaled empirical moments `n^{decay} Ê|X(t/n)|^q` next to the limit constant.
pub fn lemma2_check(
    t: &LevyTriplet,
    q: f64,
    t_fixed: f64,
    n_grid: &[u64],
    n_samples: usize,
    cfg: &SimConfig,
) -> Result<Lemma2Report> {
    check_moment_inputs(q, n_samples)?;
    check_grid(n_grid, 1)?;
    let (case, asymptotic) = moment_asymptotic(t, q, t_fixed)?;
    let mut rows = Vec::new();
    for &n in n_grid {
        let c = grid_config(cfg, n);
        let xs = batch_sample(t, t_fixed / n as f64, n_samples, &c)?;
        let r = moment_report(&xs, q, c.seed);
        let scale = (n as f64).powf(asymptotic.decay);
        rows.push(Lemma2Row { n, scaled_moment: scale * r.estimate, std_error: scale * r.std_error, target: asymptotic.constant });
    }
    Ok(Lemma2Report { case, asymptotic, rows })
}

/// Whether `X(t)` has an atom at 0: no Gaussian part, a finite Lévy measure
/// and zero drift in the bounded-variation form.
pub fn has_point_mass_at_zero(t: &LevyTriplet) -> Result<bool> {
    let finite = matches!(t.measure, LevyMeasure::Zero | LevyMeasure::CompoundPoisson { .. });
    Ok(t.sigma == 0.0 && finite && t.bv_drift()?.abs() <= ZERO_DRIFT_TOL)
}

/// `N` draws of `log|X(1/n)| / log n`.
pub fn z_rate_samples(t: &LevyTriplet, n: u64, n_samples: usize, cfg: &SimConfig) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(LevyError::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    if has_point_mass_at_zero(t)? {
        return Err(LevyError::PointMassAtZero(
            "X(1/n) = 0 with positive probability (finite measure, no Gaussian part, zero drift)".into(),
        ));
    }
    let s = IncrementSampler::new(t, 1.0 / n as f64, cfg)?;
    let log_n = (n as f64).ln();
    let zs = batch_with(n_samples, cfg, |rng| {
        // one resample on a numerically zero draw
        let mut x = s.draw(rng);
        if x == 0.0 {
            x = s.draw(rng);
        }
        if x == 0.0 {
            f64::NAN
        } else {
            x.abs().ln() / log_n
        }
    })?;
    if zs.iter().any(|z| z.is_nan()) {
        return Err(LevyError::Simulation("X(1/n) = 0 drawn twice in a row".into()));
    }
    Ok(zs)
}

/// Open window `a < log|X(1/n)|/log n < b` in exponent space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdpWindow {
    pub a: f64,
    #[serde(with = "crate::ext")]
    pub b: f64,
}

impl LdpWindow {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a.is_nan() {
            return Err(LevyError::InvalidParameter(format!("window needs a < b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    /// `(center − ε, center + ε)`.
    pub fn around(center: f64, eps: f64) -> Result<Self> {
        Self::new(center - eps, center + eps)
    }

    pub fn contains(&self, z: f64) -> bool {
        z > self.a && z < self.b
    }
}

/// `inf_{x ∈ [a, b]} f(x)`, exact for piecewise-linear `f`.
fn inf_over(f: &PiecewiseLinearFn, a: f64, b: f64) -> f64 {
    let mut pts = vec![a, b];
    pts.extend(f.breakpoints().into_iter().filter(|x| *x > a && *x < b));
    let mut best = pts.iter().map(|&x| f.eval(x)).fold(f64::INFINITY, f64::min);
    // unbounded windows: the limit along a flat or decreasing end
    if b.is_infinite() {
        if let Some(s) = f.segments().last().filter(|s| s.q_hi.is_infinite() && s.slope <= 0.0) {
            best = best.min(if s.slope < 0.0 { f64::NEG_INFINITY } else { s.value_at_lo });
        }
    }
    best
}

/// Theoretical bounds on the normalized log-probability of a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdpSandwich {
    /// `−inf` of the rate over the exposed points inside the open window.
    #[serde(with = "crate::ext")]
    pub lower: f64,
    /// `−inf` of the rate (its known lower bound where only that exists) over the closure.
    #[serde(with = "crate::ext")]
    pub upper: f64,
}

pub fn ldp_sandwich(t: &LevyTriplet, window: &LdpWindow) -> Result<LdpSandwich> {
    let rate = rate_function(t)?;
    let lower = -rate
        .exposed_points
        .iter()
        .filter(|&&x| window.contains(x))
        .map(|&x| rate.eval(x))
        .fold(f64::INFINITY, f64::min);
    let upper = -inf_over(&rate.pieces, window.a, window.b);
    // `+ 0.0` turns −0 into 0
    Ok(LdpSandwich { lower: lower + 0.0, upper: upper + 0.0 })
}

/// Expected hits below which a run is flagged as under-resolved.
pub const MIN_EXPECTED_HITS: f64 = 10.0;

/// `P̂(n^a < |X(1/n)| < n^b)` with binomial standard error.
///
/// Zero hits give the estimate 0 with the one-sided 95% bound `3/N`
/// (`meta.zero_hits = true`, `meta.upper_bound_95`).
pub fn ldp_probability(t: &LevyTriplet, n: u64, window: &LdpWindow, n_samples: usize, cfg: &SimConfig) -> Result<EstimateReport> {
    let zs = z_rate_samples(t, n, n_samples, cfg)?;
    let hits = zs.iter().filter(|&&z| window.contains(z)).count();
    let big_n = n_samples as f64;
    let p = hits as f64 / big_n;
    let se = (p * (1.0 - p) / big_n).sqrt();
    let log_n = (n as f64).ln();
    let mut r = EstimateReport::new(p, se, n_samples, cfg.seed)
        .with("n", serde_json::json!(n))
        .with("window", serde_json::json!([ext_value(window.a), ext_value(window.b)]))
        .with("hits", serde_json::json!(hits))
        .with("normalized_log", ext_value(p.ln() / log_n));
    if hits == 0 {
        let ub = 3.0 / big_n;
        r = r
            .with("zero_hits", Value::Bool(true))
            .with("upper_bound_95", ext_value(ub))
            .with("normalized_log_upper_bound_95", ext_value(ub.ln() / log_n));
    }
    if let Ok(s) = ldp_sandwich(t, window) {
        r = r.with("theory_lower", ext_value(s.lower)).with("theory_upper", ext_value(s.upper));
        // advisory: hits the upper rate would predict
        let expected = big_n * (n as f64).powf(s.upper);
        if expected < MIN_EXPECTED_HITS {
            r = r.with("warning", Value::String(format!("expected hits ≈ {expected:.3} < {MIN_EXPECTED_HITS}")));
        }
    }
    Ok(r)
}

/// `E|Z_n|^q = n^{−q/α}(1 − 1/n) + 1/n`.
pub fn toy_moment_exact(params: &ToyModelParams, q: f64) -> Result<f64> {
    params.validate()?;
    if q == 0.0 {
        return Ok(1.0);
    }
    let n = params.n as f64;
    Ok(n.powf(-q / params.alpha) * (1.0 - 1.0 / n) + 1.0 / n)
}

/// Monte Carlo `E|Z_n|^q`.
pub fn toy_moment_mc(params: &ToyModelParams, q: f64, n_samples: usize, cfg: &SimConfig) -> Result<EstimateReport> {
    let xs = crate::simulate::batch_toy(params, n_samples, cfg)?;
    Ok(moment_report(&xs, q, cfg.seed)
        .with("alpha", ext_value(params.alpha))
        .with("n", serde_json::json!(params.n))
        .with("q", ext_value(q)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTail {
    pub exact: f64,
    pub asymptotic: f64,
    pub underflow: bool,
}

impl GaussianTail {
    pub fn ratio(&self) -> f64 {
        self.exact / self.asymptotic
    }
}

/// `P(σB(1) > n^ε)` against `σ(2π)^{−1/2} n^{−ε} exp(−n^{2ε}/(2σ²))`.
pub fn gaussian_tail_compare(sigma: f64, n: f64, eps: f64) -> Result<GaussianTail> {
    if !(sigma > 0.0) {
        return Err(LevyError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(n >= 2.0) || !(eps > 0.0) {
        return Err(LevyError::InvalidParameter(format!("need n ≥ 2 and epsilon > 0, got n = {n}, epsilon = {eps}")));
    }
    let z = n.powf(eps) / sigma;
    let exact = 0.5 * erfc(z / SQRT_2);
    let asymptotic = sigma / (2.0 * PI).sqrt() * n.powf(-eps) * (-0.5 * z * z).exp();
    if exact == 0.0 || asymptotic == 0.0 || !exact.is_finite() {
        return Ok(GaussianTail { exact: 0.0, asymptotic: 0.0, underflow: true });
    }
    Ok(GaussianTail { exact, asymptotic, underflow: false })
}
