//! Adaptive Gauss–Kronrod quadrature for the power-law integrands that show
//! up in Lévy measure moments.
//!
//! Finite intervals use a globally adaptive 21-point Kronrod rule. Integrals
//! over `(0, 1]` are summed over the dyadic pieces `[2^{-k-1}, 2^{-k}]`, which
//! turns an integrable singularity `x^p` (`p > -1`) into a geometric series of
//! smooth sub-integrals. Integrals over `(1, ∞)` use `x = e^u` and unit pieces
//! in `u`. In both cases the remainder of the series is estimated from the
//! observed piece ratio and added to the result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{LevyError, Result};

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy)]
pub struct QuadPolicy {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadPolicy {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_evals: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

// Kronrod abscissae and weights (21-point) with the embedded 10-point Gauss weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452644,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        res_k += WGK[j] * pair;
        // odd Kronrod indices coincide with the Gauss nodes
        if j % 2 == 1 {
            res_g += WG[j / 2] * pair;
        }
    }
    let value = res_k * half;
    let err = ((res_k - res_g) * half).abs();
    (value, err)
}

#[derive(Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive integration over a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, policy: &QuadPolicy) -> Result<QuadResult> {
    integrate_budget(&f, a, b, policy, policy.max_evals)
}

fn integrate_budget<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    policy: &QuadPolicy,
    budget: usize,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    }
    let (v, e) = gk21(f, a, b);
    let mut evals = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    loop {
        if !total.is_finite() {
            return Err(LevyError::NumericFailure { achieved: f64::INFINITY, requested: policy.abs_tol });
        }
        let tol = policy.abs_tol.max(policy.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if evals + 42 > budget {
            return Err(LevyError::NumericFailure { achieved: total_err, requested: tol });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Err(LevyError::NumericFailure { achieved: total_err, requested: tol });
        }
        let (v1, e1) = gk21(f, worst.a, mid);
        let (v2, e2) = gk21(f, mid, worst.b);
        evals += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated cancellation in the running total
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, evals })
}

/// Sums a series of sub-integrals whose magnitudes eventually decay
/// geometrically, extrapolating the remainder from the last ratio.
fn geometric_series<F, P>(f: &F, piece: P, max_pieces: usize, policy: &QuadPolicy) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
    P: Fn(usize) -> Option<(f64, f64)>,
{
    const MIN_PIECES: usize = 6;
    let mut total: f64 = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let mut prev: Option<f64> = None;
    let mut last_ratio = f64::INFINITY;
    let mut small_run = 0;
    for k in 0..max_pieces {
        let Some((a, b)) = piece(k) else {
            let tol = policy.abs_tol.max(policy.rel_tol * total.abs());
            if last_ratio < 1.0 || prev.is_some_and(|p| p <= tol) {
                return Ok(QuadResult { value: total, error: err, evals });
            }
            return Err(LevyError::NumericFailure { achieved: prev.unwrap_or(f64::INFINITY), requested: tol });
        };
        let remaining = policy.max_evals.saturating_sub(evals);
        // each piece only needs a share of the global tolerance
        let local = QuadPolicy { abs_tol: policy.abs_tol * 1e-2, rel_tol: policy.rel_tol * 1e-2, ..*policy };
        let r = integrate_budget(f, a, b, &local, remaining)?;
        evals += r.evals;
        total += r.value;
        err += r.error;
        let mag = r.value.abs();
        if k + 1 >= MIN_PIECES {
            let tol = policy.abs_tol.max(policy.rel_tol * total.abs());
            if mag == 0.0 {
                small_run += 1;
                if small_run >= 3 {
                    return Ok(QuadResult { value: total, error: err, evals });
                }
            } else if let Some(p) = prev {
                let ratio = if p > 0.0 { mag / p } else { f64::INFINITY };
                if ratio < 1.0 {
                    let remainder = r.value * ratio / (1.0 - ratio);
                    // a power-law integrand gives a constant ratio, and then the
                    // extrapolated remainder is exact; its error scales with the drift
                    let drift = if last_ratio.is_finite() { (ratio - last_ratio).abs() } else { 1.0 };
                    let rem_err = remainder.abs() * (drift / (1.0 - ratio)).min(1.0);
                    if remainder.abs() <= tol || (rem_err <= 0.5 * tol && drift < 1e-3) {
                        total += remainder;
                        err += rem_err.max(remainder.abs() * 1e-3);
                        return Ok(QuadResult { value: total, error: err, evals });
                    }
                }
                last_ratio = ratio;
            }
        }
        prev = Some(mag);
    }
    let tol = policy.abs_tol.max(policy.rel_tol * total.abs());
    Err(LevyError::NumericFailure { achieved: prev.unwrap_or(f64::INFINITY), requested: tol })
}

/// `∫_0^1 f(x) dx` for integrands with an integrable singularity at 0.
pub fn integrate_unit(f: impl Fn(f64) -> f64, policy: &QuadPolicy) -> Result<QuadResult> {
    integrate_below(f, 1.0, policy)
}

/// `∫_0^upper f(x) dx` by dyadic pieces shrinking toward 0.
pub fn integrate_below(f: impl Fn(f64) -> f64, upper: f64, policy: &QuadPolicy) -> Result<QuadResult> {
    let piece = |k: usize| {
        let hi = upper * 0.5f64.powi(k as i32);
        let lo = hi * 0.5;
        if lo <= f64::MIN_POSITIVE {
            None
        } else {
            Some((lo, hi))
        }
    };
    geometric_series(&f, piece, 1100, policy)
}

/// `∫_lower^∞ f(x) dx` through `x = lower·e^u`, pieces of unit length in `u`.
pub fn integrate_above(f: impl Fn(f64) -> f64, lower: f64, policy: &QuadPolicy) -> Result<QuadResult> {
    assert!(lower > 0.0, "integrate_above needs a positive lower limit");
    let g = |u: f64| {
        let x = lower * u.exp();
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * x
        }
    };
    let piece = |k: usize| {
        let lo = k as f64;
        if lower * (lo + 1.0).exp() >= f64::MAX / 4.0 {
            None
        } else {
            Some((lo, lo + 1.0))
        }
    };
    geometric_series(&g, piece, 710, policy)
}
