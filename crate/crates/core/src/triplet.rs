//! Characteristic triplets `(γ, σ, Π)` over four parametric Lévy-measure
//! families, with the Blumenthal–Getoor and tail indices, fractional moments
//! of the measure, and the classification of the small-time limit.
//!
//! Truncation convention: the Lévy–Khintchine compensator acts on jumps with
//! `|x| < 1`. For absolutely continuous measures the boundary is immaterial;
//! for compound-Poisson atoms at exactly `±1` it means they are *not*
//! compensated and count toward the outer region.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use statrs::function::gamma::gamma;

use crate::error::{LevyError, Result};
use crate::quad::{self, QuadPolicy};

/// Probabilities of a discrete jump law must sum to one within this.
const PROB_SUM_TOL: f64 = 1e-12;

/// `|γ′|` below this counts as zero drift.
pub const ZERO_DRIFT_TOL: f64 = 1e-10;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub size: f64,
    pub prob: f64,
}

/// Jump-size law of a compound-Poisson measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JumpDist {
    Discrete { atoms: Vec<Atom> },
    Uniform { a: f64, b: f64 },
    Gaussian { mean: f64, sd: f64 },
}

/// The Lévy measure `Π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LevyMeasure {
    Zero,
    CompoundPoisson { rate: f64, jump_dist: JumpDist },
    StableLike { c_plus: f64, c_minus: f64, alpha: f64 },
    TemperedStable { c_plus: f64, c_minus: f64, alpha: f64, lambda_plus: f64, lambda_minus: f64 },
}

/// Integration region for moments of the measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `|x| < 1`
    Inner,
    /// `|x| ≥ 1`
    Outer,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub gamma: f64,
    pub sigma: f64,
    pub measure: LevyMeasure,
}

/// Failure to read a triplet document.
#[derive(Debug, thiserror::Error)]
pub enum TripletParseError {
    #[error("malformed triplet JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] LevyError),
}

fn invalid(msg: impl Into<String>) -> LevyError {
    LevyError::InvalidParameter(msg.into())
}

impl JumpDist {
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpDist::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(invalid("discrete jump law needs at least one atom"));
                }
                for a in atoms {
                    if !a.size.is_finite() || a.size == 0.0 {
                        return Err(invalid(format!("atom size must be finite and non-zero, got {}", a.size)));
                    }
                    if !(a.prob > 0.0 && a.prob <= 1.0) {
                        return Err(invalid(format!("atom probability must lie in (0, 1], got {}", a.prob)));
                    }
                }
                let total: f64 = atoms.iter().map(|a| a.prob).sum();
                if (total - 1.0).abs() > PROB_SUM_TOL {
                    return Err(invalid(format!("atom probabilities sum to {total}, expected 1")));
                }
                Ok(())
            }
            JumpDist::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(invalid(format!("uniform jump law needs finite a < b, got [{a}, {b}]")));
                }
                Ok(())
            }
            JumpDist::Gaussian { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && *sd > 0.0) {
                    return Err(invalid(format!("gaussian jump law needs finite mean and sd > 0, got sd = {sd}")));
                }
                Ok(())
            }
        }
    }

    /// `E[|J|^q 1{J ∈ region}]`.
    fn abs_moment(&self, q: f64, region: Region, policy: &QuadPolicy) -> Result<f64> {
        let keep = |x: f64| match region {
            Region::Inner => x.abs() < 1.0,
            Region::Outer => x.abs() >= 1.0,
            Region::All => true,
        };
        match self {
            JumpDist::Discrete { atoms } => {
                Ok(atoms.iter().filter(|a| keep(a.size)).map(|a| a.prob * a.size.abs().powf(q)).sum())
            }
            JumpDist::Uniform { a, b } => {
                // antiderivative of |x|^q
                let anti = |x: f64| x.signum() * x.abs().powf(q + 1.0) / (q + 1.0);
                let over = |lo: f64, hi: f64| {
                    let (l, h) = (a.max(lo), b.min(hi));
                    if h > l {
                        anti(h) - anti(l)
                    } else {
                        0.0
                    }
                };
                let all = anti(*b) - anti(*a);
                let inner = over(-1.0, 1.0);
                let v = match region {
                    Region::All => all,
                    Region::Inner => inner,
                    Region::Outer => all - inner,
                };
                Ok(v / (b - a))
            }
            JumpDist::Gaussian { mean, sd } => {
                let dens = |x: f64| {
                    let z = (x - mean) / sd;
                    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
                };
                // fold both half-lines onto x > 0
                let folded = |x: f64| x.powf(q) * (dens(x) + dens(-x));
                let inner = || quad::integrate_unit(folded, policy).map(|r| r.value);
                let outer = || quad::integrate_above(folded, 1.0, policy).map(|r| r.value);
                match region {
                    Region::Inner => inner(),
                    Region::Outer => outer(),
                    Region::All => Ok(inner()? + outer()?),
                }
            }
        }
    }

    /// `E[J 1{|J| < 1}]`.
    fn truncated_mean(&self) -> f64 {
        match self {
            JumpDist::Discrete { atoms } => {
                atoms.iter().filter(|a| a.size.abs() < 1.0).map(|a| a.prob * a.size).sum()
            }
            JumpDist::Uniform { a, b } => {
                let (l, h) = (a.max(-1.0), b.min(1.0));
                if h > l {
                    0.5 * (h * h - l * l) / (b - a)
                } else {
                    0.0
                }
            }
            JumpDist::Gaussian { mean, sd } => {
                let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
                let cdf = |z: f64| 0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2));
                let (zl, zh) = ((-1.0 - mean) / sd, (1.0 - mean) / sd);
                sd * (phi(zl) - phi(zh)) + mean * (cdf(zh) - cdf(zl))
            }
        }
    }

    /// `E[e^{iζJ}]`.
    fn char_fn(&self, zeta: f64) -> Complex64 {
        match self {
            JumpDist::Discrete { atoms } => {
                atoms.iter().map(|a| a.prob * Complex64::from_polar(1.0, zeta * a.size)).sum()
            }
            JumpDist::Uniform { a, b } => {
                if zeta == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let num = Complex64::from_polar(1.0, zeta * b) - Complex64::from_polar(1.0, zeta * a);
                num / Complex64::new(0.0, zeta * (b - a))
            }
            JumpDist::Gaussian { mean, sd } => {
                Complex64::from_polar((-0.5 * sd * sd * zeta * zeta).exp(), zeta * mean)
            }
        }
    }
}

/// One half-line of a tempered-stable density: `c x^{-1-α} e^{-λx}` on `x > 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TemperedSide {
    pub c: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl TemperedSide {
    fn density(&self, x: f64) -> f64 {
        self.c * x.powf(-1.0 - self.alpha) * (-self.lambda * x).exp()
    }

    /// `∫_lo^hi g(x) c x^{-1-α} e^{-λx} dx` with `0 ≤ lo < hi ≤ ∞`.
    pub fn integral(&self, g: impl Fn(f64) -> f64, lo: f64, hi: f64, policy: &QuadPolicy) -> Result<f64> {
        if self.c == 0.0 || hi <= lo {
            return Ok(0.0);
        }
        let f = |x: f64| {
            let d = self.density(x);
            if d == 0.0 {
                0.0
            } else {
                g(x) * d
            }
        };
        let v = match (lo == 0.0, hi.is_infinite()) {
            (true, true) => {
                quad::integrate_below(f, 1.0, policy)?.value + quad::integrate_above(f, 1.0, policy)?.value
            }
            (true, false) => quad::integrate_below(f, hi, policy)?.value,
            (false, true) => quad::integrate_above(f, lo, policy)?.value,
            (false, false) => quad::integrate(f, lo, hi, policy)?.value,
        };
        Ok(v)
    }
}

fn check_stable_params(c_plus: f64, c_minus: f64, alpha: f64, lo_closed: bool) -> Result<()> {
    if !(c_plus.is_finite() && c_minus.is_finite() && c_plus >= 0.0 && c_minus >= 0.0) {
        return Err(invalid(format!("c_plus and c_minus must be finite and nonnegative, got {c_plus}, {c_minus}")));
    }
    if c_plus + c_minus <= 0.0 {
        return Err(invalid("c_plus + c_minus must be positive"));
    }
    let ok = if lo_closed { (0.0..2.0).contains(&alpha) } else { alpha > 0.0 && alpha < 2.0 };
    if !ok {
        let range = if lo_closed { "[0, 2)" } else { "(0, 2)" };
        return Err(invalid(format!("alpha must lie in {range}, got {alpha}")));
    }
    Ok(())
}

impl LevyMeasure {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure::Zero => Ok(()),
            LevyMeasure::CompoundPoisson { rate, jump_dist } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(invalid(format!("compound Poisson rate must be positive, got {rate}")));
                }
                jump_dist.validate()
            }
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => check_stable_params(*c_plus, *c_minus, *alpha, false),
            LevyMeasure::TemperedStable { c_plus, c_minus, alpha, lambda_plus, lambda_minus } => {
                check_stable_params(*c_plus, *c_minus, *alpha, true)?;
                if !(lambda_plus.is_finite() && lambda_minus.is_finite() && *lambda_plus > 0.0 && *lambda_minus > 0.0) {
                    return Err(invalid(format!(
                        "tempering rates must be positive, got {lambda_plus}, {lambda_minus}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `Π ≡ 0`.
    pub fn is_zero(&self) -> bool {
        matches!(self, LevyMeasure::Zero)
    }

    pub(crate) fn tempered_sides(&self) -> Option<(TemperedSide, TemperedSide)> {
        match *self {
            LevyMeasure::TemperedStable { c_plus, c_minus, alpha, lambda_plus, lambda_minus } => Some((
                TemperedSide { c: c_plus, alpha, lambda: lambda_plus },
                TemperedSide { c: c_minus, alpha, lambda: lambda_minus },
            )),
            _ => None,
        }
    }

    /// Whether `∫_{|x|<1} |x| Π(dx) < ∞`.
    pub fn has_finite_inner_first_moment(&self) -> bool {
        match self {
            LevyMeasure::Zero | LevyMeasure::CompoundPoisson { .. } => true,
            LevyMeasure::StableLike { alpha, .. } | LevyMeasure::TemperedStable { alpha, .. } => *alpha < 1.0,
        }
    }

    /// `∫_region |x|^q Π(dx)`, `+∞` when divergent.
    pub fn abs_moment(&self, q: f64, region: Region, policy: &QuadPolicy) -> Result<f64> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(invalid(format!("moment order must be positive and finite, got {q}")));
        }
        match self {
            LevyMeasure::Zero => Ok(0.0),
            LevyMeasure::CompoundPoisson { rate, jump_dist } => Ok(rate * jump_dist.abs_moment(q, region, policy)?),
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => {
                let c = c_plus + c_minus;
                let inner = if q > *alpha { c / (q - alpha) } else { f64::INFINITY };
                let outer = if q < *alpha { c / (alpha - q) } else { f64::INFINITY };
                Ok(match region {
                    Region::Inner => inner,
                    Region::Outer => outer,
                    Region::All => inner + outer,
                })
            }
            LevyMeasure::TemperedStable { alpha, .. } => {
                let (pos, neg) = self.tempered_sides().expect("tempered");
                let g = |x: f64| x.powf(q);
                let inner = || -> Result<f64> {
                    if q <= *alpha {
                        Ok(f64::INFINITY)
                    } else {
                        Ok(pos.integral(g, 0.0, 1.0, policy)? + neg.integral(g, 0.0, 1.0, policy)?)
                    }
                };
                let outer = || -> Result<f64> {
                    Ok(pos.integral(g, 1.0, f64::INFINITY, policy)? + neg.integral(g, 1.0, f64::INFINITY, policy)?)
                };
                match region {
                    Region::Inner => inner(),
                    Region::Outer => outer(),
                    Region::All => Ok(inner()? + outer()?),
                }
            }
        }
    }

    /// Signed `∫_{|x|<1} x Π(dx)`; `NotBoundedVariation` when `|x|` is not integrable there.
    pub fn inner_first_moment(&self, policy: &QuadPolicy) -> Result<f64> {
        if !self.has_finite_inner_first_moment() {
            return Err(LevyError::NotBoundedVariation);
        }
        match self {
            LevyMeasure::Zero => Ok(0.0),
            LevyMeasure::CompoundPoisson { rate, jump_dist } => Ok(rate * jump_dist.truncated_mean()),
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => Ok((c_plus - c_minus) / (1.0 - alpha)),
            LevyMeasure::TemperedStable { .. } => {
                let (pos, neg) = self.tempered_sides().expect("tempered");
                let id = |x: f64| x;
                Ok(pos.integral(id, 0.0, 1.0, policy)? - neg.integral(id, 0.0, 1.0, policy)?)
            }
        }
    }

    /// `Π(|x| > δ)` (finite for every `δ > 0`).
    pub fn mass_above(&self, delta: f64, policy: &QuadPolicy) -> Result<f64> {
        match self {
            LevyMeasure::Zero => Ok(0.0),
            LevyMeasure::CompoundPoisson { rate, .. } => Ok(*rate),
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => Ok((c_plus + c_minus) * delta.powf(-alpha) / alpha),
            LevyMeasure::TemperedStable { .. } => {
                let (pos, neg) = self.tempered_sides().expect("tempered");
                let one = |_: f64| 1.0;
                Ok(pos.integral(one, delta, f64::INFINITY, policy)? + neg.integral(one, delta, f64::INFINITY, policy)?)
            }
        }
    }

    /// `∫_{|x| ≤ δ} x² Π(dx)` for `0 < δ ≤ 1`; zero for finite measures, whose
    /// jumps are simulated exactly.
    pub fn small_jump_variance(&self, delta: f64, policy: &QuadPolicy) -> Result<f64> {
        match self {
            LevyMeasure::Zero | LevyMeasure::CompoundPoisson { .. } => Ok(0.0),
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => {
                Ok((c_plus + c_minus) * delta.powf(2.0 - alpha) / (2.0 - alpha))
            }
            LevyMeasure::TemperedStable { .. } => {
                let (pos, neg) = self.tempered_sides().expect("tempered");
                let sq = |x: f64| x * x;
                Ok(pos.integral(sq, 0.0, delta, policy)? + neg.integral(sq, 0.0, delta, policy)?)
            }
        }
    }

    /// Signed `∫_{δ < |x| < 1} x Π(dx)`, the compensator of the simulated
    /// jumps in `(δ, 1)`.
    pub fn compensator_above(&self, delta: f64, policy: &QuadPolicy) -> Result<f64> {
        match self {
            LevyMeasure::Zero => Ok(0.0),
            LevyMeasure::CompoundPoisson { .. } => self.inner_first_moment(policy),
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => {
                let integral = if (*alpha - 1.0).abs() < 1e-12 {
                    -delta.ln()
                } else {
                    (1.0 - delta.powf(1.0 - alpha)) / (1.0 - alpha)
                };
                Ok((c_plus - c_minus) * integral)
            }
            LevyMeasure::TemperedStable { .. } => {
                let (pos, neg) = self.tempered_sides().expect("tempered");
                let id = |x: f64| x;
                Ok(pos.integral(id, delta, 1.0, policy)? - neg.integral(id, delta, 1.0, policy)?)
            }
        }
    }
}

/// `∫_0^∞ (e^{iux} − 1 − iux 1{x<1}) x^{-1-α} dx`, the one-sided stable exponent.
fn stable_side_exponent(u: f64, alpha: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if (alpha - 1.0).abs() < 1e-12 {
        let re = -0.5 * PI * u.abs();
        let im = u * (1.0 - EULER_GAMMA - u.abs().ln());
        return Complex64::new(re, im);
    }
    // (−iu)^α on the principal branch
    let power = Complex64::from_polar(u.abs().powf(alpha), -u.signum() * 0.5 * PI * alpha);
    gamma(-alpha) * power - Complex64::new(0.0, u / (1.0 - alpha))
}

/// `cos(t) − 1` without cancellation.
fn cos_m1(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    -2.0 * s * s
}

/// `sin(t) − t` without cancellation for small `t`.
fn sin_m_id(t: f64) -> f64 {
    if t.abs() < 1e-2 {
        let t2 = t * t;
        -t * t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0))
    } else {
        t.sin() - t
    }
}

impl LevyTriplet {
    pub fn new(gamma: f64, sigma: f64, measure: LevyMeasure) -> Result<Self> {
        let t = Self { gamma, sigma, measure };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(invalid(format!("gamma must be finite, got {}", self.gamma)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        self.measure.validate()
    }

    /// Parses and validates the triplet JSON document.
    pub fn from_json(s: &str) -> std::result::Result<Self, TripletParseError> {
        let t: LevyTriplet = serde_json::from_str(s)?;
        t.validate()?;
        Ok(t)
    }

    /// The Lévy–Khintchine exponent `Ψ(ζ)`.
    pub fn characteristic_exponent(&self, zeta: f64) -> Result<Complex64> {
        let policy = QuadPolicy::default();
        let base = Complex64::new(-0.5 * self.sigma * self.sigma * zeta * zeta, self.gamma * zeta);
        let jumps = match &self.measure {
            LevyMeasure::Zero => Complex64::new(0.0, 0.0),
            LevyMeasure::CompoundPoisson { rate, jump_dist } => {
                let phi = jump_dist.char_fn(zeta);
                *rate * (phi - 1.0) - Complex64::new(0.0, zeta * rate * jump_dist.truncated_mean())
            }
            LevyMeasure::StableLike { c_plus, c_minus, alpha } => {
                *c_plus * stable_side_exponent(zeta, *alpha) + *c_minus * stable_side_exponent(-zeta, *alpha)
            }
            LevyMeasure::TemperedStable { .. } => {
                let (pos, neg) = self.measure.tempered_sides().expect("tempered");
                let re_g = |x: f64| cos_m1(zeta * x);
                let im_inner = |x: f64| sin_m_id(zeta * x);
                let im_outer = |x: f64| (zeta * x).sin();
                let side = |s: &TemperedSide| -> Result<(f64, f64)> {
                    let re = s.integral(re_g, 0.0, f64::INFINITY, &policy)?;
                    let im = s.integral(im_inner, 0.0, 1.0, &policy)? + s.integral(im_outer, 1.0, f64::INFINITY, &policy)?;
                    Ok((re, im))
                };
                let (pr, pi) = side(&pos)?;
                let (nr, ni) = side(&neg)?;
                Complex64::new(pr + nr, pi - ni)
            }
        };
        Ok(base + jumps)
    }

    /// Drift `γ′ = γ − ∫_{|x|<1} x Π(dx)` of the bounded-variation form.
    pub fn bv_drift(&self) -> Result<f64> {
        Ok(self.gamma - self.measure.inner_first_moment(&QuadPolicy::default())?)
    }

    /// Paths of bounded variation: `σ = 0` and finite inner first moment.
    pub fn is_bounded_variation(&self) -> bool {
        self.sigma == 0.0 && self.measure.has_finite_inner_first_moment()
    }

    pub fn classify_small_time_limit(&self) -> Result<SmallTimeLimit> {
        classify_small_time_limit(self)
    }
}

/// Blumenthal–Getoor index `β⁰`.
pub fn bg_index(m: &LevyMeasure) -> f64 {
    match m {
        LevyMeasure::Zero | LevyMeasure::CompoundPoisson { .. } => 0.0,
        LevyMeasure::StableLike { alpha, .. } | LevyMeasure::TemperedStable { alpha, .. } => *alpha,
    }
}

/// Tail index `β∞`.
pub fn tail_index(m: &LevyMeasure) -> f64 {
    match m {
        LevyMeasure::StableLike { alpha, .. } => *alpha,
        _ => f64::INFINITY,
    }
}

/// `∫_region |x|^q Π(dx)` with the default quadrature policy.
pub fn frac_moment_measure(m: &LevyMeasure, q: f64, region: Region) -> Result<f64> {
    m.abs_moment(q, region, &QuadPolicy::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    BrownianMotion,
    LinearDrift,
    StrictlyStable,
    NoNontrivialLimit,
}

/// Parameters of the zoomed-in limit process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LimitParams {
    Brownian { sigma_hat: f64 },
    Drift { gamma_hat: f64 },
    Stable { c_plus_hat: f64, c_minus_hat: f64, alpha_hat: f64 },
    None {},
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallTimeLimit {
    pub kind: LimitKind,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub alpha: Option<f64>,
    pub limit_params: LimitParams,
}

impl SmallTimeLimit {
    fn none() -> Self {
        Self { kind: LimitKind::NoNontrivialLimit, h: None, alpha: None, limit_params: LimitParams::None {} }
    }

    /// `α` of the unified scaling-function form (2, 1 or `α̂`).
    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha.ok_or(LevyError::NoLimit)
    }
}

pub fn classify_small_time_limit(t: &LevyTriplet) -> Result<SmallTimeLimit> {
    if t.sigma > 0.0 {
        return Ok(SmallTimeLimit {
            kind: LimitKind::BrownianMotion,
            h: Some(0.5),
            alpha: Some(2.0),
            limit_params: LimitParams::Brownian { sigma_hat: t.sigma },
        });
    }
    if t.is_bounded_variation() {
        let drift = t.bv_drift()?;
        if drift.abs() > ZERO_DRIFT_TOL {
            return Ok(SmallTimeLimit {
                kind: LimitKind::LinearDrift,
                h: Some(1.0),
                alpha: Some(1.0),
                limit_params: LimitParams::Drift { gamma_hat: drift },
            });
        }
    }
    match t.measure {
        LevyMeasure::StableLike { c_plus, c_minus, alpha } | LevyMeasure::TemperedStable { c_plus, c_minus, alpha, .. } => {
            if alpha <= 0.0 {
                // gamma-process-like measures: no strictly stable limit
                return Ok(SmallTimeLimit::none());
            }
            if (alpha - 1.0).abs() < 1e-12 && c_plus != c_minus {
                return Ok(SmallTimeLimit::none());
            }
            Ok(SmallTimeLimit {
                kind: LimitKind::StrictlyStable,
                h: Some(1.0 / alpha),
                alpha: Some(alpha),
                limit_params: LimitParams::Stable { c_plus_hat: c_plus, c_minus_hat: c_minus, alpha_hat: alpha },
            })
        }
        LevyMeasure::Zero | LevyMeasure::CompoundPoisson { .. } => Ok(SmallTimeLimit::none()),
    }
}
