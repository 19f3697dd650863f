//! Small-time scaling functions `τ⁰`, their exact Legendre–Fenchel
//! conjugates, and the large-deviation rate function of the rate sequence
//! `log|X(1/n)| / log n`.

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::triplet::{tail_index, LevyTriplet, LimitKind};

/// Relative tolerance for continuity at breakpoints.
const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "crate::ext")]
    pub q_lo: f64,
    #[serde(with = "crate::ext")]
    pub q_hi: f64,
    pub slope: f64,
    pub value_at_lo: f64,
}

impl Segment {
    pub fn eval(&self, q: f64) -> f64 {
        if q == self.q_lo || self.slope == 0.0 {
            self.value_at_lo
        } else {
            self.value_at_lo + self.slope * (q - self.q_lo)
        }
    }

    /// Value (or limit) at the upper end; `None` for an unbounded segment.
    pub fn value_at_hi(&self) -> Option<f64> {
        self.q_hi.is_finite().then(|| self.eval(self.q_hi))
    }
}

/// Piecewise-linear function, `+∞` outside its domain.
///
/// The domain is the span of the segments; `domain_closed` says whether each
/// finite end belongs to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearFn {
    segments: Vec<Segment>,
    #[serde(with = "crate::ext::pair")]
    domain: (f64, f64),
    #[serde(default = "both_closed")]
    domain_closed: (bool, bool),
}

fn both_closed() -> (bool, bool) {
    (true, true)
}

impl PiecewiseLinearFn {
    pub fn new(segments: Vec<Segment>, domain_closed: (bool, bool)) -> Result<Self> {
        let f = Self {
            domain: (
                segments.first().map_or(f64::NAN, |s| s.q_lo),
                segments.last().map_or(f64::NAN, |s| s.q_hi),
            ),
            segments,
            domain_closed,
        };
        f.validate()?;
        Ok(f)
    }

    /// Single affine piece `value_at_lo + slope·(q − lo)` on `[lo, hi]`.
    pub fn affine(lo: f64, hi: f64, slope: f64, value_at_lo: f64, closed: (bool, bool)) -> Result<Self> {
        Self::new(vec![Segment { q_lo: lo, q_hi: hi, slope, value_at_lo }], closed)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LevyError::InvalidParameter(m));
        if self.segments.is_empty() {
            return Err(LevyError::EmptyDomain("piecewise-linear function without segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.q_lo < s.q_hi) || s.q_lo == f64::INFINITY || s.q_hi == f64::NEG_INFINITY {
                return bad(format!("segment {i} has empty range [{}, {}]", s.q_lo, s.q_hi));
            }
            if !s.slope.is_finite() || !s.value_at_lo.is_finite() {
                return bad(format!("segment {i} has non-finite slope or value"));
            }
            if s.q_lo == f64::NEG_INFINITY && s.slope != 0.0 {
                return bad(format!("segment {i} starts at -inf with non-zero slope"));
            }
        }
        for (i, w) in self.segments.windows(2).enumerate() {
            if w[0].q_hi != w[1].q_lo {
                return bad(format!("segments {i} and {} are not contiguous", i + 1));
            }
            let left = w[0].value_at_hi().expect("interior breakpoint is finite");
            let right = w[1].value_at_lo;
            if (left - right).abs() > CONTINUITY_TOL * left.abs().max(right.abs()).max(1.0) {
                return bad(format!("discontinuity at q = {}: {left} vs {right}", w[1].q_lo));
            }
        }
        if self.domain != (self.segments[0].q_lo, self.segments[self.segments.len() - 1].q_hi) {
            return bad("domain does not match the segment span".into());
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn domain_closed(&self) -> (bool, bool) {
        self.domain_closed
    }

    pub fn in_domain(&self, q: f64) -> bool {
        let (lo, hi) = self.domain;
        let (cl, ch) = self.domain_closed;
        (q > lo || (cl && q == lo)) && (q < hi || (ch && q == hi))
    }

    pub fn eval(&self, q: f64) -> f64 {
        if !self.in_domain(q) {
            return f64::INFINITY;
        }
        // the segment whose [q_lo, q_hi) holds q; the last one also owns its end
        let idx = self.segments.partition_point(|s| s.q_hi <= q).min(self.segments.len() - 1);
        self.segments[idx].eval(q)
    }

    /// Interior breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.q_lo).collect()
    }

    /// Convexity, exact for a continuous piecewise-linear function.
    pub fn is_convex(&self) -> bool {
        self.segments.windows(2).all(|w| w[0].slope <= w[1].slope)
    }

    pub fn negate(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { slope: -s.slope, value_at_lo: -s.value_at_lo, ..*s })
            .collect();
        Self { segments, domain: self.domain, domain_closed: self.domain_closed }
    }

    /// Restriction to `[lo, hi]` intersected with the domain.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let mut segs = Vec::new();
        for s in &self.segments {
            let (a, b) = (s.q_lo.max(lo), s.q_hi.min(hi));
            if a < b {
                let value_at_lo = if a == s.q_lo { s.value_at_lo } else { s.eval(a) };
                segs.push(Segment { q_lo: a, q_hi: b, slope: s.slope, value_at_lo });
            }
        }
        if segs.is_empty() {
            return Err(LevyError::EmptyDomain(format!(
                "restriction of [{}, {}] to [{lo}, {hi}] is empty",
                self.domain.0, self.domain.1
            )));
        }
        let closed = (
            if lo > self.domain.0 { true } else { self.domain_closed.0 },
            if hi < self.domain.1 { true } else { self.domain_closed.1 },
        );
        Self::new(segs, closed)
    }
}

/// Upper envelope `max_k (m_k x + b_k)` on `[lo, hi]` as a piecewise-linear function.
pub(crate) fn upper_envelope(lines: &[(f64, f64)], lo: f64, hi: f64, closed: (bool, bool)) -> Result<PiecewiseLinearFn> {
    if !(lo < hi) {
        return Err(LevyError::Unsupported(format!("degenerate envelope domain [{lo}, {hi}]")));
    }
    let mut sorted: Vec<(f64, f64)> = lines.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // among equal slopes only the highest intercept matters
    sorted.dedup_by(|later, earlier| {
        if later.0 == earlier.0 {
            *earlier = *later;
            true
        } else {
            false
        }
    });
    let cross = |a: (f64, f64), b: (f64, f64)| (a.1 - b.1) / (b.0 - a.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for l in sorted {
        while hull.len() >= 2 {
            let (l1, l2) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(l1, l) <= cross(l1, l2) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let mut segs = Vec::new();
    for (i, &(m, b)) in hull.iter().enumerate() {
        let left = if i == 0 { f64::NEG_INFINITY } else { cross(hull[i - 1], hull[i]) };
        let right = if i + 1 == hull.len() { f64::INFINITY } else { cross(hull[i], hull[i + 1]) };
        let (a, c) = (left.max(lo), right.min(hi));
        if a < c {
            let value_at_lo = if a.is_finite() { m * a + b } else { b };
            segs.push(Segment { q_lo: a, q_hi: c, slope: m, value_at_lo });
        }
    }
    // glue breakpoints so contiguity holds bit-exactly
    for i in 1..segs.len() {
        let q = segs[i - 1].q_hi;
        segs[i].q_lo = q;
        segs[i].value_at_lo = segs[i].slope * q + hull_intercept(&hull, segs[i].slope);
    }
    PiecewiseLinearFn::new(segs, closed)
}

fn hull_intercept(hull: &[(f64, f64)], slope: f64) -> f64 {
    hull.iter().find(|l| l.0 == slope).map_or(0.0, |l| l.1)
}

/// Exact Legendre–Fenchel conjugate `f*(x) = sup_q (qx − f(q))` of a
/// piecewise-linear `f`: the supremum is attained at a breakpoint or the
/// conjugate is `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conjugate {
    /// Candidate maximizers `(q_k, f(q_k))`, domain ends included as limits.
    pub points: Vec<(f64, f64)>,
    /// `f*(x) = +∞` for `x` above this (an unbounded-above domain).
    #[serde(with = "crate::ext::opt")]
    pub upper_slope: Option<f64>,
    /// `f*(x) = +∞` for `x` below this (an unbounded-below domain).
    #[serde(with = "crate::ext::opt")]
    pub lower_slope: Option<f64>,
}

impl Conjugate {
    pub fn eval(&self, x: f64) -> f64 {
        if self.upper_slope.is_some_and(|s| x > s) || self.lower_slope.is_some_and(|s| x < s) {
            return f64::INFINITY;
        }
        self.points.iter().map(|&(q, fq)| q * x - fq).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Interval where the conjugate is finite.
    pub fn domain(&self) -> (f64, f64) {
        (self.lower_slope.unwrap_or(f64::NEG_INFINITY), self.upper_slope.unwrap_or(f64::INFINITY))
    }

    /// The conjugate as a piecewise-linear function on its finite domain.
    pub fn to_plf(&self) -> Result<PiecewiseLinearFn> {
        let (lo, hi) = self.domain();
        let lines: Vec<(f64, f64)> = self.points.iter().map(|&(q, fq)| (q, -fq)).collect();
        upper_envelope(&lines, lo, hi, (lo.is_finite(), hi.is_finite()))
    }
}

/// Exact conjugate over the finite domain of `f`.
pub fn legendre_transform(f: &PiecewiseLinearFn) -> Result<Conjugate> {
    let mut points = Vec::new();
    let mut upper_slope = None;
    let mut lower_slope = None;
    for s in f.segments() {
        if s.q_lo.is_finite() {
            points.push((s.q_lo, s.value_at_lo));
        } else {
            lower_slope = Some(s.slope);
        }
        match s.value_at_hi() {
            Some(v) => points.push((s.q_hi, v)),
            None => upper_slope = Some(s.slope),
        }
    }
    if points.is_empty() {
        // a single unbounded flat segment: f ≡ c on ℝ
        let s = f.segments()[0];
        points.push((0.0, s.value_at_lo));
    }
    points.dedup();
    Ok(Conjugate { points, upper_slope, lower_slope })
}

/// Exact conjugate of `f` restricted to `[lo, hi]`.
pub fn legendre_transform_restricted(f: &PiecewiseLinearFn, lo: f64, hi: f64) -> Result<Conjugate> {
    legendre_transform(&f.restrict(lo, hi)?)
}

/// Brute-force `max_{q ∈ grid} (qx − f(q))`, for cross-validation only.
pub fn legendre_transform_on_grid(f: &PiecewiseLinearFn, q_grid: &[f64], x: f64) -> f64 {
    q_grid
        .iter()
        .map(|&q| (q, f.eval(q)))
        .filter(|(_, v)| v.is_finite())
        .map(|(q, v)| q * x - v)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The unified scaling function: `−q/α` up to `min(α, β∞)`, then `−1` up to
/// `β∞` (exclusive); `+∞` from `β∞` on.
pub fn tau0_unified(alpha: f64, beta_inf: f64) -> Result<PiecewiseLinearFn> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(LevyError::InvalidParameter(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(beta_inf > 0.0) {
        return Err(LevyError::InvalidParameter(format!("tail index must be positive, got {beta_inf}")));
    }
    let kink = alpha.min(beta_inf);
    let mut segs = vec![Segment { q_lo: 0.0, q_hi: kink, slope: -1.0 / alpha, value_at_lo: 0.0 }];
    if beta_inf > alpha {
        segs.push(Segment { q_lo: alpha, q_hi: beta_inf, slope: 0.0, value_at_lo: -1.0 });
    }
    PiecewiseLinearFn::new(segs, (true, false))
}

/// `τ⁰(q) = −Hq`, the scaling function when `Π ≡ 0`.
pub fn tau0_monofractal(h: f64) -> Result<PiecewiseLinearFn> {
    PiecewiseLinearFn::affine(0.0, f64::INFINITY, -h, 0.0, (true, false))
}

pub fn theoretical_tau0(t: &LevyTriplet) -> Result<PiecewiseLinearFn> {
    let limit = t.classify_small_time_limit()?;
    let (h, alpha) = match (limit.h, limit.alpha) {
        (Some(h), Some(a)) => (h, a),
        _ => return Err(LevyError::NoLimit),
    };
    if t.measure.is_zero() {
        return tau0_monofractal(h);
    }
    if limit.kind == LimitKind::LinearDrift && crate::triplet::bg_index(&t.measure) >= 1.0 {
        return Err(LevyError::Unsupported(
            "drift limit with Blumenthal–Getoor index 1: the moment interval may be empty".into(),
        ));
    }
    tau0_unified(alpha, tail_index(&t.measure))
}

/// Rate function of the rate sequence, with the region where only a lower
/// bound is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub pieces: PiecewiseLinearFn,
    /// `(−∞, −1/α)`: the stored values are the lower bound `max{0, αx + 1}`.
    #[serde(with = "crate::ext::pair")]
    pub partial_region: (f64, f64),
    pub exposed_points: Vec<f64>,
    pub alpha: f64,
    #[serde(with = "crate::ext")]
    pub beta_inf: f64,
}

impl RateFunction {
    pub fn eval(&self, x: f64) -> f64 {
        self.pieces.eval(x)
    }

    pub fn is_bound_only(&self, x: f64) -> bool {
        x < self.partial_region.1
    }
}

/// Closed-form rate function for given `α` and `β∞ > α`.
pub fn rate_function_from(alpha: f64, beta_inf: f64) -> Result<RateFunction> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(LevyError::InvalidParameter(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    if !(beta_inf > alpha) {
        return Err(LevyError::NoIntermittentRegime { alpha, beta_inf });
    }
    let x0 = -1.0 / alpha;
    let mut segs = vec![
        Segment { q_lo: f64::NEG_INFINITY, q_hi: x0, slope: 0.0, value_at_lo: 0.0 },
        Segment { q_lo: x0, q_hi: 0.0, slope: alpha, value_at_lo: 0.0 },
    ];
    if beta_inf.is_finite() {
        segs.push(Segment { q_lo: 0.0, q_hi: f64::INFINITY, slope: beta_inf, value_at_lo: 1.0 });
    }
    Ok(RateFunction {
        pieces: PiecewiseLinearFn::new(segs, (false, true))?,
        partial_region: (f64::NEG_INFINITY, x0),
        exposed_points: vec![x0, 0.0],
        alpha,
        beta_inf,
    })
}

pub fn rate_function(t: &LevyTriplet) -> Result<RateFunction> {
    if t.measure.is_zero() {
        return Err(LevyError::Monofractal);
    }
    let alpha = t.classify_small_time_limit()?.require_alpha()?;
    rate_function_from(alpha, tail_index(&t.measure))
}

pub fn is_intermittent(t: &LevyTriplet) -> Result<bool> {
    let tau = theoretical_tau0(t)?;
    if t.measure.is_zero() {
        return Ok(false);
    }
    let alpha = t.classify_small_time_limit()?.require_alpha()?;
    Ok(tail_index(&t.measure) > alpha && tau.segments().len() > 1)
}

/// Outcome of the grid checks on a candidate scaling function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauPropertyReport {
    pub convex: bool,
    pub ratio_nondecreasing: bool,
    /// `inf_{q > 0} f(q)/q`; negative-order values obey `f(q) ≥ q · inf_ratio`.
    #[serde(with = "crate::ext")]
    pub inf_ratio: f64,
    pub violations: Vec<String>,
}

impl TauPropertyReport {
    /// Lower bound on `τ⁰(q)` for `q < 0`.
    pub fn negative_q_bound(&self, q: f64) -> f64 {
        q * self.inf_ratio
    }
}

/// Exact `inf_{q > 0, q ∈ dom} f(q)/q`.
pub fn inf_ratio(f: &PiecewiseLinearFn) -> f64 {
    let mut best = f64::INFINITY;
    for s in f.segments() {
        let (a, b) = (s.q_lo.max(0.0), s.q_hi);
        if !(a < b) {
            continue;
        }
        // f/q = slope + c/q on the segment, monotone in q
        let c = s.eval(a) - s.slope * a;
        if a == 0.0 {
            if c < 0.0 {
                return f64::NEG_INFINITY;
            }
            if c == 0.0 {
                best = best.min(s.slope);
            }
        } else {
            best = best.min(s.eval(a) / a);
        }
        best = best.min(if b.is_finite() { s.eval(b) / b } else { s.slope });
    }
    best
}

/// Convexity (sampled and exact), monotonicity of `q ↦ f(q)/q` on the grid,
/// and the negative-order bound. Violations are reported, not raised.
pub fn check_tau_properties(f: &PiecewiseLinearFn, grid: &[f64]) -> TauPropertyReport {
    const TOL: f64 = 1e-12;
    let mut violations = Vec::new();
    let pts: Vec<(f64, f64)> = grid.iter().map(|&q| (q, f.eval(q))).filter(|p| p.1.is_finite()).collect();
    let mut convex = f.is_convex();
    if !convex {
        violations.push("slopes decrease at a breakpoint".to_string());
    }
    for w in pts.windows(3) {
        let ((q0, v0), (q1, v1), (q2, v2)) = (w[0], w[1], w[2]);
        let chord = v0 + (v2 - v0) * (q1 - q0) / (q2 - q0);
        if v1 > chord + TOL * (1.0 + chord.abs()) {
            convex = false;
            violations.push(format!("convexity fails at q = {q1}"));
        }
    }
    let mut ratio_nondecreasing = true;
    let ratios: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 > 0.0).map(|&(q, v)| (q, v / q)).collect();
    for w in ratios.windows(2) {
        if w[1].1 < w[0].1 - TOL * (1.0 + w[0].1.abs()) {
            ratio_nondecreasing = false;
            violations.push(format!("f(q)/q decreases between q = {} and {}", w[0].0, w[1].0));
        }
    }
    TauPropertyReport { convex, ratio_nondecreasing, inf_ratio: inf_ratio(f), violations }
}
