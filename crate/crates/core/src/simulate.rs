//! Samplers for single increments `X(dt)` and for the two-point toy law,
//! with seeding that makes batches independent of the worker count.
//!
//! Seeding: draws are grouped in blocks of [`BLOCK`] consecutive global
//! indices, and block `b` runs its own ChaCha8 stream seeded with
//! [`mix_seed`]`(seed, b)`. The partition of blocks over threads therefore
//! cannot change any value. Single draws addressed by `stream_index` use a
//! stream seeded with `mix_seed(seed, stream_index)`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{LevyError, Result};
use crate::quad::QuadPolicy;
use crate::triplet::{JumpDist, LevyMeasure, LevyTriplet};

/// Draws per seeded block.
pub const BLOCK: usize = 1024;

/// Largest admissible expected number of simulated jumps per draw.
pub const MAX_POISSON_MEAN: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub truncation_delta: f64,
    pub gaussian_compensation: bool,
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { seed: 0, truncation_delta: 1e-4, gaussian_compensation: true, workers: 1 }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_delta > 0.0 && self.truncation_delta <= 1.0) {
            return Err(LevyError::InvalidParameter(format!(
                "truncation_delta must lie in (0, 1], got {}",
                self.truncation_delta
            )));
        }
        if self.workers == 0 {
            return Err(LevyError::InvalidParameter("workers must be positive".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream `index` under the master `seed`:
/// `splitmix64(seed ⊕ splitmix64(index))`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, index))
}

/// Exact sampler of a strictly `α`-stable increment over a time `dt`.
///
/// For the density `c₊x^{−1−α}` on `x > 0` and `c₋|x|^{−1−α}` on `x < 0`, the
/// strictly stable law (center `(c₊ − c₋)/(1 − α)` in the `1{|x|<1}`
/// convention, `α ≠ 1`) has exponent
/// `Γ(−α)[c₊(−iu)^α + c₋(iu)^α] = −s^α|u|^α(1 − iβ sgn(u) tan(πα/2))` with
/// `β = (c₊ − c₋)/(c₊ + c₋)` and
/// `s^α = (c₊ + c₋) Γ(2 − α) cos(πα/2) / (α(1 − α))`.
/// The factor `cos(πα/2)/(1 − α)` is evaluated as `sin(π(1 − α)/2)/(1 − α)`,
/// with limit `π/2` at `α = 1`, where only `β = 0` is strictly stable.
/// Self-similarity gives the scale `s·dt^{1/α}` at time `dt`.
/// Draws use the Chambers–Mallows–Stuck representation.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    alpha: f64,
    beta: f64,
    scale: f64,
    // CMS constants for α ≠ 1
    b: f64,
    s: f64,
}

impl StableSampler {
    pub fn new(alpha: f64, c_plus: f64, c_minus: f64, dt: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(LevyError::InvalidParameter(format!("stable alpha must lie in (0, 2), got {alpha}")));
        }
        if !(c_plus >= 0.0 && c_minus >= 0.0 && c_plus + c_minus > 0.0) {
            return Err(LevyError::InvalidParameter("need c_plus, c_minus ≥ 0 with c_plus + c_minus > 0".into()));
        }
        if !(dt > 0.0) {
            return Err(LevyError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let is_one = alpha == 1.0;
        if is_one && c_plus != c_minus {
            return Err(LevyError::InvalidParameter(
                "alpha = 1 is strictly stable only for c_plus = c_minus".into(),
            ));
        }
        let c = c_plus + c_minus;
        let ratio = if is_one { FRAC_PI_2 } else { (FRAC_PI_2 * (1.0 - alpha)).sin() / (1.0 - alpha) };
        let s_alpha = c * gamma(2.0 - alpha) * ratio / alpha;
        let scale = s_alpha.powf(1.0 / alpha) * dt.powf(1.0 / alpha);
        let beta = (c_plus - c_minus) / c;
        let (b, s) = if is_one {
            (0.0, 1.0)
        } else {
            let bt = beta * (FRAC_PI_2 * alpha).tan();
            (bt.atan() / alpha, (1.0 + bt * bt).powf(0.5 / alpha))
        };
        if ![scale, b, s].iter().all(|v| v.is_finite()) || scale <= 0.0 {
            return Err(LevyError::Simulation(format!(
                "stable parameter conversion overflowed at alpha = {alpha}; \
                 move alpha away from 1 or use a symmetric measure"
            )));
        }
        Ok(Self { alpha, beta, scale, b, s })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn skewness(&self) -> f64 {
        self.beta
    }

    /// Scale parameter at the configured `dt`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = PI * (rng.random::<f64>() - 0.5);
        if self.alpha == 1.0 {
            return self.scale * v.tan();
        }
        let w: f64 = Exp1.sample(rng);
        let a = self.alpha;
        let x = self.s * (a * (v + self.b)).sin() / v.cos().powf(1.0 / a)
            * ((v - a * (v + self.b)).cos() / w).powf((1.0 - a) / a);
        self.scale * x
    }
}

/// One side of a simulated jump component (sizes carry `sign`).
#[derive(Debug, Clone, Copy)]
enum Component {
    /// `x^{−1−α} e^{−λx}` on `(δ, 1)`: truncated-power proposal, acceptance `e^{−λ(x−δ)}`.
    Inner { alpha: f64, delta: f64, lambda: f64, sign: f64 },
    /// `x^{−1−α} e^{−λx}` on `[1, ∞)`: Pareto when `λ = 0`, otherwise
    /// `1 + Exp(λ)` proposal with acceptance `x^{−1−α}`.
    Outer { alpha: f64, lambda: f64, sign: f64 },
}

impl Component {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Component::Inner { alpha, delta, lambda, sign } => loop {
                let u: f64 = rng.random();
                let x = if alpha == 0.0 {
                    delta.powf(1.0 - u)
                } else {
                    let top = delta.powf(-alpha);
                    (top - u * (top - 1.0)).powf(-1.0 / alpha)
                };
                if lambda == 0.0 || rng.random::<f64>() < (-lambda * (x - delta)).exp() {
                    return sign * x;
                }
            },
            Component::Outer { alpha, lambda, sign } => {
                if lambda == 0.0 {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    return sign * u.powf(-1.0 / alpha);
                }
                loop {
                    let e: f64 = Exp1.sample(rng);
                    let x = 1.0 + e / lambda;
                    if rng.random::<f64>() < x.powf(-1.0 - alpha) {
                        return sign * x;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Jumps {
    None,
    Compound { poisson: Option<Poisson<f64>>, law: JumpDist, cum: Vec<f64> },
    Stable(StableSampler),
    Truncated { poisson: Option<Poisson<f64>>, comps: Vec<Component>, cum: Vec<f64> },
}

/// Expected number of jumps per draw that fixes the cutoff at small `dt`.
pub const SMALL_TIME_JUMPS: f64 = 256.0;

/// The cutoff used for `X(dt)`: `delta`, lowered to
/// `(dt (c₊ + c₋) / (α K))^{1/α}` with `K = SMALL_TIME_JUMPS` when that is
/// smaller, so that the cutoff follows the `dt^{1/α}` scale of the increment
/// and the Gaussian stand-in for the small jumps stays a small fraction of it.
pub fn effective_truncation(m: &LevyMeasure, dt: f64, delta: f64) -> f64 {
    match *m {
        LevyMeasure::StableLike { c_plus, c_minus, alpha } | LevyMeasure::TemperedStable { c_plus, c_minus, alpha, .. }
            if alpha > 0.0 =>
        {
            let scale = (dt * (c_plus + c_minus) / (alpha * SMALL_TIME_JUMPS)).powf(1.0 / alpha);
            delta.min(scale.max(1e-300))
        }
        _ => delta,
    }
}

/// Precomputed sampler of `X(dt)` for a triplet.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    drift: f64,
    gauss_sd: f64,
    jumps: Jumps,
}

fn poisson(mean: f64) -> Result<Option<Poisson<f64>>> {
    if mean > MAX_POISSON_MEAN {
        return Err(LevyError::Simulation(format!(
            "expected {mean:e} jumps per draw exceeds {MAX_POISSON_MEAN:e}; reduce dt or raise delta"
        )));
    }
    if mean <= 0.0 {
        return Ok(None);
    }
    Poisson::new(mean).map(Some).map_err(|e| LevyError::Simulation(format!("poisson law: {e}")))
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect()
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

impl IncrementSampler {
    pub fn new(t: &LevyTriplet, dt: f64, cfg: &SimConfig) -> Result<Self> {
        t.validate()?;
        cfg.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(LevyError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let policy = QuadPolicy::default();
        let delta = effective_truncation(&t.measure, dt, cfg.truncation_delta);
        let mut drift = t.gamma * dt;
        let mut var = t.sigma * t.sigma * dt;
        let jumps = match &t.measure {
            LevyMeasure::Zero => Jumps::None,
            LevyMeasure::CompoundPoisson { rate, jump_dist } => {
                drift -= dt * t.measure.inner_first_moment(&policy)?;
                let cum = match jump_dist {
                    JumpDist::Discrete { atoms } => cumulative(&atoms.iter().map(|a| a.prob).collect::<Vec<_>>()),
                    _ => Vec::new(),
                };
                Jumps::Compound { poisson: poisson(rate * dt)?, law: jump_dist.clone(), cum }
            }
            LevyMeasure::StableLike { c_plus, c_minus, alpha } if *alpha != 1.0 || c_plus == c_minus => {
                // the strictly stable law carries its own center; remove it to
                // get the increment of the triplet (0, 0, Π)
                if *alpha != 1.0 {
                    drift -= dt * (c_plus - c_minus) / (1.0 - alpha);
                }
                Jumps::Stable(StableSampler::new(*alpha, *c_plus, *c_minus, dt)?)
            }
            LevyMeasure::StableLike { c_plus, c_minus, alpha } | LevyMeasure::TemperedStable { c_plus, c_minus, alpha, .. } => {
                let (lp, lm) = match t.measure {
                    LevyMeasure::TemperedStable { lambda_plus, lambda_minus, .. } => (lambda_plus, lambda_minus),
                    _ => (0.0, 0.0),
                };
                let side_masses = |c: f64, lambda: f64| -> Result<(f64, f64)> {
                    if c == 0.0 {
                        return Ok((0.0, 0.0));
                    }
                    if lambda == 0.0 {
                        let inner = if *alpha == 0.0 { -delta.ln() } else { (delta.powf(-alpha) - 1.0) / alpha };
                        return Ok((c * inner, c / alpha));
                    }
                    let side = crate::triplet::TemperedSide { c, alpha: *alpha, lambda };
                    let one = |_: f64| 1.0;
                    Ok((side.integral(one, delta, 1.0, &policy)?, side.integral(one, 1.0, f64::INFINITY, &policy)?))
                };
                let (ip, op) = side_masses(*c_plus, lp)?;
                let (im, om) = side_masses(*c_minus, lm)?;
                let comps = vec![
                    Component::Inner { alpha: *alpha, delta, lambda: lp, sign: 1.0 },
                    Component::Outer { alpha: *alpha, lambda: lp, sign: 1.0 },
                    Component::Inner { alpha: *alpha, delta, lambda: lm, sign: -1.0 },
                    Component::Outer { alpha: *alpha, lambda: lm, sign: -1.0 },
                ];
                let weights = [ip, op, im, om];
                drift -= dt * t.measure.compensator_above(delta, &policy)?;
                if cfg.gaussian_compensation {
                    var += dt * t.measure.small_jump_variance(delta, &policy)?;
                }
                Jumps::Truncated { poisson: poisson(dt * weights.iter().sum::<f64>())?, comps, cum: cumulative(&weights) }
            }
        };
        Ok(Self { drift, gauss_sd: var.sqrt(), jumps })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut x = self.drift;
        if self.gauss_sd > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            x += self.gauss_sd * z;
        }
        match &self.jumps {
            Jumps::None => {}
            Jumps::Stable(s) => x += s.draw(rng),
            Jumps::Compound { poisson, law, cum } => {
                let k = poisson.as_ref().map_or(0, |p| p.sample(rng) as u64);
                for _ in 0..k {
                    x += match law {
                        JumpDist::Discrete { atoms } => atoms[pick(cum, rng.random())].size,
                        JumpDist::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
                        JumpDist::Gaussian { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
                    };
                }
            }
            Jumps::Truncated { poisson, comps, cum } => {
                let k = poisson.as_ref().map_or(0, |p| p.sample(rng) as u64);
                for _ in 0..k {
                    x += comps[pick(cum, rng.random())].draw(rng);
                }
            }
        }
        x
    }
}

/// One draw of `X(dt)` on the stream `stream_index`.
pub fn sample_increment(t: &LevyTriplet, dt: f64, cfg: &SimConfig, stream_index: u64) -> Result<f64> {
    let s = IncrementSampler::new(t, dt, cfg)?;
    Ok(s.draw(&mut stream_rng(cfg.seed, stream_index)))
}

/// One exact strictly stable draw on the stream `stream_index`.
pub fn sample_stable(alpha: f64, c_plus: f64, c_minus: f64, dt: f64, cfg: &SimConfig, stream_index: u64) -> Result<f64> {
    let s = StableSampler::new(alpha, c_plus, c_minus, dt)?;
    Ok(s.draw(&mut stream_rng(cfg.seed, stream_index)))
}

/// `Z_n = n^{−1/α}` with probability `1 − 1/n`, else `1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyModelParams {
    pub alpha: f64,
    pub n: u64,
}

impl ToyModelParams {
    pub fn new(alpha: f64, n: u64) -> Result<Self> {
        let p = Self { alpha, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(LevyError::InvalidParameter(format!("toy alpha must lie in (0, 2], got {}", self.alpha)));
        }
        if self.n < 2 {
            return Err(LevyError::InvalidParameter(format!("toy n must be at least 2, got {}", self.n)));
        }
        Ok(())
    }

    /// The small value `n^{−1/α}`.
    pub fn low(&self) -> f64 {
        (self.n as f64).powf(-1.0 / self.alpha)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() * (self.n as f64) < 1.0 {
            1.0
        } else {
            self.low()
        }
    }
}

pub fn sample_toy(params: &ToyModelParams, cfg: &SimConfig, stream_index: u64) -> Result<f64> {
    params.validate()?;
    Ok(params.draw(&mut stream_rng(cfg.seed, stream_index)))
}

/// `n` draws of `draw`, block-seeded and spread over `cfg.workers` threads.
pub fn batch_with<F>(n: usize, cfg: &SimConfig, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    cfg.validate()?;
    if n == 0 {
        return Err(LevyError::InvalidParameter("sample count must be at least 1".into()));
    }
    let mut out = vec![0.0; n];
    let mut blocks: Vec<(usize, &mut [f64])> = out.chunks_mut(BLOCK).enumerate().collect();
    let fill = |blocks: &mut [(usize, &mut [f64])]| {
        for (b, chunk) in blocks.iter_mut() {
            let mut rng = stream_rng(cfg.seed, *b as u64);
            chunk.iter_mut().for_each(|x| *x = draw(&mut rng));
        }
    };
    let workers = cfg.workers.min(blocks.len());
    if workers <= 1 {
        fill(&mut blocks);
    } else {
        let per = blocks.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for group in blocks.chunks_mut(per) {
                let fill = &fill;
                scope.spawn(move || fill(group));
            }
        });
    }
    Ok(out)
}

/// `n` independent draws of `X(dt)`; identical for every worker count.
pub fn batch_sample(t: &LevyTriplet, dt: f64, n: usize, cfg: &SimConfig) -> Result<Vec<f64>> {
    let s = IncrementSampler::new(t, dt, cfg)?;
    batch_with(n, cfg, |rng| s.draw(rng))
}

pub fn batch_toy(params: &ToyModelParams, n: usize, cfg: &SimConfig) -> Result<Vec<f64>> {
    params.validate()?;
    batch_with(n, cfg, |rng| params.draw(rng))
}

pub fn batch_stable(alpha: f64, c_plus: f64, c_minus: f64, dt: f64, n: usize, cfg: &SimConfig) -> Result<Vec<f64>> {
    let s = StableSampler::new(alpha, c_plus, c_minus, dt)?;
    batch_with(n, cfg, |rng| s.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean_and_se, median, quantile, variance};
    use crate::triplet::Atom;

    fn cp_atom(rate: f64, size: f64) -> LevyMeasure {
        LevyMeasure::CompoundPoisson { rate, jump_dist: JumpDist::Discrete { atoms: vec![Atom { size, prob: 1.0 }] } }
    }

    #[test]
    fn mixing_is_fixed() {
        // SplitMix64 reference outputs for inputs 0 and 1
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(1), 0x910A_2DEC_8902_5CC1);
        assert_ne!(mix_seed(0, 1), mix_seed(1, 0));
    }

    #[test]
    fn pure_gaussian_moments() {
        let t = LevyTriplet::new(0.0, 1.0, LevyMeasure::Zero).unwrap();
        let xs = batch_sample(&t, 1.0, 1_000_000, &SimConfig::with_seed(1)).unwrap();
        let (m, _) = mean_and_se(&xs);
        assert!(m.abs() < 3e-3);
        assert!((variance(&xs) - 1.0).abs() < 0.01);
    }

    #[test]
    fn pure_drift_is_deterministic() {
        let t = LevyTriplet::new(2.0, 0.0, LevyMeasure::Zero).unwrap();
        for i in 0..10 {
            assert_eq!(sample_increment(&t, 0.5, &SimConfig::with_seed(9), i).unwrap(), 1.0);
        }
    }

    #[test]
    fn compound_poisson_integer_valued_with_mean_rate() {
        let t = LevyTriplet::new(0.0, 0.0, cp_atom(3.0, 1.0)).unwrap();
        let xs = batch_sample(&t, 1.0, 1_000_000, &SimConfig::with_seed(2)).unwrap();
        assert!(xs.iter().all(|x| x.fract() == 0.0 && *x >= 0.0));
        let (m, _) = mean_and_se(&xs);
        assert!((m - 3.0).abs() < 0.03);
    }

    #[test]
    fn batch_independent_of_workers() {
        let t = LevyTriplet::new(
            0.1,
            0.5,
            LevyMeasure::TemperedStable { c_plus: 1.0, c_minus: 0.5, alpha: 0.8, lambda_plus: 1.0, lambda_minus: 2.0 },
        )
        .unwrap();
        for &n in &[10, 5000] {
            let a = batch_sample(&t, 0.01, n, &SimConfig { workers: 1, ..SimConfig::with_seed(5) }).unwrap();
            let b = batch_sample(&t, 0.01, n, &SimConfig { workers: 4, ..SimConfig::with_seed(5) }).unwrap();
            assert_eq!(a, b);
        }
        assert!(batch_sample(&t, 0.01, 0, &SimConfig::default()).is_err());
    }

    #[test]
    fn cauchy_quartiles() {
        let xs = batch_stable(1.0, 1.0, 1.0, 1.0, 1_000_000, &SimConfig::with_seed(3)).unwrap();
        let s = StableSampler::new(1.0, 1.0, 1.0, 1.0).unwrap().scale();
        assert!((s - PI).abs() < 1e-12);
        let z: Vec<f64> = xs.iter().map(|x| x / s).collect();
        assert!(median(&z).abs() < 0.01);
        // standard Cauchy quartiles are ±1
        assert!((quantile(&z, 0.75) - 1.0).abs() < 0.01);
        assert!((quantile(&z, 0.25) + 1.0).abs() < 0.01);
    }

    #[test]
    fn near_gaussian_stable_variance() {
        // as α → 2, S(α, 0, s) tends to N(0, 2s²)
        let alpha = 1.9999;
        let s = StableSampler::new(alpha, 1.0, 1.0, 1.0).unwrap().scale();
        let xs = batch_stable(alpha, 1.0, 1.0, 1.0, 1_000_000, &SimConfig::with_seed(4)).unwrap();
        let v = variance(&xs);
        assert!((v / (2.0 * s * s) - 1.0).abs() < 0.05, "{v} vs {}", 2.0 * s * s);
    }

    #[test]
    fn stable_rejects_asymmetric_one() {
        assert!(StableSampler::new(1.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn toy_law() {
        let p = ToyModelParams::new(1.0, 100).unwrap();
        let xs = batch_toy(&p, 1_000_000, &SimConfig::with_seed(6)).unwrap();
        let ones = xs.iter().filter(|&&x| x == 1.0).count() as f64 / xs.len() as f64;
        assert!((ones - 0.01).abs() < 5e-4);
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((m2 / 0.010099 - 1.0).abs() < 0.02);

        let p = ToyModelParams::new(2.0, 4).unwrap();
        let xs = batch_toy(&p, 10_000, &SimConfig::with_seed(6)).unwrap();
        assert!(xs.iter().all(|&x| x == 0.5 || x == 1.0));
        assert!(ToyModelParams::new(1.0, 1).is_err());
    }
}
