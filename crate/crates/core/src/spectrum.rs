//! Multifractal formalism: the spectrum `d(h) = inf_q (hq − ζ(q) + 1)` built
//! from the moment scaling exponents `ζ = −τ⁰`, and the closed-form spectrum
//! of singularities of Lévy processes without Brownian part.

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::scaling::{theoretical_tau0, upper_envelope, PiecewiseLinearFn};
use crate::triplet::{bg_index, LevyTriplet, LimitKind};

/// Tolerance of the formalism/closed-form comparison.
pub const FORMALISM_TOL: f64 = 1e-10;

/// `h ↦ d(h)` on `[h_lo, h_hi]`, `−∞` outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySpectrum {
    pub support: (f64, f64),
    pub values: PiecewiseLinearFn,
}

impl SingularitySpectrum {
    pub fn eval(&self, h: f64) -> f64 {
        let (lo, hi) = self.support;
        if !(h >= lo && h <= hi) {
            return f64::NEG_INFINITY;
        }
        if lo == hi {
            return self.values.segments()[0].value_at_lo;
        }
        let d = self.values.eval(h);
        if d < 0.0 {
            f64::NEG_INFINITY
        } else {
            d
        }
    }

    /// Largest value and where it is attained (the right-most maximizer).
    pub fn max_point(&self) -> (f64, f64) {
        let mut best = (self.support.0, self.eval(self.support.0));
        let mut candidates: Vec<f64> = self.values.breakpoints();
        candidates.push(self.support.1);
        for h in candidates {
            let d = self.eval(h);
            if d >= best.1 {
                best = (h, d);
            }
        }
        best
    }
}

/// `ζ(q) = −τ⁰(q)` on the finite domain of `τ⁰`.
pub fn zeta_from_tau0(tau0: &PiecewiseLinearFn) -> PiecewiseLinearFn {
    tau0.negate()
}

/// The formalism spectrum, exact from the breakpoints of `ζ`.
///
/// The infimum runs over the finite domain of `ζ`. Where it is attained only
/// at the left end `q = q_lo` (that is, `h` exceeds the initial slope of `ζ`)
/// no positive moment order selects `h` and the level set is taken to be
/// empty; likewise negative infima. Both give `−∞`.
pub fn formalism_spectrum(zeta: &PiecewiseLinearFn) -> Result<SingularitySpectrum> {
    let segs = zeta.segments();
    let first = segs[0];
    if !first.q_lo.is_finite() {
        return Err(LevyError::Unsupported("zeta must have a finite lower domain end".into()));
    }
    // candidate minimizers: finite breakpoints and ends, giving lines h ↦ hq − ζ(q) + 1
    let mut knots: Vec<(f64, f64)> = Vec::new();
    for s in segs {
        knots.push((s.q_lo, s.value_at_lo));
        if let Some(v) = s.value_at_hi() {
            knots.push((s.q_hi, v));
        }
    }
    let last = segs[segs.len() - 1];
    let mut h_lo = if last.q_hi.is_infinite() { last.slope } else { f64::NEG_INFINITY };
    for &(q, z) in &knots {
        if q > 0.0 {
            h_lo = h_lo.max((z - 1.0) / q);
        } else if 1.0 - z < 0.0 {
            return Err(LevyError::EmptyDomain(format!("d(h) < 0 for every h: zeta({q}) = {z} exceeds 1")));
        }
    }
    let h_hi = first.slope;
    if !(h_lo <= h_hi) || !h_lo.is_finite() {
        return Err(LevyError::EmptyDomain(format!("formalism support [{h_lo}, {h_hi}] is empty")));
    }
    // lower envelope of the lines is minus the upper envelope of their negatives
    let neg: Vec<(f64, f64)> = knots.iter().map(|&(q, z)| (-q, z - 1.0)).collect();
    let values = if h_lo < h_hi {
        upper_envelope(&neg, h_lo, h_hi, (true, true))?.negate()
    } else {
        let d = knots.iter().map(|&(q, z)| h_lo * q - z + 1.0).fold(f64::INFINITY, f64::min);
        // a point support: store a flat unit-length carrier, evaluated only at h_lo
        PiecewiseLinearFn::affine(h_lo, h_lo + 1.0, 0.0, d, (true, true))?
    };
    Ok(SingularitySpectrum { support: (h_lo, h_hi), values })
}

/// `d(h) = β⁰h` on `[0, 1/β⁰]`.
pub fn levy_spectrum(beta0: f64) -> Result<SingularitySpectrum> {
    if !(beta0 > 0.0 && beta0 <= 2.0) {
        return Err(LevyError::InvalidParameter(format!("beta0 must lie in (0, 2], got {beta0}")));
    }
    let h_hi = 1.0 / beta0;
    Ok(SingularitySpectrum {
        support: (0.0, h_hi),
        values: PiecewiseLinearFn::affine(0.0, h_hi, beta0, 0.0, (true, true))?,
    })
}

/// Checks the formalism against the closed-form spectrum for a triplet with a
/// strictly stable limit and no Brownian part.
pub fn verify_formalism(t: &LevyTriplet) -> Result<bool> {
    if t.sigma > 0.0 {
        return Err(LevyError::GaussianComponent(t.sigma));
    }
    let limit = t.classify_small_time_limit()?;
    if limit.kind != LimitKind::StrictlyStable {
        return Err(LevyError::Unsupported(format!(
            "the formalism check needs a strictly stable small-time limit, got {:?}",
            limit.kind
        )));
    }
    let formal = formalism_spectrum(&zeta_from_tau0(&theoretical_tau0(t)?))?;
    let closed = levy_spectrum(bg_index(&t.measure))?;
    Ok(spectra_agree(&formal, &closed, FORMALISM_TOL))
}

/// Agreement on a 10⁴-point grid covering both supports with margin:
/// equal within `tol`, or both `−∞`.
pub fn spectra_agree(a: &SingularitySpectrum, b: &SingularitySpectrum, tol: f64) -> bool {
    if (a.support.0 - b.support.0).abs() > tol || (a.support.1 - b.support.1).abs() > tol {
        return false;
    }
    let lo = a.support.0.min(b.support.0) - 0.5;
    let hi = a.support.1.max(b.support.1) + 0.5;
    let n = 10_000;
    (0..=n).all(|i| {
        let h = lo + (hi - lo) * i as f64 / n as f64;
        let (x, y) = (a.eval(h), b.eval(h));
        (x == f64::NEG_INFINITY && y == f64::NEG_INFINITY) || (x - y).abs() <= tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::{tau0_monofractal, tau0_unified};
    use crate::triplet::{Atom, JumpDist, LevyMeasure};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tempered_sym(alpha: f64) -> LevyMeasure {
        LevyMeasure::TemperedStable { c_plus: 1.0, c_minus: 1.0, alpha, lambda_plus: 1.0, lambda_minus: 1.0 }
    }

    /// `inf_q (hq − ζ(q) + 1)` by brute force over a fine grid of `(0, 100]`.
    fn brute_formalism(zeta: &PiecewiseLinearFn, h: f64) -> f64 {
        (1..=1_000_000)
            .map(|i| i as f64 * 1e-4)
            .filter(|&q| zeta.in_domain(q))
            .map(|q| h * q - zeta.eval(q) + 1.0)
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn zeta_examples() {
        let z = zeta_from_tau0(&tau0_unified(0.8, f64::INFINITY).unwrap());
        assert_relative_eq!(z.eval(0.4), 0.5, epsilon = 1e-15);
        assert_eq!(z.eval(2.0), 1.0);
        let z = zeta_from_tau0(&tau0_monofractal(0.5).unwrap());
        assert_eq!(z.eval(3.0), 1.5);
        let z = zeta_from_tau0(&tau0_unified(1.0, f64::INFINITY).unwrap());
        assert_eq!(z.eval(0.7), 0.7);
    }

    #[test]
    fn formalism_case_iii() {
        let zeta = zeta_from_tau0(&tau0_unified(0.8, f64::INFINITY).unwrap());
        let d = formalism_spectrum(&zeta).unwrap();
        assert_eq!(d.support, (0.0, 1.25));
        assert_relative_eq!(d.eval(1.0), 0.8, epsilon = 1e-15);
        assert_eq!(d.eval(0.0), 0.0);
        assert_eq!(d.eval(1.3), f64::NEG_INFINITY);
        assert_eq!(d.eval(-0.1), f64::NEG_INFINITY);
        for &h in &[0.0, 0.3, 0.9, 1.25] {
            assert!((d.eval(h) - brute_formalism(&zeta, h)).abs() < 1e-9, "h={h}");
        }
    }

    #[test]
    fn brownian_point_spectrum() {
        let zeta = zeta_from_tau0(&tau0_monofractal(0.5).unwrap());
        let d = formalism_spectrum(&zeta).unwrap();
        assert_eq!(d.support, (0.5, 0.5));
        assert_eq!(d.eval(0.5), 1.0);
        assert_eq!(d.eval(0.49), f64::NEG_INFINITY);
        assert_eq!(d.eval(0.51), f64::NEG_INFINITY);
    }

    #[test]
    fn levy_spectrum_examples() {
        assert_relative_eq!(levy_spectrum(0.8).unwrap().eval(1.0), 0.8);
        assert_eq!(levy_spectrum(2.0).unwrap().support, (0.0, 0.5));
        assert_eq!(levy_spectrum(1.5).unwrap().eval(1.0), f64::NEG_INFINITY);
        assert!(levy_spectrum(0.0).is_err());
    }

    #[test]
    fn verify_examples() {
        for &a in &[0.3, 0.8, 1.2, 1.5, 1.7] {
            let t = LevyTriplet::new(0.0, 0.0, tempered_sym(a)).unwrap();
            assert!(verify_formalism(&t).unwrap(), "alpha={a}");
        }
        let bm = LevyTriplet::new(
            0.0,
            1.0,
            LevyMeasure::CompoundPoisson { rate: 1.0, jump_dist: JumpDist::Discrete { atoms: vec![Atom { size: 1.0, prob: 1.0 }] } },
        )
        .unwrap();
        assert_eq!(verify_formalism(&bm), Err(LevyError::GaussianComponent(1.0)));
    }

    #[test]
    fn max_point_is_one_at_inverse_index() {
        let d = formalism_spectrum(&zeta_from_tau0(&tau0_unified(1.2, f64::INFINITY).unwrap())).unwrap();
        let (h, v) = d.max_point();
        assert_relative_eq!(h, 1.0 / 1.2, epsilon = 1e-15);
        assert_eq!(v, 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn formalism_is_concave_and_bounded(a in 0.05f64..2.0, b in prop_oneof![Just(f64::INFINITY), 2.05f64..8.0]) {
            let d = formalism_spectrum(&zeta_from_tau0(&tau0_unified(a, b).unwrap())).unwrap();
            let (lo, hi) = d.support;
            let n = 500;
            let pts: Vec<f64> = (0..=n).map(|i| d.eval((lo + (hi - lo) * i as f64 / n as f64).min(hi))).collect();
            for w in pts.windows(3) {
                prop_assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-12);
            }
            prop_assert!(pts.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((d.eval(1.0 / a) - 1.0).abs() <= 1e-15);
        }

        #[test]
        fn formalism_matches_levy_spectrum(a in 0.05f64..1.99) {
            let d = formalism_spectrum(&zeta_from_tau0(&tau0_unified(a, f64::INFINITY).unwrap())).unwrap();
            prop_assert!(spectra_agree(&d, &levy_spectrum(a).unwrap(), FORMALISM_TOL));
        }
    }
}
