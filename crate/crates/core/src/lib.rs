//! Small-time scaling of Lévy processes: closed-form scaling functions,
//! rate functions and multifractal spectra from a characteristic triplet,
//! and seeded Monte Carlo checks against simulated increments.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod ext;
pub mod quad;
pub mod scaling;
pub mod simulate;
pub mod spectrum;
pub mod stats;
pub mod triplet;

pub use error::{LevyError, Result};
pub use triplet::{
    bg_index, classify_small_time_limit, frac_moment_measure, tail_index, Atom, JumpDist, LevyMeasure, LevyTriplet,
    LimitKind, LimitParams, Region, SmallTimeLimit,
};
