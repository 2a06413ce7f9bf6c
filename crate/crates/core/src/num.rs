//! Scalar abstractions shared by the numeric parts of the crate.
//!
//! Set-overlap scores (Jaccard, precision, recall, classification scores) are
//! ratios of counts, so they only need [`Scalar`]: `f32`, `f64` and the exact
//! `Ratio<i64>` all qualify. Signal processing in the segmenter needs
//! logarithms and square roots and therefore asks for [`Real`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A number that can represent a ratio of two counts.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// `numerator / denominator`; the caller guarantees `denominator > 0`.
    fn from_ratio(numerator: usize, denominator: usize) -> Self;

    fn to_f64(&self) -> f64;
}

impl Scalar for f32 {
    fn from_ratio(numerator: usize, denominator: usize) -> Self {
        numerator as f32 / denominator as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for f64 {
    fn from_ratio(numerator: usize, denominator: usize) -> Self {
        numerator as f64 / denominator as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(numerator: usize, denominator: usize) -> Self {
        Ratio::new(numerator as i64, denominator as i64)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// floating point: f32 or f64
pub trait Real: Float + FromPrimitive + Scalar + Copy + Debug + Send + Sync {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into `T`.
pub(crate) fn lit<T: Real>(value: f64) -> T {
    T::from_f64(value).expect("constant representable in every Real")
}

/// Tolerant equality used where durations computed from sample counts are
/// compared for ties.
pub(crate) fn approx_eq<T: Real>(a: T, b: T) -> bool {
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= T::epsilon() * lit::<T>(64.0) * scale
}
