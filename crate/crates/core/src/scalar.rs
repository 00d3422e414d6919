use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point type used for label costs, cluster distances and quality ratios.
///
/// Set sizes are always exact integers (`u128`); only derived quantities go through
/// the scalar. `f64` is the default everywhere; `f32` works but loses exactness
/// for costs above 2^24.
pub trait Scalar: Float + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static {
    fn from_count(n: u128) -> Self {
        Self::from_u128(n).unwrap_or_else(Self::infinity)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Total order for priority queues: NaN sorts after everything.
    fn total_order(&self, other: &Self) -> std::cmp::Ordering {
        match self.partial_cmp(other) {
            Some(o) => o,
            None => self.is_nan().cmp(&other.is_nan()),
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
