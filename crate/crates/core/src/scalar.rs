//! Scalar abstractions shared by the model-space kernels.
//!
//! The continuous models (disc, half-plane, ball, Klein ellipsoid) need
//! transcendental functions and are generic over [`Real`]. The ladder is
//! piecewise linear, so its distance only needs ordered ring operations and
//! a floor; [`LadderScalar`] admits exact rationals as well as floats.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Signed};

/// Floating-point scalar used by the continuous model spaces.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn sq(self) -> Self {
        self * self
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {}

/// Coordinate type for the ladder: an ordered field with a floor.
pub trait LadderScalar: Signed + Copy + PartialOrd + Debug {
    fn floor_value(self) -> Self;

    fn from_usize(n: usize) -> Self;

    fn is_integral(self) -> bool {
        self.floor_value() == self
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl LadderScalar for f64 {
    fn floor_value(self) -> Self {
        self.floor()
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl LadderScalar for f32 {
    fn floor_value(self) -> Self {
        self.floor()
    }

    fn from_usize(n: usize) -> Self {
        n as f32
    }
}

impl LadderScalar for Ratio<i64> {
    fn floor_value(self) -> Self {
        self.floor()
    }

    fn from_usize(n: usize) -> Self {
        Ratio::from_integer(n as i64)
    }
}

impl LadderScalar for Ratio<i128> {
    fn floor_value(self) -> Self {
        self.floor()
    }

    fn from_usize(n: usize) -> Self {
        Ratio::from_integer(n as i128)
    }
}
