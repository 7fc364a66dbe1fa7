//! Right half-plane `{Re w > 0}`, isometric to the disc through the Cayley map
//! `z -> (1 + z) / (1 - z)`.

use num_complex::Complex;

use super::disc;
use crate::scalar::Real;

#[inline]
pub fn is_inside<T: Real>(w: Complex<T>) -> bool {
    w.re > T::zero() && w.re.is_finite() && w.im.is_finite()
}

/// Disc to half-plane.
#[inline]
pub fn cayley<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    (one + z) / (one - z)
}

/// Half-plane to disc.
#[inline]
pub fn inverse_cayley<T: Real>(w: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    (w - one) / (w + one)
}

/// Distance evaluated directly in half-plane coordinates, which keeps full
/// relative precision for points far from `1`.
pub fn distance<T: Real>(w1: Complex<T>, w2: Complex<T>) -> T {
    if w1 == w2 {
        return T::zero();
    }
    let den = (w1 + w2.conj()).norm();
    let rho = (w1 - w2).norm() / den;
    // squared after dividing so that coordinates near f64::MAX^(1/2) do not overflow
    let q = T::lit(2.0) * w1.re.sqrt() * w2.re.sqrt() / den;
    let complement = q * q;
    disc::distance_from_rho(rho, complement)
}
