//! Poincaré disc kernel.
//!
//! Distances are normalized so that `d(0, r) = log((1 + r) / (1 - r))`, i.e.
//! curvature -1 with the disc metric `2|dz| / (1 - |z|^2)`.

use num_complex::Complex;

use crate::scalar::Real;

#[inline]
pub fn is_inside<T: Real>(z: Complex<T>) -> bool {
    z.norm_sqr() < T::one() && z.re.is_finite() && z.im.is_finite()
}

/// `1 - |z|^2`, computed as `(1 - |z|)(1 + |z|)` to keep relative accuracy near the boundary.
#[inline]
pub fn boundary_defect<T: Real>(z: Complex<T>) -> T {
    let r = z.norm();
    (T::one() - r) * (T::one() + r)
}

/// The involutive automorphism exchanging `a` and `0`.
#[inline]
pub fn involution<T: Real>(a: Complex<T>, z: Complex<T>) -> Complex<T> {
    (a - z) / (Complex::new(T::one(), T::zero()) - a.conj() * z)
}

/// Möbius pseudo-distance `|z - w| / |1 - conj(w) z|`.
#[inline]
pub fn pseudo_distance<T: Real>(z: Complex<T>, w: Complex<T>) -> T {
    let den = (Complex::new(T::one(), T::zero()) - w.conj() * z).norm();
    (z - w).norm() / den
}

/// Converts a pseudo-distance `rho` together with `1 - rho^2` into a distance.
#[inline]
pub(crate) fn distance_from_rho<T: Real>(rho: T, one_minus_rho_sq: T) -> T {
    if rho == T::zero() {
        return T::zero();
    }
    T::two() * rho.ln_1p() - one_minus_rho_sq.ln()
}

pub fn distance<T: Real>(z: Complex<T>, w: Complex<T>) -> T {
    if z == w {
        return T::zero();
    }
    let rho = pseudo_distance(z, w);
    let den = (Complex::new(T::one(), T::zero()) - w.conj() * z).norm_sqr();
    let complement = boundary_defect(z) * boundary_defect(w) / den;
    distance_from_rho(rho, complement)
}

/// Euclidean radius reached at distance `t` from the origin.
#[inline]
pub fn radius_at<T: Real>(t: T) -> T {
    (t * T::half()).tanh()
}

/// Point at arclength `t` on the geodesic leaving `base` in the direction
/// `dir` (a unit complex number expressed in the coordinates centred at `base`).
pub fn chord_point<T: Real>(base: Complex<T>, dir: Complex<T>, t: T) -> Complex<T> {
    involution(base, dir * radius_at(t))
}

/// Unit direction, in coordinates centred at `base`, towards `target`.
/// `target` may lie on the unit circle.
pub fn direction_towards<T: Real>(base: Complex<T>, target: Complex<T>) -> Option<Complex<T>> {
    let moved = involution(base, target);
    let n = moved.norm();
    if n == T::zero() || !n.is_finite() {
        return None;
    }
    Some(moved / n)
}

/// Closed-form Busemann function of the ray from `base` to the boundary point
/// `xi`, normalized to vanish at `base`:
/// `log(|xi - z|^2 / (1 - |z|^2)) - log(|xi - base|^2 / (1 - |base|^2))`.
pub fn busemann_closed_form<T: Real>(xi: Complex<T>, base: Complex<T>, z: Complex<T>) -> T {
    let poisson = |w: Complex<T>| ((xi - w).norm_sqr() / boundary_defect(w)).ln();
    poisson(z) - poisson(base)
}
