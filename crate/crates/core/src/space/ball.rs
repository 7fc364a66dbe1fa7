//! Complex unit ball `B^q` with the Kobayashi distance, scaled by two to
//! match the disc normalization (the ball restricted to a complex line
//! through the origin is the disc).

use num_complex::Complex;

use super::disc;
use crate::scalar::Real;

/// `<z, w> = sum z_i conj(w_i)`.
pub fn inner<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
    z.iter()
        .zip(w)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj())
}

pub fn norm_sqr<T: Real>(z: &[Complex<T>]) -> T {
    z.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
}

pub fn is_inside<T: Real>(z: &[Complex<T>]) -> bool {
    !z.is_empty() && z.iter().all(|c| c.re.is_finite() && c.im.is_finite()) && norm_sqr(z) < T::one()
}

fn boundary_defect<T: Real>(z: &[Complex<T>]) -> T {
    let r = norm_sqr(z).sqrt();
    (T::one() - r) * (T::one() + r)
}

/// The involutive automorphism `phi_a` exchanging `a` and `0`:
/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)` with `s_a = sqrt(1 - |a|^2)`.
pub fn involution<T: Real>(a: &[Complex<T>], z: &[Complex<T>]) -> Vec<Complex<T>> {
    let aa = norm_sqr(a);
    if aa == T::zero() {
        return z.iter().map(|c| -c).collect();
    }
    let za = inner(z, a);
    let scale = za / Complex::new(aa, T::zero());
    let s = (T::one() - aa).sqrt();
    let den = Complex::new(T::one(), T::zero()) - za;
    a.iter()
        .zip(z)
        .map(|(ai, zi)| {
            let proj = scale * ai;
            let orth = zi - proj;
            (ai - proj - orth * s) / den
        })
        .collect()
}

pub fn distance<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> T {
    if z == w {
        return T::zero();
    }
    let rho = norm_sqr(&involution(z, w)).sqrt();
    let den = (Complex::new(T::one(), T::zero()) - inner(w, z)).norm_sqr();
    let complement = boundary_defect(z) * boundary_defect(w) / den;
    disc::distance_from_rho(rho, complement)
}

pub fn chord_point<T: Real>(base: &[Complex<T>], dir: &[Complex<T>], t: T) -> Vec<Complex<T>> {
    let r = disc::radius_at(t);
    let scaled: Vec<_> = dir.iter().map(|c| c * r).collect();
    involution(base, &scaled)
}

pub fn direction_towards<T: Real>(base: &[Complex<T>], target: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
    let moved = involution(base, target);
    let n = norm_sqr(&moved).sqrt();
    if n == T::zero() || !n.is_finite() {
        return None;
    }
    Some(moved.into_iter().map(|c| c / n).collect())
}

/// Closed-form Busemann function at the boundary point `xi`, vanishing at `base`.
pub fn busemann_closed_form<T: Real>(xi: &[Complex<T>], base: &[Complex<T>], z: &[Complex<T>]) -> T {
    let poisson = |w: &[Complex<T>]| {
        let num = (Complex::new(T::one(), T::zero()) - inner(w, xi)).norm_sqr();
        (num / boundary_defect(w)).ln()
    };
    poisson(z) - poisson(base)
}
