//! Hilbert metric on an ellipsoid `{x : x^T Q x < 1}` (Klein model when `Q = I`).
//!
//! `d(x, y) = 1/2 log [x, y; a, b]` where `a`, `b` are the boundary points hit by
//! the chord through `x` and `y`. Geodesics are straight chords.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid<T> {
    dim: usize,
    shape: Vec<T>,
}

/// A chord `x + s v` with boundary parameters `s_minus < 0 < 1 <= s_plus`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chord<T> {
    pub origin: Vec<T>,
    pub velocity: Vec<T>,
    pub s_minus: T,
    pub s_plus: T,
}

impl<T: Real> Ellipsoid<T> {
    /// `shape` is the row-major `dim x dim` matrix `Q`; it must be symmetric
    /// positive definite.
    pub fn new(dim: usize, shape: Vec<T>) -> Option<Self> {
        if dim == 0 || shape.len() != dim * dim {
            return None;
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (shape[i * dim + j], shape[j * dim + i]);
                if (a - b).abs() > T::lit(1e-12) * (T::one() + a.abs()) {
                    return None;
                }
            }
        }
        if !cholesky_ok(dim, &shape) {
            return None;
        }
        Some(Self { dim, shape })
    }

    pub fn unit_ball(dim: usize) -> Self {
        let mut shape = vec![T::zero(); dim * dim];
        for i in 0..dim {
            shape[i * dim + i] = T::one();
        }
        Self { dim, shape }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[T] {
        &self.shape
    }

    pub fn form(&self, x: &[T], y: &[T]) -> T {
        let n = self.dim;
        let mut acc = T::zero();
        for i in 0..n {
            let mut row = T::zero();
            for j in 0..n {
                row = row + self.shape[i * n + j] * y[j];
            }
            acc = acc + x[i] * row;
        }
        acc
    }

    pub fn is_inside(&self, x: &[T]) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.is_finite()) && self.form(x, x) < T::one()
    }

    /// Scales a nonzero vector onto the boundary.
    pub fn boundary_point(&self, direction: &[T]) -> Option<Vec<T>> {
        if direction.len() != self.dim {
            return None;
        }
        let q = self.form(direction, direction);
        if !(q > T::zero()) || !q.is_finite() {
            return None;
        }
        let s = q.sqrt();
        Some(direction.iter().map(|c| *c / s).collect())
    }

    /// Chord through `x` with velocity `v`; returns the two boundary parameters.
    pub fn chord(&self, x: &[T], v: &[T]) -> Option<Chord<T>> {
        let a = self.form(v, v);
        if !(a > T::zero()) {
            return None;
        }
        let b = self.form(x, v);
        let c = self.form(x, x) - T::one();
        let disc = b * b - a * c;
        if disc < T::zero() {
            return None;
        }
        let root = disc.sqrt();
        // stable pair of roots
        let q = if b >= T::zero() { -(b + root) } else { -(b - root) };
        let (r1, r2) = if q == T::zero() { (T::zero(), T::zero()) } else { (q / a, c / q) };
        let (s_minus, s_plus) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        Some(Chord {
            origin: x.to_vec(),
            velocity: v.to_vec(),
            s_minus,
            s_plus,
        })
    }

    pub fn distance(&self, x: &[T], y: &[T]) -> T {
        if x == y {
            return T::zero();
        }
        let v: Vec<T> = y.iter().zip(x).map(|(a, b)| *a - *b).collect();
        match self.chord(x, &v) {
            Some(ch) => ch.distance_to(T::one()),
            None => T::zero(),
        }
    }
}

impl<T: Real> Chord<T> {
    /// Hilbert distance from the chord origin (`s = 0`) to parameter `s`.
    pub fn distance_to(&self, s: T) -> T {
        let (lo, hi) = (self.s_minus, self.s_plus);
        let num = hi * (s - lo);
        let den = (hi - s) * (-lo);
        T::half() * (num / den).ln().abs()
    }

    /// Parameter at Hilbert arclength `t >= 0` from the origin towards `s_plus`.
    pub fn parameter_at(&self, t: T) -> T {
        let g = (-(T::two() * t)).exp();
        let (lo, hi) = (self.s_minus, self.s_plus);
        hi * lo * (g - T::one()) / (g * hi - lo)
    }

    pub fn point_at(&self, t: T) -> Vec<T> {
        let s = self.parameter_at(t);
        self.origin
            .iter()
            .zip(&self.velocity)
            .map(|(x, v)| *x + *v * s)
            .collect()
    }
}

fn cholesky_ok<T: Real>(n: usize, m: &[T]) -> bool {
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[i * n + j];
            for k in 0..j {
                sum = sum - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > T::zero()) {
                    return false;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    true
}
