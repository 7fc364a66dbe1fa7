//! Unit-speed geodesic segments and rays.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::klein::Chord;
use crate::space::ladder::{self, LadderPoint};
use crate::space::{ball, disc, half_plane, BoundaryDirection, Point, SpaceHandle, SpaceKind};

/// Default step of the sampled fallback representation.
pub const DEFAULT_TABLE_STEP: f64 = 0.05;

/// Parameter up to which the floating-point evaluation of a curve is
/// certified to be unit speed within `1e-9`.
const DISC_HORIZON: f64 = 17.0;
const KLEIN_HORIZON: f64 = 8.0;
const HALF_PLANE_LINE_HORIZON: f64 = 600.0;
const HALF_PLANE_ARC_HORIZON: f64 = 30.0;

#[derive(Debug, Clone)]
enum Curve {
    /// `t -> phi_base(tanh(t/2) dir)`.
    Disc { base: Complex64, dir: Complex64 },
    /// Cayley image of a disc chord.
    HalfPlaneViaDisc { base: Complex64, dir: Complex64 },
    /// `t -> x0 e^{sign t} + i y`.
    HalfPlaneLine { x0: f64, y: f64, sign: f64 },
    /// `t -> i c + r (sech u + i tanh u)`, `u = u0 + sign t`.
    HalfPlaneArc { center: f64, radius: f64, u0: f64, sign: f64 },
    Ball { base: Vec<Complex64>, dir: Vec<Complex64> },
    Klein(Chord<f64>),
    /// Polyline through `waypoints`, continued along rail `tail` when present.
    Ladder { waypoints: Vec<LadderPoint<f64>>, cumulative: Vec<f64>, tail: Option<f64> },
    Graph { vertices: Vec<usize>, cumulative: Vec<f64> },
    /// Points at parameters `k * step`, joined by geodesic segments.
    Table { points: Vec<Point>, step: f64 },
    Shifted { inner: Box<Curve>, offset: f64 },
}

/// A unit-speed geodesic: a segment when `length` is finite, a ray otherwise.
#[derive(Debug, Clone)]
pub struct GeodesicRay {
    space: SpaceHandle,
    curve: Curve,
    length: Option<f64>,
    horizon: f64,
}

impl GeodesicRay {
    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    /// `None` for rays.
    pub fn length(&self) -> Option<f64> {
        self.length
    }

    pub fn is_ray(&self) -> bool {
        self.length.is_none()
    }

    /// Largest parameter at which floating-point evaluation is certified unit speed.
    pub fn horizon(&self) -> f64 {
        match self.length {
            Some(l) => l.min(self.horizon),
            None => self.horizon,
        }
    }

    pub fn origin(&self) -> Point {
        self.point_at(0.0).expect("origin is always representable")
    }

    pub fn point_at(&self, t: f64) -> Result<Point> {
        if !(t >= 0.0) {
            return Err(Error::Argument(format!("geodesic parameter {t} must be nonnegative")));
        }
        if let Some(l) = self.length {
            if t > l * (1.0 + 1e-12) + 1e-12 {
                return Err(Error::Argument(format!("parameter {t} beyond segment length {l}")));
            }
        }
        let t = self.length.map_or(t, |l| t.min(l));
        let p = evaluate(&self.space, &self.curve, t)?;
        self.space.validate(&p).map_err(|_| Error::Domain {
            space: self.space.name(),
            detail: format!("geodesic point at t = {t} left the representable domain"),
        })?;
        Ok(p)
    }

    /// The reparametrized ray `t -> self(t + offset)`.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        if !(offset >= 0.0) {
            return Err(Error::Argument("shift offset must be nonnegative".into()));
        }
        Ok(GeodesicRay {
            space: self.space.clone(),
            curve: Curve::Shifted { inner: Box::new(self.curve.clone()), offset },
            length: self.length.map(|l| (l - offset).max(0.0)),
            horizon: (self.horizon - offset).max(0.0),
        })
    }

    /// Sampled geodesic through `points`, taken to sit at parameters
    /// `0, step, 2 step, ...`; consecutive points must be `step` apart.
    pub fn from_table(space: &SpaceHandle, points: Vec<Point>, step: f64) -> Result<Self> {
        if points.is_empty() || !(step > 0.0) {
            return Err(Error::Argument("table needs at least one point and a positive step".into()));
        }
        for w in points.windows(2) {
            let d = space.distance(&w[0], &w[1])?;
            if (d - step).abs() > 1e-9 * (1.0 + step) {
                return Err(Error::Argument(format!("table points are {d} apart, expected {step}")));
            }
        }
        space.validate(&points[0])?;
        let length = step * (points.len() - 1) as f64;
        Ok(GeodesicRay {
            space: space.clone(),
            curve: Curve::Table { points, step },
            length: Some(length),
            horizon: f64::INFINITY,
        })
    }
}

fn evaluate(space: &SpaceHandle, curve: &Curve, t: f64) -> Result<Point> {
    Ok(match curve {
        Curve::Disc { base, dir } => Point::Complex(disc::chord_point(*base, *dir, t)),
        Curve::HalfPlaneViaDisc { base, dir } => {
            Point::Complex(half_plane::cayley(disc::chord_point(*base, *dir, t)))
        }
        Curve::HalfPlaneLine { x0, y, sign } => Point::complex(x0 * (sign * t).exp(), *y),
        Curve::HalfPlaneArc { center, radius, u0, sign } => {
            let u = u0 + sign * t;
            Point::complex(radius / u.cosh(), center + radius * u.tanh())
        }
        Curve::Ball { base, dir } => Point::ComplexVec(ball::chord_point(base, dir, t)),
        Curve::Klein(chord) => Point::Real(chord.point_at(t)),
        Curve::Ladder { waypoints, cumulative, tail } => {
            let total = *cumulative.last().expect("nonempty polyline");
            if t >= total {
                let last = waypoints.last().expect("nonempty polyline");
                match tail {
                    Some(sign) => Point::ladder(last.a + (t - total), *sign),
                    None => Point::Ladder(*last),
                }
            } else {
                let k = cumulative.partition_point(|c| *c <= t).max(1) - 1;
                let (p, q) = (waypoints[k], waypoints[k + 1]);
                let leg = cumulative[k + 1] - cumulative[k];
                let s = if leg > 0.0 { (t - cumulative[k]) / leg } else { 0.0 };
                // legs are axis-parallel, so snap the fixed coordinate exactly
                let a = if p.a == q.a { p.a } else { p.a + s * (q.a - p.a) };
                let b = if p.b == q.b { p.b } else { p.b + s * (q.b - p.b) };
                Point::ladder(a, b)
            }
        }
        Curve::Graph { vertices, cumulative } => {
            let k = cumulative.partition_point(|c| *c <= t + 1e-12).max(1) - 1;
            Point::Vertex(vertices[k])
        }
        Curve::Table { points, step } => {
            let k = ((t / step).floor() as usize).min(points.len() - 1);
            let rest = t - k as f64 * step;
            if k + 1 >= points.len() || rest <= 0.0 {
                points[k].clone()
            } else {
                let seg = space.geodesic_between(&points[k], &points[k + 1])?;
                seg.point_at(rest.min(seg.length().unwrap_or(rest)))?
            }
        }
        Curve::Shifted { inner, offset } => evaluate(space, inner, t + offset)?,
    })
}

fn ladder_curve(waypoints: Vec<LadderPoint<f64>>, tail: Option<f64>) -> Curve {
    let mut cumulative = vec![0.0];
    for w in waypoints.windows(2) {
        let leg = (w[0].a - w[1].a).abs() + (w[0].b - w[1].b).abs();
        cumulative.push(cumulative.last().unwrap() + leg);
    }
    Curve::Ladder { waypoints, cumulative, tail }
}

impl SpaceHandle {
    /// Unit-speed geodesic segment from `x` to `y`.
    pub fn geodesic_between(&self, x: &Point, y: &Point) -> Result<GeodesicRay> {
        let length = self.distance(x, y)?;
        let (curve, horizon) = match (self.kind(), x, y) {
            (SpaceKind::PoincareDisc, Point::Complex(a), Point::Complex(b)) => {
                let dir = disc::direction_towards(*a, *b).unwrap_or(Complex64::new(1.0, 0.0));
                (Curve::Disc { base: *a, dir }, DISC_HORIZON)
            }
            (SpaceKind::RightHalfPlane, Point::Complex(a), Point::Complex(b)) => {
                if a.im == b.im {
                    let sign = if b.re >= a.re { 1.0 } else { -1.0 };
                    (Curve::HalfPlaneLine { x0: a.re, y: a.im, sign }, HALF_PLANE_LINE_HORIZON)
                } else {
                    let (da, db) = (half_plane::inverse_cayley(*a), half_plane::inverse_cayley(*b));
                    let dir = disc::direction_towards(da, db).unwrap_or(Complex64::new(1.0, 0.0));
                    (Curve::HalfPlaneViaDisc { base: da, dir }, DISC_HORIZON)
                }
            }
            (SpaceKind::ComplexBall { dim }, Point::ComplexVec(a), Point::ComplexVec(b)) => {
                let dir = ball::direction_towards(a, b).unwrap_or_else(|| {
                    let mut e = vec![Complex64::new(0.0, 0.0); *dim];
                    e[0] = Complex64::new(1.0, 0.0);
                    e
                });
                (Curve::Ball { base: a.clone(), dir }, DISC_HORIZON)
            }
            (SpaceKind::KleinEllipsoid(e), Point::Real(a), Point::Real(b)) => {
                if length == 0.0 {
                    let mut v = vec![0.0; e.dim()];
                    v[0] = 1.0;
                    (Curve::Klein(e.chord(a, &v).expect("interior chord")), KLEIN_HORIZON)
                } else {
                    let v: Vec<f64> = b.iter().zip(a).map(|(p, q)| p - q).collect();
                    let chord = e.chord(a, &v).ok_or_else(|| Error::Convergence {
                        what: "Hilbert chord",
                        detail: "no boundary intersection".into(),
                    })?;
                    (Curve::Klein(chord), KLEIN_HORIZON)
                }
            }
            (SpaceKind::Ladder, Point::Ladder(a), Point::Ladder(b)) => {
                (ladder_curve(ladder::shortest_path(a, b), None), f64::INFINITY)
            }
            (SpaceKind::FiniteGraph(g), Point::Vertex(a), Point::Vertex(b)) => {
                let vertices = g.shortest_path(*a, *b).ok_or(Error::Unreachable { from: *a, to: *b })?;
                let mut cumulative = vec![0.0];
                for w in vertices.windows(2) {
                    let step = g.distance(w[0], w[1]).expect("adjacent vertices are connected");
                    cumulative.push(cumulative.last().unwrap() + step);
                }
                (Curve::Graph { vertices, cumulative }, f64::INFINITY)
            }
            _ => unreachable!("distance validated both points"),
        };
        Ok(GeodesicRay { space: self.clone(), curve, length: Some(length), horizon })
    }

    /// Unit-speed geodesic ray from `p` converging to the boundary direction `xi`.
    pub fn geodesic_ray_to(&self, p: &Point, xi: &BoundaryDirection) -> Result<GeodesicRay> {
        self.validate(p)?;
        self.validate_direction(xi)?;
        let (curve, horizon) = match (self.kind(), p, xi) {
            (SpaceKind::PoincareDisc, Point::Complex(a), BoundaryDirection::Circle(u)) => {
                let dir = disc::direction_towards(*a, *u / u.norm()).expect("boundary point is not interior");
                (Curve::Disc { base: *a, dir }, DISC_HORIZON)
            }
            (SpaceKind::RightHalfPlane, Point::Complex(w), BoundaryDirection::HalfPlaneInfinity) => {
                (Curve::HalfPlaneLine { x0: w.re, y: w.im, sign: 1.0 }, HALF_PLANE_LINE_HORIZON)
            }
            (SpaceKind::RightHalfPlane, Point::Complex(w), BoundaryDirection::HalfPlaneAxis(y)) => {
                if w.im == *y {
                    (Curve::HalfPlaneLine { x0: w.re, y: w.im, sign: -1.0 }, HALF_PLANE_LINE_HORIZON)
                } else {
                    let center = (w.norm_sqr() - y * y) / (2.0 * (w.im - y));
                    let radius = (y - center).abs();
                    let u0 = ((w.im - center) / radius).clamp(-1.0, 1.0).atanh();
                    let sign = if y > &center { 1.0 } else { -1.0 };
                    (Curve::HalfPlaneArc { center, radius, u0, sign }, HALF_PLANE_ARC_HORIZON)
                }
            }
            (SpaceKind::ComplexBall { .. }, Point::ComplexVec(a), BoundaryDirection::Sphere(u)) => {
                let dir = ball::direction_towards(a, u).expect("boundary point is not interior");
                (Curve::Ball { base: a.clone(), dir }, DISC_HORIZON)
            }
            (SpaceKind::KleinEllipsoid(e), Point::Real(a), BoundaryDirection::Ellipsoid(v)) => {
                let target = e.boundary_point(v).expect("validated direction");
                let vel: Vec<f64> = target.iter().zip(a).map(|(t, x)| t - x).collect();
                let mut chord = e.chord(a, &vel).ok_or_else(|| Error::Convergence {
                    what: "Hilbert chord",
                    detail: "no boundary intersection".into(),
                })?;
                // the target itself is the far boundary point; product of roots fixes the near one
                let c = e.form(a, a) - 1.0;
                chord.s_minus = c / e.form(&vel, &vel);
                chord.s_plus = 1.0;
                (Curve::Klein(chord), KLEIN_HORIZON)
            }
            (SpaceKind::Ladder, Point::Ladder(a), dir) => {
                let sign = match dir {
                    BoundaryDirection::LadderRail(s) => *s,
                    BoundaryDirection::LadderEnd => match a.rail() {
                        Some(s) => s,
                        None if a.b >= 0.0 => 1.0,
                        None => -1.0,
                    },
                    _ => {
                        return Err(Error::Capability {
                            operation: "geodesic rays to non-Busemann ladder heights",
                            space: self.name(),
                        })
                    }
                };
                (ladder_curve(ladder::ray_entry(a, sign), Some(sign)), f64::INFINITY)
            }
            _ => {
                return Err(Error::Capability { operation: "geodesic rays", space: self.name() });
            }
        };
        Ok(GeodesicRay { space: self.clone(), curve, length: None, horizon })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn disc_radial_ray_profile() {
        let s = SpaceHandle::poincare_disc();
        let ray = s.geodesic_ray_to(&Point::complex(0.0, 0.0), &BoundaryDirection::Circle(Complex64::new(1.0, 0.0))).unwrap();
        for t in [0.0f64, 0.5, 3.0, 10.0] {
            let expected = (t.exp() - 1.0) / (t.exp() + 1.0);
            match ray.point_at(t).unwrap() {
                Point::Complex(z) => {
                    assert_abs_diff_eq!(z.re, expected, epsilon = 1e-14);
                    assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-14);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn disc_radial_segment() {
        let s = SpaceHandle::poincare_disc();
        let (x, y) = (Point::complex(0.0, 0.0), Point::complex(0.6, 0.0));
        let seg = s.geodesic_between(&x, &y).unwrap();
        assert_abs_diff_eq!(seg.length().unwrap(), s.distance(&x, &y).unwrap(), epsilon = 1e-15);
        let end = seg.point_at(seg.length().unwrap()).unwrap();
        assert_abs_diff_eq!(s.distance(&end, &y).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn klein_midpoint_is_centre() {
        let s = SpaceHandle::klein_ellipsoid(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let seg = s.geodesic_between(&Point::Real(vec![-0.5, 0.0]), &Point::Real(vec![0.5, 0.0])).unwrap();
        let mid = seg.point_at(seg.length().unwrap() / 2.0).unwrap();
        match mid {
            Point::Real(v) => {
                assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ladder_crossing_uses_a_rung() {
        let s = SpaceHandle::ladder();
        let seg = s.geodesic_between(&Point::ladder(0.5, 1.0), &Point::ladder(0.5, -1.0)).unwrap();
        assert_eq!(seg.length(), Some(3.0));
        let Point::Ladder(mid) = seg.point_at(1.5).unwrap() else { panic!() };
        assert!(mid.a == 0.0 || mid.a == 1.0);
        assert_eq!(mid.b, 0.0);
    }

    #[test]
    fn ladder_rail_ray() {
        let s = SpaceHandle::ladder();
        let ray = s.geodesic_ray_to(&Point::ladder(0.0, 1.0), &BoundaryDirection::LadderRail(1.0)).unwrap();
        assert_eq!(ray.point_at(4.25).unwrap(), Point::ladder(4.25, 1.0));
    }

    #[test]
    fn ball_radial_ray() {
        let s = SpaceHandle::complex_ball(2).unwrap();
        let o = s.default_basepoint();
        let xi = BoundaryDirection::Sphere(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let ray = s.geodesic_ray_to(&o, &xi).unwrap();
        let Point::ComplexVec(v) = ray.point_at(2.0).unwrap() else { panic!() };
        assert_abs_diff_eq!(v[0].re, 1.0f64.tanh(), epsilon = 1e-14);
        assert_abs_diff_eq!(v[0].im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn graph_rays_are_unsupported() {
        let s = SpaceHandle::finite_graph(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let err = s.geodesic_ray_to(&Point::Vertex(0), &BoundaryDirection::LadderEnd).unwrap_err();
        assert!(matches!(err, Error::Capability { .. }));
    }

    #[test]
    fn half_plane_arc_ray_reaches_axis_point() {
        let s = SpaceHandle::right_half_plane();
        let w = Point::complex(1.0, 0.5);
        let ray = s.geodesic_ray_to(&w, &BoundaryDirection::HalfPlaneAxis(2.0)).unwrap();
        for (a, b) in [(0.0, 1.0), (1.0, 4.0), (3.0, 11.0)] {
            let d = s.distance(&ray.point_at(a).unwrap(), &ray.point_at(b).unwrap()).unwrap();
            assert_abs_diff_eq!(d, b - a, epsilon = 1e-9);
        }
        let Point::Complex(far) = ray.point_at(25.0).unwrap() else { panic!() };
        assert!((far - Complex64::new(0.0, 2.0)).norm() < 1e-6);
    }

    #[test]
    fn shifted_and_table_rays() {
        let s = SpaceHandle::poincare_disc();
        let ray = s.geodesic_ray_to(&Point::complex(0.1, 0.2), &BoundaryDirection::Circle(Complex64::new(0.0, 1.0))).unwrap();
        let shifted = ray.shifted(2.0).unwrap();
        assert_eq!(shifted.point_at(1.0).unwrap(), ray.point_at(3.0).unwrap());
        let pts: Vec<Point> = (0..=40).map(|k| ray.point_at(k as f64 * DEFAULT_TABLE_STEP).unwrap()).collect();
        let table = GeodesicRay::from_table(&s, pts, DEFAULT_TABLE_STEP).unwrap();
        let a = table.point_at(1.234).unwrap();
        assert_abs_diff_eq!(s.distance(&a, &ray.point_at(1.234).unwrap()).unwrap(), 0.0, epsilon = 1e-9);
    }
}
