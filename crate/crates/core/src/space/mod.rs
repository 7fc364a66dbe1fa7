//! Model metric spaces with exact distance rules.
//!
//! The kernels in the submodules are generic over the scalar type; the
//! [`SpaceHandle`] front-end fixes `f64` coordinates so that spaces, points and
//! maps can be chosen at run time (for instance from a JSON descriptor).

pub mod ball;
pub mod disc;
pub mod graph;
pub mod half_plane;
pub mod klein;
pub mod ladder;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use klein::Ellipsoid;
use ladder::LadderPoint;

use graph::WeightedGraph;

/// The concrete model behind a [`SpaceHandle`].
#[derive(Debug, Clone)]
pub enum SpaceKind {
    PoincareDisc,
    RightHalfPlane,
    ComplexBall { dim: usize },
    KleinEllipsoid(Ellipsoid<f64>),
    Ladder,
    FiniteGraph(WeightedGraph<f64>),
}

/// Immutable, cheaply clonable descriptor of one model metric space.
#[derive(Debug, Clone)]
pub struct SpaceHandle(Arc<SpaceKind>);

/// A point of some model space. Which variant is valid depends on the space.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    /// Disc or half-plane.
    Complex(Complex64),
    /// Complex ball.
    ComplexVec(Vec<Complex64>),
    /// Klein ellipsoid.
    Real(Vec<f64>),
    Ladder(LadderPoint<f64>),
    Vertex(usize),
}

/// A direction at infinity, encoded per kind.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryDirection {
    /// Unit complex number on the circle bounding the disc.
    Circle(Complex64),
    /// The point at infinity of the half-plane.
    HalfPlaneInfinity,
    /// The boundary point `i y` of the half-plane.
    HalfPlaneAxis(f64),
    /// Unit vector of the sphere bounding the ball.
    Sphere(Vec<Complex64>),
    /// Nonzero vector; the boundary point is its rescaling onto the ellipsoid.
    Ellipsoid(Vec<f64>),
    /// One rail of the ladder, `+1` or `-1`.
    LadderRail(f64),
    /// The single Gromov boundary point of the ladder.
    LadderEnd,
    /// Horofunction target approached by `(n, height)`, `height` in `[-1, 1]`.
    LadderHeight(f64),
}

impl Point {
    pub fn complex(re: f64, im: f64) -> Self {
        Point::Complex(Complex64::new(re, im))
    }

    pub fn ladder(a: f64, b: f64) -> Self {
        Point::Ladder(LadderPoint::new(a, b))
    }

    pub fn as_ladder(&self) -> Option<LadderPoint<f64>> {
        match self {
            Point::Ladder(q) => Some(*q),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            Point::Complex(z) => Some(*z),
            _ => None,
        }
    }

    /// Flat real coordinates, used for reports.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Complex(z) => vec![z.re, z.im],
            Point::ComplexVec(v) => v.iter().flat_map(|c| [c.re, c.im]).collect(),
            Point::Real(v) => v.clone(),
            Point::Ladder(p) => vec![p.a, p.b],
            Point::Vertex(i) => vec![*i as f64],
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(i) => write!(f, "v{i}"),
            other => write!(f, "{:?}", other.coords()),
        }
    }
}

fn domain(space: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { space, detail: detail.into() }
}

impl SpaceHandle {
    pub fn new(kind: SpaceKind) -> Self {
        SpaceHandle(Arc::new(kind))
    }

    pub fn poincare_disc() -> Self {
        Self::new(SpaceKind::PoincareDisc)
    }

    pub fn right_half_plane() -> Self {
        Self::new(SpaceKind::RightHalfPlane)
    }

    pub fn complex_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("ball dimension must be at least 1".into()));
        }
        Ok(Self::new(SpaceKind::ComplexBall { dim }))
    }

    pub fn klein_ellipsoid(dim: usize, shape: Vec<f64>) -> Result<Self> {
        Ellipsoid::new(dim, shape)
            .map(|e| Self::new(SpaceKind::KleinEllipsoid(e)))
            .ok_or_else(|| Error::Argument("ellipsoid shape must be a symmetric positive definite matrix".into()))
    }

    pub fn ladder() -> Self {
        Self::new(SpaceKind::Ladder)
    }

    pub fn finite_graph(edges: &[(usize, usize, f64)]) -> Result<Self> {
        WeightedGraph::new(edges, 0)
            .map(|g| Self::new(SpaceKind::FiniteGraph(g)))
            .map_err(|e| Error::Argument(format!("invalid graph: {e:?}")))
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.0
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            SpaceKind::PoincareDisc => "poincare_disc",
            SpaceKind::RightHalfPlane => "right_half_plane",
            SpaceKind::ComplexBall { .. } => "complex_ball",
            SpaceKind::KleinEllipsoid(_) => "klein_ellipsoid",
            SpaceKind::Ladder => "ladder",
            SpaceKind::FiniteGraph(_) => "finite_graph",
        }
    }

    /// Whether boundary directions and geodesic rays are available.
    pub fn supports_boundary(&self) -> bool {
        !matches!(self.kind(), SpaceKind::FiniteGraph(_))
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        let name = self.name();
        let ok = match (self.kind(), p) {
            (SpaceKind::PoincareDisc, Point::Complex(z)) => disc::is_inside(*z),
            (SpaceKind::RightHalfPlane, Point::Complex(w)) => half_plane::is_inside(*w),
            (SpaceKind::ComplexBall { dim }, Point::ComplexVec(v)) => v.len() == *dim && ball::is_inside(v),
            (SpaceKind::KleinEllipsoid(e), Point::Real(v)) => e.is_inside(v),
            (SpaceKind::Ladder, Point::Ladder(q)) => q.is_valid(),
            (SpaceKind::FiniteGraph(g), Point::Vertex(i)) => *i < g.vertex_count(),
            _ => return Err(domain(name, format!("point {p} has the wrong coordinate type"))),
        };
        if ok {
            Ok(())
        } else {
            Err(domain(name, format!("point {p} is not in the space")))
        }
    }

    /// Exact distance between two valid points.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(match (self.kind(), x, y) {
            (SpaceKind::PoincareDisc, Point::Complex(a), Point::Complex(b)) => disc::distance(*a, *b),
            (SpaceKind::RightHalfPlane, Point::Complex(a), Point::Complex(b)) => half_plane::distance(*a, *b),
            (SpaceKind::ComplexBall { .. }, Point::ComplexVec(a), Point::ComplexVec(b)) => ball::distance(a, b),
            (SpaceKind::KleinEllipsoid(e), Point::Real(a), Point::Real(b)) => e.distance(a, b),
            (SpaceKind::Ladder, Point::Ladder(a), Point::Ladder(b)) => ladder::distance(a, b),
            (SpaceKind::FiniteGraph(g), Point::Vertex(a), Point::Vertex(b)) => {
                g.distance(*a, *b).ok_or(Error::Unreachable { from: *a, to: *b })?
            }
            _ => unreachable!("validated above"),
        })
    }

    /// A canonical interior point (origin, `1`, `(0, 0)` or vertex 0).
    pub fn default_basepoint(&self) -> Point {
        match self.kind() {
            SpaceKind::PoincareDisc => Point::complex(0.0, 0.0),
            SpaceKind::RightHalfPlane => Point::complex(1.0, 0.0),
            SpaceKind::ComplexBall { dim } => Point::ComplexVec(vec![Complex64::new(0.0, 0.0); *dim]),
            SpaceKind::KleinEllipsoid(e) => Point::Real(vec![0.0; e.dim()]),
            SpaceKind::Ladder => Point::ladder(0.0, 0.0),
            SpaceKind::FiniteGraph(_) => Point::Vertex(0),
        }
    }

    /// Random point from a bounded region. `extent` is a Euclidean radius
    /// fraction in `(0, 1)` for the bounded models (half-plane samples are
    /// Cayley images of disc samples) and the maximal rail coordinate for the
    /// ladder; graphs sample vertices uniformly.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, extent: f64) -> Point {
        match self.kind() {
            SpaceKind::PoincareDisc => Point::Complex(sample_disc(rng, extent)),
            SpaceKind::RightHalfPlane => Point::Complex(half_plane::cayley(sample_disc(rng, extent))),
            SpaceKind::ComplexBall { dim } => {
                let g: Vec<f64> = (0..2 * dim).map(|_| gaussian(rng)).collect();
                let n = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                let r = extent * rng.gen::<f64>().powf(1.0 / (2 * dim) as f64);
                Point::ComplexVec(
                    g.chunks(2)
                        .map(|c| Complex64::new(c[0] * r / n, c[1] * r / n))
                        .collect(),
                )
            }
            SpaceKind::KleinEllipsoid(e) => {
                let g: Vec<f64> = (0..e.dim()).map(|_| gaussian(rng)).collect();
                let edge = e.boundary_point(&g).unwrap_or_else(|| vec![0.0; e.dim()]);
                let r = extent * rng.gen::<f64>().powf(1.0 / e.dim() as f64);
                Point::Real(edge.into_iter().map(|c| c * r).collect())
            }
            SpaceKind::Ladder => {
                let amax = extent.max(0.0);
                let rungs = amax.floor() + 1.0;
                let rail_len = 2.0 * amax;
                let total = rail_len + 2.0 * rungs;
                let u = rng.gen::<f64>() * total;
                if u < rail_len {
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    Point::ladder(rng.gen::<f64>() * amax, sign)
                } else {
                    let n = rng.gen_range(0..rungs as usize) as f64;
                    let b = rng.gen::<f64>() * 2.0 - 1.0;
                    Point::ladder(n, b)
                }
            }
            SpaceKind::FiniteGraph(g) => Point::Vertex(rng.gen_range(0..g.vertex_count())),
        }
    }

    pub fn validate_direction(&self, xi: &BoundaryDirection) -> Result<()> {
        let bad = || Error::Argument(format!("boundary direction {xi:?} does not belong to the {}", self.name()));
        match (self.kind(), xi) {
            (SpaceKind::PoincareDisc, BoundaryDirection::Circle(u)) if (u.norm() - 1.0).abs() < 1e-9 => Ok(()),
            (SpaceKind::RightHalfPlane, BoundaryDirection::HalfPlaneInfinity) => Ok(()),
            (SpaceKind::RightHalfPlane, BoundaryDirection::HalfPlaneAxis(y)) if y.is_finite() => Ok(()),
            (SpaceKind::ComplexBall { dim }, BoundaryDirection::Sphere(u))
                if u.len() == *dim && (ball::norm_sqr(u).sqrt() - 1.0).abs() < 1e-9 =>
            {
                Ok(())
            }
            (SpaceKind::KleinEllipsoid(e), BoundaryDirection::Ellipsoid(v)) if e.boundary_point(v).is_some() => Ok(()),
            (SpaceKind::Ladder, BoundaryDirection::LadderRail(s)) if *s == 1.0 || *s == -1.0 => Ok(()),
            (SpaceKind::Ladder, BoundaryDirection::LadderEnd) => Ok(()),
            (SpaceKind::Ladder, BoundaryDirection::LadderHeight(h)) if (-1.0..=1.0).contains(h) => Ok(()),
            (SpaceKind::FiniteGraph(_), _) => Err(Error::Capability {
                operation: "boundary directions",
                space: self.name(),
            }),
            _ => Err(bad()),
        }
    }

    /// Position of a boundary direction in a compact Euclidean chart (disc
    /// chart for the half-plane); all ladder directions share one chart point,
    /// matching the single Gromov boundary point.
    pub fn boundary_chart(&self, xi: &BoundaryDirection) -> Result<Vec<f64>> {
        self.validate_direction(xi)?;
        Ok(match (self.kind(), xi) {
            (_, BoundaryDirection::Circle(u)) => vec![u.re, u.im],
            (_, BoundaryDirection::HalfPlaneInfinity) => vec![1.0, 0.0],
            (_, BoundaryDirection::HalfPlaneAxis(y)) => {
                let u = half_plane::inverse_cayley(Complex64::new(0.0, *y));
                vec![u.re, u.im]
            }
            (_, BoundaryDirection::Sphere(u)) => u.iter().flat_map(|c| [c.re, c.im]).collect(),
            (SpaceKind::KleinEllipsoid(e), BoundaryDirection::Ellipsoid(v)) => e.boundary_point(v).expect("validated"),
            _ => vec![0.0],
        })
    }

    /// Euclidean distance between two boundary directions in their chart.
    pub fn boundary_separation(&self, a: &BoundaryDirection, b: &BoundaryDirection) -> Result<f64> {
        let (x, y) = (self.boundary_chart(a)?, self.boundary_chart(b)?);
        Ok(x.iter().zip(&y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
    }

    /// Boundary direction obtained by pushing an interior point radially to
    /// the boundary (Euclidean normalization); the ladder end for the ladder.
    pub fn boundary_estimate(&self, p: &Point) -> Result<BoundaryDirection> {
        self.validate(p)?;
        let radial = |z: Complex64| if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        Ok(match (self.kind(), p) {
            (SpaceKind::PoincareDisc, Point::Complex(z)) => BoundaryDirection::Circle(radial(*z)),
            (SpaceKind::RightHalfPlane, Point::Complex(w)) => {
                let z = half_plane::inverse_cayley(*w);
                let u = radial(z);
                // the radial estimate cannot resolve angles finer than the depth 1 - |z|
                if (u - 1.0).norm() <= (1.0 - z.norm()).max(1e-9) {
                    BoundaryDirection::HalfPlaneInfinity
                } else {
                    BoundaryDirection::HalfPlaneAxis(half_plane::cayley(u).im)
                }
            }
            (SpaceKind::ComplexBall { .. }, Point::ComplexVec(v)) => {
                let n = ball::norm_sqr(v).sqrt();
                if n == 0.0 {
                    let mut e = vec![Complex64::new(0.0, 0.0); v.len()];
                    e[0] = Complex64::new(1.0, 0.0);
                    BoundaryDirection::Sphere(e)
                } else {
                    BoundaryDirection::Sphere(v.iter().map(|c| c / n).collect())
                }
            }
            (SpaceKind::KleinEllipsoid(e), Point::Real(v)) => {
                if v.iter().all(|c| *c == 0.0) {
                    let mut d = vec![0.0; e.dim()];
                    d[0] = 1.0;
                    BoundaryDirection::Ellipsoid(d)
                } else {
                    BoundaryDirection::Ellipsoid(v.clone())
                }
            }
            (SpaceKind::Ladder, _) => BoundaryDirection::LadderEnd,
            _ => {
                return Err(Error::Capability {
                    operation: "boundary directions",
                    space: self.name(),
                })
            }
        })
    }

    /// Euclidean closeness of an interior point to the boundary in the chart
    /// (`1 - |z|` style); the ladder reports `1 / (1 + a)`.
    pub fn boundary_proximity(&self, p: &Point) -> Result<f64> {
        self.validate(p)?;
        Ok(match (self.kind(), p) {
            (SpaceKind::PoincareDisc, Point::Complex(z)) => 1.0 - z.norm(),
            (SpaceKind::RightHalfPlane, Point::Complex(w)) => 1.0 - half_plane::inverse_cayley(*w).norm(),
            (SpaceKind::ComplexBall { .. }, Point::ComplexVec(v)) => 1.0 - ball::norm_sqr(v).sqrt(),
            (SpaceKind::KleinEllipsoid(e), Point::Real(v)) => 1.0 - e.form(v, v).sqrt(),
            (SpaceKind::Ladder, Point::Ladder(q)) => 1.0 / (1.0 + q.a),
            _ => {
                return Err(Error::Capability {
                    operation: "boundary proximity",
                    space: self.name(),
                })
            }
        })
    }
}

fn sample_disc<R: Rng + ?Sized>(rng: &mut R, extent: f64) -> Complex64 {
    let r = extent * rng.gen::<f64>().sqrt();
    let theta = 2.0 * PI * rng.gen::<f64>();
    Complex64::from_polar(r, theta)
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}
