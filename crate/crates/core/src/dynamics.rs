//! Non-expanding self-maps: orbits, steps and divergence rate, minimal
//! displacement, Denjoy-Wolff estimates, dilations, geodesic regions,
//! boundary regular fixed points and Julia's lemma.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesic::GeodesicRay;
use crate::horofunctions::{approach_sequences, busemann, busemann_along, pooled_tail, ApproachConfig, HoroballSpec, Membership};
use crate::hyperbolicity::{distance_to_ray, gromov_product, is_quasigeodesic, QuasiGeodesicCertificate};
use crate::space::{ball, BoundaryDirection, Point, SpaceHandle, SpaceKind};

/// Pairs sampled when a map is validated.
pub const VALIDATION_PAIRS: usize = 10_000;
/// Slack allowed in `d(f x, f y) <= d(x, y)`.
pub const NON_EXPANSION_SLACK: f64 = 1e-9;
/// Orbits in bounded models stop once this close (in the Euclidean chart) to the boundary.
pub const PROXIMITY_FLOOR: f64 = 1e-6;
/// Step sizes recorded in every orbit.
pub const STEP_SIZES: [usize; 4] = [1, 2, 4, 8];

#[derive(Debug, Clone, PartialEq)]
pub enum MapRule {
    Identity,
    /// Hyperbolic automorphism with attracting and repelling boundary fixed
    /// points, conjugate to `u -> multiplier * u`.
    MobiusDisc { attracting: Complex64, repelling: Complex64, multiplier: f64 },
    RotationDisc { angle: f64 },
    /// `z -> U phi_a(z)` with `U = diag(exp(i phases))`.
    MobiusBall { point: Vec<Complex64>, phases: Vec<f64> },
    /// `w -> k w + c` with `k > 0`, `Re c >= 0`.
    HalfPlaneAffine { k: f64, c: Complex64 },
    /// `(a, b) -> (a + 1, 1)`.
    LadderF1,
    /// `(a, b) -> (a + 1, -b)`.
    LadderF2,
    /// Vertex `v` goes to `table[v]`.
    GraphTable(Vec<usize>),
    /// Applied left to right.
    Composite(Vec<MapRule>),
}

/// A validated non-expanding self-map.
#[derive(Debug, Clone)]
pub struct MapHandle {
    space: SpaceHandle,
    rule: MapRule,
}

fn mobius_disc(attracting: Complex64, repelling: Complex64, k: f64, z: Complex64) -> Complex64 {
    let u = k * (z - repelling) / (z - attracting);
    (repelling - attracting * u) / (1.0 - u)
}

fn ladder_point(x: &Point) -> Result<crate::LadderPoint> {
    x.as_ladder().ok_or_else(|| Error::Domain { space: "ladder", detail: format!("{x} is not a ladder point") })
}

fn no_preimage(x: &Point) -> Error {
    Error::Precondition(format!("{x} has no preimage"))
}

impl MapHandle {
    /// Checks the rule against the space, then samples [`VALIDATION_PAIRS`]
    /// pairs (all pairs for small graphs) for non-expansion.
    pub fn new(space: &SpaceHandle, rule: MapRule) -> Result<Self> {
        check_rule(space, &rule)?;
        let map = MapHandle { space: space.clone(), rule };
        map.validate_non_expansion(VALIDATION_PAIRS, 0x5eed)?;
        Ok(map)
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn rule(&self) -> &MapRule {
        &self.rule
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.space.validate(x)?;
        let y = apply_rule(&self.rule, x)?;
        self.space.validate(&y)?;
        Ok(y)
    }

    /// A preimage of `x`, in closed form for every built-in rule.
    pub fn preimage(&self, x: &Point) -> Result<Point> {
        self.space.validate(x)?;
        let y = preimage_rule(&self.rule, x)?;
        self.space.validate(&y).map_err(|_| no_preimage(x))?;
        Ok(y)
    }

    /// A point on the invariant geodesic of a hyperbolic disc automorphism
    /// (the one closest to the origin).
    pub fn axis_point(&self) -> Option<Point> {
        match &self.rule {
            MapRule::MobiusDisc { attracting, repelling, .. } => {
                let s = attracting + repelling;
                if s.norm() < 1e-12 {
                    return Some(Point::complex(0.0, 0.0));
                }
                let cos = s.norm() / 2.0;
                let sin = (attracting - repelling).norm() / 2.0;
                Some(Point::Complex(s / s.norm() * ((1.0 - sin) / cos)))
            }
            MapRule::HalfPlaneAffine { c, .. } if c.norm() == 0.0 => Some(Point::complex(1.0, 0.0)),
            _ => None,
        }
    }

    pub fn validate_non_expansion(&self, pairs: usize, seed: u64) -> Result<()> {
        let check = |x: &Point, y: &Point| -> Result<()> {
            let d = self.space.distance(x, y)?;
            let e = self.space.distance(&self.apply(x)?, &self.apply(y)?)?;
            if e > d + NON_EXPANSION_SLACK {
                return Err(Error::MapValidation(format!("d(f x, f y) = {e} > d(x, y) = {d} at x = {x}, y = {y}")));
            }
            Ok(())
        };
        if let SpaceKind::FiniteGraph(g) = self.space.kind() {
            let n = g.vertex_count();
            if n * n <= pairs {
                for i in 0..n {
                    for j in i + 1..n {
                        check(&Point::Vertex(i), &Point::Vertex(j))?;
                    }
                }
                return Ok(());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extent = validation_extent(&self.space);
        for _ in 0..pairs {
            let x = self.space.sample_point(&mut rng, extent);
            let y = self.space.sample_point(&mut rng, extent);
            check(&x, &y)?;
        }
        Ok(())
    }
}

fn validation_extent(space: &SpaceHandle) -> f64 {
    match space.kind() {
        SpaceKind::Ladder => 20.0,
        _ => 0.95,
    }
}

fn check_rule(space: &SpaceHandle, rule: &MapRule) -> Result<()> {
    let mismatch = |what: &str| Err(Error::Argument(format!("rule {what} does not act on the {}", space.name())));
    match (rule, space.kind()) {
        (MapRule::Identity, _) => Ok(()),
        (MapRule::MobiusDisc { attracting, repelling, multiplier }, SpaceKind::PoincareDisc) => {
            if (attracting.norm() - 1.0).abs() > 1e-12 || (repelling.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Argument("fixed points must lie on the unit circle".into()));
            }
            if (attracting - repelling).norm() < 1e-9 {
                return Err(Error::Argument("fixed points must be distinct".into()));
            }
            if !(*multiplier > 1.0) || !multiplier.is_finite() {
                return Err(Error::Argument("multiplier must exceed 1".into()));
            }
            Ok(())
        }
        (MapRule::RotationDisc { angle }, SpaceKind::PoincareDisc) if angle.is_finite() => Ok(()),
        (MapRule::MobiusBall { point, phases }, SpaceKind::ComplexBall { dim }) => {
            if point.len() != *dim || phases.len() != *dim || !ball::is_inside(point) {
                return Err(Error::Argument("ball automorphism needs an interior point and one phase per coordinate".into()));
            }
            Ok(())
        }
        (MapRule::HalfPlaneAffine { k, c }, SpaceKind::RightHalfPlane) => {
            if !(*k > 0.0) || !k.is_finite() || !(c.re >= 0.0) || !c.im.is_finite() {
                return Err(Error::Argument("affine map needs k > 0 and Re c >= 0".into()));
            }
            Ok(())
        }
        (MapRule::LadderF1 | MapRule::LadderF2, SpaceKind::Ladder) => Ok(()),
        (MapRule::GraphTable(t), SpaceKind::FiniteGraph(g)) => {
            if t.len() != g.vertex_count() || t.iter().any(|v| *v >= g.vertex_count()) {
                return Err(Error::Argument("graph table must map every vertex to a vertex".into()));
            }
            Ok(())
        }
        (MapRule::Composite(rules), _) => rules.iter().try_for_each(|r| check_rule(space, r)),
        (MapRule::MobiusDisc { .. }, _) => mismatch("mobius_disc"),
        (MapRule::RotationDisc { .. }, _) => mismatch("rotation_disc"),
        (MapRule::MobiusBall { .. }, _) => mismatch("mobius_ball"),
        (MapRule::HalfPlaneAffine { .. }, _) => mismatch("half_plane_affine"),
        (MapRule::LadderF1 | MapRule::LadderF2, _) => mismatch("ladder"),
        (MapRule::GraphTable(_), _) => mismatch("graph_table"),
    }
}

fn complex_of(x: &Point) -> Result<Complex64> {
    x.as_complex().ok_or_else(|| Error::Argument(format!("{x} is not a complex point")))
}

fn apply_rule(rule: &MapRule, x: &Point) -> Result<Point> {
    Ok(match rule {
        MapRule::Identity => x.clone(),
        MapRule::MobiusDisc { attracting, repelling, multiplier } => {
            Point::Complex(mobius_disc(*attracting, *repelling, *multiplier, complex_of(x)?))
        }
        MapRule::RotationDisc { angle } => Point::Complex(Complex64::from_polar(1.0, *angle) * complex_of(x)?),
        MapRule::MobiusBall { point, phases } => {
            let Point::ComplexVec(z) = x else { return Err(Error::Argument(format!("{x} is not a ball point"))) };
            let w = ball::involution(point, z);
            Point::ComplexVec(w.iter().zip(phases).map(|(c, t)| c * Complex64::from_polar(1.0, *t)).collect())
        }
        MapRule::HalfPlaneAffine { k, c } => Point::Complex(*k * complex_of(x)? + c),
        MapRule::LadderF1 => {
            let q = ladder_point(x)?;
            Point::ladder(q.a + 1.0, 1.0)
        }
        MapRule::LadderF2 => {
            let q = ladder_point(x)?;
            Point::ladder(q.a + 1.0, -q.b)
        }
        MapRule::GraphTable(t) => match x {
            Point::Vertex(v) if *v < t.len() => Point::Vertex(t[*v]),
            _ => return Err(Error::Argument(format!("{x} is not a vertex of the table"))),
        },
        MapRule::Composite(rules) => {
            let mut y = x.clone();
            for r in rules {
                y = apply_rule(r, &y)?;
            }
            y
        }
    })
}

fn preimage_rule(rule: &MapRule, x: &Point) -> Result<Point> {
    Ok(match rule {
        MapRule::Identity => x.clone(),
        MapRule::MobiusDisc { attracting, repelling, multiplier } => {
            Point::Complex(mobius_disc(*attracting, *repelling, 1.0 / multiplier, complex_of(x)?))
        }
        MapRule::RotationDisc { angle } => Point::Complex(Complex64::from_polar(1.0, -angle) * complex_of(x)?),
        MapRule::MobiusBall { point, phases } => {
            let Point::ComplexVec(w) = x else { return Err(Error::Argument(format!("{x} is not a ball point"))) };
            let v: Vec<Complex64> = w.iter().zip(phases).map(|(c, t)| c * Complex64::from_polar(1.0, -t)).collect();
            Point::ComplexVec(ball::involution(point, &v))
        }
        MapRule::HalfPlaneAffine { k, c } => {
            let y = (complex_of(x)? - c) / *k;
            if !(y.re > 0.0) {
                return Err(no_preimage(x));
            }
            Point::Complex(y)
        }
        MapRule::LadderF1 => {
            let q = ladder_point(x)?;
            if q.b != 1.0 || q.a < 1.0 {
                return Err(no_preimage(x));
            }
            Point::ladder(q.a - 1.0, 1.0)
        }
        MapRule::LadderF2 => {
            let q = ladder_point(x)?;
            if q.a < 1.0 {
                return Err(no_preimage(x));
            }
            Point::ladder(q.a - 1.0, -q.b)
        }
        MapRule::GraphTable(t) => match x {
            Point::Vertex(v) => Point::Vertex(t.iter().position(|u| u == v).ok_or_else(|| no_preimage(x))?),
            _ => return Err(Error::Argument(format!("{x} is not a vertex"))),
        },
        MapRule::Composite(rules) => {
            let mut y = x.clone();
            for r in rules.iter().rev() {
                y = preimage_rule(r, &y)?;
            }
            y
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    Bounded,
    Diverging,
    Inconclusive,
}

/// `values[n] = d(x_n, x_{n+m})`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTable {
    pub m: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub points: Vec<Point>,
    pub direction: OrbitDirection,
    pub steps: Vec<StepTable>,
    pub class: OrbitClass,
    /// Number of steps requested; `points.len() - 1` may be smaller when
    /// the orbit reached the precision floor.
    pub requested: usize,
}

impl OrbitRecord {
    pub fn truncated(&self) -> bool {
        self.points.len() < self.requested + 1
    }

    pub fn step(&self, m: usize) -> Option<&StepTable> {
        self.steps.iter().find(|s| s.m == m)
    }
}

fn near_precision_floor(space: &SpaceHandle, x: &Point) -> bool {
    match space.kind() {
        SpaceKind::Ladder | SpaceKind::FiniteGraph(_) => false,
        SpaceKind::RightHalfPlane => {
            // the disc chart is too coarse at infinity; use the half-plane itself
            let w = x.as_complex().unwrap_or_default();
            !(w.re > PROXIMITY_FLOOR * (1.0 + w.norm())) || w.norm() > 1.0 / PROXIMITY_FLOOR.powi(2)
        }
        _ => space.boundary_proximity(x).map_or(true, |p| p < PROXIMITY_FLOOR),
    }
}

fn step_tables(space: &SpaceHandle, points: &[Point]) -> Result<Vec<StepTable>> {
    STEP_SIZES
        .iter()
        .map(|&m| {
            let values = if points.len() > m {
                (0..points.len() - m)
                    .map(|n| space.distance(&points[n], &points[n + m]))
                    .collect::<Result<Vec<_>>>()?
            } else {
                Vec::new()
            };
            Ok(StepTable { m, values })
        })
        .collect()
}

fn classify(space: &SpaceHandle, points: &[Point], hit_floor: bool) -> Result<OrbitClass> {
    // an orbit that reached the precision floor has left every compact set we can resolve
    if hit_floor {
        return Ok(OrbitClass::Diverging);
    }
    let n = points.len() - 1;
    if n < 4 {
        return Ok(OrbitClass::Inconclusive);
    }
    let from_start = points.iter().map(|x| space.distance(&points[0], x)).collect::<Result<Vec<_>>>()?;
    let head_max = from_start[..=n / 4].iter().copied().fold(0.0, f64::max);
    let tail = &from_start[n - n / 4..];
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().copied().fold(0.0, f64::max);
    if tail_max <= head_max + 1e-9 * (1.0 + head_max) {
        return Ok(OrbitClass::Bounded);
    }
    if tail_min > head_max {
        return Ok(OrbitClass::Diverging);
    }
    Ok(OrbitClass::Inconclusive)
}

/// Forward orbit `x, f x, ..., f^n x` with step tables and a classification.
pub fn iterate(f: &MapHandle, x: &Point, n: usize) -> Result<OrbitRecord> {
    f.space.validate(x)?;
    let mut points = vec![x.clone()];
    let mut hit_floor = false;
    for _ in 0..n {
        let y = match f.apply(points.last().unwrap()) {
            Ok(y) => y,
            Err(Error::Domain { .. }) => {
                hit_floor = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if near_precision_floor(&f.space, &y) {
            hit_floor = true;
            break;
        }
        points.push(y);
    }
    let steps = step_tables(&f.space, &points)?;
    let class = classify(&f.space, &points, hit_floor)?;
    Ok(OrbitRecord { points, direction: OrbitDirection::Forward, steps, class, requested: n })
}

/// Backward orbit `x_0 = x`, `f(x_{n+1}) = x_n`, using closed-form preimages.
pub fn backward_orbit(f: &MapHandle, x: &Point, n: usize) -> Result<OrbitRecord> {
    f.space.validate(x)?;
    let mut points = vec![x.clone()];
    let mut hit_floor = false;
    for _ in 0..n {
        let prev = points.last().unwrap();
        let y = f.preimage(prev)?;
        if near_precision_floor(&f.space, &y) {
            hit_floor = true;
            break;
        }
        let residual = f.space.distance(&f.apply(&y)?, prev)?;
        if residual > 1e-8 {
            return Err(Error::Solver { residual });
        }
        points.push(y);
    }
    let steps = step_tables(&f.space, &points)?;
    for t in &steps {
        for w in t.values.windows(2) {
            if w[1] < w[0] - 1e-9 * (1.0 + w[0]) {
                return Err(Error::MapValidation(format!("backward {}-step decreased from {} to {}", t.m, w[0], w[1])));
            }
        }
    }
    let class = classify(&f.space, &points, hit_floor)?;
    Ok(OrbitRecord { points, direction: OrbitDirection::Backward, steps, class, requested: n })
}

/// Estimate of the forward `m`-step with the sequence it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct StepEstimate {
    pub m: usize,
    pub value: f64,
    pub sequence: Vec<f64>,
}

/// `s_m(x) = lim_n d(f^n x, f^{n+m} x)`, read at the end of the resolved
/// orbit of length `tail + m`; the sequence must be non-increasing.
pub fn forward_step(f: &MapHandle, x: &Point, m: usize, tail: usize) -> Result<StepEstimate> {
    if m == 0 {
        return Err(Error::Argument("step size must be at least 1".into()));
    }
    let orbit = iterate(f, x, tail + m)?;
    let pts = &orbit.points;
    if pts.len() <= m {
        return Err(Error::Inconclusive(format!("orbit resolved for {} steps only", pts.len() - 1)));
    }
    let seq = (0..pts.len() - m)
        .map(|n| f.space.distance(&pts[n], &pts[n + m]))
        .collect::<Result<Vec<_>>>()?;
    for w in seq.windows(2) {
        if w[1] > w[0] + 1e-9 * (1.0 + w[0]) {
            return Err(Error::MapValidation(format!("{m}-step increased from {} to {}", w[0], w[1])));
        }
    }
    Ok(StepEstimate { m, value: *seq.last().unwrap(), sequence: seq })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRate {
    /// `min(primary, secondary)`; both are upper bounds of `c(f)`.
    pub estimate: f64,
    /// `d(x, f^N x) / N` at the last resolved `N`.
    pub primary: f64,
    /// `min_{m <= 16} s_m / m` with `s_m` read at the orbit's end.
    pub secondary: f64,
    pub discrepancy: f64,
    /// `discrepancy > 0.05 (1 + |c|)`: convergence is slow on this horizon.
    pub warning: bool,
    pub resolved_steps: usize,
}

pub fn divergence_rate(f: &MapHandle, x: &Point, horizon: usize) -> Result<DivergenceRate> {
    if horizon < 64 {
        return Err(Error::Argument("divergence rate needs a horizon of at least 64".into()));
    }
    let orbit = iterate(f, x, horizon)?;
    let pts = &orbit.points;
    let n = pts.len() - 1;
    if n == 0 {
        return Err(Error::Inconclusive("orbit left the resolvable region immediately".into()));
    }
    let primary = f.space.distance(&pts[0], &pts[n])? / n as f64;
    let mut secondary = f64::INFINITY;
    for m in 1..=n.min(16) {
        secondary = secondary.min(f.space.distance(&pts[n - m], &pts[n])? / m as f64);
    }
    let estimate = primary.min(secondary);
    let discrepancy = (primary - secondary).abs();
    Ok(DivergenceRate {
        estimate,
        primary,
        secondary,
        discrepancy,
        warning: discrepancy > 0.05 * (1.0 + estimate.abs()),
        resolved_steps: n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    /// Upper bound on `tau(f) = inf_x d(x, f x)`.
    pub upper_bound: f64,
    pub argmin: Point,
    pub candidates: usize,
}

/// `min d(x, f x)` over the given candidates.
pub fn minimal_displacement(f: &MapHandle, candidates: &[Point]) -> Result<Displacement> {
    let mut best: Option<(f64, &Point)> = None;
    for x in candidates {
        let d = f.space.distance(x, &f.apply(x)?)?;
        if best.map_or(true, |(b, _)| d < b) {
            best = Some((d, x));
        }
    }
    let (upper_bound, argmin) = best.ok_or_else(|| Error::Argument("no candidate points".into()))?;
    Ok(Displacement { upper_bound, argmin: argmin.clone(), candidates: candidates.len() })
}

/// [`minimal_displacement`] over `n` random points of [`SpaceHandle::sample_point`].
pub fn minimal_displacement_sampled(f: &MapHandle, extent: f64, n: usize, seed: u64) -> Result<Displacement> {
    if n == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Point> = (0..n).map(|_| f.space.sample_point(&mut rng, extent)).collect();
    minimal_displacement(f, &pts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenjoyWolff {
    pub direction: BoundaryDirection,
    /// Largest pairwise chart separation of the terminal directions.
    pub agreement: f64,
    /// Smallest Gromov product (based at the first start) of terminal points.
    pub min_tail_product: f64,
}

/// Terminal directions of the orbits of `starts` and their agreement.
pub fn denjoy_wolff(f: &MapHandle, starts: &[Point], horizon: usize, agreement_tolerance: f64) -> Result<DenjoyWolff> {
    if starts.is_empty() {
        return Err(Error::Argument("need at least one start".into()));
    }
    let mut terminals = Vec::with_capacity(starts.len());
    for x in starts {
        let orbit = iterate(f, x, horizon)?;
        if orbit.class != OrbitClass::Diverging {
            return Err(Error::Precondition(format!("orbit of {x} is classified {:?}, not diverging", orbit.class)));
        }
        terminals.push(orbit.points.last().unwrap().clone());
    }
    let dirs = terminals.iter().map(|t| f.space.boundary_estimate(t)).collect::<Result<Vec<_>>>()?;
    let mut agreement = 0.0f64;
    let mut min_tail_product = f64::INFINITY;
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            agreement = agreement.max(f.space.boundary_separation(&dirs[i], &dirs[j])?);
            min_tail_product = min_tail_product.min(gromov_product(&f.space, &terminals[i], &terminals[j], &starts[0])?);
        }
    }
    if agreement > agreement_tolerance {
        return Err(Error::Inconclusive(format!("terminal directions disagree by {agreement}")));
    }
    Ok(DenjoyWolff { direction: dirs[0].clone(), agreement, min_tail_product })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationEstimate {
    pub eta: BoundaryDirection,
    pub p: Point,
    /// `log lambda_{eta, p}`: min of `d(z, p) - d(f z, p)` over the pooled tail.
    pub value: f64,
    /// Largest pooled tail value; `max - value` is the spread across the approach family.
    pub jitter_spread: f64,
    pub sequences: usize,
    pub tail_points: usize,
}

/// `log lambda = liminf_{z -> eta} d(z, p) - d(f z, p)`, estimated as a min
/// over the pooled tails of [`ApproachConfig::families`] approach sequences.
pub fn dilation(f: &MapHandle, eta: &BoundaryDirection, p: &Point, cfg: &ApproachConfig) -> Result<DilationEstimate> {
    let fp = f.apply(p)?;
    let reach = 2.0 * (f.space.distance(p, &fp)? + 2.0) + 16.0;
    let seqs = approach_sequences(&f.space, eta, p, reach, cfg)?;
    let vals = pooled_tail(&seqs, cfg.tail_tolerance, |z| {
        Ok(f.space.distance(z, p)? - f.space.distance(&f.apply(z)?, p)?)
    })?;
    let value = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DilationEstimate {
        eta: eta.clone(),
        p: p.clone(),
        value,
        jitter_spread: hi - value,
        sequences: seqs.len(),
        tail_points: vals.len(),
    })
}

/// `A(gamma, R) = {x : inf_t d(x, gamma(t)) < R}`.
#[derive(Debug, Clone)]
pub struct GeodesicRegion {
    pub ray: GeodesicRay,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMembership {
    pub member: bool,
    pub distance: f64,
    pub parameter: f64,
}

impl GeodesicRegion {
    pub fn new(ray: GeodesicRay, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Argument("region radius must be positive".into()));
        }
        if !ray.is_ray() {
            return Err(Error::Argument("geodesic regions are built on rays".into()));
        }
        Ok(GeodesicRegion { ray, radius })
    }
}

pub fn region_membership(region: &GeodesicRegion, x: &Point) -> Result<RegionMembership> {
    let m = distance_to_ray(&region.ray, x)?;
    Ok(RegionMembership { member: m.value < region.radius, distance: m.value, parameter: m.x })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDivergence {
    pub passed: bool,
    pub values: Vec<f64>,
    /// Index from which the values stay below each rehearsal bound.
    pub crossings: Vec<usize>,
}

/// Checks that `B_gamma(x_n, p)` eventually stays below each of `bounds`
/// (in decreasing order), for a sequence inside the region.
pub fn region_busemann_divergence(
    region: &GeodesicRegion,
    xs: &[Point],
    p: &Point,
    bounds: &[f64],
    tolerance: f64,
) -> Result<RegionDivergence> {
    for x in xs {
        if !region_membership(region, x)?.member {
            return Err(Error::Precondition(format!("{x} is outside the geodesic region")));
        }
    }
    let values = xs.iter().map(|x| busemann(&region.ray, x, p, tolerance)).collect::<Result<Vec<_>>>()?;
    let mut crossings = Vec::with_capacity(bounds.len());
    let mut last = 0usize;
    for &b in bounds {
        // first index after which every value stays below b
        let from = values.iter().rposition(|v| *v >= b).map_or(0, |i| i + 1);
        if from >= values.len() {
            return Err(Error::Inconclusive(format!("Busemann values never settle below {b}")));
        }
        if from < last {
            crossings.push(last);
        } else {
            crossings.push(from);
            last = from;
        }
    }
    Ok(RegionDivergence { passed: true, values, crossings })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrfpCheck {
    pub is_brfp: bool,
    pub log_dilation: f64,
    /// Largest chart separation between `eta` and the boundary estimates of the images.
    pub image_separation: f64,
}

/// Finite dilation plus the geodesic-limit surrogate: images of the approach
/// sequences (which lie in geodesic regions with vertex `eta`) must return to `eta`.
pub fn brfp_check(f: &MapHandle, eta: &BoundaryDirection, p: &Point, cfg: &ApproachConfig, separation: f64) -> Result<BrfpCheck> {
    let dil = dilation(f, eta, p, cfg)?;
    let image_separation = image_separation(f, eta, p, cfg)?.0;
    Ok(BrfpCheck {
        is_brfp: dil.value.is_finite() && image_separation <= separation,
        log_dilation: dil.value,
        image_separation,
    })
}

/// Max separation from `eta` of the pushed-forward terminal points, and the
/// boundary estimate of the first (radial) image.
fn image_separation(f: &MapHandle, eta: &BoundaryDirection, p: &Point, cfg: &ApproachConfig) -> Result<(f64, BoundaryDirection)> {
    let reach = 2.0 * (f.space.distance(p, &f.apply(p)?)? + 2.0) + 16.0;
    let seqs = approach_sequences(&f.space, eta, p, reach, cfg)?;
    let mut worst = 0.0f64;
    let mut first = None;
    for seq in &seqs {
        let image = f.apply(seq.last().unwrap())?;
        let dir = f.space.boundary_estimate(&image)?;
        worst = worst.max(f.space.boundary_separation(eta, &dir)?);
        first.get_or_insert(dir);
    }
    Ok((worst, first.expect("at least one approach sequence")))
}

/// Settings for [`julia_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JuliaConfig {
    pub samples: usize,
    pub slack: f64,
    pub seed: u64,
    /// Sampling region for [`SpaceHandle::sample_point`].
    pub extent: f64,
    /// Tolerance of the Busemann limits.
    pub tolerance: f64,
    /// Rejection attempts allowed per accepted sample.
    pub attempts_per_sample: usize,
}

impl Default for JuliaConfig {
    fn default() -> Self {
        JuliaConfig { samples: 10_000, slack: 1e-6, seed: 0, extent: 0.999, tolerance: 1e-8, attempts_per_sample: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JuliaCheck {
    pub passed: bool,
    pub log_lambda: f64,
    pub xi: BoundaryDirection,
    /// `min log(lambda R) - h_xi(f x)` over the accepted samples.
    pub worst_margin: f64,
    pub worst_point: Option<Point>,
    pub violations: usize,
    pub samples: usize,
}

/// Samples the horoball `E_p(eta, R)` and checks that `f` maps it into
/// `E_p(xi, lambda R)`.
pub fn julia_check(f: &MapHandle, eta: &BoundaryDirection, p: &Point, radius: f64, cfg: &JuliaConfig) -> Result<JuliaCheck> {
    if !(radius > 0.0) {
        return Err(Error::Argument("horoball radius must be positive".into()));
    }
    let approach = ApproachConfig { families: 16, seed: cfg.seed, ..ApproachConfig::default() };
    let dil = dilation(f, eta, p, &ApproachConfig { seed: cfg.seed, ..ApproachConfig::default() })?;
    let (sep, estimate) = image_separation(f, eta, p, &approach)?;
    let xi = if sep <= 1e-3 { eta.clone() } else { estimate };

    let source_ray = f.space.geodesic_ray_to(p, eta)?;
    let target_ray = f.space.geodesic_ray_to(p, &xi)?;
    let source = HoroballSpec::new(busemann_along(&source_ray, p, vec![p.clone()], cfg.tolerance)?, radius)?;
    let target = busemann_along(&target_ray, p, vec![p.clone()], cfg.tolerance)?;
    let level = dil.value + radius.ln();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut accepted, mut attempts, mut violations) = (0usize, 0usize, 0usize);
    let mut worst_margin = f64::INFINITY;
    let mut worst_point = None;
    let budget = cfg.samples.saturating_mul(cfg.attempts_per_sample);
    while accepted < cfg.samples {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Sampling(format!(
                "accepted {accepted} of {} horoball samples in {budget} attempts",
                cfg.samples
            )));
        }
        let x = f.space.sample_point(&mut rng, cfg.extent);
        if source.membership(&x)? != Membership::Inside {
            continue;
        }
        accepted += 1;
        let margin = level - target.evaluate(&f.apply(&x)?)?;
        if margin < -cfg.slack {
            violations += 1;
        }
        if margin < worst_margin {
            worst_margin = margin;
            worst_point = Some(x);
        }
    }
    Ok(JuliaCheck {
        passed: violations == 0,
        log_lambda: dil.value,
        xi,
        worst_margin,
        worst_point,
        violations,
        samples: accepted,
    })
}

/// Quasi-geodesic check of an orbit with `B = 0` and the constants of the
/// forward/backward orbit estimates.
pub fn orbit_quasigeodesic_check(space: &SpaceHandle, orbit: &OrbitRecord, c_estimate: f64) -> Result<QuasiGeodesicCertificate> {
    if !(c_estimate > 0.0) {
        return Err(Error::Precondition(format!("divergence rate {c_estimate} must be positive")));
    }
    if orbit.points.len() < 2 {
        return Err(Error::Argument("orbit has fewer than two points".into()));
    }
    let first_step = space.distance(&orbit.points[0], &orbit.points[1])?;
    let a = match orbit.direction {
        OrbitDirection::Forward => (1.0 / c_estimate).max(first_step),
        OrbitDirection::Backward => {
            let sigma1 = orbit.step(1).map_or(first_step, |t| t.values.iter().copied().fold(0.0, f64::max));
            sigma1.max(1.0 / c_estimate)
        }
    };
    is_quasigeodesic(space, &orbit.points, a.max(1.0), 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KingCheck {
    pub passed: bool,
    pub log_lambda: f64,
    pub c_estimate: f64,
    pub zeta: BoundaryDirection,
}

/// `log lambda_{zeta, p} <= -c(f) + 0.02`, with `zeta` from the orbit of
/// `p`, `c` from [`divergence_rate`] at `p`, and `lambda` from [`dilation`].
pub fn king_inequality_check(f: &MapHandle, p: &Point, horizon: usize) -> Result<KingCheck> {
    let dw = denjoy_wolff(f, std::slice::from_ref(p), horizon, 1e-3)?;
    let zeta = match (f.space.kind(), &dw.direction) {
        (SpaceKind::Ladder, _) => BoundaryDirection::LadderEnd,
        (_, d) => d.clone(),
    };
    let rate = divergence_rate(f, p, horizon)?;
    let dil = dilation(f, &zeta, p, &ApproachConfig::default())?;
    Ok(KingCheck {
        passed: dil.value <= -rate.estimate + 0.02,
        log_lambda: dil.value,
        c_estimate: rate.estimate,
        zeta,
    })
}
