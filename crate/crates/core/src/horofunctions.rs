//! Horofunctions along sequences, Busemann functions along rays, horoballs,
//! big/small horoball estimates and an empirical horoboundary atlas.
//!
//! Horofunctions are stored extensionally: values on an evaluation grid plus
//! an on-demand evaluator that re-runs the tail limit at a new point. All
//! limits stop on Cauchy increments, never on assumed monotonicity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::MapHandle;
use crate::error::{Error, Result};
use crate::geodesic::GeodesicRay;
use crate::numeric::{minimize_bracketed, MinimizeConfig};
use crate::space::{gaussian, ladder, BoundaryDirection, Point, SpaceHandle, SpaceKind};

/// Number of consecutive sub-tolerance increments required before a tail
/// limit is accepted.
const CONFIRM: usize = 2;

/// Largest ray parameter tried for rays without a precision horizon.
const MAX_RAY_PARAMETER: f64 = 1e12;

#[derive(Debug, Clone)]
pub enum HorofunctionSource {
    Sequence(Vec<Point>),
    Ray(GeodesicRay),
}

/// A basepointed horofunction `h(x) = lim d(x, w_n) - d(w_n, p)`.
#[derive(Debug, Clone)]
pub struct HorofunctionHandle {
    space: SpaceHandle,
    basepoint: Point,
    source: HorofunctionSource,
    grid: Vec<Point>,
    values: Vec<f64>,
    residual: f64,
    tolerance: f64,
    stop: f64,
}

impl HorofunctionHandle {
    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn source(&self) -> &HorofunctionSource {
        &self.source
    }

    pub fn grid(&self) -> &[Point] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest final increment seen on the grid.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Sequence index (or ray parameter) at which the grid values were accepted.
    pub fn stop(&self) -> f64 {
        self.stop
    }

    /// Evaluates the limit at an arbitrary point, re-running the tail.
    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        match &self.source {
            HorofunctionSource::Ray(ray) => busemann_detail(ray, x, &self.basepoint, self.tolerance).map(|t| t.value),
            HorofunctionSource::Sequence(seq) => {
                sequence_limit(&self.space, seq, &self.basepoint, std::slice::from_ref(x), self.tolerance)
                    .map(|t| t.values[0])
            }
        }
    }

    /// Sup-distance between two horofunctions on a shared grid.
    pub fn grid_distance(&self, other: &HorofunctionHandle) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::Argument("horofunctions live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

struct TailLimit {
    values: Vec<f64>,
    residual: f64,
    stop: f64,
}

fn sequence_limit(space: &SpaceHandle, seq: &[Point], p: &Point, xs: &[Point], tol: f64) -> Result<TailLimit> {
    if seq.len() < CONFIRM + 1 {
        return Err(Error::Argument(format!("need at least {} sequence terms", CONFIRM + 1)));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    // terms closer to p than the evaluation points can sit on spurious plateaus
    let mut reach = 0.0f64;
    for x in xs {
        reach = reach.max(space.distance(x, p)?);
    }
    let mut start = None;
    for (n, w) in seq.iter().enumerate() {
        if space.distance(w, p)? >= reach + 1.0 {
            start = Some(n);
            break;
        }
    }
    let start = start.ok_or_else(|| {
        Error::Inconclusive(format!("sequence never gets farther than {reach} + 1 from the basepoint"))
    })?;
    let eval = |w: &Point| -> Result<Vec<f64>> {
        let dwp = space.distance(w, p)?;
        xs.iter().map(|x| Ok(space.distance(x, w)? - dwp)).collect()
    };
    let mut prev = eval(&seq[start])?;
    let mut run = 0usize;
    let mut residual = 0.0f64;
    let mut last_increment = f64::INFINITY;
    for (n, w) in seq.iter().enumerate().skip(start + 1) {
        let cur = eval(w)?;
        let inc = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        last_increment = inc;
        if inc < tol {
            run += 1;
            residual = residual.max(inc);
            if run >= CONFIRM {
                return Ok(TailLimit { values: cur, residual, stop: n as f64 });
            }
        } else {
            run = 0;
            residual = 0.0;
        }
        prev = cur;
    }
    Err(Error::Inconclusive(format!(
        "horofunction tail not Cauchy: last increment {last_increment:e} exceeds tolerance {tol:e}"
    )))
}

/// Samples `d(x, w_n) - d(w_n, p)` along the tail until successive values
/// differ by less than `tolerance` on the whole grid.
pub fn horofunction_along(
    space: &SpaceHandle,
    sequence: Vec<Point>,
    p: &Point,
    grid: Vec<Point>,
    tolerance: f64,
) -> Result<HorofunctionHandle> {
    if grid.is_empty() {
        return Err(Error::Argument("evaluation grid is empty".into()));
    }
    space.validate(p)?;
    let tail = sequence_limit(space, &sequence, p, &grid, tolerance)?;
    Ok(HorofunctionHandle {
        space: space.clone(),
        basepoint: p.clone(),
        source: HorofunctionSource::Sequence(sequence),
        grid,
        values: tail.values,
        residual: tail.residual,
        tolerance,
        stop: tail.stop,
    })
}

/// Busemann function of `ray` with basepoint `p`, sampled on `grid`.
pub fn busemann_along(ray: &GeodesicRay, p: &Point, grid: Vec<Point>, tolerance: f64) -> Result<HorofunctionHandle> {
    if grid.is_empty() {
        return Err(Error::Argument("evaluation grid is empty".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    let (mut residual, mut stop) = (0.0f64, 0.0f64);
    for x in &grid {
        let b = busemann_detail(ray, x, p, tolerance)?;
        values.push(b.value);
        residual = residual.max(b.residual);
        stop = stop.max(b.stop);
    }
    Ok(HorofunctionHandle {
        space: ray.space().clone(),
        basepoint: p.clone(),
        source: HorofunctionSource::Ray(ray.clone()),
        grid,
        values,
        residual,
        tolerance,
        stop,
    })
}

struct BusemannValue {
    value: f64,
    residual: f64,
    stop: f64,
}

fn busemann_detail(ray: &GeodesicRay, x: &Point, y: &Point, tol: f64) -> Result<BusemannValue> {
    if !ray.is_ray() {
        return Err(Error::Argument("Busemann functions need a ray, not a segment".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let space = ray.space();
    let origin = ray.origin();
    let horizon = ray.horizon().min(MAX_RAY_PARAMETER);
    let mut t = 1.0f64.max(space.distance(x, &origin)?).max(space.distance(y, &origin)?);
    t = t.min(0.5 * horizon);
    let value_at = |t: f64| -> Result<f64> {
        let g = ray.point_at(t)?;
        Ok(space.distance(x, &g)? - space.distance(&g, y)?)
    };
    let mut prev = value_at(t)?;
    let (mut run, mut residual) = (0usize, 0.0f64);
    let mut inc = f64::INFINITY;
    while t < horizon {
        let cap = if horizon < MAX_RAY_PARAMETER { horizon / 8.0 } else { f64::INFINITY };
        t = (2.0 * t).min(t + cap).min(horizon);
        let cur = value_at(t)?;
        inc = (cur - prev).abs();
        prev = cur;
        if inc < tol {
            run += 1;
            residual = residual.max(inc);
            if run >= CONFIRM && t < horizon {
                return Ok(BusemannValue { value: cur, residual, stop: t });
            }
        } else {
            run = 0;
            residual = 0.0;
        }
    }
    // the last step may have been clipped short, so prefer extrapolation at the horizon
    if horizon < MAX_RAY_PARAMETER {
        if let Some(b) = extrapolated(&value_at, horizon, tol)? {
            return Ok(b);
        }
    }
    if run >= CONFIRM {
        return Ok(BusemannValue { value: prev, residual, stop: t });
    }
    Err(Error::Convergence {
        what: "Busemann limit",
        detail: format!("increment {inc:e} at the ray horizon {horizon} exceeds {tol:e}"),
    })
}

/// Aitken extrapolation on samples spaced `horizon / 8` below the horizon.
/// The pre-limit errors decay geometrically in every bounded model, so two
/// consecutive extrapolants agreeing within `tol` certify the limit.
fn extrapolated(value_at: &dyn Fn(f64) -> Result<f64>, horizon: f64, tol: f64) -> Result<Option<BusemannValue>> {
    let step = horizon / 8.0;
    let v = (0..4).map(|k| value_at(horizon - (3 - k) as f64 * step)).collect::<Result<Vec<_>>>()?;
    let aitken = |a: f64, b: f64, c: f64| {
        let denom = (c - b) - (b - a);
        if denom.abs() < f64::EPSILON * (1.0 + c.abs()) {
            c
        } else {
            c - (c - b) * (c - b) / denom
        }
    };
    let early = aitken(v[0], v[1], v[2]);
    let late = aitken(v[1], v[2], v[3]);
    let residual = (late - early).abs();
    // extrapolation must not move further than the raw tail increment suggests
    let jump = (late - v[3]).abs();
    if residual < tol && jump <= 2.0 * (v[3] - v[2]).abs() + tol {
        return Ok(Some(BusemannValue { value: late, residual, stop: horizon }));
    }
    Ok(None)
}

/// `B(x, y) = lim_t d(x, ray(t)) - d(ray(t), y)`.
pub fn busemann(ray: &GeodesicRay, x: &Point, y: &Point, tolerance: f64) -> Result<f64> {
    busemann_detail(ray, x, y, tolerance).map(|b| b.value)
}

/// Horoball `{h < log R}`.
#[derive(Debug, Clone)]
pub struct HoroballSpec {
    pub h: HorofunctionHandle,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// `|h(x) - log R|` is within the horofunction residual.
    Undecided,
}

impl HoroballSpec {
    pub fn new(h: HorofunctionHandle, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Argument(format!("horoball radius {radius} must be positive")));
        }
        Ok(HoroballSpec { h, radius })
    }

    pub fn level(&self) -> f64 {
        self.radius.ln()
    }

    pub fn membership(&self, x: &Point) -> Result<Membership> {
        let v = self.h.evaluate(x)?;
        Ok(classify(v, self.level(), self.h.residual()))
    }
}

fn classify(value: f64, level: f64, residual: f64) -> Membership {
    if (value - level).abs() <= residual {
        Membership::Undecided
    } else if value < level {
        Membership::Inside
    } else {
        Membership::Outside
    }
}

/// Settings for the approach families used by [`big_small_gap`] and the
/// dilation estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproachConfig {
    /// Number of sequences; the ladder end always gets both rails.
    pub families: usize,
    pub points_per_sequence: usize,
    /// Largest tail oscillation accepted for a single sequence.
    pub tail_tolerance: f64,
    pub seed: u64,
}

impl Default for ApproachConfig {
    fn default() -> Self {
        ApproachConfig { families: 9, points_per_sequence: 32, tail_tolerance: 1e-6, seed: 0 }
    }
}

/// Sequences converging to `xi`: the ray from `p`, rays from jittered base
/// points, and for the ladder rail-pinned and fixed-height rung sequences.
/// `reach` is the ladder coordinate where the sequences start; continuous
/// models use the second half of each ray's precision horizon.
pub(crate) fn approach_sequences(
    space: &SpaceHandle,
    xi: &BoundaryDirection,
    p: &Point,
    reach: f64,
    cfg: &ApproachConfig,
) -> Result<Vec<Vec<Point>>> {
    space.validate(p)?;
    space.validate_direction(xi)?;
    let m = cfg.points_per_sequence.max(4);
    let families = cfg.families.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if let SpaceKind::Ladder = space.kind() {
        let start = reach.max(0.0).ceil();
        let heights: Vec<(f64, bool)> = match xi {
            BoundaryDirection::LadderRail(s) => {
                (0..families).map(|i| (*s, i > 0)).collect()
            }
            BoundaryDirection::LadderHeight(h) => {
                let slide = *h == 1.0 || *h == -1.0;
                (0..families).map(|i| (*h, slide && i > 0)).collect()
            }
            _ => {
                let mut hs = vec![(1.0, false), (-1.0, false)];
                while hs.len() < families {
                    hs.push((rng.gen_range(-1.0..1.0), false));
                }
                hs
            }
        };
        return Ok(heights
            .into_iter()
            .map(|(b, slide)| {
                let offset = if slide { rng.gen::<f64>() } else { 0.0 };
                (0..m).map(|k| Point::ladder(start + k as f64 + offset, b)).collect()
            })
            .collect());
    }
    let mut out = Vec::with_capacity(families);
    for i in 0..families {
        let base = if i == 0 { p.clone() } else { space.sample_point(&mut rng, 0.5) };
        let ray = space.geodesic_ray_to(&base, xi)?;
        let h = ray.horizon();
        if !h.is_finite() {
            return Err(Error::Capability { operation: "approach sequences", space: space.name() });
        }
        let seq = (0..m)
            .map(|k| ray.point_at(0.5 * h + 0.5 * h * k as f64 / (m - 1) as f64))
            .collect::<Result<Vec<_>>>()?;
        out.push(seq);
    }
    Ok(out)
}

/// Pooled tail values of `phi` over the last quarter of every sequence, after
/// checking each sequence's tail oscillation.
pub(crate) fn pooled_tail<F>(seqs: &[Vec<Point>], tail_tolerance: f64, mut phi: F) -> Result<Vec<f64>>
where
    F: FnMut(&Point) -> Result<f64>,
{
    let mut pooled = Vec::new();
    for (i, seq) in seqs.iter().enumerate() {
        let k = (seq.len() / 4).max(2).min(seq.len());
        let vals = seq[seq.len() - k..].iter().map(&mut phi).collect::<Result<Vec<_>>>()?;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > tail_tolerance {
            return Err(Error::Inconclusive(format!(
                "approach sequence {i} oscillates by {:e} on its tail",
                hi - lo
            )));
        }
        pooled.extend(vals);
    }
    Ok(pooled)
}

/// Big and small horoball estimates at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigSmallGap {
    /// `liminf < log R`.
    pub big_member: bool,
    /// `limsup < log R`.
    pub small_member: bool,
    pub liminf: f64,
    pub limsup: f64,
    pub spread: f64,
    pub sequences: usize,
}

/// Estimates `liminf` and `limsup` of `d(x, w) - d(w, p)` as `w -> xi` over
/// several approach families, and the resulting big/small horoball memberships.
pub fn big_small_gap(
    space: &SpaceHandle,
    xi: &BoundaryDirection,
    p: &Point,
    radius: f64,
    x: &Point,
    cfg: &ApproachConfig,
) -> Result<BigSmallGap> {
    if !(radius > 0.0) {
        return Err(Error::Argument("radius must be positive".into()));
    }
    let reach = 2.0 * (space.distance(x, p)? + 2.0) + 16.0;
    let seqs = approach_sequences(space, xi, p, reach, cfg)?;
    let vals = pooled_tail(&seqs, cfg.tail_tolerance, |w| Ok(space.distance(x, w)? - space.distance(w, p)?))?;
    let liminf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let level = radius.ln();
    Ok(BigSmallGap {
        big_member: liminf < level,
        small_member: limsup < level,
        liminf,
        limsup,
        spread: limsup - liminf,
        sequences: seqs.len(),
    })
}

#[derive(Debug, Clone)]
pub struct AtlasCluster {
    pub representative: HorofunctionHandle,
    pub directions: Vec<BoundaryDirection>,
    /// Ladder only: the height `beta` whose closed form
    /// `-a + |beta| - |b + beta|` (re-based at `p`) best fits the grid values.
    pub fitted_height: Option<f64>,
    /// Sup-distance on the grid between the values and that closed form.
    pub fit_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Atlas {
    pub clusters: Vec<AtlasCluster>,
    pub threshold: f64,
    pub max_residual: f64,
}

/// Evenly spaced (ladder, disc) or random (ball, ellipsoid) boundary directions.
pub fn sample_directions(space: &SpaceHandle, count: usize, seed: u64) -> Result<Vec<BoundaryDirection>> {
    if count == 0 {
        return Err(Error::Argument("need at least one direction".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circle = |rng: &mut ChaCha8Rng| {
        let offset = rng.gen::<f64>() * std::f64::consts::TAU / count as f64;
        (0..count)
            .map(|k| num_complex::Complex64::from_polar(1.0, offset + std::f64::consts::TAU * k as f64 / count as f64))
            .collect::<Vec<_>>()
    };
    Ok(match space.kind() {
        SpaceKind::Ladder => (0..count)
            .map(|k| {
                let h = if count == 1 { 0.0 } else { -1.0 + 2.0 * k as f64 / (count - 1) as f64 };
                BoundaryDirection::LadderHeight(h)
            })
            .collect(),
        SpaceKind::PoincareDisc => circle(&mut rng).into_iter().map(BoundaryDirection::Circle).collect(),
        SpaceKind::RightHalfPlane => circle(&mut rng)
            .into_iter()
            .map(|u| {
                if (u - 1.0).norm() < 1e-12 {
                    BoundaryDirection::HalfPlaneInfinity
                } else {
                    BoundaryDirection::HalfPlaneAxis(crate::space::half_plane::cayley(u).im)
                }
            })
            .collect(),
        SpaceKind::ComplexBall { dim } => (0..count)
            .map(|_| {
                let g: Vec<f64> = (0..2 * dim).map(|_| gaussian(&mut rng)).collect();
                let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
                BoundaryDirection::Sphere(g.chunks(2).map(|c| num_complex::Complex64::new(c[0] / n, c[1] / n)).collect())
            })
            .collect(),
        SpaceKind::KleinEllipsoid(e) => (0..count)
            .map(|_| BoundaryDirection::Ellipsoid((0..e.dim()).map(|_| gaussian(&mut rng)).collect()))
            .collect(),
        SpaceKind::FiniteGraph(_) => {
            return Err(Error::Capability { operation: "boundary atlas", space: space.name() });
        }
    })
}

/// Divergent sequence used by the atlas for one direction.
fn atlas_sequence(space: &SpaceHandle, p: &Point, xi: &BoundaryDirection, reach: f64) -> Result<Vec<Point>> {
    const SAMPLES: usize = 96;
    match (space.kind(), xi) {
        (SpaceKind::Ladder, BoundaryDirection::LadderHeight(h)) => {
            let top = (2.0 * reach + 8.0).ceil() as usize;
            Ok((0..=top).map(|n| Point::ladder(n as f64, *h)).collect())
        }
        (SpaceKind::Ladder, BoundaryDirection::LadderRail(s)) => {
            let top = (2.0 * reach + 8.0).ceil() as usize;
            Ok((0..=top).map(|n| Point::ladder(n as f64, *s)).collect())
        }
        (SpaceKind::Ladder, _) => Err(Error::Argument(
            "the ladder end carries a segment of horofunctions; pick a height or a rail".into(),
        )),
        _ => {
            let ray = space.geodesic_ray_to(p, xi)?;
            let h = ray.horizon();
            (1..=SAMPLES).map(|k| ray.point_at(h * k as f64 / SAMPLES as f64)).collect()
        }
    }
}

/// Horofunctions of sequences running to sampled boundary directions,
/// clustered by grid sup-distance.
pub fn boundary_atlas(
    space: &SpaceHandle,
    p: &Point,
    grid: Vec<Point>,
    directions: usize,
    seed: u64,
    tolerance: f64,
) -> Result<Atlas> {
    let dirs = sample_directions(space, directions, seed)?;
    atlas_for_directions(space, p, grid, &dirs, tolerance)
}

/// Atlas for an explicit list of directions; clusters use the threshold
/// `max(10 * max residual, 1e-9)`.
pub fn atlas_for_directions(
    space: &SpaceHandle,
    p: &Point,
    grid: Vec<Point>,
    dirs: &[BoundaryDirection],
    tolerance: f64,
) -> Result<Atlas> {
    if grid.is_empty() {
        return Err(Error::Argument("evaluation grid is empty".into()));
    }
    if dirs.is_empty() {
        return Err(Error::Argument("need at least one direction".into()));
    }
    let mut reach = 0.0f64;
    for x in &grid {
        reach = reach.max(space.distance(x, p)?);
    }
    let mut handles = Vec::with_capacity(dirs.len());
    for xi in dirs {
        space.validate_direction(xi)?;
        let seq = atlas_sequence(space, p, xi, reach)?;
        handles.push(horofunction_along(space, seq, p, grid.clone(), tolerance)?);
    }
    let max_residual = handles.iter().map(|h| h.residual()).fold(0.0, f64::max);
    let threshold = (10.0 * max_residual).max(1e-9);
    let mut clusters: Vec<AtlasCluster> = Vec::new();
    for (h, xi) in handles.into_iter().zip(dirs) {
        let mut joined = false;
        for c in clusters.iter_mut() {
            if c.representative.grid_distance(&h)? <= threshold {
                c.directions.push(xi.clone());
                joined = true;
                break;
            }
        }
        if !joined {
            clusters.push(AtlasCluster { representative: h, directions: vec![xi.clone()], fitted_height: None, fit_error: None });
        }
    }
    if let SpaceKind::Ladder = space.kind() {
        for c in clusters.iter_mut() {
            let (beta, err) = fit_ladder_height(&c.representative, p)?;
            c.fitted_height = Some(beta);
            c.fit_error = Some(err);
        }
    }
    Ok(Atlas { clusters, threshold, max_residual })
}

fn fit_ladder_height(h: &HorofunctionHandle, p: &Point) -> Result<(f64, f64)> {
    let base = p.as_ladder().ok_or_else(|| Error::Argument("ladder basepoint expected".into()))?;
    let pts = h
        .grid()
        .iter()
        .map(|x| x.as_ladder().ok_or_else(|| Error::Argument("ladder grid expected".into())))
        .collect::<Result<Vec<_>>>()?;
    let misfit = |beta: f64| -> Result<f64> {
        let shift = ladder::horofunction(beta, &base);
        Ok(pts
            .iter()
            .zip(h.values())
            .map(|(x, v)| (ladder::horofunction(beta, x) - shift - v).abs())
            .fold(0.0, f64::max))
    };
    let cfg = MinimizeConfig { grid_step: 1.0 / 64.0, ..MinimizeConfig::default() };
    let m = minimize_bracketed(misfit, -1.0, 1.0, &cfg)?;
    Ok((m.x, m.value))
}

/// Outcome of the weak Julia inequality `h_b(f(x)) <= h_a(x) + A` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakJuliaCheck {
    /// Tail limit of `d(p, w_n) - d(p, f(w_n))`.
    pub constant: f64,
    /// `min_x h_a(x) + A - h_b(f(x))`; negative means the inequality failed there.
    pub worst_margin: f64,
    pub passed: bool,
    pub residual: f64,
}

/// Checks `h_{b,p}(f(x)) <= h_{a,p}(x) + A + slack` on every grid point, where
/// `h_a` comes from `w_n`, `h_b` from `f(w_n)`, and `A` is the tail limit of
/// `d(p, w_n) - d(p, f(w_n))`.
pub fn weak_julia_check(
    map: &MapHandle,
    sequence: &[Point],
    p: &Point,
    grid: &[Point],
    tolerance: f64,
    slack: f64,
) -> Result<WeakJuliaCheck> {
    let space = map.space();
    let images = sequence.iter().map(|w| map.apply(w)).collect::<Result<Vec<_>>>()?;
    let image_grid = grid.iter().map(|x| map.apply(x)).collect::<Result<Vec<_>>>()?;
    let ha = horofunction_along(space, sequence.to_vec(), p, grid.to_vec(), tolerance)?;
    let hb = horofunction_along(space, images.clone(), p, image_grid, tolerance)?;

    let consts = sequence
        .iter()
        .zip(&images)
        .map(|(w, fw)| Ok(space.distance(p, w)? - space.distance(p, fw)?))
        .collect::<Result<Vec<f64>>>()?;
    let n = consts.len();
    let tail_spread = consts[n - CONFIRM - 1..]
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    if tail_spread >= tolerance {
        return Err(Error::Inconclusive(format!(
            "d(p, w_n) - d(p, f(w_n)) not Cauchy on the tail (increment {tail_spread:e})"
        )));
    }
    let constant = consts[n - 1];
    let worst_margin = ha
        .values()
        .iter()
        .zip(hb.values())
        .map(|(a, b)| a + constant - b)
        .fold(f64::INFINITY, f64::min);
    Ok(WeakJuliaCheck {
        constant,
        worst_margin,
        passed: worst_margin >= -slack,
        residual: ha.residual().max(hb.residual()).max(tail_spread),
    })
}
