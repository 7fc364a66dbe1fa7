//! Gromov products, four-point hyperbolicity, quasi-geodesics, and
//! (strong) asymptoticity of geodesic rays.
//!
//! Limit statements are checked on finite horizons. Whenever the evidence on
//! the horizon does not settle the question the result is reported as
//! inconclusive rather than negative.

use std::ops::{Add, Sub};

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesic::GeodesicRay;
use crate::numeric::{minimize_bracketed, MinimizeConfig, Minimum};
use crate::space::{Point, SpaceHandle};

/// `(x|y)_p = 1/2 (d(x,p) + d(y,p) - d(x,y))`.
pub fn gromov_product(space: &SpaceHandle, x: &Point, y: &Point, p: &Point) -> Result<f64> {
    let dxp = space.distance(x, p)?;
    let dyp = space.distance(y, p)?;
    let dxy = space.distance(x, y)?;
    Ok(0.5 * (dxp + dyp - dxy))
}

/// Four-point defect `min((x|z)_p, (y|z)_p) - (x|y)_p` from the six pairwise distances.
#[inline]
fn defect_from_distances(dxy: f64, dxz: f64, dyz: f64, dxp: f64, dyp: f64, dzp: f64) -> f64 {
    let xz = 0.5 * (dxp + dzp - dxz);
    let yz = 0.5 * (dyp + dzp - dyz);
    let xy = 0.5 * (dxp + dyp - dxy);
    xz.min(yz) - xy
}

/// Largest four-point defect found, with the maximizing quadruple `(x, y, z, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEstimate {
    /// A lower bound on the hyperbolicity constant (exact when exhaustive).
    pub delta: f64,
    pub quadruple: Option<[Point; 4]>,
    pub samples: usize,
    pub exhaustive: bool,
}

/// Region the random quadruples are drawn from; see [`SpaceHandle::sample_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub extent: f64,
    pub seed: u64,
}

/// Empirical four-point estimate of `delta` from `n` random quadruples.
///
/// Quadruples are drawn from a seeded stream, so the first `n` quadruples of
/// a larger run are exactly the quadruples of a run of size `n`; the estimate
/// is therefore monotone in `n` for a fixed seed.
pub fn delta_estimate(space: &SpaceHandle, sampler: &Sampler, n: usize) -> Result<DeltaEstimate> {
    if n == 0 {
        return Err(Error::Argument("delta estimate needs at least one quadruple".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut best = DeltaEstimate { delta: 0.0, quadruple: None, samples: n, exhaustive: false };
    let mut best_raw = f64::NEG_INFINITY;
    for _ in 0..n {
        let q: [Point; 4] = std::array::from_fn(|_| space.sample_point(&mut rng, sampler.extent));
        let [x, y, z, p] = &q;
        let defect = defect_from_distances(
            space.distance(x, y)?,
            space.distance(x, z)?,
            space.distance(y, z)?,
            space.distance(x, p)?,
            space.distance(y, p)?,
            space.distance(z, p)?,
        );
        if defect > best_raw {
            best_raw = defect;
            best.quadruple = Some(q);
        }
    }
    best.delta = best_raw.max(0.0);
    Ok(best)
}

/// Exact four-point constant of a finite point set, maximizing over all
/// ordered quadruples. `points` must be pairwise reachable.
pub fn delta_exhaustive(space: &SpaceHandle, points: &[Point]) -> Result<DeltaEstimate> {
    if points.is_empty() {
        return Err(Error::Argument("empty point set".into()));
    }
    let n = points.len();
    let mut table = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = space.distance(&points[i], &points[j])?;
            table[i][j] = d;
            table[j][i] = d;
        }
    }
    let (doubled, idx) = doubled_defect_exhaustive(&table);
    Ok(DeltaEstimate {
        delta: 0.5 * doubled,
        quadruple: idx.map(|q| q.map(|i| points[i].clone())),
        samples: n.pow(4),
        exhaustive: true,
    })
}

/// Twice the four-point constant of a distance table, with the maximizing
/// index quadruple. Working with doubled products keeps integer and rational
/// tables exact.
pub fn doubled_defect_exhaustive<W>(table: &[Vec<W>]) -> (W, Option<[usize; 4]>)
where
    W: Copy + PartialOrd + Add<Output = W> + Sub<Output = W> + Zero,
{
    let n = table.len();
    let mut best = W::zero();
    let mut arg = None;
    for p in 0..n {
        let dp = &table[p];
        for x in 0..n {
            for y in x..n {
                let xy = dp[x] + dp[y] - table[x][y];
                for z in 0..n {
                    let xz = dp[x] + dp[z] - table[x][z];
                    let yz = dp[y] + dp[z] - table[y][z];
                    let m = if xz < yz { xz } else { yz };
                    let defect = m - xy;
                    if defect > best {
                        best = defect;
                        arg = Some([x, y, z, p]);
                    }
                }
            }
        }
    }
    (best, arg)
}

/// Finite-horizon surrogate for "the sequence goes to infinity in the Gromov
/// sense": every pairwise Gromov product inside the last `window` terms
/// exceeds `threshold`.
pub fn goes_to_infinity(space: &SpaceHandle, seq: &[Point], p: &Point, window: usize, threshold: f64) -> Result<bool> {
    if window < 2 || seq.len() < window {
        return Err(Error::Argument(format!(
            "need a window of at least 2 inside the sequence (window {window}, length {})",
            seq.len()
        )));
    }
    let tail = &seq[seq.len() - window..];
    let mut min_product = f64::INFINITY;
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            min_product = min_product.min(gromov_product(space, &tail[i], &tail[j], p)?);
        }
    }
    Ok(min_product > threshold)
}

/// Outcome of the bounded-distance test for two rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptoticity {
    /// `t -> d(gamma(t), sigma(t))` stayed below a sup reached before the final window.
    Asymptotic { sup: f64 },
    /// The distance kept growing into the final window.
    Inconclusive { sup: f64 },
}

impl Asymptoticity {
    pub fn sup(&self) -> f64 {
        match self {
            Asymptoticity::Asymptotic { sup } | Asymptoticity::Inconclusive { sup } => *sup,
        }
    }
}

/// Samples `t -> d(ray1(t), ray2(t))` on `[0, horizon]` and decides whether it
/// looks bounded: the sup must be reached before `horizon - bound_window` and
/// not exceeded on the final window.
pub fn asymptotic(ray1: &GeodesicRay, ray2: &GeodesicRay, horizon: f64, bound_window: f64) -> Result<Asymptoticity> {
    if !(bound_window > 0.0 && horizon > bound_window) {
        return Err(Error::Argument("need horizon > bound_window > 0".into()));
    }
    let space = ray1.space();
    let step = (horizon / 4000.0).min(0.05);
    let cells = (horizon / step).ceil() as usize;
    let cut = horizon - bound_window;
    let (mut sup_before, mut sup_after) = (0.0f64, 0.0f64);
    for k in 0..=cells {
        let t = (k as f64 * step).min(horizon);
        let d = space.distance(&ray1.point_at(t)?, &ray2.point_at(t)?)?;
        if t < cut {
            sup_before = sup_before.max(d);
        } else {
            sup_after = sup_after.max(d);
        }
    }
    let sup = sup_before.max(sup_after);
    if sup_after <= sup_before + 1e-9 * (1.0 + sup_before) {
        Ok(Asymptoticity::Asymptotic { sup })
    } else {
        Ok(Asymptoticity::Inconclusive { sup })
    }
}

/// `inf_{s >= 0} d(x, ray(s))` with a minimizing `s`. With `d0 = d(x, ray(0))`
/// and `m = d(x, ray(d0))`, any minimizer satisfies `|s - d0| <= m` because
/// `s = d(ray(0), ray(s))`.
pub fn distance_to_ray(ray: &GeodesicRay, x: &Point) -> Result<Minimum> {
    let space = ray.space();
    let d0 = space.distance(x, &ray.origin())?;
    let mid = ray.length().map_or(d0, |l| d0.min(l));
    let m = space.distance(x, &ray.point_at(mid)?)?;
    let lo = (mid - m).max(0.0);
    let mut hi = mid + m;
    if let Some(l) = ray.length() {
        hi = hi.min(l);
    }
    if hi - lo < 1e-12 {
        return Ok(Minimum { x: mid, value: m });
    }
    let cfg = MinimizeConfig::default();
    minimize_bracketed(|s| space.distance(x, &ray.point_at(s)?), lo, hi, &cfg)
}

/// `inf_{s >= 0} d(gamma(t), sigma(s))` together with a minimizing `s`.
pub fn gap_with_argmin(ray1: &GeodesicRay, ray2: &GeodesicRay, t: f64) -> Result<Minimum> {
    if !(t >= 0.0) {
        return Err(Error::Argument("gap parameter must be nonnegative".into()));
    }
    distance_to_ray(ray2, &ray1.point_at(t)?)
}

pub fn strong_asymptoticity_gap(ray1: &GeodesicRay, ray2: &GeodesicRay, t: f64) -> Result<f64> {
    gap_with_argmin(ray1, ray2, t).map(|m| m.value)
}

/// Time shifts `(T, S)` with `d(gamma(t + T), sigma(t + S)) -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPair {
    pub t_shift: f64,
    pub s_shift: f64,
    /// `d(gamma(t + T), sigma(t + S))` measured at the horizon.
    pub terminal_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftOutcome {
    Strong(ShiftPair),
    /// The gap stalled above tolerance; `gap_floor` is its smallest observed value.
    NotStronglyAsymptotic { gap_floor: f64 },
    /// The gap was still shrinking, or the offsets `s_t - t` were not Cauchy.
    Inconclusive { gap_floor: f64, terminal_gap: f64, reason: &'static str },
}

/// Sampling plan for [`extract_shifts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSchedule {
    pub horizon: f64,
    /// Number of sample times in the tail `[horizon / 2, horizon]`.
    pub samples: usize,
    /// Final gap tolerance.
    pub tolerance: f64,
}

impl Default for ShiftSchedule {
    fn default() -> Self {
        ShiftSchedule { horizon: 20.0, samples: 41, tolerance: 1e-3 }
    }
}

/// Finds shifts following the Cauchy-offset construction: track the
/// minimizers `s_t` of the gap, the offsets `f(t) = s_t - t`, and split the
/// limit `c` of `f` into `(T, S) = (0, c)` when `c >= 0` and `(-c, 0)` otherwise.
pub fn extract_shifts(ray1: &GeodesicRay, ray2: &GeodesicRay, schedule: &ShiftSchedule) -> Result<ShiftOutcome> {
    let ShiftSchedule { horizon, samples, tolerance } = *schedule;
    if !(horizon > 0.0) || samples < 4 || !(tolerance > 0.0) {
        return Err(Error::Argument("shift schedule needs horizon > 0, samples >= 4, tolerance > 0".into()));
    }
    // past a ray's certified horizon the gap is rounding noise
    let horizon = horizon.min(ray1.horizon()).min(ray2.horizon());
    let start = horizon / 2.0;
    let mut gaps = Vec::with_capacity(samples);
    let mut offsets = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = start + (horizon - start) * k as f64 / (samples - 1) as f64;
        let m = gap_with_argmin(ray1, ray2, t)?;
        gaps.push(m.value);
        offsets.push(m.x - t);
    }
    let gap_floor = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let half = samples / 2;
    let early_floor = gaps[..half].iter().copied().fold(f64::INFINITY, f64::min);
    let late_floor = gaps[half..].iter().copied().fold(f64::INFINITY, f64::min);
    let final_gap = *gaps.last().unwrap();

    if final_gap > tolerance {
        if late_floor < 0.5 * early_floor {
            return Ok(ShiftOutcome::Inconclusive {
                gap_floor,
                terminal_gap: final_gap,
                reason: "gap still decreasing at the horizon",
            });
        }
        return Ok(ShiftOutcome::NotStronglyAsymptotic { gap_floor });
    }

    // Cauchy check on the last quarter: |f(t) - f(t')| <= gap(t) + gap(t')
    let quarter = samples - samples / 4;
    for i in quarter..samples {
        for j in i + 1..samples {
            let bound = gaps[i] + gaps[j] + tolerance;
            if (offsets[i] - offsets[j]).abs() > bound {
                return Ok(ShiftOutcome::Inconclusive {
                    gap_floor,
                    terminal_gap: final_gap,
                    reason: "offsets s_t - t are not Cauchy",
                });
            }
        }
    }
    let c = *offsets.last().unwrap();
    let (t_shift, s_shift) = if c >= 0.0 { (0.0, c) } else { (-c, 0.0) };
    let t_eval = (horizon - t_shift.max(s_shift)).max(0.0);
    let space = ray1.space();
    let terminal_gap = space.distance(&ray1.point_at(t_eval + t_shift)?, &ray2.point_at(t_eval + s_shift)?)?;
    if terminal_gap > tolerance {
        return Ok(ShiftOutcome::Inconclusive {
            gap_floor,
            terminal_gap,
            reason: "shifted rays not within tolerance at the horizon",
        });
    }
    Ok(ShiftOutcome::Strong(ShiftPair { t_shift, s_shift, terminal_gap }))
}

/// Result of checking the two-sided quasi-geodesic bounds on index pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiGeodesicCertificate {
    pub a: f64,
    pub b: f64,
    pub verified_pairs: usize,
    /// Largest amount by which a bound was exceeded, minus the numerical
    /// slack; nonpositive exactly when every checked pair satisfies both bounds.
    pub worst_violation: f64,
}

impl QuasiGeodesicCertificate {
    pub fn passed(&self) -> bool {
        self.worst_violation <= 0.0
    }
}

/// Floating-point slack granted to every quasi-geodesic inequality.
pub const QUASI_GEODESIC_SLACK: f64 = 1e-9;

fn check_pairs<F>(a: f64, b: f64, params: &[f64], mut dist: F) -> Result<QuasiGeodesicCertificate>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..params.len() {
        for j in i + 1..params.len() {
            let gap = (params[i] - params[j]).abs();
            let d = dist(i, j)?;
            let lower = gap / a - b - d;
            let upper = d - (a * gap + b);
            worst = worst.max(lower).max(upper);
            pairs += 1;
        }
    }
    Ok(QuasiGeodesicCertificate {
        a,
        b,
        verified_pairs: pairs,
        worst_violation: if pairs == 0 { -QUASI_GEODESIC_SLACK } else { worst - QUASI_GEODESIC_SLACK },
    })
}

/// Checks `|n-m|/A - B <= d(x_n, x_m) <= A |n-m| + B` over all index pairs.
pub fn is_quasigeodesic(space: &SpaceHandle, points: &[Point], a: f64, b: f64) -> Result<QuasiGeodesicCertificate> {
    if !(a >= 1.0) || !(b >= 0.0) {
        return Err(Error::Argument("need A >= 1 and B >= 0".into()));
    }
    if points.len() < 2 {
        return Err(Error::Argument("need at least two points".into()));
    }
    let params: Vec<f64> = (0..points.len()).map(|i| i as f64).collect();
    check_pairs(a, b, &params, |i, j| space.distance(&points[i], &points[j]))
}

/// Step curve `t -> x_floor(t)` through a discrete sequence.
#[derive(Debug, Clone)]
pub struct StepCurve {
    points: Vec<Point>,
}

pub fn interpolate_discrete(points: Vec<Point>) -> Result<StepCurve> {
    if points.is_empty() {
        return Err(Error::Argument("need at least one point".into()));
    }
    Ok(StepCurve { points })
}

impl StepCurve {
    /// Defined for `t >= 0`; constant after the last index.
    pub fn point_at(&self, t: f64) -> &Point {
        let k = if t > 0.0 { t.floor() as usize } else { 0 };
        &self.points[k.min(self.points.len() - 1)]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the continuous `(A, B)` bounds on the parameter grid
    /// `{k / per_unit : 0 <= k <= per_unit * (len - 1)}`.
    pub fn certify(&self, space: &SpaceHandle, a: f64, b: f64, per_unit: usize) -> Result<QuasiGeodesicCertificate> {
        if !(a >= 1.0) || !(b >= 0.0) || per_unit == 0 {
            return Err(Error::Argument("need A >= 1, B >= 0 and a positive resolution".into()));
        }
        let steps = per_unit * (self.points.len() - 1).max(1);
        let params: Vec<f64> = (0..=steps).map(|k| k as f64 / per_unit as f64).collect();
        let idx: Vec<usize> = params.iter().map(|t| (t.floor() as usize).min(self.points.len() - 1)).collect();
        check_pairs(a, b, &params, |i, j| space.distance(&self.points[idx[i]], &self.points[idx[j]]))
    }
}
