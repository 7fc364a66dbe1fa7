//! The ladder: two rails `R_{>=0} x {-1, 1}` joined by rungs `{n} x (-1, 1)` at
//! every natural number, with the induced length metric.
//!
//! The ladder is a metric graph whose vertices are `(n, +-1)`, with rail edges
//! of length 1 and rungs of length 2. A point either shares a rail or a rung
//! with the other point, or every path leaves its own edge through one of the
//! edge's endpoints, so the distance is an exact minimum over at most four
//! anchor pairs. Far apart points (`|a1 - a2| > 1`) obey
//! `d = 2 + |a1 - a2| - |b1 + b2|`; closer pairs are handled by the same
//! anchor minimization.

use crate::scalar::LadderScalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderPoint<S> {
    pub a: S,
    pub b: S,
}

impl<S: LadderScalar> LadderPoint<S> {
    pub fn new(a: S, b: S) -> Self {
        Self { a, b }
    }

    /// On a rail (`b = +-1`, any `a >= 0`) or on a rung (`a` integral, `|b| < 1`).
    pub fn is_valid(&self) -> bool {
        let one = S::one();
        if self.a < S::zero() || self.b > one || self.b < -one {
            return false;
        }
        self.b == one || self.b == -one || self.a.is_integral()
    }

    /// Rail sign when the point lies on a rail.
    pub fn rail(&self) -> Option<S> {
        if self.b == S::one() || self.b == -S::one() {
            Some(self.b)
        } else {
            None
        }
    }
}

/// Ladder vertex `(n, sign)` with `n` stored in the coordinate type.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Vertex<S> {
    n: S,
    sign: S,
}

fn anchors<S: LadderScalar>(p: &LadderPoint<S>) -> Vec<(Vertex<S>, S)> {
    let one = S::one();
    match p.rail() {
        Some(sign) => {
            let n = p.a.floor_value();
            if n == p.a {
                vec![(Vertex { n, sign }, S::zero())]
            } else {
                vec![
                    (Vertex { n, sign }, p.a - n),
                    (Vertex { n: n + one, sign }, n + one - p.a),
                ]
            }
        }
        None => vec![
            (Vertex { n: p.a, sign: one }, one - p.b),
            (Vertex { n: p.a, sign: -one }, one + p.b),
        ],
    }
}

fn vertex_distance<S: LadderScalar>(u: &Vertex<S>, v: &Vertex<S>) -> S {
    let rail = (u.n - v.n).abs();
    if u.sign == v.sign {
        rail
    } else {
        rail + S::one() + S::one()
    }
}

fn direct<S: LadderScalar>(x: &LadderPoint<S>, y: &LadderPoint<S>) -> Option<S> {
    if let (Some(s1), Some(s2)) = (x.rail(), y.rail()) {
        if s1 == s2 {
            return Some((x.a - y.a).abs());
        }
    }
    if x.a == y.a && x.a.is_integral() {
        return Some((x.b - y.b).abs());
    }
    None
}

/// Exact ladder distance. Both points must be valid.
pub fn distance<S: LadderScalar>(x: &LadderPoint<S>, y: &LadderPoint<S>) -> S {
    if let Some(d) = direct(x, y) {
        return d;
    }
    let mut best: Option<S> = None;
    for (u, cu) in anchors(x) {
        for (v, cv) in anchors(y) {
            let total = cu + vertex_distance(&u, &v) + cv;
            best = Some(match best {
                Some(b) => b.min_of(total),
                None => total,
            });
        }
    }
    best.expect("every ladder point has an anchor")
}

/// Waypoints of a shortest path from `x` to `y`. Consecutive waypoints differ
/// in one coordinate only, so the polyline's Euclidean length equals the
/// ladder distance.
pub fn shortest_path<S: LadderScalar>(x: &LadderPoint<S>, y: &LadderPoint<S>) -> Vec<LadderPoint<S>> {
    if direct(x, y).is_some() {
        return vec![*x, *y];
    }
    let mut best: Option<(S, Vertex<S>, Vertex<S>)> = None;
    for (u, cu) in anchors(x) {
        for (v, cv) in anchors(y) {
            let total = cu + vertex_distance(&u, &v) + cv;
            if best.as_ref().map_or(true, |(b, _, _)| total < *b) {
                best = Some((total, u, v));
            }
        }
    }
    let (_, u, v) = best.expect("every ladder point has an anchor");
    let mut path = vec![*x, LadderPoint::new(u.n, u.sign)];
    if u.sign != v.sign {
        path.push(LadderPoint::new(u.n, v.sign));
    }
    path.push(LadderPoint::new(v.n, v.sign));
    path.push(*y);
    path.dedup();
    path
}

/// First waypoint of the geodesic ray from `p` that runs to infinity along
/// the rail `sign`; the ray continues as `(a + t, sign)` afterwards.
pub fn ray_entry<S: LadderScalar>(p: &LadderPoint<S>, sign: S) -> Vec<LadderPoint<S>> {
    match p.rail() {
        Some(s) if s == sign => vec![*p],
        Some(_) => {
            let n = p.a.floor_value();
            let up = if n == p.a { n } else { n + S::one() };
            let mut path = vec![*p, LadderPoint::new(up, p.b), LadderPoint::new(up, sign)];
            path.dedup();
            path
        }
        None => vec![*p, LadderPoint::new(p.a, sign)],
    }
}

/// Limit of `d(x, w_n) - d(w_n, (0, 0))` along `w_n = (n, height)`:
/// `-a + |height| - |b + height|`. The heights `+-1` are the two Busemann points.
pub fn horofunction<S: LadderScalar>(height: S, x: &LadderPoint<S>) -> S {
    -x.a + height.abs() - (x.b + height).abs()
}
