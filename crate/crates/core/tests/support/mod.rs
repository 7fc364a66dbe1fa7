//! Randomized invariants shared by the property tests and the acceptance suite.

#![allow(dead_code)]

use horoscope::dynamics::{iterate, MapHandle, MapRule};
use horoscope::horofunctions::busemann_along;
use horoscope::{BoundaryDirection, Complex, Point, SpaceHandle, SpaceKind};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CASES: u32 = 1000;
pub const TRIANGLE_SLACK: f64 = 1e-9;
pub const UNIT_SPEED_TOLERANCE: f64 = 1e-7;
pub const BUSEMANN_TOLERANCE: f64 = 1e-6;
pub const STEP_SLACK: f64 = 1e-9;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn cycle_graph(n: usize) -> SpaceHandle {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.5)).collect();
    SpaceHandle::finite_graph(&edges).unwrap()
}

/// Random connected graph: a random tree plus a few chords.
pub fn random_graph(n: usize, seed: u64) -> SpaceHandle {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v, rng.gen_range(0.5..3.0)));
    }
    for _ in 0..n / 2 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, rng.gen_range(0.5..3.0)));
        }
    }
    SpaceHandle::finite_graph(&edges).unwrap()
}

pub fn spaces() -> Vec<(&'static str, SpaceHandle)> {
    vec![
        ("disc", SpaceHandle::poincare_disc()),
        ("half_plane", SpaceHandle::right_half_plane()),
        ("ball2", SpaceHandle::complex_ball(2).unwrap()),
        ("klein", SpaceHandle::klein_ellipsoid(3, vec![1.0, 0.3, 0.0, 0.3, 2.0, 0.1, 0.0, 0.1, 0.5]).unwrap()),
        ("ladder", SpaceHandle::ladder()),
        ("graph", random_graph(24, 7)),
    ]
}

pub fn maps() -> Vec<(&'static str, MapHandle)> {
    let disc = SpaceHandle::poincare_disc();
    let ball = SpaceHandle::complex_ball(2).unwrap();
    let ladder = SpaceHandle::ladder();
    let hp = SpaceHandle::right_half_plane();
    let z = |t: f64| Complex::from_polar(1.0, t);
    vec![
        ("disc_rotation", MapHandle::new(&disc, MapRule::RotationDisc { angle: 0.7 }).unwrap()),
        (
            "disc_hyperbolic",
            MapHandle::new(&disc, MapRule::MobiusDisc { attracting: z(0.4), repelling: z(2.5), multiplier: 2.0 }).unwrap(),
        ),
        ("half_plane_parabolic", MapHandle::new(&hp, MapRule::HalfPlaneAffine { k: 1.0, c: Complex::new(0.0, 1.0) }).unwrap()),
        ("half_plane_affine", MapHandle::new(&hp, MapRule::HalfPlaneAffine { k: 1.5, c: Complex::new(0.3, -0.2) }).unwrap()),
        (
            "ball_mobius",
            MapHandle::new(
                &ball,
                MapRule::MobiusBall { point: vec![Complex::new(0.3, 0.1), Complex::new(0.0, -0.2)], phases: vec![0.4, -1.1] },
            )
            .unwrap(),
        ),
        ("ladder_f1", MapHandle::new(&ladder, MapRule::LadderF1).unwrap()),
        ("ladder_f2", MapHandle::new(&ladder, MapRule::LadderF2).unwrap()),
        ("graph_rotation", MapHandle::new(&cycle_graph(12), MapRule::GraphTable((0..12).map(|i| (i + 5) % 12).collect())).unwrap()),
    ]
}

pub fn extent(space: &SpaceHandle) -> f64 {
    match space.kind() {
        SpaceKind::Ladder => 20.0,
        _ => 0.95,
    }
}

fn points(space: &SpaceHandle, seed: u64, n: usize) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| space.sample_point(&mut rng, extent(space))).collect()
}

fn direction(space: &SpaceHandle, seed: u64) -> Option<BoundaryDirection> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1);
    Some(match space.kind() {
        SpaceKind::Ladder => {
            if rng.gen::<bool>() {
                BoundaryDirection::LadderRail(1.0)
            } else {
                BoundaryDirection::LadderRail(-1.0)
            }
        }
        SpaceKind::FiniteGraph(_) => return None,
        _ => horoscope::horofunctions::sample_directions(space, 1, seed).unwrap().remove(0),
    })
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn err<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub fn triangle(space: &SpaceHandle, cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&any::<u64>(), |seed| {
            let p = points(space, seed, 3);
            let (a, b, c) = (
                space.distance(&p[0], &p[2]).map_err(err)?,
                space.distance(&p[0], &p[1]).map_err(err)?,
                space.distance(&p[1], &p[2]).map_err(err)?,
            );
            check(a <= b + c + TRIANGLE_SLACK * (1.0 + a), || format!("{a} > {b} + {c} at {p:?}"))?;
            check(space.distance(&p[0], &p[0]).map_err(err)? == 0.0, || "d(x, x) != 0".into())
        })
        .map_err(|e| e.to_string())
}

pub fn unit_speed(space: &SpaceHandle, cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(any::<u64>(), 0.0..1.0f64, 0.0..1.0f64), |(seed, u, v)| {
            let Some(xi) = direction(space, seed) else { return Ok(()) };
            let p = points(space, seed, 1).remove(0);
            let ray = space.geodesic_ray_to(&p, &xi).map_err(err)?;
            let top = ray.horizon().min(10.0);
            let (s, t) = (u * top, v * top);
            let d = space.distance(&ray.point_at(s).map_err(err)?, &ray.point_at(t).map_err(err)?).map_err(err)?;
            check((d - (s - t).abs()).abs() <= UNIT_SPEED_TOLERANCE, || format!("d = {d} at s = {s}, t = {t}"))
        })
        .map_err(|e| e.to_string())
}

/// 1-Lipschitz, vanishing at the basepoint, and `h(x) >= -d(x, p) - residual`.
pub fn horofunction_bounds(space: &SpaceHandle, cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&any::<u64>(), |seed| {
            let Some(xi) = direction(space, seed) else { return Ok(()) };
            let pts = points(space, seed, 3);
            let p = pts[0].clone();
            let ray = space.geodesic_ray_to(&pts[2], &xi).map_err(err)?;
            let h = busemann_along(&ray, &p, vec![p.clone()], BUSEMANN_TOLERANCE).map_err(err)?;
            let hp = h.evaluate(&p).map_err(err)?;
            let hx = h.evaluate(&pts[1]).map_err(err)?;
            let hy = h.evaluate(&pts[2]).map_err(err)?;
            let slack = 2.0 * BUSEMANN_TOLERANCE + 1e-9;
            check(hp.abs() <= slack, || format!("h(p) = {hp}"))?;
            let dxy = space.distance(&pts[1], &pts[2]).map_err(err)?;
            check((hx - hy).abs() <= dxy + slack, || format!("|{hx} - {hy}| > {dxy}"))?;
            let dxp = space.distance(&pts[1], &p).map_err(err)?;
            check(hx >= -dxp - slack, || format!("h(x) = {hx} < -d(x, p) = {}", -dxp))
        })
        .map_err(|e| e.to_string())
}

/// `n -> d(x_n, x_{n+m})` is non-increasing and `s_{m+k} <= s_m + s_k` along the orbit.
pub fn step_monotone_subadditive(f: &MapHandle, cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&any::<u64>(), |seed| {
            let x = points(f.space(), seed, 1).remove(0);
            let orbit = iterate(f, &x, 24).map_err(err)?;
            for t in &orbit.steps {
                for w in t.values.windows(2) {
                    check(w[1] <= w[0] + STEP_SLACK * (1.0 + w[0]), || format!("{}-step rose {} -> {}", t.m, w[0], w[1]))?;
                }
            }
            let s = |m: usize, n: usize| orbit.step(m).and_then(|t| t.values.get(n).copied());
            for m in [1, 2, 4] {
                let mk = 2 * m;
                for n in 0.. {
                    let (Some(a), Some(b), Some(c)) = (s(mk, n), s(m, n), s(m, n + m)) else { break };
                    check(a <= b + c + STEP_SLACK * (1.0 + a), || format!("s_{mk} = {a} > s_{m} + s_{m} = {}", b + c))?;
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn non_expansion(f: &MapHandle, cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&any::<u64>(), |seed| {
            let p = points(f.space(), seed, 2);
            let d = f.space().distance(&p[0], &p[1]).map_err(err)?;
            let e = f
                .space()
                .distance(&f.apply(&p[0]).map_err(err)?, &f.apply(&p[1]).map_err(err)?)
                .map_err(err)?;
            check(e <= d + 1e-9, || format!("d(f x, f y) = {e} > {d}"))
        })
        .map_err(|e| e.to_string())
}

/// Every suite on every space or map, labelled.
pub fn all_suites(cases: u32) -> Vec<(String, Result<(), String>)> {
    let mut out = Vec::new();
    for (name, s) in spaces() {
        out.push((format!("triangle/{name}"), triangle(&s, cases)));
        if !matches!(s.kind(), SpaceKind::FiniteGraph(_)) {
            out.push((format!("unit_speed/{name}"), unit_speed(&s, cases)));
            out.push((format!("horofunction/{name}"), horofunction_bounds(&s, cases)));
        }
    }
    for (name, f) in maps() {
        out.push((format!("steps/{name}"), step_monotone_subadditive(&f, cases)));
        out.push((format!("non_expansion/{name}"), non_expansion(&f, cases)));
    }
    out
}
