//! Acceptance criteria, one line per criterion. Tolerances and runtime limits
//! are pinned below; a criterion fails if it misses either.

mod support;

use std::time::{Duration, Instant};

use horoscope::dynamics::{
    divergence_rate, dilation, julia_check, minimal_displacement, JuliaConfig, MapHandle, MapRule,
};
use horoscope::horofunctions::{atlas_for_directions, ApproachConfig};
use horoscope::hyperbolicity::{doubled_defect_exhaustive, extract_shifts, ShiftOutcome, ShiftSchedule};
use horoscope::{BoundaryDirection, Complex, ExactWeightedGraph, LadderPoint, Point, SpaceHandle};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const ATLAS_TOLERANCE: f64 = 1e-6;
const RAILS_GAP: f64 = 2.0;
const RAILS_GAP_TOLERANCE: f64 = 0.01;
const LADDER_TOLERANCE: f64 = 1e-6;
const TERMINAL_GAP: f64 = 1e-3;
const RATE_DILATION_TOLERANCE: f64 = 1e-3;
const JULIA_SAMPLES: usize = 10_000;
const JULIA_SLACK: f64 = 1e-6;
const PARABOLIC_BOUND: f64 = 1e-2;
const MULTIPLIERS: [f64; 5] = [1.5, 2.0, 3.0, 5.0, 10.0];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Debug>(err: E) -> String {
    format!("{err:?}")
}

fn criterion_1_ladder_atlas() -> Outcome {
    let s = SpaceHandle::ladder();
    let p = Point::ladder(0.0, 0.0);
    let heights = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut grid = Vec::new();
    for a in 0..=8 {
        for b in heights {
            grid.push(Point::ladder(a as f64, b));
        }
    }
    let dirs: Vec<_> = heights.iter().map(|h| BoundaryDirection::LadderHeight(*h)).collect();
    let atlas = atlas_for_directions(&s, &p, grid.clone(), &dirs, 1e-9).map_err(e)?;
    ensure(atlas.clusters.len() == 5, || format!("{} clusters, expected 5", atlas.clusters.len()))?;
    let mut matched = Vec::new();
    let mut worst = 0.0f64;
    for c in &atlas.clusters {
        // closed form -a + |h| - |b - h| for some target height h
        let fit = heights
            .iter()
            .map(|hat| {
                let err = grid
                    .iter()
                    .zip(c.representative.values())
                    .map(|(x, v)| {
                        let LadderPoint { a, b } = x.as_ladder().unwrap();
                        (-a + hat.abs() - (b - hat).abs() - v).abs()
                    })
                    .fold(0.0, f64::max);
                (*hat, err)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(fit.1);
        matched.push(fit.0);
    }
    ensure(worst <= ATLAS_TOLERANCE, || format!("worst grid misfit {worst:e}"))?;
    matched.sort_by(f64::total_cmp);
    matched.dedup();
    ensure(matched.len() == 5, || format!("clusters matched only heights {matched:?}"))?;
    Ok(format!("5 clusters, worst misfit {worst:.1e}"))
}

fn criterion_2_rails() -> Outcome {
    let s = SpaceHandle::ladder();
    let top = s.geodesic_ray_to(&Point::ladder(0.0, 1.0), &BoundaryDirection::LadderRail(1.0)).map_err(e)?;
    let bottom = s.geodesic_ray_to(&Point::ladder(0.0, -1.0), &BoundaryDirection::LadderRail(-1.0)).map_err(e)?;
    match extract_shifts(&top, &bottom, &ShiftSchedule::default()).map_err(e)? {
        ShiftOutcome::NotStronglyAsymptotic { gap_floor } => {
            ensure((gap_floor - RAILS_GAP).abs() <= RAILS_GAP_TOLERANCE, || format!("gap floor {gap_floor}"))?;
            Ok(format!("not strongly asymptotic, gap floor {gap_floor}"))
        }
        other => Err(format!("unexpected outcome {other:?}")),
    }
}

fn criterion_3_ladder_dynamics() -> Outcome {
    let s = SpaceHandle::ladder();
    let f1 = MapHandle::new(&s, MapRule::LadderF1).map_err(e)?;
    let f2 = MapHandle::new(&s, MapRule::LadderF2).map_err(e)?;
    let c1 = divergence_rate(&f1, &Point::ladder(0.0, 0.0), 1000).map_err(e)?.estimate;
    ensure((c1 - 1.0).abs() <= LADDER_TOLERANCE, || format!("c(f1) = {c1}"))?;
    let cfg = ApproachConfig::default();
    let top = dilation(&f1, &BoundaryDirection::LadderEnd, &Point::ladder(0.0, 1.0), &cfg).map_err(e)?.value;
    let bottom = dilation(&f1, &BoundaryDirection::LadderEnd, &Point::ladder(0.0, -1.0), &cfg).map_err(e)?.value;
    ensure((top + 1.0).abs() <= LADDER_TOLERANCE, || format!("log lambda at (0,1) = {top}"))?;
    ensure((bottom + 3.0).abs() <= LADDER_TOLERANCE, || format!("log lambda at (0,-1) = {bottom}"))?;
    let c2 = divergence_rate(&f2, &Point::ladder(0.0, 1.0), 1000).map_err(e)?.estimate;
    ensure((c2 - 1.0).abs() <= LADDER_TOLERANCE, || format!("c(f2) = {c2}"))?;
    // resolution 0.05 on rails and rungs over [0, 10]
    let mut grid = Vec::new();
    for k in 0..=200 {
        let a = k as f64 * 0.05;
        grid.push(Point::ladder(a, 1.0));
        grid.push(Point::ladder(a, -1.0));
    }
    for n in 0..=10 {
        for k in 1..40 {
            grid.push(Point::ladder(n as f64, -1.0 + k as f64 * 0.05));
        }
    }
    let tau = minimal_displacement(&f2, &grid).map_err(e)?.upper_bound;
    ensure((2.95..=3.0 + 1e-12).contains(&tau), || format!("tau(f2) = {tau}"))?;
    Ok(format!("c(f1) = {c1}, log lambda = {top} / {bottom}, c(f2) = {c2}, tau(f2) = {tau:.6}"))
}

fn criterion_4_approaching_geodesics() -> Outcome {
    let schedule = ShiftSchedule { horizon: 20.0, ..ShiftSchedule::default() };
    let mut worst = 0.0f64;
    let spaces = [("ball2", SpaceHandle::complex_ball(2).map_err(e)?), ("disc", SpaceHandle::poincare_disc())];
    for (name, s) in &spaces {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for pair in 0..20 {
            let xi = horoscope::horofunctions::sample_directions(s, 1, rng.gen()).map_err(e)?.remove(0);
            let p = s.sample_point(&mut rng, 0.8);
            let q = s.sample_point(&mut rng, 0.8);
            let g = s.geodesic_ray_to(&p, &xi).map_err(e)?;
            let h = s.geodesic_ray_to(&q, &xi).map_err(e)?;
            match extract_shifts(&g, &h, &schedule).map_err(e)? {
                ShiftOutcome::Strong(sp) => {
                    ensure(sp.terminal_gap < TERMINAL_GAP, || format!("{name} pair {pair}: gap {}", sp.terminal_gap))?;
                    worst = worst.max(sp.terminal_gap);
                }
                other => return Err(format!("{name} pair {pair}: {other:?}")),
            }
        }
    }
    Ok(format!("40 pairs strongly asymptotic, worst terminal gap {worst:.1e}"))
}

fn disc_automorphism(k: f64, i: usize) -> Result<MapHandle, String> {
    let theta = 0.9 * i as f64 + 0.2;
    let attracting = Complex::from_polar(1.0, theta);
    let repelling = Complex::from_polar(1.0, theta + 2.0 + 0.3 * i as f64);
    MapHandle::new(&SpaceHandle::poincare_disc(), MapRule::MobiusDisc { attracting, repelling, multiplier: k }).map_err(e)
}

fn attracting(f: &MapHandle) -> BoundaryDirection {
    match f.rule() {
        MapRule::MobiusDisc { attracting, .. } => BoundaryDirection::Circle(*attracting),
        _ => unreachable!(),
    }
}

fn criterion_5_dilation_matches_rate() -> Outcome {
    let mut worst = 0.0f64;
    for (i, k) in MULTIPLIERS.into_iter().enumerate() {
        let f = disc_automorphism(k, i)?;
        let x = f.axis_point().ok_or("no axis point")?;
        let c = divergence_rate(&f, &x, 64).map_err(e)?.estimate;
        let lambda = dilation(&f, &attracting(&f), &x, &ApproachConfig::default()).map_err(e)?.value;
        ensure((c + lambda).abs() < RATE_DILATION_TOLERANCE, || format!("k = {k}: c = {c}, log lambda = {lambda}"))?;
        // the half-plane conjugate w -> k w
        let g = MapHandle::new(&SpaceHandle::right_half_plane(), MapRule::HalfPlaneAffine { k, c: Complex::new(0.0, 0.0) })
            .map_err(e)?;
        let c_half = divergence_rate(&g, &Point::complex(1.0, 0.0), 64).map_err(e)?.estimate;
        ensure((c - c_half).abs() < RATE_DILATION_TOLERANCE && (c_half - k.ln()).abs() < RATE_DILATION_TOLERANCE, || {
            format!("k = {k}: disc c = {c}, half-plane c = {c_half}")
        })?;
        worst = worst.max((c + lambda).abs());
    }
    Ok(format!("5 multipliers, worst |c + log lambda| = {worst:.1e}"))
}

fn julia_case(f: &MapHandle, eta: &BoundaryDirection, p: &Point, radius: f64, extent: f64) -> Result<f64, String> {
    let cfg = JuliaConfig { samples: JULIA_SAMPLES, slack: JULIA_SLACK, seed: 6, extent, ..JuliaConfig::default() };
    let r = julia_check(f, eta, p, radius, &cfg).map_err(e)?;
    ensure(r.passed && r.samples == JULIA_SAMPLES, || {
        format!("{:?} R = {radius}: {} violations, worst margin {:e}", f.rule(), r.violations, r.worst_margin)
    })?;
    Ok(r.worst_margin)
}

fn criterion_6_julia() -> Outcome {
    let disc = SpaceHandle::poincare_disc();
    let origin = Point::complex(0.0, 0.0);
    let mut runs = 0;
    let mut worst = f64::INFINITY;
    let id = MapHandle::new(&disc, MapRule::Identity).map_err(e)?;
    worst = worst.min(julia_case(&id, &BoundaryDirection::Circle(Complex::new(1.0, 0.0)), &origin, 1.0, 0.999)?);
    runs += 1;
    for (i, k) in MULTIPLIERS.into_iter().enumerate() {
        let f = disc_automorphism(k, i)?;
        for radius in [0.5, 1.0, 2.0] {
            worst = worst.min(julia_case(&f, &attracting(&f), &origin, radius, 0.999)?);
            runs += 1;
        }
    }
    let f1 = MapHandle::new(&SpaceHandle::ladder(), MapRule::LadderF1).map_err(e)?;
    worst = worst.min(julia_case(&f1, &BoundaryDirection::LadderEnd, &Point::ladder(0.0, 1.0), 1.0, 20.0)?);
    runs += 1;
    Ok(format!("{runs} runs x {JULIA_SAMPLES} samples, no violations, worst margin {worst:.1e}"))
}

fn criterion_7_parabolic() -> Outcome {
    let f = MapHandle::new(&SpaceHandle::right_half_plane(), MapRule::HalfPlaneAffine { k: 1.0, c: Complex::new(1.0, 0.0) })
        .map_err(e)?;
    let r = divergence_rate(&f, &Point::complex(1.0, 0.0), 10_000).map_err(e)?;
    ensure(r.estimate <= PARABOLIC_BOUND, || format!("c estimate {}", r.estimate))?;
    Ok(format!("c estimate {:.3e} over {} steps", r.estimate, r.resolved_steps))
}

fn criterion_8_properties() -> Outcome {
    let results = support::all_suites(support::CASES);
    let failed: Vec<_> = results.iter().filter(|(_, r)| r.is_err()).collect();
    ensure(failed.is_empty(), || format!("{failed:?}"))?;
    Ok(format!("{} suites x {} cases", results.len(), support::CASES))
}

fn criterion_9_tree_delta() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 50;
    let edges: Vec<_> = (1..n)
        .map(|v| (rng.gen_range(0..v), v, Rational64::new(rng.gen_range(1..40), rng.gen_range(1..8))))
        .collect();
    let tree = ExactWeightedGraph::new(&edges, n).map_err(e)?;
    let table: Vec<Vec<Rational64>> =
        (0..n).map(|u| (0..n).map(|v| tree.distance(u, v).unwrap()).collect()).collect();
    let (defect, _) = doubled_defect_exhaustive(&table);
    ensure(defect == Rational64::from_integer(0), || format!("defect {defect}"))?;
    Ok("exhaustive four-point defect is exactly 0".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("1 ladder horoboundary atlas", criterion_1_ladder_atlas, 5),
        ("2 ladder rails not strongly asymptotic", criterion_2_rails, 5),
        ("3 ladder dynamics values", criterion_3_ladder_dynamics, 10),
        ("4 approaching geodesics in ball and disc", criterion_4_approaching_geodesics, 30),
        ("5 c(f) = -log lambda for hyperbolic automorphisms", criterion_5_dilation_matches_rate, 30),
        ("6 Julia inclusion", criterion_6_julia, 60),
        ("7 parabolic divergence rate", criterion_7_parabolic, 5),
        ("8 property suites", criterion_8_properties, 60),
        ("9 tree four-point defect", criterion_9_tree_delta, 5),
    ];
    let mut failures = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => Err(format!("{msg}; took {elapsed:.2?} > {limit} s")),
            other => other,
        };
        match &outcome {
            Ok(msg) => println!("PASS criterion {name} ({elapsed:.2?}): {msg}"),
            Err(msg) => {
                println!("FAIL criterion {name} ({elapsed:.2?}): {msg}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
