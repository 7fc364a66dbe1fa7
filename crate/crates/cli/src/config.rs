//! Run configuration and the JSON descriptors for spaces, maps, points and
//! boundary directions.

use std::collections::BTreeMap;
use std::path::PathBuf;

use horoscope::dynamics::{MapHandle, MapRule};
use horoscope::{BoundaryDirection, Complex, Point, SpaceHandle, SpaceKind};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Delta,
    Atlas,
    Rays,
    Dynamics,
    Julia,
    Suite,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Delta => "delta",
            Analysis::Atlas => "atlas",
            Analysis::Rays => "rays",
            Analysis::Dynamics => "dynamics",
            Analysis::Julia => "julia",
            Analysis::Suite => "suite",
        }
    }
}

/// Tolerances a run may override. Missing entries use the documented defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub busemann: Option<f64>,
    pub horofunction: Option<f64>,
    pub shift_gap: Option<f64>,
    pub julia_slack: Option<f64>,
    pub approach_tail: Option<f64>,
    pub atlas_fit: Option<f64>,
    pub king: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceDescriptor,
    #[serde(default)]
    pub map: Option<MapDescriptor>,
    pub analysis: Analysis,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Julia horoball radius, accepted at the top level as shorthand for `params.R`.
    #[serde(default, rename = "R", alias = "radius")]
    pub radius: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Json { line: e.line(), column: e.column(), message: e.to_string() })?;
        if let Some(r) = config.radius {
            if config.params.contains_key("R") || config.params.contains_key("radius") {
                return Err(CliError::Config("the radius is given both at the top level and in params".into()));
            }
            config.params.insert("R".into(), Value::from(r));
        }
        Ok(config)
    }
}

/// `"ladder"` or `{"kind": "ladder"}`; kinds with parameters need the object form.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SpaceDescriptor {
    Bare(String),
    Full(SpaceSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    PoincareDisc,
    RightHalfPlane,
    ComplexBall { dim: usize },
    /// `shape` is the row-major `dim x dim` positive definite matrix; omitted means the unit ball.
    KleinEllipsoid { dim: usize, shape: Option<Vec<f64>> },
    Ladder,
    /// Edges `[u, v, weight]`.
    FiniteGraph { edges: Vec<(usize, usize, f64)> },
}

impl SpaceDescriptor {
    pub fn build(&self) -> Result<SpaceHandle, CliError> {
        let spec = match self {
            SpaceDescriptor::Full(s) => s.clone(),
            SpaceDescriptor::Bare(name) => match name.as_str() {
                "poincare_disc" => SpaceSpec::PoincareDisc,
                "right_half_plane" => SpaceSpec::RightHalfPlane,
                "ladder" => SpaceSpec::Ladder,
                other => return Err(CliError::Config(format!("space {other:?} needs the object form or is unknown"))),
            },
        };
        Ok(match spec {
            SpaceSpec::PoincareDisc => SpaceHandle::poincare_disc(),
            SpaceSpec::RightHalfPlane => SpaceHandle::right_half_plane(),
            SpaceSpec::ComplexBall { dim } => SpaceHandle::complex_ball(dim)?,
            SpaceSpec::KleinEllipsoid { dim, shape } => {
                let shape = shape.unwrap_or_else(|| {
                    (0..dim * dim).map(|i| if i / dim == i % dim { 1.0 } else { 0.0 }).collect()
                });
                SpaceHandle::klein_ellipsoid(dim, shape)?
            }
            SpaceSpec::Ladder => SpaceHandle::ladder(),
            SpaceSpec::FiniteGraph { edges } => SpaceHandle::finite_graph(&edges)?,
        })
    }
}

/// `"identity"` or `{"rule": ...}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MapDescriptor {
    Bare(String),
    Full(MapSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// Either `attracting` and `repelling`, or `fixed_points: [attracting, repelling]`.
    MobiusDisc {
        attracting: Option<[f64; 2]>,
        repelling: Option<[f64; 2]>,
        fixed_points: Option<[[f64; 2]; 2]>,
        multiplier: f64,
    },
    RotationDisc { angle: f64 },
    MobiusBall { point: Vec<[f64; 2]>, phases: Vec<f64> },
    HalfPlaneAffine { k: f64, #[serde(default)] c: [f64; 2] },
    LadderF1,
    LadderF2,
    GraphTable { table: Vec<usize> },
    /// Applied first to last.
    Composite { rules: Vec<MapDescriptor> },
}

fn complex(c: [f64; 2]) -> Complex {
    Complex::new(c[0], c[1])
}

impl MapDescriptor {
    pub fn rule(&self) -> Result<MapRule, CliError> {
        let spec = match self {
            MapDescriptor::Full(s) => s.clone(),
            MapDescriptor::Bare(name) => match name.as_str() {
                "identity" => MapSpec::Identity,
                "ladder_f1" => MapSpec::LadderF1,
                "ladder_f2" => MapSpec::LadderF2,
                other => return Err(CliError::Config(format!("map {other:?} needs the object form or is unknown"))),
            },
        };
        Ok(match spec {
            MapSpec::Identity => MapRule::Identity,
            MapSpec::MobiusDisc { attracting, repelling, fixed_points, multiplier } => {
                let (a, r) = match (attracting, repelling, fixed_points) {
                    (Some(a), Some(r), None) => (a, r),
                    (None, None, Some([a, r])) => (a, r),
                    _ => {
                        return Err(CliError::Config(
                            "mobius_disc needs attracting and repelling, or fixed_points, but not both".into(),
                        ))
                    }
                };
                MapRule::MobiusDisc { attracting: complex(a), repelling: complex(r), multiplier }
            }
            MapSpec::RotationDisc { angle } => MapRule::RotationDisc { angle },
            MapSpec::MobiusBall { point, phases } => {
                MapRule::MobiusBall { point: point.into_iter().map(complex).collect(), phases }
            }
            MapSpec::HalfPlaneAffine { k, c } => MapRule::HalfPlaneAffine { k, c: complex(c) },
            MapSpec::LadderF1 => MapRule::LadderF1,
            MapSpec::LadderF2 => MapRule::LadderF2,
            MapSpec::GraphTable { table } => MapRule::GraphTable(table),
            MapSpec::Composite { rules } => MapRule::Composite(rules.iter().map(|r| r.rule()).collect::<Result<_, _>>()?),
        })
    }

    pub fn build(&self, space: &SpaceHandle) -> Result<MapHandle, CliError> {
        Ok(MapHandle::new(space, self.rule()?)?)
    }
}

pub fn rule_name(rule: &MapRule) -> &'static str {
    match rule {
        MapRule::Identity => "identity",
        MapRule::MobiusDisc { .. } => "mobius_disc",
        MapRule::RotationDisc { .. } => "rotation_disc",
        MapRule::MobiusBall { .. } => "mobius_ball",
        MapRule::HalfPlaneAffine { .. } => "half_plane_affine",
        MapRule::LadderF1 => "ladder_f1",
        MapRule::LadderF2 => "ladder_f2",
        MapRule::GraphTable(_) => "graph_table",
        MapRule::Composite(_) => "composite",
    }
}

fn bad(what: &str, v: &Value) -> CliError {
    CliError::Config(format!("cannot read {what} from {v}"))
}

fn pair(v: &Value) -> Option<[f64; 2]> {
    let a = v.as_array()?;
    match a.as_slice() {
        [x, y] => Some([x.as_f64()?, y.as_f64()?]),
        _ => None,
    }
}

fn reals(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(Value::as_f64).collect()
}

/// Disc and half-plane `[re, im]`, ball `[[re, im], ...]`, ellipsoid `[x, ...]`,
/// ladder `[a, b]`, graph vertex index.
pub fn parse_point(space: &SpaceHandle, v: &Value) -> Result<Point, CliError> {
    let p = match space.kind() {
        SpaceKind::PoincareDisc | SpaceKind::RightHalfPlane => pair(v).map(|c| Point::Complex(complex(c))),
        SpaceKind::ComplexBall { .. } => v
            .as_array()
            .and_then(|a| a.iter().map(|c| pair(c).map(complex)).collect::<Option<Vec<_>>>())
            .map(Point::ComplexVec),
        SpaceKind::KleinEllipsoid(_) => reals(v).map(Point::Real),
        SpaceKind::Ladder => pair(v).map(|[a, b]| Point::ladder(a, b)),
        SpaceKind::FiniteGraph(_) => v.as_u64().map(|n| Point::Vertex(n as usize)),
    }
    .ok_or_else(|| bad("a point", v))?;
    space.validate(&p)?;
    Ok(p)
}

/// Disc: angle or `[re, im]`; half-plane: `"infinity"` or the height `y` of `i y`;
/// ball: `[[re, im], ...]`; ellipsoid: direction vector; ladder: `"end"`,
/// `{"rail": 1}` or `{"height": 0.5}`.
pub fn parse_direction(space: &SpaceHandle, v: &Value) -> Result<BoundaryDirection, CliError> {
    let d = match space.kind() {
        SpaceKind::PoincareDisc => match v {
            Value::Number(n) => n.as_f64().map(|t| BoundaryDirection::Circle(Complex::from_polar(1.0, t))),
            _ => pair(v).map(|c| BoundaryDirection::Circle(complex(c))),
        },
        SpaceKind::RightHalfPlane => match v {
            Value::String(s) if s == "infinity" => Some(BoundaryDirection::HalfPlaneInfinity),
            _ => v.as_f64().map(BoundaryDirection::HalfPlaneAxis),
        },
        SpaceKind::ComplexBall { .. } => v
            .as_array()
            .and_then(|a| a.iter().map(|c| pair(c).map(complex)).collect::<Option<Vec<_>>>())
            .map(BoundaryDirection::Sphere),
        SpaceKind::KleinEllipsoid(_) => reals(v).map(BoundaryDirection::Ellipsoid),
        SpaceKind::Ladder => match v {
            Value::String(s) if s == "end" => Some(BoundaryDirection::LadderEnd),
            Value::Object(m) => match (m.get("rail"), m.get("height")) {
                (Some(r), None) => r.as_f64().map(BoundaryDirection::LadderRail),
                (None, Some(h)) => h.as_f64().map(BoundaryDirection::LadderHeight),
                _ => None,
            },
            _ => None,
        },
        SpaceKind::FiniteGraph(_) => {
            return Err(horoscope::Error::Capability { operation: "boundary directions", space: space.name() }.into())
        }
    }
    .ok_or_else(|| bad("a boundary direction", v))?;
    space.validate_direction(&d)?;
    Ok(d)
}

/// Typed access to the free-form `params` object.
pub struct Params<'a>(pub &'a BTreeMap<String, Value>);

impl Params<'_> {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().ok_or_else(|| bad(key, v)),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|n| n as usize).ok_or_else(|| bad(key, v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_and_tagged_spaces() {
        let c = RunConfig::parse(r#"{"space": "ladder", "analysis": "atlas", "seed": 7}"#).unwrap();
        assert_eq!(c.space.build().unwrap().name(), "ladder");
        let c = RunConfig::parse(r#"{"space": {"kind": "complex_ball", "dim": 2}, "analysis": "delta"}"#).unwrap();
        assert!(matches!(c.space.build().unwrap().kind(), SpaceKind::ComplexBall { dim: 2 }));
    }

    #[test]
    fn malformed_json_has_a_position() {
        match RunConfig::parse("{\n  \"space\": \"ladder\",\n  \"analysis\" \"delta\"\n}") {
            Err(CliError::Json { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn points_and_directions() {
        let disc = SpaceHandle::poincare_disc();
        assert_eq!(parse_point(&disc, &serde_json::json!([0.5, 0.0])).unwrap(), Point::complex(0.5, 0.0));
        assert!(parse_point(&disc, &serde_json::json!([1.5, 0.0])).is_err());
        let ladder = SpaceHandle::ladder();
        assert_eq!(parse_direction(&ladder, &serde_json::json!({"height": 0.5})).unwrap(), BoundaryDirection::LadderHeight(0.5));
        assert_eq!(parse_direction(&ladder, &serde_json::json!("end")).unwrap(), BoundaryDirection::LadderEnd);
    }

    #[test]
    fn composite_rule() {
        let m: MapDescriptor =
            serde_json::from_str(r#"{"rule": "composite", "rules": ["identity", {"rule": "rotation_disc", "angle": 1.0}]}"#).unwrap();
        assert_eq!(m.rule().unwrap(), MapRule::Composite(vec![MapRule::Identity, MapRule::RotationDisc { angle: 1.0 }]));
    }

    #[test]
    fn mobius_disc_fixed_point_forms_agree() {
        let named: MapDescriptor =
            serde_json::from_str(r#"{"rule": "mobius_disc", "attracting": [1, 0], "repelling": [-1, 0], "multiplier": 2}"#).unwrap();
        let paired: MapDescriptor =
            serde_json::from_str(r#"{"rule": "mobius_disc", "fixed_points": [[1, 0], [-1, 0]], "multiplier": 2}"#).unwrap();
        assert_eq!(named.rule().unwrap(), paired.rule().unwrap());
        let both: MapDescriptor = serde_json::from_str(
            r#"{"rule": "mobius_disc", "attracting": [1, 0], "fixed_points": [[1, 0], [-1, 0]], "multiplier": 2}"#,
        )
        .unwrap();
        assert!(both.rule().is_err());
    }
}
