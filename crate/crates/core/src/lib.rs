//! Computable metric geometry on exactly solvable model spaces.
//!
//! The crate covers Gromov products and four-point hyperbolicity, horofunctions
//! and Busemann functions, strong asymptoticity of geodesic rays, and the
//! dynamics of non-expanding self-maps (Denjoy–Wolff points, divergence rate,
//! dilations, Julia's lemma). Every model space comes with a closed-form
//! distance:
//!
//! * the Poincaré disc and the right half-plane,
//! * the complex unit ball with its (doubled) Kobayashi distance,
//! * ellipsoids with the Hilbert metric,
//! * the ladder, a hyperbolic graph-like space whose horofunction boundary is a
//!   segment while its Gromov boundary is a single point,
//! * finite weighted graphs.
//!
//! The geometric kernels in [`space`] are generic over the scalar type (see
//! [`scalar`]); the analysis layers work with `f64` through [`SpaceHandle`].

pub mod dynamics;
pub mod error;
pub mod geodesic;
pub mod horofunctions;
pub mod hyperbolicity;
pub mod numeric;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use geodesic::GeodesicRay;
pub use space::{BoundaryDirection, Point, SpaceHandle, SpaceKind};

/// Double-precision complex number used for disc, half-plane and ball points.
pub type Complex = num_complex::Complex64;
/// Ladder point with floating coordinates.
pub type LadderPoint = space::ladder::LadderPoint<f64>;
/// Ladder point with exact rational coordinates.
pub type ExactLadderPoint = space::ladder::LadderPoint<num_rational::Rational64>;
/// Hilbert-metric ellipsoid in double precision.
pub type Ellipsoid = space::klein::Ellipsoid<f64>;
/// Weighted graph with floating weights.
pub type WeightedGraph = space::graph::WeightedGraph<f64>;
/// Weighted graph with exact rational weights.
pub type ExactWeightedGraph = space::graph::WeightedGraph<num_rational::Rational64>;
