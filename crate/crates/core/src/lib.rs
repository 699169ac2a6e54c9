//! The projective evolute map on polygons in the real projective plane.
//!
//! Given a polygon, each edge gets a *projective normal* built purely from
//! joins and meets of the vertices; consecutive normals meet in the vertices
//! of a new polygon `T(P)`. The crate provides
//!
//! * exact and floating homogeneous geometry ([`projective`]),
//! * the geometric construction of `T` on k-gons ([`evolute`]),
//! * the closed form of `T` on pentagon moduli together with its invariant
//!   ([`pentagon`], [`dual`]),
//! * the unimodular lift / frieze derivation of the same map ([`frieze`]),
//! * the invariant cubic curves and the flow-time circle coordinate on which
//!   `T^2` acts as multiplication by `-4` ([`levelset`]),
//! * hexagon moduli and the circle map `f(t) = (2t-1)/(t^2-1)` governing
//!   axis-aligned hexagons ([`hexagon`]),
//! * batch identity checks shared by the CLI and the tests ([`verify`]),
//! * CSV tables and SVG plots ([`figures`]).

pub mod dual;
pub mod evolute;
pub mod figures;
pub mod frieze;
pub mod hexagon;
pub mod levelset;
pub mod pentagon;
pub mod projective;
pub mod scalar;
pub mod verify;

pub use projective::{HomTriple, Kind, ProjMap};
pub use scalar::{Exact, Field, Scalar};

use std::fmt;

/// Degeneracy loci of pentagon moduli space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Locus {
    XZero,
    YZero,
    XPlusOne,
    YPlusOne,
    XPlusYPlusOne,
    LineAtInfinity,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locus::XZero => "x=0",
            Locus::YZero => "y=0",
            Locus::XPlusOne => "x+1=0",
            Locus::YPlusOne => "y+1=0",
            Locus::XPlusYPlusOne => "x+y+1=0",
            Locus::LineAtInfinity => "line at infinity",
        })
    }
}

/// Denominator factors of the closed-form pentagon map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum MapFactor {
    /// `1 + x`
    OnePlusX,
    /// `-1 - y + xy`
    XyMinusOneMinusY,
    /// `1 + x - y^2`
    OnePlusXMinusYSquared,
    /// `1 + y - x^2`
    OnePlusYMinusXSquared,
}

impl fmt::Display for MapFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapFactor::OnePlusX => "1+x",
            MapFactor::XyMinusOneMinusY => "-1-y+xy",
            MapFactor::OnePlusXMinusYSquared => "1+x-y^2",
            MapFactor::OnePlusYMinusXSquared => "1+y-x^2",
        })
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cross product vanishes (inputs are the same projective element)")]
    ZeroResult,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("point lies on the line at infinity")]
    AtInfinity,
    #[error("degenerate image: {0}")]
    DegenerateImage(String),
    #[error("degenerate lift: a consecutive determinant vanishes")]
    DegenerateLift,
    #[error("cube root of {0} is not rational; use the root-free coefficient route")]
    InexactCubeRoot(String),
    #[error("lift is not unimodular")]
    NotUnimodular,
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate pentagon moduli: {}", join(.0))]
    DegenerateModuli(Vec<Locus>),
    #[error("map undefined: vanishing factors {}", join(.0))]
    MapUndefined(Vec<MapFactor>),
    #[error("level {0} is singular")]
    SingularLevel(f64),
    #[error("point lies on a coordinate axis")]
    OnAxis,
    #[error("point is not on the level curve (|Q| = {0:e})")]
    NotOnCurve(f64),
    #[error("points lie on different components")]
    WrongComponent,
    #[error("pole of f at the input")]
    PoleAtInput,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("operation needs irrational values and is unavailable in exact mode")]
    ExactUnsupported,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
