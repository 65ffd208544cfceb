use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{GeomError, Result};
use crate::vecmath::Coord;

/// Identifier of the space owning a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceId(u64);

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

impl SpaceId {
    pub fn fresh() -> Self {
        SpaceId(NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed))
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Which piece of a glued space a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Piece {
    /// The original space.
    U,
    /// The spherical cone glued along the interface.
    J,
}

/// Backend-specific coordinate record.
#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    /// Real vector: sphere/Euclidean coordinates, interval parameter, or the
    /// empty vector of a one-point space.
    Vector(Coord),
    /// Euclidean cone point `(radius, base)`.
    Cone { radius: f64, base: Box<Point> },
    /// Spherical join point `ι(u, v, t)`.
    Join { u: Box<Point>, v: Box<Point>, t: f64 },
    /// Point of a product space.
    Pair(Box<Point>, Box<Point>),
    /// Point of a glued space.
    Glued { piece: Piece, inner: Box<Point> },
}

/// A point tagged with its owning space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    space: SpaceId,
    coords: Coords,
}

impl Point {
    pub(crate) fn new(space: SpaceId, coords: Coords) -> Self {
        Point { space, coords }
    }

    pub(crate) fn vector(space: SpaceId, v: Coord) -> Self {
        Point {
            space,
            coords: Coords::Vector(v),
        }
    }

    pub fn space_id(&self) -> SpaceId {
        self.space
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    /// Vector coordinates, if this is a vector-backed point.
    pub fn as_slice(&self) -> Option<&[f64]> {
        match &self.coords {
            Coords::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn expect_vector(&self) -> Result<&[f64]> {
        self.as_slice()
            .ok_or_else(|| GeomError::Domain("expected vector coordinates".into()))
    }

    pub(crate) fn check_space(&self, expected: SpaceId) -> Result<()> {
        if self.space != expected {
            return Err(GeomError::SpaceMismatch {
                expected,
                found: self.space,
            });
        }
        Ok(())
    }

    /// Flattened coordinates for tabular output.
    ///
    /// Cone points flatten to `radius, base...`; join points to `t, u..., v...`;
    /// pairs to `a..., b...`; glued points to `piece (0 = U, 1 = J), inner...`.
    pub fn flat_coords(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        out
    }

    fn flatten_into(&self, out: &mut Vec<f64>) {
        match &self.coords {
            Coords::Vector(v) => out.extend_from_slice(v),
            Coords::Cone { radius, base } => {
                out.push(*radius);
                base.flatten_into(out);
            }
            Coords::Join { u, v, t } => {
                out.push(*t);
                u.flatten_into(out);
                v.flatten_into(out);
            }
            Coords::Pair(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
            Coords::Glued { piece, inner } => {
                out.push(match piece {
                    Piece::U => 0.0,
                    Piece::J => 1.0,
                });
                inner.flatten_into(out);
            }
        }
    }
}

/// Element of the tangent cone at `base`: a unit direction scaled by a
/// nonnegative magnitude.
///
/// Directions are ambient vectors for vector-backed spaces (tangent to the
/// sphere, arbitrary in Euclidean space, `±1` on an interval).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: Point,
    pub direction: Coord,
    pub magnitude: f64,
}

impl TangentVector {
    pub fn zero(base: Point) -> Self {
        let n = base.as_slice().map(|v| v.len()).unwrap_or(0);
        TangentVector {
            base,
            direction: smallvec::smallvec![0.0; n],
            magnitude: 0.0,
        }
    }

    /// Builds a tangent vector from an unnormalised ambient vector.
    pub fn from_ambient(base: Point, v: &[f64]) -> Self {
        let m = crate::vecmath::norm(v);
        if m == 0.0 {
            return TangentVector::zero(base);
        }
        TangentVector {
            base,
            direction: v.iter().map(|x| x / m).collect(),
            magnitude: m,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        if factor >= 0.0 {
            TangentVector {
                base: self.base.clone(),
                direction: self.direction.clone(),
                magnitude: self.magnitude * factor,
            }
        } else {
            TangentVector {
                base: self.base.clone(),
                direction: self.direction.iter().map(|x| -x).collect(),
                magnitude: -self.magnitude * factor,
            }
        }
    }

    /// Ambient representative `magnitude * direction`.
    pub fn ambient(&self) -> Coord {
        self.direction.iter().map(|x| x * self.magnitude).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude == 0.0
    }
}
