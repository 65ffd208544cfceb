//! Space abstraction: points, tangent vectors, distances, geodesics, ball
//! projections and exponential/logarithm maps.

mod point;
mod space;

pub use point::{Coords, Piece, Point, SpaceId, TangentVector};
pub use space::{ball_projection_via_geodesic, BallProjector, Capabilities, Measured, Projection, Space, SpaceKind};
