//! Tractrix flows, time-dependent gradient flows and short retractions on
//! explicit model CAT(κ) spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`metric`] defines points, tangent vectors and the [`Space`] trait every
//!   other module programs against.
//! * [`spaces`] holds the closed-form backends: spheres, Euclidean space,
//!   intervals, Euclidean cones, spherical joins and scaled products.
//! * [`glued`] glues a space to the spherical cone over a subset along that
//!   subset and evaluates the resulting metric through a sampled interface.
//! * [`flow`] implements gradient curves of time-dependent semiconcave
//!   families, the evolution-inequality checker and the distance estimates.
//! * [`tractrix`] implements the r-tractrix flow as a composition of ball
//!   projections and the sampled Lipschitz diagnostics.
//! * [`retract`] assembles the radial retraction, the glued-space retraction,
//!   the product-to-diagonal retraction and the cone retraction.

pub mod error;
pub mod flow;
pub mod glued;
pub mod metric;
pub mod policy;
pub mod retract;
pub mod sampling;
pub mod spaces;
pub mod tractrix;
mod vecmath;

pub use error::{GeomError, Result};
pub use metric::{Capabilities, Coords, Piece, Point, Space, SpaceId, SpaceKind, TangentVector};
pub use policy::NumericPolicy;
