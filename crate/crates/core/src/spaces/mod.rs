//! Closed-form model-space backends.

mod cone;
mod euclidean;
mod interval;
mod join;
mod one_point;
mod product;
mod sphere;

pub use cone::EuclideanConeSpace;
pub use euclidean::EuclideanSpace;
pub use interval::IntervalSpace;
pub use join::{spherical_cone, SphericalJoinSpace};
pub use one_point::OnePointSpace;
pub use product::ScaledProductSpace;
pub use sphere::SphereSpace;

/// Squared distance in a Euclidean cone between `(t1, ·)` and `(t2, ·)` whose
/// base points are at angle `theta` (already capped at π).
///
/// `(t1 - t2)² + 4·t1·t2·sin²(θ/2)` is the law of cosines written so that it
/// stays accurate for nearby points.
pub(crate) fn cone_law_sq(t1: f64, t2: f64, theta: f64) -> f64 {
    let h = (0.5 * theta).sin();
    (t1 - t2) * (t1 - t2) + 4.0 * t1 * t2 * h * h
}

/// Planar unfolding of a cone geodesic between `(t1, angle 0)` and
/// `(t2, angle theta)`; returns `(radius, angle)` of the point at parameter `s`.
pub(crate) fn sector_point(t1: f64, t2: f64, theta: f64, s: f64) -> (f64, f64) {
    let ax = t1;
    let (bx, by) = (t2 * theta.cos(), t2 * theta.sin());
    let px = (1.0 - s) * ax + s * bx;
    let py = s * by;
    (px.hypot(py), py.atan2(px))
}
