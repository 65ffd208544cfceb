//! Numeric policy shared by every backend and algorithm.
//!
//! Tolerances live in one record so that refinement studies can tighten or
//! relax them coherently. Spaces carry a copy; algorithm configs carry one.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Absolute tolerance for exact backends.
    pub abs_tol: f64,
    /// How far an arccos argument may leave [-1, 1] before it is treated as
    /// a logic error instead of rounding.
    pub arccos_slack: f64,
    /// Tolerance for coordinate constraints (unit norm, radius >= 0, ...).
    pub membership_tol: f64,
    /// Distances below this are considered unresolvable (pairs skipped,
    /// witnesses ignored).
    pub resolution: f64,
    /// Target accuracy of continuous interface refinement in glued spaces.
    pub refine_tol: f64,
    /// Margin kept from the geodesic uniqueness radius.
    pub uniqueness_margin: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            abs_tol: 1e-9,
            arccos_slack: 1e-8,
            membership_tol: 1e-9,
            resolution: 1e-12,
            refine_tol: 1e-11,
            uniqueness_margin: 1e-9,
        }
    }
}

impl NumericPolicy {
    /// Clamps an arccos argument, failing if it is out of range by more than
    /// `arccos_slack`.
    pub fn clamp_cos(&self, c: f64, what: &str) -> crate::Result<f64> {
        if !c.is_finite() || c > 1.0 + self.arccos_slack || c < -1.0 - self.arccos_slack {
            return Err(crate::GeomError::Consistency(format!(
                "{what}: arccos argument {c} outside [-1, 1]"
            )));
        }
        Ok(c.clamp(-1.0, 1.0))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        NumericPolicy {
            abs_tol: self.abs_tol * factor,
            arccos_slack: self.arccos_slack * factor,
            membership_tol: self.membership_tol * factor,
            resolution: self.resolution,
            refine_tol: self.refine_tol * factor,
            uniqueness_margin: self.uniqueness_margin,
        }
    }
}
