use std::fmt::Write as _;

use crate::error::{GeomError, Result};
use crate::metric::{Point, Space, SpaceId};

/// Time-sampled curve produced by a flow engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub space: SpaceId,
    /// Largest partition gap.
    pub step: f64,
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    /// Time at which the curve left the domain, if it did.
    pub escape: Option<f64>,
    /// Why the run stopped early, if it did for another reason.
    pub diagnostic: Option<String>,
}

impl Trajectory {
    pub fn new(space: SpaceId, step: f64) -> Self {
        Trajectory {
            space,
            step,
            times: Vec::new(),
            points: Vec::new(),
            escape: None,
            diagnostic: None,
        }
    }

    pub fn push(&mut self, t: f64, p: Point) {
        self.times.push(t);
        self.points.push(p);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&Point> {
        self.points.last()
    }

    /// True when the run reached the end of its interval.
    pub fn is_complete(&self) -> bool {
        self.escape.is_none() && self.diagnostic.is_none()
    }

    /// Point at the sample time equal to `t` (to 1e-12).
    pub fn at_time(&self, t: f64) -> Option<&Point> {
        let i = self.times.iter().position(|&s| (s - t).abs() <= 1e-12)?;
        Some(&self.points[i])
    }

    /// Largest `d(p_i, p_{i+1}) - L·(t_{i+1} - t_i)`.
    pub fn speed_excess(&self, space: &dyn Space, lipschitz: f64) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for i in 1..self.len() {
            let d = space.distance(&self.points[i - 1], &self.points[i])?;
            worst = worst.max(d - lipschitz * (self.times[i] - self.times[i - 1]));
        }
        Ok(worst)
    }

    /// Sup over common sample times of the distance to `other`.
    pub fn sup_distance(&self, other: &Trajectory, space: &dyn Space) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut matched = 0;
        for (t, p) in self.times.iter().zip(&self.points) {
            if let Some(q) = other.at_time(*t) {
                worst = worst.max(space.distance(p, q)?);
                matched += 1;
            }
        }
        if matched == 0 {
            return Err(GeomError::Configuration("trajectories share no sample times".into()));
        }
        Ok(worst)
    }

    /// CSV with header `t,x0,x1,...`; coordinates are the flattened point
    /// coordinates.
    pub fn to_csv(&self) -> String {
        let width = self.points.first().map_or(0, |p| p.flat_coords().len());
        let mut out = String::from("t");
        for i in 0..width {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, p) in self.times.iter().zip(&self.points) {
            let _ = write!(out, "{t}");
            for c in p.flat_coords() {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}
