//! A space glued from a piece `U` and the spherical cone `J = K ⋆ {s}` along
//! a subset `K`.
//!
//! `K` is known through an [`Interface`]: an intrinsic model, an embedding
//! into `U` and a deterministic gate sampling. Both pieces are convex in the
//! glued space, so points of one piece are compared intrinsically and a
//! geodesic between the pieces crosses `K` once at a point minimising
//! `d_U(x, k) + d_J(k, y)`. The minimum is bracketed on the gates and then
//! refined continuously when the interface allows it.

mod interface;
mod net;
mod theorem1;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

pub use interface::{ArcInterface, DiagonalInterface, Interface, SampledInterface, SubsetSpace};
pub use net::EpsilonNet;
pub use theorem1::{build_theorem1_space, Theorem1Space};

use crate::error::{GeomError, Result};
use crate::metric::{
    BallProjector, Capabilities, Coords, Measured, Piece, Point, Projection, Space, SpaceId,
    SpaceKind,
};
use crate::policy::NumericPolicy;
use crate::spaces::{spherical_cone, SphericalJoinSpace};

/// A sample of `K` with its copies in both pieces.
#[derive(Debug, Clone)]
pub struct Gate {
    pub k: Point,
    pub in_u: Point,
    pub in_j: Point,
}

/// How many times a path may pass through `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingPolicy {
    pub max_crossings: usize,
    /// Tighten gate-to-gate distances through both pieces to a fixed point
    /// and allow chains of crossings.
    pub relaxation: bool,
}

impl Default for CrossingPolicy {
    fn default() -> Self {
        CrossingPolicy {
            max_crossings: 1,
            relaxation: false,
        }
    }
}

/// Best single crossing between a point of `U` and a point of `J`.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub value: f64,
    pub k: Point,
    pub k_u: Point,
    pub k_j: Point,
    pub leg_u: f64,
    pub leg_j: f64,
    /// Gate the minimiser was found from.
    pub gate: usize,
    /// Distance in `K` to a competing minimiser, when one exists.
    pub ambiguity: Option<f64>,
}

const MAX_SEEDS: usize = 4;

pub struct GluedSpace {
    id: SpaceId,
    u: Arc<dyn Space>,
    j: Arc<SphericalJoinSpace>,
    interface: Arc<dyn Interface>,
    gates: Vec<Gate>,
    mesh: f64,
    cover: f64,
    crossing: CrossingPolicy,
    closure: Option<Vec<f64>>,
    refine: bool,
    policy: NumericPolicy,
}

impl fmt::Debug for GluedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GluedSpace")
            .field("id", &self.id)
            .field("interface", &self.interface.describe())
            .field("gates", &self.gates.len())
            .field("mesh", &self.mesh)
            .field("crossing", &self.crossing)
            .field("refine", &self.refine)
            .finish()
    }
}

impl GluedSpace {
    pub fn new(u: Arc<dyn Space>, interface: Arc<dyn Interface>, mesh: f64) -> Result<Self> {
        let j = Arc::new(spherical_cone(interface.k_space())?);
        let samples = interface.samples(mesh)?;
        if samples.is_empty() {
            return Err(GeomError::Configuration("interface produced no gates".into()));
        }
        let mut gates = Vec::with_capacity(samples.len());
        for k in samples {
            let in_u = interface.embed(&k)?;
            u.validate(&in_u)?;
            let in_j = j.cone_point(k.clone(), FRAC_PI_2)?;
            gates.push(Gate { k, in_u, in_j });
        }
        let cover = interface.covering_radius(mesh);
        let policy = *u.policy();
        Ok(GluedSpace {
            id: SpaceId::fresh(),
            u,
            j,
            interface,
            gates,
            mesh,
            cover,
            crossing: CrossingPolicy::default(),
            closure: None,
            refine: true,
            policy,
        })
    }

    pub fn with_crossing(mut self, crossing: CrossingPolicy) -> Result<Self> {
        if crossing.max_crossings == 0 {
            return Err(GeomError::Configuration("max_crossings must be at least 1".into()));
        }
        self.closure = if crossing.relaxation {
            Some(self.relaxed_gate_distances()?)
        } else {
            None
        };
        self.crossing = crossing;
        Ok(self)
    }

    /// Continuous refinement of the crossing point (on by default).
    pub fn with_refinement(mut self, on: bool) -> Self {
        self.refine = on;
        self
    }

    pub fn u(&self) -> &Arc<dyn Space> {
        &self.u
    }

    pub fn j(&self) -> &Arc<SphericalJoinSpace> {
        &self.j
    }

    pub fn interface(&self) -> &Arc<dyn Interface> {
        &self.interface
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn crossing_policy(&self) -> CrossingPolicy {
        self.crossing
    }

    /// Bound on the error of cross-piece distances due to gate sampling.
    pub fn gate_error_bound(&self) -> f64 {
        2.0 * self.cover
    }

    pub fn in_u(&self, p: Point) -> Result<Point> {
        self.u.validate(&p)?;
        Ok(self.wrap(Piece::U, p))
    }

    pub fn in_j(&self, p: Point) -> Result<Point> {
        self.j.validate(&p)?;
        Ok(self.wrap(Piece::J, p))
    }

    /// Tip `s` of the cone piece.
    pub fn tip(&self) -> Result<Point> {
        let t = self.j.tip(self.gates[0].k.clone())?;
        Ok(self.wrap(Piece::J, t))
    }

    /// Point of the cone piece at distance `t` from the tip above `k ∈ K`.
    pub fn cone_point(&self, k: Point, t: f64) -> Result<Point> {
        let p = self.j.cone_point(k, t)?;
        Ok(self.wrap(Piece::J, p))
    }

    pub fn unwrap<'p>(&self, p: &'p Point) -> Result<(Piece, &'p Point)> {
        p.check_space(self.id)?;
        match p.coords() {
            Coords::Glued { piece, inner } => Ok((*piece, inner)),
            _ => Err(GeomError::Domain("expected glued coordinates".into())),
        }
    }

    /// Nearest `K` point and the distance to it (zero for points of `K`).
    ///
    /// A cone point `(u, t)` is sent to `u` at distance `π/2 - t`; a point of
    /// `U` to its nearest interface point.
    pub fn to_interface(&self, p: &Point) -> Result<(Point, f64)> {
        match self.unwrap(p)? {
            (Piece::J, inner) => {
                let (u, _, t) = self.j.parts(inner)?;
                Ok((u.clone(), FRAC_PI_2 - t))
            }
            (Piece::U, inner) => {
                let k = self.interface.nearest(inner)?;
                let d = self.u.distance(inner, &self.interface.embed(&k)?)?;
                Ok((k, d))
            }
        }
    }

    /// Largest deviation `|d_U(k_i, k_j) - d_J(k_i, k_j)|` over gate pairs.
    pub fn gate_isometry_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, a) in self.gates.iter().enumerate() {
            for b in &self.gates[i + 1..] {
                let du = self.u.distance(&a.in_u, &b.in_u)?;
                let dj = self.j.distance(&a.in_j, &b.in_j)?;
                worst = worst.max((du - dj).abs());
            }
        }
        Ok(worst)
    }

    fn wrap(&self, piece: Piece, inner: Point) -> Point {
        Point::new(
            self.id,
            Coords::Glued {
                piece,
                inner: Box::new(inner),
            },
        )
    }

    fn piece_space(&self, piece: Piece) -> &dyn Space {
        match piece {
            Piece::U => &*self.u,
            Piece::J => &*self.j,
        }
    }

    fn gate_in<'g>(gate: &'g Gate, piece: Piece) -> &'g Point {
        match piece {
            Piece::U => &gate.in_u,
            Piece::J => &gate.in_j,
        }
    }

    /// Floyd–Warshall closure of gate-to-gate distances through either piece.
    fn relaxed_gate_distances(&self) -> Result<Vec<f64>> {
        let n = self.gates.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let du = self.u.distance(&self.gates[i].in_u, &self.gates[j].in_u)?;
                let dj = self.j.distance(&self.gates[i].in_j, &self.gates[j].in_j)?;
                g[i * n + j] = du.min(dj);
                g[j * n + i] = du.min(dj);
            }
        }
        for m in 0..n {
            for i in 0..n {
                let gim = g[i * n + m];
                for j in 0..n {
                    let via = gim + g[m * n + j];
                    if via < g[i * n + j] {
                        g[i * n + j] = via;
                    }
                }
            }
        }
        Ok(g)
    }

    /// Minimises `d_U(x_u, k) + d_J(k, y_j)` over `k ∈ K`. Precomputed legs
    /// may be passed per gate to skip their evaluation in the coarse scan.
    pub fn crossing(
        &self,
        x_u: &Point,
        y_j: &Point,
        u_legs: Option<&[f64]>,
        j_legs: Option<&[f64]>,
    ) -> Result<Crossing> {
        let n = self.gates.len();
        let mut coarse = Vec::with_capacity(n);
        let mut best = 0;
        for (i, g) in self.gates.iter().enumerate() {
            let lu = match u_legs {
                Some(l) => l[i],
                None => self.u.distance(x_u, &g.in_u)?,
            };
            let lj = match j_legs {
                Some(l) => l[i],
                None => self.j.distance(&g.in_j, y_j)?,
            };
            let v = lu + lj;
            if v < coarse.get(best).copied().unwrap_or(f64::INFINITY) {
                best = i;
            }
            coarse.push(v);
        }
        let tie = self.policy.abs_tol;
        let kspace = self.interface.k_space();

        if !self.refine {
            let g = &self.gates[best];
            let mut ambiguity = None;
            for (i, &v) in coarse.iter().enumerate() {
                if i != best && v <= coarse[best] + tie {
                    let d = kspace.distance(&g.k, &self.gates[i].k)?;
                    if d > self.mesh {
                        ambiguity = Some(ambiguity.map_or(d, |a: f64| a.max(d)));
                    }
                }
            }
            return self.finish(x_u, y_j, g.k.clone(), best, ambiguity);
        }

        // Fast path: search along K between the two foot points, accepted
        // when no gate beats it.
        let foot = self.j.parts(y_j)?.0;
        let mut objective = |k: &Point| -> Result<f64> {
            let ku = self.interface.embed(k)?;
            let kj = self.j.cone_point(k.clone(), FRAC_PI_2)?;
            Ok(self.u.distance(x_u, &ku)? + self.j.distance(&kj, y_j)?)
        };
        if let Some((k, v)) =
            self.interface
                .segment_search(x_u, foot, self.policy.refine_tol, &mut objective)?
        {
            if v <= coarse[best] + tie {
                let mut ambiguity = None;
                for (i, &c) in coarse.iter().enumerate() {
                    if c <= v + tie {
                        let d = kspace.distance(&k, &self.gates[i].k)?;
                        if d > self.mesh {
                            ambiguity = Some(ambiguity.map_or(d, |a: f64| a.max(d)));
                        }
                    }
                }
                return self.finish(x_u, y_j, k, best, ambiguity);
            }
        }

        let window = coarse[best] + 2.0 * self.cover + tie;
        let mut cands: Vec<usize> = (0..n).filter(|&i| coarse[i] <= window).collect();
        cands.sort_by(|&a, &b| coarse[a].total_cmp(&coarse[b]).then(a.cmp(&b)));
        let mut seeds: Vec<usize> = Vec::new();
        for i in cands {
            let mut far = true;
            for &s in &seeds {
                if kspace.distance(&self.gates[s].k, &self.gates[i].k)? <= 3.0 * self.cover {
                    far = false;
                    break;
                }
            }
            if far {
                seeds.push(i);
                if seeds.len() == MAX_SEEDS {
                    break;
                }
            }
        }

        let mut results: Vec<(f64, Point, usize)> = Vec::with_capacity(seeds.len());
        for &s in &seeds {
            let refined = self.interface.refine(
                &self.gates[s].k,
                4.0 * self.cover,
                self.policy.refine_tol,
                &mut objective,
            )?;
            match refined {
                Some((k, v)) if v < coarse[s] => results.push((v, k, s)),
                _ => results.push((coarse[s], self.gates[s].k.clone(), s)),
            }
        }
        let top = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let mut tied: Vec<&(f64, Point, usize)> =
            results.iter().filter(|r| r.0 <= top + tie).collect();
        tied.sort_by_key(|r| r.2);
        let chosen = tied[0];
        let mut ambiguity = None;
        for other in &tied[1..] {
            let d = kspace.distance(&chosen.1, &other.1)?;
            if d > self.mesh {
                ambiguity = Some(ambiguity.map_or(d, |a: f64| a.max(d)));
            }
        }
        self.finish(x_u, y_j, chosen.1.clone(), chosen.2, ambiguity)
    }

    fn finish(
        &self,
        x_u: &Point,
        y_j: &Point,
        k: Point,
        gate: usize,
        ambiguity: Option<f64>,
    ) -> Result<Crossing> {
        let k_u = self.interface.embed(&k)?;
        let k_j = self.j.cone_point(k.clone(), FRAC_PI_2)?;
        let leg_u = self.u.distance(x_u, &k_u)?;
        let leg_j = self.j.distance(&k_j, y_j)?;
        Ok(Crossing {
            value: leg_u + leg_j,
            k,
            k_u,
            k_j,
            leg_u,
            leg_j,
            gate,
            ambiguity,
        })
    }

    /// Gate-to-gate distance inside `through` (or the relaxed closure).
    fn gate_gap(&self, i: usize, j: usize, through: Piece) -> Result<f64> {
        if let Some(g) = &self.closure {
            return Ok(g[i * self.gates.len() + j]);
        }
        let sp = self.piece_space(through);
        sp.distance(Self::gate_in(&self.gates[i], through), Self::gate_in(&self.gates[j], through))
    }

    /// Shortest path leaving `piece` at one gate and re-entering at another.
    fn detour(&self, piece: Piece, x: &Point, y: &Point) -> Result<f64> {
        let sp = self.piece_space(piece);
        let other = match piece {
            Piece::U => Piece::J,
            Piece::J => Piece::U,
        };
        let n = self.gates.len();
        let mut dx = Vec::with_capacity(n);
        let mut dy = Vec::with_capacity(n);
        for g in &self.gates {
            dx.push(sp.distance(x, Self::gate_in(g, piece))?);
            dy.push(sp.distance(Self::gate_in(g, piece), y)?);
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                best = best.min(dx[i] + self.gate_gap(i, j, other)? + dy[j]);
            }
        }
        Ok(best)
    }

    /// Cross-piece chain through two gates joined by the relaxed closure.
    fn relaxed_cross(&self, x_u: &Point, y_j: &Point) -> Result<f64> {
        let n = self.gates.len();
        let mut du = Vec::with_capacity(n);
        let mut dj = Vec::with_capacity(n);
        for g in &self.gates {
            du.push(self.u.distance(x_u, &g.in_u)?);
            dj.push(self.j.distance(&g.in_j, y_j)?);
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                best = best.min(du[i] + self.gate_gap(i, j, Piece::U)? + dj[j]);
            }
        }
        Ok(best)
    }

    fn glued_distance(&self, x: &Point, y: &Point) -> Result<Measured> {
        let (px, xi) = self.unwrap(x)?;
        let (py, yi) = self.unwrap(y)?;
        let multi = self.crossing.max_crossings >= 2 || self.crossing.relaxation;
        if px == py {
            let d = self.piece_space(px).distance(xi, yi)?;
            if !multi {
                return Ok(Measured::exact(d));
            }
            let detour = self.detour(px, xi, yi)?;
            return Ok(Measured {
                value: d.min(detour),
                error_bound: if detour < d { self.gate_error_bound() } else { 0.0 },
            });
        }
        let (xu, yj) = if px == Piece::U { (xi, yi) } else { (yi, xi) };
        let mut value = self.crossing(xu, yj, None, None)?.value;
        if self.crossing.relaxation {
            value = value.min(self.relaxed_cross(xu, yj)?);
        }
        Ok(Measured {
            value,
            error_bound: self.gate_error_bound(),
        })
    }
}

impl Space for GluedSpace {
    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Glued
    }

    fn curvature_bound(&self) -> f64 {
        self.u.curvature_bound().max(1.0)
    }

    fn diameter_bound(&self) -> Option<f64> {
        None
    }

    fn uniqueness_radius(&self) -> f64 {
        PI / self.curvature_bound().sqrt()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_exp_log: false,
            has_exact_geodesics: false,
        }
    }

    fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    fn validate(&self, p: &Point) -> Result<()> {
        let (piece, inner) = self.unwrap(p)?;
        self.piece_space(piece).validate(inner)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.glued_distance(x, y)?.value)
    }

    fn measured_distance(&self, x: &Point, y: &Point) -> Result<Measured> {
        self.glued_distance(x, y)
    }

    /// Intrinsic geodesic inside a piece; across pieces, the path through
    /// the best crossing point.
    fn geodesic_point(&self, x: &Point, y: &Point, s: f64) -> Result<Point> {
        let (px, xi) = self.unwrap(x)?;
        let (py, yi) = self.unwrap(y)?;
        if px == py {
            let p = self.piece_space(px).geodesic_point(xi, yi, s)?;
            return Ok(self.wrap(px, p));
        }
        let (xu, yj) = if px == Piece::U { (xi, yi) } else { (yi, xi) };
        let c = self.crossing(xu, yj, None, None)?;
        self.check_unique(c.value)?;
        // Arc length from x.
        let a = s * c.value;
        let (first_piece, first, k_first, leg_first, second_piece, second, k_second) =
            if px == Piece::U {
                (Piece::U, xi, &c.k_u, c.leg_u, Piece::J, yi, &c.k_j)
            } else {
                (Piece::J, xi, &c.k_j, c.leg_j, Piece::U, yi, &c.k_u)
            };
        if a <= leg_first {
            let frac = if leg_first > 0.0 { a / leg_first } else { 0.0 };
            let p = self.piece_space(first_piece).geodesic_point(first, k_first, frac)?;
            Ok(self.wrap(first_piece, p))
        } else {
            let rest = c.value - leg_first;
            let frac = if rest > 0.0 { (a - leg_first) / rest } else { 1.0 };
            let p = self.piece_space(second_piece).geodesic_point(k_second, second, frac)?;
            Ok(self.wrap(second_piece, p))
        }
    }

    fn project_to_ball(&self, center: &Point, r: f64, x: &Point) -> Result<Point> {
        Ok(self.ball_projector(center, r)?.project(x)?.point)
    }

    fn ball_projector<'a>(&'a self, center: &Point, r: f64) -> Result<Box<dyn BallProjector + 'a>> {
        self.validate(center)?;
        if !(r > 0.0) {
            return Err(GeomError::Domain(format!("ball radius must be positive, got {r}")));
        }
        let (piece, inner) = self.unwrap(center)?;
        let sp = self.piece_space(piece);
        let legs = self
            .gates
            .iter()
            .map(|g| sp.distance(Self::gate_in(g, piece), inner))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Box::new(GluedBall {
            w: self,
            piece,
            center: inner.clone(),
            r,
            legs,
        }))
    }
}

/// Projection onto a ball of the glued space with per-gate distances to the
/// centre precomputed.
struct GluedBall<'a> {
    w: &'a GluedSpace,
    piece: Piece,
    center: Point,
    r: f64,
    legs: Vec<f64>,
}

impl BallProjector for GluedBall<'_> {
    fn project(&self, x: &Point) -> Result<Projection> {
        let w = self.w;
        let (px, xi) = w.unwrap(x)?;
        let unchanged = |d: f64| Projection {
            point: x.clone(),
            moved: false,
            slack: self.r - d,
            ambiguity: None,
        };
        if px == self.piece {
            let sp = w.piece_space(px);
            let d = sp.distance(&self.center, xi)?;
            if d <= self.r {
                return Ok(unchanged(d));
            }
            sp.check_unique(d)?;
            let p = sp.geodesic_point(&self.center, xi, self.r / d)?;
            return Ok(Projection {
                point: w.wrap(px, p),
                moved: true,
                slack: 0.0,
                ambiguity: None,
            });
        }
        let c = match px {
            Piece::U => w.crossing(xi, &self.center, None, Some(&self.legs))?,
            Piece::J => w.crossing(&self.center, xi, Some(&self.legs), None)?,
        };
        if c.value <= self.r {
            return Ok(unchanged(c.value));
        }
        w.check_unique(c.value)?;
        // Walk back from x by the overshoot; stay in x's piece when the
        // overshoot is within rounding of the leg to the crossing point.
        let overshoot = c.value - self.r;
        let (leg_x, k_x, leg_c, k_c) = match px {
            Piece::U => (c.leg_u, &c.k_u, c.leg_j, &c.k_j),
            Piece::J => (c.leg_j, &c.k_j, c.leg_u, &c.k_u),
        };
        let tol = w.policy.abs_tol;
        let point = if overshoot <= leg_x + tol {
            let p = if overshoot >= leg_x {
                k_x.clone()
            } else {
                w.piece_space(px).geodesic_point(xi, k_x, overshoot / leg_x)?
            };
            w.wrap(px, p)
        } else {
            let p = w.piece_space(self.piece).geodesic_point(&self.center, k_c, self.r / leg_c)?;
            w.wrap(self.piece, p)
        };
        Ok(Projection {
            point,
            moved: true,
            slack: 0.0,
            ambiguity: c.ambiguity,
        })
    }
}

#[cfg(test)]
mod tests;
