use std::f64::consts::FRAC_PI_2;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};

use super::GluedSpace;
use crate::error::{GeomError, Result};
use crate::metric::{Measured, Piece, Point, Space};

/// Node of the net: a point of one piece, or a gate lying in both.
#[derive(Debug, Clone)]
struct Node {
    u: Option<Point>,
    j: Option<Point>,
}

/// Shortest paths on a sampled net of the glued space.
///
/// Nodes are samples of `U`, the gates, and cone points above the gates;
/// edges join nodes of a common piece closer than `radius`, weighted by the
/// intrinsic distance. Every net path is a path in the glued space, so net
/// distances bound glued distances from above.
#[derive(Debug, Clone)]
pub struct EpsilonNet {
    graph: UnGraph<Node, f64>,
    radius: f64,
}

impl EpsilonNet {
    /// `u_samples` are points of `U`; `levels` cone levels are placed above
    /// every gate, plus the tip.
    pub fn build(w: &GluedSpace, u_samples: &[Point], levels: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(GeomError::Configuration("net radius must be positive".into()));
        }
        let mut graph = UnGraph::new_undirected();
        for p in u_samples {
            w.u().validate(p)?;
            graph.add_node(Node {
                u: Some(p.clone()),
                j: None,
            });
        }
        for g in w.gates() {
            graph.add_node(Node {
                u: Some(g.in_u.clone()),
                j: Some(g.in_j.clone()),
            });
        }
        let j = w.j();
        for g in w.gates() {
            for l in 1..levels {
                let t = FRAC_PI_2 * l as f64 / levels as f64;
                graph.add_node(Node {
                    u: None,
                    j: Some(j.cone_point(g.k.clone(), t)?),
                });
            }
        }
        graph.add_node(Node {
            u: None,
            j: Some(j.tip(w.gates()[0].k.clone())?),
        });
        let n = graph.node_count();
        for a in 0..n {
            for b in a + 1..n {
                let (ia, ib) = (NodeIndex::new(a), NodeIndex::new(b));
                if let Some(d) = Self::link(w, &graph[ia], &graph[ib])? {
                    if d <= radius {
                        graph.add_edge(ia, ib, d);
                    }
                }
            }
        }
        Ok(EpsilonNet { graph, radius })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn link(w: &GluedSpace, a: &Node, b: &Node) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        if let (Some(x), Some(y)) = (&a.u, &b.u) {
            best = Some(w.u().distance(x, y)?);
        }
        if let (Some(x), Some(y)) = (&a.j, &b.j) {
            let d = w.j().distance(x, y)?;
            best = Some(best.map_or(d, |b| b.min(d)));
        }
        Ok(best)
    }

    fn as_node(w: &GluedSpace, p: &Point) -> Result<Node> {
        let (piece, inner) = w.unwrap(p)?;
        Ok(match piece {
            Piece::U => Node {
                u: Some(inner.clone()),
                j: None,
            },
            Piece::J => Node {
                u: None,
                j: Some(inner.clone()),
            },
        })
    }

    /// Net distance between two glued points; the error bound reported is
    /// the net radius.
    pub fn distance(&self, w: &GluedSpace, x: &Point, y: &Point) -> Result<Measured> {
        let mut g = self.graph.clone();
        let base = g.node_count();
        let nx = g.add_node(Self::as_node(w, x)?);
        let ny = g.add_node(Self::as_node(w, y)?);
        for extra in [nx, ny] {
            for i in 0..base {
                let idx = NodeIndex::new(i);
                if let Some(d) = Self::link(w, &g[extra], &g[idx])? {
                    if d <= self.radius {
                        g.add_edge(extra, idx, d);
                    }
                }
            }
        }
        if let Some(d) = Self::link(w, &g[nx], &g[ny])? {
            if d <= self.radius {
                g.add_edge(nx, ny, d);
            }
        }
        let dist = dijkstra(&g, nx, Some(ny), |e| *e.weight());
        let value = dist.get(&ny).copied().ok_or_else(|| {
            GeomError::Resolution("net too coarse: points not connected".into())
        })?;
        Ok(Measured {
            value,
            error_bound: self.radius,
        })
    }
}
