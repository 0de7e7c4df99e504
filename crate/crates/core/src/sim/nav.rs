//! Neighbor selection under the egocentric field of view.

use crate::geom::{bearing, wrap_deg};
use crate::sim::action::{lattice_headings, HALF_FOV_DEG};
use crate::world::graph::{NavGraph, NodeIdx};

const FOV_EPS: f64 = 1e-9;

/// Signed offset of a neighbor's bearing from `heading`.
pub fn relative_bearing(g: &NavGraph, from: NodeIdx, to: NodeIdx, heading: f64) -> f64 {
    wrap_deg(bearing(g.position(from), g.position(to)) - heading)
}

pub fn in_fov(relative: f64) -> bool {
    relative.abs() <= HALF_FOV_DEG + FOV_EPS
}

/// Neighbors inside the field of view, in index order.
pub fn visible_neighbors(g: &NavGraph, node: NodeIdx, heading: f64) -> Vec<NodeIdx> {
    g.neighbors(node)
        .iter()
        .map(|n| n.node)
        .filter(|&m| in_fov(relative_bearing(g, node, m, heading)))
        .collect()
}

/// The neighbor `forward` moves to: smallest absolute bearing offset inside
/// the field of view, ties broken by smaller id.
pub fn forward_pick(g: &NavGraph, node: NodeIdx, heading: f64) -> Option<NodeIdx> {
    let mut best: Option<(f64, NodeIdx)> = None;
    for n in g.neighbors(node) {
        let off = relative_bearing(g, node, n.node, heading).abs();
        if off > HALF_FOV_DEG + FOV_EPS {
            continue;
        }
        match best {
            Some((b, _)) if b <= off => {}
            _ => best = Some((off, n.node)),
        }
    }
    best.map(|(_, m)| m)
}

/// Lattice headings from which `forward` at `from` lands on `to`.
pub fn headings_reaching(g: &NavGraph, from: NodeIdx, to: NodeIdx) -> Vec<i32> {
    lattice_headings()
        .filter(|&h| forward_pick(g, from, f64::from(h)) == Some(to))
        .collect()
}

/// Whether the edge `from → to` can be taken with some lattice heading.
pub fn egocentric_traversable(g: &NavGraph, from: NodeIdx, to: NodeIdx) -> bool {
    lattice_headings().any(|h| forward_pick(g, from, f64::from(h)) == Some(to))
}
