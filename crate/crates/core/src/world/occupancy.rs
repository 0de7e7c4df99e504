use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;
use crate::world::scenario::Scenario;

/// Default radius within which a human marks a viewpoint as occupied.
pub const DEFAULT_OCCUPANCY_RADIUS: f64 = 1.0;

/// Viewpoints affected by humans at one frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancySet {
    pub frame: u32,
    pub nodes: BTreeSet<String>,
}

/// Human positions at `frame`, in scenario order.
pub fn human_positions(s: &Scenario, frame: u32) -> Vec<Vec3> {
    s.humans().iter().map(|h| h.position_at(frame)).collect()
}

/// Per-node flag: some human is strictly closer than `radius`.
pub fn occupied_mask(s: &Scenario, frame: u32, radius: f64) -> Vec<bool> {
    let positions = human_positions(s, frame);
    mask_from_positions(s, &positions, radius)
}

pub fn mask_from_positions(s: &Scenario, positions: &[Vec3], radius: f64) -> Vec<bool> {
    s.graph
        .nodes()
        .iter()
        .map(|n| positions.iter().any(|p| p.distance(n.position) < radius))
        .collect()
}

pub fn occupied_nodes(s: &Scenario, frame: u32, radius: f64) -> OccupancySet {
    let mask = occupied_mask(s, frame, radius);
    OccupancySet {
        frame,
        nodes: mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| s.graph.id(i).to_string())
            .collect(),
    }
}
