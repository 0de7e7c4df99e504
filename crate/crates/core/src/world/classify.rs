use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::world::critical::critical_anywhere;
use crate::world::human::CYCLE_FRAMES;
use crate::world::occupancy::DEFAULT_OCCUPANCY_RADIUS;
use crate::world::scenario::Scenario;

pub const DEFAULT_VISIBILITY_RANGE: f64 = 10.0;

/// How a viewpoint is affected by the humans of a scenario over one cycle.
/// Variants are listed in priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewpointClass {
    Occupied,
    Isolated,
    Visible,
    Unaffected,
}

impl ViewpointClass {
    pub fn is_affected(self) -> bool {
        self != ViewpointClass::Unaffected
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub visibility_range: f64,
    pub occupancy_radius: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            visibility_range: DEFAULT_VISIBILITY_RANGE,
            occupancy_radius: DEFAULT_OCCUPANCY_RADIUS,
        }
    }
}

/// Closest approach of any human to each node over a full cycle.
pub fn min_human_distance(s: &Scenario) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; s.graph.len()];
    for h in s.humans() {
        let frames = if h.is_stationary() { 1 } else { CYCLE_FRAMES };
        for f in 0..frames {
            let p = h.position_at(f);
            for (i, n) in s.graph.nodes().iter().enumerate() {
                let d = p.distance(n.position);
                if d < best[i] {
                    best[i] = d;
                }
            }
        }
    }
    best
}

/// Class per node index.
pub fn classify_indices(s: &Scenario, cfg: &ClassifyConfig) -> Vec<ViewpointClass> {
    let closest = min_human_distance(s);
    let occupied: Vec<bool> = closest.iter().map(|&d| d < cfg.occupancy_radius).collect();
    let critical = critical_anywhere(&s.graph);
    (0..s.graph.len())
        .map(|i| {
            if occupied[i] {
                ViewpointClass::Occupied
            } else if critical[i] && s.graph.neighbors(i).iter().any(|n| occupied[n.node]) {
                ViewpointClass::Isolated
            } else if closest[i] < cfg.visibility_range {
                ViewpointClass::Visible
            } else {
                ViewpointClass::Unaffected
            }
        })
        .collect()
}

pub fn classify_viewpoints(s: &Scenario, cfg: &ClassifyConfig) -> BTreeMap<String, ViewpointClass> {
    classify_indices(s, cfg)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (s.graph.id(i).to_string(), c))
        .collect()
}

/// Fractions of viewpoints by impact. `indirect` counts affected but not
/// occupied viewpoints (visible or isolated).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ImpactStats {
    pub viewpoints: usize,
    pub occupied: usize,
    pub isolated: usize,
    pub visible: usize,
}

impl ImpactStats {
    pub fn from_classes(classes: &[ViewpointClass]) -> Self {
        let mut s = ImpactStats {
            viewpoints: classes.len(),
            ..Default::default()
        };
        for c in classes {
            match c {
                ViewpointClass::Occupied => s.occupied += 1,
                ViewpointClass::Isolated => s.isolated += 1,
                ViewpointClass::Visible => s.visible += 1,
                ViewpointClass::Unaffected => {}
            }
        }
        s
    }

    pub fn merge(&mut self, other: &ImpactStats) {
        self.viewpoints += other.viewpoints;
        self.occupied += other.occupied;
        self.isolated += other.isolated;
        self.visible += other.visible;
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.occupied as f64 / self.viewpoints.max(1) as f64
    }

    pub fn indirect_fraction(&self) -> f64 {
        (self.visible + self.isolated) as f64 / self.viewpoints.max(1) as f64
    }
}
