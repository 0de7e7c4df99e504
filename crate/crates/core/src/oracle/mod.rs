//! Expert policies: a human-oblivious shortest-path expert and a
//! human-avoiding expert that plans around occupied viewpoints.

pub mod astar;
pub mod expert;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::action::{
    lattice_headings, normalize_heading, Action, ActionSpace, Command, HEADING_STEP,
};
use crate::sim::episode::Episode;
use crate::sim::nav::{egocentric_traversable, forward_pick, headings_reaching};
use crate::world::graph::{NavGraph, NodeIdx};
use crate::world::occupancy::DEFAULT_OCCUPANCY_RADIUS;

pub use astar::{astar, plan_path, plan_with_fallback, Fallback, Plan, PlanResult, Search};
pub use expert::{OptimalExpert, SubOptimalExpert};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Minimum safe distance, meters.
    pub epsilon: f64,
    /// Avoidance threshold, meters.
    pub delta: f64,
    pub occupancy_radius: f64,
    /// Steps between replans.
    pub replan_every: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            epsilon: 1.0,
            delta: 2.0,
            occupancy_radius: DEFAULT_OCCUPANCY_RADIUS,
            replan_every: 1,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= self.delta) {
            return Err(Error::InvalidParams(
                "planner needs 0 < epsilon <= delta".into(),
            ));
        }
        if !(self.occupancy_radius > 0.0) {
            return Err(Error::InvalidParams(
                "occupancy_radius must be positive".into(),
            ));
        }
        if self.replan_every == 0 {
            return Err(Error::InvalidParams("replan_every must be positive".into()));
        }
        Ok(())
    }
}

/// Anything that picks the next command for a running episode.
pub trait Policy: Send {
    fn name(&self) -> &str;

    /// Called before a new episode starts.
    fn begin(&mut self, _ep: &Episode) {}

    fn next_command(&mut self, ep: &Episode) -> Result<Command>;
}

/// Directed edges the agent can follow in the given action space.
#[derive(Clone, Debug)]
pub struct MoveFilter {
    allowed: Option<Vec<Vec<NodeIdx>>>,
}

impl MoveFilter {
    pub fn new(g: &NavGraph, mode: ActionSpace) -> Self {
        let allowed = match mode {
            ActionSpace::Panoramic => None,
            ActionSpace::Egocentric => Some(
                (0..g.len())
                    .map(|a| {
                        g.neighbors(a)
                            .iter()
                            .map(|n| n.node)
                            .filter(|&b| egocentric_traversable(g, a, b))
                            .collect()
                    })
                    .collect(),
            ),
        };
        MoveFilter { allowed }
    }

    pub fn allows(&self, a: NodeIdx, b: NodeIdx) -> bool {
        match &self.allowed {
            None => true,
            Some(lists) => lists[a].binary_search(&b).is_ok(),
        }
    }
}

/// The command that makes progress along the edge to `target`: the move
/// itself when it is admissible, otherwise the rotation toward the nearest
/// heading from which `forward` lands on `target` (ties turn right).
pub fn steer_toward(ep: &Episode, target: NodeIdx) -> Option<Command> {
    let g = &ep.scenario().graph;
    if !g.are_adjacent(ep.node(), target) {
        return None;
    }
    match ep.config().mode {
        ActionSpace::Panoramic => Some(Command::MoveTo(g.id(target).to_string())),
        ActionSpace::Egocentric => {
            let heading = ep.heading();
            if forward_pick(g, ep.node(), f64::from(heading)) == Some(target) {
                return Some(Command::Act(Action::Forward));
            }
            let notches = 360 / HEADING_STEP;
            headings_reaching(g, ep.node(), target)
                .into_iter()
                .map(|h| {
                    let right = (normalize_heading(h - heading) / HEADING_STEP).rem_euclid(notches);
                    let left = notches - right;
                    if right <= left {
                        (right, Action::Right)
                    } else {
                        (left, Action::Left)
                    }
                })
                .min_by_key(|&(steps, a)| (steps, a != Action::Right))
                .map(|(_, a)| Command::Act(a))
        }
    }
}

/// Number of rotations needed before `forward` from `heading` lands on
/// `target`, if any heading does.
pub fn rotations_needed(g: &NavGraph, node: NodeIdx, heading: i32, target: NodeIdx) -> Option<i32> {
    let notches = 360 / HEADING_STEP;
    lattice_headings()
        .filter(|&h| forward_pick(g, node, f64::from(h)) == Some(target))
        .map(|h| {
            let right = (normalize_heading(h - heading) / HEADING_STEP).rem_euclid(notches);
            right.min(notches - right)
        })
        .min()
}
