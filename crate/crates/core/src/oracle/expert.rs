use std::sync::Arc;

use crate::error::Result;
use crate::geom::{point_segment_distance, Vec3};
use crate::oracle::astar::{astar, plan_with_fallback, restricted_tree, Plan};
use crate::oracle::{steer_toward, MoveFilter, PlannerConfig, Policy};
use crate::sim::action::{Action, Command, ELEVATION_MAX};
use crate::sim::episode::Episode;
use crate::world::graph::NodeIdx;
use crate::world::human::CYCLE_FRAMES;
use crate::world::occupancy::{human_positions, mask_from_positions, occupied_mask};
use crate::world::scenario::Scenario;

const STOP: Command = Command::Act(Action::Stop);
/// Detours longer than this multiple of the route blocked only by passing
/// humans, plus the slack in meters, are not taken.
const DETOUR_FACTOR: f64 = 1.5;
const DETOUR_SLACK: f64 = 2.0;

fn same_scenario(cached: &Option<Arc<Scenario>>, ep: &Episode) -> bool {
    cached
        .as_ref()
        .is_some_and(|s| Arc::ptr_eq(s, ep.scenario()))
}

/// Follows the shortest route on the full graph and ignores humans.
#[derive(Clone, Debug, Default)]
pub struct OptimalExpert {
    scenario: Option<Arc<Scenario>>,
    filter: Option<MoveFilter>,
    plan: Option<Plan>,
}

impl OptimalExpert {
    pub fn new() -> Self {
        Self::default()
    }

    fn refresh(&mut self, ep: &Episode) {
        if !same_scenario(&self.scenario, ep) || self.filter.is_none() {
            self.scenario = Some(ep.scenario().clone());
            self.filter = Some(MoveFilter::new(&ep.scenario().graph, ep.config().mode));
            self.plan = None;
        }
        let on_plan = self
            .plan
            .as_ref()
            .is_some_and(|p| p.path.contains(&ep.node()));
        if !on_plan {
            let g = &ep.scenario().graph;
            let filter = self.filter.as_ref().expect("set above");
            let blocked = vec![false; g.len()];
            self.plan = Some(plan_with_fallback(
                g,
                ep.node(),
                ep.goal(),
                &blocked,
                |a, b| filter.allows(a, b),
                ep.goal_distances(),
            ));
        }
    }
}

impl Policy for OptimalExpert {
    fn name(&self) -> &str {
        "oracle-optimal"
    }

    fn begin(&mut self, _ep: &Episode) {
        self.plan = None;
    }

    fn next_command(&mut self, ep: &Episode) -> Result<Command> {
        if ep.node() == ep.goal() {
            return Ok(STOP);
        }
        self.refresh(ep);
        let plan = self.plan.as_ref().expect("refreshed");
        let Some(at) = plan.path.iter().position(|&n| n == ep.node()) else {
            return Ok(STOP);
        };
        match plan.path.get(at + 1) {
            Some(&next) => Ok(steer_toward(ep, next).unwrap_or(STOP)),
            None => Ok(STOP),
        }
    }
}

/// Plans on the graph with human-occupied viewpoints removed, replanning
/// as humans move. When a human is closer than `delta` its exclusion zone
/// grows to `delta`; edges passing within `epsilon` of a human are not
/// used. If the goal cannot be reached it heads for the reachable viewpoint
/// nearest the goal and stops there.
#[derive(Clone, Debug)]
pub struct SubOptimalExpert {
    cfg: PlannerConfig,
    scenario: Option<Arc<Scenario>>,
    filter: Option<MoveFilter>,
    plan: Option<Plan>,
    planned_at: u32,
    persistent: Option<Vec<bool>>,
    waiting_since: Option<u32>,
    gave_up_waiting: bool,
}

impl SubOptimalExpert {
    pub fn new(cfg: PlannerConfig) -> Self {
        SubOptimalExpert {
            cfg,
            scenario: None,
            filter: None,
            plan: None,
            planned_at: 0,
            persistent: None,
            waiting_since: None,
            gave_up_waiting: false,
        }
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.cfg
    }

    /// The route currently being followed.
    pub fn current_plan(&self) -> Option<&Plan> {
        self.plan.as_ref()
    }

    fn replan(&self, ep: &Episode, humans: &[Vec3]) -> Plan {
        let g = &ep.scenario().graph;
        let filter = self.filter.as_ref().expect("filter set before planning");
        let cur = ep.node();
        let here = g.position(cur);
        let blocked = self.blocked(ep, humans);
        let edge_ok = |a, b| self.edge_ok(ep, humans, filter, a, b);

        let nearest = humans
            .iter()
            .copied()
            .min_by(|a, b| a.distance(here).total_cmp(&b.distance(here)));
        if let Some(h) = nearest.filter(|h| h.distance(here) < self.cfg.delta) {
            let mut inflated = blocked.clone();
            for (i, b) in inflated.iter_mut().enumerate() {
                if g.position(i).distance(h) < self.cfg.delta {
                    *b = true;
                }
            }
            inflated[cur] = false;
            let found = astar(g, cur, ep.goal(), &inflated, edge_ok);
            if let Some(path) = found.path {
                return Plan {
                    path,
                    cost: found.cost,
                    reached_goal: true,
                    expansions: found.expansions,
                };
            }
        }
        plan_with_fallback(g, cur, ep.goal(), &blocked, edge_ok, ep.goal_distances())
    }

    /// Viewpoints occupied at the current frame, except the agent's own.
    fn blocked(&self, ep: &Episode, humans: &[Vec3]) -> Vec<bool> {
        let mut blocked = mask_from_positions(ep.scenario(), humans, self.cfg.occupancy_radius);
        blocked[ep.node()] = false;
        blocked
    }

    /// Edges must keep `epsilon` from every human the agent is not
    /// already next to.
    fn edge_ok(
        &self,
        ep: &Episode,
        humans: &[Vec3],
        filter: &MoveFilter,
        a: NodeIdx,
        b: NodeIdx,
    ) -> bool {
        let g = &ep.scenario().graph;
        let here = g.position(ep.node());
        let eps = self.cfg.epsilon;
        filter.allows(a, b)
            && humans
                .iter()
                .filter(|p| p.distance(here) >= eps)
                .all(|&p| point_segment_distance(p, g.position(a), g.position(b)) >= eps)
    }

    /// Whether the rest of `plan` is still free of humans.
    fn still_valid(&self, ep: &Episode, humans: &[Vec3], plan: &Plan) -> bool {
        let Some(at) = plan.path.iter().position(|&n| n == ep.node()) else {
            return false;
        };
        let filter = self.filter.as_ref().expect("filter set before planning");
        let blocked = self.blocked(ep, humans);
        let rest = &plan.path[at..];
        rest.iter().all(|&n| !blocked[n])
            && rest
                .windows(2)
                .all(|w| self.edge_ok(ep, humans, filter, w[0], w[1]))
    }

    /// Shortest route avoiding only viewpoints that are occupied during
    /// the whole cycle; `None` when those cut the agent off from the goal.
    fn unhurried_route(&mut self, ep: &Episode) -> Option<Plan> {
        let g = &ep.scenario().graph;
        let radius = self.cfg.occupancy_radius;
        let persistent = self.persistent.get_or_insert_with(|| {
            let mut always = vec![true; g.len()];
            for f in 0..CYCLE_FRAMES {
                let now = occupied_mask(ep.scenario(), f, radius);
                for (a, n) in always.iter_mut().zip(now) {
                    *a &= n;
                }
            }
            always
        });
        let mut blocked = persistent.clone();
        blocked[ep.node()] = false;
        let filter = self.filter.as_ref().expect("filter set before planning");
        let found = astar(g, ep.node(), ep.goal(), &blocked, |a, b| {
            filter.allows(a, b)
        });
        found.path.map(|path| Plan {
            path,
            cost: found.cost,
            reached_goal: true,
            expansions: found.expansions,
        })
    }

    /// Picks a replacement for an occupied next hop: the free admissible
    /// neighbor minimizing edge length plus remaining distance on the
    /// human-free graph.
    fn adjust(&self, ep: &Episode, humans: &[Vec3], avoid: NodeIdx) -> Option<NodeIdx> {
        let g = &ep.scenario().graph;
        let filter = self.filter.as_ref()?;
        let blocked = self.blocked(ep, humans);
        let (remaining, _) = restricted_tree(g, ep.goal(), &blocked, |a, b| filter.allows(b, a));
        g.neighbors(ep.node())
            .iter()
            .filter(|n| {
                n.node != avoid
                    && !blocked[n.node]
                    && self.edge_ok(ep, humans, filter, ep.node(), n.node)
            })
            .map(|n| (n.weight + remaining[n.node], n.node))
            .filter(|(c, _)| c.is_finite())
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, n)| n)
    }
}

impl Default for SubOptimalExpert {
    fn default() -> Self {
        Self::new(PlannerConfig::default())
    }
}

impl Policy for SubOptimalExpert {
    fn name(&self) -> &str {
        "oracle-suboptimal"
    }

    fn begin(&mut self, _ep: &Episode) {
        self.plan = None;
        self.waiting_since = None;
        self.gave_up_waiting = false;
    }

    fn next_command(&mut self, ep: &Episode) -> Result<Command> {
        if ep.node() == ep.goal() {
            return Ok(STOP);
        }
        if !same_scenario(&self.scenario, ep) || self.filter.is_none() {
            self.scenario = Some(ep.scenario().clone());
            self.filter = Some(MoveFilter::new(&ep.scenario().graph, ep.config().mode));
            self.plan = None;
            self.persistent = None;
        }
        if self
            .waiting_since
            .is_some_and(|since| ep.frame() >= since + CYCLE_FRAMES)
        {
            // a full cycle went by without the route clearing
            self.gave_up_waiting = true;
        }
        let g = &ep.scenario().graph;
        let humans = human_positions(ep.scenario(), ep.frame());
        let stale = match &self.plan {
            None => true,
            Some(p) => {
                ep.steps_taken() >= self.planned_at + self.cfg.replan_every
                    || !p.path.contains(&ep.node())
            }
        };
        if stale {
            let fresh = self.replan(ep, &humans);
            // keep a route that is still clear unless the goal opened up
            let keep = self.plan.as_ref().is_some_and(|old| {
                (old.reached_goal || !fresh.reached_goal) && self.still_valid(ep, &humans, old)
            });
            if !keep {
                self.plan = Some(fresh);
            }
            self.planned_at = ep.steps_taken();
        }
        let plan = self.plan.clone().expect("planned above");
        let at = plan
            .path
            .iter()
            .position(|&n| n == ep.node())
            .expect("plan passes through the agent");
        let remaining = g.path_length(&plan.path[at..]).unwrap_or(f64::INFINITY);

        // A long detour or a missing route caused by passing humans is
        // waited out on the route they will clear, for one cycle at most.
        let unhurried = if self.gave_up_waiting {
            None
        } else {
            self.unhurried_route(ep)
        };
        if let Some(base) = &unhurried {
            let detour = !plan.reached_goal || remaining > DETOUR_FACTOR * base.cost + DETOUR_SLACK;
            if detour {
                let next = base.next_hop().expect("agent is not on the goal");
                let filter = self.filter.as_ref().expect("set above");
                let clear = !self.blocked(ep, &humans)[next]
                    && self.edge_ok(ep, &humans, filter, ep.node(), next);
                let cmd = match steer_toward(ep, next) {
                    Some(Command::Act(Action::Left)) => Command::Act(Action::Left),
                    Some(Command::Act(Action::Right)) => Command::Act(Action::Right),
                    Some(step) if clear => step,
                    _ => wait(ep),
                };
                if matches!(cmd, Command::Act(Action::Up | Action::Down)) {
                    self.waiting_since.get_or_insert(ep.frame());
                } else {
                    self.waiting_since = None;
                }
                return Ok(cmd);
            }
        }
        self.waiting_since = None;

        let Some(&next) = plan.path.get(at + 1) else {
            // at the fallback viewpoint, cut off for good
            return Ok(STOP);
        };
        let occupied = mask_from_positions(ep.scenario(), &humans, self.cfg.occupancy_radius);
        let next = if occupied[next] {
            self.adjust(ep, &humans, next).unwrap_or(next)
        } else {
            next
        };
        Ok(steer_toward(ep, next).unwrap_or(STOP))
    }
}

/// Passes time in place without changing heading.
fn wait(ep: &Episode) -> Command {
    if ep.elevation() < ELEVATION_MAX {
        Command::Act(Action::Up)
    } else {
        Command::Act(Action::Down)
    }
}
