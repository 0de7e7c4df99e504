//! The episode engine: agent pose, action semantics, observations and
//! per-step rewards.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{bearing, wrap_deg, Vec3};
use crate::sim::action::{
    is_lattice_elevation, is_lattice_heading, normalize_heading, Action, ActionSpace, Command,
    ELEVATION_MAX, ELEVATION_MIN, ELEVATION_STEP, HEADING_STEP,
};
use crate::sim::collision::{
    AgentSegment, CollisionEvent, CollisionTracker, DEFAULT_COLLISION_THRESHOLD,
};
use crate::sim::nav::{forward_pick, in_fov, relative_bearing, visible_neighbors};
use crate::sim::rewards::{RewardModel, Rewards, DEFAULT_SUCCESS_RADIUS};
use crate::world::classify::DEFAULT_VISIBILITY_RANGE;
use crate::world::graph::NodeIdx;
use crate::world::human::FPS;
use crate::world::scenario::Scenario;

pub const DEFAULT_STEP_CAP: u32 = 30;
/// Two seconds at 16 FPS.
pub const OBSERVATION_WINDOW_FRAMES: u32 = 2 * FPS;
pub const ROTATION_FRAMES: u32 = 8;
pub const AGENT_SPEED: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub mode: ActionSpace,
    pub collision_threshold: f64,
    pub visibility_range: f64,
    pub success_radius: f64,
    /// Meters per second.
    pub speed: f64,
    pub rotation_frames: u32,
    pub window_frames: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: ActionSpace::Egocentric,
            collision_threshold: DEFAULT_COLLISION_THRESHOLD,
            visibility_range: DEFAULT_VISIBILITY_RANGE,
            success_radius: DEFAULT_SUCCESS_RADIUS,
            speed: AGENT_SPEED,
            rotation_frames: ROTATION_FRAMES,
            window_frames: OBSERVATION_WINDOW_FRAMES,
        }
    }
}

impl SimConfig {
    pub fn with_mode(mode: ActionSpace) -> Self {
        SimConfig {
            mode,
            ..Default::default()
        }
    }

    pub fn reward_model(&self) -> RewardModel {
        RewardModel {
            success_radius: self.success_radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartPose {
    pub node: String,
    #[serde(default)]
    pub heading: i32,
    #[serde(default)]
    pub elevation: i32,
}

fn default_step_cap() -> u32 {
    DEFAULT_STEP_CAP
}

/// One navigation instruction over a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeSpec {
    pub id: String,
    pub scenario: String,
    /// Carried as opaque text.
    pub instruction: String,
    pub start: StartPose,
    pub goal: String,
    pub reference_path: Vec<String>,
    #[serde(default = "default_step_cap")]
    pub step_cap: u32,
}

impl EpisodeSpec {
    /// Checks the episode against a scenario and returns start, goal and
    /// reference path as indices.
    pub fn resolve(&self, s: &Scenario) -> Result<ResolvedEpisode> {
        let mismatch = |m: String| Error::EpisodeMismatch(format!("episode `{}`: {m}", self.id));
        if self.scenario != s.id {
            return Err(mismatch(format!(
                "belongs to scenario `{}`, not `{}`",
                self.scenario, s.id
            )));
        }
        let start = s
            .graph
            .index_of(&self.start.node)
            .ok_or_else(|| mismatch(format!("unknown start `{}`", self.start.node)))?;
        let goal = s
            .graph
            .index_of(&self.goal)
            .ok_or_else(|| mismatch(format!("unknown goal `{}`", self.goal)))?;
        if !is_lattice_heading(self.start.heading) || !is_lattice_elevation(self.start.elevation) {
            return Err(mismatch(
                "start pose is off the heading/elevation lattice".into(),
            ));
        }
        if self.step_cap == 0 {
            return Err(mismatch("step_cap must be positive".into()));
        }
        let reference = s
            .graph
            .resolve_path(&self.reference_path)
            .map_err(|e| mismatch(format!("reference path: {e}")))?;
        if reference.first() != Some(&start) || reference.last() != Some(&goal) {
            return Err(mismatch(
                "reference path must run from start to goal".into(),
            ));
        }
        Ok(ResolvedEpisode {
            start,
            goal,
            reference,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedEpisode {
    pub start: NodeIdx,
    pub goal: NodeIdx,
    pub reference: Vec<NodeIdx>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub node: String,
    pub heading: i32,
    pub elevation: i32,
    pub frame: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavigableEntry {
    pub node: String,
    pub bearing: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanSighting {
    pub human: String,
    pub bearing: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub agent: AgentState,
    pub navigable: Vec<NavigableEntry>,
    pub humans_visible: Vec<HumanSighting>,
    pub collision: bool,
    pub window_frames: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub action: Command,
    pub observation: Observation,
    pub rewards: Rewards,
    pub collision_events: u32,
    pub done: bool,
    pub invalid_action: bool,
    pub events: Vec<CollisionEvent>,
}

/// A running episode. Steps are strictly sequential; distinct episodes are
/// independent and can share one scenario.
#[derive(Clone, Debug)]
pub struct Episode {
    scenario: Arc<Scenario>,
    spec: EpisodeSpec,
    resolved: ResolvedEpisode,
    cfg: SimConfig,
    seed: u64,
    node: NodeIdx,
    heading: i32,
    elevation: i32,
    frame: u32,
    steps: u32,
    done: bool,
    goal_distance: Arc<Vec<f64>>,
    tracker: CollisionTracker,
    initial_events: Vec<CollisionEvent>,
    observation: Observation,
}

impl Episode {
    /// Places the agent at the start pose and observes the first window.
    pub fn reset(
        scenario: Arc<Scenario>,
        spec: EpisodeSpec,
        cfg: SimConfig,
        seed: u64,
    ) -> Result<Self> {
        let resolved = spec.resolve(&scenario)?;
        let goal_distance = Arc::new(scenario.graph.distances_from(resolved.goal));
        let mut ep = Episode {
            tracker: CollisionTracker::new(scenario.humans().len(), cfg.collision_threshold),
            node: resolved.start,
            heading: spec.start.heading,
            elevation: spec.start.elevation,
            frame: 0,
            steps: 0,
            done: false,
            goal_distance,
            initial_events: Vec::new(),
            observation: Observation {
                agent: AgentState {
                    node: String::new(),
                    heading: 0,
                    elevation: 0,
                    frame: 0,
                },
                navigable: Vec::new(),
                humans_visible: Vec::new(),
                collision: false,
                window_frames: 0,
            },
            scenario,
            spec,
            resolved,
            cfg,
            seed,
        };
        let seg = AgentSegment::stationary(ep.position(), 0, cfg.window_frames);
        ep.initial_events = ep.tracker.advance(&seg, ep.scenario.humans());
        ep.frame = seg.end_frame();
        ep.observation = ep.observe(&seg, !ep.initial_events.is_empty());
        Ok(ep)
    }

    pub fn step(&mut self, cmd: &Command) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        let g = &self.scenario.graph;
        let prev_distance = self.goal_distance[self.node];
        let here = self.position();
        let idle = |frame, frames| AgentSegment::stationary(here, frame, frames);
        let rot = self.cfg.rotation_frames;
        let mut invalid = false;
        let mut stopped = false;
        let mut target = None;

        let seg = match cmd {
            Command::Act(Action::Left) => {
                self.heading = normalize_heading(self.heading - HEADING_STEP);
                idle(self.frame, rot)
            }
            Command::Act(Action::Right) => {
                self.heading = normalize_heading(self.heading + HEADING_STEP);
                idle(self.frame, rot)
            }
            Command::Act(Action::Up) | Command::Act(Action::Down) => {
                let delta = if matches!(cmd, Command::Act(Action::Up)) {
                    ELEVATION_STEP
                } else {
                    -ELEVATION_STEP
                };
                let next = self.elevation + delta;
                if (ELEVATION_MIN..=ELEVATION_MAX).contains(&next) {
                    self.elevation = next;
                } else {
                    invalid = true;
                }
                idle(self.frame, rot)
            }
            Command::Act(Action::Forward) => {
                match forward_pick(g, self.node, f64::from(self.heading)) {
                    Some(m) => {
                        target = Some(m);
                        AgentSegment::travel(here, g.position(m), self.frame, self.cfg.speed)
                    }
                    None => {
                        invalid = true;
                        idle(self.frame, rot)
                    }
                }
            }
            Command::MoveTo(id) => {
                let m = g
                    .index_of(id)
                    .ok_or_else(|| Error::MalformedAction(cmd.to_string()))?;
                if self.admissible_targets().contains(&m) {
                    target = Some(m);
                    AgentSegment::travel(here, g.position(m), self.frame, self.cfg.speed)
                } else {
                    invalid = true;
                    idle(self.frame, rot)
                }
            }
            Command::Act(Action::Stop) => {
                stopped = true;
                idle(self.frame, 0)
            }
        };

        let events = self.tracker.advance(&seg, self.scenario.humans());
        if let Some(m) = target {
            self.node = m;
        }
        self.frame = seg.end_frame();
        self.steps += 1;
        self.done = stopped || self.steps >= self.spec.step_cap;

        let collision_events = events.len() as u32;
        let rewards = self.cfg.reward_model().evaluate(
            prev_distance,
            self.goal_distance[self.node],
            stopped,
            collision_events,
        );
        self.observation = self.observe(&seg, collision_events > 0);
        Ok(StepOutcome {
            action: cmd.clone(),
            observation: self.observation.clone(),
            rewards,
            collision_events,
            done: self.done,
            invalid_action: invalid,
            events,
        })
    }

    /// Adjacent viewpoints the agent may move to from its current pose.
    pub fn admissible_targets(&self) -> Vec<NodeIdx> {
        let g = &self.scenario.graph;
        match self.cfg.mode {
            ActionSpace::Egocentric => visible_neighbors(g, self.node, f64::from(self.heading)),
            ActionSpace::Panoramic => g.neighbors(self.node).iter().map(|n| n.node).collect(),
        }
    }

    /// Commands that change the pose or end the episode from here. Moves
    /// are listed as [`Command::MoveTo`] in panoramic mode and as
    /// `forward` in egocentric mode.
    pub fn valid_commands(&self) -> Vec<Command> {
        let mut out = Vec::new();
        match self.cfg.mode {
            ActionSpace::Egocentric => {
                if forward_pick(&self.scenario.graph, self.node, f64::from(self.heading)).is_some()
                {
                    out.push(Command::Act(Action::Forward));
                }
            }
            ActionSpace::Panoramic => {
                for m in self.admissible_targets() {
                    out.push(Command::MoveTo(self.scenario.graph.id(m).to_string()));
                }
            }
        }
        out.push(Command::Act(Action::Left));
        out.push(Command::Act(Action::Right));
        if self.elevation < ELEVATION_MAX {
            out.push(Command::Act(Action::Up));
        }
        if self.elevation > ELEVATION_MIN {
            out.push(Command::Act(Action::Down));
        }
        out.push(Command::Act(Action::Stop));
        out
    }

    fn observe(&self, window: &AgentSegment, collision: bool) -> Observation {
        let g = &self.scenario.graph;
        let heading = f64::from(self.heading);
        let navigable = self
            .admissible_targets()
            .into_iter()
            .map(|m| NavigableEntry {
                node: g.id(m).to_string(),
                bearing: bearing(g.position(self.node), g.position(m)),
                distance: g.edge_weight(self.node, m).expect("neighbor"),
            })
            .collect();

        let mut humans_visible = Vec::new();
        for h in self.scenario.humans() {
            let mut best: Option<HumanSighting> = None;
            for j in 0..window.frames {
                let agent = window.position(j);
                let p = h.position_at(window.start_frame + j);
                let d = agent.distance(p);
                if d >= self.cfg.visibility_range {
                    continue;
                }
                let horizontal = (p - agent).0[..2].iter().map(|c| c * c).sum::<f64>().sqrt();
                let b = if horizontal < 1e-9 {
                    heading
                } else {
                    bearing(agent, p)
                };
                if self.cfg.mode == ActionSpace::Egocentric && !in_fov(wrap_deg(b - heading)) {
                    continue;
                }
                if best.as_ref().is_none_or(|s| d < s.distance) {
                    best = Some(HumanSighting {
                        human: h.id.clone(),
                        bearing: b,
                        distance: d,
                    });
                }
            }
            humans_visible.extend(best);
        }

        Observation {
            agent: self.state(),
            navigable,
            humans_visible,
            collision,
            window_frames: window.frames,
        }
    }

    pub fn state(&self) -> AgentState {
        AgentState {
            node: self.scenario.graph.id(self.node).to_string(),
            heading: self.heading,
            elevation: self.elevation,
            frame: self.frame,
        }
    }

    pub fn observation(&self) -> &Observation {
        &self.observation
    }

    pub fn position(&self) -> Vec3 {
        self.scenario.graph.position(self.node)
    }

    pub fn node(&self) -> NodeIdx {
        self.node
    }

    pub fn heading(&self) -> i32 {
        self.heading
    }

    pub fn elevation(&self) -> i32 {
        self.elevation
    }

    pub fn frame(&self) -> u32 {
        self.frame
    }

    pub fn steps_taken(&self) -> u32 {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn spec(&self) -> &EpisodeSpec {
        &self.spec
    }

    pub fn resolved(&self) -> &ResolvedEpisode {
        &self.resolved
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn goal(&self) -> NodeIdx {
        self.resolved.goal
    }

    /// Geodesic distance to the goal on the full graph, per node.
    pub fn goal_distances(&self) -> &[f64] {
        &self.goal_distance
    }

    /// Zone entries raised while observing the initial window.
    pub fn initial_events(&self) -> &[CollisionEvent] {
        &self.initial_events
    }

    /// Offset of a neighbor's bearing from the current heading.
    pub fn relative_bearing_to(&self, m: NodeIdx) -> f64 {
        relative_bearing(&self.scenario.graph, self.node, m, f64::from(self.heading))
    }
}
