//! wasm-bindgen bindings for the browser demo. Every export takes and
//! returns plain numbers and JSON strings, so the same code runs natively
//! under `cargo test`.

use std::collections::BTreeSet;
use std::sync::Arc;

use humannav::harness::{generate_episodes, PolicyRef, SuiteConfig};
use humannav::oracle::{plan_path, PlannerConfig};
use humannav::sim::{rollout, ActionSpace, Episode, EpisodeSpec, SimConfig};
use humannav::world::{
    classify_viewpoints, generate_scenario, occupied_nodes, ClassifyConfig, GenerationConfig,
    Scenario, ViewpointClass,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct NodeView<'a> {
    id: &'a str,
    x: f64,
    y: f64,
    z: f64,
    region: String,
}

#[derive(Serialize)]
struct EpisodeView<'a> {
    id: &'a str,
    start: &'a str,
    goal: &'a str,
}

#[derive(Serialize)]
struct SceneView<'a> {
    id: &'a str,
    nodes: Vec<NodeView<'a>>,
    edges: Vec<(&'a str, &'a str)>,
    humans: Vec<&'a str>,
    episodes: Vec<EpisodeView<'a>>,
}

#[derive(Serialize)]
struct HumanView<'a> {
    id: &'a str,
    x: f64,
    y: f64,
    radius: f64,
}

#[derive(Serialize)]
struct FrameView<'a> {
    frame: u32,
    humans: Vec<HumanView<'a>>,
    occupied: Vec<String>,
}

#[derive(Serialize)]
struct PlanView {
    path: Vec<String>,
    cost: f64,
    reached_goal: bool,
}

#[derive(Serialize)]
struct Comparison {
    frame: u32,
    excluded: Vec<String>,
    unaware: PlanView,
    aware: PlanView,
}

#[derive(Serialize)]
struct StepView {
    node: String,
    frame: u32,
    action: String,
    reward: f64,
    collisions: u32,
}

#[derive(Serialize)]
struct RunView {
    policy: String,
    mode: String,
    start: String,
    start_frame: u32,
    steps: Vec<StepView>,
    total_reward: f64,
    collisions: u32,
    goal_distance: f64,
}

fn js(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("views always serialize")
}

/// One generated building with its episodes.
#[wasm_bindgen]
pub struct Demo {
    scenario: Arc<Scenario>,
    episodes: Vec<EpisodeSpec>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> Result<Demo, String> {
        let s = Arc::new(generate_scenario(seed as u64, &GenerationConfig::default()).map_err(js)?);
        let cfg = SuiteConfig {
            episodes_per_scenario: 8,
            ..Default::default()
        };
        let episodes =
            generate_episodes(std::slice::from_ref(&s), seed as u64, &cfg).map_err(js)?;
        Ok(Demo {
            scenario: s,
            episodes,
        })
    }

    /// Nodes, edges, human ids and episodes.
    pub fn scene(&self) -> String {
        let s = &self.scenario;
        let g = &s.graph;
        to_json(&SceneView {
            id: &s.id,
            nodes: g
                .nodes()
                .iter()
                .map(|v| NodeView {
                    id: &v.id,
                    x: v.position.x(),
                    y: v.position.y(),
                    z: v.position.z(),
                    region: to_json(&v.region).trim_matches('"').to_string(),
                })
                .collect(),
            edges: g.edges().iter().map(|&(a, b)| (g.id(a), g.id(b))).collect(),
            humans: s.humans().iter().map(|h| h.id.as_str()).collect(),
            episodes: self
                .episodes
                .iter()
                .map(|e| EpisodeView {
                    id: &e.id,
                    start: &e.start.node,
                    goal: &e.goal,
                })
                .collect(),
        })
    }

    /// Human positions and occupied viewpoints at `frame`.
    pub fn frame(&self, frame: u32, r: f64) -> Result<String, String> {
        if !r.is_finite() || r <= 0.0 {
            return Err("radius must be positive".into());
        }
        let s = &self.scenario;
        Ok(to_json(&FrameView {
            frame,
            humans: s
                .humans()
                .iter()
                .map(|h| {
                    let p = h.position_at(frame);
                    HumanView {
                        id: &h.id,
                        x: p.x(),
                        y: p.y(),
                        radius: h.footprint_radius,
                    }
                })
                .collect(),
            occupied: occupied_nodes(s, frame, r).nodes.into_iter().collect(),
        }))
    }

    /// Impact class per viewpoint over the whole cycle.
    pub fn classes(&self) -> String {
        let c: std::collections::BTreeMap<String, ViewpointClass> =
            classify_viewpoints(&self.scenario, &ClassifyConfig::default());
        to_json(&c)
    }

    /// Shortest path ignoring humans against the path that avoids the
    /// viewpoints occupied at `frame`.
    pub fn compare_plans(&self, start: &str, goal: &str, frame: u32) -> Result<String, String> {
        let s = &self.scenario;
        let excluded: BTreeSet<String> =
            occupied_nodes(s, frame, PlannerConfig::default().occupancy_radius)
                .nodes
                .into_iter()
                .filter(|n| n != start)
                .collect();
        let view = |excl: &BTreeSet<String>| -> Result<PlanView, String> {
            let r = plan_path(&s.graph, start, goal, excl).map_err(js)?;
            Ok(match (r.path, r.fallback) {
                (Some(path), _) => PlanView {
                    path,
                    cost: r.cost,
                    reached_goal: true,
                },
                (None, Some(f)) => PlanView {
                    path: f.path,
                    cost: f.cost,
                    reached_goal: false,
                },
                (None, None) => PlanView {
                    path: vec![start.to_string()],
                    cost: 0.0,
                    reached_goal: false,
                },
            })
        };
        Ok(to_json(&Comparison {
            frame,
            unaware: view(&BTreeSet::new())?,
            aware: view(&excluded)?,
            excluded: excluded.into_iter().collect(),
        }))
    }

    /// Runs episode `index` under a scripted policy.
    pub fn run_episode(
        &self,
        index: usize,
        policy: &str,
        mode: &str,
        seed: u32,
    ) -> Result<String, String> {
        let spec = self
            .episodes
            .get(index)
            .ok_or_else(|| format!("no episode {index}"))?
            .clone();
        let p: PolicyRef = policy.parse().map_err(js)?;
        let m: ActionSpace = mode.parse().map_err(js)?;
        let mut agent = p.build(seed as u64, PlannerConfig::default()).map_err(js)?;
        let ep = Episode::reset(
            self.scenario.clone(),
            spec,
            SimConfig::with_mode(m),
            seed as u64,
        )
        .map_err(js)?;
        agent.begin(&ep);
        let start = ep.state();
        let goal_distances = ep.goal_distances().to_vec();
        let (log, outcomes) = rollout(ep, |e| agent.next_command(e)).map_err(js)?;
        let steps: Vec<StepView> = outcomes
            .iter()
            .map(|o| StepView {
                node: o.observation.agent.node.clone(),
                frame: o.observation.agent.frame,
                action: o.action.to_string(),
                reward: o.rewards.total(),
                collisions: o.collision_events,
            })
            .collect();
        let last = steps
            .last()
            .map_or(start.node.as_str(), |s| s.node.as_str());
        let goal_distance = goal_distances[self
            .scenario
            .graph
            .require(last, "final node")
            .map_err(js)?];
        Ok(to_json(&RunView {
            policy: p.to_string(),
            mode: m.to_string(),
            start: start.node.clone(),
            start_frame: start.frame,
            total_reward: steps.iter().map(|s| s.reward).sum(),
            collisions: log.total_collisions(),
            steps,
            goal_distance,
        }))
    }
}
