//! Episode suites sampled over generated buildings.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{astar, MoveFilter, OptimalExpert, Policy};
use crate::sim::action::{lattice_headings, ActionSpace};
use crate::sim::episode::{Episode, EpisodeSpec, SimConfig, StartPose, DEFAULT_STEP_CAP};
use crate::world::classify::{classify_indices, ClassifyConfig, ViewpointClass};
use crate::world::generate::derive_seed;
use crate::world::graph::NodeIdx;
use crate::world::scenario::Scenario;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub episodes_per_scenario: usize,
    /// Bounds on the reference path length, meters.
    pub min_path_length: f64,
    pub max_path_length: f64,
    pub step_cap: u32,
    /// Share of episodes whose reference path must cross an occupied
    /// viewpoint. `None` leaves crossing to chance.
    pub crossing_fraction: Option<f64>,
    /// Sampling attempts per episode before giving up on a scenario.
    pub max_attempts: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            episodes_per_scenario: 10,
            min_path_length: 5.0,
            max_path_length: 14.0,
            step_cap: DEFAULT_STEP_CAP,
            crossing_fraction: None,
            max_attempts: 400,
        }
    }
}

/// Whether the path touches a viewpoint that some human occupies during
/// the cycle.
pub fn crosses_humans(classes: &[ViewpointClass], path: &[NodeIdx]) -> bool {
    path.iter().any(|&n| classes[n] == ViewpointClass::Occupied)
}

/// Samples episodes per scenario. Reference paths are shortest routes an
/// egocentric agent can follow, and every episode is checked to be
/// completed by the optimal expert within the step cap in the egocentric
/// action space (and therefore in the panoramic one).
pub fn generate_episodes(
    scenarios: &[Arc<Scenario>],
    seed: u64,
    cfg: &SuiteConfig,
) -> Result<Vec<EpisodeSpec>> {
    if !(cfg.min_path_length <= cfg.max_path_length) {
        return Err(Error::InvalidParams(
            "min_path_length exceeds max_path_length".into(),
        ));
    }
    if cfg
        .crossing_fraction
        .is_some_and(|p| !(0.0..=1.0).contains(&p))
    {
        return Err(Error::InvalidParams(
            "crossing_fraction must lie in [0, 1]".into(),
        ));
    }
    let mut out = Vec::new();
    for (i, s) in scenarios.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
        let g = &s.graph;
        if g.len() < 2 {
            continue;
        }
        let filter = MoveFilter::new(g, ActionSpace::Egocentric);
        let classes = classify_indices(s, &ClassifyConfig::default());
        let headings: Vec<i32> = lattice_headings().collect();
        let n = cfg.episodes_per_scenario;
        for k in 0..n {
            let must_cross = cfg
                .crossing_fraction
                .is_some_and(|p| (k as f64 + 0.5) / n as f64 <= p);
            let mut made = false;
            for _ in 0..cfg.max_attempts {
                let start = rng.random_range(0..g.len());
                let goal = rng.random_range(0..g.len());
                let heading = headings[rng.random_range(0..headings.len())];
                if start == goal {
                    continue;
                }
                let blocked = vec![false; g.len()];
                let found = astar(g, start, goal, &blocked, |a, b| filter.allows(a, b));
                let Some(path) = found.path else { continue };
                if found.cost < cfg.min_path_length || found.cost > cfg.max_path_length {
                    continue;
                }
                if must_cross && !crosses_humans(&classes, &path) {
                    continue;
                }
                let spec = EpisodeSpec {
                    id: format!("{}-e{k:02}", s.id),
                    scenario: s.id.clone(),
                    instruction: format!(
                        "Walk from the {} to the {}.",
                        g.node(start).region.display_name(),
                        g.node(goal).region.display_name()
                    ),
                    start: StartPose {
                        node: g.id(start).to_string(),
                        heading,
                        elevation: 0,
                    },
                    goal: g.id(goal).to_string(),
                    reference_path: path.iter().map(|&p| g.id(p).to_string()).collect(),
                    step_cap: cfg.step_cap,
                };
                if optimal_completes(s, &spec)? {
                    out.push(spec);
                    made = true;
                    break;
                }
            }
            if !made {
                break;
            }
        }
    }
    Ok(out)
}

/// Runs the optimal expert egocentrically and reports whether it stops on
/// the goal before the step cap.
pub fn optimal_completes(s: &Arc<Scenario>, spec: &EpisodeSpec) -> Result<bool> {
    let static_scene = Arc::new(s.without_humans());
    let mut ep = Episode::reset(
        static_scene,
        spec.clone(),
        SimConfig::with_mode(ActionSpace::Egocentric),
        0,
    )?;
    let mut expert = OptimalExpert::new();
    expert.begin(&ep);
    while !ep.is_done() {
        let cmd = expert.next_command(&ep)?;
        let o = ep.step(&cmd)?;
        if o.done {
            return Ok(cmd.is_stop() && ep.node() == ep.goal());
        }
    }
    Ok(false)
}
