//! Scripted baselines and the policy registry.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{OptimalExpert, PlannerConfig, Policy, SubOptimalExpert};
use crate::sim::action::{Action, ActionSpace, Command};
use crate::sim::episode::Episode;
use crate::sim::nav::forward_pick;

/// Steps during which the random policy never stops.
pub const RANDOM_MIN_STEPS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyRef {
    OracleSuboptimal,
    OracleOptimal,
    Random,
    Greedy,
    /// Driven through the session protocol.
    External,
}

impl PolicyRef {
    pub const SCRIPTED: [PolicyRef; 4] = [
        PolicyRef::OracleSuboptimal,
        PolicyRef::OracleOptimal,
        PolicyRef::Random,
        PolicyRef::Greedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyRef::OracleSuboptimal => "oracle-suboptimal",
            PolicyRef::OracleOptimal => "oracle-optimal",
            PolicyRef::Random => "random",
            PolicyRef::Greedy => "greedy",
            PolicyRef::External => "external",
        }
    }

    /// Instantiates a scripted policy; external agents have no local
    /// implementation.
    pub fn build(self, seed: u64, planner: PlannerConfig) -> Result<Box<dyn Policy>> {
        Ok(match self {
            PolicyRef::OracleSuboptimal => Box::new(SubOptimalExpert::new(planner)),
            PolicyRef::OracleOptimal => Box::new(OptimalExpert::new()),
            PolicyRef::Random => Box::new(RandomPolicy::new(seed)),
            PolicyRef::Greedy => Box::new(GreedyPolicy),
            PolicyRef::External => {
                return Err(Error::InvalidParams(
                    "external policies attach through the session protocol".into(),
                ))
            }
        })
    }
}

impl fmt::Display for PolicyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyRef {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [PolicyRef::External]
            .into_iter()
            .chain(PolicyRef::SCRIPTED)
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown policy `{s}`")))
    }
}

/// Uniform over the currently valid commands; never stops during the first
/// [`RANDOM_MIN_STEPS`] steps.
#[derive(Clone, Debug)]
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn next_command(&mut self, ep: &Episode) -> Result<Command> {
        let mut options = ep.valid_commands();
        if ep.steps_taken() < RANDOM_MIN_STEPS {
            options.retain(|c| !c.is_stop());
        }
        Ok(options
            .choose(&mut self.rng)
            .cloned()
            .unwrap_or(Command::Act(Action::Stop)))
    }
}

/// Moves to whichever admissible viewpoint is geodesically closest to the
/// goal (ties: smaller id) and stops inside the success radius. In the
/// egocentric space it walks forward while that helps and turns right
/// otherwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyPolicy;

impl Policy for GreedyPolicy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn next_command(&mut self, ep: &Episode) -> Result<Command> {
        let dist = ep.goal_distances();
        let here = dist[ep.node()];
        if here <= ep.config().success_radius {
            return Ok(Command::Act(Action::Stop));
        }
        let g = &ep.scenario().graph;
        Ok(match ep.config().mode {
            ActionSpace::Panoramic => ep
                .admissible_targets()
                .into_iter()
                .filter(|&m| dist[m] < here)
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)))
                .map(|m| Command::MoveTo(g.id(m).to_string()))
                .unwrap_or(Command::Act(Action::Stop)),
            ActionSpace::Egocentric => match forward_pick(g, ep.node(), f64::from(ep.heading())) {
                Some(m) if dist[m] < here => Command::Act(Action::Forward),
                _ => Command::Act(Action::Right),
            },
        })
    }
}
