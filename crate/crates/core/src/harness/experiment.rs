//! Runs a policy over an episode suite and aggregates the metrics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::policy::PolicyRef;
use crate::metrics::{
    aggregate, counters_from_events, EpisodeCounters, MetricsConfig, MetricsReport, TableRow,
};
use crate::oracle::PlannerConfig;
use crate::sim::action::ActionSpace;
use crate::sim::episode::{Episode, EpisodeSpec, SimConfig};
use crate::sim::log::{rollout, TrajectoryLog};
use crate::world::generate::derive_seed;
use crate::world::scenario::{Scenario, Split};

/// Static runs strip every human from the scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    Static,
    Dynamic,
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Environment::Static => "static",
            Environment::Dynamic => "dynamic",
        })
    }
}

impl FromStr for Environment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Environment::Static),
            "dynamic" => Ok(Environment::Dynamic),
            other => Err(Error::InvalidParams(format!(
                "unknown environment `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub policy: PolicyRef,
    pub mode: ActionSpace,
    pub env: Environment,
    pub seed: u64,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
}

impl ExperimentSpec {
    pub fn new(policy: PolicyRef, mode: ActionSpace, env: Environment, seed: u64) -> Self {
        ExperimentSpec {
            policy,
            mode,
            env,
            seed,
            planner: PlannerConfig::default(),
            metrics: MetricsConfig::default(),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            success_radius: self.metrics.success_radius,
            ..SimConfig::with_mode(self.mode)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode: String,
    pub scenario: String,
    pub split: Option<Split>,
    pub steps: u32,
    pub counters: Option<EpisodeCounters>,
    pub error: Option<String>,
    #[serde(skip)]
    pub log: Option<TrajectoryLog>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub policy: PolicyRef,
    pub mode: ActionSpace,
    pub env: Environment,
    pub seed: u64,
    /// Over every episode that ran without error.
    pub metrics: Option<MetricsReport>,
    /// One row for all splits together and one per split present.
    pub rows: Vec<TableRow>,
    pub episodes: Vec<EpisodeRow>,
}

impl ExperimentReport {
    pub fn counters(&self) -> Vec<EpisodeCounters> {
        self.episodes.iter().filter_map(|e| e.counters).collect()
    }

    pub fn errors(&self) -> usize {
        self.episodes.iter().filter(|e| e.error.is_some()).count()
    }
}

/// Executes every episode under the spec's policy. Episodes run in
/// parallel with per-episode seeds and results keep the input order.
/// Failures become error rows.
pub fn run_experiment(
    spec: &ExperimentSpec,
    scenarios: &[Arc<Scenario>],
    episodes: &[EpisodeSpec],
) -> Result<ExperimentReport> {
    spec.planner.validate()?;
    if spec.policy == PolicyRef::External {
        return Err(Error::InvalidParams(
            "external policies cannot be run by the harness".into(),
        ));
    }
    let prepared: Vec<Arc<Scenario>> = scenarios
        .iter()
        .map(|s| match spec.env {
            Environment::Static => Arc::new(s.without_humans()),
            Environment::Dynamic => s.clone(),
        })
        .collect();
    let by_id: BTreeMap<&str, &Arc<Scenario>> =
        prepared.iter().map(|s| (s.id.as_str(), s)).collect();
    let rows: Vec<EpisodeRow> = episodes
        .par_iter()
        .enumerate()
        .map(|(i, e)| run_one(spec, &by_id, e, derive_seed(spec.seed, i as u64)))
        .collect();

    let counters: Vec<EpisodeCounters> = rows.iter().filter_map(|r| r.counters).collect();
    let metrics = if counters.is_empty() {
        None
    } else {
        Some(aggregate(&counters, spec.metrics.success_radius)?)
    };
    let mut table = Vec::new();
    if let Some(m) = metrics {
        table.push(row(spec, "all", m));
    }
    for split in [Split::Seen, Split::Unseen] {
        let part: Vec<EpisodeCounters> = rows
            .iter()
            .filter(|r| r.split == Some(split))
            .filter_map(|r| r.counters)
            .collect();
        if !part.is_empty() {
            let name = match split {
                Split::Seen => "seen",
                Split::Unseen => "unseen",
            };
            table.push(row(
                spec,
                name,
                aggregate(&part, spec.metrics.success_radius)?,
            ));
        }
    }
    Ok(ExperimentReport {
        policy: spec.policy,
        mode: spec.mode,
        env: spec.env,
        seed: spec.seed,
        metrics,
        rows: table,
        episodes: rows,
    })
}

fn row(spec: &ExperimentSpec, split: &str, metrics: MetricsReport) -> TableRow {
    TableRow {
        agent: spec.policy.to_string(),
        split: split.to_string(),
        mode: format!("{}/{}", spec.mode, spec.env),
        metrics,
    }
}

fn run_one(
    spec: &ExperimentSpec,
    scenarios: &BTreeMap<&str, &Arc<Scenario>>,
    e: &EpisodeSpec,
    seed: u64,
) -> EpisodeRow {
    let mut out = EpisodeRow {
        episode: e.id.clone(),
        scenario: e.scenario.clone(),
        split: None,
        steps: 0,
        counters: None,
        error: None,
        log: None,
    };
    let Some(s) = scenarios.get(e.scenario.as_str()) else {
        out.error = Some(format!("unknown scenario `{}`", e.scenario));
        return out;
    };
    out.split = Some(s.meta.split);
    match execute(spec, Arc::clone(s), e, seed) {
        Ok((counters, log)) => {
            out.steps = log.records.len() as u32;
            out.counters = Some(counters);
            out.log = Some(log);
        }
        Err(err) => out.error = Some(err.to_string()),
    }
    out
}

fn execute(
    spec: &ExperimentSpec,
    s: Arc<Scenario>,
    e: &EpisodeSpec,
    seed: u64,
) -> Result<(EpisodeCounters, TrajectoryLog)> {
    let mut policy = spec.policy.build(seed, spec.planner)?;
    let ep = Episode::reset(s.clone(), e.clone(), spec.sim_config(), seed)?;
    policy.begin(&ep);
    let reference = ep.resolved().reference.clone();
    let initial = ep.initial_events().to_vec();
    let goal_distances = ep.goal_distances().to_vec();
    let (log, outcomes) = rollout(ep, |ep| policy.next_command(ep))?;
    let last = outcomes.last().map(|o| o.observation.agent.node.clone());
    let final_node = match last {
        Some(id) => s.graph.require(&id, "final node")?,
        None => reference[0],
    };
    let events = initial
        .iter()
        .chain(outcomes.iter().flat_map(|o| o.events.iter()));
    let counters = counters_from_events(
        &s,
        &reference,
        goal_distances[final_node],
        events,
        &spec.metrics,
    );
    Ok((counters, log))
}
