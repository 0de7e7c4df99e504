//! Offline trajectory datasets: random-walk rollouts annotated with
//! returns-to-go, sliced into fixed-length context windows.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::policy::RandomPolicy;
use crate::oracle::Policy;
use crate::sim::action::{ActionSpace, Command};
use crate::sim::episode::{Episode, EpisodeSpec, SimConfig};
use crate::world::generate::derive_seed;
use crate::world::scenario::Scenario;

pub const DATASET_SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub num_trajectories: usize,
    pub max_len: u32,
    /// Context window length K.
    pub context_window: usize,
    /// Stored for consumers; generation does not use it.
    pub initial_rtg: f64,
    pub seed: u64,
    pub mode: ActionSpace,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            num_trajectories: 10_000,
            max_len: 30,
            context_window: 15,
            initial_rtg: 5.0,
            seed: 0,
            mode: ActionSpace::Egocentric,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trajectories == 0 {
            return Err(Error::InvalidParams(
                "num_trajectories must be at least 1".into(),
            ));
        }
        if self.context_window == 0 || self.context_window > self.max_len as usize {
            return Err(Error::InvalidParams(
                "context_window must lie in [1, max_len]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub node: String,
    pub heading: i32,
    pub elevation: i32,
    pub frame: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// State before the action.
    pub state: StateSummary,
    pub action: Command,
    pub reward: f64,
    pub rtg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub index: usize,
    pub episode: String,
    pub scenario: String,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    /// Ended by a stop rather than the step cap.
    pub stopped: bool,
    pub success: bool,
    pub collisions: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub version: u64,
    pub config: DatasetConfig,
}

/// Suffix sums `out[t] = rewards[t] + rewards[t+1] + ...`, accumulated with
/// Neumaier compensation.
pub fn returns_to_go(rewards: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (t, &r) in rewards.iter().enumerate().rev() {
        let next = sum + r;
        if sum.abs() >= r.abs() {
            comp += (sum - next) + r;
        } else {
            comp += (r - next) + sum;
        }
        sum = next;
        out[t] = sum + comp;
    }
    out
}

/// One training view: up to K consecutive steps ending at `end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextWindow {
    pub end: usize,
    pub rtg: Vec<f64>,
    pub states: Vec<StateSummary>,
    pub actions: Vec<Command>,
}

/// Every window of at most `k` steps ending at each timestep.
pub fn slice_contexts(rec: &TrajectoryRecord, k: usize) -> Result<Vec<ContextWindow>> {
    if k == 0 {
        return Err(Error::InvalidParams(
            "context window must be at least 1".into(),
        ));
    }
    Ok((0..rec.steps.len())
        .map(|end| {
            let part = &rec.steps[(end + 1).saturating_sub(k)..=end];
            ContextWindow {
                end,
                rtg: part.iter().map(|s| s.rtg).collect(),
                states: part.iter().map(|s| s.state.clone()).collect(),
                actions: part.iter().map(|s| s.action.clone()).collect(),
            }
        })
        .collect())
}

/// Rolls out the random policy on sampled episodes. Trajectory `i` draws
/// its episode and policy seed from a seed derived from `(cfg.seed, i)`,
/// so the output is independent of thread scheduling.
pub fn gen_random_walks(
    scenarios: &[Arc<Scenario>],
    episodes: &[EpisodeSpec],
    cfg: &DatasetConfig,
) -> Result<Vec<TrajectoryRecord>> {
    cfg.validate()?;
    if scenarios.is_empty() || episodes.is_empty() {
        return Err(Error::EmptyInput("scenario pool"));
    }
    let by_id: HashMap<&str, &Arc<Scenario>> =
        scenarios.iter().map(|s| (s.id.as_str(), s)).collect();
    for e in episodes {
        if !by_id.contains_key(e.scenario.as_str()) {
            return Err(Error::NotFound(format!(
                "scenario `{}` for episode `{}`",
                e.scenario, e.id
            )));
        }
    }
    (0..cfg.num_trajectories)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = &episodes[rng.random_range(0..episodes.len())];
            let mut spec = spec.clone();
            spec.step_cap = cfg.max_len;
            let s = Arc::clone(by_id[spec.scenario.as_str()]);
            walk(i, s, spec, cfg.mode, seed)
        })
        .collect()
}

fn walk(
    index: usize,
    s: Arc<Scenario>,
    spec: EpisodeSpec,
    mode: ActionSpace,
    seed: u64,
) -> Result<TrajectoryRecord> {
    let mut ep = Episode::reset(s, spec, SimConfig::with_mode(mode), seed)?;
    let mut policy = RandomPolicy::new(seed);
    let mut states = Vec::new();
    let mut actions = Vec::new();
    let mut rewards = Vec::new();
    let mut collisions = ep.initial_events().len() as u32;
    let mut stopped = false;
    while !ep.is_done() {
        let before = ep.state();
        let cmd = policy.next_command(&ep)?;
        let o = ep.step(&cmd)?;
        stopped = cmd.is_stop();
        collisions += o.collision_events;
        states.push(StateSummary {
            node: before.node,
            heading: before.heading,
            elevation: before.elevation,
            frame: before.frame,
        });
        actions.push(cmd);
        rewards.push(o.rewards.total());
    }
    let rtg = returns_to_go(&rewards);
    let success = stopped && ep.goal_distances()[ep.node()] <= ep.config().success_radius;
    let steps = states
        .into_iter()
        .zip(actions)
        .zip(rewards.iter().zip(&rtg))
        .map(|((state, action), (&reward, &rtg))| StepRecord {
            state,
            action,
            reward,
            rtg,
        })
        .collect();
    Ok(TrajectoryRecord {
        index,
        episode: ep.spec().id.clone(),
        scenario: ep.spec().scenario.clone(),
        seed,
        steps,
        stopped,
        success,
        collisions,
    })
}

/// Writes the header line followed by one line per trajectory.
pub fn write_dataset<W: Write>(
    mut w: W,
    cfg: &DatasetConfig,
    records: &[TrajectoryRecord],
) -> Result<()> {
    let header = DatasetHeader {
        version: DATASET_SCHEMA_VERSION,
        config: cfg.clone(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rtg_examples() {
        let r = returns_to_go(&[1.0, -0.1, 5.0]);
        assert!((r[0] - 5.9).abs() < 1e-12);
        assert!((r[1] - 4.9).abs() < 1e-12);
        assert_eq!(r[2], 5.0);
        assert!(returns_to_go(&[]).is_empty());
        assert_eq!(returns_to_go(&[-2.1]), vec![-2.1]);
    }

    fn record(len: usize) -> TrajectoryRecord {
        let steps = (0..len)
            .map(|t| StepRecord {
                state: StateSummary {
                    node: format!("n{t}"),
                    heading: 0,
                    elevation: 0,
                    frame: t as u32,
                },
                action: Command::Act(crate::sim::Action::Left),
                reward: -0.1,
                rtg: t as f64,
            })
            .collect();
        TrajectoryRecord {
            index: 0,
            episode: "e".into(),
            scenario: "s".into(),
            seed: 0,
            steps,
            stopped: false,
            success: false,
            collisions: 0,
        }
    }

    #[test]
    fn short_records_give_growing_windows() {
        let w = slice_contexts(&record(3), 15).unwrap();
        assert_eq!(
            w.iter().map(|w| w.states.len()).collect::<Vec<_>>(),
            [1, 2, 3]
        );
    }

    #[test]
    fn long_records_cap_at_k() {
        let rec = record(20);
        let w = slice_contexts(&rec, 15).unwrap();
        assert_eq!(w.len(), 20);
        for win in &w[14..] {
            assert_eq!(win.states.len(), 15);
        }
        assert_eq!(w[19].states[0].node, "n5");
        assert!(slice_contexts(&rec, 0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(DatasetConfig::default().validate().is_ok());
        let bad = DatasetConfig {
            context_window: 31,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let empty = DatasetConfig {
            num_trajectories: 0,
            ..Default::default()
        };
        assert!(empty.validate().is_err());
    }
}
