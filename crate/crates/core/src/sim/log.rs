//! JSON-lines trajectory logs and replay.

use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::action::{ActionSpace, Command};
use crate::sim::episode::{Episode, EpisodeSpec, SimConfig, StepOutcome};
use crate::sim::rewards::Rewards;
use crate::world::scenario::Scenario;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub episode: String,
    pub scenario: String,
    pub mode: ActionSpace,
    pub seed: u64,
    /// Zone entries raised by the initial observation window.
    pub initial_collisions: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRecord {
    pub t_frame: u32,
    pub node: String,
    pub heading: i32,
    pub elevation: i32,
    pub action: Command,
    pub rewards: Rewards,
    pub collisions: u32,
    pub invalid: bool,
    pub done: bool,
}

impl LogRecord {
    pub fn from_outcome(o: &StepOutcome) -> Self {
        let a = &o.observation.agent;
        LogRecord {
            t_frame: a.frame,
            node: a.node.clone(),
            heading: a.heading,
            elevation: a.elevation,
            action: o.action.clone(),
            rewards: o.rewards,
            collisions: o.collision_events,
            invalid: o.invalid_action,
            done: o.done,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub records: Vec<LogRecord>,
}

impl TrajectoryLog {
    pub fn new(ep: &Episode) -> Self {
        TrajectoryLog {
            header: LogHeader {
                episode: ep.spec().id.clone(),
                scenario: ep.spec().scenario.clone(),
                mode: ep.config().mode,
                seed: ep.seed(),
                initial_collisions: ep.initial_events().len() as u32,
            },
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, o: &StepOutcome) {
        self.records.push(LogRecord::from_outcome(o));
    }

    pub fn is_complete(&self) -> bool {
        self.records.last().is_some_and(|r| r.done)
    }

    pub fn actions(&self) -> impl Iterator<Item = &Command> {
        self.records.iter().map(|r| &r.action)
    }

    /// Collision events including the initial window.
    pub fn total_collisions(&self) -> u32 {
        self.header.initial_collisions + self.records.iter().map(|r| r.collisions).sum::<u32>()
    }

    pub fn final_node(&self) -> Option<&str> {
        self.records.last().map(|r| r.node.as_str())
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_jsonl(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = loop {
            match lines.next() {
                None => return Err(Error::EmptyInput("trajectory log")),
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break serde_json::from_str(&line)?;
                    }
                }
            }
        };
        let mut records = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        Ok(TrajectoryLog { header, records })
    }
}

/// Runs `pick` until the episode ends, recording every step.
pub fn rollout<F>(mut ep: Episode, mut pick: F) -> Result<(TrajectoryLog, Vec<StepOutcome>)>
where
    F: FnMut(&Episode) -> Result<Command>,
{
    let mut log = TrajectoryLog::new(&ep);
    let mut outcomes = Vec::new();
    while !ep.is_done() {
        let cmd = pick(&ep)?;
        let o = ep.step(&cmd)?;
        log.push(&o);
        outcomes.push(o);
    }
    Ok((log, outcomes))
}

/// Re-executes a log's actions and checks every recorded field against
/// the engine. Returns the fresh outcomes on success.
pub fn replay(
    log: &TrajectoryLog,
    scenario: Arc<Scenario>,
    spec: &EpisodeSpec,
    cfg: SimConfig,
) -> Result<(Episode, Vec<StepOutcome>)> {
    if log.header.episode != spec.id || log.header.scenario != scenario.id {
        return Err(Error::LogMismatch(format!(
            "log is for episode `{}` in `{}`",
            log.header.episode, log.header.scenario
        )));
    }
    if log.header.mode != cfg.mode {
        return Err(Error::LogMismatch(format!(
            "log mode is {}",
            log.header.mode
        )));
    }
    let mut ep = Episode::reset(scenario, spec.clone(), cfg, log.header.seed)?;
    if ep.initial_events().len() as u32 != log.header.initial_collisions {
        return Err(Error::LogMismatch("initial collisions differ".into()));
    }
    let mut outcomes = Vec::with_capacity(log.records.len());
    for (i, rec) in log.records.iter().enumerate() {
        let o = ep.step(&rec.action)?;
        let fresh = LogRecord::from_outcome(&o);
        if !records_identical(&fresh, rec) {
            return Err(Error::LogMismatch(format!(
                "step {i} diverges from the log"
            )));
        }
        outcomes.push(o);
    }
    Ok((ep, outcomes))
}

fn records_identical(a: &LogRecord, b: &LogRecord) -> bool {
    let bits = |r: &Rewards| [r.target.to_bits(), r.distance.to_bits(), r.human.to_bits()];
    a.t_frame == b.t_frame
        && a.node == b.node
        && a.heading == b.heading
        && a.elevation == b.elevation
        && a.action == b.action
        && bits(&a.rewards) == bits(&b.rewards)
        && a.collisions == b.collisions
        && a.invalid == b.invalid
        && a.done == b.done
}
