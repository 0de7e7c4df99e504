//! Per-episode counters and aggregate human-aware metrics, with and
//! without the critical-node correction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::collision::CollisionEvent;
use crate::sim::episode::{EpisodeSpec, SimConfig};
use crate::sim::log::{replay, TrajectoryLog};
use crate::sim::rewards::DEFAULT_SUCCESS_RADIUS;
use crate::world::classify::{classify_indices, ClassifyConfig};
use crate::world::critical::critical_indices;
use crate::world::graph::NodeIdx;
use crate::world::occupancy::{human_positions, DEFAULT_OCCUPANCY_RADIUS};
use crate::world::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeCounters {
    /// Collision events.
    pub c: u32,
    /// Events attributed to activity at critical reference-path nodes.
    pub a_crit: u32,
    /// Geodesic distance from the final viewpoint to the goal, meters.
    pub d: f64,
    /// Whether human activity touches the reference path.
    pub affected: bool,
}

impl EpisodeCounters {
    pub fn corrected(&self) -> u32 {
        self.c - self.a_crit
    }
}

/// Settings shared by counter extraction and aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub occupancy_radius: f64,
    pub visibility_range: f64,
    pub success_radius: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            occupancy_radius: DEFAULT_OCCUPANCY_RADIUS,
            visibility_range: crate::world::classify::DEFAULT_VISIBILITY_RANGE,
            success_radius: DEFAULT_SUCCESS_RADIUS,
        }
    }
}

/// Counters from the events of a finished episode.
pub fn counters_from_events<'a>(
    s: &Scenario,
    reference: &[NodeIdx],
    goal_distance: f64,
    events: impl IntoIterator<Item = &'a CollisionEvent>,
    cfg: &MetricsConfig,
) -> EpisodeCounters {
    let g = &s.graph;
    let critical = critical_indices(g, reference);
    let r = cfg.occupancy_radius;
    let mut c = 0;
    let mut a_crit = 0;
    for e in events {
        c += 1;
        let humans = human_positions(s, e.frame);
        let attributable = critical.iter().any(|&n| {
            let p = g.position(n);
            p.distance(e.agent_position) < r && humans.iter().any(|h| h.distance(p) < r)
        });
        if attributable {
            a_crit += 1;
        }
    }
    let classes = classify_indices(
        s,
        &ClassifyConfig {
            visibility_range: cfg.visibility_range,
            occupancy_radius: r,
        },
    );
    EpisodeCounters {
        c,
        a_crit,
        d: goal_distance,
        affected: reference.iter().any(|&n| classes[n].is_affected()),
    }
}

/// Recomputes counters from a complete log by replaying it.
pub fn episode_counters(
    log: &TrajectoryLog,
    spec: &EpisodeSpec,
    s: Arc<Scenario>,
    sim: SimConfig,
    cfg: &MetricsConfig,
) -> Result<EpisodeCounters> {
    if !log.is_complete() {
        return Err(Error::IncompleteLog);
    }
    let (ep, outcomes) = replay(log, s.clone(), spec, sim)?;
    let events = ep
        .initial_events()
        .iter()
        .chain(outcomes.iter().flat_map(|o| o.events.iter()));
    let d = ep.goal_distances()[ep.node()];
    Ok(counters_from_events(
        &s,
        &ep.resolved().reference,
        d,
        events,
        cfg,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(rename = "TCR")]
    pub tcr: f64,
    #[serde(rename = "CR")]
    pub cr: f64,
    #[serde(rename = "NE")]
    pub ne: f64,
    #[serde(rename = "SR")]
    pub sr: f64,
    #[serde(rename = "TCR_raw")]
    pub tcr_raw: f64,
    #[serde(rename = "CR_raw")]
    pub cr_raw: f64,
    #[serde(rename = "NE_raw")]
    pub ne_raw: f64,
    #[serde(rename = "SR_raw")]
    pub sr_raw: f64,
    #[serde(rename = "SR_goal")]
    pub sr_goal: f64,
    pub beta: f64,
    #[serde(rename = "L")]
    pub l: usize,
}

/// Aggregates per-episode counters. The collision rate is normalized by
/// the affected share `beta`; with `beta = 0` it is 0 when there are no
/// collisions and undefined otherwise.
pub fn aggregate(counters: &[EpisodeCounters], success_radius: f64) -> Result<MetricsReport> {
    if counters.is_empty() {
        return Err(Error::EmptyInput("episode counters"));
    }
    let l = counters.len();
    let lf = l as f64;
    let mut sum_c = 0u64;
    let mut sum_corr = 0u64;
    let mut hit = 0u64;
    let mut hit_raw = 0u64;
    let mut sum_d = 0.0;
    let mut ok = 0u64;
    let mut ok_raw = 0u64;
    let mut ok_goal = 0u64;
    let mut affected = 0u64;
    for k in counters {
        let corr = k.corrected();
        let near = k.d <= success_radius;
        sum_c += u64::from(k.c);
        sum_corr += u64::from(corr);
        hit += u64::from(corr.min(1));
        hit_raw += u64::from(k.c.min(1));
        sum_d += k.d;
        ok += u64::from(corr == 0 && near);
        ok_raw += u64::from(k.c == 0 && near);
        ok_goal += u64::from(near);
        affected += u64::from(k.affected);
    }
    let beta = affected as f64 / lf;
    let rate = |hits: u64| -> Result<f64> {
        if affected > 0 {
            Ok(hits as f64 / (beta * lf))
        } else if hits == 0 {
            Ok(0.0)
        } else {
            Err(Error::UndefinedCollisionRate(hits as usize))
        }
    };
    let ne = sum_d / lf;
    Ok(MetricsReport {
        tcr: sum_corr as f64 / lf,
        cr: rate(hit)?,
        ne,
        sr: ok as f64 / lf,
        tcr_raw: sum_c as f64 / lf,
        cr_raw: rate(hit_raw)?,
        ne_raw: ne,
        sr_raw: ok_raw as f64 / lf,
        sr_goal: ok_goal as f64 / lf,
        beta,
        l,
    })
}

pub const CSV_HEADER: &str = "agent,split,mode,NE,TCR,CR,SR,SR_raw,SR_goal,beta,L";

/// One table row: an agent under one split and action space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub agent: String,
    pub split: String,
    pub mode: String,
    pub metrics: MetricsReport,
}

impl TableRow {
    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
            self.agent,
            self.split,
            self.mode,
            m.ne,
            m.tcr,
            m.cr,
            m.sr,
            m.sr_raw,
            m.sr_goal,
            m.beta,
            m.l
        )
    }
}

pub fn to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
