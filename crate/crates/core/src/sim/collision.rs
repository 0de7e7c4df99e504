//! Frame-wise agent/human proximity checks with zone-entry event counting.

use serde::{Deserialize, Serialize};

use crate::geom::Vec3;
use crate::world::human::{HumanInstance, FPS};

pub const DEFAULT_COLLISION_THRESHOLD: f64 = 1.0;

/// The agent's motion over a contiguous run of frames
/// `[start_frame, start_frame + frames)`. At the `j`-th frame the agent has
/// covered `(j + 1) / duration` of the way, so the last frame sits on `to`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentSegment {
    pub from: Vec3,
    pub to: Vec3,
    pub start_frame: u32,
    pub frames: u32,
    duration: f64,
}

impl AgentSegment {
    pub fn stationary(at: Vec3, start_frame: u32, frames: u32) -> Self {
        AgentSegment {
            from: at,
            to: at,
            start_frame,
            frames,
            duration: 0.0,
        }
    }

    /// Straight move at `speed` m/s; takes `ceil(FPS * distance / speed)`
    /// frames, at least one.
    pub fn travel(from: Vec3, to: Vec3, start_frame: u32, speed: f64) -> Self {
        let duration = f64::from(FPS) * from.distance(to) / speed;
        let frames = (duration.ceil() as u32).max(1);
        AgentSegment {
            from,
            to,
            start_frame,
            frames,
            duration,
        }
    }

    pub fn end_frame(&self) -> u32 {
        self.start_frame + self.frames
    }

    /// Agent position at the `j`-th frame of the segment.
    pub fn position(&self, j: u32) -> Vec3 {
        if self.duration <= 0.0 {
            return self.to;
        }
        let t = (f64::from(j + 1) / self.duration).min(1.0);
        self.from.lerp(self.to, t)
    }

    fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = self.from;
        let mut hi = self.from;
        for k in 0..3 {
            lo.0[k] = lo.0[k].min(self.to.0[k]);
            hi.0[k] = hi.0[k].max(self.to.0[k]);
        }
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub frame: u32,
    pub human: String,
    pub agent_position: Vec3,
    pub distance: f64,
}

/// Remembers which humans the agent is currently too close to, so that an
/// event is raised only when a zone is entered.
#[derive(Clone, Debug)]
pub struct CollisionTracker {
    inside: Vec<bool>,
    threshold: f64,
}

impl CollisionTracker {
    pub fn new(humans: usize, threshold: f64) -> Self {
        CollisionTracker {
            inside: vec![false; humans],
            threshold,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn advance(&mut self, seg: &AgentSegment, humans: &[HumanInstance]) -> Vec<CollisionEvent> {
        debug_assert_eq!(humans.len(), self.inside.len());
        let mut events = Vec::new();
        let (alo, ahi) = seg.bounds();
        for (k, h) in humans.iter().enumerate() {
            let (hlo, hhi) = h.bounds();
            if box_gap(alo, ahi, hlo, hhi) >= self.threshold {
                self.inside[k] = false;
                continue;
            }
            for j in 0..seg.frames {
                let frame = seg.start_frame + j;
                let agent = seg.position(j);
                let d = agent.distance(h.position_at(frame));
                let now = d < self.threshold;
                if now && !self.inside[k] {
                    events.push(CollisionEvent {
                        frame,
                        human: h.id.clone(),
                        agent_position: agent,
                        distance: d,
                    });
                }
                self.inside[k] = now;
            }
        }
        events.sort_by_key(|e| e.frame);
        events
    }
}

fn box_gap(alo: Vec3, ahi: Vec3, blo: Vec3, bhi: Vec3) -> f64 {
    let mut acc = 0.0;
    for k in 0..3 {
        let gap = (blo.0[k] - ahi.0[k]).max(alo.0[k] - bhi.0[k]).max(0.0);
        acc += gap * gap;
    }
    acc.sqrt()
}

/// Zone entries over one segment, starting with every human outside; a
/// segment that begins inside a zone counts as an entry.
pub fn detect_collisions(seg: &AgentSegment, humans: &[HumanInstance], threshold: f64) -> u32 {
    CollisionTracker::new(humans.len(), threshold)
        .advance(seg, humans)
        .len() as u32
}
