use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::world::catalog::Region;

/// Frames in one activity cycle.
pub const CYCLE_FRAMES: u32 = 120;
/// Human motion frame rate; also the simulation clock rate.
pub const FPS: u32 = 16;
pub const DEFAULT_FOOTPRINT_RADIUS: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanActivity {
    pub id: String,
    pub description: String,
    pub region: Region,
}

impl HumanActivity {
    pub fn cycle_frames(&self) -> u32 {
        CYCLE_FRAMES
    }

    pub fn fps(&self) -> u32 {
        FPS
    }
}

/// Trajectory-length buckets used for the population statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryClass {
    /// Under 1 m.
    Stationary,
    /// 1 to 5 m.
    Short,
    /// 5 to 15 m.
    Long,
    /// 15 m and beyond.
    VeryLong,
}

impl TrajectoryClass {
    pub const ALL: [TrajectoryClass; 4] = [
        TrajectoryClass::Stationary,
        TrajectoryClass::Short,
        TrajectoryClass::Long,
        TrajectoryClass::VeryLong,
    ];

    pub fn of_length(meters: f64) -> Self {
        if meters < 1.0 {
            TrajectoryClass::Stationary
        } else if meters < 5.0 {
            TrajectoryClass::Short
        } else if meters < 15.0 {
            TrajectoryClass::Long
        } else {
            TrajectoryClass::VeryLong
        }
    }
}

/// A placed human: an activity anchored at a viewpoint, moving along a
/// polyline once per 120-frame cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct HumanInstance {
    pub id: String,
    pub activity: HumanActivity,
    pub anchor: String,
    waypoints: Vec<Vec3>,
    cumulative: Vec<f64>,
    pub footprint_radius: f64,
}

impl HumanInstance {
    pub fn new(
        id: impl Into<String>,
        activity: HumanActivity,
        anchor: impl Into<String>,
        waypoints: Vec<Vec3>,
        footprint_radius: f64,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: &str| Error::InvalidHuman {
            id: id.clone(),
            reason: reason.to_string(),
        };
        if waypoints.is_empty() {
            return Err(invalid("waypoints must not be empty"));
        }
        if waypoints.iter().any(|w| !w.is_finite()) {
            return Err(invalid("waypoints must be finite"));
        }
        if !(footprint_radius > 0.0 && footprint_radius.is_finite()) {
            return Err(invalid("footprint_radius must be positive"));
        }
        let mut cumulative = Vec::with_capacity(waypoints.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in waypoints.windows(2) {
            acc += w[0].distance(w[1]);
            cumulative.push(acc);
        }
        Ok(HumanInstance {
            id,
            activity,
            anchor: anchor.into(),
            waypoints,
            cumulative,
            footprint_radius,
        })
    }

    pub fn waypoints(&self) -> &[Vec3] {
        &self.waypoints
    }

    pub fn trajectory_length(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn class(&self) -> TrajectoryClass {
        TrajectoryClass::of_length(self.trajectory_length())
    }

    pub fn is_stationary(&self) -> bool {
        self.trajectory_length() == 0.0
    }

    /// Position at an absolute frame. The polyline is traversed at uniform
    /// arc-length speed over one cycle, then restarts from the first
    /// waypoint.
    pub fn position_at(&self, frame: u32) -> Vec3 {
        let total = self.trajectory_length();
        if total == 0.0 {
            return self.waypoints[0];
        }
        let s = f64::from(frame % CYCLE_FRAMES) * total / f64::from(CYCLE_FRAMES);
        // last segment whose start is <= s
        let seg = match self.cumulative.partition_point(|&c| c <= s) {
            0 => 0,
            k => (k - 1).min(self.waypoints.len() - 2),
        };
        let len = self.cumulative[seg + 1] - self.cumulative[seg];
        if len == 0.0 {
            return self.waypoints[seg];
        }
        let t = (s - self.cumulative[seg]) / len;
        self.waypoints[seg].lerp(self.waypoints[seg + 1], t)
    }

    /// Axis-aligned bounds of the whole trajectory.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = self.waypoints[0];
        let mut hi = self.waypoints[0];
        for w in &self.waypoints[1..] {
            for k in 0..3 {
                lo.0[k] = lo.0[k].min(w.0[k]);
                hi.0[k] = hi.0[k].max(w.0[k]);
            }
        }
        (lo, hi)
    }
}
