use serde::{Deserialize, Serialize};

pub const TARGET_SUCCESS_REWARD: f64 = 5.0;
pub const TARGET_FAILURE_REWARD: f64 = -5.0;
pub const PROGRESS_REWARD: f64 = 1.0;
pub const NO_PROGRESS_PENALTY: f64 = -0.1;
pub const COLLISION_PENALTY: f64 = -2.0;
pub const DEFAULT_SUCCESS_RADIUS: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rewards {
    pub target: f64,
    pub distance: f64,
    pub human: f64,
}

impl Rewards {
    pub fn total(&self) -> f64 {
        self.target + self.distance + self.human
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardModel {
    pub success_radius: f64,
}

impl Default for RewardModel {
    fn default() -> Self {
        RewardModel {
            success_radius: DEFAULT_SUCCESS_RADIUS,
        }
    }
}

impl RewardModel {
    /// `prev_goal_distance` and `new_goal_distance` are geodesic distances
    /// to the goal before and after the action.
    pub fn evaluate(
        &self,
        prev_goal_distance: f64,
        new_goal_distance: f64,
        stopped: bool,
        collision_events: u32,
    ) -> Rewards {
        let target = if !stopped {
            0.0
        } else if new_goal_distance <= self.success_radius {
            TARGET_SUCCESS_REWARD
        } else {
            TARGET_FAILURE_REWARD
        };
        let distance = if new_goal_distance < prev_goal_distance {
            PROGRESS_REWARD
        } else {
            NO_PROGRESS_PENALTY
        };
        Rewards {
            target,
            distance,
            human: COLLISION_PENALTY * f64::from(collision_events),
        }
    }
}
