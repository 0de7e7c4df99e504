//! The discrete-time episode engine.

pub mod action;
pub mod collision;
pub mod episode;
pub mod log;
pub mod nav;
pub mod rewards;

pub use action::{Action, ActionSpace, Command};
pub use collision::{detect_collisions, AgentSegment, CollisionEvent, CollisionTracker};
pub use episode::{
    AgentState, Episode, EpisodeSpec, HumanSighting, NavigableEntry, Observation, SimConfig,
    StartPose, StepOutcome,
};
pub use log::{replay, rollout, LogHeader, LogRecord, TrajectoryLog};
pub use rewards::{RewardModel, Rewards};
