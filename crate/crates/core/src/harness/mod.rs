//! Baselines, episode suites, the experiment runner and the session
//! protocol for external agents.

pub mod experiment;
pub mod files;
pub mod policy;
pub mod protocol;
pub mod suite;

pub use experiment::{run_experiment, Environment, EpisodeRow, ExperimentReport, ExperimentSpec};
pub use files::{load_episodes, load_scenario_dir, save_episodes, save_scenario_file, EpisodeFile};
pub use policy::{GreedyPolicy, PolicyRef, RandomPolicy};
pub use protocol::{
    ActRequest, CreateSession, EpisodeSource, SessionCreated, SessionManager, StaticSource,
    DEFAULT_IDLE_TIMEOUT,
};
pub use suite::{generate_episodes, optimal_completes, SuiteConfig};
