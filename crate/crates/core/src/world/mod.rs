//! Buildings, humans and the static analyses over them.

pub mod catalog;
pub mod classify;
pub mod critical;
pub mod generate;
pub mod graph;
pub mod human;
pub mod occupancy;
pub mod scenario;

pub use catalog::{activity_catalog, CatalogActivity, Region};
pub use classify::{
    classify_indices, classify_viewpoints, ClassifyConfig, ImpactStats, ViewpointClass,
};
pub use critical::{critical_indices, critical_nodes, is_critical_hop};
pub use generate::{derive_seed, generate_scenario, generate_suite, GenerationConfig};
pub use graph::{NavGraph, Neighbor, NodeIdx, Viewpoint};
pub use human::{HumanActivity, HumanInstance, TrajectoryClass, CYCLE_FRAMES, FPS};
pub use occupancy::{occupied_mask, occupied_nodes, OccupancySet, DEFAULT_OCCUPANCY_RADIUS};
pub use scenario::{load_scenario, save_scenario, Scenario, ScenarioMeta, Split};
