//! Scenarios held in memory, optionally mirrored to a directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use humannav::harness::{files, load_episodes, EpisodeSource};
use humannav::sim::EpisodeSpec;
use humannav::world::{save_scenario, Scenario};
use humannav::{Error, Result};
use sha2::{Digest, Sha256};

/// File in the scenario directory that sessions draw episodes from.
pub const EPISODES_FILE: &str = "episodes.json";

/// Hex SHA-256 of the canonical serialization.
pub fn canonical_hash(s: &Scenario) -> String {
    hex::encode(Sha256::digest(save_scenario(s)))
}

type Slot = Arc<Mutex<Arc<Scenario>>>;

/// Each scenario sits behind its own lock, so edits to one scenario are
/// serialized while others proceed.
#[derive(Default)]
pub struct ScenarioStore {
    dir: Option<PathBuf>,
    slots: RwLock<BTreeMap<String, Slot>>,
    episodes: BTreeMap<(String, String), EpisodeSpec>,
}

impl ScenarioStore {
    pub fn new(
        scenarios: impl IntoIterator<Item = Scenario>,
        episodes: impl IntoIterator<Item = EpisodeSpec>,
    ) -> Self {
        ScenarioStore {
            dir: None,
            slots: RwLock::new(
                scenarios
                    .into_iter()
                    .map(|s| (s.id.clone(), Arc::new(Mutex::new(Arc::new(s)))))
                    .collect(),
            ),
            episodes: episodes
                .into_iter()
                .map(|e| ((e.scenario.clone(), e.id.clone()), e))
                .collect(),
        }
    }

    /// Loads `*.scenario.json` and, if present, `episodes.json` from `dir`.
    /// Saved edits are written back there.
    pub fn open(dir: &Path) -> Result<Self> {
        let scenarios = files::load_scenario_dir(dir)?;
        let episode_file = dir.join(EPISODES_FILE);
        let episodes = if episode_file.exists() {
            load_episodes(&episode_file)?
        } else {
            Vec::new()
        };
        let mut store = ScenarioStore::new(scenarios, episodes);
        store.dir = Some(dir.to_path_buf());
        Ok(store)
    }

    pub fn ids(&self) -> Vec<String> {
        self.read().keys().cloned().collect()
    }

    pub fn get(&self, id: &str) -> Result<Arc<Scenario>> {
        let slot = self.slot(id)?;
        let current = slot.lock().expect("scenario lock poisoned").clone();
        Ok(current)
    }

    /// Replaces or creates a scenario. With `expected` set, the stored
    /// scenario must still have that hash.
    pub fn put(&self, s: Scenario, expected: Option<&str>) -> Result<Put> {
        let slot = {
            let mut slots = self.slots.write().expect("store lock poisoned");
            slots
                .entry(s.id.clone())
                .or_insert_with(|| Arc::new(Mutex::new(Arc::new(s.clone()))))
                .clone()
        };
        let mut guard = slot.lock().expect("scenario lock poisoned");
        if let Some(want) = expected {
            let have = canonical_hash(&guard);
            if have != want {
                return Ok(Put::Conflict { current: have });
            }
        }
        self.persist(&s)?;
        *guard = Arc::new(s);
        Ok(Put::Stored(guard.clone()))
    }

    /// Applies `edit` to a copy of the scenario under its lock and stores
    /// the result if the edit succeeds.
    pub fn update<F>(&self, id: &str, edit: F) -> Result<Arc<Scenario>>
    where
        F: FnOnce(&mut Scenario) -> Result<()>,
    {
        let slot = self.slot(id)?;
        let mut guard = slot.lock().expect("scenario lock poisoned");
        let mut next = (**guard).clone();
        edit(&mut next)?;
        self.persist(&next)?;
        *guard = Arc::new(next);
        Ok(guard.clone())
    }

    fn persist(&self, s: &Scenario) -> Result<()> {
        if let Some(dir) = &self.dir {
            files::save_scenario_file(dir, s)?;
        }
        Ok(())
    }

    fn slot(&self, id: &str) -> Result<Slot> {
        self.read()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("scenario `{id}`")))
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, BTreeMap<String, Slot>> {
        self.slots.read().expect("store lock poisoned")
    }
}

pub enum Put {
    Stored(Arc<Scenario>),
    /// The stored scenario changed since the caller read it.
    Conflict {
        current: String,
    },
}

impl EpisodeSource for ScenarioStore {
    fn scenario(&self, id: &str) -> Option<Arc<Scenario>> {
        self.get(id).ok()
    }

    fn episode(&self, scenario: &str, episode: &str) -> Option<EpisodeSpec> {
        self.episodes
            .get(&(scenario.to_string(), episode.to_string()))
            .cloned()
    }
}
