//! Scenario directories and episode files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::episode::EpisodeSpec;
use crate::world::scenario::{load_scenario, save_scenario, Scenario};

pub const SCENARIO_SUFFIX: &str = ".scenario.json";
pub const EPISODE_FILE_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeFile {
    pub version: u64,
    pub episodes: Vec<EpisodeSpec>,
}

pub fn scenario_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}{SCENARIO_SUFFIX}"))
}

/// Loads every `*.scenario.json` in `dir`, sorted by file name.
pub fn load_scenario_dir(dir: &Path) -> Result<Vec<Scenario>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(SCENARIO_SUFFIX))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p)?;
            load_scenario(&bytes).map_err(|e| Error::InvalidParams(format!("{}: {e}", p.display())))
        })
        .collect()
}

pub fn save_scenario_file(dir: &Path, s: &Scenario) -> Result<PathBuf> {
    let path = scenario_path(dir, &s.id);
    fs::write(&path, save_scenario(s))?;
    Ok(path)
}

pub fn load_episodes(path: &Path) -> Result<Vec<EpisodeSpec>> {
    parse_episodes(&fs::read(path)?)
}

pub fn parse_episodes(bytes: &[u8]) -> Result<Vec<EpisodeSpec>> {
    let file: EpisodeFile = serde_json::from_slice(bytes)?;
    if file.version != EPISODE_FILE_VERSION {
        return Err(Error::SchemaVersion {
            found: file.version,
            expected: EPISODE_FILE_VERSION,
        });
    }
    Ok(file.episodes)
}

pub fn save_episodes(path: &Path, episodes: &[EpisodeSpec]) -> Result<()> {
    let file = EpisodeFile {
        version: EPISODE_FILE_VERSION,
        episodes: episodes.to_vec(),
    };
    let mut bytes = serde_json::to_vec_pretty(&file)?;
    bytes.push(b'\n');
    fs::write(path, bytes)?;
    Ok(())
}
