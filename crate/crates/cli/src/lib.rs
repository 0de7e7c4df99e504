//! Command implementations behind the `humannav` binary.

use std::fs;
use std::io::BufWriter;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use humannav::datagen::{gen_random_walks, write_dataset, DatasetConfig};
use humannav::harness::{
    generate_episodes, load_episodes, load_scenario_dir, run_experiment, save_episodes,
    save_scenario_file, Environment, ExperimentReport, ExperimentSpec, PolicyRef, SuiteConfig,
};
use humannav::metrics::to_csv;
use humannav::sim::ActionSpace;
use humannav::world::{generate_suite, GenerationConfig, Scenario};
use humannav::{Error, Result};
use humannav_server::{AppState, ScenarioStore, EPISODES_FILE};
use serde::{Deserialize, Serialize};

fn arcs(v: Vec<Scenario>) -> Vec<Arc<Scenario>> {
    v.into_iter().map(Arc::new).collect()
}

/// Writes `n` generated buildings and an episode suite over them.
pub fn generate(seed: u64, buildings: usize, out: &Path) -> Result<usize> {
    if buildings == 0 {
        return Err(Error::InvalidParams("buildings must be at least 1".into()));
    }
    let scenarios = arcs(generate_suite(
        seed,
        buildings,
        &GenerationConfig::default(),
    )?);
    let episodes = generate_episodes(&scenarios, seed, &SuiteConfig::default())?;
    fs::create_dir_all(out)?;
    for s in &scenarios {
        save_scenario_file(out, s)?;
    }
    save_episodes(&out.join(EPISODES_FILE), &episodes)?;
    Ok(episodes.len())
}

pub struct EvalArgs {
    pub policy: PolicyRef,
    pub scenarios: PathBuf,
    pub episodes: PathBuf,
    pub mode: ActionSpace,
    pub env: Environment,
    pub seed: u64,
    pub report: PathBuf,
}

/// Paths written next to the JSON report.
pub fn companion_paths(report: &Path) -> (PathBuf, PathBuf) {
    let csv = report.with_extension("csv");
    let mut logs = report.as_os_str().to_owned();
    logs.push(".logs");
    (csv, PathBuf::from(logs))
}

/// Runs the policy and writes the JSON report, the CSV table rows and one
/// JSONL trajectory log per finished episode.
pub fn eval(a: &EvalArgs) -> Result<ExperimentReport> {
    let scenarios = arcs(load_scenario_dir(&a.scenarios)?);
    if scenarios.is_empty() {
        return Err(Error::NotFound(format!(
            "no scenarios in {}",
            a.scenarios.display()
        )));
    }
    let episodes = load_episodes(&a.episodes)?;
    let spec = ExperimentSpec::new(a.policy, a.mode, a.env, a.seed);
    let report = run_experiment(&spec, &scenarios, &episodes)?;

    if let Some(dir) = a.report.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&a.report, serde_json::to_vec_pretty(&report)?)?;
    let (csv, logs) = companion_paths(&a.report);
    fs::write(csv, to_csv(&report.rows))?;
    fs::create_dir_all(&logs)?;
    for (i, row) in report.episodes.iter().enumerate() {
        if let Some(log) = &row.log {
            fs::write(
                logs.join(format!("{i:05}-{}.jsonl", row.episode)),
                log.to_jsonl(),
            )?;
        }
    }
    Ok(report)
}

/// Contents of the `datagen --config` file. Relative paths resolve
/// against the file's directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatagenJob {
    pub scenarios: PathBuf,
    /// Defaults to `episodes.json` inside the scenario directory.
    #[serde(default)]
    pub episodes: Option<PathBuf>,
    #[serde(default)]
    pub dataset: DatasetConfig,
}

pub fn datagen(config: &Path, out: &Path) -> Result<usize> {
    let job: DatagenJob = serde_json::from_slice(&fs::read(config)?)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let scenarios_dir = base.join(&job.scenarios);
    let episodes_file = match &job.episodes {
        Some(p) => base.join(p),
        None => scenarios_dir.join(EPISODES_FILE),
    };
    let scenarios = arcs(load_scenario_dir(&scenarios_dir)?);
    let episodes = load_episodes(&episodes_file)?;
    let records = gen_random_walks(&scenarios, &episodes, &job.dataset)?;
    let w = BufWriter::new(fs::File::create(out)?);
    write_dataset(w, &job.dataset, &records)?;
    Ok(records.len())
}

/// Serves the HTTP API over the scenario directory until the process is
/// stopped.
pub fn serve(addr: SocketAddr, scenarios: &Path) -> Result<()> {
    let store = ScenarioStore::open(scenarios)?;
    let state = Arc::new(AppState::new(store));
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    rt.block_on(humannav_server::serve(addr, state))?;
    Ok(())
}
