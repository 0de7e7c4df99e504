//! Request/response sessions through which external agents drive
//! episodes.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::action::{ActionSpace, Command};
use crate::sim::episode::{Episode, EpisodeSpec, Observation, SimConfig, StepOutcome};
use crate::sim::log::TrajectoryLog;
use crate::world::scenario::Scenario;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(600);

/// Where sessions look up scenarios and episodes.
pub trait EpisodeSource: Send + Sync {
    fn scenario(&self, id: &str) -> Option<Arc<Scenario>>;
    fn episode(&self, scenario: &str, episode: &str) -> Option<EpisodeSpec>;
}

/// A fixed set of scenarios and episodes.
#[derive(Clone, Debug, Default)]
pub struct StaticSource {
    scenarios: HashMap<String, Arc<Scenario>>,
    episodes: HashMap<(String, String), EpisodeSpec>,
}

impl StaticSource {
    pub fn new(
        scenarios: impl IntoIterator<Item = Arc<Scenario>>,
        episodes: impl IntoIterator<Item = EpisodeSpec>,
    ) -> Self {
        StaticSource {
            scenarios: scenarios.into_iter().map(|s| (s.id.clone(), s)).collect(),
            episodes: episodes
                .into_iter()
                .map(|e| ((e.scenario.clone(), e.id.clone()), e))
                .collect(),
        }
    }
}

impl EpisodeSource for StaticSource {
    fn scenario(&self, id: &str) -> Option<Arc<Scenario>> {
        self.scenarios.get(id).cloned()
    }

    fn episode(&self, scenario: &str, episode: &str) -> Option<EpisodeSpec> {
        self.episodes
            .get(&(scenario.to_string(), episode.to_string()))
            .cloned()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub scenario: String,
    pub episode: String,
    pub mode: ActionSpace,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session: String,
    pub observation: Observation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActRequest {
    /// `forward`, `left`, `right`, `up`, `down`, `stop` or `move:<node>`.
    pub action: String,
}

struct Session {
    episode: Episode,
    log: TrajectoryLog,
    touched: Instant,
}

/// Owns live sessions. Each session is stepped under its own lock, so
/// distinct sessions proceed in parallel.
pub struct SessionManager {
    source: Arc<dyn EpisodeSource>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    idle_timeout: Duration,
    next_id: AtomicU64,
}

impl SessionManager {
    pub fn new(source: Arc<dyn EpisodeSource>, idle_timeout: Duration) -> Self {
        SessionManager {
            source,
            sessions: Mutex::new(HashMap::new()),
            idle_timeout,
            next_id: AtomicU64::new(1),
        }
    }

    pub fn create(&self, req: &CreateSession) -> Result<SessionCreated> {
        self.expire_idle();
        let scenario = self
            .source
            .scenario(&req.scenario)
            .ok_or_else(|| Error::NotFound(format!("scenario `{}`", req.scenario)))?;
        let spec = self
            .source
            .episode(&req.scenario, &req.episode)
            .ok_or_else(|| Error::NotFound(format!("episode `{}`", req.episode)))?;
        let episode = Episode::reset(scenario, spec, SimConfig::with_mode(req.mode), req.seed)?;
        let observation = episode.observation().clone();
        let log = TrajectoryLog::new(&episode);
        let id = format!("s{:06}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let session = Session {
            episode,
            log,
            touched: Instant::now(),
        };
        self.table()
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(SessionCreated {
            session: id,
            observation,
        })
    }

    pub fn observe(&self, sid: &str) -> Result<Observation> {
        self.with_session(sid, |s| Ok(s.episode.observation().clone()))
    }

    pub fn act(&self, sid: &str, req: &ActRequest) -> Result<StepOutcome> {
        let cmd: Command = req
            .action
            .parse()
            .map_err(|_| Error::MalformedAction(req.action.clone()))?;
        self.step(sid, &cmd)
    }

    pub fn step(&self, sid: &str, cmd: &Command) -> Result<StepOutcome> {
        self.with_session(sid, |s| {
            let o = s.episode.step(cmd)?;
            s.log.push(&o);
            Ok(o)
        })
    }

    /// The log recorded so far.
    pub fn log(&self, sid: &str) -> Result<TrajectoryLog> {
        self.with_session(sid, |s| Ok(s.log.clone()))
    }

    pub fn close(&self, sid: &str) -> Result<TrajectoryLog> {
        let session = self
            .table()
            .remove(sid)
            .ok_or_else(|| Error::UnknownSession(sid.to_string()))?;
        let log = session.lock().expect("session lock poisoned").log.clone();
        Ok(log)
    }

    pub fn len(&self) -> usize {
        self.table().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for at least the timeout.
    pub fn expire_idle(&self) {
        let now = Instant::now();
        self.table().retain(|_, s| match s.try_lock() {
            Ok(s) => now.duration_since(s.touched) < self.idle_timeout,
            // busy sessions are in use, hence not idle
            Err(_) => true,
        });
    }

    fn table(&self) -> std::sync::MutexGuard<'_, HashMap<String, Arc<Mutex<Session>>>> {
        self.sessions.lock().expect("session table lock poisoned")
    }

    fn with_session<T>(&self, sid: &str, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        self.expire_idle();
        let session = self
            .table()
            .get(sid)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(sid.to_string()))?;
        let mut guard = session.lock().expect("session lock poisoned");
        guard.touched = Instant::now();
        f(&mut guard)
    }
}
