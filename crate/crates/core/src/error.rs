use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u64, expected: u64 },

    #[error("{context} references unknown node `{id}`")]
    DanglingNode { context: String, id: String },

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("duplicate edge `{0}`–`{1}`")]
    DuplicateEdge(String, String),

    #[error("self-loop on node `{0}`")]
    SelfLoop(String),

    #[error("edge `{a}`–`{b}` has weight {stored} but endpoints are {expected} m apart")]
    WeightMismatch {
        a: String,
        b: String,
        stored: f64,
        expected: f64,
    },

    #[error("invalid human `{id}`: {reason}")]
    InvalidHuman { id: String, reason: String },

    #[error("duplicate human id `{0}`")]
    DuplicateHuman(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible generation request: {0}")]
    Infeasible(String),

    #[error("path nodes `{0}` and `{1}` are not adjacent")]
    NotAdjacent(String, String),

    #[error("planning start `{0}` is inside the excluded set")]
    StartExcluded(String),

    #[error("episode does not match scenario: {0}")]
    EpisodeMismatch(String),

    #[error("episode already finished")]
    EpisodeDone,

    #[error("trajectory log is incomplete (last record not done)")]
    IncompleteLog,

    #[error("trajectory log disagrees with replay: {0}")]
    LogMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("collision rate undefined: no affected episodes but {0} episodes with collisions")]
    UndefinedCollisionRate(usize),

    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("malformed action `{0}`")]
    MalformedAction(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
