use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Heading lattice increment, degrees.
pub const HEADING_STEP: i32 = 30;
pub const ELEVATION_STEP: i32 = 30;
pub const ELEVATION_MIN: i32 = -30;
pub const ELEVATION_MAX: i32 = 30;
/// Half of the 60° horizontal field of view.
pub const HALF_FOV_DEG: f64 = 30.0;

/// The six agent actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Forward,
    Left,
    Right,
    Up,
    Down,
    Stop,
}

impl Action {
    pub const ALL: [Action; 6] = [
        Action::Forward,
        Action::Left,
        Action::Right,
        Action::Up,
        Action::Down,
        Action::Stop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Forward => "forward",
            Action::Left => "left",
            Action::Right => "right",
            Action::Up => "up",
            Action::Down => "down",
            Action::Stop => "stop",
        }
    }
}

/// What a policy submits per step: one of the six actions, or (panoramic
/// selection) a move to a named adjacent viewpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Act(Action),
    MoveTo(String),
}

impl From<Action> for Command {
    fn from(a: Action) -> Self {
        Command::Act(a)
    }
}

impl Command {
    pub fn is_stop(&self) -> bool {
        matches!(self, Command::Act(Action::Stop))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Act(a) => f.write_str(a.as_str()),
            Command::MoveTo(n) => write!(f, "move:{n}"),
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let a = match s {
            "forward" => Action::Forward,
            "left" => Action::Left,
            "right" => Action::Right,
            "up" => Action::Up,
            "down" => Action::Down,
            "stop" => Action::Stop,
            other => {
                return match other.strip_prefix("move:") {
                    Some(node) if !node.is_empty() => Ok(Command::MoveTo(node.to_string())),
                    _ => Err(Error::MalformedAction(other.to_string())),
                }
            }
        };
        Ok(Command::Act(a))
    }
}

impl Serialize for Command {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Command {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpace {
    /// 60° field of view; forward only reaches viewpoints inside the cone.
    Egocentric,
    /// Any adjacent viewpoint may be selected.
    Panoramic,
}

impl fmt::Display for ActionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionSpace::Egocentric => "egocentric",
            ActionSpace::Panoramic => "panoramic",
        })
    }
}

impl FromStr for ActionSpace {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "egocentric" => Ok(ActionSpace::Egocentric),
            "panoramic" => Ok(ActionSpace::Panoramic),
            other => Err(Error::InvalidParams(format!(
                "unknown action space `{other}`"
            ))),
        }
    }
}

pub fn normalize_heading(h: i32) -> i32 {
    h.rem_euclid(360)
}

pub fn is_lattice_heading(h: i32) -> bool {
    (0..360).contains(&h) && h % HEADING_STEP == 0
}

pub fn is_lattice_elevation(e: i32) -> bool {
    (ELEVATION_MIN..=ELEVATION_MAX).contains(&e) && e % ELEVATION_STEP == 0
}

/// All lattice headings, ascending.
pub fn lattice_headings() -> impl Iterator<Item = i32> {
    (0..360).step_by(HEADING_STEP as usize)
}
