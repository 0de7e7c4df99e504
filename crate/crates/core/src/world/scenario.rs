//! Scenario documents: loading with full validation and canonical,
//! byte-stable serialization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::world::catalog::Region;
use crate::world::graph::{NavGraph, NodeIdx, Viewpoint};
use crate::world::human::{HumanActivity, HumanInstance};

pub const SCHEMA_VERSION: u64 = 1;

/// Tolerance for "first waypoint equals the anchor position", loose enough
/// to survive the 6-decimal canonical encoding.
const ANCHOR_TOLERANCE: f64 = 2e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Seen,
    Unseen,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub name: String,
    pub split: Split,
}

/// A building: navigation graph plus placed humans.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub meta: ScenarioMeta,
    pub graph: NavGraph,
    humans: Vec<HumanInstance>,
    anchors: Vec<NodeIdx>,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        meta: ScenarioMeta,
        graph: NavGraph,
        humans: Vec<HumanInstance>,
    ) -> Result<Self> {
        let mut s = Scenario {
            id: id.into(),
            meta,
            graph,
            humans: Vec::new(),
            anchors: Vec::new(),
        };
        for h in humans {
            s.add_human(h)?;
        }
        Ok(s)
    }

    pub fn humans(&self) -> &[HumanInstance] {
        &self.humans
    }

    pub fn anchor_index(&self, human: usize) -> NodeIdx {
        self.anchors[human]
    }

    /// Validates and appends a human.
    pub fn add_human(&mut self, h: HumanInstance) -> Result<()> {
        let anchor = self
            .graph
            .require(&h.anchor, &format!("human `{}` anchor", h.id))?;
        if self.humans.iter().any(|o| o.id == h.id) {
            return Err(Error::DuplicateHuman(h.id));
        }
        let d = h.waypoints()[0].distance(self.graph.position(anchor));
        if d > ANCHOR_TOLERANCE {
            return Err(Error::InvalidHuman {
                id: h.id.clone(),
                reason: format!("first waypoint is {d:.6} m from anchor `{}`", h.anchor),
            });
        }
        self.humans.push(h);
        self.anchors.push(anchor);
        Ok(())
    }

    pub fn remove_human(&mut self, id: &str) -> Option<HumanInstance> {
        let k = self.humans.iter().position(|h| h.id == id)?;
        self.anchors.remove(k);
        Some(self.humans.remove(k))
    }

    /// Same building with every human removed.
    pub fn without_humans(&self) -> Scenario {
        Scenario {
            id: self.id.clone(),
            meta: self.meta.clone(),
            graph: self.graph.clone(),
            humans: Vec::new(),
            anchors: Vec::new(),
        }
    }

    pub fn to_doc(&self) -> ScenarioDoc {
        ScenarioDoc {
            version: SCHEMA_VERSION,
            id: self.id.clone(),
            meta: self.meta.clone(),
            nodes: self
                .graph
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.id.clone(),
                    xyz: n.position,
                    region: n.region,
                })
                .collect(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|&(a, b)| (self.graph.id(a).to_string(), self.graph.id(b).to_string()))
                .collect(),
            humans: self.humans.iter().map(HumanDoc::from).collect(),
        }
    }

    pub fn from_doc(doc: ScenarioDoc) -> Result<Self> {
        if doc.version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: doc.version,
                expected: SCHEMA_VERSION,
            });
        }
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| Viewpoint {
                id: n.id,
                position: n.xyz,
                region: n.region,
            })
            .collect();
        let graph = NavGraph::new(nodes, &doc.edges)?;
        let humans = doc
            .humans
            .into_iter()
            .map(HumanDoc::into_instance)
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(doc.id, doc.meta, graph, humans)
    }

    /// Canonical encoding: sorted keys, six-decimal floats, no whitespace.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self.to_doc()).expect("scenario docs always serialize");
        canonical_json(&value)
    }
}

/// Parses and validates a scenario document. Unknown fields are rejected.
pub fn load_scenario(source: &[u8]) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_slice(source)?;
    Scenario::from_doc(doc)
}

pub fn save_scenario(s: &Scenario) -> Vec<u8> {
    s.to_canonical_json().into_bytes()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub version: u64,
    pub id: String,
    pub meta: ScenarioMeta,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<(String, String)>,
    pub humans: Vec<HumanDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub xyz: Vec3,
    pub region: Region,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanDoc {
    pub id: String,
    pub activity: HumanActivity,
    pub anchor: String,
    pub waypoints: Vec<Vec3>,
    pub footprint_radius: f64,
}

impl HumanDoc {
    pub fn into_instance(self) -> Result<HumanInstance> {
        HumanInstance::new(
            self.id,
            self.activity,
            self.anchor,
            self.waypoints,
            self.footprint_radius,
        )
    }
}

impl From<&HumanInstance> for HumanDoc {
    fn from(h: &HumanInstance) -> Self {
        HumanDoc {
            id: h.id.clone(),
            activity: h.activity.clone(),
            anchor: h.anchor.clone(),
            waypoints: h.waypoints().to_vec(),
            footprint_radius: h.footprint_radius,
        }
    }
}

/// Writes a JSON value with sorted object keys and fixed six-decimal
/// floats. Integers are written as integers.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                let f = n.as_f64().unwrap_or(0.0);
                let s = format!("{f:.6}");
                if s.trim_start_matches('-')
                    .bytes()
                    .all(|c| c == b'0' || c == b'.')
                {
                    out.push_str("0.000000");
                } else {
                    out.push_str(&s);
                }
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(v, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("strings serialize"));
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::human::TrajectoryClass;

    const MINIMAL: &str = r#"{"version":1,"id":"s","meta":{"name":"tiny","split":"seen"},
        "nodes":[{"id":"a","xyz":[0,0,0],"region":"hallway"},{"id":"b","xyz":[2,0,0],"region":"kitchen"}],
        "edges":[["a","b"]],"humans":[]}"#;

    #[test]
    fn loads_minimal_document() {
        let s = load_scenario(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.graph.len(), 2);
        assert_eq!(s.graph.edges().len(), 1);
        assert!(s.humans().is_empty());
        assert_eq!(s.graph.edge_weight(0, 1), Some(2.0));
    }

    #[test]
    fn single_waypoint_human_is_stationary() {
        let doc = MINIMAL.replace(
            r#""humans":[]"#,
            r#""humans":[{"id":"h1","activity":{"id":"hallway-1","description":"standing","region":"hallway"},
                "anchor":"a","waypoints":[[0,0,0]],"footprint_radius":0.3}]"#,
        );
        let s = load_scenario(doc.as_bytes()).unwrap();
        assert_eq!(s.humans()[0].trajectory_length(), 0.0);
        assert_eq!(s.humans()[0].class(), TrajectoryClass::Stationary);
    }

    #[test]
    fn rejects_dangling_edge() {
        let doc = MINIMAL.replace(r#"[["a","b"]]"#, r#"[["a","zz"]]"#);
        assert!(matches!(
            load_scenario(doc.as_bytes()),
            Err(Error::DanglingNode { id, .. }) if id == "zz"
        ));
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let doc = MINIMAL.replace(r#""id":"s","#, r#""id":"s","extra":1,"#);
        assert!(matches!(
            load_scenario(doc.as_bytes()),
            Err(Error::Parse(_))
        ));
        let doc = MINIMAL.replace(r#""version":1"#, r#""version":2"#);
        assert!(matches!(
            load_scenario(doc.as_bytes()),
            Err(Error::SchemaVersion { found: 2, .. })
        ));
        let doc = MINIMAL.replace(r#""kitchen""#, r#""attic""#);
        assert!(matches!(
            load_scenario(doc.as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(load_scenario(b"{not json").is_err());
    }

    #[test]
    fn rejects_human_off_anchor_or_unknown_anchor() {
        let human = |anchor: &str, wp: &str| {
            MINIMAL.replace(
                r#""humans":[]"#,
                &format!(
                    r#""humans":[{{"id":"h1","activity":{{"id":"x","description":"d","region":"hallway"}},
                    "anchor":"{anchor}","waypoints":[{wp}],"footprint_radius":0.3}}]"#
                ),
            )
        };
        assert!(matches!(
            load_scenario(human("q", "[0,0,0]").as_bytes()),
            Err(Error::DanglingNode { .. })
        ));
        assert!(matches!(
            load_scenario(human("a", "[1,0,0]").as_bytes()),
            Err(Error::InvalidHuman { .. })
        ));
    }

    #[test]
    fn canonical_round_trip_is_byte_stable() {
        let s = load_scenario(MINIMAL.as_bytes()).unwrap();
        let first = save_scenario(&s);
        let again = save_scenario(&load_scenario(&first).unwrap());
        assert_eq!(first, again);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with(r#"{"edges":[["a","b"]],"humans":[],"id":"s""#));
        assert!(text.contains(r#""xyz":[2.000000,0.000000,0.000000]"#));
    }

    #[test]
    fn canonical_numbers() {
        let v: Value = serde_json::json!({"b": -0.0000001, "a": [1, 1.5, -2.25]});
        assert_eq!(
            canonical_json(&v),
            r#"{"a":[1,1.500000,-2.250000],"b":0.000000}"#
        );
    }
}
