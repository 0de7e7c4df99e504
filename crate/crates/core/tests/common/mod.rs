//! Fixtures and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use humannav::geom::Vec3;
use humannav::harness::{generate_episodes, SuiteConfig};
use humannav::sim::{EpisodeSpec, StartPose};
use humannav::world::{generate_scenario, GenerationConfig};
use humannav::world::{
    HumanActivity, HumanInstance, NavGraph, Region, Scenario, ScenarioMeta, Split, Viewpoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn vp(id: &str, x: f64, y: f64) -> Viewpoint {
    Viewpoint {
        id: id.to_string(),
        position: Vec3::new(x, y, 0.0),
        region: Region::Hallway,
    }
}

pub fn graph(points: &[(&str, f64, f64)], edges: &[(&str, &str)]) -> NavGraph {
    NavGraph::new(
        points.iter().map(|&(id, x, y)| vp(id, x, y)).collect(),
        edges,
    )
    .unwrap()
}

pub fn activity() -> HumanActivity {
    HumanActivity {
        id: "hallway-1".into(),
        description: "walking down the hallway".into(),
        region: Region::Hallway,
    }
}

pub fn human(id: &str, anchor: &str, waypoints: &[(f64, f64)]) -> HumanInstance {
    HumanInstance::new(
        id,
        activity(),
        anchor,
        waypoints
            .iter()
            .map(|&(x, y)| Vec3::new(x, y, 0.0))
            .collect(),
        0.3,
    )
    .unwrap()
}

pub fn scenario(id: &str, g: NavGraph, humans: Vec<HumanInstance>) -> Arc<Scenario> {
    let meta = ScenarioMeta {
        name: id.to_string(),
        split: Split::Seen,
    };
    Arc::new(Scenario::new(id, meta, g, humans).unwrap())
}

pub fn episode(s: &Scenario, start: &str, heading: i32, path: &[&str]) -> EpisodeSpec {
    EpisodeSpec {
        id: format!("{}-ep", s.id),
        scenario: s.id.clone(),
        instruction: "go".into(),
        start: StartPose {
            node: start.into(),
            heading,
            elevation: 0,
        },
        goal: path.last().unwrap().to_string(),
        reference_path: path.iter().map(|p| p.to_string()).collect(),
        step_cap: 30,
    }
}

/// Random planar graph: nodes scattered in a square, each pair joined with
/// probability `p`.
pub fn random_graph(seed: u64, max_nodes: usize, p: f64) -> NavGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let nodes: Vec<Viewpoint> = (0..n)
        .map(|i| {
            vp(
                &format!("n{i:02}"),
                rng.random_range(0.0..20.0),
                rng.random_range(0.0..20.0),
            )
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((format!("n{a:02}"), format!("n{b:02}")));
            }
        }
    }
    NavGraph::new(nodes, &edges).unwrap()
}

/// Textbook O(n^2) Dijkstra without a heap. Returns distances and the
/// number of nodes settled before (and including) `stop_at`.
pub fn dijkstra_oracle(
    g: &NavGraph,
    source: usize,
    blocked: &[bool],
    stop_at: Option<usize>,
) -> (Vec<f64>, usize) {
    let n = g.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut settled = 0;
    dist[source] = 0.0;
    loop {
        let mut u = None;
        for i in 0..n {
            if !done[i] && dist[i].is_finite() && u.is_none_or(|j: usize| dist[i] < dist[j]) {
                u = Some(i);
            }
        }
        let Some(u) = u else { break };
        done[u] = true;
        settled += 1;
        if stop_at == Some(u) {
            break;
        }
        for nb in g.neighbors(u) {
            if blocked[nb.node] {
                continue;
            }
            let w = g.position(u).distance(g.position(nb.node));
            if dist[u] + w < dist[nb.node] {
                dist[nb.node] = dist[u] + w;
            }
        }
    }
    (dist, settled)
}

/// Human position by walking the polyline with a running sum.
pub fn human_position_oracle(waypoints: &[Vec3], frame: u32) -> Vec3 {
    if waypoints.len() == 1 {
        return waypoints[0];
    }
    let segs: Vec<f64> = waypoints.windows(2).map(|w| w[0].distance(w[1])).collect();
    let total: f64 = segs.iter().sum();
    if total == 0.0 {
        return waypoints[0];
    }
    let mut s = f64::from(frame % 120) / 120.0 * total;
    for (i, len) in segs.iter().enumerate() {
        if s <= *len || i == segs.len() - 1 {
            let t = if *len > 0.0 { (s / len).min(1.0) } else { 0.0 };
            let (a, b) = (waypoints[i], waypoints[i + 1]);
            return Vec3::new(
                a.x() + (b.x() - a.x()) * t,
                a.y() + (b.y() - a.y()) * t,
                a.z() + (b.z() - a.z()) * t,
            );
        }
        s -= len;
    }
    unreachable!()
}

/// Counts zone entries by sampling every frame of an agent move from
/// `from` to `to` at `speed` m/s starting at `start`.
pub fn collision_oracle(
    from: Vec3,
    to: Vec3,
    start: u32,
    speed: f64,
    humans: &[Vec<Vec3>],
    threshold: f64,
) -> u32 {
    let duration = 16.0 * from.distance(to) / speed;
    let frames = (duration.ceil() as u32).max(1);
    let mut count = 0;
    for h in humans {
        let mut was_inside = false;
        for j in 0..frames {
            let t = if duration > 0.0 {
                (f64::from(j + 1) / duration).min(1.0)
            } else {
                1.0
            };
            let agent = from.lerp(to, t);
            let inside = agent.distance(human_position_oracle(h, start + j)) < threshold;
            if inside && !was_inside {
                count += 1;
            }
            was_inside = inside;
        }
    }
    count
}

/// Generated buildings with their episode suites, built once per test
/// binary.
pub fn suite() -> &'static [(Arc<Scenario>, Vec<EpisodeSpec>)] {
    static SUITE: OnceLock<Vec<(Arc<Scenario>, Vec<EpisodeSpec>)>> = OnceLock::new();
    SUITE.get_or_init(|| {
        (0..6u64)
            .map(|seed| {
                let s =
                    Arc::new(generate_scenario(100 + seed, &GenerationConfig::default()).unwrap());
                let cfg = SuiteConfig {
                    episodes_per_scenario: 4,
                    ..Default::default()
                };
                let eps = generate_episodes(std::slice::from_ref(&s), seed, &cfg).unwrap();
                assert!(!eps.is_empty());
                (s, eps)
            })
            .collect()
    })
}

pub fn pick_episode(k: usize) -> (Arc<Scenario>, EpisodeSpec) {
    let all = suite();
    let (s, eps) = &all[k % all.len()];
    (s.clone(), eps[(k / all.len()) % eps.len()].clone())
}
