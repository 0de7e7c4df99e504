//! Procedural buildings: rooms on a coarse cell grid, joined by hallway
//! chains, populated with humans whose count and trajectory lengths follow
//! the target population statistics.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::sim::nav::egocentric_traversable;
use crate::world::catalog::{activities_for, Region};
use crate::world::graph::{NavGraph, NodeIdx, Viewpoint};
use crate::world::human::{
    HumanActivity, HumanInstance, TrajectoryClass, DEFAULT_FOOTPRINT_RADIUS,
};
use crate::world::scenario::{Scenario, ScenarioMeta, Split};

/// Target share of humans per trajectory class, in
/// [`TrajectoryClass::ALL`] order.
pub const TRAJECTORY_MIX: [f64; 4] = [0.492, 0.305, 0.184, 0.019];

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const MAX_CORRIDOR_STEP: f64 = 2.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    /// Lower bound on room viewpoints; rooms are added until reached.
    /// Hallway viewpoints come on top.
    pub target_nodes: usize,
    pub humans_min: usize,
    pub humans_max: usize,
    /// Humans that may share one anchor viewpoint.
    pub node_capacity: usize,
    /// Viewpoint lattice spacing inside rooms, meters.
    pub spacing: f64,
    pub jitter: f64,
    /// Size of one room cell, meters.
    pub cell_size: f64,
    /// Probability of an extra door between two adjacent rooms.
    pub loop_probability: f64,
    pub footprint_radius: f64,
    pub split: Split,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            target_nodes: 90,
            humans_min: 2,
            humans_max: 6,
            node_capacity: 1,
            spacing: 2.0,
            jitter: 0.3,
            cell_size: 12.0,
            loop_probability: 0.3,
            footprint_radius: DEFAULT_FOOTPRINT_RADIUS,
            split: Split::Seen,
        }
    }
}

impl GenerationConfig {
    pub fn static_building() -> Self {
        GenerationConfig {
            humans_min: 0,
            humans_max: 0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.target_nodes < 2 {
            return bad("target_nodes must be at least 2");
        }
        if self.humans_min > self.humans_max {
            return bad("humans_min exceeds humans_max");
        }
        if self.node_capacity == 0 && self.humans_max > 0 {
            return bad("node_capacity must be positive when humans are requested");
        }
        if !(self.spacing > 0.5 && self.spacing.is_finite()) {
            return bad("spacing must exceed 0.5 m");
        }
        if !(0.0..self.spacing / 4.0).contains(&self.jitter) {
            return bad("jitter must lie in [0, spacing/4)");
        }
        if !(self.cell_size > 3.0 * self.spacing + 2.0) {
            return bad("cell_size too small for a 4x4 room lattice");
        }
        if !(0.0..=1.0).contains(&self.loop_probability) {
            return bad("loop_probability must lie in [0, 1]");
        }
        if !(self.footprint_radius > 0.0) {
            return bad("footprint_radius must be positive");
        }
        if self.humans_min > self.target_nodes * self.node_capacity {
            return Err(Error::Infeasible(format!(
                "{} humans cannot fit on {} viewpoints with capacity {}",
                self.humans_min, self.target_nodes, self.node_capacity
            )));
        }
        Ok(())
    }
}

/// Deterministic per-index seed derivation (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates one building. The result is a pure function of `seed` and
/// `cfg`.
pub fn generate_scenario(seed: u64, cfg: &GenerationConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = build_graph(&mut rng, cfg)?;
    let id = format!("gen-{seed:016x}");
    let meta = ScenarioMeta {
        name: format!("procedural building {seed:016x}"),
        split: cfg.split,
    };
    let mut scenario = Scenario::new(id, meta, graph, Vec::new())?;
    populate(&mut rng, &mut scenario, cfg)?;
    Ok(scenario)
}

/// Generates `count` buildings with ids `b000`, `b001`, ...; every fifth
/// building is tagged unseen.
pub fn generate_suite(seed: u64, count: usize, cfg: &GenerationConfig) -> Result<Vec<Scenario>> {
    (0..count)
        .map(|i| {
            let mut c = cfg.clone();
            c.split = if i % 5 == 4 {
                Split::Unseen
            } else {
                Split::Seen
            };
            let mut s = generate_scenario(derive_seed(seed, i as u64), &c)?;
            s.id = format!("b{i:03}");
            s.meta.name = format!("procedural building {i:03}");
            Ok(s)
        })
        .collect()
}

struct Room {
    nodes: Vec<usize>,
}

fn build_graph(rng: &mut ChaCha8Rng, cfg: &GenerationConfig) -> Result<NavGraph> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut regions: Vec<Region> = Vec::new();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut cells: BTreeMap<(i32, i32), Room> = BTreeMap::new();
    let mut doors: Vec<((i32, i32), (i32, i32))> = Vec::new();

    let add_room = |cell: (i32, i32),
                    rng: &mut ChaCha8Rng,
                    positions: &mut Vec<Vec3>,
                    regions: &mut Vec<Region>,
                    edges: &mut BTreeSet<(usize, usize)>|
     -> Room {
        let region = *Region::ALL.choose(rng).expect("non-empty catalog");
        let nx = rng.random_range(2..=4usize);
        let ny = rng.random_range(2..=4usize);
        let slack_x = cfg.cell_size - 2.0 - (nx - 1) as f64 * cfg.spacing;
        let slack_y = cfg.cell_size - 2.0 - (ny - 1) as f64 * cfg.spacing;
        let ox = f64::from(cell.0) * cfg.cell_size + 1.0 + rng.random_range(0.0..=slack_x);
        let oy = f64::from(cell.1) * cfg.cell_size + 1.0 + rng.random_range(0.0..=slack_y);
        let base = positions.len();
        for j in 0..ny {
            for i in 0..nx {
                let jx = rng.random_range(-cfg.jitter..=cfg.jitter);
                let jy = rng.random_range(-cfg.jitter..=cfg.jitter);
                positions.push(Vec3::new(
                    ox + i as f64 * cfg.spacing + jx,
                    oy + j as f64 * cfg.spacing + jy,
                    0.0,
                ));
                regions.push(region);
            }
        }
        let at = |i: usize, j: usize| base + j * nx + i;
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 < nx {
                    edges.insert((at(i, j), at(i + 1, j)));
                }
                if j + 1 < ny {
                    edges.insert((at(i, j), at(i, j + 1)));
                }
                if i + 1 < nx && j + 1 < ny {
                    edges.insert((at(i, j), at(i + 1, j + 1)));
                    edges.insert((at(i + 1, j), at(i, j + 1)));
                }
            }
        }
        Room {
            nodes: (base..positions.len()).collect(),
        }
    };

    let first = add_room((0, 0), rng, &mut positions, &mut regions, &mut edges);
    cells.insert((0, 0), first);
    const DIRS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    while positions.len() < cfg.target_nodes {
        let keys: Vec<(i32, i32)> = cells.keys().copied().collect();
        let from = *keys.choose(rng).expect("at least one room");
        let d = *DIRS.choose(rng).expect("four directions");
        let to = (from.0 + d.0, from.1 + d.1);
        if cells.contains_key(&to) {
            continue;
        }
        let room = add_room(to, rng, &mut positions, &mut regions, &mut edges);
        cells.insert(to, room);
        doors.push((from, to));
    }
    // extra doors between adjacent rooms create loops
    let keys: Vec<(i32, i32)> = cells.keys().copied().collect();
    for &c in &keys {
        for d in [(1, 0), (0, 1)] {
            let n = (c.0 + d.0, c.1 + d.1);
            if cells.contains_key(&n)
                && !doors.contains(&(c, n))
                && !doors.contains(&(n, c))
                && rng.random_bool(cfg.loop_probability)
            {
                doors.push((c, n));
            }
        }
    }

    for (a, b) in doors {
        let (ra, rb) = (&cells[&a], &cells[&b]);
        let mut best = (f64::INFINITY, 0, 0);
        for &u in &ra.nodes {
            for &v in &rb.nodes {
                let d = positions[u].distance(positions[v]);
                if d < best.0 {
                    best = (d, u, v);
                }
            }
        }
        let (dist, u, v) = best;
        let hops = (dist / MAX_CORRIDOR_STEP).ceil().max(1.0) as usize;
        let mut prev = u;
        for k in 1..hops {
            let p = positions[u].lerp(positions[v], k as f64 / hops as f64);
            positions.push(p);
            regions.push(Region::Hallway);
            let idx = positions.len() - 1;
            edges.insert((prev.min(idx), prev.max(idx)));
            prev = idx;
        }
        edges.insert((prev.min(v), prev.max(v)));
    }

    let width = positions.len().to_string().len().max(4);
    let ids: Vec<String> = (0..positions.len())
        .map(|i| format!("v{i:0width$}"))
        .collect();
    let nodes: Vec<Viewpoint> = positions
        .iter()
        .zip(&regions)
        .zip(&ids)
        .map(|((p, r), id)| Viewpoint {
            id: id.clone(),
            position: *p,
            region: *r,
        })
        .collect();
    let edge_ids: Vec<(&str, &str)> = edges
        .iter()
        .map(|&(a, b)| (ids[a].as_str(), ids[b].as_str()))
        .collect();
    let graph = NavGraph::new(nodes, &edge_ids)?;
    Ok(prune_untraversable(graph))
}

/// Drops edges that no lattice heading can follow in one of their
/// directions, as long as the graph stays connected. Bridges are kept.
fn prune_untraversable(mut g: NavGraph) -> NavGraph {
    let mut kept: Vec<(String, String)> = Vec::new();
    loop {
        let offending = g.edges().iter().copied().find(|&(a, b)| {
            !kept.contains(&(g.id(a).to_string(), g.id(b).to_string()))
                && !(egocentric_traversable(&g, a, b) && egocentric_traversable(&g, b, a))
        });
        let Some((a, b)) = offending else { return g };
        let rest: Vec<(&str, &str)> = g
            .edges()
            .iter()
            .filter(|&&e| e != (a, b))
            .map(|&(x, y)| (g.id(x), g.id(y)))
            .collect();
        let candidate = NavGraph::new(g.nodes().to_vec(), &rest).expect("subset of a valid graph");
        if candidate.is_connected() {
            g = candidate;
        } else {
            kept.push((g.id(a).to_string(), g.id(b).to_string()));
        }
    }
}

fn populate(rng: &mut ChaCha8Rng, s: &mut Scenario, cfg: &GenerationConfig) -> Result<()> {
    let count = rng.random_range(cfg.humans_min..=cfg.humans_max);
    let n = s.graph.len();
    if count > n * cfg.node_capacity {
        return Err(Error::Infeasible(format!(
            "{count} humans cannot fit on {n} viewpoints with capacity {}",
            cfg.node_capacity
        )));
    }
    // anchors: sample slots without replacement, capacity slots per node
    let slots: Vec<NodeIdx> = (0..n)
        .flat_map(|i| std::iter::repeat_n(i, cfg.node_capacity))
        .collect();
    let anchors: Vec<NodeIdx> = slots.choose_multiple(rng, count).copied().collect();

    // low-discrepancy class assignment keeps small populations on the mix
    let offset: f64 = rng.random();
    for (k, &anchor) in anchors.iter().enumerate() {
        let u = (offset + k as f64 * GOLDEN).fract();
        let class = class_for_quantile(u);
        let region = s.graph.node(anchor).region;
        let options = activities_for(region);
        let pick = options.choose(rng).expect("five activities per region");
        let waypoints = trajectory(rng, &s.graph, anchor, class);
        let human = HumanInstance::new(
            format!("h{k:02}"),
            HumanActivity {
                id: pick.id.clone(),
                description: pick.description.clone(),
                region,
            },
            s.graph.id(anchor),
            waypoints,
            cfg.footprint_radius,
        )?;
        s.add_human(human)?;
    }
    Ok(())
}

fn class_for_quantile(u: f64) -> TrajectoryClass {
    let mut acc = 0.0;
    for (class, p) in TrajectoryClass::ALL.iter().zip(TRAJECTORY_MIX) {
        acc += p;
        if u < acc {
            return *class;
        }
    }
    TrajectoryClass::VeryLong
}

fn trajectory(
    rng: &mut ChaCha8Rng,
    g: &NavGraph,
    anchor: NodeIdx,
    class: TrajectoryClass,
) -> Vec<Vec3> {
    let start = g.position(anchor);
    let length = match class {
        TrajectoryClass::Stationary => {
            let l: f64 = rng.random_range(0.0..0.95);
            if l < 0.3 {
                return vec![start];
            }
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            return vec![
                start,
                start + Vec3::new(theta.cos() * l, theta.sin() * l, 0.0),
            ];
        }
        TrajectoryClass::Short => rng.random_range(1.0..4.95),
        TrajectoryClass::Long => rng.random_range(5.05..14.95),
        TrajectoryClass::VeryLong => rng.random_range(15.05..25.0),
    };
    let mut points = vec![start];
    let mut remaining = length;
    let (mut cur, mut prev) = (anchor, None);
    while remaining > 0.0 {
        let options: Vec<NodeIdx> = g
            .neighbors(cur)
            .iter()
            .map(|n| n.node)
            .filter(|&m| Some(m) != prev || g.degree(cur) == 1)
            .collect();
        let Some(&next) = options.choose(rng) else {
            break;
        };
        let w = g.edge_weight(cur, next).expect("neighbor");
        if w >= remaining {
            points.push(g.position(cur).lerp(g.position(next), remaining / w));
            break;
        }
        points.push(g.position(next));
        remaining -= w;
        prev = Some(cur);
        cur = next;
    }
    points
}
