//! A* over the navigation graph with node exclusions and an optional edge
//! filter, plus the nearest-reachable fallback.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::error::{Error, Result};
use crate::world::graph::{NavGraph, NodeIdx, OrdF64};

/// Outcome of one A* query.
#[derive(Clone, Debug, PartialEq)]
pub struct Search {
    pub path: Option<Vec<NodeIdx>>,
    pub cost: f64,
    /// Nodes popped from the open list with a current g-score.
    pub expansions: usize,
}

/// Shortest path from `start` to `goal` avoiding `blocked` nodes and
/// edges rejected by `edge_ok(from, to)`. The start node is never
/// considered blocked. Straight-line distance is the heuristic, so the
/// result is optimal for Euclidean weights; nodes are reopened when a
/// cheaper route turns up, which keeps it exact under rounding.
pub fn astar<F>(g: &NavGraph, start: NodeIdx, goal: NodeIdx, blocked: &[bool], edge_ok: F) -> Search
where
    F: Fn(NodeIdx, NodeIdx) -> bool,
{
    let target = g.position(goal);
    let h = |i: NodeIdx| g.position(i).distance(target);
    let mut best = vec![f64::INFINITY; g.len()];
    let mut parent = vec![usize::MAX; g.len()];
    let mut open = BinaryHeap::new();
    let mut expansions = 0;
    best[start] = 0.0;
    open.push(Reverse((OrdF64(h(start)), start)));
    if blocked[goal] && goal != start {
        return Search {
            path: None,
            cost: f64::INFINITY,
            expansions,
        };
    }
    while let Some(Reverse((OrdF64(f), u))) = open.pop() {
        let gu = best[u];
        if f > gu + h(u) {
            continue;
        }
        expansions += 1;
        if u == goal {
            return Search {
                path: Some(trace(&parent, start, goal)),
                cost: gu,
                expansions,
            };
        }
        for n in g.neighbors(u) {
            let v = n.node;
            if blocked[v] || !edge_ok(u, v) {
                continue;
            }
            let gv = gu + n.weight;
            if gv < best[v] {
                best[v] = gv;
                parent[v] = u;
                open.push(Reverse((OrdF64(gv + h(v)), v)));
            }
        }
    }
    Search {
        path: None,
        cost: f64::INFINITY,
        expansions,
    }
}

fn trace(parent: &[usize], start: NodeIdx, goal: NodeIdx) -> Vec<NodeIdx> {
    let mut path = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Dijkstra tree from `start` over the same restricted graph as [`astar`].
pub fn restricted_tree<F>(
    g: &NavGraph,
    start: NodeIdx,
    blocked: &[bool],
    edge_ok: F,
) -> (Vec<f64>, Vec<usize>)
where
    F: Fn(NodeIdx, NodeIdx) -> bool,
{
    let mut dist = vec![f64::INFINITY; g.len()];
    let mut parent = vec![usize::MAX; g.len()];
    let mut heap = BinaryHeap::new();
    dist[start] = 0.0;
    heap.push(Reverse((OrdF64(0.0), start)));
    while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for n in g.neighbors(u) {
            let v = n.node;
            if blocked[v] || !edge_ok(u, v) {
                continue;
            }
            let nd = d + n.weight;
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = u;
                heap.push(Reverse((OrdF64(nd), v)));
            }
        }
    }
    (dist, parent)
}

/// A route to the goal, or to the fallback node when the goal cannot be
/// reached.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub path: Vec<NodeIdx>,
    pub cost: f64,
    pub reached_goal: bool,
    pub expansions: usize,
}

impl Plan {
    pub fn next_hop(&self) -> Option<NodeIdx> {
        self.path.get(1).copied()
    }

    pub fn end(&self) -> NodeIdx {
        *self.path.last().expect("plans are never empty")
    }
}

/// Plans toward `goal`; if it is excluded or cut off, heads for the
/// reachable node with the smallest `goal_distance` (ties: smaller index).
pub fn plan_with_fallback<F>(
    g: &NavGraph,
    start: NodeIdx,
    goal: NodeIdx,
    blocked: &[bool],
    edge_ok: F,
    goal_distance: &[f64],
) -> Plan
where
    F: Fn(NodeIdx, NodeIdx) -> bool,
{
    let found = astar(g, start, goal, blocked, &edge_ok);
    if let Some(path) = found.path {
        return Plan {
            path,
            cost: found.cost,
            reached_goal: true,
            expansions: found.expansions,
        };
    }
    let (dist, parent) = restricted_tree(g, start, blocked, &edge_ok);
    let target = (0..g.len())
        .filter(|&i| dist[i].is_finite())
        .min_by(|&a, &b| {
            goal_distance[a]
                .total_cmp(&goal_distance[b])
                .then(a.cmp(&b))
        })
        .unwrap_or(start);
    Plan {
        path: trace(&parent, start, target),
        cost: dist[target],
        reached_goal: false,
        expansions: found.expansions,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fallback {
    pub node: String,
    pub path: Vec<String>,
    pub cost: f64,
}

/// Result of [`plan_path`]. `path` is `None` when the goal is excluded or
/// unreachable, in which case `fallback` is set and `cost` is infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    pub path: Option<Vec<String>>,
    pub cost: f64,
    pub fallback: Option<Fallback>,
    pub expansions: usize,
}

/// Shortest path on the graph with `excluded` nodes removed.
pub fn plan_path<S: AsRef<str> + Ord>(
    g: &NavGraph,
    start: &str,
    goal: &str,
    excluded: &BTreeSet<S>,
) -> Result<PlanResult> {
    let s = g.require(start, "plan start")?;
    let t = g.require(goal, "plan goal")?;
    let mut blocked = vec![false; g.len()];
    for id in excluded {
        blocked[g.require(id.as_ref(), "excluded set")?] = true;
    }
    if blocked[s] {
        return Err(Error::StartExcluded(start.to_string()));
    }
    let ids = |p: &[NodeIdx]| p.iter().map(|&i| g.id(i).to_string()).collect::<Vec<_>>();
    let goal_distance = g.distances_from(t);
    let plan = plan_with_fallback(g, s, t, &blocked, |_, _| true, &goal_distance);
    Ok(if plan.reached_goal {
        PlanResult {
            path: Some(ids(&plan.path)),
            cost: plan.cost,
            fallback: None,
            expansions: plan.expansions,
        }
    } else {
        PlanResult {
            path: None,
            cost: f64::INFINITY,
            fallback: Some(Fallback {
                node: g.id(plan.end()).to_string(),
                path: ids(&plan.path),
                cost: plan.cost,
            }),
            expansions: plan.expansions,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::world::catalog::Region;
    use crate::world::graph::Viewpoint;

    fn graph(points: &[(&str, f64, f64)], edges: &[(&str, &str)]) -> NavGraph {
        let nodes = points
            .iter()
            .map(|&(id, x, y)| Viewpoint {
                id: id.into(),
                position: Vec3::new(x, y, 0.0),
                region: Region::Hallway,
            })
            .collect();
        NavGraph::new(nodes, edges).unwrap()
    }

    fn none() -> BTreeSet<String> {
        BTreeSet::new()
    }

    #[test]
    fn unexcluded_plan_is_shortest() {
        let g = graph(
            &[
                ("a", 0.0, 0.0),
                ("b", 1.0, 1.0),
                ("c", 2.0, 0.0),
                ("d", 1.0, -3.0),
            ],
            &[("a", "b"), ("b", "c"), ("a", "d"), ("d", "c")],
        );
        let r = plan_path(&g, "a", "c", &none()).unwrap();
        assert_eq!(r.path.unwrap(), ["a", "b", "c"]);
        assert!((r.cost - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(r.fallback.is_none());
    }

    #[test]
    fn cut_route_falls_back_to_start_side() {
        let g = graph(
            &[
                ("a", 0.0, 0.0),
                ("b", 1.0, 0.0),
                ("m", 2.0, 0.0),
                ("c", 3.0, 0.0),
            ],
            &[("a", "b"), ("b", "m"), ("m", "c")],
        );
        let ex: BTreeSet<String> = ["m".to_string()].into();
        let r = plan_path(&g, "a", "c", &ex).unwrap();
        assert!(r.path.is_none());
        let fb = r.fallback.unwrap();
        assert_eq!(fb.node, "b");
        assert_eq!(fb.path, ["a", "b"]);
    }

    #[test]
    fn parallel_corridors_take_the_free_one() {
        // short corridor through s1 (2.0 + 2.0), long corridor through l1, l2
        let g = graph(
            &[
                ("a", 0.0, 0.0),
                ("g", 4.0, 0.0),
                ("s1", 2.0, 0.0),
                ("l1", 1.0, 3.0),
                ("l2", 3.0, 3.0),
            ],
            &[
                ("a", "s1"),
                ("s1", "g"),
                ("a", "l1"),
                ("l1", "l2"),
                ("l2", "g"),
            ],
        );
        assert_eq!(
            plan_path(&g, "a", "g", &none()).unwrap().path.unwrap(),
            ["a", "s1", "g"]
        );
        let ex: BTreeSet<String> = ["s1".to_string()].into();
        let r = plan_path(&g, "a", "g", &ex).unwrap();
        assert_eq!(r.path.unwrap(), ["a", "l1", "l2", "g"]);
        assert!((r.cost - (2.0 * 10f64.sqrt() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn excluded_start_and_unknown_nodes() {
        let g = graph(&[("a", 0.0, 0.0), ("b", 1.0, 0.0)], &[("a", "b")]);
        let ex: BTreeSet<String> = ["a".to_string()].into();
        assert!(matches!(
            plan_path(&g, "a", "b", &ex),
            Err(Error::StartExcluded(_))
        ));
        assert!(plan_path(&g, "zz", "b", &none()).is_err());
    }

    #[test]
    fn start_equals_goal() {
        let g = graph(&[("a", 0.0, 0.0), ("b", 1.0, 0.0)], &[("a", "b")]);
        let r = plan_path(&g, "a", "a", &none()).unwrap();
        assert_eq!(r.path.unwrap(), ["a"]);
        assert_eq!(r.cost, 0.0);
    }
}
