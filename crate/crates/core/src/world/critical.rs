//! Critical hops: consecutive path nodes whose one-hop neighbor sets are
//! disjoint, i.e. no third viewpoint bypasses the edge between them.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::world::graph::{NavGraph, NodeIdx};

/// True when `a` and `b` share no neighbor.
pub fn is_critical_hop(g: &NavGraph, a: NodeIdx, b: NodeIdx) -> bool {
    // both lists are sorted by index
    let (mut i, mut j) = (0, 0);
    let (na, nb) = (g.neighbors(a), g.neighbors(b));
    while i < na.len() && j < nb.len() {
        match na[i].node.cmp(&nb[j].node) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Critical nodes of an index path (every node but the last is a candidate).
pub fn critical_indices(g: &NavGraph, path: &[NodeIdx]) -> BTreeSet<NodeIdx> {
    path.windows(2)
        .filter(|w| is_critical_hop(g, w[0], w[1]))
        .map(|w| w[0])
        .collect()
}

/// Critical nodes of a path given by ids. Consecutive ids must be adjacent.
pub fn critical_nodes<S: AsRef<str>>(g: &NavGraph, path: &[S]) -> Result<BTreeSet<String>> {
    let idx = g.resolve_path(path)?;
    Ok(critical_indices(g, &idx)
        .into_iter()
        .map(|i| g.id(i).to_string())
        .collect())
}

/// Nodes that are critical for at least one incident edge. Every edge is a
/// shortest path between its endpoints because weights are Euclidean.
pub fn critical_anywhere(g: &NavGraph) -> Vec<bool> {
    (0..g.len())
        .map(|a| g.neighbors(a).iter().any(|n| is_critical_hop(g, a, n.node)))
        .collect()
}
