use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::world::catalog::Region;

/// Dense node index. Nodes are stored sorted by id, so comparing indices
/// is the same as comparing ids.
pub type NodeIdx = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Viewpoint {
    pub id: String,
    pub position: Vec3,
    pub region: Region,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub node: NodeIdx,
    pub weight: f64,
}

/// Undirected navigation graph with Euclidean edge weights.
#[derive(Clone, Debug)]
pub struct NavGraph {
    nodes: Vec<Viewpoint>,
    index: HashMap<String, NodeIdx>,
    adjacency: Vec<Vec<Neighbor>>,
    edges: Vec<(NodeIdx, NodeIdx)>,
}

impl NavGraph {
    /// Builds a graph from viewpoints and id pairs; weights are derived from
    /// positions.
    pub fn new<S: AsRef<str>>(mut nodes: Vec<Viewpoint>, edges: &[(S, S)]) -> Result<Self> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !n.position.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "node `{}` has a non-finite position",
                    n.id
                )));
            }
            if index.insert(n.id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(n.id.clone()));
            }
        }

        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| Error::DanglingNode {
                context: "edge".into(),
                id: a.to_string(),
            })?;
            let ib = *index.get(b).ok_or_else(|| Error::DanglingNode {
                context: "edge".into(),
                id: b.to_string(),
            })?;
            if ia == ib {
                return Err(Error::SelfLoop(a.to_string()));
            }
            pairs.push((ia.min(ib), ia.max(ib)));
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(
                    nodes[w[0].0].id.clone(),
                    nodes[w[0].1].id.clone(),
                ));
            }
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b) in &pairs {
            let weight = nodes[a].position.distance(nodes[b].position);
            adjacency[a].push(Neighbor { node: b, weight });
            adjacency[b].push(Neighbor { node: a, weight });
        }
        for list in &mut adjacency {
            list.sort_by_key(|n| n.node);
        }

        Ok(NavGraph {
            nodes,
            index,
            adjacency,
            edges: pairs,
        })
    }

    /// Like [`NavGraph::new`] but with externally supplied weights, which
    /// must agree with endpoint distances to within 1e-9 m.
    pub fn with_weights<S: AsRef<str>>(
        nodes: Vec<Viewpoint>,
        edges: &[(S, S, f64)],
    ) -> Result<Self> {
        let plain: Vec<(&str, &str)> = edges
            .iter()
            .map(|(a, b, _)| (a.as_ref(), b.as_ref()))
            .collect();
        let g = NavGraph::new(nodes, &plain)?;
        for (a, b, w) in edges {
            let ia = g.index_of(a.as_ref()).expect("validated");
            let ib = g.index_of(b.as_ref()).expect("validated");
            let expected = g.position(ia).distance(g.position(ib));
            if (expected - w).abs() > 1e-9 || !w.is_finite() {
                return Err(Error::WeightMismatch {
                    a: a.as_ref().to_string(),
                    b: b.as_ref().to_string(),
                    stored: *w,
                    expected,
                });
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Viewpoint] {
        &self.nodes
    }

    pub fn node(&self, i: NodeIdx) -> &Viewpoint {
        &self.nodes[i]
    }

    pub fn id(&self, i: NodeIdx) -> &str {
        &self.nodes[i].id
    }

    pub fn position(&self, i: NodeIdx) -> Vec3 {
        self.nodes[i].position
    }

    pub fn index_of(&self, id: &str) -> Option<NodeIdx> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str, context: &str) -> Result<NodeIdx> {
        self.index_of(id).ok_or_else(|| Error::DanglingNode {
            context: context.to_string(),
            id: id.to_string(),
        })
    }

    pub fn neighbors(&self, i: NodeIdx) -> &[Neighbor] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: NodeIdx) -> usize {
        self.adjacency[i].len()
    }

    /// Undirected edges as `(low, high)` index pairs, sorted.
    pub fn edges(&self) -> &[(NodeIdx, NodeIdx)] {
        &self.edges
    }

    pub fn edge_weight(&self, a: NodeIdx, b: NodeIdx) -> Option<f64> {
        self.adjacency[a]
            .binary_search_by_key(&b, |n| n.node)
            .ok()
            .map(|k| self.adjacency[a][k].weight)
    }

    pub fn are_adjacent(&self, a: NodeIdx, b: NodeIdx) -> bool {
        self.edge_weight(a, b).is_some()
    }

    pub fn path_length(&self, path: &[NodeIdx]) -> Option<f64> {
        path.windows(2)
            .map(|w| self.edge_weight(w[0], w[1]))
            .sum::<Option<f64>>()
    }

    /// Resolves ids and checks consecutive adjacency.
    pub fn resolve_path<S: AsRef<str>>(&self, path: &[S]) -> Result<Vec<NodeIdx>> {
        let idx = path
            .iter()
            .map(|s| self.require(s.as_ref(), "path"))
            .collect::<Result<Vec<_>>>()?;
        for w in idx.windows(2) {
            if !self.are_adjacent(w[0], w[1]) {
                return Err(Error::NotAdjacent(
                    self.id(w[0]).to_string(),
                    self.id(w[1]).to_string(),
                ));
            }
        }
        Ok(idx)
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for n in &self.adjacency[u] {
                if !seen[n.node] {
                    seen[n.node] = true;
                    count += 1;
                    stack.push(n.node);
                }
            }
        }
        count == self.len()
    }

    /// Re-checks the structural invariants (symmetry, weights, no loops).
    pub fn validate(&self) -> Result<()> {
        for (a, list) in self.adjacency.iter().enumerate() {
            for n in list {
                if n.node == a {
                    return Err(Error::SelfLoop(self.id(a).to_string()));
                }
                let back = self.edge_weight(n.node, a);
                let expected = self.position(a).distance(self.position(n.node));
                if back != Some(n.weight) || (n.weight - expected).abs() > 1e-9 {
                    return Err(Error::WeightMismatch {
                        a: self.id(a).to_string(),
                        b: self.id(n.node).to_string(),
                        stored: n.weight,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }
}

impl NavGraph {
    /// Single-source shortest distances; unreachable nodes are infinite.
    pub fn distances_from(&self, source: NodeIdx) -> Vec<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((OrdF64(0.0), source)));
        while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for n in &self.adjacency[u] {
                let nd = d + n.weight;
                if nd < dist[n.node] {
                    dist[n.node] = nd;
                    heap.push(Reverse((OrdF64(nd), n.node)));
                }
            }
        }
        dist
    }
}

/// Total order over finite, non-NaN costs for heap use.
#[derive(Clone, Copy, Debug)]
pub(crate) struct OrdF64(pub f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
