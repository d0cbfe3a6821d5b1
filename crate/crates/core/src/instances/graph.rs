use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Debug for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub name: String,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Rational,
    /// Immune arcs can never be interdicted.
    pub immune: bool,
}

/// A digraph with named nodes and id-distinguished (possibly parallel) arcs.
///
/// Arc ids are dense indices assigned in insertion order; every deterministic
/// ordering in the crate is by these indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Digraph {
    node_names: Vec<String>,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
    node_lookup: HashMap<String, NodeId>,
    arc_lookup: HashMap<String, ArcId>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> Result<NodeId> {
        let name = name.into();
        if self.node_lookup.contains_key(&name) {
            return Err(Error::validation(format!("nodes.{name}"), "duplicate node name"));
        }
        let id = NodeId(self.node_names.len() as u32);
        self.node_lookup.insert(name.clone(), id);
        self.node_names.push(name);
        self.out_arcs.push(Vec::new());
        self.in_arcs.push(Vec::new());
        Ok(id)
    }

    pub fn add_arc(
        &mut self,
        name: impl Into<String>,
        tail: NodeId,
        head: NodeId,
        capacity: Rational,
        immune: bool,
    ) -> Result<ArcId> {
        let name = name.into();
        let path = format!("arcs.{name}");
        if self.arc_lookup.contains_key(&name) {
            return Err(Error::validation(path, "duplicate arc id"));
        }
        if tail.index() >= self.node_names.len() || head.index() >= self.node_names.len() {
            return Err(Error::validation(path, "endpoint is not a declared node"));
        }
        if tail == head {
            return Err(Error::validation(path, "self-loops are not allowed"));
        }
        if capacity.is_negative() {
            return Err(Error::validation(path, "negative capacity"));
        }
        let id = ArcId(self.arcs.len() as u32);
        self.arc_lookup.insert(name.clone(), id);
        self.out_arcs[tail.index()].push(id);
        self.in_arcs[head.index()].push(id);
        self.arcs.push(Arc {
            id,
            name,
            tail,
            head,
            capacity,
            immune,
        });
        Ok(id)
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_names.len() as u32).map(NodeId)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.index()]
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.node_names[id.index()]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.node_lookup.get(name).copied()
    }

    pub fn arc_by_name(&self, name: &str) -> Option<ArcId> {
        self.arc_lookup.get(name).copied()
    }

    pub fn out_arcs(&self, node: NodeId) -> &[ArcId] {
        &self.out_arcs[node.index()]
    }

    pub fn in_arcs(&self, node: NodeId) -> &[ArcId] {
        &self.in_arcs[node.index()]
    }

    pub fn capacity(&self, id: ArcId) -> &Rational {
        &self.arcs[id.index()].capacity
    }

    /// Largest arc capacity, `None` for an arcless graph.
    pub fn max_capacity(&self) -> Option<Rational> {
        self.arcs.iter().map(|a| a.capacity.clone()).max()
    }

    pub fn has_immune_arcs(&self) -> bool {
        self.arcs.iter().any(|a| a.immune)
    }

    pub fn out_capacity(&self, node: NodeId) -> Rational {
        self.out_arcs(node).iter().map(|&a| self.capacity(a)).sum()
    }

    pub fn in_capacity(&self, node: NodeId) -> Rational {
        self.in_arcs(node).iter().map(|&a| self.capacity(a)).sum()
    }

    /// Nodes in topological order (Kahn, smallest index first). Fails with
    /// the node names of some directed cycle.
    pub fn topological_nodes(&self) -> Result<Vec<NodeId>> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = (0..n).map(|v| self.in_arcs[v].len()).collect();
        let mut ready: BinaryHeap<Reverse<NodeId>> =
            self.nodes().filter(|v| indegree[v.index()] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &a in self.out_arcs(v) {
                let h = self.arcs[a.index()].head;
                indegree[h.index()] -= 1;
                if indegree[h.index()] == 0 {
                    ready.push(Reverse(h));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(Error::Cycle(self.find_cycle(&indegree)))
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_nodes().is_ok()
    }

    // Walks backwards through nodes that were never released by Kahn's
    // algorithm; every such node has a remaining predecessor, so the walk
    // must revisit a node.
    fn find_cycle(&self, indegree: &[usize]) -> Vec<String> {
        let start = match (0..self.node_count()).find(|&v| indegree[v] > 0) {
            Some(v) => v,
            None => return Vec::new(),
        };
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            if let Some(&pos) = seen.get(&v) {
                let mut cycle: Vec<String> = walk[pos..]
                    .iter()
                    .map(|&u: &usize| self.node_names[u].clone())
                    .collect();
                cycle.reverse();
                return cycle;
            }
            seen.insert(v, walk.len());
            walk.push(v);
            let pred = self.in_arcs[v]
                .iter()
                .map(|&a| self.arcs[a.index()].tail.index())
                .find(|&u| indegree[u] > 0)
                .expect("unreleased node keeps an unreleased predecessor");
            v = pred;
        }
    }

    /// Nodes reachable from `from` (including itself).
    pub fn reachable_from(&self, from: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![from];
        seen[from.index()] = true;
        while let Some(v) = stack.pop() {
            for &a in self.out_arcs(v) {
                let h = self.arcs[a.index()].head;
                if !seen[h.index()] {
                    seen[h.index()] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }
}

/// Undirected graph on arc ids restricting which arc sets may fail together.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompatGraph {
    edges: BTreeSet<(ArcId, ArcId)>,
    adjacency: BTreeMap<ArcId, BTreeSet<ArcId>>,
}

impl CompatGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: ArcId, b: ArcId) -> (ArcId, ArcId) {
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Adds `{a, b}`; re-adding an existing edge is a no-op.
    pub fn add_edge(&mut self, a: ArcId, b: ArcId) -> Result<()> {
        if a == b {
            return Err(Error::validation(
                format!("compat.{a:?}"),
                "compatibility edges must join distinct arcs",
            ));
        }
        if self.edges.insert(Self::key(a, b)) {
            self.adjacency.entry(a).or_default().insert(b);
            self.adjacency.entry(b).or_default().insert(a);
        }
        Ok(())
    }

    pub fn contains(&self, a: ArcId, b: ArcId) -> bool {
        a != b && self.edges.contains(&Self::key(a, b))
    }

    pub fn edges(&self) -> impl Iterator<Item = (ArcId, ArcId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, a: ArcId) -> usize {
        self.adjacency.get(&a).map_or(0, |s| s.len())
    }

    pub fn neighbors(&self, a: ArcId) -> impl Iterator<Item = ArcId> + '_ {
        self.adjacency.get(&a).into_iter().flatten().copied()
    }

    pub fn is_clique(&self, arcs: &[ArcId]) -> bool {
        arcs.iter()
            .enumerate()
            .all(|(i, &a)| arcs[i + 1..].iter().all(|&b| self.contains(a, b)))
    }

    /// Whether every arc has compatibility degree at most one.
    pub fn is_matching(&self) -> bool {
        self.adjacency.values().all(|n| n.len() <= 1)
    }

    pub fn validate(&self, graph: &Digraph) -> Result<()> {
        for &(a, b) in &self.edges {
            for x in [a, b] {
                if x.index() >= graph.arc_count() {
                    return Err(Error::validation(
                        format!("compat.{x:?}"),
                        "edge endpoint is not an arc of the digraph",
                    ));
                }
            }
        }
        Ok(())
    }

    /// The complete compatibility graph on the given arcs.
    pub fn complete(arcs: impl IntoIterator<Item = ArcId>) -> Self {
        let arcs: Vec<ArcId> = arcs.into_iter().collect();
        let mut h = CompatGraph::new();
        for (i, &a) in arcs.iter().enumerate() {
            for &b in &arcs[i + 1..] {
                h.add_edge(a, b).expect("distinct arcs");
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> (Digraph, NodeId, NodeId) {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        (g, s, t)
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let (mut g, s, t) = two_node();
        assert!(g.add_arc("x", s, s, Rational::one(), false).is_err());
        g.add_arc("a", s, t, Rational::one(), false).unwrap();
        assert!(g.add_arc("a", s, t, Rational::one(), false).is_err());
        assert!(g.add_node("s").is_err());
        assert!(g.add_arc("b", s, NodeId(9), Rational::one(), false).is_err());
    }

    #[test]
    fn cycle_is_named() {
        let mut g = Digraph::new();
        let u = g.add_node("u").unwrap();
        let v = g.add_node("v").unwrap();
        let w = g.add_node("w").unwrap();
        g.add_arc("uv", u, v, Rational::one(), false).unwrap();
        g.add_arc("vw", v, w, Rational::one(), false).unwrap();
        g.add_arc("wv", w, v, Rational::one(), false).unwrap();
        match g.topological_nodes() {
            Err(Error::Cycle(nodes)) => {
                let mut nodes = nodes;
                nodes.sort();
                assert_eq!(nodes, vec!["v".to_string(), "w".to_string()]);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn compat_rejects_self_pairs() {
        let mut h = CompatGraph::new();
        assert!(h.add_edge(ArcId(1), ArcId(1)).is_err());
        h.add_edge(ArcId(2), ArcId(1)).unwrap();
        assert!(h.contains(ArcId(1), ArcId(2)));
        assert_eq!(h.edge_count(), 1);
        assert!(h.is_matching());
    }
}
