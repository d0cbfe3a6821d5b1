use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(n: usize) -> Self {
        UndirectedGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = UndirectedGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = UndirectedGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.edges.insert((u, v));
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = UndirectedGraph::new(n);
        for u in 0..n {
            let v = (u + 1) % n;
            if u != v {
                g.edges.insert((u.min(v), u.max(v)));
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let at = || format!("edges.({u},{v})");
        if u >= self.n || v >= self.n {
            return Err(Error::validation(at(), "unknown vertex"));
        }
        if u == v {
            return Err(Error::validation(at(), "self-loop"));
        }
        if !self.edges.insert((u.min(v), u.max(v))) {
            return Err(Error::validation(at(), "duplicate edge"));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.adjacent(u, v)))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.adjacent(u, v)))
    }
}

/// Weights on independent sets (sorted vertex lists).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FractionalColoring(pub BTreeMap<Vec<usize>, Rational>);

impl FractionalColoring {
    pub fn total(&self) -> Rational {
        self.0.values().cloned().sum()
    }

    /// Nonempty independent supports with nonnegative weights, and every
    /// vertex covered with weight exactly one.
    pub fn validate(&self, graph: &UndirectedGraph) -> Result<()> {
        let mut cover = vec![Rational::zero(); graph.vertex_count()];
        for (set, w) in &self.0 {
            let at = || format!("coloring.{set:?}");
            if w.is_negative() {
                return Err(Error::validation(at(), "negative weight"));
            }
            if set.is_empty() {
                return Err(Error::validation(at(), "empty set"));
            }
            if set.windows(2).any(|p| p[0] >= p[1]) || set.iter().any(|&v| v >= graph.vertex_count()) {
                return Err(Error::validation(at(), "not a sorted vertex set"));
            }
            if !graph.is_independent(set) {
                return Err(Error::validation(at(), "set is not independent"));
            }
            for &v in set {
                cover[v] += w;
            }
        }
        for (v, c) in cover.iter().enumerate() {
            if *c != 1 {
                return Err(Error::validation(
                    format!("coloring.vertex{v}"),
                    format!("covered {c} times"),
                ));
            }
        }
        Ok(())
    }
}
