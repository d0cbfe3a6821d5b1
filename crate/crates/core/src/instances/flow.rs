use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::instances::graph::{ArcId, Digraph, NodeId};
use crate::rational::Rational;

/// An arc-id sequence, optionally tagged with the commodity it serves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub commodity: Option<usize>,
    pub arcs: Vec<ArcId>,
}

impl Path {
    pub fn new(arcs: Vec<ArcId>) -> Self {
        Path { commodity: None, arcs }
    }

    pub fn for_commodity(commodity: usize, arcs: Vec<ArcId>) -> Self {
        Path {
            commodity: Some(commodity),
            arcs,
        }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, arc: ArcId) -> bool {
        self.arcs.contains(&arc)
    }

    pub fn meets(&self, scenario: &Scenario) -> bool {
        self.arcs.iter().any(|a| scenario.contains(*a))
    }

    /// Checks contiguity, simplicity and endpoints against `graph`.
    pub fn validate(&self, graph: &Digraph, source: NodeId, sink: NodeId) -> Result<()> {
        let where_ = || format!("flow.{self}");
        if self.arcs.is_empty() {
            return Err(Error::validation(where_(), "empty path"));
        }
        if self.arcs.iter().any(|a| a.index() >= graph.arc_count()) {
            return Err(Error::validation(where_(), "unknown arc"));
        }
        let first = graph.arc(self.arcs[0]);
        if first.tail != source {
            return Err(Error::validation(where_(), "path does not start at the source"));
        }
        let mut seen = BTreeSet::from([first.tail]);
        let mut at = first.tail;
        for &a in &self.arcs {
            let arc = graph.arc(a);
            if arc.tail != at {
                return Err(Error::validation(
                    where_(),
                    format!("arc {} is not contiguous", arc.name),
                ));
            }
            if !seen.insert(arc.head) {
                return Err(Error::validation(where_(), "path repeats a node"));
            }
            at = arc.head;
        }
        if at != sink {
            return Err(Error::validation(where_(), "path does not end at the sink"));
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, graph: &'a Digraph) -> PathDisplay<'a> {
        PathDisplay { path: self, graph }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.commodity {
            write!(f, "[{c}]")?;
        }
        write!(f, "<")?;
        for (i, a) in self.arcs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a.0)?;
        }
        write!(f, ">")
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    graph: &'a Digraph,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .path
            .arcs
            .iter()
            .map(|&a| self.graph.arc(a).name.as_str())
            .collect();
        write!(f, "{}", names.join(" "))
    }
}

/// A set of failed arcs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario(BTreeSet<ArcId>);

impl Scenario {
    pub fn empty() -> Self {
        Scenario::default()
    }

    pub fn contains(&self, arc: ArcId) -> bool {
        self.0.contains(&arc)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.0.iter().copied()
    }

    pub fn insert(&mut self, arc: ArcId) -> bool {
        self.0.insert(arc)
    }

    pub fn is_subset(&self, other: &Scenario) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<ArcId> for Scenario {
    fn from_iter<I: IntoIterator<Item = ArcId>>(iter: I) -> Self {
        Scenario(iter.into_iter().collect())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|a| a.0.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// Sparse path flow. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathFlow(BTreeMap<Path, Rational>);

impl PathFlow {
    pub fn new() -> Self {
        PathFlow::default()
    }

    /// Adds `value` to the path's entry, dropping it if the sum vanishes.
    pub fn add(&mut self, path: Path, value: Rational) {
        if value.is_zero() {
            return;
        }
        let entry = self.0.entry(path).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.0.retain(|_, v| !v.is_zero());
        }
    }

    pub fn get(&self, path: &Path) -> Rational {
        self.0.get(path).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Path, &Rational)> {
        self.0.iter()
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total value `Σ x_P`.
    pub fn value(&self) -> Rational {
        self.0.values().sum()
    }

    /// Value carried by paths of one commodity.
    pub fn commodity_value(&self, commodity: usize) -> Rational {
        self.0
            .iter()
            .filter(|(p, _)| p.commodity == Some(commodity))
            .map(|(_, v)| v)
            .sum()
    }

    /// Aggregate flow on one arc.
    pub fn arc_flow(&self, arc: ArcId) -> Rational {
        self.0.iter().filter(|(p, _)| p.contains(arc)).map(|(_, v)| v).sum()
    }

    /// Aggregate flow on every arc, indexed by arc id.
    pub fn arc_loads(&self, arc_count: usize) -> Vec<Rational> {
        let mut loads = vec![Rational::zero(); arc_count];
        for (p, v) in &self.0 {
            for a in &p.arcs {
                if a.index() < arc_count {
                    loads[a.index()] += v;
                }
            }
        }
        loads
    }

    /// Flow lost when `scenario` fails: each path meeting it counts once.
    pub fn loss(&self, scenario: &Scenario) -> Rational {
        self.0.iter().filter(|(p, _)| p.meets(scenario)).map(|(_, v)| v).sum()
    }

    pub fn scale(&self, factor: &Rational) -> PathFlow {
        let mut out = PathFlow::new();
        for (p, v) in &self.0 {
            out.add(p.clone(), v * factor);
        }
        out
    }

    pub fn merge(&mut self, other: &PathFlow) {
        for (p, v) in other.iter() {
            self.add(p.clone(), v.clone());
        }
    }

    pub fn into_entries(self) -> BTreeMap<Path, Rational> {
        self.0
    }
}

impl FromIterator<(Path, Rational)> for PathFlow {
    fn from_iter<I: IntoIterator<Item = (Path, Rational)>>(iter: I) -> Self {
        let mut flow = PathFlow::new();
        for (p, v) in iter {
            flow.add(p, v);
        }
        flow
    }
}

/// Free-function form of [`PathFlow::loss`].
pub fn loss(flow: &PathFlow, scenario: &Scenario) -> Rational {
    flow.loss(scenario)
}

/// Free-function form of [`PathFlow::arc_flow`].
pub fn arc_flow(flow: &PathFlow, arc: ArcId) -> Rational {
    flow.arc_flow(arc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel() -> (Digraph, NodeId, NodeId, ArcId, ArcId) {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        let a = g.add_arc("a", s, t, Rational::one(), false).unwrap();
        let b = g.add_arc("b", s, t, Rational::one(), false).unwrap();
        (g, s, t, a, b)
    }

    #[test]
    fn zero_flow_loses_nothing() {
        let flow = PathFlow::new();
        assert_eq!(flow.loss(&Scenario::from_iter([ArcId(0)])), Rational::zero());
    }

    #[test]
    fn loss_on_parallel_arcs() {
        let (_, _, _, a, b) = parallel();
        let flow: PathFlow = [
            (Path::new(vec![a]), Rational::one()),
            (Path::new(vec![b]), Rational::one()),
        ]
        .into_iter()
        .collect();
        assert_eq!(flow.loss(&Scenario::from_iter([a])), Rational::one());
        assert_eq!(flow.arc_flow(a), Rational::one());
        assert_eq!(flow.value(), Rational::from_int(2));
    }

    #[test]
    fn loss_counts_a_path_once() {
        let flow: PathFlow = [(Path::new(vec![ArcId(0), ArcId(1)]), Rational::one())]
            .into_iter()
            .collect();
        let s = Scenario::from_iter([ArcId(0), ArcId(1)]);
        assert_eq!(flow.loss(&s), Rational::one());
    }

    #[test]
    fn zero_entries_are_dropped() {
        let mut flow = PathFlow::new();
        let p = Path::new(vec![ArcId(0)]);
        flow.add(p.clone(), Rational::one());
        flow.add(p, -Rational::one());
        assert!(flow.is_empty());
    }

    #[test]
    fn path_validation() {
        let (mut g, s, t, a, _) = parallel();
        let u = g.add_node("u").unwrap();
        let c = g.add_arc("c", t, u, Rational::one(), false).unwrap();
        assert!(Path::new(vec![a]).validate(&g, s, t).is_ok());
        assert!(Path::new(vec![c]).validate(&g, s, t).is_err());
        assert!(Path::new(vec![a, c]).validate(&g, s, u).is_ok());
        assert!(Path::new(vec![]).validate(&g, s, t).is_err());
    }
}
