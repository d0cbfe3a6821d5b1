//! Deterministic instance transformations with witness maps in both
//! directions.

mod coloring;
mod combine;
mod interdiction;
mod multicommodity;
mod normalize;
mod pipeline;
mod wrapper;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{ArcId, CompatGraph, Digraph, MrfRInstance, NodeId};
use crate::rational::Rational;

pub use crate::oracles::FractionalColoring;
pub use coloring::{coloring_from_flow, flow_from_coloring, reduce_coloring_to_mrfr, ColoringLayout};
pub use combine::{combine_clique_flow, wagner_union, CombineLayout, UnionLayout};
pub use interdiction::{
    flow_from_interdiction_set, interdiction_set_from_flow, reduce_clique_interdiction, InterdictionLayout,
};
pub use multicommodity::{
    check_commodity_arc_property, check_properties, hat_flow, lift_restricted_flow, reduce_mrfr_to_mrfm,
    MulticommodityLayout, PropertyCheck, PropertyReport,
};
pub use normalize::{
    matchingize_compat, normalize_mrfr, pad_budget, saturate_demand, PadLayout, SplitLayout, SubdivisionLayout,
};
pub use pipeline::{mrfr_to_mrf, Pipeline};
pub use wrapper::{
    base_flow, expand_flow, expand_immune, lift_flow, project_flow, reduce_mrfm_to_mrf, ExpandLayout, WrapperLayout,
};

/// Role of every element of a constructed instance, keyed `node:<name>`,
/// `arc:<name>` or `commodity:<name>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance(BTreeMap<String, String>);

impl Provenance {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tag(&mut self, key: String, role: impl Into<String>) {
        self.0.insert(key, role.into());
    }

    /// Every node and arc of `graph` carries a role.
    pub fn check_total(&self, graph: &Digraph) -> Result<()> {
        for v in graph.nodes() {
            let key = format!("node:{}", graph.node_name(v));
            if !self.0.contains_key(&key) {
                return Err(Error::validation(key, "element has no role"));
            }
        }
        for a in graph.arcs() {
            let key = format!("arc:{}", a.name);
            if !self.0.contains_key(&key) {
                return Err(Error::validation(key, "element has no role"));
            }
        }
        Ok(())
    }
}

/// A transformed instance with the role of each element, the derived
/// constants, and the reduction-specific index needed by witness maps.
#[derive(Debug, Clone)]
pub struct ReductionArtifact<T, L> {
    pub output: T,
    pub provenance: Provenance,
    pub parameters: BTreeMap<String, Rational>,
    pub layout: L,
}

impl<T, L> ReductionArtifact<T, L> {
    pub fn parameter(&self, name: &str) -> Option<&Rational> {
        self.parameters.get(name)
    }
}

/// Incremental digraph construction that tags every element and keeps names
/// unique by suffixing `~2`, `~3`, ...
#[derive(Default)]
pub(crate) struct Builder {
    pub graph: Digraph,
    pub provenance: Provenance,
}

impl Builder {
    fn fresh(taken: impl Fn(&str) -> bool, base: &str) -> String {
        if !taken(base) {
            return base.to_string();
        }
        (2..)
            .map(|i| format!("{base}~{i}"))
            .find(|n| !taken(n))
            .expect("unbounded suffixes")
    }

    pub fn node(&mut self, name: &str, role: impl Into<String>) -> NodeId {
        let name = Self::fresh(|n| self.graph.node_by_name(n).is_some(), name);
        self.provenance.tag(format!("node:{name}"), role);
        self.graph.add_node(name).expect("fresh name")
    }

    pub fn arc(
        &mut self,
        name: &str,
        tail: NodeId,
        head: NodeId,
        capacity: Rational,
        immune: bool,
        role: impl Into<String>,
    ) -> ArcId {
        let name = Self::fresh(|n| self.graph.arc_by_name(n).is_some(), name);
        self.provenance.tag(format!("arc:{name}"), role);
        self.graph
            .add_arc(name, tail, head, capacity, immune)
            .expect("endpoints exist and capacity is nonnegative")
    }

    /// Copies all nodes of `graph` with their names and ids.
    pub fn copy_nodes(&mut self, graph: &Digraph, role: &str) {
        debug_assert_eq!(self.graph.node_count(), 0);
        for v in graph.nodes() {
            self.node(graph.node_name(v), format!("{role} node"));
        }
    }

    /// Copies all nodes and arcs of `graph` with their names and ids.
    pub fn copy(&mut self, graph: &Digraph, role: &str) {
        self.copy_nodes(graph, role);
        for a in graph.arcs() {
            self.arc(
                &a.name,
                a.tail,
                a.head,
                a.capacity.clone(),
                a.immune,
                format!("{role} arc"),
            );
        }
    }
}

pub(crate) fn integer_demand(inst: &MrfRInstance) -> Result<usize> {
    if !inst.demand.is_integer() {
        return Err(Error::precondition(format!("demand {} is not an integer", inst.demand)));
    }
    inst.demand
        .to_usize()
        .ok_or_else(|| Error::precondition("demand out of range"))
}

pub(crate) fn copy_compat(compat: &CompatGraph, map: impl Fn(ArcId) -> ArcId, into: &mut CompatGraph) {
    for (a, b) in compat.edges() {
        into.add_edge(map(a), map(b))
            .expect("distinct arcs map to distinct arcs");
    }
}
