use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instances::flow::{Path, PathFlow};
use crate::instances::graph::{ArcId, CompatGraph, Digraph, NodeId};
use crate::rational::Rational;

/// Single-commodity robust flow instance `(D, s, t, u, k)` with an optional
/// decision threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrfInstance {
    pub graph: Digraph,
    pub source: NodeId,
    pub sink: NodeId,
    pub budget: usize,
    pub threshold: Option<Rational>,
}

impl MrfInstance {
    pub fn new(
        graph: Digraph,
        source: NodeId,
        sink: NodeId,
        budget: usize,
        threshold: Option<Rational>,
    ) -> Result<Self> {
        let inst = MrfInstance {
            graph,
            source,
            sink,
            budget,
            threshold,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_endpoints(&self.graph, self.source, self.sink, "instance")?;
        if self.budget == 0 {
            return Err(Error::validation("budget", "budget must be at least 1"));
        }
        if let Some(l) = &self.threshold {
            if l.is_negative() {
                return Err(Error::validation("threshold", "threshold must be nonnegative"));
            }
        }
        Ok(())
    }

    /// Arcs the interdictor may remove.
    pub fn interdictable_arcs(&self) -> Vec<ArcId> {
        interdictable(&self.graph)
    }

    /// Validates paths and capacities. No demand is imposed.
    pub fn check_flow(&self, flow: &PathFlow) -> Result<()> {
        for (path, _) in flow.iter() {
            if path.commodity.is_some() {
                return Err(Error::validation(
                    format!("flow.{path}"),
                    "single-commodity flow carries a commodity tag",
                ));
            }
            path.validate(&self.graph, self.source, self.sink)?;
        }
        check_capacities(&self.graph, flow)
    }

    pub fn is_feasible(&self, flow: &PathFlow) -> bool {
        self.check_flow(flow).is_ok()
    }
}

/// Restricted-interdiction instance: a unit-capacity DAG, a compatibility
/// graph on its arcs, and a demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrfRInstance {
    pub graph: Digraph,
    pub source: NodeId,
    pub sink: NodeId,
    pub budget: usize,
    pub compat: CompatGraph,
    pub demand: Rational,
    pub integral: bool,
}

impl MrfRInstance {
    pub fn new(
        graph: Digraph,
        source: NodeId,
        sink: NodeId,
        budget: usize,
        compat: CompatGraph,
        demand: Rational,
        integral: bool,
    ) -> Result<Self> {
        let inst = MrfRInstance {
            graph,
            source,
            sink,
            budget,
            compat,
            demand,
            integral,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        check_endpoints(&self.graph, self.source, self.sink, "instance")?;
        if self.budget == 0 {
            return Err(Error::validation("budget", "budget must be at least 1"));
        }
        self.graph.topological_nodes()?;
        for arc in self.graph.arcs() {
            if arc.capacity != 1 {
                return Err(Error::validation(
                    format!("arcs.{}", arc.name),
                    "restricted-interdiction instances have unit capacities",
                ));
            }
            if arc.immune {
                return Err(Error::validation(
                    format!("arcs.{}", arc.name),
                    "immune arcs are not allowed here",
                ));
            }
        }
        self.compat.validate(&self.graph)?;
        if self.demand.is_negative() {
            return Err(Error::validation("demand", "demand must be nonnegative"));
        }
        Ok(())
    }

    /// Paths valid, capacities respected, and total value equal to the demand.
    pub fn check_flow(&self, flow: &PathFlow) -> Result<()> {
        for (path, _) in flow.iter() {
            path.validate(&self.graph, self.source, self.sink)?;
        }
        check_capacities(&self.graph, flow)?;
        let value = flow.value();
        if value != self.demand {
            return Err(Error::validation(
                "flow.value",
                format!("flow value {value} differs from demand {}", self.demand),
            ));
        }
        if self.integral && flow.iter().any(|(_, v)| !v.is_integer()) {
            return Err(Error::validation(
                "flow",
                "integral instance needs integral path values",
            ));
        }
        Ok(())
    }

    pub fn is_feasible(&self, flow: &PathFlow) -> bool {
        self.check_flow(flow).is_ok()
    }

    /// The loss bound `k - 1` every clique scenario must respect.
    pub fn loss_bound(&self) -> Rational {
        Rational::from(self.budget - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commodity {
    pub name: String,
    pub source: NodeId,
    pub sink: NodeId,
    pub demand: Rational,
}

/// Multicommodity instance. Commodity `i` is `commodities[i]`; path flows tag
/// their paths with that index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrfMInstance {
    pub graph: Digraph,
    pub budget: usize,
    pub commodities: Vec<Commodity>,
    pub designated: usize,
}

impl MrfMInstance {
    pub fn new(graph: Digraph, budget: usize, commodities: Vec<Commodity>, designated: usize) -> Result<Self> {
        let inst = MrfMInstance {
            graph,
            budget,
            commodities,
            designated,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::validation("budget", "budget must be at least 1"));
        }
        if self.graph.arc_count() == 0 {
            return Err(Error::validation("arcs", "max capacity undefined without arcs"));
        }
        let mut names = BTreeSet::new();
        for (i, c) in self.commodities.iter().enumerate() {
            let path = format!("commodities[{i}]");
            if !names.insert(c.name.as_str()) {
                return Err(Error::validation(path, "duplicate commodity id"));
            }
            check_endpoints(&self.graph, c.source, c.sink, &path)?;
            if !c.demand.is_positive() {
                return Err(Error::validation(path, "demand must be positive"));
            }
        }
        if self.designated >= self.commodities.len() {
            return Err(Error::validation("designated", "no such commodity"));
        }
        Ok(())
    }

    /// `M`, the largest capacity.
    pub fn max_capacity(&self) -> Rational {
        self.graph.max_capacity().expect("validated: at least one arc")
    }

    /// `kM - 1`.
    pub fn loss_bound(&self) -> Rational {
        Rational::from(self.budget) * self.max_capacity() - Rational::one()
    }

    pub fn interdictable_arcs(&self) -> Vec<ArcId> {
        interdictable(&self.graph)
    }

    /// Paths valid for their commodity, shared capacities respected, and
    /// every demand met exactly.
    pub fn check_flow(&self, flow: &PathFlow) -> Result<()> {
        let mut shipped = vec![Rational::zero(); self.commodities.len()];
        for (path, value) in flow.iter() {
            let i = path
                .commodity
                .ok_or_else(|| Error::validation(format!("flow.{path}"), "path lacks a commodity tag"))?;
            let c = self
                .commodities
                .get(i)
                .ok_or_else(|| Error::validation(format!("flow.{path}"), "unknown commodity"))?;
            path.validate(&self.graph, c.source, c.sink)?;
            shipped[i] += value;
        }
        check_capacities(&self.graph, flow)?;
        for (i, c) in self.commodities.iter().enumerate() {
            if shipped[i] != c.demand {
                return Err(Error::validation(
                    format!("commodities[{i}]"),
                    format!("ships {} but demand is {}", shipped[i], c.demand),
                ));
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, flow: &PathFlow) -> bool {
        self.check_flow(flow).is_ok()
    }
}

fn interdictable(graph: &Digraph) -> Vec<ArcId> {
    graph.arcs().iter().filter(|a| !a.immune).map(|a| a.id).collect()
}

fn check_endpoints(graph: &Digraph, s: NodeId, t: NodeId, path: &str) -> Result<()> {
    for v in [s, t] {
        if v.index() >= graph.node_count() {
            return Err(Error::validation(path, format!("unknown node {v:?}")));
        }
    }
    if s == t {
        return Err(Error::validation(path, "source and sink coincide"));
    }
    Ok(())
}

/// Per-arc aggregate flow against capacity; reports the first violated arc.
pub fn check_capacities(graph: &Digraph, flow: &PathFlow) -> Result<()> {
    let loads = flow.arc_loads(graph.arc_count());
    for arc in graph.arcs() {
        let load = &loads[arc.id.index()];
        if load > &arc.capacity {
            return Err(Error::validation(
                format!("arcs.{}", arc.name),
                format!("flow {load} exceeds capacity {}", arc.capacity),
            ));
        }
    }
    Ok(())
}

/// Builds a path from arc names; convenience for tests and fixtures.
pub fn path_by_names(graph: &Digraph, names: &[&str]) -> Result<Path> {
    let arcs = names
        .iter()
        .map(|n| {
            graph
                .arc_by_name(n)
                .ok_or_else(|| Error::validation(format!("arcs.{n}"), "unknown arc"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Path::new(arcs))
}
