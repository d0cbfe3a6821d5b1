use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{ArcId, CompatGraph, MrfRInstance, NodeId};
use crate::oracles::UndirectedGraph;
use crate::rational::Rational;
use crate::reductions::{copy_compat, Builder, ReductionArtifact};
use crate::solvers::max_flow;

#[derive(Debug, Clone)]
pub struct CombineLayout {
    pub graph: UndirectedGraph,
    pub clique: usize,
    /// The source-sink arc standing for each vertex.
    pub vertex_arcs: Vec<ArcId>,
}

#[derive(Debug, Clone)]
pub struct UnionLayout {
    /// Per input, the output id of each input node and arc.
    pub nodes: Vec<Vec<NodeId>>,
    pub arcs: Vec<Vec<ArcId>>,
}

/// Adds one source-sink arc per vertex of `graph` to a budget-2 flow
/// instance; the vertex arcs follow the edges of `graph` and are compatible
/// with every flow arc. Budget `clique + 2`, demand raised by `|V|`.
///
/// The combined instance is NO iff `graph` has a clique of size `clique`
/// and the flow instance is NO, provided `graph` has no larger clique.
/// That bound is the caller's responsibility.
pub fn combine_clique_flow(
    graph: &UndirectedGraph,
    clique: usize,
    flow_inst: &MrfRInstance,
) -> Result<ReductionArtifact<MrfRInstance, CombineLayout>> {
    flow_inst.validate()?;
    if flow_inst.budget != 2 {
        return Err(Error::precondition(format!(
            "flow instance has budget {}, expected 2",
            flow_inst.budget
        )));
    }
    if !flow_inst.compat.is_matching() {
        return Err(Error::precondition(
            "flow instance compatibility graph is not a matching",
        ));
    }
    let cut = max_flow(&flow_inst.graph, flow_inst.source, flow_inst.sink);
    if cut != flow_inst.demand {
        return Err(Error::precondition(format!(
            "maximum flow {cut} differs from the demand {}",
            flow_inst.demand
        )));
    }
    let mut b = Builder::default();
    b.copy(&flow_inst.graph, "flow instance");
    let vertex_arcs: Vec<ArcId> = (0..graph.vertex_count())
        .map(|v| {
            b.arc(
                &format!("vertex{v}"),
                flow_inst.source,
                flow_inst.sink,
                Rational::one(),
                false,
                format!("arc of vertex {v}"),
            )
        })
        .collect();
    let mut compat = CompatGraph::new();
    copy_compat(&flow_inst.compat, |a| a, &mut compat);
    for (v, w) in graph.edges() {
        compat.add_edge(vertex_arcs[v], vertex_arcs[w])?;
    }
    for &a in &vertex_arcs {
        for c in flow_inst.graph.arcs() {
            compat.add_edge(a, c.id)?;
        }
    }
    let budget = clique + 2;
    let demand = &flow_inst.demand + &Rational::from(graph.vertex_count());
    let output = MrfRInstance::new(
        b.graph,
        flow_inst.source,
        flow_inst.sink,
        budget,
        compat,
        demand.clone(),
        flow_inst.integral,
    )?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from(budget)),
        ("demand".to_string(), demand),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: CombineLayout {
            graph: graph.clone(),
            clique,
            vertex_arcs,
        },
    })
}

/// Glues instances at a shared source and sink. Names are prefixed with
/// the 1-based input position; compatibility stays within each input.
pub fn wagner_union(instances: &[MrfRInstance]) -> Result<ReductionArtifact<MrfRInstance, UnionLayout>> {
    let first = instances
        .first()
        .ok_or_else(|| Error::precondition("no instances to combine"))?;
    for (r, inst) in instances.iter().enumerate() {
        inst.validate()?;
        if inst.budget != first.budget {
            return Err(Error::precondition(format!(
                "instance {} has budget {}, expected {}",
                r + 1,
                inst.budget,
                first.budget
            )));
        }
        if inst.integral != first.integral {
            return Err(Error::precondition(format!(
                "instance {} differs in integrality",
                r + 1
            )));
        }
        let cut = max_flow(&inst.graph, inst.source, inst.sink);
        if cut > inst.demand {
            return Err(Error::precondition(format!(
                "instance {} admits flow {cut} above its demand {}",
                r + 1,
                inst.demand
            )));
        }
    }
    let mut b = Builder::default();
    let s = b.node("s", "shared source");
    let t = b.node("t", "shared sink");
    let mut nodes = Vec::new();
    let mut arcs = Vec::new();
    let mut compat = CompatGraph::new();
    for (r, inst) in instances.iter().enumerate() {
        let tag = r + 1;
        let g = &inst.graph;
        let map: Vec<NodeId> = g
            .nodes()
            .map(|v| {
                if v == inst.source {
                    s
                } else if v == inst.sink {
                    t
                } else {
                    b.node(&format!("{tag}.{}", g.node_name(v)), format!("node of instance {tag}"))
                }
            })
            .collect();
        let ids: Vec<ArcId> = g
            .arcs()
            .iter()
            .map(|a| {
                b.arc(
                    &format!("{tag}.{}", a.name),
                    map[a.tail.index()],
                    map[a.head.index()],
                    a.capacity.clone(),
                    false,
                    format!("arc of instance {tag}"),
                )
            })
            .collect();
        copy_compat(&inst.compat, |a| ids[a.index()], &mut compat);
        nodes.push(map);
        arcs.push(ids);
    }
    let demand: Rational = instances.iter().map(|i| i.demand.clone()).sum();
    let output = MrfRInstance::new(b.graph, s, t, first.budget, compat, demand.clone(), first.integral)?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from(first.budget)),
        ("demand".to_string(), demand),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: UnionLayout { nodes, arcs },
    })
}
