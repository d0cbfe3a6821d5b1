use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{ArcId, CompatGraph, MrfRInstance, NodeId, Path, PathFlow, ScenarioMode};
use crate::limits::Limits;
use crate::oracles::{cliques_of_size, UndirectedGraph};
use crate::rational::Rational;
use crate::reductions::{Builder, ReductionArtifact};
use crate::solvers::best_response;

#[derive(Debug, Clone)]
pub struct InterdictionLayout {
    pub graph: UndirectedGraph,
    pub clique_size: usize,
    pub removals: usize,
    pub entry: ArcId,
    pub exit: ArcId,
    /// Per vertex, the two middle arcs `[a⁰_v, a¹_v]`.
    pub vertex_arcs: Vec<[ArcId; 2]>,
    /// Per vertex and side, chain node into the gadget and gadget back to the chain.
    pub chain_in: Vec<[ArcId; 2]>,
    pub chain_out: Vec<[ArcId; 2]>,
    /// Per side, the bundle leaving the source and the bundle entering the sink.
    pub source_bundles: [Vec<ArcId>; 2],
    pub sink_bundles: [Vec<ArcId>; 2],
    /// Per side and vertex, hub into the gadget and gadget into the collector.
    pub feeds: [Vec<ArcId>; 2],
    pub drains: [Vec<ArcId>; 2],
    pub direct: Vec<ArcId>,
}

/// Integral restricted-interdiction instance with budget `ℓ + 1` and demand
/// `|V| + ℓ` that is YES iff at most `r` vertices meet every `ℓ`-clique.
pub fn reduce_clique_interdiction(
    graph: &UndirectedGraph,
    clique_size: usize,
    removals: usize,
) -> Result<ReductionArtifact<MrfRInstance, InterdictionLayout>> {
    let n = graph.vertex_count();
    if clique_size < 2 {
        return Err(Error::precondition("clique size must be at least 2"));
    }
    if removals == 0 || removals >= n {
        return Err(Error::precondition(format!("removal budget must lie in 1..{n}")));
    }
    let k = clique_size + 1;
    let one = Rational::one;
    let mut b = Builder::default();
    let s = b.node("s", "source");
    let t = b.node("t", "sink");
    let hubs = [b.node("s0", "hub of side 0"), b.node("s1", "hub of side 1")];
    let collectors = [b.node("t0", "collector of side 0"), b.node("t1", "collector of side 1")];
    let chain: Vec<NodeId> = (1..=n + 1)
        .map(|i| b.node(&format!("v{i}"), format!("chain node {i}")))
        .collect();
    let gadget: Vec<[(NodeId, NodeId); 2]> = (1..=n)
        .map(|i| {
            [0, 1].map(|side| {
                (
                    b.node(&format!("y{side}_{i}"), format!("side {side} head of vertex {}", i - 1)),
                    b.node(&format!("z{side}_{i}"), format!("side {side} tail of vertex {}", i - 1)),
                )
            })
        })
        .collect();
    let entry = b.arc("a_s", s, chain[0], one(), false, "source into the chain");
    let exit = b.arc("a_t", chain[n], t, one(), false, "chain into the sink");
    let mut vertex_arcs = Vec::with_capacity(n);
    let mut chain_in = Vec::with_capacity(n);
    let mut chain_out = Vec::with_capacity(n);
    for i in 0..n {
        let name = i + 1;
        chain_in.push([0, 1].map(|side| {
            b.arc(
                &format!("v{name}>y{side}_{name}"),
                chain[i],
                gadget[i][side].0,
                one(),
                false,
                format!("chain into side {side} of vertex {i}"),
            )
        }));
        vertex_arcs.push([0, 1].map(|side| {
            b.arc(
                &format!("a{side}_{name}"),
                gadget[i][side].0,
                gadget[i][side].1,
                one(),
                false,
                format!("side {side} arc of vertex {i}"),
            )
        }));
        chain_out.push([0, 1].map(|side| {
            b.arc(
                &format!("z{side}_{name}>v{}", name + 1),
                gadget[i][side].1,
                chain[i + 1],
                one(),
                false,
                format!("side {side} of vertex {i} into the chain"),
            )
        }));
    }
    let sizes = [removals, n - removals];
    let source_bundles = [0, 1].map(|side| {
        (1..=sizes[side])
            .map(|j| {
                b.arc(
                    &format!("s>s{side}#{j}"),
                    s,
                    hubs[side],
                    one(),
                    false,
                    format!("source bundle {side} arc {j}"),
                )
            })
            .collect::<Vec<_>>()
    });
    let sink_bundles = [0, 1].map(|side| {
        (1..=sizes[side])
            .map(|j| {
                b.arc(
                    &format!("t{side}>t#{j}"),
                    collectors[side],
                    t,
                    one(),
                    false,
                    format!("sink bundle {side} arc {j}"),
                )
            })
            .collect::<Vec<_>>()
    });
    let feeds = [0, 1].map(|side| {
        (0..n)
            .map(|i| {
                b.arc(
                    &format!("s{side}>y{side}_{}", i + 1),
                    hubs[side],
                    gadget[i][side].0,
                    one(),
                    false,
                    format!("hub {side} into vertex {i}"),
                )
            })
            .collect::<Vec<_>>()
    });
    let drains = [0, 1].map(|side| {
        (0..n)
            .map(|i| {
                b.arc(
                    &format!("z{side}_{}>t{side}", i + 1),
                    gadget[i][side].1,
                    collectors[side],
                    one(),
                    false,
                    format!("vertex {i} into collector {side}"),
                )
            })
            .collect::<Vec<_>>()
    });
    let direct: Vec<ArcId> = (1..=k - 2)
        .map(|j| b.arc(&format!("s>t#{j}"), s, t, one(), false, format!("direct arc {j}")))
        .collect();

    let mut compat = CompatGraph::new();
    for (v, w) in graph.edges() {
        compat.add_edge(vertex_arcs[v][1], vertex_arcs[w][1])?;
    }
    for arcs in &vertex_arcs {
        compat.add_edge(entry, arcs[1])?;
    }
    let mut special = direct.clone();
    special.extend([entry, exit]);
    for (i, &a) in special.iter().enumerate() {
        for &c in &special[i + 1..] {
            compat.add_edge(a, c)?;
        }
    }
    let demand = Rational::from(n + clique_size);
    let output = MrfRInstance::new(b.graph, s, t, k, compat, demand.clone(), true)?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from(k)),
        ("demand".to_string(), demand),
        ("clique_size".to_string(), Rational::from(clique_size)),
        ("removals".to_string(), Rational::from(removals)),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: InterdictionLayout {
            graph: graph.clone(),
            clique_size,
            removals,
            entry,
            exit,
            vertex_arcs,
            chain_in,
            chain_out,
            source_bundles,
            sink_bundles,
            feeds,
            drains,
            direct,
        },
    })
}

fn check_hitting_set(layout: &InterdictionLayout, set: &[usize]) -> Result<()> {
    if set.len() > layout.removals {
        return Err(Error::validation(
            "set",
            format!("{} vertices exceed the budget {}", set.len(), layout.removals),
        ));
    }
    if let Some(v) = set.iter().find(|&&v| v >= layout.graph.vertex_count()) {
        return Err(Error::validation("set", format!("unknown vertex {v}")));
    }
    for clique in cliques_of_size(&layout.graph, layout.clique_size) {
        if !clique.iter().any(|v| set.contains(v)) {
            return Err(Error::validation("set", format!("clique {clique:?} survives")));
        }
    }
    Ok(())
}

/// Reads the removal set off the unit path through both chain ends: the
/// vertices whose side-1 arc it uses.
pub fn interdiction_set_from_flow(
    artifact: &ReductionArtifact<MrfRInstance, InterdictionLayout>,
    flow: &PathFlow,
    limits: &Limits,
) -> Result<Vec<usize>> {
    let inst = &artifact.output;
    let layout = &artifact.layout;
    inst.check_flow(flow)?;
    let (_, loss) = best_response(
        flow,
        &inst.graph,
        inst.budget,
        Some(&inst.compat),
        ScenarioMode::AtMost,
        limits,
    )?;
    if loss > inst.loss_bound() {
        return Err(Error::validation(
            "flow",
            format!("clique scenario loses {loss} > {}", inst.loss_bound()),
        ));
    }
    let (path, _) = flow
        .iter()
        .find(|(p, v)| **v == 1 && p.contains(layout.entry) && p.contains(layout.exit))
        .ok_or_else(|| Error::validation("flow", "no unit path runs through the whole chain"))?;
    let set: Vec<usize> = (0..layout.graph.vertex_count())
        .filter(|&v| path.contains(layout.vertex_arcs[v][1]))
        .collect();
    check_hitting_set(layout, &set)?;
    Ok(set)
}

/// The integral witness for a removal set, padded to exactly `r` vertices.
pub fn flow_from_interdiction_set(
    artifact: &ReductionArtifact<MrfRInstance, InterdictionLayout>,
    set: &[usize],
) -> Result<PathFlow> {
    let layout = &artifact.layout;
    check_hitting_set(layout, set)?;
    let n = layout.graph.vertex_count();
    let mut removed = vec![false; n];
    for &v in set {
        removed[v] = true;
    }
    let mut extra = layout.removals - set.iter().filter(|&&v| v < n).count();
    for flag in removed.iter_mut() {
        if extra == 0 {
            break;
        }
        if !*flag {
            *flag = true;
            extra -= 1;
        }
    }
    let mut flow = PathFlow::new();
    let mut spine = vec![layout.entry];
    for (v, &gone) in removed.iter().enumerate() {
        let side = usize::from(gone);
        spine.extend([
            layout.chain_in[v][side],
            layout.vertex_arcs[v][side],
            layout.chain_out[v][side],
        ]);
    }
    spine.push(layout.exit);
    flow.add(Path::new(spine), Rational::one());
    for side in [0, 1] {
        // Side 0 routes the removed vertices, side 1 the kept ones.
        let vertices = (0..n).filter(|&v| removed[v] == (side == 0));
        for (j, v) in vertices.enumerate() {
            flow.add(
                Path::new(vec![
                    layout.source_bundles[side][j],
                    layout.feeds[side][v],
                    layout.vertex_arcs[v][side],
                    layout.drains[side][v],
                    layout.sink_bundles[side][j],
                ]),
                Rational::one(),
            );
        }
    }
    for &a in &layout.direct {
        flow.add(Path::new(vec![a]), Rational::one());
    }
    artifact.output.check_flow(&flow)?;
    Ok(flow)
}
