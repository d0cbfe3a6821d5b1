use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instances::flow::{Path, Scenario};
use crate::instances::graph::{ArcId, CompatGraph, Digraph, NodeId};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioMode {
    /// Exactly `k` arcs.
    Exactly,
    /// Between zero and `k` arcs.
    AtMost,
}

/// All simple `source`-`sink` paths, lexicographic by arc-id sequence.
pub fn enumerate_st_paths(graph: &Digraph, source: NodeId, sink: NodeId, limits: &Limits) -> Result<Vec<Path>> {
    let useful = reaches(graph, sink);
    let mut out = Vec::new();
    let mut on_path = vec![false; graph.node_count()];
    let mut stack: Vec<ArcId> = Vec::new();
    if useful[source.index()] && source != sink {
        on_path[source.index()] = true;
        dfs(graph, source, sink, &useful, &mut on_path, &mut stack, &mut out, limits)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    graph: &Digraph,
    at: NodeId,
    sink: NodeId,
    useful: &[bool],
    on_path: &mut [bool],
    stack: &mut Vec<ArcId>,
    out: &mut Vec<Path>,
    limits: &Limits,
) -> Result<()> {
    for &a in graph.out_arcs(at) {
        let h = graph.arc(a).head;
        if on_path[h.index()] || !useful[h.index()] {
            continue;
        }
        stack.push(a);
        if h == sink {
            out.push(Path::new(stack.clone()));
            limits.check_paths(out.len())?;
        } else {
            on_path[h.index()] = true;
            dfs(graph, h, sink, useful, on_path, stack, out, limits)?;
            on_path[h.index()] = false;
        }
        stack.pop();
    }
    Ok(())
}

/// Nodes from which `target` is reachable.
pub fn reaches(graph: &Digraph, target: NodeId) -> Vec<bool> {
    let mut seen = vec![false; graph.node_count()];
    let mut stack = vec![target];
    seen[target.index()] = true;
    while let Some(v) = stack.pop() {
        for &a in graph.in_arcs(v) {
            let t = graph.arc(a).tail;
            if !seen[t.index()] {
                seen[t.index()] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Interdiction scenarios over the non-immune arcs, ordered by size and then
/// lexicographically. With `compat`, only cliques of it are produced.
pub fn enumerate_scenarios(
    graph: &Digraph,
    k: usize,
    mode: ScenarioMode,
    compat: Option<&CompatGraph>,
    limits: &Limits,
) -> Result<Vec<Scenario>> {
    let pool: Vec<ArcId> = graph.arcs().iter().filter(|a| !a.immune).map(|a| a.id).collect();
    if mode == ScenarioMode::Exactly && k > pool.len() {
        return Err(Error::precondition(format!(
            "budget {k} exceeds the {} interdictable arcs",
            pool.len()
        )));
    }
    let sizes = match mode {
        ScenarioMode::Exactly => k..=k,
        ScenarioMode::AtMost => 0..=k.min(pool.len()),
    };
    let mut out = Vec::new();
    for size in sizes {
        let mut chosen = Vec::with_capacity(size);
        subsets(&pool, 0, size, compat, &mut chosen, &mut out, limits)?;
    }
    Ok(out)
}

fn subsets(
    pool: &[ArcId],
    from: usize,
    size: usize,
    compat: Option<&CompatGraph>,
    chosen: &mut Vec<ArcId>,
    out: &mut Vec<Scenario>,
    limits: &Limits,
) -> Result<()> {
    if chosen.len() == size {
        out.push(chosen.iter().copied().collect());
        return limits.check_scenarios(out.len());
    }
    let needed = size - chosen.len();
    for i in from..=pool.len().saturating_sub(needed) {
        let a = pool[i];
        if let Some(h) = compat {
            if !chosen.iter().all(|&b| h.contains(a, b)) {
                continue;
            }
        }
        chosen.push(a);
        subsets(pool, i + 1, size, compat, chosen, out, limits)?;
        chosen.pop();
    }
    Ok(())
}

/// A total order on arcs compatible with the DAG: an arc comes after every
/// arc from whose head it can be reached. Arcs are sorted by the topological
/// position of their tail, ties by id; the arcs in `last` are moved to the end
/// in the given order.
pub fn topological_arc_order(graph: &Digraph, last: &[ArcId]) -> Result<Vec<ArcId>> {
    let nodes = graph.topological_nodes()?;
    let mut position = vec![0usize; graph.node_count()];
    for (i, v) in nodes.iter().enumerate() {
        position[v.index()] = i;
    }
    let tail_set: BTreeSet<ArcId> = last.iter().copied().collect();
    let mut order: Vec<ArcId> = graph
        .arcs()
        .iter()
        .filter(|a| !tail_set.contains(&a.id))
        .map(|a| a.id)
        .collect();
    order.sort_by_key(|&a| (position[graph.arc(a).tail.index()], a));
    order.extend(last.iter().copied());
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn bundles(sizes: &[usize]) -> (Digraph, NodeId, NodeId) {
        let mut g = Digraph::new();
        let nodes: Vec<NodeId> = (0..=sizes.len())
            .map(|i| g.add_node(format!("z{i}")).unwrap())
            .collect();
        for (i, &n) in sizes.iter().enumerate() {
            for j in 0..n {
                g.add_arc(format!("a{i}_{j}"), nodes[i], nodes[i + 1], Rational::one(), false)
                    .unwrap();
            }
        }
        (g, nodes[0], nodes[sizes.len()])
    }

    #[test]
    fn single_and_parallel_arcs() {
        let (g, s, t) = bundles(&[1]);
        assert_eq!(enumerate_st_paths(&g, s, t, &Limits::default()).unwrap().len(), 1);
        let (g, s, t) = bundles(&[2]);
        assert_eq!(enumerate_st_paths(&g, s, t, &Limits::default()).unwrap().len(), 2);
    }

    #[test]
    fn bundle_product() {
        let (g, s, t) = bundles(&[3, 3, 3]);
        let paths = enumerate_st_paths(&g, s, t, &Limits::default()).unwrap();
        assert_eq!(paths.len(), 27);
        let mut sorted = paths.clone();
        sorted.sort();
        assert_eq!(paths, sorted);
    }

    #[test]
    fn path_guard_trips() {
        let (g, s, t) = bundles(&[3, 3, 3]);
        let limits = Limits {
            max_paths: 10,
            ..Limits::default()
        };
        let err = enumerate_st_paths(&g, s, t, &limits).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn scenario_counts() {
        let (g, _, _) = bundles(&[3]);
        let lim = Limits::default();
        let exact = enumerate_scenarios(&g, 2, ScenarioMode::Exactly, None, &lim).unwrap();
        assert_eq!(exact.len(), 3);
        let mut h = CompatGraph::new();
        h.add_edge(ArcId(0), ArcId(2)).unwrap();
        let cliques = enumerate_scenarios(&g, 2, ScenarioMode::AtMost, Some(&h), &lim).unwrap();
        assert_eq!(cliques.len(), 5);
        assert!(cliques[0].is_empty());
        assert!(enumerate_scenarios(&g, 4, ScenarioMode::Exactly, None, &lim).is_err());
    }

    #[test]
    fn complete_compat_matches_unrestricted() {
        let (g, _, _) = bundles(&[2, 2]);
        let lim = Limits::default();
        let h = CompatGraph::complete(g.arcs().iter().map(|a| a.id));
        let with = enumerate_scenarios(&g, 3, ScenarioMode::AtMost, Some(&h), &lim).unwrap();
        let without = enumerate_scenarios(&g, 3, ScenarioMode::AtMost, None, &lim).unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn chain_orders_downstream_later() {
        let (g, _, _) = bundles(&[1, 1]);
        let order = topological_arc_order(&g, &[]).unwrap();
        assert_eq!(order, vec![ArcId(0), ArcId(1)]);
        let (g, _, _) = bundles(&[2]);
        assert_eq!(topological_arc_order(&g, &[]).unwrap(), vec![ArcId(0), ArcId(1)]);
    }

    #[test]
    fn designated_arcs_go_last() {
        let (g, _, _) = bundles(&[2, 1]);
        let order = topological_arc_order(&g, &[ArcId(0)]).unwrap();
        assert_eq!(order, vec![ArcId(1), ArcId(2), ArcId(0)]);
    }
}
