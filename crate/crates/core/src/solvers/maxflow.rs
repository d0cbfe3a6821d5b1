use std::collections::VecDeque;

use crate::instances::{ArcId, Digraph, NodeId};
use crate::rational::Rational;

/// Maximum `source`-`sink` flow value with per-arc flows (shortest augmenting
/// paths, exact arithmetic).
pub fn max_flow_arcs(graph: &Digraph, source: NodeId, sink: NodeId) -> (Rational, Vec<Rational>) {
    let mut flow = vec![Rational::zero(); graph.arc_count()];
    let mut value = Rational::zero();
    if source == sink {
        return (value, flow);
    }
    while let Some(path) = augmenting_path(graph, source, sink, &flow) {
        let mut delta: Option<Rational> = None;
        for &(a, forward) in &path {
            let room = if forward {
                graph.capacity(a) - &flow[a.index()]
            } else {
                flow[a.index()].clone()
            };
            delta = Some(match delta {
                None => room,
                Some(d) => d.min(room),
            });
        }
        let delta = delta.expect("augmenting path has arcs");
        for &(a, forward) in &path {
            if forward {
                flow[a.index()] += &delta;
            } else {
                flow[a.index()] -= &delta;
            }
        }
        value += delta;
    }
    (value, flow)
}

pub fn max_flow(graph: &Digraph, source: NodeId, sink: NodeId) -> Rational {
    max_flow_arcs(graph, source, sink).0
}

/// Arcs of a minimum cut: those leaving the set of nodes still reachable
/// from `source` in the residual graph of a maximum flow.
pub fn min_cut(graph: &Digraph, source: NodeId, sink: NodeId) -> Vec<ArcId> {
    let (_, flow) = max_flow_arcs(graph, source, sink);
    let side = residual_reach(graph, source, &flow);
    graph
        .arcs()
        .iter()
        .filter(|a| side[a.tail.index()] && !side[a.head.index()])
        .map(|a| a.id)
        .collect()
}

fn residual_reach(graph: &Digraph, source: NodeId, flow: &[Rational]) -> Vec<bool> {
    let mut seen = vec![false; graph.node_count()];
    seen[source.index()] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for (w, _) in residual_steps(graph, v, flow) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

fn residual_steps<'a>(
    graph: &'a Digraph,
    v: NodeId,
    flow: &'a [Rational],
) -> impl Iterator<Item = (NodeId, (ArcId, bool))> + 'a {
    let forward = graph
        .out_arcs(v)
        .iter()
        .filter(move |&&a| &flow[a.index()] < graph.capacity(a))
        .map(move |&a| (graph.arc(a).head, (a, true)));
    let backward = graph
        .in_arcs(v)
        .iter()
        .filter(move |&&a| flow[a.index()].is_positive())
        .map(move |&a| (graph.arc(a).tail, (a, false)));
    forward.chain(backward)
}

fn augmenting_path(graph: &Digraph, source: NodeId, sink: NodeId, flow: &[Rational]) -> Option<Vec<(ArcId, bool)>> {
    let mut via: Vec<Option<(NodeId, (ArcId, bool))>> = vec![None; graph.node_count()];
    let mut seen = vec![false; graph.node_count()];
    seen[source.index()] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        if v == sink {
            break;
        }
        for (w, step) in residual_steps(graph, v, flow) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                via[w.index()] = Some((v, step));
                queue.push_back(w);
            }
        }
    }
    if !seen[sink.index()] {
        return None;
    }
    let mut path = Vec::new();
    let mut at = sink;
    while at != source {
        let (prev, step) = via[at.index()].expect("reached nodes have a predecessor");
        path.push(step);
        at = prev;
    }
    path.reverse();
    Some(path)
}
