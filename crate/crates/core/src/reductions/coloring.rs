use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{ArcId, CompatGraph, MrfRInstance, Path, PathFlow, ScenarioMode};
use crate::limits::Limits;
use crate::oracles::{FractionalColoring, UndirectedGraph};
use crate::rational::Rational;
use crate::reductions::{Builder, ReductionArtifact};
use crate::solvers::best_response;

#[derive(Debug, Clone)]
pub struct ColoringLayout {
    pub graph: UndirectedGraph,
    pub colors: usize,
    /// Edge `i` of the graph as `(v, w)` with `v < w`.
    pub edges: Vec<(usize, usize)>,
    pub bundles: Vec<Vec<ArcId>>,
    /// The arcs of bundle `i` standing for `v` and `w`.
    pub designated: Vec<(ArcId, ArcId)>,
}

impl ColoringLayout {
    /// Arcs standing for vertex `v`, one per incident edge.
    pub fn vertex_arcs(&self, v: usize) -> Vec<ArcId> {
        self.edges
            .iter()
            .zip(&self.designated)
            .filter_map(|(&(a, b), &(da, db))| {
                if a == v {
                    Some(da)
                } else if b == v {
                    Some(db)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// A chain of bundles, one per edge, each with `colors` parallel unit arcs;
/// arcs standing for the same vertex are pairwise compatible. Budget 2,
/// demand `colors`.
pub fn reduce_coloring_to_mrfr(
    graph: &UndirectedGraph,
    colors: usize,
) -> Result<ReductionArtifact<MrfRInstance, ColoringLayout>> {
    if colors < 2 {
        return Err(Error::precondition("the number of colors must be at least 2"));
    }
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    if edges.is_empty() {
        return Err(Error::precondition("the graph has no edges"));
    }
    let mut b = Builder::default();
    let z: Vec<_> = (0..=edges.len())
        .map(|i| b.node(&format!("z{}", i + 1), format!("chain node {}", i + 1)))
        .collect();
    let mut bundles = Vec::new();
    let mut designated = Vec::new();
    for (i, &(v, w)) in edges.iter().enumerate() {
        let bundle: Vec<ArcId> = (0..colors)
            .map(|j| {
                let role = match j {
                    0 => format!("bundle {} arc for vertex {v}", i + 1),
                    1 => format!("bundle {} arc for vertex {w}", i + 1),
                    _ => format!("bundle {} spare arc {}", i + 1, j - 1),
                };
                b.arc(
                    &format!("e{}_{}", i + 1, j),
                    z[i],
                    z[i + 1],
                    Rational::one(),
                    false,
                    role,
                )
            })
            .collect();
        designated.push((bundle[0], bundle[1]));
        bundles.push(bundle);
    }
    let layout = ColoringLayout {
        graph: graph.clone(),
        colors,
        edges,
        bundles,
        designated,
    };
    let mut compat = CompatGraph::new();
    for v in 0..graph.vertex_count() {
        let arcs = layout.vertex_arcs(v);
        for (i, &a) in arcs.iter().enumerate() {
            for &c in &arcs[i + 1..] {
                compat.add_edge(a, c)?;
            }
        }
    }
    let demand = Rational::from(colors);
    let output = MrfRInstance::new(
        b.graph,
        z[0],
        *z.last().expect("nonempty"),
        2,
        compat,
        demand.clone(),
        false,
    )?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from_int(2)),
        ("demand".to_string(), demand),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout,
    })
}

/// Groups the witness paths by the vertices whose arcs they contain fully.
///
/// Isolated vertices have no arcs; they are added to the independent sets
/// in order until each is covered once.
pub fn coloring_from_flow(
    artifact: &ReductionArtifact<MrfRInstance, ColoringLayout>,
    flow: &PathFlow,
    limits: &Limits,
) -> Result<FractionalColoring> {
    let inst = &artifact.output;
    let layout = &artifact.layout;
    inst.check_flow(flow)?;
    let (_, loss) = best_response(flow, &inst.graph, 2, Some(&inst.compat), ScenarioMode::AtMost, limits)?;
    if loss > Rational::one() {
        return Err(Error::validation("flow", format!("clique scenario loses {loss} > 1")));
    }
    let n = layout.graph.vertex_count();
    let arcs: Vec<Vec<ArcId>> = (0..n).map(|v| layout.vertex_arcs(v)).collect();
    let mut sets: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (path, value) in flow.iter() {
        let set: Vec<usize> = (0..n)
            .filter(|&v| !arcs[v].is_empty() && arcs[v].iter().all(|&a| path.contains(a)))
            .collect();
        *sets.entry(set).or_insert_with(Rational::zero) += value;
    }
    for v in (0..n).filter(|&v| arcs[v].is_empty()) {
        let mut need = Rational::one();
        let mut next = BTreeMap::new();
        for (set, w) in sets {
            if need.is_zero() {
                *next.entry(set).or_insert_with(Rational::zero) += w;
                continue;
            }
            let take = w.clone().min(need.clone());
            need -= &take;
            let mut with = set.clone();
            with.push(v);
            with.sort_unstable();
            *next.entry(with).or_insert_with(Rational::zero) += &take;
            let rest = w - take;
            if rest.is_positive() {
                *next.entry(set).or_insert_with(Rational::zero) += rest;
            }
        }
        sets = next;
    }
    sets.remove(&Vec::new());
    let coloring = FractionalColoring(sets);
    coloring.validate(&layout.graph)?;
    Ok(coloring)
}

/// Routes each independent set along the arcs of its vertices, spreading
/// its weight evenly over the spare arcs of the bundles it leaves unused.
/// The empty set absorbs the slack up to the number of colors.
pub fn flow_from_coloring(
    artifact: &ReductionArtifact<MrfRInstance, ColoringLayout>,
    coloring: &FractionalColoring,
    limits: &Limits,
) -> Result<PathFlow> {
    let layout = &artifact.layout;
    coloring.validate(&layout.graph)?;
    let colors = Rational::from(layout.colors);
    let total = coloring.total();
    if total > colors {
        return Err(Error::precondition(format!("coloring weight {total} exceeds {colors}")));
    }
    let mut weights: Vec<(Vec<usize>, Rational)> = coloring.0.iter().map(|(s, w)| (s.clone(), w.clone())).collect();
    if total < colors {
        weights.push((Vec::new(), colors - total));
    }
    let mut flow = PathFlow::new();
    for (set, weight) in weights {
        if weight.is_zero() {
            continue;
        }
        let choices: Vec<Vec<ArcId>> = layout
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(v, w))| {
                let (dv, dw) = layout.designated[i];
                if set.contains(&v) {
                    vec![dv]
                } else if set.contains(&w) {
                    vec![dw]
                } else {
                    layout.bundles[i][2..].to_vec()
                }
            })
            .collect();
        let mut count = 1usize;
        for c in &choices {
            if c.is_empty() {
                return Err(Error::precondition(format!(
                    "set {set:?} leaves a bundle without spare arcs"
                )));
            }
            count = count.saturating_mul(c.len());
        }
        limits.check_paths(count)?;
        let share = weight / Rational::from(count);
        let mut index = vec![0usize; choices.len()];
        loop {
            let arcs = index.iter().zip(&choices).map(|(&j, c)| c[j]).collect();
            flow.add(Path::new(arcs), share.clone());
            let Some(pos) = (0..index.len()).rev().find(|&p| index[p] + 1 < choices[p].len()) else {
                break;
            };
            index[pos] += 1;
            for later in &mut index[pos + 1..] {
                *later = 0;
            }
        }
    }
    Ok(flow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::decide_mrf_r_star;

    #[test]
    fn triangle_sizes_and_round_trip() {
        let g = UndirectedGraph::complete(3);
        let art = reduce_coloring_to_mrfr(&g, 3).unwrap();
        assert_eq!(art.output.graph.node_count(), 4);
        assert_eq!(art.output.graph.arc_count(), 9);
        assert_eq!(art.output.compat.edge_count(), 3);
        art.provenance.check_total(&art.output.graph).unwrap();
        let lim = Limits::default();
        let proper = FractionalColoring(
            [
                (vec![0], Rational::one()),
                (vec![1], Rational::one()),
                (vec![2], Rational::one()),
            ]
            .into(),
        );
        let flow = flow_from_coloring(&art, &proper, &lim).unwrap();
        assert_eq!(flow.value(), Rational::from_int(3));
        let back = coloring_from_flow(&art, &flow, &lim).unwrap();
        assert_eq!(back, proper);
        let d = decide_mrf_r_star(&art.output, &lim).unwrap();
        assert!(d.yes);
        coloring_from_flow(&art, &d.witness.unwrap(), &lim).unwrap();
    }

    #[test]
    fn pentagon_counts_and_decisions() {
        let g = UndirectedGraph::cycle(5);
        let lim = Limits::default();
        let two = reduce_coloring_to_mrfr(&g, 2).unwrap();
        assert_eq!(two.output.graph.node_count(), 6);
        assert_eq!(two.output.graph.arc_count(), 10);
        assert_eq!(two.output.compat.edge_count(), 5);
        assert!(!decide_mrf_r_star(&two.output, &lim).unwrap().yes);
        let three = reduce_coloring_to_mrfr(&g, 3).unwrap();
        assert!(decide_mrf_r_star(&three.output, &lim).unwrap().yes);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(reduce_coloring_to_mrfr(&UndirectedGraph::complete(2), 1).is_err());
        assert!(reduce_coloring_to_mrfr(&UndirectedGraph::new(3), 2).is_err());
    }

    #[test]
    fn isolated_vertex_is_covered() {
        let g = UndirectedGraph::from_edges(3, &[(0, 1)]).unwrap();
        let art = reduce_coloring_to_mrfr(&g, 2).unwrap();
        let lim = Limits::default();
        let d = decide_mrf_r_star(&art.output, &lim).unwrap();
        let y = coloring_from_flow(&art, &d.witness.unwrap(), &lim).unwrap();
        y.validate(&g).unwrap();
    }
}
