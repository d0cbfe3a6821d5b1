//! Brute-force ground truth: fractional chromatic number, cliques, clique
//! interdiction, and arc-disjoint unit path families.

mod graph;

use crate::error::{Error, Result};
use crate::instances::{enumerate_st_paths, Digraph, NodeId, Path};
use crate::limits::Limits;
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::rational::Rational;

pub use graph::{FractionalColoring, UndirectedGraph};

fn guard(graph: &UndirectedGraph, limits: &Limits) -> Result<()> {
    if graph.vertex_count() > limits.max_oracle_vertices {
        return Err(Error::resource("oracle vertex count", limits.max_oracle_vertices));
    }
    Ok(())
}

/// Nonempty independent sets in lexicographic order of their sorted vertex
/// lists.
pub fn independent_sets(graph: &UndirectedGraph, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    guard(graph, limits)?;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    grow_sets(graph, 0, &mut cur, &mut out, &|g, set, v| {
        set.iter().all(|&u| !g.adjacent(u, v))
    });
    Ok(out)
}

fn grow_sets(
    graph: &UndirectedGraph,
    from: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    fits: &dyn Fn(&UndirectedGraph, &[usize], usize) -> bool,
) {
    for v in from..graph.vertex_count() {
        if fits(graph, cur, v) {
            cur.push(v);
            out.push(cur.clone());
            grow_sets(graph, v + 1, cur, out, fits);
            cur.pop();
        }
    }
}

/// `χ_f(G)`: minimize `Σ y_I` over nonempty independent sets subject to
/// `Σ_{I ∋ v} y_I = 1` for every vertex. Returns an optimal coloring too.
pub fn fractional_chromatic_number(graph: &UndirectedGraph, limits: &Limits) -> Result<(Rational, FractionalColoring)> {
    let sets = independent_sets(graph, limits)?;
    let mut lp = LinearProgram::new(Sense::Minimize);
    let ys: Vec<usize> = (0..sets.len()).map(|i| lp.add_nonneg(format!("y{i}"))).collect();
    lp.set_objective(ys.iter().map(|&y| (y, Rational::one())).collect());
    for v in 0..graph.vertex_count() {
        let coeffs = sets
            .iter()
            .zip(&ys)
            .filter(|(s, _)| s.contains(&v))
            .map(|(_, &y)| (y, Rational::one()))
            .collect();
        lp.add_constraint(format!("cover{v}"), coeffs, Relation::Eq, Rational::one());
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::precondition(format!("coloring program ended {:?}", sol.status)));
    }
    let coloring = FractionalColoring(
        sets.into_iter()
            .zip(&sol.primal)
            .filter(|(_, w)| w.is_positive())
            .map(|(s, w)| (s, w.clone()))
            .collect(),
    );
    Ok((sol.value, coloring))
}

/// Number of colors used by first-fit coloring in vertex order; an upper
/// bound on the chromatic number.
pub fn greedy_color_count(graph: &UndirectedGraph) -> usize {
    let mut color = vec![usize::MAX; graph.vertex_count()];
    let mut used = 0;
    for v in 0..graph.vertex_count() {
        let mut c = 0;
        while (0..v).any(|u| graph.adjacent(u, v) && color[u] == c) {
            c += 1;
        }
        color[v] = c;
        used = used.max(c + 1);
    }
    used
}

/// All cliques with exactly `size` vertices, lexicographically.
pub fn cliques_of_size(graph: &UndirectedGraph, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn grow(g: &UndirectedGraph, from: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in from..g.vertex_count() {
            if cur.iter().all(|&u| g.adjacent(u, v)) {
                cur.push(v);
                grow(g, v + 1, size, cur, out);
                cur.pop();
            }
        }
    }
    grow(graph, 0, size, &mut Vec::new(), &mut out);
    out
}

pub fn max_clique(graph: &UndirectedGraph) -> usize {
    let mut best = 0;
    let mut cur = Vec::new();
    let mut all = Vec::new();
    grow_sets(graph, 0, &mut cur, &mut all, &|g, set, v| {
        set.iter().all(|&u| g.adjacent(u, v))
    });
    for c in &all {
        best = best.max(c.len());
    }
    best
}

/// A vertex set of size at most `r` meeting every clique of size `size`, if
/// one exists. Candidates are tried by size, then lexicographically.
pub fn clique_interdiction_bruteforce(
    graph: &UndirectedGraph,
    size: usize,
    r: usize,
    limits: &Limits,
) -> Result<Option<Vec<usize>>> {
    guard(graph, limits)?;
    let cliques = cliques_of_size(graph, size);
    for k in 0..=r.min(graph.vertex_count()) {
        let mut found = None;
        subsets(graph.vertex_count(), k, 0, &mut Vec::new(), &mut |set| {
            if found.is_none() && cliques.iter().all(|c| c.iter().any(|v| set.contains(v))) {
                found = Some(set.to_vec());
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn subsets(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        visit(cur);
        return;
    }
    for v in from..n {
        cur.push(v);
        subsets(n, k, v + 1, cur, visit);
        cur.pop();
    }
}

/// Every set of `count` pairwise arc-disjoint `source`-`sink` paths, each as
/// an increasing list of indices into the enumerated path list, in
/// lexicographic order.
pub fn integral_unit_flow_families(
    graph: &Digraph,
    source: NodeId,
    sink: NodeId,
    count: usize,
    limits: &Limits,
) -> Result<(Vec<Path>, Vec<Vec<usize>>)> {
    let paths = enumerate_st_paths(graph, source, sink, limits)?;
    let mut out = Vec::new();
    let mut used = vec![false; graph.arc_count()];
    let mut visited = 0usize;
    families(
        &paths,
        count,
        0,
        &mut used,
        &mut Vec::new(),
        &mut out,
        &mut visited,
        limits,
    )?;
    Ok((paths, out))
}

#[allow(clippy::too_many_arguments)]
fn families(
    paths: &[Path],
    count: usize,
    from: usize,
    used: &mut [bool],
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    visited: &mut usize,
    limits: &Limits,
) -> Result<()> {
    *visited += 1;
    if *visited > limits.max_search_nodes {
        return Err(Error::resource("path family enumeration", limits.max_search_nodes));
    }
    if cur.len() == count {
        out.push(cur.clone());
        return Ok(());
    }
    for i in from..paths.len() {
        if paths[i].arcs.iter().any(|a| used[a.index()]) {
            continue;
        }
        for a in &paths[i].arcs {
            used[a.index()] = true;
        }
        cur.push(i);
        families(paths, count, i + 1, used, cur, out, visited, limits)?;
        cur.pop();
        for a in &paths[i].arcs {
            used[a.index()] = false;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_f_classics() {
        let lim = Limits::default();
        assert_eq!(
            fractional_chromatic_number(&UndirectedGraph::complete(3), &lim)
                .unwrap()
                .0,
            Rational::from_int(3)
        );
        let (v, y) = fractional_chromatic_number(&UndirectedGraph::cycle(5), &lim).unwrap();
        assert_eq!(v, Rational::new(5, 2));
        y.validate(&UndirectedGraph::cycle(5)).unwrap();
        assert_eq!(
            fractional_chromatic_number(&UndirectedGraph::new(4), &lim).unwrap().0,
            Rational::one()
        );
    }

    #[test]
    fn clique_counts() {
        assert_eq!(cliques_of_size(&UndirectedGraph::complete(4), 3).len(), 4);
        assert!(cliques_of_size(&UndirectedGraph::cycle(5), 3).is_empty());
        assert_eq!(max_clique(&UndirectedGraph::complete(4)), 4);
        assert_eq!(max_clique(&UndirectedGraph::new(0)), 0);
    }

    #[test]
    fn interdiction_oracle() {
        let lim = Limits::default();
        let tri = UndirectedGraph::complete(3);
        assert_eq!(clique_interdiction_bruteforce(&tri, 3, 1, &lim).unwrap(), Some(vec![0]));
        assert_eq!(
            clique_interdiction_bruteforce(&UndirectedGraph::cycle(5), 3, 0, &lim).unwrap(),
            Some(vec![])
        );
        assert_eq!(
            clique_interdiction_bruteforce(&UndirectedGraph::complete(4), 3, 1, &lim).unwrap(),
            None
        );
        assert!(
            clique_interdiction_bruteforce(&UndirectedGraph::complete(4), 3, 2, &lim)
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn families_of_parallel_arcs() {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        g.add_arc("a", s, t, Rational::one(), false).unwrap();
        g.add_arc("b", s, t, Rational::one(), false).unwrap();
        let lim = Limits::default();
        assert_eq!(integral_unit_flow_families(&g, s, t, 2, &lim).unwrap().1.len(), 1);
        assert!(integral_unit_flow_families(&g, s, t, 3, &lim).unwrap().1.is_empty());
    }

    #[test]
    fn graph_validation() {
        let mut g = UndirectedGraph::new(2);
        assert!(g.add_edge(0, 0).is_err());
        g.add_edge(0, 1).unwrap();
        assert!(g.add_edge(1, 0).is_err());
        assert!(g.add_edge(0, 2).is_err());
        assert!(greedy_color_count(&UndirectedGraph::cycle(5)) >= 3);
    }
}
