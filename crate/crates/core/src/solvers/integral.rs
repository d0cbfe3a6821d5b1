//! Exhaustive searches over integral flows.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instances::{
    enumerate_scenarios, enumerate_st_paths, ArcId, MrfInstance, MrfRInstance, Path, PathFlow, ScenarioMode,
};
use crate::limits::Limits;
use crate::rational::Rational;
use crate::solvers::engine::{ClassModel, Column};
use crate::solvers::mrf::{best_response, MrfSolution};
use crate::solvers::{max_flow, Decision};

/// Whether `θ` arc-disjoint unit paths exist such that every clique of `k`
/// arcs meets at most `k - 1` of them.
///
/// Interchangeable parallel arcs are merged into classes and families are
/// enumerated as multisets of class paths in non-decreasing order; each
/// multiset is realized by giving every path the next unused arc of each of
/// its classes. Any two realizations differ by a permutation inside classes,
/// which preserves cliques, so checking one realization suffices.
pub fn decide_integral_mrf_r_star(inst: &MrfRInstance, limits: &Limits) -> Result<Decision> {
    inst.validate()?;
    if !inst.demand.is_integer() {
        return Err(Error::precondition(format!("demand {} is not an integer", inst.demand)));
    }
    let theta = inst
        .demand
        .to_usize()
        .ok_or_else(|| Error::precondition("demand out of range"))?;
    let model = ClassModel::restricted(&inst.graph, &inst.compat)?;
    let columns = model.columns(0, inst.source, inst.sink, limits)?;
    let k = inst.budget;
    let cliques: Vec<Vec<ArcId>> =
        enumerate_scenarios(&inst.graph, k, ScenarioMode::AtMost, Some(&inst.compat), limits)?
            .into_iter()
            .filter(|s| s.len() == k)
            .map(|s| s.arcs().collect())
            .collect();
    let mut cliques_of = vec![Vec::new(); inst.graph.arc_count()];
    for (q, c) in cliques.iter().enumerate() {
        for a in c {
            cliques_of[a.index()].push(q);
        }
    }
    let mut search = FamilySearch {
        inst,
        model: &model,
        columns: &columns,
        cliques_of: &cliques_of,
        hits: vec![0; cliques.len()],
        used: vec![0; model.classes.len()],
        blocked: vec![false; inst.graph.arc_count()],
        chosen: Vec::new(),
        cap: k - 1,
        visited: 0,
        limit: limits.max_search_nodes,
    };
    let found = search.dfs(0, theta)?;
    let witness = found.then(|| {
        search
            .chosen
            .iter()
            .map(|(_, arcs)| (Path::new(arcs.clone()), Rational::one()))
            .fold(PathFlow::new(), |mut acc, (p, v)| {
                acc.add(p, v);
                acc
            })
    });
    Ok(Decision {
        yes: found,
        value: if found { inst.demand.clone() } else { Rational::zero() },
        witness,
    })
}

struct FamilySearch<'a> {
    inst: &'a MrfRInstance,
    model: &'a ClassModel,
    columns: &'a [Column],
    cliques_of: &'a [Vec<usize>],
    hits: Vec<usize>,
    used: Vec<usize>,
    blocked: Vec<bool>,
    chosen: Vec<(usize, Vec<ArcId>)>,
    cap: usize,
    visited: usize,
    limit: usize,
}

impl FamilySearch<'_> {
    fn dfs(&mut self, from: usize, left: usize) -> Result<bool> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(Error::resource("integral flow search nodes", self.limit));
        }
        if left == 0 {
            return Ok(true);
        }
        if unit_max_flow(self.inst, &self.blocked, left) < left {
            return Ok(false);
        }
        for j in from..self.columns.len() {
            let column = &self.columns[j];
            if column
                .classes
                .iter()
                .any(|&c| self.used[c] >= self.model.classes[c].arcs.len())
            {
                continue;
            }
            let arcs: Vec<ArcId> = column
                .classes
                .iter()
                .map(|&c| self.model.classes[c].arcs[self.used[c]])
                .collect();
            let mut touched: Vec<usize> = arcs
                .iter()
                .flat_map(|a| self.cliques_of[a.index()].iter().copied())
                .collect();
            touched.sort_unstable();
            touched.dedup();
            if touched.iter().any(|&q| self.hits[q] >= self.cap) {
                continue;
            }
            for &q in &touched {
                self.hits[q] += 1;
            }
            for &c in &column.classes {
                self.used[c] += 1;
            }
            for a in &arcs {
                self.blocked[a.index()] = true;
            }
            self.chosen.push((j, arcs));
            if self.dfs(j, left - 1)? {
                return Ok(true);
            }
            let (_, arcs) = self.chosen.pop().expect("pushed above");
            for a in &arcs {
                self.blocked[a.index()] = false;
            }
            for &c in &column.classes {
                self.used[c] -= 1;
            }
            for &q in &touched {
                self.hits[q] -= 1;
            }
        }
        Ok(false)
    }
}

/// Number of arc-disjoint source-sink paths avoiding `blocked`, capped at
/// `enough`.
fn unit_max_flow(inst: &MrfRInstance, blocked: &[bool], enough: usize) -> usize {
    let g = &inst.graph;
    let mut used = vec![false; g.arc_count()];
    let mut found = 0;
    while found < enough {
        let mut via: Vec<Option<(usize, ArcId, bool)>> = vec![None; g.node_count()];
        let mut seen = vec![false; g.node_count()];
        seen[inst.source.index()] = true;
        let mut queue = VecDeque::from([inst.source]);
        while let Some(v) = queue.pop_front() {
            if v == inst.sink {
                break;
            }
            for &a in g.out_arcs(v) {
                let h = g.arc(a).head;
                if !blocked[a.index()] && !used[a.index()] && !seen[h.index()] {
                    seen[h.index()] = true;
                    via[h.index()] = Some((v.index(), a, true));
                    queue.push_back(h);
                }
            }
            for &a in g.in_arcs(v) {
                let t = g.arc(a).tail;
                if used[a.index()] && !seen[t.index()] {
                    seen[t.index()] = true;
                    via[t.index()] = Some((v.index(), a, false));
                    queue.push_back(t);
                }
            }
        }
        if !seen[inst.sink.index()] {
            break;
        }
        let mut at = inst.sink.index();
        while at != inst.source.index() {
            let (prev, a, forward) = via[at].expect("reached");
            used[a.index()] = forward;
            at = prev;
        }
        found += 1;
    }
    found
}

/// Best robust value over integral path flows, by enumerating integer
/// values path by path with capacity and max-flow pruning.
pub fn solve_integral_mrf(inst: &MrfInstance, limits: &Limits) -> Result<MrfSolution> {
    inst.validate()?;
    for a in inst.graph.arcs() {
        if !a.capacity.is_integer() {
            return Err(Error::precondition(format!("capacity of {} is not an integer", a.name)));
        }
    }
    let pool = inst.interdictable_arcs().len();
    if inst.budget > pool {
        return Err(Error::precondition(format!(
            "budget {} exceeds the {pool} interdictable arcs",
            inst.budget
        )));
    }
    let paths = enumerate_st_paths(&inst.graph, inst.source, inst.sink, limits)?;
    let mut search = IntegralSearch {
        inst,
        paths: &paths,
        residual: inst.graph.arcs().iter().map(|a| a.capacity.clone()).collect(),
        values: vec![0; paths.len()],
        best: None,
        visited: 0,
        limits,
    };
    search.dfs(0, 0)?;
    let (value, values) = search.best.expect("the zero flow is always evaluated");
    let flow: PathFlow = paths
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v > 0)
        .map(|(p, &v)| (p.clone(), Rational::from(v)))
        .collect();
    let (worst_scenario, worst_loss) =
        best_response(&flow, &inst.graph, inst.budget, None, ScenarioMode::Exactly, limits)?;
    Ok(MrfSolution {
        value,
        flow,
        worst_loss,
        worst_scenario,
    })
}

struct IntegralSearch<'a> {
    inst: &'a MrfInstance,
    paths: &'a [Path],
    residual: Vec<Rational>,
    values: Vec<usize>,
    best: Option<(Rational, Vec<usize>)>,
    visited: usize,
    limits: &'a Limits,
}

impl IntegralSearch<'_> {
    fn dfs(&mut self, i: usize, shipped: usize) -> Result<()> {
        self.visited += 1;
        if self.visited > self.limits.max_search_nodes {
            return Err(Error::resource(
                "integral flow search nodes",
                self.limits.max_search_nodes,
            ));
        }
        if i == self.paths.len() {
            let flow: PathFlow = self
                .paths
                .iter()
                .zip(&self.values)
                .filter(|(_, &v)| v > 0)
                .map(|(p, &v)| (p.clone(), Rational::from(v)))
                .collect();
            let (_, loss) = best_response(
                &flow,
                &self.inst.graph,
                self.inst.budget,
                None,
                ScenarioMode::Exactly,
                self.limits,
            )?;
            let value = Rational::from(shipped) - loss;
            if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                self.best = Some((value, self.values.clone()));
            }
            return Ok(());
        }
        if let Some((b, _)) = &self.best {
            let room = residual_max_flow(self.inst, &self.residual);
            if Rational::from(shipped) + room <= *b {
                return Ok(());
            }
        }
        let most = self.paths[i]
            .arcs
            .iter()
            .map(|a| self.residual[a.index()].floor().to_usize().unwrap_or(0))
            .min()
            .unwrap_or(0);
        for v in (0..=most).rev() {
            let amount = Rational::from(v);
            for a in &self.paths[i].arcs {
                self.residual[a.index()] -= &amount;
            }
            self.values[i] = v;
            self.dfs(i + 1, shipped + v)?;
            self.values[i] = 0;
            for a in &self.paths[i].arcs {
                self.residual[a.index()] += &amount;
            }
        }
        Ok(())
    }
}

fn residual_max_flow(inst: &MrfInstance, residual: &[Rational]) -> Rational {
    let mut g = crate::instances::Digraph::new();
    for v in inst.graph.nodes() {
        g.add_node(inst.graph.node_name(v)).expect("names are unique");
    }
    for a in inst.graph.arcs() {
        g.add_arc(a.name.clone(), a.tail, a.head, residual[a.id.index()].clone(), a.immune)
            .expect("copied arc is valid");
    }
    max_flow(&g, inst.source, inst.sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{CompatGraph, Digraph};

    fn parallel(n: usize, budget: usize) -> MrfInstance {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        for i in 0..n {
            g.add_arc(format!("a{i}"), s, t, Rational::one(), false).unwrap();
        }
        MrfInstance::new(g, s, t, budget, None).unwrap()
    }

    #[test]
    fn integral_small_cases() {
        let lim = Limits::default();
        assert_eq!(
            solve_integral_mrf(&parallel(1, 1), &lim).unwrap().value,
            Rational::zero()
        );
        assert_eq!(
            solve_integral_mrf(&parallel(2, 1), &lim).unwrap().value,
            Rational::one()
        );
    }

    #[test]
    fn integral_restricted_respects_cliques() {
        let base = parallel(3, 2);
        let g = base.graph.clone();
        let mut h = CompatGraph::new();
        h.add_edge(ArcId(0), ArcId(1)).unwrap();
        h.add_edge(ArcId(1), ArcId(2)).unwrap();
        h.add_edge(ArcId(0), ArcId(2)).unwrap();
        let lim = Limits::default();
        let three = MrfRInstance::new(
            g.clone(),
            base.source,
            base.sink,
            2,
            h.clone(),
            Rational::from_int(3),
            true,
        )
        .unwrap();
        assert!(!decide_integral_mrf_r_star(&three, &lim).unwrap().yes);
        let one = MrfRInstance::new(g, base.source, base.sink, 2, h, Rational::one(), true).unwrap();
        let d = decide_integral_mrf_r_star(&one, &lim).unwrap();
        assert!(d.yes);
        one.check_flow(&d.witness.unwrap()).unwrap();
    }
}
