use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{
    enumerate_scenarios, enumerate_st_paths, CompatGraph, Digraph, MrfInstance, Path, PathFlow, Scenario, ScenarioMode,
};
use crate::limits::Limits;
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::rational::Rational;
use crate::solvers::engine::{self, ClassModel, Formulation, LossRows};
use crate::solvers::search::{self, Request, Space};
use crate::solvers::{Decision, DecisionRun};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrfSolution {
    /// Robust value `Σx - λ`.
    pub value: Rational,
    pub flow: PathFlow,
    pub worst_loss: Rational,
    pub worst_scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RniSolution {
    pub value: Rational,
    /// Indexed by arc.
    pub y: Vec<Rational>,
    /// Positive entries of the failure distribution.
    pub z: BTreeMap<Scenario, Rational>,
}

/// Scenario of the family with the largest loss; ties go to the first
/// scenario in enumeration order (by size, then lexicographically).
pub fn best_response(
    flow: &PathFlow,
    graph: &Digraph,
    budget: usize,
    compat: Option<&CompatGraph>,
    mode: ScenarioMode,
    limits: &Limits,
) -> Result<(Scenario, Rational)> {
    let pool = graph.arcs().iter().filter(|a| !a.immune).count();
    if mode == ScenarioMode::Exactly && budget > pool {
        return Err(Error::precondition(format!(
            "budget {budget} exceeds the {pool} interdictable arcs"
        )));
    }
    let sizes = vec![1usize; graph.arc_count()];
    let max_pick: Vec<usize> = graph.arcs().iter().map(|a| usize::from(!a.immune)).collect();
    let support: Vec<(Vec<usize>, Rational)> = flow
        .iter()
        .map(|(p, v)| {
            let mut arcs: Vec<usize> = p.arcs.iter().map(|a| a.index()).collect();
            arcs.sort_unstable();
            arcs.dedup();
            (arcs, v.clone())
        })
        .collect();
    let adj = |a: usize, b: usize| compat.is_some_and(|h| h.contains(graph.arcs()[a].id, graph.arcs()[b].id));
    let space = Space {
        sizes: &sizes,
        max_pick: &max_pick,
        adjacent: if compat.is_some() { Some(&adj) } else { None },
        budget: budget.min(pool),
        exact: mode == ScenarioMode::Exactly,
    };
    let request = Request {
        threshold: None,
        keep: 0,
        break_ties: true,
        prune_at_threshold: false,
    };
    let out = search::search(&space, &support, &request, limits)?;
    let (profile, loss) = out.best.expect("the empty or a full scenario always exists");
    let scenario = profile.into_iter().map(|(c, _)| graph.arcs()[c].id).collect();
    Ok((scenario, loss))
}

fn check_budget(inst: &MrfInstance) -> Result<()> {
    let pool = inst.interdictable_arcs().len();
    if inst.budget > pool {
        return Err(Error::precondition(format!(
            "budget {} exceeds the {pool} interdictable arcs",
            inst.budget
        )));
    }
    Ok(())
}

/// Robust flow in compressed form, before expanding to explicit paths.
pub(crate) struct CompressedMrf {
    pub model: ClassModel,
    pub columns: Vec<engine::Column>,
    pub result: engine::EngineResult,
}

pub(crate) fn solve_mrf_compressed(inst: &MrfInstance, limits: &Limits) -> Result<CompressedMrf> {
    inst.validate()?;
    check_budget(inst)?;
    let model = ClassModel::plain(&inst.graph)?;
    let columns = model.columns(0, inst.source, inst.sink, limits)?;
    let form = Formulation {
        budget: inst.budget,
        exact: true,
        use_compat: false,
        loss: LossRows::Lambda,
        demand: vec![None],
        total: None,
        weights: None,
    };
    let result = engine::solve(&model, &columns, &form, limits)?;
    Ok(CompressedMrf { model, columns, result })
}

/// Optimum of the path program: maximize `Σx - λ` subject to capacities and
/// `loss(S) <= λ` for every set of exactly `k` interdictable arcs.
pub fn solve_mrf(inst: &MrfInstance, limits: &Limits) -> Result<MrfSolution> {
    let sol = solve_mrf_compressed(inst, limits)?;
    let flow = sol
        .model
        .decompress(&sol.columns, &sol.result.flow, false, limits)
        .ok_or_else(|| Error::resource("explicit witness paths", limits.max_paths))?;
    let (worst_scenario, worst_loss) =
        best_response(&flow, &inst.graph, inst.budget, None, ScenarioMode::Exactly, limits)?;
    if worst_loss != sol.result.lambda {
        return Err(Error::precondition(format!(
            "worst-case loss {worst_loss} disagrees with the program's {}",
            sol.result.lambda
        )));
    }
    Ok(MrfSolution {
        value: sol.result.value,
        flow,
        worst_loss,
        worst_scenario,
    })
}

/// Whether the robust value reaches `threshold`.
pub fn decide_mrf_star(inst: &MrfInstance, threshold: &Rational, limits: &Limits) -> Result<Decision> {
    Ok(decide_mrf_star_run(inst, threshold, limits)?.decision)
}

pub fn decide_mrf_star_run(inst: &MrfInstance, threshold: &Rational, limits: &Limits) -> Result<DecisionRun> {
    let sol = solve_mrf_compressed(inst, limits)?;
    let yes = sol.result.value >= *threshold;
    let witness = if yes {
        sol.model.decompress(&sol.columns, &sol.result.flow, false, limits)
    } else {
        None
    };
    Ok(DecisionRun {
        decision: Decision {
            yes,
            value: sol.result.value,
            witness,
        },
        lp: sol.result.lp,
    })
}

/// The complement of [`decide_mrf_star`]: whether the randomized
/// interdiction value is strictly below `threshold`.
pub fn decide_rni_star(inst: &MrfInstance, threshold: &Rational, limits: &Limits) -> Result<bool> {
    Ok(!decide_mrf_star(inst, threshold, limits)?.yes)
}

/// The path program written out over every path and every scenario of
/// exactly `k` interdictable arcs. Variables: one per path, then `lambda`.
pub fn mrf_primal_lp(inst: &MrfInstance, limits: &Limits) -> Result<(LinearProgram, Vec<Path>, Vec<Scenario>)> {
    check_budget(inst)?;
    let paths = enumerate_st_paths(&inst.graph, inst.source, inst.sink, limits)?;
    let scenarios = enumerate_scenarios(&inst.graph, inst.budget, ScenarioMode::Exactly, None, limits)?;
    let mut lp = LinearProgram::new(Sense::Maximize);
    let xs: Vec<usize> = (0..paths.len()).map(|i| lp.add_nonneg(format!("x{i}"))).collect();
    let lambda = lp.add_var("lambda", None, None);
    let mut objective: Vec<(usize, Rational)> = xs.iter().map(|&v| (v, Rational::one())).collect();
    objective.push((lambda, -Rational::one()));
    lp.set_objective(objective);
    for arc in inst.graph.arcs() {
        let coeffs: Vec<(usize, Rational)> = paths
            .iter()
            .zip(&xs)
            .filter(|(p, _)| p.contains(arc.id))
            .map(|(_, &v)| (v, Rational::one()))
            .collect();
        if !coeffs.is_empty() {
            lp.add_constraint(format!("cap_{}", arc.name), coeffs, Relation::Le, arc.capacity.clone());
        }
    }
    for (r, s) in scenarios.iter().enumerate() {
        let mut coeffs: Vec<(usize, Rational)> = paths
            .iter()
            .zip(&xs)
            .filter(|(p, _)| p.meets(s))
            .map(|(_, &v)| (v, Rational::one()))
            .collect();
        coeffs.push((lambda, -Rational::one()));
        lp.add_constraint(format!("loss{r}"), coeffs, Relation::Le, Rational::zero());
    }
    Ok((lp, paths, scenarios))
}

/// The interdictor's program: minimize `Σ u_a y_a` subject to one covering
/// row per path and `Σ z = 1`. Variables: one `y` per arc, then one `z` per
/// scenario.
pub fn rni_dual_lp(inst: &MrfInstance, limits: &Limits) -> Result<(LinearProgram, Vec<Path>, Vec<Scenario>)> {
    check_budget(inst)?;
    let paths = enumerate_st_paths(&inst.graph, inst.source, inst.sink, limits)?;
    let scenarios = enumerate_scenarios(&inst.graph, inst.budget, ScenarioMode::Exactly, None, limits)?;
    let mut lp = LinearProgram::new(Sense::Minimize);
    let ys: Vec<usize> = inst
        .graph
        .arcs()
        .iter()
        .map(|a| lp.add_nonneg(format!("y_{}", a.name)))
        .collect();
    let zs: Vec<usize> = (0..scenarios.len()).map(|r| lp.add_nonneg(format!("z{r}"))).collect();
    lp.set_objective(
        inst.graph
            .arcs()
            .iter()
            .zip(&ys)
            .filter(|(a, _)| !a.capacity.is_zero())
            .map(|(a, &v)| (v, a.capacity.clone()))
            .collect(),
    );
    for (i, p) in paths.iter().enumerate() {
        let mut coeffs: Vec<(usize, Rational)> = p.arcs.iter().map(|a| (ys[a.index()], Rational::one())).collect();
        coeffs.sort_by_key(|(v, _)| *v);
        coeffs.dedup_by_key(|(v, _)| *v);
        for (s, &z) in scenarios.iter().zip(&zs) {
            if p.meets(s) {
                coeffs.push((z, Rational::one()));
            }
        }
        lp.add_constraint(format!("cover{i}"), coeffs, Relation::Ge, Rational::one());
    }
    lp.add_constraint(
        "distribution",
        zs.iter().map(|&z| (z, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    Ok((lp, paths, scenarios))
}

/// Optimum of the interdictor's program over explicitly enumerated paths and
/// scenarios.
pub fn solve_rni(inst: &MrfInstance, limits: &Limits) -> Result<RniSolution> {
    inst.validate()?;
    let (lp, _, scenarios) = rni_dual_lp(inst, limits)?;
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::precondition(format!(
            "interdictor program ended {:?}",
            sol.status
        )));
    }
    let m = inst.graph.arc_count();
    let y = sol.primal[..m].to_vec();
    let z = scenarios
        .into_iter()
        .zip(&sol.primal[m..])
        .filter(|(_, v)| v.is_positive())
        .map(|(s, v)| (s, v.clone()))
        .collect();
    Ok(RniSolution { value: sol.value, y, z })
}

/// Robust value for a budget of one from the arc-flow program
/// `max v - λ` subject to conservation, `f_a <= u_a`, and `f_a <= λ` on
/// interdictable arcs.
pub fn solve_mrf_k1(inst: &MrfInstance) -> Result<Rational> {
    inst.validate()?;
    if inst.budget != 1 {
        return Err(Error::precondition(format!("budget is {}, not 1", inst.budget)));
    }
    check_budget(inst)?;
    Ok(solve_lp(&mrf_k1_lp(inst))?.value)
}

pub fn mrf_k1_lp(inst: &MrfInstance) -> LinearProgram {
    let g = &inst.graph;
    let mut lp = LinearProgram::new(Sense::Maximize);
    let fs: Vec<usize> = g
        .arcs()
        .iter()
        .map(|a| {
            lp.add_var(
                format!("f_{}", a.name),
                Some(Rational::zero()),
                Some(a.capacity.clone()),
            )
        })
        .collect();
    let value = lp.add_nonneg("v");
    let lambda = lp.add_nonneg("lambda");
    lp.set_objective(vec![(value, Rational::one()), (lambda, -Rational::one())]);
    for v in g.nodes() {
        let mut net: BTreeMap<usize, Rational> = BTreeMap::new();
        for &a in g.out_arcs(v) {
            *net.entry(fs[a.index()]).or_insert_with(Rational::zero) += Rational::one();
        }
        for &a in g.in_arcs(v) {
            *net.entry(fs[a.index()]).or_insert_with(Rational::zero) -= Rational::one();
        }
        let mut coeffs: Vec<(usize, Rational)> = net.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if v == inst.source {
            coeffs.push((value, -Rational::one()));
        } else if v == inst.sink {
            coeffs.push((value, Rational::one()));
        }
        lp.add_constraint(
            format!("flow_{}", g.node_name(v)),
            coeffs,
            Relation::Eq,
            Rational::zero(),
        );
    }
    for a in g.arcs().iter().filter(|a| !a.immune) {
        lp.add_constraint(
            format!("single_{}", a.name),
            vec![(fs[a.id.index()], Rational::one()), (lambda, -Rational::one())],
            Relation::Le,
            Rational::zero(),
        );
    }
    lp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{ArcId, NodeId};
    use crate::lp::verify_certificates;

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
    fn single_arc_is_worthless() {
        let inst = parallel(1, 1);
        let sol = solve_mrf(&inst, &Limits::default()).unwrap();
        assert_eq!(sol.value, Rational::zero());
        assert_eq!(solve_rni(&inst, &Limits::default()).unwrap().value, Rational::zero());
        assert_eq!(solve_mrf_k1(&inst).unwrap(), Rational::zero());
    }

    #[test]
    fn two_parallel_arcs() {
        let inst = parallel(2, 1);
        let lim = Limits::default();
        let sol = solve_mrf(&inst, &lim).unwrap();
        assert_eq!(sol.value, Rational::one());
        assert_eq!(sol.worst_loss, Rational::one());
        inst.check_flow(&sol.flow).unwrap();
        let rni = solve_rni(&inst, &lim).unwrap();
        assert_eq!(rni.value, Rational::one());
        assert_eq!(rni.z.values().cloned().sum::<Rational>(), Rational::one());
        assert_eq!(solve_mrf_k1(&inst).unwrap(), Rational::one());
        assert!(decide_mrf_star(&inst, &Rational::one(), &lim).unwrap().yes);
        assert!(!decide_rni_star(&inst, &Rational::one(), &lim).unwrap());
        assert!(!decide_mrf_star(&inst, &Rational::new(3, 2), &lim).unwrap().yes);
    }

    #[test]
    fn explicit_programs_agree() {
        let inst = parallel(3, 2);
        let lim = Limits::default();
        let (lp, _, _) = mrf_primal_lp(&inst, &lim).unwrap();
        let p = solve_lp(&lp).unwrap();
        verify_certificates(&lp, &p).unwrap();
        let (dl, _, _) = rni_dual_lp(&inst, &lim).unwrap();
        let d = solve_lp(&dl).unwrap();
        verify_certificates(&dl, &d).unwrap();
        assert_eq!(p.value, d.value);
        assert_eq!(solve_mrf(&inst, &lim).unwrap().value, p.value);
        assert_eq!(p.value, Rational::one());
    }

    #[test]
    fn best_response_ties_and_zero_flow() {
        let inst = parallel(3, 2);
        let lim = Limits::default();
        let (s, l) = best_response(&PathFlow::new(), &inst.graph, 2, None, ScenarioMode::Exactly, &lim).unwrap();
        assert_eq!(l, Rational::zero());
        assert_eq!(s, [ArcId(0), ArcId(1)].into_iter().collect());
        let (s, _) = best_response(&PathFlow::new(), &inst.graph, 2, None, ScenarioMode::AtMost, &lim).unwrap();
        assert!(s.is_empty());
        let flow: PathFlow = (0..3).map(|i| (Path::new(vec![ArcId(i)]), Rational::one())).collect();
        let (s, l) = best_response(&flow, &inst.graph, 1, None, ScenarioMode::Exactly, &lim).unwrap();
        assert_eq!(l, Rational::one());
        assert_eq!(s, [ArcId(0)].into_iter().collect());
    }

    #[test]
    fn disconnected_source_gives_zero() {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        g.add_arc("back", t, s, Rational::one(), false).unwrap();
        let inst = MrfInstance::new(g, s, t, 1, None).unwrap();
        let sol = solve_mrf(&inst, &Limits::default()).unwrap();
        assert_eq!(sol.value, Rational::zero());
        assert!(sol.flow.is_empty());
        assert_eq!(inst.source, NodeId(0));
    }
}
