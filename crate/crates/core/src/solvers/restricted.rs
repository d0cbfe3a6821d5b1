use crate::error::{Error, Result};
use crate::instances::{MrfMInstance, MrfRInstance, Path, PathFlow};
use crate::limits::Limits;
use crate::lp::Relation;
use crate::rational::Rational;
use crate::solvers::engine::{self, ClassModel, Column, Formulation, LossRows};
use crate::solvers::{Decision, DecisionRun};

/// Whether some flow of value `θ` keeps the loss of every clique of at most
/// `k` arcs within `k - 1`.
pub fn decide_mrf_r_star(inst: &MrfRInstance, limits: &Limits) -> Result<Decision> {
    Ok(decide_mrf_r_star_run(inst, limits)?.decision)
}

pub fn decide_mrf_r_star_run(inst: &MrfRInstance, limits: &Limits) -> Result<DecisionRun> {
    inst.validate()?;
    let model = ClassModel::restricted(&inst.graph, &inst.compat)?;
    let columns = model.columns(0, inst.source, inst.sink, limits)?;
    let form = Formulation {
        budget: inst.budget,
        exact: false,
        use_compat: true,
        loss: LossRows::Bound(inst.loss_bound()),
        demand: vec![None],
        total: Some(inst.demand.clone()),
        weights: None,
    };
    let res = engine::solve(&model, &columns, &form, limits)?;
    let yes = res.value == inst.demand;
    let witness = if yes {
        Some(
            model
                .decompress(&columns, &res.flow, false, limits)
                .ok_or_else(|| Error::resource("explicit witness paths", limits.max_paths))?,
        )
    } else {
        None
    };
    Ok(DecisionRun {
        decision: Decision {
            yes,
            value: res.value,
            witness,
        },
        lp: res.lp,
    })
}

/// Whether some multicommodity flow meets every demand while every set of
/// at most `k` interdictable arcs cuts at most `kM - 1` units.
pub fn decide_mrf_m_star(inst: &MrfMInstance, limits: &Limits) -> Result<Decision> {
    Ok(decide_mrf_m_star_run(inst, limits)?.decision)
}

pub fn decide_mrf_m_star_run(inst: &MrfMInstance, limits: &Limits) -> Result<DecisionRun> {
    inst.validate()?;
    let model = ClassModel::plain(&inst.graph)?;
    let columns = commodity_columns(&model, inst, limits)?;
    let form = Formulation {
        budget: inst.budget,
        exact: false,
        use_compat: false,
        loss: LossRows::Bound(inst.loss_bound()),
        demand: inst
            .commodities
            .iter()
            .map(|c| Some((Relation::Le, c.demand.clone())))
            .collect(),
        total: None,
        weights: None,
    };
    let res = engine::solve(&model, &columns, &form, limits)?;
    let total: Rational = inst.commodities.iter().map(|c| c.demand.clone()).sum();
    let yes = res.value == total;
    let witness = if yes {
        Some(
            model
                .decompress(&columns, &res.flow, true, limits)
                .ok_or_else(|| Error::resource("explicit witness paths", limits.max_paths))?,
        )
    } else {
        None
    };
    Ok(DecisionRun {
        decision: Decision {
            yes,
            value: res.value,
            witness,
        },
        lp: res.lp,
    })
}

fn commodity_columns(model: &ClassModel, inst: &MrfMInstance, limits: &Limits) -> Result<Vec<Column>> {
    let mut columns = Vec::new();
    for (i, c) in inst.commodities.iter().enumerate() {
        columns.extend(model.columns(i, c.source, c.sink, limits)?);
        limits.check_paths(columns.len())?;
    }
    Ok(columns)
}

/// A basic optimal multicommodity flow meeting every demand exactly under
/// the path weights given by `weight`, ignoring interdiction. `None` when
/// the demands cannot be met.
pub fn optimize_multicommodity(
    inst: &MrfMInstance,
    weight: &dyn Fn(&Path) -> Rational,
    limits: &Limits,
) -> Result<Option<PathFlow>> {
    inst.validate()?;
    let model = ClassModel::singletons(&inst.graph)?;
    let columns = commodity_columns(&model, inst, limits)?;
    let weights = columns.iter().map(|c| weight(&model.expand(c, true)[0])).collect();
    let form = Formulation {
        budget: inst.budget,
        exact: false,
        use_compat: false,
        loss: LossRows::Off,
        demand: inst
            .commodities
            .iter()
            .map(|c| Some((Relation::Eq, c.demand.clone())))
            .collect(),
        total: None,
        weights: Some(weights),
    };
    let res = engine::solve(&model, &columns, &form, limits)?;
    if !res.feasible {
        return Ok(None);
    }
    Ok(model.decompress(&columns, &res.flow, true, limits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{ArcId, Commodity, CompatGraph, Digraph, ScenarioMode};
    use crate::solvers::best_response;

    fn bundles(sizes: &[usize]) -> (Digraph, Vec<Vec<ArcId>>) {
        let mut g = Digraph::new();
        let nodes: Vec<_> = (0..=sizes.len())
            .map(|i| g.add_node(format!("z{i}")).unwrap())
            .collect();
        let mut ids = Vec::new();
        for (i, &n) in sizes.iter().enumerate() {
            ids.push(
                (0..n)
                    .map(|j| {
                        g.add_arc(format!("a{i}_{j}"), nodes[i], nodes[i + 1], Rational::one(), false)
                            .unwrap()
                    })
                    .collect(),
            );
        }
        (g, ids)
    }

    #[test]
    fn zero_demand_is_yes() {
        let (g, _) = bundles(&[1]);
        let s = g.node_by_name("z0").unwrap();
        let t = g.node_by_name("z1").unwrap();
        let inst = MrfRInstance::new(g, s, t, 2, CompatGraph::new(), Rational::zero(), false).unwrap();
        let d = decide_mrf_r_star(&inst, &Limits::default()).unwrap();
        assert!(d.yes);
        assert!(d.witness.unwrap().is_empty());
    }

    #[test]
    fn clique_pair_limits_flow() {
        // Two parallel arcs adjacent in H with k = 2: losing both is allowed to
        // cost at most 1, so value 2 is impossible but 1 is fine.
        let (g, ids) = bundles(&[2]);
        let s = g.node_by_name("z0").unwrap();
        let t = g.node_by_name("z1").unwrap();
        let mut h = CompatGraph::new();
        h.add_edge(ids[0][0], ids[0][1]).unwrap();
        let lim = Limits::default();
        let no = MrfRInstance::new(g.clone(), s, t, 2, h.clone(), Rational::from_int(2), false).unwrap();
        assert!(!decide_mrf_r_star(&no, &lim).unwrap().yes);
        let yes = MrfRInstance::new(g.clone(), s, t, 2, h.clone(), Rational::one(), false).unwrap();
        let d = decide_mrf_r_star(&yes, &lim).unwrap();
        assert!(d.yes);
        let w = d.witness.unwrap();
        yes.check_flow(&w).unwrap();
        let (_, loss) = best_response(&w, &g, 2, Some(&h), ScenarioMode::AtMost, &lim).unwrap();
        assert!(loss <= Rational::one());
        // Without the edge both arcs can carry flow.
        let free = MrfRInstance::new(g, s, t, 2, CompatGraph::new(), Rational::from_int(2), false).unwrap();
        assert!(decide_mrf_r_star(&free, &lim).unwrap().yes);
    }

    #[test]
    fn multicommodity_demand_infeasible() {
        let (g, _) = bundles(&[1]);
        let s = g.node_by_name("z0").unwrap();
        let t = g.node_by_name("z1").unwrap();
        let commodities = vec![Commodity {
            name: "c0".into(),
            source: s,
            sink: t,
            demand: Rational::from_int(2),
        }];
        let inst = MrfMInstance::new(g, 1, commodities, 0).unwrap();
        let lim = Limits::default();
        assert!(!decide_mrf_m_star(&inst, &lim).unwrap().yes);
        assert!(optimize_multicommodity(&inst, &|_| Rational::one(), &lim)
            .unwrap()
            .is_none());
    }
}
