use crate::error::{Error, Result};
use crate::instances::{MrfInstance, MrfMInstance, MrfRInstance, PathFlow, Scenario, ScenarioMode};
use crate::limits::Limits;
use crate::rational::Rational;
use crate::solvers::best_response;

/// What a checked witness achieves against its strongest interdiction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    /// Total flow shipped.
    pub shipped: Rational,
    pub worst_loss: Rational,
    pub worst_scenario: Scenario,
}

impl WitnessReport {
    /// `shipped - worst_loss`.
    pub fn robust_value(&self) -> Rational {
        &self.shipped - &self.worst_loss
    }
}

/// Accepts a flow whose robust value against `k`-arc interdiction reaches
/// `threshold`.
pub fn check_mrf_witness(
    inst: &MrfInstance,
    flow: &PathFlow,
    threshold: &Rational,
    limits: &Limits,
) -> Result<WitnessReport> {
    inst.validate()?;
    inst.check_flow(flow)?;
    let (worst_scenario, worst_loss) =
        best_response(flow, &inst.graph, inst.budget, None, ScenarioMode::Exactly, limits)?;
    let report = WitnessReport {
        shipped: flow.value(),
        worst_loss,
        worst_scenario,
    };
    let robust = report.robust_value();
    if robust < *threshold {
        return Err(Error::validation(
            "flow",
            format!("robust value {robust} is below the threshold {threshold}"),
        ));
    }
    Ok(report)
}

/// Accepts a flow meeting the demand whose loss on every clique scenario of
/// at most `k` arcs stays within `k - 1`.
pub fn check_mrf_r_witness(inst: &MrfRInstance, flow: &PathFlow, limits: &Limits) -> Result<WitnessReport> {
    inst.validate()?;
    inst.check_flow(flow)?;
    let (worst_scenario, worst_loss) = best_response(
        flow,
        &inst.graph,
        inst.budget,
        Some(&inst.compat),
        ScenarioMode::AtMost,
        limits,
    )?;
    bounded(flow, worst_scenario, worst_loss, inst.loss_bound())
}

/// Accepts a multicommodity flow meeting every demand whose loss on every
/// set of at most `k` interdictable arcs stays within `kM - 1`.
pub fn check_mrf_m_witness(inst: &MrfMInstance, flow: &PathFlow, limits: &Limits) -> Result<WitnessReport> {
    inst.validate()?;
    inst.check_flow(flow)?;
    let (worst_scenario, worst_loss) =
        best_response(flow, &inst.graph, inst.budget, None, ScenarioMode::AtMost, limits)?;
    bounded(flow, worst_scenario, worst_loss, inst.loss_bound())
}

fn bounded(flow: &PathFlow, worst_scenario: Scenario, worst_loss: Rational, bound: Rational) -> Result<WitnessReport> {
    if worst_loss > bound {
        return Err(Error::validation(
            "flow",
            format!("scenario {worst_scenario:?} removes {worst_loss}, above the bound {bound}"),
        ));
    }
    Ok(WitnessReport {
        shipped: flow.value(),
        worst_loss,
        worst_scenario,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{CompatGraph, Digraph, Path};

    fn parallel(compat: bool) -> (MrfRInstance, PathFlow) {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        let a = g.add_arc("a", s, t, Rational::one(), false).unwrap();
        let b = g.add_arc("b", s, t, Rational::one(), false).unwrap();
        let mut h = CompatGraph::new();
        if compat {
            h.add_edge(a, b).unwrap();
        }
        let mut flow = PathFlow::new();
        flow.add(Path::new(vec![a]), Rational::one());
        flow.add(Path::new(vec![b]), Rational::one());
        (
            MrfRInstance::new(g, s, t, 2, h, Rational::from_int(2), false).unwrap(),
            flow,
        )
    }

    #[test]
    fn clique_losses_are_bounded() {
        let lim = Limits::default();
        let (free, flow) = parallel(false);
        let report = check_mrf_r_witness(&free, &flow, &lim).unwrap();
        assert_eq!(report.worst_loss, Rational::one());
        let (tied, flow) = parallel(true);
        assert!(check_mrf_r_witness(&tied, &flow, &lim).is_err());
    }

    #[test]
    fn robust_value_against_threshold() {
        let lim = Limits::default();
        let (inst, flow) = parallel(false);
        let mrf = MrfInstance::new(inst.graph.clone(), inst.source, inst.sink, 1, None).unwrap();
        let report = check_mrf_witness(&mrf, &flow, &Rational::one(), &lim).unwrap();
        assert_eq!(report.robust_value(), Rational::one());
        assert!(check_mrf_witness(&mrf, &flow, &Rational::from_int(2), &lim).is_err());
    }
}
