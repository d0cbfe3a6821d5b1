use crate::error::{Error, Result};
use crate::instances::{MrfInstance, MrfMInstance, MrfRInstance, PathFlow};
use crate::rational::Rational;
use crate::reductions::{
    check_properties, expand_flow, expand_immune, lift_flow, normalize_mrfr, reduce_mrfm_to_mrf, reduce_mrfr_to_mrfm,
    ExpandLayout, MulticommodityLayout, PropertyReport, ReductionArtifact, SplitLayout, WrapperLayout,
};

/// Every stage of the restricted-to-plain transformation.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub normalized: ReductionArtifact<MrfRInstance, SplitLayout>,
    pub multicommodity: ReductionArtifact<MrfMInstance, MulticommodityLayout>,
    pub properties: PropertyReport,
    pub wrapped: ReductionArtifact<MrfInstance, WrapperLayout>,
    pub expanded: ReductionArtifact<MrfInstance, ExpandLayout>,
}

impl Pipeline {
    pub fn output(&self) -> &MrfInstance {
        &self.expanded.output
    }

    pub fn threshold(&self) -> &Rational {
        self.expanded
            .output
            .threshold
            .as_ref()
            .expect("wrapper sets a threshold")
    }

    /// Carries a multicommodity witness to the final instance.
    pub fn lift(&self, flow: &PathFlow, integral: bool) -> Result<PathFlow> {
        let wrapped = lift_flow(&self.wrapped, flow, integral)?;
        expand_flow(&self.expanded, &wrapped)
    }
}

/// Normalize, split into commodities, check the structural properties,
/// wrap into one commodity with immune arcs, and expand the immune arcs.
/// The budget is the same at every stage.
pub fn mrfr_to_mrf(inst: &MrfRInstance) -> Result<Pipeline> {
    let normalized = normalize_mrfr(inst)?;
    let multicommodity = reduce_mrfr_to_mrfm(&normalized.output)?;
    let properties = check_properties(&multicommodity);
    if let Some(fail) = properties.first_failure() {
        return Err(Error::precondition(format!(
            "property {} fails: {}",
            fail.property, fail.detail
        )));
    }
    let wrapped = reduce_mrfm_to_mrf(&multicommodity.output)?;
    let expanded = expand_immune(&wrapped.output)?;
    Ok(Pipeline {
        normalized,
        multicommodity,
        properties,
        wrapped,
        expanded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{CompatGraph, Digraph};

    #[test]
    fn budget_is_preserved() {
        let mut g = Digraph::new();
        let s = g.add_node("s").unwrap();
        let t = g.add_node("t").unwrap();
        g.add_arc("a", s, t, Rational::one(), false).unwrap();
        let inst = MrfRInstance::new(g, s, t, 2, CompatGraph::new(), Rational::one(), false).unwrap();
        let p = mrfr_to_mrf(&inst).unwrap();
        assert_eq!(p.output().budget, 2);
        assert!(!p.output().graph.has_immune_arcs());
        let delta = &p.wrapped.parameters["delta"];
        assert_eq!(
            *p.threshold(),
            delta - &(Rational::from_int(2) * &p.multicommodity.parameters["M"] - Rational::one())
        );
    }
}
