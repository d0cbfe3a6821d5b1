use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{ArcId, CompatGraph, MrfRInstance};
use crate::rational::Rational;
use crate::reductions::{copy_compat, integer_demand, Builder, ReductionArtifact};

#[derive(Debug, Clone)]
pub struct SplitLayout {
    /// Unit arcs from the new source to the old one.
    pub bundle: Vec<ArcId>,
    /// Pairwise compatible source-sink arcs, last in arc order.
    pub clique: Vec<ArcId>,
}

#[derive(Debug, Clone)]
pub struct PadLayout {
    pub added: Vec<ArcId>,
}

#[derive(Debug, Clone)]
pub struct SubdivisionLayout {
    /// Series segments replacing each input arc.
    pub segments: Vec<Vec<ArcId>>,
}

fn split_source(inst: &MrfRInstance, clique: usize) -> Result<ReductionArtifact<MrfRInstance, SplitLayout>> {
    inst.validate()?;
    let theta = integer_demand(inst)?;
    let mut b = Builder::default();
    b.copy(&inst.graph, "input");
    let old = inst.graph.node_name(inst.source).to_string();
    let source = b.node(&format!("{old}'"), "source ahead of the demand bundle");
    let bundle: Vec<ArcId> = (0..theta)
        .map(|j| {
            b.arc(
                &format!("{old}_split{}", j + 1),
                source,
                inst.source,
                Rational::one(),
                false,
                format!("demand bundle arc {}", j + 1),
            )
        })
        .collect();
    let sink = inst.graph.node_name(inst.sink).to_string();
    let clique: Vec<ArcId> = (0..clique)
        .map(|j| {
            b.arc(
                &format!("{old}_{sink}_clique{}", j + 1),
                source,
                inst.sink,
                Rational::one(),
                false,
                format!("budget clique arc {}", j + 1),
            )
        })
        .collect();
    let mut compat = CompatGraph::new();
    copy_compat(&inst.compat, |a| a, &mut compat);
    for (i, &a) in clique.iter().enumerate() {
        for &c in &clique[i + 1..] {
            compat.add_edge(a, c)?;
        }
    }
    let demand = &inst.demand + &Rational::from(clique.len());
    let output = MrfRInstance::new(
        b.graph,
        source,
        inst.sink,
        inst.budget,
        compat,
        demand.clone(),
        inst.integral,
    )?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from(inst.budget)),
        ("demand".to_string(), demand),
        ("bundle".to_string(), Rational::from(theta)),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: SplitLayout { bundle, clique },
    })
}

/// Splits the source by a bundle of `θ` singleton arcs and adds `k - 1`
/// pairwise compatible source-sink arcs, raising the demand by `k - 1`.
pub fn normalize_mrfr(inst: &MrfRInstance) -> Result<ReductionArtifact<MrfRInstance, SplitLayout>> {
    if inst.demand.is_zero() {
        return Err(Error::precondition("demand must be positive"));
    }
    split_source(inst, inst.budget - 1)
}

/// Splits the source by a bundle of `θ` singleton arcs so that no flow
/// exceeds the demand.
pub fn saturate_demand(inst: &MrfRInstance) -> Result<ReductionArtifact<MrfRInstance, SplitLayout>> {
    split_source(inst, 0)
}

/// Raises the budget to `target` with source-sink arcs compatible with every
/// arc, raising the demand by the same amount.
pub fn pad_budget(inst: &MrfRInstance, target: usize) -> Result<ReductionArtifact<MrfRInstance, PadLayout>> {
    inst.validate()?;
    if target < inst.budget {
        return Err(Error::precondition(format!(
            "target budget {target} is below the budget {}",
            inst.budget
        )));
    }
    let mut b = Builder::default();
    b.copy(&inst.graph, "input");
    let added: Vec<ArcId> = (0..target - inst.budget)
        .map(|j| {
            b.arc(
                &format!("pad{}", j + 1),
                inst.source,
                inst.sink,
                Rational::one(),
                false,
                format!("universal padding arc {}", j + 1),
            )
        })
        .collect();
    let mut compat = CompatGraph::new();
    copy_compat(&inst.compat, |a| a, &mut compat);
    for &p in &added {
        for a in b.graph.arcs() {
            if a.id != p {
                compat.add_edge(p, a.id)?;
            }
        }
    }
    let demand = &inst.demand + &Rational::from(added.len());
    let output = MrfRInstance::new(
        b.graph,
        inst.source,
        inst.sink,
        target,
        compat,
        demand.clone(),
        inst.integral,
    )?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from(target)),
        ("demand".to_string(), demand),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: PadLayout { added },
    })
}

/// Replaces every arc of compatibility degree `d > 1` by `d` series
/// segments; its `j`-th neighbor (by id) becomes compatible with its `j`-th
/// segment only.
pub fn matchingize_compat(inst: &MrfRInstance) -> Result<ReductionArtifact<MrfRInstance, SubdivisionLayout>> {
    inst.validate()?;
    let g = &inst.graph;
    let mut b = Builder::default();
    for v in g.nodes() {
        b.node(g.node_name(v), "input node");
    }
    let mut segments = Vec::with_capacity(g.arc_count());
    for a in g.arcs() {
        let pieces = inst.compat.degree(a.id).max(1);
        if pieces == 1 {
            segments.push(vec![b.arc(
                &a.name,
                a.tail,
                a.head,
                Rational::one(),
                false,
                "input arc",
            )]);
            continue;
        }
        let mut at = a.tail;
        let mut segs = Vec::with_capacity(pieces);
        for j in 1..=pieces {
            let next = if j == pieces {
                a.head
            } else {
                b.node(
                    &format!("{}@{j}", a.name),
                    format!("subdivision node {j} of {}", a.name),
                )
            };
            segs.push(b.arc(
                &format!("{}#{j}", a.name),
                at,
                next,
                Rational::one(),
                false,
                format!("subdivision segment {j} of {}", a.name),
            ));
            at = next;
        }
        segments.push(segs);
    }
    let slot = |a: ArcId, other: ArcId| -> ArcId {
        let segs = &segments[a.index()];
        if segs.len() == 1 {
            return segs[0];
        }
        let j = inst
            .compat
            .neighbors(a)
            .position(|n| n == other)
            .expect("edge endpoint");
        segs[j]
    };
    let mut compat = CompatGraph::new();
    for (a, c) in inst.compat.edges() {
        compat.add_edge(slot(a, c), slot(c, a))?;
    }
    let output = MrfRInstance::new(
        b.graph,
        inst.source,
        inst.sink,
        inst.budget,
        compat,
        inst.demand.clone(),
        inst.integral,
    )?;
    let parameters = BTreeMap::from([
        ("budget".to_string(), Rational::from(inst.budget)),
        ("demand".to_string(), inst.demand.clone()),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: SubdivisionLayout { segments },
    })
}
