use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::instances::{topological_arc_order, ArcId, Commodity, MrfMInstance, MrfRInstance, NodeId, Path, PathFlow};
use crate::rational::Rational;
use crate::reductions::{integer_demand, Builder, ReductionArtifact};

#[derive(Debug, Clone)]
pub struct MulticommodityLayout {
    pub input: MrfRInstance,
    /// Input arcs from earliest to latest; later arcs never precede earlier
    /// ones on a path.
    pub order: Vec<ArcId>,
    /// Incompatible pairs `(later, earlier)`; pair `i` is commodity `i + 1`.
    pub pairs: Vec<(ArcId, ArcId)>,
    /// The `k - 1` pairwise compatible source-sink input arcs.
    pub clique: Vec<ArcId>,
    /// Per input arc `(v, w)`: the arcs `v -> a+`, `a+ -> a-`, `a- -> w`.
    pub entry: Vec<ArcId>,
    pub middle: Vec<ArcId>,
    pub exit: Vec<ArcId>,
    /// Per input arc: its `+` and `-` nodes.
    pub plus: Vec<NodeId>,
    pub minus: Vec<NodeId>,
    pub source_link: ArcId,
    pub sink_link: ArcId,
    /// `(commodity, input arc)` to the arc from the commodity source into
    /// the arc's `+` node, and from its `-` node into the commodity sink.
    pub feeds: BTreeMap<(usize, ArcId), ArcId>,
    pub drains: BTreeMap<(usize, ArcId), ArcId>,
    /// Per pair `(a, b)`: the arc from `a-` to `b+`.
    pub crossings: Vec<ArcId>,
    /// Source side of the cut carrying exactly `k - 1` arcs of capacity `M`.
    pub cut: Vec<NodeId>,
}

fn normalized_clique(inst: &MrfRInstance) -> Result<Vec<ArcId>> {
    if inst.budget < 2 {
        return Err(Error::precondition(
            "the reduction needs interdiction budget at least 2",
        ));
    }
    let theta = integer_demand(inst)?;
    let g = &inst.graph;
    if g.out_arcs(inst.source).len() != theta || !g.in_arcs(inst.source).is_empty() {
        return Err(Error::precondition(
            "input is not normalized: the source must have exactly demand-many out-arcs and no in-arcs",
        ));
    }
    let direct: Vec<ArcId> = g
        .out_arcs(inst.source)
        .iter()
        .copied()
        .filter(|&a| g.arc(a).head == inst.sink)
        .collect();
    let need = inst.budget - 1;
    if direct.len() < need {
        return Err(Error::precondition(format!(
            "input is not normalized: fewer than {need} source-sink arcs"
        )));
    }
    let mut clique = direct[direct.len() - need..].to_vec();
    clique.sort();
    if !inst.compat.is_clique(&clique) {
        return Err(Error::precondition(
            "input is not normalized: the last source-sink arcs are not pairwise compatible",
        ));
    }
    Ok(clique)
}

/// Builds the multicommodity instance: every input arc is subdivided by an
/// arc of capacity `M`; commodity 0 carries the input flow plus filler on
/// each subdivided arc, and one commodity per incompatible pair routes two
/// units through every subdivided arc.
pub fn reduce_mrfr_to_mrfm(inst: &MrfRInstance) -> Result<ReductionArtifact<MrfMInstance, MulticommodityLayout>> {
    inst.validate()?;
    let clique = normalized_clique(inst)?;
    let g = &inst.graph;
    let arcs = g.arc_count();
    let order = topological_arc_order(g, &clique)?;
    let mut rank = vec![0usize; arcs];
    for (i, a) in order.iter().enumerate() {
        rank[a.index()] = i;
    }
    let mut pairs = Vec::new();
    for a in g.arcs() {
        for b in g.arcs() {
            if rank[a.id.index()] > rank[b.id.index()] && !inst.compat.contains(a.id, b.id) {
                pairs.push((a.id, b.id));
            }
        }
    }
    let f = pairs.len();
    let theta = &inst.demand;
    let big = Rational::from(2 * arcs.saturating_sub(1) * f + 3).max(theta + &Rational::from_int(2));
    let filler = &big - &Rational::from(2 * f + 1);
    let pair_demand = Rational::from(2 * arcs.saturating_sub(1));
    let main_demand = theta + &(Rational::from(arcs) * &filler);
    let two = Rational::from_int(2);

    let mut b = Builder::default();
    b.copy_nodes(g, "input");
    let plus: Vec<NodeId> = g
        .arcs()
        .iter()
        .map(|a| b.node(&format!("{}+", a.name), format!("head side of {}", a.name)))
        .collect();
    let minus: Vec<NodeId> = g
        .arcs()
        .iter()
        .map(|a| b.node(&format!("{}-", a.name), format!("tail side of {}", a.name)))
        .collect();
    let sources: Vec<NodeId> = (0..=f)
        .map(|i| b.node(&format!("src{i}"), commodity_role("source", i, &pairs, g)))
        .collect();
    let sinks: Vec<NodeId> = (0..=f)
        .map(|i| b.node(&format!("snk{i}"), commodity_role("sink", i, &pairs, g)))
        .collect();

    let s_name = g.node_name(inst.source).to_string();
    let t_name = g.node_name(inst.sink).to_string();
    let source_link = b.arc(
        &format!("src0>{s_name}"),
        sources[0],
        inst.source,
        theta.clone(),
        false,
        "main commodity into the old source",
    );
    let sink_link = b.arc(
        &format!("{t_name}>snk0"),
        inst.sink,
        sinks[0],
        theta.clone(),
        false,
        "old sink into the main commodity sink",
    );

    let first_of: Vec<BTreeSet<usize>> = (0..arcs)
        .map(|x| (0..f).filter(|&i| pairs[i].0.index() == x).collect())
        .collect();
    let second_of: Vec<BTreeSet<usize>> = (0..arcs)
        .map(|x| (0..f).filter(|&i| pairs[i].1.index() == x).collect())
        .collect();
    let (mut entry, mut middle, mut exit) = (Vec::new(), Vec::new(), Vec::new());
    let mut feeds = BTreeMap::new();
    let mut drains = BTreeMap::new();
    for a in g.arcs() {
        let x = a.id.index();
        let n = &a.name;
        entry.push(b.arc(
            &format!("{n}.in"),
            a.tail,
            plus[x],
            Rational::one(),
            false,
            format!("entry of {n}"),
        ));
        middle.push(b.arc(
            &format!("{n}.mid"),
            plus[x],
            minus[x],
            big.clone(),
            false,
            format!("subdivision of {n}"),
        ));
        exit.push(b.arc(
            &format!("{n}.out"),
            minus[x],
            a.head,
            Rational::one(),
            false,
            format!("exit of {n}"),
        ));
        feeds.insert(
            (0, a.id),
            b.arc(
                &format!("src0>{n}"),
                sources[0],
                plus[x],
                filler.clone(),
                false,
                format!("main filler into {n}"),
            ),
        );
        drains.insert(
            (0, a.id),
            b.arc(
                &format!("{n}>snk0"),
                minus[x],
                sinks[0],
                filler.clone(),
                false,
                format!("main filler out of {n}"),
            ),
        );
        for i in 0..f {
            if !second_of[x].contains(&i) {
                let role = format!("pair {} feed into {n}", i + 1);
                feeds.insert(
                    (i + 1, a.id),
                    b.arc(
                        &format!("src{}>{n}", i + 1),
                        sources[i + 1],
                        plus[x],
                        two.clone(),
                        false,
                        role,
                    ),
                );
            }
        }
        for i in 0..f {
            if !first_of[x].contains(&i) {
                let role = format!("pair {} drain out of {n}", i + 1);
                drains.insert(
                    (i + 1, a.id),
                    b.arc(
                        &format!("{n}>snk{}", i + 1),
                        minus[x],
                        sinks[i + 1],
                        two.clone(),
                        false,
                        role,
                    ),
                );
            }
        }
    }
    let crossings: Vec<ArcId> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(p, q))| {
            let (pn, qn) = (&g.arc(p).name, &g.arc(q).name);
            b.arc(
                &format!("{pn}>{qn}"),
                minus[p.index()],
                plus[q.index()],
                two.clone(),
                false,
                format!("pair {} crossing from {pn} to {qn}", i + 1),
            )
        })
        .collect();

    let mut commodities = vec![Commodity {
        name: "c0".into(),
        source: sources[0],
        sink: sinks[0],
        demand: main_demand.clone(),
    }];
    for i in 1..=f {
        commodities.push(Commodity {
            name: format!("c{i}"),
            source: sources[i],
            sink: sinks[i],
            demand: pair_demand.clone(),
        });
    }
    for c in &commodities {
        b.provenance.tag(
            format!("commodity:{}", c.name),
            if c.name == "c0" {
                "main commodity".to_string()
            } else {
                format!("pair commodity {}", &c.name[1..])
            },
        );
    }
    let mut cut: Vec<NodeId> = sources.clone();
    cut.push(inst.source);
    cut.extend(clique.iter().map(|a| plus[a.index()]));
    let output = MrfMInstance::new(b.graph, inst.budget, commodities, 0)?;
    let parameters = BTreeMap::from([
        ("M".to_string(), big),
        ("pairs".to_string(), Rational::from(f)),
        ("demand".to_string(), theta.clone()),
        ("budget".to_string(), Rational::from(inst.budget)),
        ("main_demand".to_string(), main_demand),
        ("pair_demand".to_string(), pair_demand),
        ("filler".to_string(), filler),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: MulticommodityLayout {
            input: inst.clone(),
            order,
            pairs,
            clique,
            entry,
            middle,
            exit,
            plus,
            minus,
            source_link,
            sink_link,
            feeds,
            drains,
            crossings,
            cut,
        },
    })
}

fn commodity_role(side: &str, i: usize, pairs: &[(ArcId, ArcId)], g: &crate::instances::Digraph) -> String {
    if i == 0 {
        format!("main commodity {side}")
    } else {
        let (a, b) = pairs[i - 1];
        format!("pair commodity {i} {side} for ({}, {})", g.arc(a).name, g.arc(b).name)
    }
}

/// The pair commodities' flow: two units through the pair's own two
/// subdivided arcs joined by their crossing, and two units through every
/// other subdivided arc.
pub fn hat_flow(artifact: &ReductionArtifact<MrfMInstance, MulticommodityLayout>) -> PathFlow {
    let l = &artifact.layout;
    let two = Rational::from_int(2);
    let mut flow = PathFlow::new();
    for (p, &(a, b)) in l.pairs.iter().enumerate() {
        let i = p + 1;
        flow.add(
            Path::for_commodity(
                i,
                vec![
                    l.feeds[&(i, a)],
                    l.middle[a.index()],
                    l.crossings[p],
                    l.middle[b.index()],
                    l.drains[&(i, b)],
                ],
            ),
            two.clone(),
        );
        for c in l.input.graph.arcs().iter().map(|x| x.id).filter(|&c| c != a && c != b) {
            flow.add(
                Path::for_commodity(i, vec![l.feeds[&(i, c)], l.middle[c.index()], l.drains[&(i, c)]]),
                two.clone(),
            );
        }
    }
    flow
}

/// Maps a flow of the restricted instance to the multicommodity instance:
/// each path threads the subdivided arcs between the main commodity's
/// terminals, every subdivided arc gets filler, and the pair commodities
/// follow [`hat_flow`].
pub fn lift_restricted_flow(
    artifact: &ReductionArtifact<MrfMInstance, MulticommodityLayout>,
    flow: &PathFlow,
) -> Result<PathFlow> {
    let l = &artifact.layout;
    l.input.check_flow(flow)?;
    let mut out = hat_flow(artifact);
    for (path, value) in flow.iter() {
        let mut arcs = vec![l.source_link];
        for &a in &path.arcs {
            arcs.extend([l.entry[a.index()], l.middle[a.index()], l.exit[a.index()]]);
        }
        arcs.push(l.sink_link);
        out.add(Path::for_commodity(0, arcs), value.clone());
    }
    let filler = artifact.parameters["filler"].clone();
    for a in l.input.graph.arcs() {
        if filler.is_positive() {
            out.add(
                Path::for_commodity(
                    0,
                    vec![l.feeds[&(0, a.id)], l.middle[a.id.index()], l.drains[&(0, a.id)]],
                ),
                filler.clone(),
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub property: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "property {}: {} ({})",
                c.property,
                if c.passed { "pass" } else { "FAIL" },
                c.detail
            )?;
        }
        Ok(())
    }
}

fn check(property: usize, outcome: std::result::Result<String, String>) -> PropertyCheck {
    match outcome {
        Ok(detail) => PropertyCheck {
            property,
            passed: true,
            detail,
        },
        Err(detail) => PropertyCheck {
            property,
            passed: false,
            detail,
        },
    }
}

/// Capacities integral with the expected maximum.
pub(crate) fn integral_capacities(inst: &MrfMInstance) -> std::result::Result<String, String> {
    if let Some(a) = inst.graph.arcs().iter().find(|a| !a.capacity.is_integer()) {
        return Err(format!("arc {} has capacity {}", a.name, a.capacity));
    }
    Ok(format!("M = {}", inst.max_capacity()))
}

/// Every commodity source has no in-arcs and out-capacity equal to its
/// demand; symmetrically for sinks.
pub(crate) fn terminal_capacities(inst: &MrfMInstance) -> std::result::Result<String, String> {
    let g = &inst.graph;
    for c in &inst.commodities {
        if !g.in_arcs(c.source).is_empty() || !g.out_arcs(c.sink).is_empty() {
            return Err(format!(
                "commodity {} has arcs into its source or out of its sink",
                c.name
            ));
        }
        let (out, inn) = (g.out_capacity(c.source), g.in_capacity(c.sink));
        if out != c.demand || inn != c.demand {
            return Err(format!(
                "commodity {}: out {out}, in {inn}, demand {}",
                c.name, c.demand
            ));
        }
    }
    Ok("terminal capacities equal demands".into())
}

/// The non-designated demands sum to at most `M - 3`.
pub(crate) fn small_side_demands(inst: &MrfMInstance) -> std::result::Result<String, String> {
    let rest: Rational = inst
        .commodities
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != inst.designated)
        .map(|(_, c)| c.demand.clone())
        .sum();
    let bound = inst.max_capacity() - Rational::from_int(3);
    if rest > bound {
        return Err(format!("other demands sum to {rest} > M - 3 = {bound}"));
    }
    Ok(format!("other demands sum to {rest} <= {bound}"))
}

/// Every non-designated commodity sends at least two units through every
/// arc of capacity at least `M - 2` in `flow`.
pub fn check_commodity_arc_property(inst: &MrfMInstance, flow: &PathFlow) -> std::result::Result<(), String> {
    let floor = inst.max_capacity() - Rational::from_int(2);
    let heavy: Vec<ArcId> = inst
        .graph
        .arcs()
        .iter()
        .filter(|a| a.capacity >= floor)
        .map(|a| a.id)
        .collect();
    for i in (0..inst.commodities.len()).filter(|&i| i != inst.designated) {
        for &a in &heavy {
            let through: Rational = flow
                .iter()
                .filter(|(p, _)| p.commodity == Some(i) && p.contains(a))
                .map(|(_, v)| v.clone())
                .sum();
            if through < Rational::from_int(2) {
                return Err(format!(
                    "commodity {} sends {through} through arc {}",
                    inst.commodities[i].name,
                    inst.graph.arc(a).name
                ));
            }
        }
    }
    Ok(())
}

/// Checks the five structural properties the single-commodity wrapper
/// relies on; the per-commodity arc property is checked on [`hat_flow`]
/// completed by the main commodity's filler.
pub fn check_properties(artifact: &ReductionArtifact<MrfMInstance, MulticommodityLayout>) -> PropertyReport {
    let inst = &artifact.output;
    let l = &artifact.layout;
    let mut checks = Vec::new();
    let expected = &artifact.parameters["M"];
    checks.push(check(
        1,
        integral_capacities(inst).and_then(|d| {
            if inst.max_capacity() == *expected {
                Ok(d)
            } else {
                Err(format!(
                    "largest capacity {} differs from M = {expected}",
                    inst.max_capacity()
                ))
            }
        }),
    ));
    checks.push(check(2, terminal_capacities(inst)));
    checks.push(check(3, small_side_demands(inst)));
    let hat = hat_flow(artifact);
    let fourth = crate::instances::check_capacities(&inst.graph, &hat)
        .map_err(|e| e.to_string())
        .and_then(|_| {
            for (i, c) in inst.commodities.iter().enumerate().skip(1) {
                if hat.commodity_value(i) != c.demand {
                    return Err(format!("hat flow ships {} for {}", hat.commodity_value(i), c.name));
                }
            }
            check_commodity_arc_property(inst, &hat)
        })
        .map(|_| "every pair commodity crosses every heavy arc twice".to_string());
    checks.push(check(4, fourth));
    checks.push(check(5, cut_property(inst, &l.cut)));
    PropertyReport { checks }
}

fn cut_property(inst: &MrfMInstance, cut: &[NodeId]) -> std::result::Result<String, String> {
    let g = &inst.graph;
    let inside: BTreeSet<NodeId> = cut.iter().copied().collect();
    for c in &inst.commodities {
        if !inside.contains(&c.source) || inside.contains(&c.sink) {
            return Err(format!("cut does not separate commodity {}", c.name));
        }
    }
    let crossing: Vec<&crate::instances::Arc> = g
        .arcs()
        .iter()
        .filter(|a| inside.contains(&a.tail) && !inside.contains(&a.head))
        .collect();
    let capacity: Rational = crossing.iter().map(|a| a.capacity.clone()).sum();
    let total: Rational = inst.commodities.iter().map(|c| c.demand.clone()).sum();
    if capacity != total {
        return Err(format!("cut capacity {capacity} differs from total demand {total}"));
    }
    let m = inst.max_capacity();
    let heavy = crossing.iter().filter(|a| a.capacity == m).count();
    if heavy + 1 != inst.budget {
        return Err(format!("cut has {heavy} arcs of capacity M, budget is {}", inst.budget));
    }
    Ok(format!("cut capacity {capacity} with {heavy} arcs of capacity M"))
}
