use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instances::{ArcId, MrfInstance, MrfMInstance, NodeId, Path, PathFlow};
use crate::rational::Rational;
use crate::reductions::multicommodity::{integral_capacities, small_side_demands, terminal_capacities};
use crate::reductions::{Builder, ReductionArtifact};

#[derive(Debug, Clone)]
pub struct WrapperLayout {
    pub input: MrfMInstance,
    /// Non-designated commodities in wrapper order.
    pub others: Vec<usize>,
    pub hub: NodeId,
    pub gate_nodes: Vec<NodeId>,
    /// Designated commodity: super source into its source, its sink into
    /// the super sink.
    pub source_link: ArcId,
    pub sink_link: ArcId,
    /// Per wrapper position `p`: super source into gate `p`, gate into the
    /// commodity source, commodity source into the next gate (or the hub).
    pub feeders: Vec<ArcId>,
    pub gates: Vec<ArcId>,
    pub chain: Vec<ArcId>,
    /// `(p, q)` with `p != q`: commodity source `p` into commodity sink `q`.
    pub cross: BTreeMap<(usize, usize), ArcId>,
    /// Per position: parallel arcs from the commodity sink to the super sink.
    pub bundles: Vec<Vec<ArcId>>,
    /// Per position: commodity source straight to the super sink.
    pub spill: Vec<ArcId>,
    /// Per position: super source straight into the commodity sink.
    pub inflow: Vec<ArcId>,
    pub hub_feed: ArcId,
    pub hub_bundle: Vec<ArcId>,
}

fn integer(value: &Rational, what: &str) -> Result<usize> {
    if !value.is_integer() || value.is_negative() {
        return Err(Error::precondition(format!(
            "{what} {value} is not a nonnegative integer"
        )));
    }
    value
        .to_usize()
        .ok_or_else(|| Error::precondition(format!("{what} out of range")))
}

/// Wraps a multicommodity instance into a single-commodity instance with
/// immune arcs and threshold `Δ - (kM - 1)`, where `Δ` is the capacity
/// leaving the super source.
///
/// Of the structural properties, the capacity, terminal and demand-sum
/// conditions are checked here; the per-commodity arc and cut conditions
/// concern all flows or an unknown cut and are checked by
/// [`check_properties`](crate::reductions::check_properties) on the
/// artifact that produced the input.
pub fn reduce_mrfm_to_mrf(inst: &MrfMInstance) -> Result<ReductionArtifact<MrfInstance, WrapperLayout>> {
    inst.validate()?;
    if inst.budget < 2 {
        return Err(Error::precondition(
            "the reduction needs interdiction budget at least 2",
        ));
    }
    for (n, outcome) in [
        (1, integral_capacities(inst)),
        (2, terminal_capacities(inst)),
        (3, small_side_demands(inst)),
    ] {
        if let Err(why) = outcome {
            return Err(Error::precondition(format!("property {n} fails: {why}")));
        }
    }
    if inst.graph.has_immune_arcs() {
        return Err(Error::precondition("input already has immune arcs"));
    }
    let others: Vec<usize> = (0..inst.commodities.len()).filter(|&i| i != inst.designated).collect();
    let m = others.len();
    if m == 0 {
        return Err(Error::precondition("at least one non-designated commodity is required"));
    }
    let k = inst.budget;
    let big = inst.max_capacity();
    let kk = Rational::from(2 * k);
    let big_prime = &big + &Rational::from(2 * k) - Rational::from_int(3);
    let main = &inst.commodities[inst.designated];
    let demands: Vec<Rational> = others.iter().map(|&i| inst.commodities[i].demand.clone()).collect();
    let counts = demands
        .iter()
        .map(|d| integer(d, "demand"))
        .collect::<Result<Vec<_>>>()?;
    let demand_sum: Rational = demands.iter().cloned().sum();
    let spill_cap = &big_prime - &kk - &demand_sum;
    let bundle_cap = &big - &Rational::one();

    let mut b = Builder::default();
    b.copy(&inst.graph, "multicommodity");
    let source = b.node("source", "super source");
    let sink = b.node("sink", "super sink");
    let hub = b.node("hub", "hub collecting the chain");
    let gate_nodes: Vec<NodeId> = (1..=m)
        .map(|p| b.node(&format!("gate{p}"), format!("gate ahead of commodity {p}")))
        .collect();
    let source_link = b.arc(
        "source>main",
        source,
        main.source,
        main.demand.clone(),
        true,
        "super source into the designated source",
    );
    let sink_link = b.arc(
        "main>sink",
        main.sink,
        sink,
        main.demand.clone(),
        true,
        "designated sink into the super sink",
    );
    let feeders: Vec<ArcId> = (0..m)
        .map(|p| {
            let cap = if p == 0 { big_prime.clone() } else { &big_prime - &kk };
            b.arc(
                &format!("source>gate{}", p + 1),
                source,
                gate_nodes[p],
                cap,
                true,
                format!("feeder of gate {}", p + 1),
            )
        })
        .collect();
    let hub_feed = b.arc(
        "source>hub",
        source,
        hub,
        &kk * &(&big - &Rational::from_int(2)),
        true,
        "feeder of the hub",
    );
    let hub_bundle: Vec<ArcId> = (0..2 * k)
        .map(|j| {
            b.arc(
                &format!("hub>sink{}", j + 1),
                hub,
                sink,
                bundle_cap.clone(),
                false,
                format!("hub bundle arc {}", j + 1),
            )
        })
        .collect();
    let (mut gates, mut chain, mut bundles, mut spill, mut inflow) = (vec![], vec![], vec![], vec![], vec![]);
    let mut cross = BTreeMap::new();
    for (p, &i) in others.iter().enumerate() {
        let c = &inst.commodities[i];
        let pos = p + 1;
        gates.push(b.arc(
            &format!("gate{pos}>{}", c.name),
            gate_nodes[p],
            c.source,
            big_prime.clone(),
            false,
            format!("gate of commodity {pos}"),
        ));
        let next = if p + 1 < m { gate_nodes[p + 1] } else { hub };
        chain.push(b.arc(
            &format!("{}>next", c.name),
            c.source,
            next,
            kk.clone(),
            true,
            format!("chain link after commodity {pos}"),
        ));
        for (q, &j) in others.iter().enumerate() {
            if q != p {
                let d = &inst.commodities[j];
                cross.insert(
                    (p, q),
                    b.arc(
                        &format!("{}>{}", c.name, d.name),
                        c.source,
                        d.sink,
                        d.demand.clone(),
                        true,
                        format!("cross link from commodity {pos} to {}", q + 1),
                    ),
                );
            }
        }
        bundles.push(
            (0..counts[p])
                .map(|j| {
                    b.arc(
                        &format!("{}>sink{}", c.name, j + 1),
                        c.sink,
                        sink,
                        bundle_cap.clone(),
                        false,
                        format!("sink bundle of commodity {pos} arc {}", j + 1),
                    )
                })
                .collect::<Vec<_>>(),
        );
        spill.push(b.arc(
            &format!("{}>sink", c.name),
            c.source,
            sink,
            spill_cap.clone(),
            true,
            format!("source spill of commodity {pos}"),
        ));
        let inflow_cap = &demands[p] * &(&big - &Rational::one() - Rational::from(m));
        inflow.push(b.arc(
            &format!("source>{}", c.name),
            source,
            c.sink,
            inflow_cap,
            true,
            format!("sink top-up of commodity {pos}"),
        ));
    }
    for c in &inst.commodities {
        b.provenance.tag(format!("commodity:{}", c.name), "input commodity");
    }
    let delta = b.graph.out_capacity(source);
    let threshold = &delta - &(Rational::from(k) * &big - Rational::one());
    let output = MrfInstance::new(b.graph, source, sink, k, Some(threshold.clone()))?;
    let parameters = BTreeMap::from([
        ("M".to_string(), big),
        ("M_prime".to_string(), big_prime),
        ("delta".to_string(), delta),
        ("threshold".to_string(), threshold),
        ("spill".to_string(), spill_cap),
        ("budget".to_string(), Rational::from(k)),
    ]);
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: WrapperLayout {
            input: inst.clone(),
            others,
            hub,
            gate_nodes,
            source_link,
            sink_link,
            feeders,
            gates,
            chain,
            cross,
            bundles,
            spill,
            inflow,
            hub_feed,
            hub_bundle,
        },
    })
}

/// The flow saturating every wrapper arc except `d_i` units along each
/// feeder and gate and one unit on each sink-bundle arc.
pub fn base_flow(artifact: &ReductionArtifact<MrfInstance, WrapperLayout>) -> PathFlow {
    let l = &artifact.layout;
    let big = &artifact.parameters["M"];
    let spill = &artifact.parameters["spill"];
    let m = l.others.len();
    let mut flow = PathFlow::new();
    let mut chain = Vec::new();
    for p in 0..m {
        if p == 0 {
            chain.push(l.feeders[0]);
        }
        chain.extend([l.gates[p], l.chain[p]]);
    }
    for &a in &l.hub_bundle {
        let mut arcs = chain.clone();
        arcs.push(a);
        flow.add(Path::new(arcs), Rational::one());
        flow.add(Path::new(vec![l.hub_feed, a]), big - &Rational::from_int(2));
    }
    for p in 0..m {
        if spill.is_positive() {
            flow.add(Path::new(vec![l.feeders[p], l.gates[p], l.spill[p]]), spill.clone());
        }
        let top = big - &Rational::one() - Rational::from(m);
        for &a in &l.bundles[p] {
            if top.is_positive() {
                flow.add(Path::new(vec![l.inflow[p], a]), top.clone());
            }
        }
        for q in (0..m).filter(|&q| q != p) {
            for &a in &l.bundles[q] {
                flow.add(
                    Path::new(vec![l.feeders[p], l.gates[p], l.cross[&(p, q)], a]),
                    Rational::one(),
                );
            }
        }
    }
    flow
}

/// `ψ(x)` plus [`base_flow`]: designated paths get the super terminals
/// attached; other commodities enter through their gate and spread over
/// their sink bundle, evenly or, when `integral`, one unit per bundle arc.
pub fn lift_flow(
    artifact: &ReductionArtifact<MrfInstance, WrapperLayout>,
    flow: &PathFlow,
    integral: bool,
) -> Result<PathFlow> {
    let l = &artifact.layout;
    l.input.check_flow(flow)?;
    let mut out = base_flow(artifact);
    let position: BTreeMap<usize, usize> = l.others.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut next_unit = vec![0usize; l.others.len()];
    for (path, value) in flow.iter() {
        let i = path.commodity.expect("validated");
        if i == l.input.designated {
            let mut arcs = vec![l.source_link];
            arcs.extend(&path.arcs);
            arcs.push(l.sink_link);
            out.add(Path::new(arcs), value.clone());
            continue;
        }
        let p = position[&i];
        let extend = |a: ArcId| {
            let mut arcs = vec![l.feeders[p], l.gates[p]];
            arcs.extend(&path.arcs);
            arcs.push(a);
            Path::new(arcs)
        };
        if integral {
            let units = integer(value, "path value")?;
            for _ in 0..units {
                out.add(extend(l.bundles[p][next_unit[p]]), Rational::one());
                next_unit[p] += 1;
            }
        } else {
            let share = value / &Rational::from(l.bundles[p].len());
            for &a in &l.bundles[p] {
                out.add(extend(a), share.clone());
            }
        }
    }
    artifact.output.check_flow(&out)?;
    Ok(out)
}

/// Restricts every path to the multicommodity arcs and sums values per
/// restricted path; the result must meet every demand.
pub fn project_flow(artifact: &ReductionArtifact<MrfInstance, WrapperLayout>, flow: &PathFlow) -> Result<PathFlow> {
    let l = &artifact.layout;
    let inner = l.input.graph.arc_count();
    let g = &l.input.graph;
    let mut out = PathFlow::new();
    for (path, value) in flow.iter() {
        let arcs: Vec<ArcId> = path.arcs.iter().copied().filter(|a| a.index() < inner).collect();
        let Some(first) = arcs.first() else { continue };
        let tail = g.arc(*first).tail;
        let i = l
            .input
            .commodities
            .iter()
            .position(|c| c.source == tail)
            .ok_or_else(|| {
                Error::validation(
                    format!("flow.{path}"),
                    "restriction does not start at a commodity source",
                )
            })?;
        out.add(Path::for_commodity(i, arcs), value.clone());
    }
    l.input.check_flow(&out)?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExpandLayout {
    /// Output arcs replacing each input arc.
    pub units: Vec<Vec<ArcId>>,
}

/// Replaces every immune arc of capacity `u` by `u` regular unit arcs.
pub fn expand_immune(inst: &MrfInstance) -> Result<ReductionArtifact<MrfInstance, ExpandLayout>> {
    inst.validate()?;
    let g = &inst.graph;
    let mut b = Builder::default();
    b.copy_nodes(g, "input");
    let mut units = Vec::with_capacity(g.arc_count());
    for a in g.arcs() {
        if !a.immune {
            units.push(vec![b.arc(
                &a.name,
                a.tail,
                a.head,
                a.capacity.clone(),
                false,
                "input arc",
            )]);
            continue;
        }
        let count = integer(&a.capacity, &format!("capacity of immune arc {}", a.name))?;
        units.push(
            (1..=count)
                .map(|j| {
                    b.arc(
                        &format!("{}#{j}", a.name),
                        a.tail,
                        a.head,
                        Rational::one(),
                        false,
                        format!("unit {j} of immune arc {}", a.name),
                    )
                })
                .collect(),
        );
    }
    let output = MrfInstance::new(b.graph, inst.source, inst.sink, inst.budget, inst.threshold.clone())?;
    let mut parameters = BTreeMap::from([("budget".to_string(), Rational::from(inst.budget))]);
    if let Some(t) = &inst.threshold {
        parameters.insert("threshold".to_string(), t.clone());
    }
    Ok(ReductionArtifact {
        output,
        provenance: b.provenance,
        parameters,
        layout: ExpandLayout { units },
    })
}

/// Moves a flow of the immune instance onto the expanded one, filling the
/// unit arcs of each immune arc in order and splitting paths where a unit
/// arc runs full.
pub fn expand_flow(artifact: &ReductionArtifact<MrfInstance, ExpandLayout>, flow: &PathFlow) -> Result<PathFlow> {
    let units = &artifact.layout.units;
    let mut pieces: Vec<(Vec<ArcId>, Vec<Option<ArcId>>, Rational)> = flow
        .iter()
        .map(|(p, v)| {
            let chosen = p
                .arcs
                .iter()
                .map(|a| (units[a.index()].len() == 1).then(|| units[a.index()][0]))
                .collect();
            (p.arcs.clone(), chosen, v.clone())
        })
        .collect();
    for (e, slots) in units.iter().enumerate().filter(|(_, u)| u.len() != 1) {
        let mut at = 0usize;
        let mut room = Rational::one();
        let mut next = Vec::with_capacity(pieces.len());
        for (arcs, chosen, value) in pieces {
            let Some(pos) = arcs.iter().position(|a| a.index() == e) else {
                next.push((arcs, chosen, value));
                continue;
            };
            let mut left = value;
            while left.is_positive() {
                if at >= slots.len() {
                    return Err(Error::validation(format!("flow.arc{e}"), "flow exceeds capacity"));
                }
                let take = left.clone().min(room.clone());
                let mut c = chosen.clone();
                c[pos] = Some(slots[at]);
                next.push((arcs.clone(), c, take.clone()));
                left -= &take;
                room -= &take;
                if room.is_zero() {
                    at += 1;
                    room = Rational::one();
                }
            }
        }
        pieces = next;
    }
    let mut out = PathFlow::new();
    for (_, chosen, value) in pieces {
        out.add(
            Path::new(chosen.into_iter().map(|c| c.expect("every arc assigned")).collect()),
            value,
        );
    }
    artifact.output.check_flow(&out)?;
    Ok(out)
}
