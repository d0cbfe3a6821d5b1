use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{ArcId, CompatGraph, Digraph, MrfInstance, MrfRInstance, NodeId};
use crate::io::Instance;
use crate::oracles::UndirectedGraph;
use crate::rational::Rational;
use crate::solvers::max_flow;

/// A reproducible instance recipe; equal specs give equal instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Single-commodity instance on a random DAG with integer capacities in
    /// `1..=max_capacity`.
    RandomDag {
        nodes: usize,
        arcs: usize,
        budget: usize,
        #[serde(default = "one")]
        max_capacity: u32,
    },
    /// Unit-capacity DAG with a random compatibility matching of `pairs`
    /// edges; demand defaults to the maximum flow.
    RandomCompat {
        nodes: usize,
        arcs: usize,
        budget: usize,
        pairs: usize,
        #[serde(default)]
        demand: Option<String>,
        #[serde(default)]
        integral: bool,
    },
    /// Random graph with edge probability `p` (a rational string).
    ColoringGraph { vertices: usize, p: String, colors: usize },
    Clique {
        vertices: usize,
        p: String,
        clique_size: usize,
        removals: usize,
    },
}

fn one() -> u32 {
    1
}

/// Arcs `i -> j` with `i < j` over nodes `v0..v{n-1}`; a random increasing
/// spine guarantees `v0` reaches `v{n-1}`.
fn random_dag(
    rng: &mut ChaCha8Rng,
    nodes: usize,
    arcs: usize,
    capacity: impl Fn(&mut ChaCha8Rng) -> Rational,
) -> Result<(Digraph, NodeId, NodeId)> {
    if nodes < 2 {
        return Err(Error::precondition("at least two nodes are required"));
    }
    if arcs == 0 {
        return Err(Error::precondition("at least one arc is required"));
    }
    let mut g = Digraph::new();
    let ids: Vec<NodeId> = (0..nodes)
        .map(|i| g.add_node(format!("v{i}")).expect("fresh"))
        .collect();
    let mut inner: Vec<usize> = (1..nodes - 1).collect();
    inner.shuffle(rng);
    let hops = rng.gen_range(0..=inner.len().min(arcs - 1));
    let mut spine: Vec<usize> = inner[..hops].to_vec();
    spine.sort_unstable();
    spine.insert(0, 0);
    spine.push(nodes - 1);
    let mut count = 0;
    for w in spine.windows(2) {
        count += 1;
        let cap = capacity(rng);
        g.add_arc(format!("e{count}"), ids[w[0]], ids[w[1]], cap, false)?;
    }
    while count < arcs {
        let i = rng.gen_range(0..nodes - 1);
        let j = rng.gen_range(i + 1..nodes);
        count += 1;
        let cap = capacity(rng);
        g.add_arc(format!("e{count}"), ids[i], ids[j], cap, false)?;
    }
    Ok((g, ids[0], ids[nodes - 1]))
}

fn probability(text: &str) -> Result<(u32, u32)> {
    let p = Rational::parse(text, false).map_err(|e| Error::parse("p", e.to_string()))?;
    if p.is_negative() || p > 1 {
        return Err(Error::parse("p", "probability must lie in [0, 1]"));
    }
    let num = u32::try_from(p.numer()).map_err(|_| Error::parse("p", "numerator too large"))?;
    let den = u32::try_from(p.denom()).map_err(|_| Error::parse("p", "denominator too large"))?;
    Ok((num, den))
}

fn random_graph(rng: &mut ChaCha8Rng, vertices: usize, p: &str) -> Result<UndirectedGraph> {
    let (num, den) = probability(p)?;
    let mut graph = UndirectedGraph::new(vertices);
    for u in 0..vertices {
        for v in u + 1..vertices {
            if rng.gen_ratio(num, den) {
                graph.add_edge(u, v)?;
            }
        }
    }
    Ok(graph)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match &spec.family {
        Family::RandomDag {
            nodes,
            arcs,
            budget,
            max_capacity,
        } => {
            if *max_capacity == 0 {
                return Err(Error::precondition("max_capacity must be positive"));
            }
            let top = *max_capacity;
            let (g, s, t) = random_dag(&mut rng, *nodes, *arcs, |r| {
                Rational::from_int(i64::from(r.gen_range(1..=top)))
            })?;
            Ok(Instance::Mrf(MrfInstance::new(g, s, t, *budget, None)?))
        }
        Family::RandomCompat {
            nodes,
            arcs,
            budget,
            pairs,
            demand,
            integral,
        } => {
            let (g, s, t) = random_dag(&mut rng, *nodes, *arcs, |_| Rational::one())?;
            if 2 * pairs > g.arc_count() {
                return Err(Error::precondition(format!("{pairs} pairs need {} arcs", 2 * pairs)));
            }
            let mut order: Vec<ArcId> = g.arcs().iter().map(|a| a.id).collect();
            order.shuffle(&mut rng);
            let mut compat = CompatGraph::new();
            for pair in order.chunks(2).take(*pairs) {
                compat.add_edge(pair[0], pair[1])?;
            }
            let demand = match demand {
                Some(d) => Rational::parse(d, false).map_err(|e| Error::parse("demand", e.to_string()))?,
                None => max_flow(&g, s, t),
            };
            Ok(Instance::MrfR(MrfRInstance::new(
                g, s, t, *budget, compat, demand, *integral,
            )?))
        }
        Family::ColoringGraph { vertices, p, colors } => Ok(Instance::Coloring {
            graph: random_graph(&mut rng, *vertices, p)?,
            colors: *colors,
        }),
        Family::Clique {
            vertices,
            p,
            clique_size,
            removals,
        } => Ok(Instance::CliqueInterdiction {
            graph: random_graph(&mut rng, *vertices, p)?,
            clique_size: *clique_size,
            removals: *removals,
        }),
    }
}
