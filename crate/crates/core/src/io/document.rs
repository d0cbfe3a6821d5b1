use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{
    ArcId, Commodity, CompatGraph, Digraph, MrfInstance, MrfMInstance, MrfRInstance, NodeId, Path, PathFlow,
};
use crate::oracles::UndirectedGraph;
use crate::rational::Rational;
use crate::reductions::Provenance;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Mrf,
    MrfR,
    MrfM,
    Coloring,
    CliqueInterdiction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub immune: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommodityRecord {
    pub id: String,
    pub source: String,
    pub sink: String,
    pub demand: String,
}

/// On-disk form of every instance kind. Rationals are strings `p` or `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema: u32,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arcs: Vec<ArcRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sink: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub commodities: Vec<CommodityRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demand: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compat: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub integral: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clique_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub removals: Option<usize>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Any instance a document can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Mrf(MrfInstance),
    MrfR(MrfRInstance),
    MrfM(MrfMInstance),
    Coloring {
        graph: UndirectedGraph,
        colors: usize,
    },
    CliqueInterdiction {
        graph: UndirectedGraph,
        clique_size: usize,
        removals: usize,
    },
}

impl Instance {
    pub fn variant(&self) -> Variant {
        match self {
            Instance::Mrf(_) => Variant::Mrf,
            Instance::MrfR(_) => Variant::MrfR,
            Instance::MrfM(_) => Variant::MrfM,
            Instance::Coloring { .. } => Variant::Coloring,
            Instance::CliqueInterdiction { .. } => Variant::CliqueInterdiction,
        }
    }

    pub fn graph(&self) -> Option<&Digraph> {
        match self {
            Instance::Mrf(i) => Some(&i.graph),
            Instance::MrfR(i) => Some(&i.graph),
            Instance::MrfM(i) => Some(&i.graph),
            _ => None,
        }
    }
}

fn rational(text: &str, path: &str, strict: bool) -> Result<Rational> {
    Rational::parse(text, strict).map_err(|e| Error::parse(path, e.to_string()))
}

fn required<T: Clone>(value: &Option<T>, path: &str) -> Result<T> {
    value.clone().ok_or_else(|| Error::parse(path, "missing field"))
}

impl InstanceDocument {
    fn empty(variant: Variant) -> Self {
        InstanceDocument {
            schema: SCHEMA_VERSION,
            variant,
            nodes: Vec::new(),
            arcs: Vec::new(),
            source: None,
            sink: None,
            commodities: Vec::new(),
            designated: None,
            budget: None,
            demand: None,
            compat: Vec::new(),
            integral: false,
            threshold: None,
            vertices: None,
            edges: Vec::new(),
            colors: None,
            clique_size: None,
            removals: None,
        }
    }

    fn with_graph(variant: Variant, graph: &Digraph) -> Self {
        let mut doc = Self::empty(variant);
        doc.nodes = graph.nodes().map(|v| graph.node_name(v).to_string()).collect();
        doc.arcs = graph
            .arcs()
            .iter()
            .map(|a| ArcRecord {
                id: a.name.clone(),
                tail: graph.node_name(a.tail).to_string(),
                head: graph.node_name(a.head).to_string(),
                capacity: a.capacity.to_string(),
                immune: a.immune,
            })
            .collect();
        doc
    }

    pub fn from_instance(inst: &Instance) -> Self {
        match inst {
            Instance::Mrf(i) => {
                let mut doc = Self::with_graph(Variant::Mrf, &i.graph);
                doc.source = Some(i.graph.node_name(i.source).to_string());
                doc.sink = Some(i.graph.node_name(i.sink).to_string());
                doc.budget = Some(i.budget);
                doc.threshold = i.threshold.as_ref().map(Rational::to_string);
                doc
            }
            Instance::MrfR(i) => {
                let g = &i.graph;
                let mut doc = Self::with_graph(Variant::MrfR, g);
                doc.source = Some(g.node_name(i.source).to_string());
                doc.sink = Some(g.node_name(i.sink).to_string());
                doc.budget = Some(i.budget);
                doc.demand = Some(i.demand.to_string());
                doc.compat = i
                    .compat
                    .edges()
                    .map(|(a, b)| (g.arc(a).name.clone(), g.arc(b).name.clone()))
                    .collect();
                doc.integral = i.integral;
                doc
            }
            Instance::MrfM(i) => {
                let g = &i.graph;
                let mut doc = Self::with_graph(Variant::MrfM, g);
                doc.commodities = i
                    .commodities
                    .iter()
                    .map(|c| CommodityRecord {
                        id: c.name.clone(),
                        source: g.node_name(c.source).to_string(),
                        sink: g.node_name(c.sink).to_string(),
                        demand: c.demand.to_string(),
                    })
                    .collect();
                doc.designated = Some(i.commodities[i.designated].name.clone());
                doc.budget = Some(i.budget);
                doc
            }
            Instance::Coloring { graph, colors } => {
                let mut doc = Self::empty(Variant::Coloring);
                doc.vertices = Some(graph.vertex_count());
                doc.edges = graph.edges().collect();
                doc.colors = Some(*colors);
                doc
            }
            Instance::CliqueInterdiction {
                graph,
                clique_size,
                removals,
            } => {
                let mut doc = Self::empty(Variant::CliqueInterdiction);
                doc.vertices = Some(graph.vertex_count());
                doc.edges = graph.edges().collect();
                doc.clique_size = Some(*clique_size);
                doc.removals = Some(*removals);
                doc
            }
        }
    }

    fn build_graph(&self, strict: bool) -> Result<Digraph> {
        let mut g = Digraph::new();
        for (i, name) in self.nodes.iter().enumerate() {
            g.add_node(name.clone())
                .map_err(|e| Error::parse(format!("nodes[{i}]"), e.to_string()))?;
        }
        for (i, a) in self.arcs.iter().enumerate() {
            let path = format!("arcs[{i}]");
            let node = |n: &str, field: &str| {
                g.node_by_name(n)
                    .ok_or_else(|| Error::parse(format!("{path}.{field}"), format!("unknown node {n:?}")))
            };
            let tail = node(&a.tail, "tail")?;
            let head = node(&a.head, "head")?;
            let cap = rational(&a.capacity, &format!("{path}.capacity"), strict)?;
            g.add_arc(a.id.clone(), tail, head, cap, a.immune)
                .map_err(|e| Error::parse(path, e.to_string()))?;
        }
        Ok(g)
    }

    /// Rejects fields that do not belong to the variant.
    fn check_fields(&self) -> Result<()> {
        let graph_kind = matches!(self.variant, Variant::Mrf | Variant::MrfR | Variant::MrfM);
        let present = [
            ("nodes", !self.nodes.is_empty(), graph_kind),
            ("arcs", !self.arcs.is_empty(), graph_kind),
            (
                "source",
                self.source.is_some(),
                matches!(self.variant, Variant::Mrf | Variant::MrfR),
            ),
            (
                "sink",
                self.sink.is_some(),
                matches!(self.variant, Variant::Mrf | Variant::MrfR),
            ),
            (
                "commodities",
                !self.commodities.is_empty(),
                self.variant == Variant::MrfM,
            ),
            ("designated", self.designated.is_some(), self.variant == Variant::MrfM),
            ("budget", self.budget.is_some(), graph_kind),
            ("demand", self.demand.is_some(), self.variant == Variant::MrfR),
            ("compat", !self.compat.is_empty(), self.variant == Variant::MrfR),
            ("integral", self.integral, self.variant == Variant::MrfR),
            ("threshold", self.threshold.is_some(), self.variant == Variant::Mrf),
            ("vertices", self.vertices.is_some(), !graph_kind),
            ("edges", !self.edges.is_empty(), !graph_kind),
            ("colors", self.colors.is_some(), self.variant == Variant::Coloring),
            (
                "clique_size",
                self.clique_size.is_some(),
                self.variant == Variant::CliqueInterdiction,
            ),
            (
                "removals",
                self.removals.is_some(),
                self.variant == Variant::CliqueInterdiction,
            ),
        ];
        for (field, set, allowed) in present {
            if set && !allowed {
                return Err(Error::parse(
                    field,
                    format!("field not allowed for variant {:?}", self.variant),
                ));
            }
        }
        Ok(())
    }

    /// Converts to a validated instance. With `strict`, rationals must be in
    /// canonical form.
    pub fn to_instance(&self, strict: bool) -> Result<Instance> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::parse(
                "schema",
                format!("unsupported schema version {}", self.schema),
            ));
        }
        self.check_fields()?;
        let node_field = |g: &Digraph, field: &str| -> Result<NodeId> {
            let name = required(&self.source_or_sink(field), field)?;
            g.node_by_name(&name)
                .ok_or_else(|| Error::parse(field, format!("unknown node {name:?}")))
        };
        match self.variant {
            Variant::Mrf => {
                let g = self.build_graph(strict)?;
                let s = node_field(&g, "source")?;
                let t = node_field(&g, "sink")?;
                let threshold = self
                    .threshold
                    .as_deref()
                    .map(|x| rational(x, "threshold", strict))
                    .transpose()?;
                Ok(Instance::Mrf(MrfInstance::new(
                    g,
                    s,
                    t,
                    required(&self.budget, "budget")?,
                    threshold,
                )?))
            }
            Variant::MrfR => {
                let g = self.build_graph(strict)?;
                let s = node_field(&g, "source")?;
                let t = node_field(&g, "sink")?;
                let compat = self.build_compat(&g)?;
                let demand = rational(&required(&self.demand, "demand")?, "demand", strict)?;
                Ok(Instance::MrfR(MrfRInstance::new(
                    g,
                    s,
                    t,
                    required(&self.budget, "budget")?,
                    compat,
                    demand,
                    self.integral,
                )?))
            }
            Variant::MrfM => {
                let g = self.build_graph(strict)?;
                let mut commodities = Vec::with_capacity(self.commodities.len());
                for (i, c) in self.commodities.iter().enumerate() {
                    let path = format!("commodities[{i}]");
                    let node = |n: &str, field: &str| {
                        g.node_by_name(n)
                            .ok_or_else(|| Error::parse(format!("{path}.{field}"), format!("unknown node {n:?}")))
                    };
                    commodities.push(Commodity {
                        name: c.id.clone(),
                        source: node(&c.source, "source")?,
                        sink: node(&c.sink, "sink")?,
                        demand: rational(&c.demand, &format!("{path}.demand"), strict)?,
                    });
                }
                let name = required(&self.designated, "designated")?;
                let designated = commodities
                    .iter()
                    .position(|c| c.name == name)
                    .ok_or_else(|| Error::parse("designated", format!("unknown commodity {name:?}")))?;
                Ok(Instance::MrfM(MrfMInstance::new(
                    g,
                    required(&self.budget, "budget")?,
                    commodities,
                    designated,
                )?))
            }
            Variant::Coloring | Variant::CliqueInterdiction => {
                let n = required(&self.vertices, "vertices")?;
                let mut graph = UndirectedGraph::new(n);
                for (i, &(u, v)) in self.edges.iter().enumerate() {
                    graph
                        .add_edge(u, v)
                        .map_err(|e| Error::parse(format!("edges[{i}]"), e.to_string()))?;
                }
                if self.variant == Variant::Coloring {
                    Ok(Instance::Coloring {
                        graph,
                        colors: required(&self.colors, "colors")?,
                    })
                } else {
                    Ok(Instance::CliqueInterdiction {
                        graph,
                        clique_size: required(&self.clique_size, "clique_size")?,
                        removals: required(&self.removals, "removals")?,
                    })
                }
            }
        }
    }

    fn source_or_sink(&self, field: &str) -> Option<String> {
        if field == "source" {
            self.source.clone()
        } else {
            self.sink.clone()
        }
    }

    fn build_compat(&self, g: &Digraph) -> Result<CompatGraph> {
        let mut compat = CompatGraph::new();
        for (i, (a, b)) in self.compat.iter().enumerate() {
            let path = format!("compat[{i}]");
            let arc = |n: &str| {
                g.arc_by_name(n)
                    .ok_or_else(|| Error::parse(path.clone(), format!("unknown arc {n:?}")))
            };
            compat
                .add_edge(arc(a)?, arc(b)?)
                .map_err(|e| Error::parse(path.clone(), e.to_string()))?;
        }
        Ok(compat)
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str, strict: bool) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| Error::parse("document", e.to_string()))?;
    doc.to_instance(strict)
}

/// Canonical document text: elements in id order, rationals reduced.
pub fn serialize_instance(inst: &Instance) -> String {
    to_text(&InstanceDocument::from_instance(inst))
}

fn to_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commodity: Option<String>,
    pub arcs: Vec<String>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    pub paths: Vec<PathRecord>,
}

/// Witness text naming arcs and commodities of `graph` by id.
pub fn serialize_flow(flow: &PathFlow, graph: &Digraph, commodities: &[Commodity]) -> String {
    let paths = flow
        .iter()
        .map(|(p, v)| PathRecord {
            commodity: p.commodity.map(|i| commodities[i].name.clone()),
            arcs: p.arcs.iter().map(|&a| graph.arc(a).name.clone()).collect(),
            value: v.to_string(),
        })
        .collect();
    to_text(&FlowDocument {
        schema: SCHEMA_VERSION,
        value: Some(flow.value().to_string()),
        paths,
    })
}

pub fn parse_flow(text: &str, graph: &Digraph, commodities: &[Commodity]) -> Result<PathFlow> {
    let doc: FlowDocument = serde_json::from_str(text).map_err(|e| Error::parse("document", e.to_string()))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::parse(
            "schema",
            format!("unsupported schema version {}", doc.schema),
        ));
    }
    let mut flow = PathFlow::new();
    for (i, p) in doc.paths.iter().enumerate() {
        let path = format!("paths[{i}]");
        let arcs = p
            .arcs
            .iter()
            .map(|n| {
                graph
                    .arc_by_name(n)
                    .ok_or_else(|| Error::parse(format!("{path}.arcs"), format!("unknown arc {n:?}")))
            })
            .collect::<Result<Vec<ArcId>>>()?;
        let value = rational(&p.value, &format!("{path}.value"), false)?;
        if value.is_negative() {
            return Err(Error::parse(format!("{path}.value"), "negative path value"));
        }
        let entry = match &p.commodity {
            None => Path::new(arcs),
            Some(name) => {
                let c = commodities
                    .iter()
                    .position(|c| &c.name == name)
                    .ok_or_else(|| Error::parse(format!("{path}.commodity"), format!("unknown commodity {name:?}")))?;
                Path::for_commodity(c, arcs)
            }
        };
        flow.add(entry, value);
    }
    Ok(flow)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDocument {
    pub schema: u32,
    pub roles: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, String>,
}

/// Sidecar text for a reduction output: element roles and derived constants.
pub fn serialize_provenance(provenance: &Provenance, parameters: &BTreeMap<String, Rational>) -> String {
    to_text(&ProvenanceDocument {
        schema: SCHEMA_VERSION,
        roles: provenance.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        parameters: parameters.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
    })
}
