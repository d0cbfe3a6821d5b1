//! Digraphs, compatibility graphs, the instance family, and path flows.

mod enumerate;
mod flow;
mod graph;
mod problem;

pub use enumerate::{enumerate_scenarios, enumerate_st_paths, reaches, topological_arc_order, ScenarioMode};
pub use flow::{arc_flow, loss, Path, PathDisplay, PathFlow, Scenario};
pub use graph::{Arc, ArcId, CompatGraph, Digraph, NodeId};
pub use problem::{check_capacities, path_by_names, Commodity, MrfInstance, MrfMInstance, MrfRInstance};
