//! Instance, witness and provenance files, and seeded instance generators.

mod document;
mod generate;

pub use document::{
    parse_flow, parse_instance, serialize_flow, serialize_instance, serialize_provenance, ArcRecord, CommodityRecord,
    FlowDocument, Instance, InstanceDocument, PathRecord, ProvenanceDocument, Variant, SCHEMA_VERSION,
};
pub use generate::{generate, Family, GeneratorSpec};
