use robustflow::io::{
    generate, parse_flow, parse_instance, serialize_flow, serialize_instance, Family, GeneratorSpec, Instance,
};
use robustflow::solvers::solve_mrf;
use robustflow::Limits;

#[test]
fn generated_instances_round_trip() {
    let families = [
        Family::RandomDag {
            nodes: 5,
            arcs: 7,
            budget: 2,
            max_capacity: 3,
        },
        Family::RandomCompat {
            nodes: 5,
            arcs: 6,
            budget: 2,
            pairs: 2,
            demand: Some("3/2".into()),
            integral: false,
        },
        Family::ColoringGraph {
            vertices: 5,
            p: "1/2".into(),
            colors: 3,
        },
        Family::Clique {
            vertices: 5,
            p: "2/3".into(),
            clique_size: 3,
            removals: 1,
        },
    ];
    for (seed, family) in families.into_iter().enumerate() {
        let inst = generate(&GeneratorSpec {
            seed: seed as u64,
            family,
        })
        .unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text, true).unwrap();
        assert_eq!(serialize_instance(&back), text);
    }
}

#[test]
fn witness_flows_round_trip() {
    let spec = GeneratorSpec {
        seed: 3,
        family: Family::RandomDag {
            nodes: 5,
            arcs: 8,
            budget: 1,
            max_capacity: 4,
        },
    };
    let Instance::Mrf(inst) = generate(&spec).unwrap() else {
        unreachable!()
    };
    let sol = solve_mrf(&inst, &Limits::default()).unwrap();
    let text = serialize_flow(&sol.flow, &inst.graph, &[]);
    let back = parse_flow(&text, &inst.graph, &[]).unwrap();
    assert_eq!(back, sol.flow);
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"schema": 1, "variant": "mrf", "nodes": ["s", "t"],
        "arcs": [{"id": "a", "tail": "s", "head": "t", "capacity": "1"}],
        "source": "s", "sink": "t", "budget": 1}"#;
    assert!(parse_instance(text, true).is_ok());
    assert!(parse_instance(&text.replace("\"budget\": 1", "\"budget\": 1, \"colour\": 2"), true).is_err());
}

#[test]
fn strict_mode_wants_reduced_rationals() {
    let text = r#"{"schema": 1, "variant": "mrf", "nodes": ["s", "t"],
        "arcs": [{"id": "a", "tail": "s", "head": "t", "capacity": "2/4"}],
        "source": "s", "sink": "t", "budget": 1}"#;
    assert!(parse_instance(text, true).is_err());
    assert!(parse_instance(text, false).is_ok());
}
