use robustflow::instances::{CompatGraph, Digraph, MrfRInstance};
use robustflow::oracles::UndirectedGraph;
use robustflow::reductions::{
    check_properties, coloring_from_flow, normalize_mrfr, pad_budget, reduce_coloring_to_mrfr, reduce_mrfr_to_mrfm,
    saturate_demand,
};
use robustflow::solvers::decide_mrf_r_star;
use robustflow::{Limits, Rational};

fn parallel(budget: usize, compat: bool, demand: i64) -> MrfRInstance {
    let mut g = Digraph::new();
    let s = g.add_node("s").unwrap();
    let t = g.add_node("t").unwrap();
    let a = g.add_arc("a", s, t, Rational::one(), false).unwrap();
    let b = g.add_arc("b", s, t, Rational::one(), false).unwrap();
    let mut h = CompatGraph::new();
    if compat {
        h.add_edge(a, b).unwrap();
    }
    MrfRInstance::new(g, s, t, budget, h, Rational::from_int(demand), false).unwrap()
}

#[test]
fn five_cycle_needs_more_than_two_colors() {
    let limits = Limits::default();
    let c5 = UndirectedGraph::cycle(5);
    let two = reduce_coloring_to_mrfr(&c5, 2).unwrap();
    assert!(!decide_mrf_r_star(&two.output, &limits).unwrap().yes);
    let three = reduce_coloring_to_mrfr(&c5, 3).unwrap();
    let d = decide_mrf_r_star(&three.output, &limits).unwrap();
    assert!(d.yes);
    let coloring = coloring_from_flow(&three, &d.witness.unwrap(), &limits).unwrap();
    coloring.validate(&c5).unwrap();
    assert!(coloring.total() <= Rational::from_int(3));
}

#[test]
fn source_transformations_preserve_answers() {
    let limits = Limits::default();
    for (compat, demand) in [(false, 1), (false, 2), (true, 1), (true, 2)] {
        let inst = parallel(2, compat, demand);
        let expected = decide_mrf_r_star(&inst, &limits).unwrap().yes;
        let normalized = normalize_mrfr(&inst).unwrap().output;
        assert_eq!(decide_mrf_r_star(&normalized, &limits).unwrap().yes, expected);
        let saturated = saturate_demand(&inst).unwrap().output;
        assert_eq!(decide_mrf_r_star(&saturated, &limits).unwrap().yes, expected);
        let padded = pad_budget(&inst, 3).unwrap().output;
        assert_eq!(padded.budget, 3);
        assert_eq!(decide_mrf_r_star(&padded, &limits).unwrap().yes, expected);
    }
}

#[test]
fn multicommodity_outputs_have_their_properties() {
    for (compat, demand) in [(false, 1), (true, 1), (false, 2)] {
        let normalized = normalize_mrfr(&parallel(2, compat, demand)).unwrap().output;
        let art = reduce_mrfr_to_mrfm(&normalized).unwrap();
        let report = check_properties(&art);
        assert!(report.passed(), "{:?}", report.first_failure());
    }
}

#[test]
fn budget_one_is_outside_the_chain() {
    let normalized = normalize_mrfr(&parallel(1, false, 1)).unwrap().output;
    assert!(reduce_mrfr_to_mrfm(&normalized).is_err());
}
