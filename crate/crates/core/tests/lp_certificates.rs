use proptest::prelude::*;
use robustflow::lp::{solve_lp, verify_certificates, LinearProgram, LpStatus, Relation, Sense};
use robustflow::Rational;

fn relation(code: u8) -> Relation {
    match code % 3 {
        0 => Relation::Le,
        1 => Relation::Eq,
        _ => Relation::Ge,
    }
}

prop_compose! {
    fn small_lp()(
        vars in 1usize..5,
        rows in 0usize..5,
    )(
        maximize in any::<bool>(),
        objective in prop::collection::vec(-4i64..=4, vars),
        uppers in prop::collection::vec(prop::option::of(0i64..=6), vars),
        free in prop::collection::vec(any::<bool>(), vars),
        coeffs in prop::collection::vec(prop::collection::vec(-3i64..=3, vars), rows),
        relations in prop::collection::vec(any::<u8>(), rows),
        rhs in prop::collection::vec(-5i64..=8, rows),
    ) -> LinearProgram {
        let mut lp = LinearProgram::new(if maximize { Sense::Maximize } else { Sense::Minimize });
        for j in 0..objective.len() {
            let lower = (!free[j]).then(Rational::zero);
            lp.add_var(format!("x{j}"), lower, uppers[j].map(Rational::from_int));
        }
        lp.set_objective(objective.iter().enumerate().map(|(j, &c)| (j, Rational::from_int(c))).collect());
        for (i, row) in coeffs.iter().enumerate() {
            let terms = row.iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (j, Rational::from_int(a))).collect();
            lp.add_constraint(format!("r{i}"), terms, relation(relations[i]), Rational::from_int(rhs[i]));
        }
        lp
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_outcome_carries_a_valid_certificate(lp in small_lp()) {
        let sol = solve_lp(&lp).unwrap();
        prop_assert!(verify_certificates(&lp, &sol).is_ok(), "{:?}\n{}", sol.status, lp.dump());
        if sol.status == LpStatus::Optimal {
            prop_assert_eq!(lp.objective_value(&sol.primal), sol.value);
        }
    }

    #[test]
    fn scaling_the_objective_scales_the_value(lp in small_lp(), factor in 1i64..=5) {
        let base = solve_lp(&lp).unwrap();
        let mut scaled = lp.clone();
        for (_, c) in &mut scaled.objective {
            *c = &*c * &Rational::from_int(factor);
        }
        let sol = solve_lp(&scaled).unwrap();
        prop_assert_eq!(sol.status, base.status);
        if sol.status == LpStatus::Optimal {
            prop_assert_eq!(sol.value, &base.value * &Rational::from_int(factor));
        }
    }
}

#[test]
fn tampered_duals_are_rejected() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_nonneg("x");
    let y = lp.add_nonneg("y");
    lp.set_objective(vec![(x, Rational::one()), (y, Rational::one())]);
    lp.add_constraint(
        "cap",
        vec![(x, Rational::one()), (y, Rational::from_int(2))],
        Relation::Le,
        Rational::from_int(4),
    );
    lp.add_constraint("x", vec![(x, Rational::one())], Relation::Le, Rational::from_int(3));
    let mut sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.value, Rational::new(7, 2));
    verify_certificates(&lp, &sol).unwrap();
    sol.dual[0] = Rational::one();
    assert!(verify_certificates(&lp, &sol).is_err());
}
