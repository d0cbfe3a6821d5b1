use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::rational::Rational;

fn fail(msg: impl Into<String>) -> Error {
    Error::validation("lp.certificate", msg)
}

/// Checks a solution against the program description only.
///
/// * optimal: primal feasibility, dual sign conditions, complementary
///   slackness for rows and bounds, and equality of primal and dual values;
/// * infeasible: the Farkas multipliers give a row combination that no point
///   of the variable box satisfies;
/// * unbounded: the reported point is feasible and the ray is a recession
///   direction that improves the objective.
pub fn verify_certificates(lp: &LinearProgram, sol: &LpSolution) -> Result<()> {
    lp.validate()?;
    match sol.status {
        LpStatus::Optimal => verify_optimal(lp, sol),
        LpStatus::Infeasible => verify_farkas(lp, sol),
        LpStatus::Unbounded => verify_ray(lp, sol),
    }
}

fn check_primal(lp: &LinearProgram, x: &[Rational]) -> Result<()> {
    if x.len() != lp.variables.len() {
        return Err(fail("primal vector has the wrong length"));
    }
    for (v, xv) in lp.variables.iter().zip(x) {
        if v.lower.as_ref().is_some_and(|l| xv < l) || v.upper.as_ref().is_some_and(|u| xv > u) {
            return Err(fail(format!("variable {} = {xv} violates its bounds", v.name)));
        }
    }
    for c in &lp.constraints {
        let act = c.activity(x);
        let ok = match c.relation {
            Relation::Le => act <= c.rhs,
            Relation::Ge => act >= c.rhs,
            Relation::Eq => act == c.rhs,
        };
        if !ok {
            return Err(fail(format!(
                "constraint {} violated: {act} {} {}",
                c.name, c.relation, c.rhs
            )));
        }
    }
    Ok(())
}

/// `c - Aᵀy`.
fn reduced_costs(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut r = lp.objective_dense();
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in &c.coeffs {
            r[*j] -= a * yi;
        }
    }
    r
}

fn verify_optimal(lp: &LinearProgram, sol: &LpSolution) -> Result<()> {
    let x = &sol.primal;
    let y = &sol.dual;
    check_primal(lp, x)?;
    if y.len() != lp.constraints.len() {
        return Err(fail("dual vector has the wrong length"));
    }
    let sigma = if lp.sense == Sense::Maximize {
        Rational::one()
    } else {
        -Rational::one()
    };
    for (c, yi) in lp.constraints.iter().zip(y) {
        let s = &sigma * yi;
        let ok = match c.relation {
            Relation::Le => !s.is_negative(),
            Relation::Ge => !s.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(fail(format!("dual of {} has the wrong sign", c.name)));
        }
        if !yi.is_zero() && c.activity(x) != c.rhs {
            return Err(fail(format!("dual of slack constraint {} is nonzero", c.name)));
        }
    }
    let red = reduced_costs(lp, y);
    let mut dual_value: Rational = lp.constraints.iter().zip(y).map(|(c, yi)| &c.rhs * yi).sum();
    for ((v, rj), xj) in lp.variables.iter().zip(&red).zip(x) {
        if rj.is_zero() {
            continue;
        }
        let toward_upper = (&sigma * rj).is_positive();
        let bound = if toward_upper { &v.upper } else { &v.lower };
        match bound {
            Some(b) if b == xj => dual_value += rj * b,
            Some(_) => {
                return Err(fail(format!(
                    "variable {} is off the bound its reduced cost needs",
                    v.name
                )))
            }
            None => return Err(fail(format!("reduced cost of {} points at an infinite bound", v.name))),
        }
    }
    let primal_value = lp.objective_value(x);
    if primal_value != sol.value {
        return Err(fail("reported value differs from the primal objective"));
    }
    if primal_value != dual_value {
        return Err(fail(format!("primal {primal_value} differs from dual {dual_value}")));
    }
    Ok(())
}

fn verify_farkas(lp: &LinearProgram, sol: &LpSolution) -> Result<()> {
    let y = sol.farkas.as_ref().ok_or_else(|| fail("missing Farkas vector"))?;
    if y.len() != lp.constraints.len() {
        return Err(fail("Farkas vector has the wrong length"));
    }
    // With these signs every feasible x satisfies (Aᵀy)·x <= y·b.
    for (c, yi) in lp.constraints.iter().zip(y) {
        let ok = match c.relation {
            Relation::Le => !yi.is_negative(),
            Relation::Ge => !yi.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(fail(format!("Farkas multiplier of {} has the wrong sign", c.name)));
        }
    }
    let mut g = vec![Rational::zero(); lp.variables.len()];
    for (c, yi) in lp.constraints.iter().zip(y) {
        for (j, a) in &c.coeffs {
            g[*j] += a * yi;
        }
    }
    let rhs: Rational = lp.constraints.iter().zip(y).map(|(c, yi)| &c.rhs * yi).sum();
    let mut box_min = Rational::zero();
    for (v, gj) in lp.variables.iter().zip(&g) {
        if gj.is_zero() {
            continue;
        }
        let bound = if gj.is_positive() { &v.lower } else { &v.upper };
        match bound {
            Some(b) => box_min += gj * b,
            None => return Err(fail(format!("Farkas combination is unbounded below in {}", v.name))),
        }
    }
    if box_min > rhs {
        Ok(())
    } else {
        Err(fail("Farkas combination does not separate"))
    }
}

fn verify_ray(lp: &LinearProgram, sol: &LpSolution) -> Result<()> {
    check_primal(lp, &sol.primal)?;
    let d = sol.ray.as_ref().ok_or_else(|| fail("missing ray"))?;
    if d.len() != lp.variables.len() {
        return Err(fail("ray has the wrong length"));
    }
    for (v, dj) in lp.variables.iter().zip(d) {
        if (v.lower.is_some() && dj.is_negative()) || (v.upper.is_some() && dj.is_positive()) {
            return Err(fail(format!("ray leaves the bounds of {}", v.name)));
        }
    }
    for c in &lp.constraints {
        let act = c.activity(d);
        let ok = match c.relation {
            Relation::Le => !act.is_positive(),
            Relation::Ge => !act.is_negative(),
            Relation::Eq => act.is_zero(),
        };
        if !ok {
            return Err(fail(format!("ray violates constraint {}", c.name)));
        }
    }
    let gain = lp.objective_value(d);
    let improving = match lp.sense {
        Sense::Maximize => gain.is_positive(),
        Sense::Minimize => gain.is_negative(),
    };
    if improving {
        Ok(())
    } else {
        Err(fail("ray does not improve the objective"))
    }
}
