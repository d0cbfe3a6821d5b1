//! Exact rational linear programming.
//!
//! [`LinearProgram`] is a plain description (bounded variables, sparse rows
//! with `<=`, `=` or `>=`); [`solve_lp`] runs a two-phase dense tableau
//! simplex and returns either an optimum with primal and dual vectors, a
//! Farkas vector, or an improving ray. [`verify_certificates`] re-checks any
//! of these against the description alone.

mod certificate;
mod simplex;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use certificate::verify_certificates;
pub use simplex::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<(usize, Rational)>,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: Vec::new(),
            variables: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Option<Rational>, upper: Option<Rational>) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    /// A variable bounded below by zero.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, Some(Rational::zero()), None)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>) {
        self.objective = coeffs;
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    /// Dense objective vector.
    pub fn objective_dense(&self) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.variables.len()];
        for (j, v) in &self.objective {
            c[*j] += v;
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        let check = |what: &str, coeffs: &[(usize, Rational)]| -> Result<()> {
            let mut seen = BTreeSet::new();
            for (j, _) in coeffs {
                if *j >= n {
                    return Err(Error::MalformedLp(format!("{what} references undeclared variable {j}")));
                }
                if !seen.insert(*j) {
                    return Err(Error::MalformedLp(format!("{what} lists variable {j} twice")));
                }
            }
            Ok(())
        };
        check("objective", &self.objective)?;
        for c in &self.constraints {
            check(&format!("constraint {}", c.name), &c.coeffs)?;
        }
        for v in &self.variables {
            if let (Some(l), Some(u)) = (&v.lower, &v.upper) {
                if l > u {
                    return Err(Error::MalformedLp(format!("variable {} has empty bounds", v.name)));
                }
            }
        }
        Ok(())
    }

    /// Human-readable listing: objective, constraints, then bounds.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let term_list = |coeffs: &[(usize, Rational)]| -> String {
            if coeffs.is_empty() {
                return "0".to_string();
            }
            let mut s = String::new();
            for (i, (j, a)) in coeffs.iter().enumerate() {
                let name = &self.variables[*j].name;
                if a.is_negative() {
                    s.push_str(if i == 0 { "-" } else { " - " });
                } else if i > 0 {
                    s.push_str(" + ");
                }
                let abs = a.abs();
                if abs == 1 {
                    s.push_str(name);
                } else {
                    let _ = write!(s, "{abs} {name}");
                }
            }
            s
        };
        let sense = match self.sense {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        };
        let _ = writeln!(out, "{sense}");
        let _ = writeln!(out, "  obj: {}", term_list(&self.objective));
        let _ = writeln!(out, "subject to");
        for c in &self.constraints {
            let _ = writeln!(out, "  {}: {} {} {}", c.name, term_list(&c.coeffs), c.relation, c.rhs);
        }
        let _ = writeln!(out, "bounds");
        for v in &self.variables {
            let lo = v.lower.as_ref().map_or("-inf".to_string(), |l| l.to_string());
            let hi = v.upper.as_ref().map_or("+inf".to_string(), |u| u.to_string());
            let _ = writeln!(out, "  {lo} <= {} <= {hi}", v.name);
        }
        let _ = writeln!(out, "end");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; zero unless optimal.
    pub value: Rational,
    /// One entry per variable. Optimal or, when unbounded, a feasible point.
    pub primal: Vec<Rational>,
    /// One entry per constraint; set when optimal.
    pub dual: Vec<Rational>,
    /// Row multipliers proving infeasibility.
    pub farkas: Option<Vec<Rational>>,
    /// Improving direction proving unboundedness.
    pub ray: Option<Vec<Rational>>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
