use crate::error::Result;
use crate::lp::{LinearProgram, LpSolution, LpStatus, Relation, Sense};
use crate::rational::Rational;

/// Number of consecutive degenerate pivots after which the entering rule
/// switches from largest reduced cost to lowest index.
const DEGENERATE_STREAK: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

/// `x_j = offset + Σ sign · column`.
struct VarMap {
    offset: Rational,
    parts: Vec<(usize, bool)>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    reduced: Vec<Rational>,
    value: Rational,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn cols(&self) -> usize {
        self.kinds.len()
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let n = self.cols();
        let mut reduced = costs.to_vec();
        let mut value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, d) in reduced.iter_mut().enumerate().take(n) {
                let a = &self.rows[r][j];
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
            value += cb * &self.rhs[r];
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        if piv != 1 {
            let inv = piv.recip();
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<usize> = (0..self.cols()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow: Vec<Rational> = nz.iter().map(|&j| self.rows[r][j].clone()).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            let row = &mut self.rows[i];
            for (k, &j) in nz.iter().enumerate() {
                row[j] -= &f * &prow[k];
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        let f = self.reduced[q].clone();
        if !f.is_zero() {
            for (k, &j) in nz.iter().enumerate() {
                self.reduced[j] -= &f * &prow[k];
            }
            self.value += &f * &prhs;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Maximizes the current costs; artificial columns never enter when
    /// `allow_artificial` is false.
    fn run(&mut self, allow_artificial: bool) -> Outcome {
        let mut streak = 0usize;
        loop {
            let eligible = |j: usize| allow_artificial || self.kinds[j] != ColumnKind::Artificial;
            let entering = if streak >= DEGENERATE_STREAK {
                (0..self.cols()).find(|&j| eligible(j) && self.reduced[j].is_positive())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..self.cols() {
                    if eligible(j) && self.reduced[j].is_positive() {
                        match best {
                            Some(b) if self.reduced[b] >= self.reduced[j] => {}
                            _ => best = Some(j),
                        }
                    }
                }
                best
            };
            let q = match entering {
                Some(q) => q,
                None => return Outcome::Optimal,
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let (r, ratio) = match leave {
                Some(x) => x,
                None => return Outcome::Unbounded(q),
            };
            if ratio.is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, q);
        }
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.cols()];
        for (r, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[r].clone();
        }
        x
    }
}

/// Solves `lp` exactly. Deterministic: the same description always follows
/// the same pivot sequence.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let nvars = lp.variables.len();

    // Variable substitution into nonnegative columns.
    let mut maps = Vec::with_capacity(nvars);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for v in &lp.variables {
        let map = match (&v.lower, &v.upper) {
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
                VarMap {
                    offset: l.clone(),
                    parts: vec![(col, true)],
                }
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                VarMap {
                    offset: u.clone(),
                    parts: vec![(col, false)],
                }
            }
            (None, None) => {
                let col = ncols;
                ncols += 2;
                VarMap {
                    offset: Rational::zero(),
                    parts: vec![(col, true), (col + 1, false)],
                }
            }
        };
        maps.push(map);
    }
    let structural = ncols;

    // Rows in column space before slack columns are appended.
    struct Row {
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
        negated: bool,
    }
    let mut rows: Vec<Row> = Vec::new();
    for c in &lp.constraints {
        let mut dense: std::collections::BTreeMap<usize, Rational> = Default::default();
        let mut rhs = c.rhs.clone();
        for (j, a) in &c.coeffs {
            if a.is_zero() {
                continue;
            }
            rhs -= a * &maps[*j].offset;
            for &(col, pos) in &maps[*j].parts {
                let entry = dense.entry(col).or_insert_with(Rational::zero);
                if pos {
                    *entry += a;
                } else {
                    *entry -= a;
                }
            }
        }
        rows.push(Row {
            coeffs: dense.into_iter().filter(|(_, a)| !a.is_zero()).collect(),
            relation: c.relation,
            rhs,
            negated: false,
        });
    }
    for (col, ub) in &bound_rows {
        rows.push(Row {
            coeffs: vec![(*col, Rational::one())],
            relation: Relation::Le,
            rhs: ub.clone(),
            negated: false,
        });
    }
    for row in rows.iter_mut() {
        if row.rhs.is_negative() {
            row.negated = true;
            row.rhs = -row.rhs.clone();
            for (_, a) in row.coeffs.iter_mut() {
                *a = -a.clone();
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let mut kinds = vec![ColumnKind::Structural; structural];
    let mut identity = vec![0usize; m];
    let mut extra: Vec<(usize, usize, Rational)> = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        match row.relation {
            Relation::Le => {
                identity[r] = kinds.len();
                kinds.push(ColumnKind::Slack);
            }
            Relation::Ge => {
                extra.push((r, kinds.len(), -Rational::one()));
                kinds.push(ColumnKind::Slack);
                identity[r] = kinds.len();
                kinds.push(ColumnKind::Artificial);
            }
            Relation::Eq => {
                identity[r] = kinds.len();
                kinds.push(ColumnKind::Artificial);
            }
        }
    }
    let n = kinds.len();
    let mut table = vec![vec![Rational::zero(); n]; m];
    for (r, row) in rows.iter().enumerate() {
        for (col, a) in &row.coeffs {
            table[r][*col] = a.clone();
        }
        table[r][identity[r]] = Rational::one();
    }
    for (r, col, a) in extra {
        table[r][col] = a;
    }
    let mut tab = Tableau {
        rows: table,
        rhs: rows.iter().map(|r| r.rhs.clone()).collect(),
        basis: identity.clone(),
        kinds,
        reduced: Vec::new(),
        value: Rational::zero(),
        pivots: 0,
    };

    let ncons = lp.constraints.len();
    let sign_back = |r: usize, y: Rational| if rows[r].negated { -y } else { y };

    // Phase one.
    let has_artificial = tab.kinds.contains(&ColumnKind::Artificial);
    if has_artificial {
        let costs: Vec<Rational> = tab
            .kinds
            .iter()
            .map(|k| {
                if *k == ColumnKind::Artificial {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        tab.set_costs(&costs);
        tab.run(true);
        if tab.value.is_negative() {
            let farkas = (0..ncons)
                .map(|r| {
                    let col = identity[r];
                    sign_back(r, &costs[col] - &tab.reduced[col])
                })
                .collect();
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: Rational::zero(),
                primal: vec![Rational::zero(); nvars],
                dual: Vec::new(),
                farkas: Some(farkas),
                ray: None,
                pivots: tab.pivots,
            });
        }
        for r in 0..m {
            if tab.kinds[tab.basis[r]] != ColumnKind::Artificial {
                continue;
            }
            if let Some(q) = (0..n).find(|&j| tab.kinds[j] != ColumnKind::Artificial && !tab.rows[r][j].is_zero()) {
                tab.pivot(r, q);
            }
        }
    }

    // Phase two.
    let negate = lp.sense == Sense::Minimize;
    let mut costs = vec![Rational::zero(); n];
    for (j, c) in &lp.objective {
        for &(col, pos) in &maps[*j].parts {
            let v = if pos == negate { -c.clone() } else { c.clone() };
            costs[col] += v;
        }
    }
    tab.set_costs(&costs);
    let outcome = tab.run(false);

    let to_original = |cols: &[Rational], with_offset: bool| -> Vec<Rational> {
        maps.iter()
            .map(|map| {
                let mut x = if with_offset {
                    map.offset.clone()
                } else {
                    Rational::zero()
                };
                for &(col, pos) in &map.parts {
                    if pos {
                        x += &cols[col];
                    } else {
                        x -= &cols[col];
                    }
                }
                x
            })
            .collect()
    };
    let primal = to_original(&tab.column_values(), true);

    match outcome {
        Outcome::Unbounded(q) => {
            let mut dir = vec![Rational::zero(); n];
            dir[q] = Rational::one();
            for r in 0..m {
                let a = &tab.rows[r][q];
                if !a.is_zero() {
                    dir[tab.basis[r]] = -a.clone();
                }
            }
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                value: Rational::zero(),
                primal,
                dual: Vec::new(),
                farkas: None,
                ray: Some(to_original(&dir, false)),
                pivots: tab.pivots,
            })
        }
        Outcome::Optimal => {
            let dual = (0..ncons)
                .map(|r| {
                    let y = sign_back(r, -tab.reduced[identity[r]].clone());
                    if negate {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            let value = lp.objective_value(&primal);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                value,
                primal,
                dual,
                farkas: None,
                ray: None,
                pivots: tab.pivots,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::verify_certificates;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        lp.add_constraint("c", vec![(x, r(1))], Relation::Le, r(3));
        lp.set_objective(vec![(x, r(1))]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.value, r(3));
        verify_certificates(&lp, &sol).unwrap();
    }

    #[test]
    fn dual_is_forced() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_constraint("c", vec![(x, r(1)), (y, r(1))], Relation::Le, r(1));
        lp.set_objective(vec![(x, r(1)), (y, r(1))]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.value, r(1));
        assert_eq!(sol.dual, vec![r(1)]);
        verify_certificates(&lp, &sol).unwrap();
    }

    #[test]
    fn infeasible_with_farkas() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", None, None);
        lp.add_constraint("lo", vec![(x, r(1))], Relation::Ge, r(1));
        lp.add_constraint("hi", vec![(x, r(1))], Relation::Le, r(0));
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        verify_certificates(&lp, &sol).unwrap();
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.add_constraint("c", vec![(x, r(1)), (y, r(-1))], Relation::Le, r(2));
        lp.set_objective(vec![(x, r(1))]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        verify_certificates(&lp, &sol).unwrap();
    }

    #[test]
    fn bounds_equalities_and_min() {
        // min 2x - y  s.t. x + y = 3, x - y >= -1, -1 <= x <= 5, y <= 4
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", Some(r(-1)), Some(r(5)));
        let y = lp.add_var("y", None, Some(r(4)));
        lp.add_constraint("sum", vec![(x, r(1)), (y, r(1))], Relation::Eq, r(3));
        lp.add_constraint("gap", vec![(x, r(1)), (y, r(-1))], Relation::Ge, r(-1));
        lp.set_objective(vec![(x, r(2)), (y, r(-1))]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal, vec![r(1), r(2)]);
        assert_eq!(sol.value, r(0));
        verify_certificates(&lp, &sol).unwrap();
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example; cycles under the textbook largest-coefficient rule.
        let q = |n, d| Rational::new(n, d);
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x: Vec<usize> = (0..4).map(|i| lp.add_nonneg(format!("x{i}"))).collect();
        lp.add_constraint(
            "r1",
            vec![(x[0], q(1, 4)), (x[1], q(-60, 1)), (x[2], q(-1, 25)), (x[3], q(9, 1))],
            Relation::Le,
            r(0),
        );
        lp.add_constraint(
            "r2",
            vec![(x[0], q(1, 2)), (x[1], q(-90, 1)), (x[2], q(-1, 50)), (x[3], q(3, 1))],
            Relation::Le,
            r(0),
        );
        lp.add_constraint("r3", vec![(x[2], r(1))], Relation::Le, r(1));
        lp.set_objective(vec![(x[0], q(3, 4)), (x[1], r(-150)), (x[2], q(1, 50)), (x[3], r(-6))]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.value, q(1, 20));
        verify_certificates(&lp, &sol).unwrap();
    }

    #[test]
    fn malformed_reference_is_rejected() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        lp.add_constraint("c", vec![(3, r(1))], Relation::Le, r(1));
        assert!(solve_lp(&lp).is_err());
    }
}
