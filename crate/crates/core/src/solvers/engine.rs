//! Path/scenario LP over arc classes, solved by alternating scenario-row
//! separation and path-column pricing.
//!
//! Parallel arcs that are interchangeable (same endpoints, capacity and
//! immunity, and twins in the compatibility graph when there is one) form a
//! class. Averaging any optimal flow over permutations inside classes keeps it
//! feasible and optimal, so it suffices to optimize over class-level flows:
//! one variable per class path, one capacity row per class, and one loss row
//! per class profile. All candidate class paths are enumerated up front; the
//! LP only carries those with positive reduced cost at some point, and only
//! the scenario rows found violated. At termination every enumerated column
//! prices out and no profile is violated, so the restricted optimum is an
//! optimum of the full program.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::instances::{enumerate_st_paths, ArcId, CompatGraph, Digraph, NodeId, Path, PathFlow};
use crate::limits::Limits;
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation, Sense};
use crate::rational::Rational;
use crate::solvers::search::{self, Profile, Request, Space};

/// Columns priced in per round.
const COLUMN_BATCH: usize = 40;
/// Violated profiles added per round.
const ROW_BATCH: usize = 8;
/// Active columns beyond which priced-out columns leave the LP.
const PRUNE_AT: usize = 160;

#[derive(Debug, Clone)]
pub(crate) struct ArcClass {
    pub arcs: Vec<ArcId>,
    pub capacity: Rational,
    pub max_pick: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct ClassModel {
    pub classes: Vec<ArcClass>,
    /// One arc per class; arc `i` represents class `i`.
    pub quotient: Digraph,
    adjacency: Option<Vec<Vec<bool>>>,
}

impl ClassModel {
    /// Classes of parallel arcs with equal capacity and immunity.
    pub fn plain(graph: &Digraph) -> Result<Self> {
        let mut groups: BTreeMap<(NodeId, NodeId, Rational, bool), Vec<ArcId>> = BTreeMap::new();
        for a in graph.arcs() {
            groups
                .entry((a.tail, a.head, a.capacity.clone(), a.immune))
                .or_default()
                .push(a.id);
        }
        let mut parts: Vec<(Vec<ArcId>, usize)> = groups
            .into_values()
            .map(|arcs| {
                let pick = if graph.arc(arcs[0]).immune { 0 } else { arcs.len() };
                (arcs, pick)
            })
            .collect();
        parts.sort_by_key(|(arcs, _)| arcs[0]);
        Self::build(graph, parts, None)
    }

    /// Every arc on its own.
    pub fn singletons(graph: &Digraph) -> Result<Self> {
        let parts = graph
            .arcs()
            .iter()
            .map(|a| (vec![a.id], usize::from(!a.immune)))
            .collect();
        Self::build(graph, parts, None)
    }

    /// Parallel arcs that are twins in `compat`. False twins (equal open
    /// neighbourhoods, pairwise non-adjacent) contribute at most one arc to a
    /// clique; true twins (equal closed neighbourhoods) any number.
    pub fn restricted(graph: &Digraph, compat: &CompatGraph) -> Result<Self> {
        let open: Vec<BTreeSet<ArcId>> = graph.arcs().iter().map(|a| compat.neighbors(a.id).collect()).collect();
        let mut false_twins: BTreeMap<(NodeId, NodeId, bool, &BTreeSet<ArcId>), Vec<ArcId>> = BTreeMap::new();
        for a in graph.arcs() {
            false_twins
                .entry((a.tail, a.head, a.immune, &open[a.id.index()]))
                .or_default()
                .push(a.id);
        }
        let mut parts: Vec<(Vec<ArcId>, usize)> = Vec::new();
        let mut lonely: BTreeMap<(NodeId, NodeId, bool, BTreeSet<ArcId>), Vec<ArcId>> = BTreeMap::new();
        for arcs in false_twins.into_values() {
            if arcs.len() > 1 {
                let pick = usize::from(!graph.arc(arcs[0]).immune);
                parts.push((arcs, pick));
            } else {
                let a = graph.arc(arcs[0]);
                let mut closed = open[a.id.index()].clone();
                closed.insert(a.id);
                lonely.entry((a.tail, a.head, a.immune, closed)).or_default().push(a.id);
            }
        }
        for arcs in lonely.into_values() {
            let pick = if graph.arc(arcs[0]).immune { 0 } else { arcs.len() };
            parts.push((arcs, pick));
        }
        parts.sort_by_key(|(arcs, _)| arcs[0]);
        let n = parts.len();
        let mut adjacency = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                adjacency[i][j] = i != j && compat.contains(parts[i].0[0], parts[j].0[0]);
            }
        }
        Self::build(graph, parts, Some(adjacency))
    }

    fn build(graph: &Digraph, parts: Vec<(Vec<ArcId>, usize)>, adjacency: Option<Vec<Vec<bool>>>) -> Result<Self> {
        let mut quotient = Digraph::new();
        for v in graph.nodes() {
            quotient.add_node(graph.node_name(v))?;
        }
        let mut classes = Vec::with_capacity(parts.len());
        for (i, (arcs, max_pick)) in parts.into_iter().enumerate() {
            let first = graph.arc(arcs[0]);
            quotient.add_arc(
                format!("c{i}"),
                first.tail,
                first.head,
                first.capacity.clone(),
                first.immune,
            )?;
            classes.push(ArcClass {
                arcs,
                capacity: first.capacity.clone(),
                max_pick,
            });
        }
        Ok(ClassModel {
            classes,
            quotient,
            adjacency,
        })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.arcs.len()).collect()
    }

    /// Class paths of `commodity` between `source` and `sink`.
    pub fn columns(&self, commodity: usize, source: NodeId, sink: NodeId, limits: &Limits) -> Result<Vec<Column>> {
        Ok(enumerate_st_paths(&self.quotient, source, sink, limits)?
            .into_iter()
            .map(|p| Column::new(commodity, p.arcs.iter().map(|a| a.index()).collect()))
            .collect())
    }

    /// Explicit paths of a class path, each receiving an equal share.
    pub fn expand(&self, column: &Column, tagged: bool) -> Vec<Path> {
        let mut out: Vec<Vec<ArcId>> = vec![Vec::new()];
        for &c in &column.classes {
            let mut next = Vec::with_capacity(out.len() * self.classes[c].arcs.len());
            for prefix in &out {
                for &a in &self.classes[c].arcs {
                    let mut p = prefix.clone();
                    p.push(a);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|arcs| {
                if tagged {
                    Path::for_commodity(column.commodity, arcs)
                } else {
                    Path::new(arcs)
                }
            })
            .collect()
    }

    /// Number of explicit paths behind a class path.
    pub fn multiplicity(&self, column: &Column) -> usize {
        column
            .classes
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(self.classes[c].arcs.len()))
            .unwrap_or(usize::MAX)
    }

    /// Uniformly spread explicit flow, or `None` beyond the path limit.
    pub fn decompress(
        &self,
        columns: &[Column],
        flow: &[(usize, Rational)],
        tagged: bool,
        limits: &Limits,
    ) -> Option<PathFlow> {
        let mut count = 0usize;
        for (j, _) in flow {
            count = count.saturating_add(self.multiplicity(&columns[*j]));
        }
        if count > limits.max_paths {
            return None;
        }
        let mut out = PathFlow::new();
        for (j, value) in flow {
            let paths = self.expand(&columns[*j], tagged);
            let share = value / &Rational::from(paths.len());
            for p in paths {
                out.add(p, share.clone());
            }
        }
        Some(out)
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency.as_ref().is_none_or(|m| m[a][b])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Column {
    pub commodity: usize,
    /// Classes in path order.
    pub classes: Vec<usize>,
    sorted: Vec<usize>,
}

impl Column {
    pub fn new(commodity: usize, classes: Vec<usize>) -> Self {
        let mut sorted = classes.clone();
        sorted.sort_unstable();
        Column {
            commodity,
            classes,
            sorted,
        }
    }

    pub fn sorted_classes(&self) -> &[usize] {
        &self.sorted
    }
}

#[derive(Debug, Clone)]
pub(crate) enum LossRows {
    /// `loss(S) <= λ` with `λ >= 0` entering the objective with weight -1.
    Lambda,
    /// `loss(S) <= bound`.
    Bound(Rational),
    Off,
}

#[derive(Debug, Clone)]
pub(crate) struct Formulation {
    pub budget: usize,
    pub exact: bool,
    pub use_compat: bool,
    pub loss: LossRows,
    /// Per commodity.
    pub demand: Vec<Option<(Relation, Rational)>>,
    pub total: Option<Rational>,
    /// Objective weight per column; one when absent.
    pub weights: Option<Vec<Rational>>,
}

#[derive(Debug, Clone)]
pub(crate) struct EngineResult {
    /// False when equality demands cannot be met.
    pub feasible: bool,
    pub value: Rational,
    pub lambda: Rational,
    /// `(column, value)` with positive values.
    pub flow: Vec<(usize, Rational)>,
    pub lp: LinearProgram,
}

struct Restricted<'a> {
    model: &'a ClassModel,
    columns: &'a [Column],
    form: &'a Formulation,
    active: Vec<usize>,
    in_lp: Vec<bool>,
    /// Columns dropped once stay in for good, so pruning cannot cycle.
    pruned: Vec<bool>,
    profiles: Vec<Profile>,
    seen: BTreeSet<Profile>,
}

struct RoundSolution {
    lp: LinearProgram,
    x: Vec<Rational>,
    lambda: Rational,
    value: Rational,
    cap_dual: Vec<Rational>,
    dem_dual: Vec<Rational>,
    total_dual: Rational,
    row_dual: Vec<Rational>,
}

pub(crate) fn solve(
    model: &ClassModel,
    columns: &[Column],
    form: &Formulation,
    limits: &Limits,
) -> Result<EngineResult> {
    let has_equalities = form.demand.iter().flatten().any(|(r, _)| *r == Relation::Eq);
    // Equality demands start from a flow that meets them: first maximize the
    // total against the relaxed demands.
    let relaxed = Formulation {
        demand: form
            .demand
            .iter()
            .map(|d| d.as_ref().map(|(_, v)| (Relation::Le, v.clone())))
            .collect(),
        weights: None,
        ..form.clone()
    };
    let mut state = Restricted {
        model,
        columns,
        form: if has_equalities { &relaxed } else { form },
        active: Vec::new(),
        in_lp: vec![false; columns.len()],
        pruned: vec![false; columns.len()],
        profiles: Vec::new(),
        seen: BTreeSet::new(),
    };
    if has_equalities {
        let sol = state.run(limits)?;
        let mut shipped = vec![Rational::zero(); form.demand.len()];
        for (pos, &j) in state.active.iter().enumerate() {
            shipped[columns[j].commodity] += &sol.x[pos];
        }
        let short = form
            .demand
            .iter()
            .zip(&shipped)
            .any(|(d, s)| matches!(d, Some((Relation::Eq, v)) if s < v));
        if short {
            return Ok(state.finish(sol, false));
        }
        state.form = form;
    }
    let sol = state.run(limits)?;
    Ok(state.finish(sol, true))
}

impl Restricted<'_> {
    fn run(&mut self, limits: &Limits) -> Result<RoundSolution> {
        loop {
            let sol = self.solve_round()?;
            let solved = self.active.len();
            let mut grew = self.price(&sol);
            grew |= self.separate(&sol, limits)?;
            if !grew {
                return Ok(sol);
            }
            if solved > PRUNE_AT {
                self.prune(&sol, solved);
            }
        }
    }

    fn weight(&self, j: usize) -> Rational {
        match &self.form.weights {
            Some(w) => w[j].clone(),
            None => Rational::one(),
        }
    }

    fn coefficient(&self, column: &Column, profile: &Profile) -> Rational {
        let mut survive = Rational::one();
        for &(c, j) in profile {
            if column.sorted_classes().binary_search(&c).is_ok() {
                let n = self.model.classes[c].arcs.len();
                if j >= n {
                    return Rational::one();
                }
                survive *= Rational::one() - Rational::from(j) / Rational::from(n);
            }
        }
        Rational::one() - survive
    }

    fn solve_round(&self) -> Result<RoundSolution> {
        let form = self.form;
        let mut lp = LinearProgram::new(Sense::Maximize);
        let xs: Vec<usize> = self.active.iter().map(|&j| lp.add_nonneg(format!("x{j}"))).collect();
        let lambda = match form.loss {
            LossRows::Lambda => Some(lp.add_nonneg("lambda")),
            _ => None,
        };
        let mut objective: Vec<(usize, Rational)> = self
            .active
            .iter()
            .zip(&xs)
            .map(|(&j, &v)| (v, self.weight(j)))
            .filter(|(_, w)| !w.is_zero())
            .collect();
        if let Some(l) = lambda {
            objective.push((l, -Rational::one()));
        }
        lp.set_objective(objective);

        let nclasses = self.model.classes.len();
        let mut by_class: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nclasses];
        let mut by_commodity: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); form.demand.len()];
        for (&j, &v) in self.active.iter().zip(&xs) {
            for &c in &self.columns[j].classes {
                by_class[c].push((v, Rational::one()));
            }
            if let Some(list) = by_commodity.get_mut(self.columns[j].commodity) {
                list.push((v, Rational::one()));
            }
        }
        let mut cap_rows = vec![None; nclasses];
        for (c, coeffs) in by_class.into_iter().enumerate() {
            if coeffs.is_empty() {
                continue;
            }
            let class = &self.model.classes[c];
            let rhs = &class.capacity * &Rational::from(class.arcs.len());
            cap_rows[c] = Some(lp.add_constraint(format!("cap{c}"), coeffs, Relation::Le, rhs));
        }
        let mut dem_rows = vec![None; form.demand.len()];
        for (i, d) in form.demand.iter().enumerate() {
            if let Some((rel, v)) = d {
                let coeffs = std::mem::take(&mut by_commodity[i]);
                dem_rows[i] = Some(lp.add_constraint(format!("demand{i}"), coeffs, *rel, v.clone()));
            }
        }
        let total_row = form.total.as_ref().map(|t| {
            let coeffs = xs.iter().map(|&v| (v, Rational::one())).collect();
            lp.add_constraint("total", coeffs, Relation::Le, t.clone())
        });
        let mut loss_rows = Vec::with_capacity(self.profiles.len());
        for (r, profile) in self.profiles.iter().enumerate() {
            let mut coeffs: Vec<(usize, Rational)> = self
                .active
                .iter()
                .zip(&xs)
                .map(|(&j, &v)| (v, self.coefficient(&self.columns[j], profile)))
                .filter(|(_, a)| !a.is_zero())
                .collect();
            let rhs = match &form.loss {
                LossRows::Lambda => {
                    coeffs.push((lambda.expect("lambda column"), -Rational::one()));
                    Rational::zero()
                }
                LossRows::Bound(b) => b.clone(),
                LossRows::Off => unreachable!("no rows without loss constraints"),
            };
            loss_rows.push(lp.add_constraint(format!("loss{r}"), coeffs, Relation::Le, rhs));
        }

        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::precondition(format!(
                "restricted path program ended {:?}; the formulation should be feasible and bounded",
                sol.status
            )));
        }
        let pick = |row: Option<usize>| row.map_or_else(Rational::zero, |r| sol.dual[r].clone());
        Ok(RoundSolution {
            x: xs.iter().map(|&v| sol.primal[v].clone()).collect(),
            lambda: lambda.map_or_else(Rational::zero, |l| sol.primal[l].clone()),
            value: sol.value.clone(),
            cap_dual: cap_rows.iter().map(|r| pick(*r)).collect(),
            dem_dual: dem_rows.iter().map(|r| pick(*r)).collect(),
            total_dual: pick(total_row),
            row_dual: loss_rows.iter().map(|&r| sol.dual[r].clone()).collect(),
            lp,
        })
    }

    /// Adds the columns with the largest positive reduced costs.
    fn price(&mut self, sol: &RoundSolution) -> bool {
        let live: Vec<(&Profile, &Rational)> = self
            .profiles
            .iter()
            .zip(&sol.row_dual)
            .filter(|(_, y)| !y.is_zero())
            .collect();
        let mut candidates: Vec<(Rational, usize)> = Vec::new();
        for (j, column) in self.columns.iter().enumerate() {
            if self.in_lp[j] {
                continue;
            }
            let mut rc = self.weight(j) - &sol.total_dual;
            if let Some(y) = sol.dem_dual.get(column.commodity) {
                rc -= y;
            }
            for &c in &column.classes {
                rc -= &sol.cap_dual[c];
            }
            if !rc.is_positive() {
                continue;
            }
            for (profile, y) in &live {
                rc -= *y * &self.coefficient(column, profile);
                if !rc.is_positive() {
                    break;
                }
            }
            if rc.is_positive() {
                candidates.push((rc, j));
            }
        }
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        candidates.truncate(COLUMN_BATCH);
        for &(_, j) in &candidates {
            self.in_lp[j] = true;
            self.active.push(j);
        }
        !candidates.is_empty()
    }

    /// Drops columns among the first `solved` that carry no flow and have a
    /// negative reduced cost; pricing brings them back if needed.
    fn prune(&mut self, sol: &RoundSolution, solved: usize) {
        let mut keep = Vec::with_capacity(self.active.len());
        for (pos, &j) in self.active.iter().enumerate() {
            if pos >= solved || self.pruned[j] || sol.x[pos].is_positive() || !self.reduced_cost(sol, j).is_negative() {
                keep.push(j);
            } else {
                self.in_lp[j] = false;
                self.pruned[j] = true;
            }
        }
        self.active = keep;
    }

    fn reduced_cost(&self, sol: &RoundSolution, j: usize) -> Rational {
        let column = &self.columns[j];
        let mut rc = self.weight(j) - &sol.total_dual;
        if let Some(y) = sol.dem_dual.get(column.commodity) {
            rc -= y;
        }
        for &c in &column.classes {
            rc -= &sol.cap_dual[c];
        }
        for (profile, y) in self.profiles.iter().zip(&sol.row_dual) {
            if !y.is_zero() {
                rc -= y * &self.coefficient(column, profile);
            }
        }
        rc
    }

    /// Adds the most violated scenario profiles.
    fn separate(&mut self, sol: &RoundSolution, limits: &Limits) -> Result<bool> {
        let threshold = match &self.form.loss {
            LossRows::Off => return Ok(false),
            LossRows::Lambda => sol.lambda.clone(),
            LossRows::Bound(b) => b.clone(),
        };
        let support: Vec<(Vec<usize>, Rational)> = self
            .active
            .iter()
            .zip(&sol.x)
            .filter(|(_, v)| v.is_positive())
            .map(|(&j, v)| (self.columns[j].sorted_classes().to_vec(), v.clone()))
            .collect();
        let sizes = self.model.sizes();
        let max_pick: Vec<usize> = self.model.classes.iter().map(|c| c.max_pick).collect();
        let adj = |a: usize, b: usize| self.model.adjacent(a, b);
        let space = Space {
            sizes: &sizes,
            max_pick: &max_pick,
            adjacent: if self.form.use_compat { Some(&adj) } else { None },
            budget: self.form.budget,
            exact: self.form.exact,
        };
        let request = Request {
            threshold: Some(&threshold),
            keep: ROW_BATCH,
            break_ties: false,
            prune_at_threshold: true,
        };
        let out = search::search(&space, &support, &request, limits)?;
        let mut grew = false;
        for (profile, _) in out.violated {
            if self.seen.insert(profile.clone()) {
                self.profiles.push(profile);
                grew = true;
            }
        }
        Ok(grew)
    }

    fn finish(&self, sol: RoundSolution, feasible: bool) -> EngineResult {
        let flow = self
            .active
            .iter()
            .zip(&sol.x)
            .filter(|(_, v)| v.is_positive())
            .map(|(&j, v)| (j, v.clone()))
            .collect();
        EngineResult {
            feasible,
            value: sol.value,
            lambda: sol.lambda,
            flow,
            lp: sol.lp,
        }
    }
}
