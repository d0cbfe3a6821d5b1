//! Branch-and-bound over interdiction profiles.
//!
//! Arcs are grouped into classes; a profile picks `j` arcs out of a class of
//! size `n`. A flow is given by class paths with values, and a class path
//! survives a profile with probability `Π (1 - j/n)` over its classes, which
//! is the exact loss fraction of the uniformly spread explicit flow. Classes
//! of size one make this the plain loss functional.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::rational::Rational;

/// `(class, picks)` pairs sorted by class.
pub(crate) type Profile = Vec<(usize, usize)>;

pub(crate) struct Space<'a> {
    pub sizes: &'a [usize],
    /// Largest number of picks per class; zero for immune classes.
    pub max_pick: &'a [usize],
    /// Whether two distinct classes may be picked together.
    pub adjacent: Option<&'a dyn Fn(usize, usize) -> bool>,
    pub budget: usize,
    /// Only profiles with exactly `budget` picks count.
    pub exact: bool,
}

pub(crate) struct Outcome {
    pub best: Option<(Profile, Rational)>,
    /// Profiles whose loss exceeds the threshold, most violated first.
    pub violated: Vec<(Profile, Rational)>,
}

pub(crate) struct Request<'a> {
    pub threshold: Option<&'a Rational>,
    /// Keep at most this many violated profiles.
    pub keep: usize,
    /// Resolve ties toward the smallest profile key instead of pruning them.
    pub break_ties: bool,
    /// Stop exploring subtrees that cannot beat the threshold.
    pub prune_at_threshold: bool,
}

/// Loss of `profile` against the class-path flow `support`.
#[cfg(test)]
pub(crate) fn profile_loss(sizes: &[usize], support: &[(Vec<usize>, Rational)], profile: &Profile) -> Rational {
    let mut total = Rational::zero();
    for (classes, value) in support {
        let survive = survival(sizes, classes, profile);
        total += value * (Rational::one() - survive);
    }
    total
}

/// `Π (1 - j/n)` over the classes of `classes` picked in `profile`.
#[cfg(test)]
pub(crate) fn survival(sizes: &[usize], classes: &[usize], profile: &Profile) -> Rational {
    let mut survive = Rational::one();
    for &(c, j) in profile {
        if classes.contains(&c) {
            if j >= sizes[c] {
                return Rational::zero();
            }
            survive *= Rational::one() - Rational::from(j) / Rational::from(sizes[c]);
        }
    }
    survive
}

/// Ordering used for deterministic tie-breaking: fewer picks first, then the
/// expanded class sequence lexicographically.
pub(crate) fn profile_key_cmp(a: &Profile, b: &Profile) -> Ordering {
    let size = |p: &Profile| p.iter().map(|(_, j)| j).sum::<usize>();
    let expand = |p: &Profile| -> Vec<usize> { p.iter().flat_map(|&(c, j)| std::iter::repeat_n(c, j)).collect() };
    size(a).cmp(&size(b)).then_with(|| expand(a).cmp(&expand(b)))
}

struct State<'a> {
    space: &'a Space<'a>,
    support: &'a [(Vec<usize>, Rational)],
    /// Support columns through each class.
    through: Vec<Vec<usize>>,
    order: Vec<usize>,
    rate: Vec<Rational>,
    survive: Vec<Rational>,
    chosen: Profile,
    picks: usize,
    loss: Rational,
    request: &'a Request<'a>,
    best: Option<(Profile, Rational)>,
    violated: Vec<(Profile, Rational)>,
    visited: usize,
    limit: usize,
}

pub(crate) fn search(
    space: &Space<'_>,
    support: &[(Vec<usize>, Rational)],
    request: &Request<'_>,
    limits: &Limits,
) -> Result<Outcome> {
    let nclasses = space.sizes.len();
    let mut through = vec![Vec::new(); nclasses];
    let mut load = vec![Rational::zero(); nclasses];
    for (p, (classes, value)) in support.iter().enumerate() {
        for &c in classes {
            through[c].push(p);
            load[c] += value;
        }
    }
    let rate: Vec<Rational> = (0..nclasses)
        .map(|c| &load[c] / &Rational::from(space.sizes[c].max(1)))
        .collect();
    let mut order: Vec<usize> = (0..nclasses).filter(|&c| space.max_pick[c] > 0).collect();
    order.sort_by(|&a, &b| rate[b].cmp(&rate[a]).then(a.cmp(&b)));
    let mut state = State {
        space,
        support,
        through,
        order,
        rate,
        survive: vec![Rational::one(); support.len()],
        chosen: Vec::new(),
        picks: 0,
        loss: Rational::zero(),
        request,
        best: None,
        violated: Vec::new(),
        visited: 0,
        limit: limits.max_search_nodes,
    };
    state.dfs(0)?;
    let mut violated = state.violated;
    violated.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| profile_key_cmp(&a.0, &b.0)));
    violated.truncate(request.keep);
    Ok(Outcome {
        best: state.best,
        violated,
    })
}

impl State<'_> {
    fn compatible(&self, c: usize) -> bool {
        match self.space.adjacent {
            None => true,
            Some(adj) => self.chosen.iter().all(|&(d, _)| adj(c, d)),
        }
    }

    fn consider(&mut self) {
        if self.space.exact && self.picks != self.space.budget {
            return;
        }
        let mut profile = self.chosen.clone();
        profile.sort_unstable();
        if let Some(t) = self.request.threshold {
            if self.loss > *t {
                self.violated.push((profile.clone(), self.loss.clone()));
                if self.violated.len() > 4 * self.request.keep.max(1) {
                    self.violated
                        .sort_by(|a, b| b.1.cmp(&a.1).then_with(|| profile_key_cmp(&a.0, &b.0)));
                    self.violated.truncate(self.request.keep.max(1));
                }
            }
        }
        let replace = match &self.best {
            None => true,
            Some((bp, bl)) => {
                self.loss > *bl
                    || (self.request.break_ties && self.loss == *bl && profile_key_cmp(&profile, bp) == Ordering::Less)
            }
        };
        if replace {
            self.best = Some((profile, self.loss.clone()));
        }
    }

    /// Upper bound on the loss reachable from here using classes at
    /// positions `from..`, or `None` when an exact budget cannot be filled.
    fn bound(&self, from: usize) -> Option<Rational> {
        let mut left = self.space.budget - self.picks;
        let mut ub = self.loss.clone();
        for &c in &self.order[from..] {
            if left == 0 {
                break;
            }
            if !self.compatible(c) {
                continue;
            }
            let take = self.space.max_pick[c].min(left);
            ub += &self.rate[c] * &Rational::from(take);
            left -= take;
        }
        if self.space.exact && left > 0 {
            return None;
        }
        Some(ub)
    }

    fn hopeless(&self, ub: &Rational) -> bool {
        if self.request.prune_at_threshold {
            if let Some(t) = self.request.threshold {
                if ub <= t {
                    return true;
                }
            }
        }
        match &self.best {
            None => false,
            Some((_, bl)) if self.request.break_ties => ub < bl,
            Some((_, bl)) => ub <= bl,
        }
    }

    fn dfs(&mut self, from: usize) -> Result<()> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(Error::resource("scenario search nodes", self.limit));
        }
        self.consider();
        if self.picks == self.space.budget {
            return Ok(());
        }
        match self.bound(from) {
            None => return Ok(()),
            Some(ub) if self.hopeless(&ub) => return Ok(()),
            Some(_) => {}
        }
        for pos in from..self.order.len() {
            let c = self.order[pos];
            if !self.compatible(c) {
                continue;
            }
            let most = self.space.max_pick[c].min(self.space.budget - self.picks);
            for j in (1..=most).rev() {
                let saved = self.apply(c, j);
                self.dfs(pos + 1)?;
                self.undo(c, j, saved);
            }
        }
        Ok(())
    }

    fn apply(&mut self, c: usize, j: usize) -> (Rational, Vec<Rational>) {
        let n = self.space.sizes[c];
        let keep = if j >= n {
            Rational::zero()
        } else {
            Rational::one() - Rational::from(j) / Rational::from(n)
        };
        let lost = Rational::one() - &keep;
        let old_loss = self.loss.clone();
        let mut saved = Vec::with_capacity(self.through[c].len());
        for &p in &self.through[c] {
            let s = &self.survive[p];
            saved.push(s.clone());
            if s.is_zero() {
                continue;
            }
            self.loss += &self.support[p].1 * s * &lost;
            let next = s * &keep;
            self.survive[p] = next;
        }
        self.chosen.push((c, j));
        self.picks += j;
        (old_loss, saved)
    }

    fn undo(&mut self, c: usize, j: usize, saved: (Rational, Vec<Rational>)) {
        let (old_loss, values) = saved;
        for (&p, v) in self.through[c].iter().zip(values) {
            self.survive[p] = v;
        }
        self.loss = old_loss;
        self.chosen.pop();
        self.picks -= j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn finds_max_pair_on_unit_classes() {
        let sizes = [1, 1, 1];
        let picks = [1, 1, 1];
        let space = Space {
            sizes: &sizes,
            max_pick: &picks,
            adjacent: None,
            budget: 2,
            exact: true,
        };
        let support = vec![(vec![0, 1], r(3)), (vec![2], r(2))];
        let req = Request {
            threshold: None,
            keep: 0,
            break_ties: true,
            prune_at_threshold: false,
        };
        let out = search(&space, &support, &req, &Limits::default()).unwrap();
        let (profile, loss) = out.best.unwrap();
        assert_eq!(loss, r(5));
        assert_eq!(profile, vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn class_picks_spread_uniformly() {
        // One class of two parallel arcs carrying 2 units in total.
        let sizes = [2];
        let picks = [2];
        let support = vec![(vec![0], r(2))];
        let p1: Profile = vec![(0, 1)];
        assert_eq!(profile_loss(&sizes, &support, &p1), r(1));
        let space = Space {
            sizes: &sizes,
            max_pick: &picks,
            adjacent: None,
            budget: 1,
            exact: false,
        };
        let req = Request {
            threshold: Some(&Rational::zero()),
            keep: 3,
            break_ties: false,
            prune_at_threshold: true,
        };
        let out = search(&space, &support, &req, &Limits::default()).unwrap();
        assert_eq!(out.best.unwrap().1, r(1));
        assert_eq!(out.violated.len(), 1);
    }

    #[test]
    fn adjacency_restricts_pairs() {
        let sizes = [1, 1, 1];
        let picks = [1, 1, 1];
        let adj = |a: usize, b: usize| (a.min(b), a.max(b)) == (1, 2);
        let space = Space {
            sizes: &sizes,
            max_pick: &picks,
            adjacent: Some(&adj),
            budget: 2,
            exact: false,
        };
        let support = vec![(vec![0], r(5)), (vec![1], r(2)), (vec![2], r(2))];
        let req = Request {
            threshold: None,
            keep: 0,
            break_ties: true,
            prune_at_threshold: false,
        };
        let out = search(&space, &support, &req, &Limits::default()).unwrap();
        assert_eq!(out.best.unwrap(), (vec![(0, 1)], r(5)));
    }
}
