use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::matching::match_second_order;
use crate::term::{substitute_metavars, Assignment, ComputationSystem, MetaTerm, Name, Position, Term};

/// A rule instance found at a position of a subject term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Redex {
    pub position: Position,
    pub rule: Name,
    pub assignment: Assignment,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.position.is_empty() {
            write!(f, "({}) at root", self.rule)
        } else {
            let p: Vec<String> = self.position.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({}) at {}", self.rule, p.join("."))
        }
    }
}

/// Rules indexed by head symbol.
#[derive(Clone, Debug)]
pub struct Rewriter<'a> {
    pub cs: &'a ComputationSystem,
    by_head: HashMap<Name, Vec<usize>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(cs: &'a ComputationSystem) -> Self {
        let mut by_head: HashMap<Name, Vec<usize>> = HashMap::new();
        for (i, r) in cs.rules.iter().enumerate() {
            by_head.entry(r.head().clone()).or_default().push(i);
        }
        Rewriter { cs, by_head }
    }

    /// Rule instances rooted at `t`, in rule order.
    pub fn root_matches(&self, t: &Term) -> Vec<(usize, Assignment)> {
        let MetaTerm::Fun(f, _) = t else { return Vec::new() };
        let Some(rs) = self.by_head.get(f) else { return Vec::new() };
        let mut out = Vec::new();
        for &i in rs {
            let r = &self.cs.rules[i];
            if let Ok(Some(theta)) = match_second_order(&r.lhs, t, &r.context) {
                out.push((i, theta));
            }
        }
        out
    }

    /// Contractum of rule `i` under `theta`, relative to the redex site.
    pub fn contract(&self, i: usize, theta: &Assignment) -> Term {
        substitute_metavars(theta, &self.cs.rules[i].rhs).expect("matching binds every metavariable of the lhs")
    }

    /// All one-step reducts with their redexes, positions in pre-order and
    /// rules in declaration order.
    pub fn one_step_reducts(&self, t: &Term) -> Vec<(Redex, Term)> {
        let mut out = Vec::new();
        for pos in t.positions() {
            let (sub, _) = t.at(&pos).expect("position from positions()");
            for (i, theta) in self.root_matches(sub) {
                let c = self.contract(i, &theta);
                let u = t.replace_at(&pos, c);
                out.push((Redex { position: pos.clone(), rule: self.cs.rules[i].name.clone(), assignment: theta }, u));
            }
        }
        out
    }

    pub fn reducts(&self, t: &Term) -> Vec<Term> {
        self.one_step_reducts(t).into_iter().map(|(_, u)| u).collect()
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        t.positions().iter().all(|p| self.root_matches(t.at(p).unwrap().0).is_empty())
    }

    /// One step by the given strategy.
    pub fn step(&self, t: &Term, strategy: Strategy) -> Option<(Redex, Term)> {
        let positions = match strategy {
            Strategy::Outermost => t.positions(),
            Strategy::Innermost => innermost_order(t),
        };
        for pos in positions {
            let (sub, _) = t.at(&pos).unwrap();
            if let Some((i, theta)) = self.root_matches(sub).into_iter().next() {
                let c = self.contract(i, &theta);
                let u = t.replace_at(&pos, c);
                return Some((Redex { position: pos, rule: self.cs.rules[i].name.clone(), assignment: theta }, u));
            }
        }
        None
    }

    pub fn normalize(&self, t: &Term, fuel: usize, strategy: Strategy) -> Result<Normalized, BudgetExhausted> {
        let mut cur = t.clone();
        let mut steps = 0;
        while let Some((_, u)) = self.step(&cur, strategy) {
            if steps == fuel {
                return Err(BudgetExhausted { fuel, last: cur });
            }
            steps += 1;
            cur = u;
        }
        Ok(Normalized { term: cur, steps })
    }
}

/// Positions with children before parents, siblings left to right.
fn innermost_order(t: &Term) -> Vec<Position> {
    let mut ps = t.positions();
    // post-order: a position comes after all of its extensions
    ps.sort_by(|a, b| {
        let n = a.len().min(b.len());
        match a[..n].cmp(&b[..n]) {
            std::cmp::Ordering::Equal => b.len().cmp(&a.len()),
            o => o,
        }
    });
    ps
}

/// Reduction strategy used by [`normalize`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Strategy {
    #[default]
    Outermost,
    Innermost,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Normalized {
    pub term: Term,
    pub steps: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step budget of {fuel} exhausted")]
pub struct BudgetExhausted {
    pub fuel: usize,
    pub last: Term,
}

pub fn one_step_reducts(cs: &ComputationSystem, t: &Term) -> Vec<(Redex, Term)> {
    Rewriter::new(cs).one_step_reducts(t)
}

/// Leftmost-outermost normalization within `fuel` steps.
pub fn normalize(cs: &ComputationSystem, t: &Term, fuel: usize) -> Result<Term, BudgetExhausted> {
    Rewriter::new(cs).normalize(t, fuel, Strategy::Outermost).map(|n| n.term)
}
