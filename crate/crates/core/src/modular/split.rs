use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{ComputationSystem, MetaTerm, Name, Rule};

/// Partition of a system into an A-part and a B-part over shared
/// constructors `theta`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitSpec {
    pub sigma_a: BTreeSet<Name>,
    pub sigma_b: BTreeSet<Name>,
    pub theta: BTreeSet<Name>,
    pub rules_a: Vec<Rule>,
    pub rules_b: Vec<Rule>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvalidSplit {
    #[error("unknown rule ({0}) in split")]
    UnknownRule(String),
    #[error("rule ({0}) is in both parts")]
    Overlap(String),
    #[error("rule ({0}) is in neither part")]
    Missing(String),
    #[error("{0} is defined in both parts")]
    SharedDefined(String),
    #[error("rule ({rule}) of A mentions B-defined symbol {symbol}")]
    AMentionsB { rule: String, symbol: String },
}

impl SplitSpec {
    pub fn new(cs: &ComputationSystem, rules_a: Vec<Rule>, rules_b: Vec<Rule>) -> SplitSpec {
        let sigma_a: BTreeSet<Name> = rules_a.iter().map(|r| r.head().clone()).collect();
        let sigma_b: BTreeSet<Name> = rules_b.iter().map(|r| r.head().clone()).collect();
        let theta = cs.signature.names().filter(|f| !sigma_a.contains(*f) && !sigma_b.contains(*f)).cloned().collect();
        SplitSpec { sigma_a, sigma_b, theta, rules_a, rules_b }
    }

    /// Split by rule names; every rule must land in exactly one part.
    pub fn from_rule_names(cs: &ComputationSystem, a: &[Name], b: &[Name]) -> Result<SplitSpec, InvalidSplit> {
        let mut rules_a = Vec::new();
        let mut rules_b = Vec::new();
        for n in a.iter().chain(b) {
            if cs.rule(n).is_none() {
                return Err(InvalidSplit::UnknownRule(n.to_string()));
            }
            if a.contains(n) && b.contains(n) {
                return Err(InvalidSplit::Overlap(n.to_string()));
            }
        }
        for r in &cs.rules {
            if a.contains(&r.name) {
                rules_a.push(r.clone());
            } else if b.contains(&r.name) {
                rules_b.push(r.clone());
            } else {
                return Err(InvalidSplit::Missing(r.name.to_string()));
            }
        }
        let s = SplitSpec::new(cs, rules_a, rules_b);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), InvalidSplit> {
        if let Some(f) = self.sigma_a.intersection(&self.sigma_b).next() {
            return Err(InvalidSplit::SharedDefined(f.to_string()));
        }
        for r in &self.rules_a {
            if let Some(s) = r.fun_symbols().iter().find(|s| self.sigma_b.contains(*s)) {
                return Err(InvalidSplit::AMentionsB { rule: r.name.to_string(), symbol: s.to_string() });
            }
        }
        Ok(())
    }

    pub fn a_system(&self, cs: &ComputationSystem) -> ComputationSystem {
        cs.with_rules(self.rules_a.clone())
    }

    pub fn b_system(&self, cs: &ComputationSystem) -> ComputationSystem {
        cs.with_rules(self.rules_b.clone())
    }

    pub fn rule_names_a(&self) -> Vec<Name> {
        self.rules_a.iter().map(|r| r.name.clone()).collect()
    }

    pub fn rule_names_b(&self) -> Vec<Name> {
        self.rules_b.iter().map(|r| r.name.clone()).collect()
    }
}

fn show_set(s: &BTreeSet<Name>) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ra: Vec<String> = self.rules_a.iter().map(|r| format!("({})", r.name)).collect();
        let rb: Vec<String> = self.rules_b.iter().map(|r| format!("({})", r.name)).collect();
        write!(f, "A = {{{}}} over {{{}}}, B = {{{}}} over {{{}}}", ra.join(", "), show_set(&self.sigma_a), rb.join(", "), show_set(&self.sigma_b))
    }
}

fn first_order_meta_term(t: &MetaTerm) -> bool {
    match t {
        MetaTerm::BVar(_) | MetaTerm::FVar(_) => true,
        MetaTerm::Meta(_, args) => args.is_empty(),
        MetaTerm::Fun(_, args) => args.iter().all(|a| a.binders.is_empty() && first_order_meta_term(&a.body)),
    }
}

/// Binder-free rule with nullary metavariables only.
pub fn is_first_order_rule(r: &Rule) -> bool {
    first_order_meta_term(&r.lhs) && first_order_meta_term(&r.rhs)
}

/// Largest set of first-order rules with first-order heads that mention
/// no symbol defined by the remaining rules.
pub fn split_fo_ho(cs: &ComputationSystem) -> SplitSpec {
    let mut in_a: Vec<bool> = cs
        .rules
        .iter()
        .map(|r| cs.signature.get(r.head()).is_some_and(|t| t.is_first_order()) && is_first_order_rule(r))
        .collect();
    loop {
        let sigma_b: BTreeSet<Name> = cs.rules.iter().zip(&in_a).filter(|(_, a)| !**a).map(|(r, _)| r.head().clone()).collect();
        let mut changed = false;
        for (r, a) in cs.rules.iter().zip(in_a.iter_mut()) {
            if *a && r.fun_symbols().iter().any(|s| sigma_b.contains(s)) {
                *a = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let rules_a = cs.rules.iter().zip(&in_a).filter(|(_, a)| **a).map(|(r, _)| r.clone()).collect();
    let rules_b = cs.rules.iter().zip(&in_a).filter(|(_, a)| !**a).map(|(r, _)| r.clone()).collect();
    SplitSpec::new(cs, rules_a, rules_b)
}
