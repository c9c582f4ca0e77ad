use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::modular::{bot_symbol, build_projection_rules, pair_symbol, SplitSpec};
use crate::rewrite::Rewriter;
use crate::term::{Abs, ComputationSystem, MetaTerm, MolType, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    /// Exploration hit its node budget before deciding.
    #[error("budget exhausted after {0} terms")]
    BudgetExhausted(usize),
    /// `t` reaches a cycle, so the trace is undefined.
    #[error("{0} is not strongly normalising")]
    Undefined(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LabBudget {
    /// Terms explored per reachability set.
    pub reach_nodes: usize,
    /// Nodes visited by one goal-directed search.
    pub search_nodes: usize,
    /// Nesting depth of goal-directed searches.
    pub search_depth: usize,
}

impl Default for LabBudget {
    fn default() -> Self {
        LabBudget { reach_nodes: 4000, search_nodes: 200_000, search_depth: 24 }
    }
}

/// `<t1,<t2,...<tn,bot>..>>` with elements sorted by [`MetaTerm::shape_cmp`].
pub fn tuple_of_set(terms: &[Term], b: &MolType) -> Term {
    let mut v: Vec<Term> = terms.to_vec();
    v.sort_by(|a, b| a.shape_cmp(b));
    v.dedup();
    let mut acc = MetaTerm::constant(&bot_symbol(b));
    for t in v.into_iter().rev() {
        acc = MetaTerm::app(&pair_symbol(b), vec![t, acc]);
    }
    acc
}

/// Elements of a tuple built by [`tuple_of_set`].
pub fn tuple_elements(t: &Term, b: &MolType) -> Option<Vec<Term>> {
    let pair = pair_symbol(b);
    let bot = bot_symbol(b);
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            MetaTerm::Fun(f, args) if **f == *bot && args.is_empty() => return Some(out),
            MetaTerm::Fun(f, args) if **f == *pair && args.len() == 2 => {
                out.push(args[0].body.clone());
                cur = &args[1].body;
            }
            _ => return None,
        }
    }
}

/// Shared context of the labelling harness: the system, its split and
/// `A + Proj` with projections at every result type of a defined symbol.
pub struct Lab<'a> {
    pub cs: &'a ComputationSystem,
    pub split: &'a SplitSpec,
    pub a_proj: ComputationSystem,
    pub budget: LabBudget,
    memo: RefCell<HashMap<Term, Result<Term, TraceError>>>,
}

impl<'a> Lab<'a> {
    pub fn new(cs: &'a ComputationSystem, split: &'a SplitSpec) -> Self {
        Self::with_budget(cs, split, LabBudget::default())
    }

    pub fn with_budget(cs: &'a ComputationSystem, split: &'a SplitSpec, budget: LabBudget) -> Self {
        let types: BTreeSet<MolType> =
            split.sigma_a.iter().chain(&split.sigma_b).filter_map(|f| cs.signature.get(f)).map(|t| t.result.clone()).collect();
        let (ext, proj) = build_projection_rules(&types, &cs.signature).expect("projection names are reserved");
        let mut rules = split.rules_a.clone();
        rules.extend(proj);
        let a_proj = ComputationSystem::new(cs.signature.merged(&ext), rules).expect("A rules and projections have distinct names");
        Lab { cs, split, a_proj, budget, memo: RefCell::new(HashMap::new()) }
    }

    pub fn is_b(&self, f: &str) -> bool {
        self.split.sigma_b.contains(f)
    }

    pub fn is_a(&self, f: &str) -> bool {
        self.split.sigma_a.contains(f)
    }

    /// All `u` with `t ->+ u`, or an error when `t` is not SN within budget.
    pub fn reachable(&self, t: &Term) -> Result<Vec<Term>, TraceError> {
        let rw = Rewriter::new(self.cs);
        let mut index: HashMap<Term, usize> = HashMap::new();
        let mut nodes: Vec<Term> = vec![t.clone()];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new()];
        index.insert(t.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let reducts = rw.reducts(&nodes[i]);
            for u in reducts {
                let j = match index.get(&u) {
                    Some(&j) => j,
                    None => {
                        if nodes.len() >= self.budget.reach_nodes {
                            return Err(TraceError::BudgetExhausted(nodes.len()));
                        }
                        let j = nodes.len();
                        index.insert(u.clone(), j);
                        nodes.push(u);
                        succ.push(Vec::new());
                        queue.push_back(j);
                        j
                    }
                };
                succ[i].push(j);
            }
        }
        if has_cycle(&succ) {
            return Err(TraceError::Undefined(t.to_string()));
        }
        Ok(nodes.into_iter().skip(1).collect())
    }

    /// The trace map.
    pub fn trace(&self, t: &Term) -> Result<Term, TraceError> {
        if let Some(r) = self.memo.borrow().get(t) {
            return r.clone();
        }
        let r = self.trace_uncached(t);
        self.memo.borrow_mut().insert(t.clone(), r.clone());
        r
    }

    fn trace_uncached(&self, t: &Term) -> Result<Term, TraceError> {
        match t {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) | MetaTerm::Meta(..) => Ok(t.clone()),
            MetaTerm::Fun(f, args) if self.is_b(f) => {
                let b = self.cs.signature.get(f).expect("declared symbol").result.clone();
                let mut elems = Vec::new();
                for u in self.reachable(t)? {
                    elems.push(self.trace(&u)?);
                }
                Ok(tuple_of_set(&elems, &b))
            }
            MetaTerm::Fun(f, args) => {
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    out.push(Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: self.trace(&a.body)? });
                }
                Ok(MetaTerm::Fun(f.clone(), out))
            }
        }
    }
}

fn has_cycle(succ: &[Vec<usize>]) -> bool {
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; succ.len()];
    for s in 0..succ.len() {
        if state[s] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        state[s] = 1;
        while let Some((n, k)) = stack.pop() {
            if k < succ[n].len() {
                stack.push((n, k + 1));
                let m = succ[n][k];
                match state[m] {
                    0 => {
                        state[m] = 1;
                        stack.push((m, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                state[n] = 2;
            }
        }
    }
    false
}
