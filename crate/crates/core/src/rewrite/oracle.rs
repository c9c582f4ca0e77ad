use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use super::step::{Redex, Rewriter};
use crate::gen;
use crate::term::{ComputationSystem, Position, Term};

/// Exploration limits: the longest reduction explored and the number of
/// distinct terms visited.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Budget {
    pub depth: usize,
    pub width: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { depth: 8, width: 10_000 }
    }
}

/// One step of a witness: `from` rewrites to `to` by `redex`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessStep {
    pub from: Term,
    pub redex: Redex,
    pub to: Term,
}

/// A non-terminating reduction `t ->+ C[t]` (a cycle when `C` is empty).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopWitness {
    pub steps: Vec<WitnessStep>,
    /// Position of the embedded copy of the first term in the last term.
    pub embedding: Position,
}

impl LoopWitness {
    pub fn start(&self) -> &Term {
        &self.steps[0].from
    }

    pub fn end(&self) -> &Term {
        &self.steps.last().expect("witness has at least one step").to
    }

    pub fn is_cycle(&self) -> bool {
        self.embedding.is_empty()
    }

    /// Re-checks every step against the rewrite relation and the embedding.
    pub fn replay(&self, cs: &ComputationSystem) -> bool {
        if self.steps.is_empty() {
            return false;
        }
        let rw = Rewriter::new(cs);
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 && self.steps[i - 1].to != s.from {
                return false;
            }
            let ok = rw.one_step_reducts(&s.from).into_iter().any(|(r, u)| r == s.redex && u == s.to);
            if !ok {
                return false;
            }
        }
        matches!(self.end().at(&self.embedding), Some((sub, _)) if sub == self.start())
    }
}

impl fmt::Display for LoopWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start())?;
        for s in &self.steps {
            write!(f, " -> {} [{}]", s.to, s.redex)?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OracleResult {
    /// Every reduction from every seed terminates; `max_depth` is the
    /// longest one and `nodes` the number of distinct terms seen.
    SN { max_depth: usize, nodes: usize },
    NonSN(LoopWitness),
    Unknown { reason: String },
}

impl OracleResult {
    pub fn is_sn(&self) -> bool {
        matches!(self, OracleResult::SN { .. })
    }
}

/// Exhaustive exploration of the reduction graphs of `seeds`.
pub fn sn_oracle(cs: &ComputationSystem, seeds: &[Term], budget: Budget) -> OracleResult {
    let rw = Rewriter::new(cs);
    let mut longest: HashMap<Term, usize> = HashMap::new();
    let mut exhausted: Option<String> = None;
    let mut max_depth = 0;
    for seed in seeds {
        match explore(&rw, seed, budget, &mut longest) {
            Explore::Done(d) => max_depth = max_depth.max(d),
            Explore::Cycle(w) => return OracleResult::NonSN(w),
            Explore::Budget(reason) => {
                exhausted.get_or_insert(reason);
            }
        }
    }
    match exhausted {
        Some(reason) => OracleResult::Unknown { reason },
        None => OracleResult::SN { max_depth, nodes: longest.len() },
    }
}

enum Explore {
    Done(usize),
    Cycle(LoopWitness),
    Budget(String),
}

struct Frame {
    term: Term,
    succ: Vec<(Redex, Term)>,
    next: usize,
    best: usize,
}

fn explore(rw: &Rewriter<'_>, seed: &Term, budget: Budget, longest: &mut HashMap<Term, usize>) -> Explore {
    if let Some(d) = longest.get(seed) {
        return Explore::Done(*d);
    }
    let mut on_path: HashSet<Term> = HashSet::new();
    on_path.insert(seed.clone());
    let mut stack = vec![Frame { term: seed.clone(), succ: rw.one_step_reducts(seed), next: 0, best: 0 }];
    let mut hit_budget: Option<String> = None;
    while let Some(top) = stack.last_mut() {
        if top.next < top.succ.len() {
            let (_, u) = top.succ[top.next].clone();
            top.next += 1;
            if let Some(d) = longest.get(&u) {
                top.best = top.best.max(d + 1);
                continue;
            }
            if on_path.contains(&u) {
                return Explore::Cycle(cycle_witness(&stack, &u));
            }
            if stack.len() > budget.depth {
                hit_budget.get_or_insert_with(|| format!("depth budget {} reached", budget.depth));
                continue;
            }
            if longest.len() + stack.len() >= budget.width {
                return Explore::Budget(format!("width budget {} reached", budget.width));
            }
            on_path.insert(u.clone());
            let succ = rw.one_step_reducts(&u);
            stack.push(Frame { term: u, succ, next: 0, best: 0 });
        } else {
            let f = stack.pop().unwrap();
            on_path.remove(&f.term);
            longest.insert(f.term, f.best);
            if let Some(parent) = stack.last_mut() {
                parent.best = parent.best.max(f.best + 1);
            } else {
                return match hit_budget {
                    Some(r) => Explore::Budget(r),
                    None => Explore::Done(f.best),
                };
            }
        }
    }
    unreachable!("the seed frame returns")
}

fn cycle_witness(stack: &[Frame], repeated: &Term) -> LoopWitness {
    let start = stack.iter().position(|f| &f.term == repeated).expect("repeated term is on the path");
    let mut steps = Vec::new();
    for i in start..stack.len() {
        let f = &stack[i];
        let (redex, to) = f.succ[f.next - 1].clone();
        steps.push(WitnessStep { from: f.term.clone(), redex, to });
    }
    LoopWitness { steps, embedding: Vec::new() }
}

/// Searches lhs ground instances up to `seed_depth` for a reduction
/// `t ->+ C[t]` of at most `step_budget` steps.
pub fn find_loop(cs: &ComputationSystem, seed_depth: usize, step_budget: usize) -> Option<LoopWitness> {
    let seeds = gen::lhs_instances(cs, seed_depth, gen::DEFAULT_CAP);
    find_loop_from(cs, &seeds, step_budget, 20_000)
}

/// Breadth-first loop search from the given seeds, visiting at most
/// `max_nodes` terms per seed.
pub fn find_loop_from(cs: &ComputationSystem, seeds: &[Term], step_budget: usize, max_nodes: usize) -> Option<LoopWitness> {
    let rw = Rewriter::new(cs);
    for seed in seeds {
        // node: (term, parent index, redex from parent, depth)
        let mut nodes: Vec<(Term, Option<usize>, Option<Redex>, usize)> = vec![(seed.clone(), None, None, 0)];
        let mut seen: HashSet<Term> = HashSet::new();
        seen.insert(seed.clone());
        let mut queue = VecDeque::from([0usize]);
        while let Some(n) = queue.pop_front() {
            let depth = nodes[n].3;
            if depth >= step_budget {
                continue;
            }
            let term = nodes[n].0.clone();
            for (redex, u) in rw.one_step_reducts(&term) {
                nodes.push((u.clone(), Some(n), Some(redex), depth + 1));
                let id = nodes.len() - 1;
                if let Some(w) = embedding_witness(&nodes, id) {
                    return Some(w);
                }
                if seen.insert(u) && nodes.len() < max_nodes {
                    queue.push_back(id);
                }
            }
        }
    }
    None
}

/// Checks whether the last node embeds one of its ancestors.
fn embedding_witness(nodes: &[(Term, Option<usize>, Option<Redex>, usize)], id: usize) -> Option<LoopWitness> {
    let u = &nodes[id].0;
    let mut chain = vec![id];
    let mut cur = nodes[id].1;
    while let Some(a) = cur {
        chain.push(a);
        let anc = &nodes[a].0;
        if let Some(pos) = find_subterm(u, anc) {
            chain.reverse();
            let steps = chain
                .windows(2)
                .map(|w| WitnessStep {
                    from: nodes[w[0]].0.clone(),
                    redex: nodes[w[1]].2.clone().expect("non-root node has a redex"),
                    to: nodes[w[1]].0.clone(),
                })
                .collect();
            return Some(LoopWitness { steps, embedding: pos });
        }
        cur = nodes[a].1;
    }
    None
}

/// Position of a closed occurrence of `needle` in `hay`, pre-order.
fn find_subterm(hay: &Term, needle: &Term) -> Option<Position> {
    hay.positions().into_iter().find(|p| hay.at(p).map(|(s, _)| s == needle).unwrap_or(false))
}
