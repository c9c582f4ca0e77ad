use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use super::trace::{Lab, TraceError};
use crate::modular::{check_a_layer, LayerViolation};
use crate::rewrite::Rewriter;
use crate::term::{instantiate, substitute_metavars_at, Abs, Assignment, MetaTerm, MolType, Name, Position, Rule, Term};

/// Meta-term whose A-symbols may carry a label term.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum LTerm {
    BVar(usize),
    FVar(Name),
    Meta(Name, Vec<LTerm>),
    Fun(Name, Option<Term>, Vec<LAbs>),
}

#[derive(Clone, Debug)]
pub struct LAbs {
    pub binders: Vec<MolType>,
    pub hints: Vec<Name>,
    pub body: LTerm,
}

impl PartialEq for LAbs {
    fn eq(&self, other: &Self) -> bool {
        self.binders == other.binders && self.body == other.body
    }
}

impl Eq for LAbs {}

impl Hash for LAbs {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.binders.hash(state);
        self.body.hash(state);
    }
}

impl LTerm {
    /// Unlabelled copy of a meta-term.
    pub fn plain(t: &MetaTerm) -> LTerm {
        match t {
            MetaTerm::BVar(i) => LTerm::BVar(*i),
            MetaTerm::FVar(x) => LTerm::FVar(x.clone()),
            MetaTerm::Meta(m, args) => LTerm::Meta(m.clone(), args.iter().map(LTerm::plain).collect()),
            MetaTerm::Fun(f, args) => LTerm::Fun(
                f.clone(),
                None,
                args.iter().map(|a| LAbs { binders: a.binders.clone(), hints: a.hints.clone(), body: LTerm::plain(&a.body) }).collect(),
            ),
        }
    }

    pub fn label(&self) -> Option<&Term> {
        match self {
            LTerm::Fun(_, l, _) => l.as_ref(),
            _ => None,
        }
    }

    /// Labelled positions with their labels, in pre-order.
    pub fn labels(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        self.collect_labels(&mut Vec::new(), &mut out);
        out
    }

    fn collect_labels<'a>(&'a self, cur: &mut Position, out: &mut Vec<(Position, &'a Term)>) {
        match self {
            LTerm::Fun(_, l, args) => {
                if let Some(l) = l {
                    out.push((cur.clone(), l));
                }
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    a.body.collect_labels(cur, out);
                    cur.pop();
                }
            }
            LTerm::Meta(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    a.collect_labels(cur, out);
                    cur.pop();
                }
            }
            _ => {}
        }
    }

    pub fn at(&self, pos: &[usize]) -> Option<&LTerm> {
        let mut t = self;
        for &i in pos {
            t = match t {
                LTerm::Fun(_, _, args) => &args.get(i)?.body,
                LTerm::Meta(_, args) => args.get(i)?,
                _ => return None,
            };
        }
        Some(t)
    }

    pub fn replace_at(&self, pos: &[usize], new: LTerm) -> LTerm {
        match pos.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                LTerm::Fun(f, l, args) => {
                    let mut args = args.clone();
                    args[i].body = args[i].body.replace_at(rest, new);
                    LTerm::Fun(f.clone(), l.clone(), args)
                }
                LTerm::Meta(m, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, new);
                    LTerm::Meta(m.clone(), args)
                }
                _ => panic!("replace_at: position does not exist"),
            },
        }
    }

    pub fn with_label(&self, label: Option<Term>) -> LTerm {
        match self {
            LTerm::Fun(f, _, args) => LTerm::Fun(f.clone(), label, args.clone()),
            t => t.clone(),
        }
    }

    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, scope: &mut Vec<String>) -> fmt::Result {
        match self {
            LTerm::BVar(i) => match scope.len().checked_sub(i + 1) {
                Some(k) => write!(f, "{}", scope[k]),
                None => write!(f, "#{}", i - scope.len()),
            },
            LTerm::FVar(x) => write!(f, "{x}"),
            LTerm::Meta(m, args) => {
                write!(f, "{m}")?;
                if !args.is_empty() {
                    write!(f, "[")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        a.fmt_in(f, scope)?;
                    }
                    write!(f, "]")?;
                }
                Ok(())
            }
            LTerm::Fun(g, l, args) => {
                write!(f, "{g}")?;
                if let Some(l) = l {
                    write!(f, "{{{}}}", crate::term::print_in_scope(l, scope))?;
                }
                if args.is_empty() {
                    return Ok(());
                }
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    let base = scope.len();
                    for h in &a.hints {
                        let mut n = h.to_string();
                        while scope.contains(&n) {
                            n.push('\'');
                        }
                        write!(f, "{n}.")?;
                        scope.push(n);
                    }
                    a.body.fmt_in(f, scope)?;
                    scope.truncate(base);
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for LTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, &mut Vec::new())
    }
}

/// Deletes all labels.
pub fn forget(t: &LTerm) -> MetaTerm {
    match t {
        LTerm::BVar(i) => MetaTerm::BVar(*i),
        LTerm::FVar(x) => MetaTerm::FVar(x.clone()),
        LTerm::Meta(m, args) => MetaTerm::Meta(m.clone(), args.iter().map(forget).collect()),
        LTerm::Fun(f, _, args) => MetaTerm::Fun(
            f.clone(),
            args.iter().map(|a| Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: forget(&a.body) }).collect(),
        ),
    }
}

/// Labelled instance `lab_phi(lhs) -> lab_phi(rhs)` of a rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelledRule {
    pub rule: Name,
    pub lhs: LTerm,
    pub rhs: LTerm,
}

impl fmt::Display for LabelledRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {} -> {}", self.rule, self.lhs, self.rhs)
    }
}

/// One labelled step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LStep {
    Rule { rule: Name, position: Position },
    Decl { position: Position, from: Term, to: Term },
}

impl fmt::Display for LStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &Position| {
            if p.is_empty() {
                "root".to_string()
            } else {
                p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(".")
            }
        };
        match self {
            LStep::Rule { rule, position } => write!(f, "({rule}) at {}", show(position)),
            LStep::Decl { position, from, to } => write!(f, "decl at {}: {from} to {to}", show(position)),
        }
    }
}

/// Search step kinds for goal-directed reachability.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Reach {
    /// `->_{A+Proj}` only.
    Reduction,
    /// `->_{A+Proj}` or immediate subterm of the same type.
    ReductionOrSubterm,
}

impl<'a> Lab<'a> {
    /// Trace labelling: every A-node is labelled with its trace.
    pub fn trace_label(&self, t: &Term) -> Result<LTerm, TraceError> {
        Ok(match t {
            MetaTerm::BVar(i) => LTerm::BVar(*i),
            MetaTerm::FVar(x) => LTerm::FVar(x.clone()),
            MetaTerm::Meta(m, args) => {
                LTerm::Meta(m.clone(), args.iter().map(|a| self.trace_label(a)).collect::<Result<_, _>>()?)
            }
            MetaTerm::Fun(f, args) => {
                let label = if self.is_a(f) { Some(self.trace(t)?) } else { None };
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    out.push(LAbs { binders: a.binders.clone(), hints: a.hints.clone(), body: self.trace_label(&a.body)? });
                }
                LTerm::Fun(f.clone(), label, out)
            }
        })
    }

    /// `lab_phi` on both sides of `rule`.
    pub fn label_rule(&self, rule: &Rule, phi: &Assignment) -> Result<LabelledRule, LayerViolation> {
        check_a_layer(rule, &self.split.sigma_a, &self.split.theta)?;
        Ok(LabelledRule { rule: rule.name.clone(), lhs: self.lab_phi(phi, &rule.lhs, 0), rhs: self.lab_phi(phi, &rule.rhs, 0) })
    }

    fn lab_phi(&self, phi: &Assignment, t: &MetaTerm, depth: usize) -> LTerm {
        match t {
            MetaTerm::BVar(i) => LTerm::BVar(*i),
            MetaTerm::FVar(x) => LTerm::FVar(x.clone()),
            MetaTerm::Meta(m, args) => LTerm::Meta(m.clone(), args.iter().map(|a| self.lab_phi(phi, a, depth)).collect()),
            MetaTerm::Fun(f, args) => {
                let label = if self.is_a(f) { substitute_metavars_at(phi, t, depth).ok() } else { None };
                LTerm::Fun(
                    f.clone(),
                    label,
                    args.iter()
                        .map(|a| LAbs { binders: a.binders.clone(), hints: a.hints.clone(), body: self.lab_phi(phi, &a.body, depth + a.arity()) })
                        .collect(),
                )
            }
        }
    }

    /// Labelled substitution: labels of rule symbols are kept, metavariable
    /// instances are erased, substituted and trace-labelled again.
    pub fn lext(&self, theta: &Assignment, t: &LTerm) -> Result<LTerm, TraceError> {
        self.lext_at(theta, t, 0)
    }

    fn lext_at(&self, theta: &Assignment, t: &LTerm, depth: usize) -> Result<LTerm, TraceError> {
        Ok(match t {
            LTerm::BVar(_) | LTerm::FVar(_) => t.clone(),
            LTerm::Fun(f, l, args) => {
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    out.push(LAbs { binders: a.binders.clone(), hints: a.hints.clone(), body: self.lext_at(theta, &a.body, depth + a.binders.len())? });
                }
                LTerm::Fun(f.clone(), l.clone(), out)
            }
            LTerm::Meta(m, args) => {
                let mut plain = Vec::with_capacity(args.len());
                for a in args {
                    plain.push(forget(&self.lext_at(theta, a, depth)?));
                }
                match theta.get(m) {
                    Some(abs) => self.trace_label(&instantiate(&abs.body, &plain, depth))?,
                    None => LTerm::Meta(m.clone(), plain.iter().map(LTerm::plain).collect()),
                }
            }
        })
    }

    /// Labelled rule steps of `s` at every position.
    pub fn labelled_rule_steps(&self, s: &LTerm) -> Result<Vec<(LStep, LTerm)>, TraceError> {
        let rw = Rewriter::new(self.cs);
        let plain = forget(s);
        let mut out = Vec::new();
        for pos in plain.positions() {
            let (sub, _) = plain.at(&pos).expect("position from positions()");
            let lsub = s.at(&pos).expect("same shape");
            for (i, theta) in rw.root_matches(sub) {
                let rule = &self.cs.rules[i];
                let mut phi = Assignment::new();
                for (m, a) in theta.iter() {
                    phi.insert(m.clone(), Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: self.trace(&a.body)? });
                }
                let Ok(lr) = self.label_rule(rule, &phi) else { continue };
                if self.lext(&theta, &lr.lhs)? == *lsub {
                    let c = self.lext(&theta, &lr.rhs)?;
                    out.push((LStep::Rule { rule: rule.name.clone(), position: pos.clone() }, s.replace_at(&pos, c)));
                }
            }
        }
        Ok(out)
    }

    /// One step of `->_{A+Proj}` or, with subterms, `|>` to a same-typed
    /// immediate subterm.
    fn label_successors(&self, v: &Term, ty: &MolType, kind: Reach) -> Vec<Term> {
        let rw = Rewriter::new(&self.a_proj);
        let mut out = rw.reducts(v);
        if kind == Reach::ReductionOrSubterm {
            if let MetaTerm::Fun(f, args) = v {
                if let Some(fty) = self.a_proj.signature.get(f) {
                    for (a, decl) in args.iter().zip(&fty.args) {
                        if decl.result == *ty {
                            if let Some(b) = a.body.unshift(a.arity(), 0) {
                                out.push(b);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The one-step labelled relation: rule steps plus one-step `Decl`
    /// relabellings.
    pub fn labelled_one_step(&self, s: &LTerm) -> Result<Vec<(LStep, LTerm)>, TraceError> {
        let mut out = self.labelled_rule_steps(s)?;
        for (pos, v) in s.labels() {
            let LTerm::Fun(f, _, _) = s.at(&pos).expect("labelled position") else { continue };
            let ty = self.cs.signature.get(f).expect("declared symbol").result.clone();
            for w in self.label_successors(v, &ty, Reach::ReductionOrSubterm) {
                let node = s.at(&pos).unwrap().with_label(Some(w.clone()));
                out.push((LStep::Decl { position: pos.clone(), from: v.clone(), to: w }, s.replace_at(&pos, node)));
            }
        }
        Ok(out)
    }

    /// `v (->_{A+Proj} u |>)+ w` for the only label where `t` and `u` differ.
    pub fn decl_step(&self, t: &LTerm, u: &LTerm) -> Result<bool, TraceError> {
        if forget(t) != forget(u) {
            return Ok(false);
        }
        let lt = t.labels();
        let lu = u.labels();
        if lt.len() != lu.len() {
            return Ok(false);
        }
        let diffs: Vec<_> = lt.iter().zip(&lu).filter(|(a, b)| a.1 != b.1).collect();
        let [((pos, v), (_, w))] = diffs.as_slice() else { return Ok(false) };
        let LTerm::Fun(f, _, _) = t.at(pos).expect("labelled position") else { return Ok(false) };
        let ty = self.cs.signature.get(f).expect("declared symbol").result.clone();
        Ok(self.reach(v, w, &ty, Reach::ReductionOrSubterm, true)?.is_some())
    }

    /// Path from `a` to `b` (inclusive) in A+Proj reduction, optionally
    /// with subterm steps; `strict` demands at least one step.
    fn reach(&self, a: &Term, b: &Term, ty: &MolType, kind: Reach, strict: bool) -> Result<Option<Vec<Term>>, TraceError> {
        let mut memo: HashMap<(Term, Term, bool), Option<Vec<Term>>> = HashMap::new();
        let mut visits = 0usize;
        let r = self.reach_rec(a, b, ty, kind, strict, 0, &mut memo, &mut visits);
        if r.is_none() && visits >= self.budget.search_nodes {
            return Err(TraceError::BudgetExhausted(visits));
        }
        Ok(r)
    }

    #[allow(clippy::too_many_arguments)]
    fn reach_rec(
        &self,
        a: &Term,
        b: &Term,
        ty: &MolType,
        kind: Reach,
        strict: bool,
        depth: usize,
        memo: &mut HashMap<(Term, Term, bool), Option<Vec<Term>>>,
        visits: &mut usize,
    ) -> Option<Vec<Term>> {
        if !strict && a == b {
            return Some(vec![a.clone()]);
        }
        if depth > self.budget.search_depth || *visits >= self.budget.search_nodes {
            return None;
        }
        let key = (a.clone(), b.clone(), strict);
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        memo.insert(key.clone(), None);
        *visits += 1;
        let mut found = None;
        // congruence: same head, argumentwise paths
        if let (MetaTerm::Fun(f, xs), MetaTerm::Fun(g, ys)) = (a, b) {
            if f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.binders == y.binders) && a != b {
                found = self.congruence(a, xs, ys, depth, memo, visits);
            }
        }
        if found.is_none() {
            for c in self.label_successors(a, ty, kind) {
                if let Some(mut rest) = self.reach_rec(&c, b, ty, kind, false, depth + 1, memo, visits) {
                    rest.insert(0, a.clone());
                    found = Some(rest);
                    break;
                }
            }
        }
        memo.insert(key, found.clone());
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn congruence(
        &self,
        a: &Term,
        xs: &[Abs],
        ys: &[Abs],
        depth: usize,
        memo: &mut HashMap<(Term, Term, bool), Option<Vec<Term>>>,
        visits: &mut usize,
    ) -> Option<Vec<Term>> {
        let MetaTerm::Fun(f, _) = a else { return None };
        let fty = self.a_proj.signature.get(f)?;
        let mut path = vec![a.clone()];
        let mut cur = a.clone();
        for (i, ((x, y), decl)) in xs.iter().zip(ys).zip(&fty.args).enumerate() {
            if x.body == y.body {
                continue;
            }
            // inside arguments only reductions are congruent
            let sub = self.reach_rec(&x.body, &y.body, &decl.result, Reach::Reduction, false, depth + 1, memo, visits)?;
            for s in sub.into_iter().skip(1) {
                cur = cur.replace_at(&[i], s);
                path.push(cur.clone());
            }
        }
        Some(path)
    }

    /// Simulates the one-step reduction `s -> t` in the labelled system.
    pub fn simulation_check(&self, s: &Term, t: &Term) -> Result<Simulation, SimulationError> {
        let rw = Rewriter::new(self.cs);
        if !rw.reducts(s).contains(t) {
            return Err(SimulationError::NotAStep);
        }
        let ls = self.trace_label(s)?;
        let lt = self.trace_label(t)?;
        let mut labelled = None;
        'steps: for (step, s1) in self.labelled_rule_steps(&ls)? {
            if forget(&s1) != forget(&lt) {
                continue;
            }
            let mut path = vec![(step, s1.clone())];
            let mut cur = s1.clone();
            let l1 = s1.labels();
            let l2 = lt.labels();
            if l1.len() != l2.len() || l1.iter().zip(&l2).any(|(a, b)| a.0 != b.0) {
                continue;
            }
            for ((pos, v), (_, w)) in l1.iter().zip(&l2) {
                if v == w {
                    continue;
                }
                let LTerm::Fun(f, _, _) = cur.at(pos).expect("labelled position") else { continue 'steps };
                let ty = self.cs.signature.get(f).expect("declared symbol").result.clone();
                let Some(chain) = self.reach(v, w, &ty, Reach::ReductionOrSubterm, true)? else { continue 'steps };
                for pair in chain.windows(2) {
                    let node = cur.at(pos).unwrap().with_label(Some(pair[1].clone()));
                    cur = cur.replace_at(pos, node);
                    path.push((LStep::Decl { position: pos.clone(), from: pair[0].clone(), to: pair[1].clone() }, cur.clone()));
                }
            }
            debug_assert_eq!(cur, lt);
            labelled = Some(path);
            break;
        }
        let Some(labelled) = labelled else { return Err(SimulationError::NoLabelledPath) };
        let ts = self.trace(s)?;
        let tt = self.trace(t)?;
        let ty = self.trace_type(s);
        let trace_path = match ty {
            Some(ty) => self.reach(&ts, &tt, &ty, Reach::Reduction, false)?,
            None => (ts == tt).then(|| vec![ts.clone()]),
        };
        let Some(trace_path) = trace_path else { return Err(SimulationError::NoTracePath) };
        Ok(Simulation { start: ls, labelled, trace_path })
    }

    fn trace_type(&self, t: &Term) -> Option<MolType> {
        match t {
            MetaTerm::Fun(f, _) => self.cs.signature.get(f).map(|ty| ty.result.clone()),
            _ => None,
        }
    }

    /// Re-checks every step of a simulation.
    pub fn replay(&self, sim: &Simulation) -> Result<bool, TraceError> {
        let mut cur = sim.start.clone();
        for (step, next) in &sim.labelled {
            let ok = match step {
                LStep::Rule { .. } => self.labelled_rule_steps(&cur)?.iter().any(|(st, n)| st == step && n == next),
                LStep::Decl { .. } => self.labelled_one_step(&cur)?.iter().any(|(st, n)| st == step && n == next),
            };
            if !ok {
                return Ok(false);
            }
            cur = next.clone();
        }
        let rw = Rewriter::new(&self.a_proj);
        for pair in sim.trace_path.windows(2) {
            if !rw.reducts(&pair[0]).contains(&pair[1]) {
                return Ok(false);
            }
        }
        Ok(!sim.labelled.is_empty())
    }
}

/// Witness of a simulated step: a labelled path of at least one step and
/// an `A+Proj` path between the traces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Simulation {
    pub start: LTerm,
    pub labelled: Vec<(LStep, LTerm)>,
    pub trace_path: Vec<Term>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SimulationError {
    #[error("the pair is not a one-step reduction")]
    NotAStep,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("no labelled path found")]
    NoLabelledPath,
    #[error("no A+Proj path between the traces")]
    NoTracePath,
}

/// Symbols of `t` that are B-defined.
pub fn b_symbols(t: &Term, sigma_b: &BTreeSet<Name>) -> BTreeSet<Name> {
    t.fun_symbols().into_iter().filter(|f| sigma_b.contains(f)).collect()
}
