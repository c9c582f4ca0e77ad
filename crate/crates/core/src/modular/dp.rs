//! Dependency pairs for first-order systems: estimated dependency graph,
//! subterm criterion and linear interpretations with `max(0, .)`.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::fo::{FoRule, FoTerm};
use crate::term::{name, Name};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DependencyPair {
    pub lhs: FoTerm,
    pub rhs: FoTerm,
}

impl std::fmt::Display for DependencyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

/// `max(0, constant + sum coeffs[i] * xi)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaxLinear {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

impl MaxLinear {
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                k => parts.push(format!("{k}x{}", i + 1)),
            }
        }
        let body = match (parts.is_empty(), self.constant) {
            (true, c) => c.max(0).to_string(),
            (false, 0) => parts.join(" + "),
            (false, c) if c > 0 => format!("{} + {c}", parts.join(" + ")),
            (false, c) => format!("max(0, {} - {})", parts.join(" + "), -c),
        };
        body
    }
}

pub type Interpretation = BTreeMap<Name, MaxLinear>;

/// Linear form over variables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
struct Form {
    constant: i64,
    coeffs: BTreeMap<Name, i64>,
}

impl Form {
    fn var(x: &Name) -> Form {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(x.clone(), 1);
        Form { constant: 0, coeffs }
    }

    fn add_scaled(&mut self, o: &Form, k: i64) {
        self.constant += k * o.constant;
        for (x, c) in &o.coeffs {
            *self.coeffs.entry(x.clone()).or_insert(0) += k * c;
        }
    }

    /// `self - o >= d` for all naturals.
    fn geq_by(&self, o: &Form, d: i64) -> bool {
        if self.constant - o.constant < d {
            return false;
        }
        o.coeffs.iter().all(|(x, c)| self.coeffs.get(x).copied().unwrap_or(0) >= *c)
    }
}

/// Lower and upper linear bounds of the interpreted term.
fn bounds(i: &Interpretation, t: &FoTerm) -> Option<(Form, Form)> {
    match t {
        FoTerm::Var(x) => Some((Form::var(x), Form::var(x))),
        FoTerm::App(f, args) => {
            let ml = i.get(f)?;
            let mut lo = Form { constant: ml.constant, ..Default::default() };
            let mut hi = Form { constant: ml.constant, ..Default::default() };
            for (a, c) in args.iter().zip(&ml.coeffs) {
                if *c == 0 {
                    continue;
                }
                let (l, u) = bounds(i, a)?;
                lo.add_scaled(&l, *c);
                hi.add_scaled(&u, *c);
            }
            // coefficients are non-negative, so max(0, e) <= e - min(0, constant of e)
            if hi.constant < 0 {
                hi.constant = 0;
            }
            if lo.constant < 0 && lo.coeffs.values().all(|c| *c == 0) {
                lo.constant = 0;
            }
            Some((lo, hi))
        }
    }
}

fn geq(i: &Interpretation, l: &FoTerm, r: &FoTerm, strict: bool) -> bool {
    match (bounds(i, l), bounds(i, r)) {
        (Some((lo, _)), Some((_, hi))) => lo.geq_by(&hi, if strict { 1 } else { 0 }),
        _ => false,
    }
}

fn tuple_name(f: &str) -> Name {
    name(&format!("{f}#"))
}

fn mark(t: &FoTerm) -> FoTerm {
    match t {
        FoTerm::App(f, args) => FoTerm::App(tuple_name(f), args.clone()),
        v => v.clone(),
    }
}

pub fn dependency_pairs(rules: &[FoRule]) -> Vec<DependencyPair> {
    let defined: BTreeSet<Name> = rules.iter().filter_map(|r| r.lhs.root().cloned()).collect();
    let mut out = Vec::new();
    for r in rules {
        for u in r.rhs.subterms() {
            if let FoTerm::App(g, _) = u {
                if defined.contains(g) && !(r.lhs != *u && r.lhs.contains(u)) {
                    let dp = DependencyPair { lhs: mark(&r.lhs), rhs: mark(u) };
                    if !out.contains(&dp) {
                        out.push(dp);
                    }
                }
            }
        }
    }
    out
}

fn rename(t: &FoTerm, suffix: &str) -> FoTerm {
    match t {
        FoTerm::Var(x) => FoTerm::Var(name(&format!("{x}{suffix}"))),
        FoTerm::App(f, args) => FoTerm::App(f.clone(), args.iter().map(|a| rename(a, suffix)).collect()),
    }
}

/// `ren(cap(t))`: defined-rooted subterms and variables become fresh.
fn cap_ren(t: &FoTerm, defined: &BTreeSet<Name>, fresh: &mut usize, top: bool) -> FoTerm {
    match t {
        FoTerm::Var(_) => {
            *fresh += 1;
            FoTerm::Var(name(&format!("_v{fresh}")))
        }
        FoTerm::App(f, _) if !top && defined.contains(f) => {
            *fresh += 1;
            FoTerm::Var(name(&format!("_v{fresh}")))
        }
        FoTerm::App(f, args) => FoTerm::App(f.clone(), args.iter().map(|a| cap_ren(a, defined, fresh, false)).collect()),
    }
}

fn walk(t: &FoTerm, s: &BTreeMap<Name, FoTerm>) -> FoTerm {
    match t {
        FoTerm::Var(x) => match s.get(x) {
            Some(u) => walk(u, s),
            None => t.clone(),
        },
        FoTerm::App(f, args) => FoTerm::App(f.clone(), args.iter().map(|a| walk(a, s)).collect()),
    }
}

pub fn unifiable(a: &FoTerm, b: &FoTerm) -> bool {
    let mut s = BTreeMap::new();
    let mut work = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = work.pop() {
        let x = walk(&x, &s);
        let y = walk(&y, &s);
        match (x, y) {
            (FoTerm::Var(v), t) | (t, FoTerm::Var(v)) => {
                if t == FoTerm::Var(v.clone()) {
                    continue;
                }
                let mut vs = BTreeSet::new();
                t.vars(&mut vs);
                if vs.contains(&v) {
                    return false;
                }
                s.insert(v, t);
            }
            (FoTerm::App(f, xs), FoTerm::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                work.extend(xs.into_iter().zip(ys));
            }
        }
    }
    true
}

/// Components of the estimated graph restricted to `pairs` that carry a cycle.
fn cyclic_components(pairs: &[DependencyPair], defined: &BTreeSet<Name>) -> Vec<Vec<DependencyPair>> {
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<_> = (0..pairs.len()).map(|i| g.add_node(i)).collect();
    for (i, p) in pairs.iter().enumerate() {
        let mut fresh = 0;
        let capped = cap_ren(&p.rhs, defined, &mut fresh, true);
        for (j, q) in pairs.iter().enumerate() {
            if unifiable(&capped, &rename(&q.lhs, "'")) {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut out = Vec::new();
    for comp in tarjan_scc(&g) {
        let cyclic = comp.len() > 1 || g.contains_edge(comp[0], comp[0]);
        if cyclic {
            let mut idx: Vec<usize> = comp.iter().map(|n| g[*n]).collect();
            idx.sort();
            out.push(idx.into_iter().map(|i| pairs[i].clone()).collect());
        }
    }
    out.sort_by_key(|c: &Vec<DependencyPair>| c.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    out
}

/// Projection per tuple symbol removing the strictly decreasing pairs.
fn subterm_criterion(comp: &[DependencyPair]) -> Option<(BTreeMap<Name, usize>, Vec<DependencyPair>)> {
    let mut arity: BTreeMap<Name, usize> = BTreeMap::new();
    for p in comp {
        for t in [&p.lhs, &p.rhs] {
            if let FoTerm::App(f, args) = t {
                arity.insert(f.clone(), args.len());
            }
        }
    }
    let syms: Vec<(Name, usize)> = arity.into_iter().collect();
    if syms.iter().any(|(_, n)| *n == 0) {
        return None;
    }
    let mut choice = vec![0usize; syms.len()];
    loop {
        let pi: BTreeMap<Name, usize> = syms.iter().zip(&choice).map(|((f, _), c)| (f.clone(), *c)).collect();
        let proj = |t: &FoTerm| match t {
            FoTerm::App(f, args) => args.get(pi[f]).cloned(),
            _ => None,
        };
        let mut ok = true;
        let mut strict = Vec::new();
        for p in comp {
            match (proj(&p.lhs), proj(&p.rhs)) {
                (Some(l), Some(r)) if l == r => {}
                (Some(l), Some(r)) if l.contains(&r) => strict.push(p.clone()),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && !strict.is_empty() {
            return Some((pi, strict));
        }
        // next choice
        let mut k = 0;
        loop {
            if k == syms.len() {
                return None;
            }
            choice[k] += 1;
            if choice[k] < syms[k].1 {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn rules_of(rules: &[FoRule], f: &Name) -> Vec<FoRule> {
    rules.iter().filter(|r| r.lhs.root() == Some(f)).cloned().collect()
}

/// Rules reachable from the defined symbols in the pairs' right-hand sides.
fn usable_rules(rules: &[FoRule], comp: &[DependencyPair]) -> Vec<FoRule> {
    let mut seen: BTreeSet<Name> = BTreeSet::new();
    let mut work: Vec<Name> = Vec::new();
    let push_syms = |t: &FoTerm, work: &mut Vec<Name>| {
        for s in t.subterms() {
            if let FoTerm::App(f, _) = s {
                work.push(f.clone());
            }
        }
    };
    for p in comp {
        if let FoTerm::App(_, args) = &p.rhs {
            for a in args {
                push_syms(a, &mut work);
            }
        }
    }
    let mut out = Vec::new();
    while let Some(f) = work.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        for r in rules_of(rules, &f) {
            push_syms(&r.rhs, &mut work);
            out.push(r);
        }
    }
    out
}

fn symbols_with_arity(ts: &[&FoTerm]) -> Vec<(Name, usize)> {
    let mut m: BTreeMap<Name, usize> = BTreeMap::new();
    for t in ts {
        for s in t.subterms() {
            if let FoTerm::App(f, args) = s {
                m.insert(f.clone(), args.len());
            }
        }
    }
    m.into_iter().collect()
}

fn candidates(arity: usize) -> Vec<MaxLinear> {
    let mut v = vec![Vec::new()];
    for _ in 0..arity {
        v = v
            .into_iter()
            .flat_map(|c: Vec<i64>| (0..=2).map(move |k| {
                let mut c2 = c.clone();
                c2.push(k);
                c2
            }))
            .collect();
    }
    let consts: &[i64] = if arity == 0 { &[0, 1] } else { &[0, -1, 1] };
    let mut out = Vec::new();
    for c in consts {
        for co in &v {
            out.push(MaxLinear { constant: *c, coeffs: co.clone() });
        }
    }
    out.sort_by_key(|m| (m.coeffs.iter().sum::<i64>() + m.constant.abs(), m.constant < 0));
    out
}

enum Constraint<'a> {
    Weak(&'a FoTerm, &'a FoTerm),
}

/// Finds interpretations orienting `usable` weakly and `comp` weakly with
/// at least one strict pair; returns them with the strict pairs.
fn reduction_pair(comp: &[DependencyPair], usable: &[FoRule], budget: &mut u64) -> Option<(Interpretation, Vec<DependencyPair>)> {
    let mut all: Vec<&FoTerm> = Vec::new();
    for p in comp {
        all.push(&p.lhs);
        all.push(&p.rhs);
    }
    for r in usable {
        all.push(&r.lhs);
        all.push(&r.rhs);
    }
    let syms = symbols_with_arity(&all);
    let cands: Vec<Vec<MaxLinear>> = syms.iter().map(|(_, n)| candidates(*n)).collect();
    let pos = |f: &Name| syms.iter().position(|(g, _)| g == f).unwrap();
    let last_sym = |a: &FoTerm, b: &FoTerm| {
        let mut m = 0;
        for t in [a, b] {
            for s in t.subterms() {
                if let FoTerm::App(f, _) = s {
                    m = m.max(pos(f));
                }
            }
        }
        m
    };
    let mut ready: Vec<Vec<Constraint>> = (0..syms.len()).map(|_| Vec::new()).collect();
    for p in comp {
        ready[last_sym(&p.lhs, &p.rhs)].push(Constraint::Weak(&p.lhs, &p.rhs));
    }
    for r in usable {
        ready[last_sym(&r.lhs, &r.rhs)].push(Constraint::Weak(&r.lhs, &r.rhs));
    }
    let mut interp = Interpretation::new();
    let found = rp_search(0, &syms, &cands, &ready, &mut interp, comp, budget);
    found.map(|strict| (interp, strict))
}

fn rp_search(
    i: usize,
    syms: &[(Name, usize)],
    cands: &[Vec<MaxLinear>],
    ready: &[Vec<Constraint>],
    interp: &mut Interpretation,
    comp: &[DependencyPair],
    budget: &mut u64,
) -> Option<Vec<DependencyPair>> {
    if i == syms.len() {
        let strict: Vec<DependencyPair> = comp.iter().filter(|p| geq(interp, &p.lhs, &p.rhs, true)).cloned().collect();
        return if strict.is_empty() { None } else { Some(strict) };
    }
    for c in &cands[i] {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        interp.insert(syms[i].0.clone(), c.clone());
        let ok = ready[i].iter().all(|Constraint::Weak(l, r)| geq(interp, l, r, false));
        if ok {
            if let Some(s) = rp_search(i + 1, syms, cands, ready, interp, comp, budget) {
                return Some(s);
            }
        }
    }
    interp.remove(&syms[i].0);
    None
}

/// Outcome of the dependency-pair proof.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DpProof {
    pub proved: bool,
    pub steps: Vec<String>,
}

/// Termination proof attempt for a first-order system.
pub fn prove_dp(rules: &[FoRule]) -> DpProof {
    let defined: BTreeSet<Name> = rules.iter().filter_map(|r| r.lhs.root().cloned()).collect();
    let mut steps = Vec::new();
    let dps = dependency_pairs(rules);
    steps.push(format!("{} dependency pairs", dps.len()));
    let mut work = cyclic_components(&dps, &defined);
    let mut budget: u64 = 2_000_000;
    while let Some(comp) = work.pop() {
        let shown: Vec<String> = comp.iter().map(|p| p.to_string()).collect();
        if let Some((pi, strict)) = subterm_criterion(&comp) {
            let proj: Vec<String> = pi.iter().map(|(f, i)| format!("pi({f}) = {}", i + 1)).collect();
            steps.push(format!("{{{}}}: subterm criterion with {} removes {}", shown.join("; "), proj.join(", "), strict.len()));
            let rest: Vec<DependencyPair> = comp.into_iter().filter(|p| !strict.contains(p)).collect();
            work.extend(cyclic_components(&rest, &defined));
            continue;
        }
        let usable = usable_rules(rules, &comp);
        if let Some((interp, strict)) = reduction_pair(&comp, &usable, &mut budget) {
            let shown_i: Vec<String> = interp.iter().map(|(f, m)| format!("[{f}] = {}", m.render())).collect();
            steps.push(format!(
                "{{{}}}: {} usable rules, interpretation {} removes {}",
                shown.join("; "),
                usable.len(),
                shown_i.join(", "),
                strict.len()
            ));
            let rest: Vec<DependencyPair> = comp.into_iter().filter(|p| !strict.contains(p)).collect();
            work.extend(cyclic_components(&rest, &defined));
            continue;
        }
        steps.push(format!("{{{}}}: no processor applies", shown.join("; ")));
        return DpProof { proved: false, steps };
    }
    steps.push("no cycles remain".into());
    DpProof { proved: true, steps }
}

/// Re-checks a reduction-pair step: every rule weakly, every pair weakly,
/// the listed ones strictly.
pub fn check_interpretation(i: &Interpretation, rules: &[FoRule], pairs: &[DependencyPair], strict: &[DependencyPair]) -> bool {
    rules.iter().all(|r| geq(i, &r.lhs, &r.rhs, false))
        && pairs.iter().all(|p| geq(i, &p.lhs, &p.rhs, false))
        && strict.iter().all(|p| geq(i, &p.lhs, &p.rhs, true))
}
