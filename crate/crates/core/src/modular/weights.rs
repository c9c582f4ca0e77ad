use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::term::{ComputationSystem, MetaTerm, MolType, Name, Rule, Signature};

/// `f(x1..xn) = constant + sum coeffs[i] * xi` over the naturals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearWeight {
    pub constant: u64,
    pub coeffs: Vec<u64>,
}

impl LinearWeight {
    pub fn new(constant: u64, coeffs: Vec<u64>) -> Self {
        LinearWeight { constant, coeffs }
    }

    /// Renders with the given parameter names, e.g. `2x + 2`.
    pub fn render(&self, params: &[Name]) -> String {
        let mut parts = Vec::new();
        for (c, p) in self.coeffs.iter().zip(params) {
            match c {
                0 => {}
                1 => parts.push(p.to_string()),
                k => parts.push(format!("{k}{p}")),
            }
        }
        if self.constant > 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        parts.join(" + ")
    }

    /// Renders with parameters `x1..xn`.
    pub fn render_default(&self) -> String {
        let params: Vec<Name> = (1..=self.coeffs.len()).map(|i| crate::term::name(&format!("x{i}"))).collect();
        self.render(&params)
    }
}

pub type WeightMap = BTreeMap<Name, LinearWeight>;

/// Linear polynomial over metavariable weights `w_M`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct WeightPolynomial {
    pub constant: u64,
    pub coeffs: BTreeMap<Name, u64>,
}

impl WeightPolynomial {
    pub fn constant(c: u64) -> Self {
        WeightPolynomial { constant: c, coeffs: BTreeMap::new() }
    }

    pub fn var(m: &Name) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(m.clone(), 1);
        WeightPolynomial { constant: 0, coeffs }
    }

    pub fn add(&mut self, other: &WeightPolynomial) {
        self.constant += other.constant;
        for (m, c) in &other.coeffs {
            *self.coeffs.entry(m.clone()).or_insert(0) += c;
        }
        self.coeffs.retain(|_, c| *c > 0);
    }

    pub fn scale(&self, k: u64) -> WeightPolynomial {
        let mut coeffs: BTreeMap<Name, u64> = self.coeffs.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        coeffs.retain(|_, c| *c > 0);
        WeightPolynomial { constant: self.constant * k, coeffs }
    }

    pub fn coeff(&self, m: &str) -> u64 {
        self.coeffs.get(m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.coeffs.is_empty()
    }

    /// Coefficient-wise dominance with a strictly larger constant.
    pub fn strictly_dominates(&self, other: &WeightPolynomial) -> bool {
        self.constant > other.constant && other.coeffs.iter().all(|(m, c)| self.coeff(m) >= *c)
    }

    pub fn eval(&self, val: &BTreeMap<Name, u64>) -> u64 {
        self.constant + self.coeffs.iter().map(|(m, c)| c * val.get(m).copied().unwrap_or(0)).sum::<u64>()
    }
}

impl fmt::Display for WeightPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| if *c == 1 { format!("w_{m}") } else { format!("{c}w_{m}") })
            .collect();
        if self.constant > 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("no weight for symbol {0}")]
    MissingWeight(String),
}

/// `den(t)`: bound variables weigh 0, `M[t..]` weighs `w_M` plus its
/// arguments, abstraction is transparent.
pub fn interpret_weight(w: &WeightMap, t: &MetaTerm) -> Result<WeightPolynomial, WeightError> {
    match t {
        MetaTerm::BVar(_) | MetaTerm::FVar(_) => Ok(WeightPolynomial::default()),
        MetaTerm::Meta(m, args) => {
            let mut p = WeightPolynomial::var(m);
            for a in args {
                p.add(&interpret_weight(w, a)?);
            }
            Ok(p)
        }
        MetaTerm::Fun(f, args) => {
            let lw = w.get(f).ok_or_else(|| WeightError::MissingWeight(f.to_string()))?;
            let mut p = WeightPolynomial::constant(lw.constant);
            for (a, c) in args.iter().zip(&lw.coeffs) {
                if *c > 0 {
                    p.add(&interpret_weight(w, &a.body)?.scale(*c));
                }
            }
            Ok(p)
        }
    }
}

/// Result of comparing the two sides of one rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleWeightCheck {
    pub rule: Name,
    pub lhs: Option<WeightPolynomial>,
    pub rhs: Option<WeightPolynomial>,
    pub ok: bool,
    pub reason: Option<String>,
}

impl fmt::Display for RuleWeightCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) => {
                write!(f, "({}) {l} {} {r}", self.rule, if self.ok { ">" } else { "not >" })?;
                if let Some(why) = &self.reason {
                    write!(f, " ({why})")?;
                }
                Ok(())
            }
            _ => write!(f, "({}) {}", self.rule, self.reason.as_deref().unwrap_or("not interpretable")),
        }
    }
}

/// Weighted arguments of meta-applications on the right-hand side would
/// be duplicated or scaled by the instantiated body.
fn weighted_meta_argument(w: &WeightMap, t: &MetaTerm) -> Option<String> {
    let mut found = None;
    t.visit(&mut |s| {
        if found.is_some() {
            return;
        }
        if let MetaTerm::Meta(m, args) = s {
            for a in args {
                if let Ok(p) = interpret_weight(w, a) {
                    if !p.is_zero() {
                        found = Some(format!("argument {a} of {m} carries weight {p}"));
                        return;
                    }
                }
            }
        }
    });
    found
}

pub fn verify_rule(w: &WeightMap, r: &Rule) -> RuleWeightCheck {
    let l = interpret_weight(w, &r.lhs);
    let rr = interpret_weight(w, &r.rhs);
    match (l, rr) {
        (Ok(l), Ok(rp)) => {
            let guard = weighted_meta_argument(w, &r.rhs);
            let ok = guard.is_none() && l.strictly_dominates(&rp);
            RuleWeightCheck { rule: r.name.clone(), lhs: Some(l), rhs: Some(rp), ok, reason: guard }
        }
        (Err(e), _) | (_, Err(e)) => RuleWeightCheck { rule: r.name.clone(), lhs: None, rhs: None, ok: false, reason: Some(e.to_string()) },
    }
}

/// Per-rule strict decrease of the weights.
pub fn verify_weights(cs: &ComputationSystem, w: &WeightMap) -> Vec<RuleWeightCheck> {
    cs.rules.iter().map(|r| verify_rule(w, r)).collect()
}

pub fn weights_decrease(cs: &ComputationSystem, w: &WeightMap) -> bool {
    verify_weights(cs, w).iter().all(|c| c.ok)
}

/// Types of subterms that can occur inside a term of type `ty`.
fn reachable_types(sig: &Signature, ty: &MolType) -> BTreeSet<MolType> {
    let mut seen = BTreeSet::new();
    let mut work = vec![ty.clone()];
    while let Some(t) = work.pop() {
        if !seen.insert(t.clone()) {
            continue;
        }
        for (_, fty) in sig.symbols() {
            if fty.result == t {
                for a in &fty.args {
                    work.push(a.result.clone());
                }
            }
        }
    }
    seen
}

/// `hosting[f][i]`: argument `i` of `f` can contain a defined symbol.
pub fn redex_hosting(cs: &ComputationSystem) -> BTreeMap<Name, Vec<bool>> {
    let defined_results: BTreeSet<MolType> =
        cs.defined().iter().filter_map(|f| cs.signature.get(f)).map(|t| t.result.clone()).collect();
    let mut out = BTreeMap::new();
    for (f, fty) in cs.signature.symbols() {
        let v = fty
            .args
            .iter()
            .map(|a| reachable_types(&cs.signature, &a.result).iter().any(|t| defined_results.contains(t)))
            .collect();
        out.insert(f.clone(), v);
    }
    out
}

/// Bounded search for weights that decrease on every rule. Coefficients
/// range over `0..=coeff_bound` (at least 1 on redex-hosting positions)
/// and constants over `0..=const_bound`.
pub fn find_linear_weights(cs: &ComputationSystem, coeff_bound: u64, const_bound: u64) -> Option<WeightMap> {
    let hosting = redex_hosting(cs);
    let mut symbols: Vec<Name> = Vec::new();
    for r in &cs.rules {
        for s in r.lhs.fun_symbols().into_iter().chain(r.rhs.fun_symbols()) {
            if !symbols.contains(&s) {
                symbols.push(s);
            }
        }
    }
    // candidate weights per symbol, smallest first
    let mut cands: Vec<Vec<LinearWeight>> = Vec::new();
    for s in &symbols {
        let arity = cs.signature.get(s).map(|t| t.arity()).unwrap_or(0);
        let host = hosting.get(s).cloned().unwrap_or_else(|| vec![true; arity]);
        let mut v = vec![LinearWeight::new(0, vec![])];
        for h in &host {
            let lo = if *h { 1 } else { 0 };
            let mut next = Vec::new();
            for w in &v {
                for c in lo..=coeff_bound {
                    let mut w2 = w.clone();
                    w2.coeffs.push(c);
                    next.push(w2);
                }
            }
            v = next;
        }
        let mut all = Vec::new();
        for k in 0..=const_bound {
            for w in &v {
                all.push(LinearWeight::new(k, w.coeffs.clone()));
            }
        }
        all.sort_by_key(|w| (w.constant + w.coeffs.iter().sum::<u64>(), w.constant));
        cands.push(all);
    }
    // rules become checkable once all their symbols are assigned
    let mut ready_at: Vec<Vec<&Rule>> = vec![Vec::new(); symbols.len().max(1)];
    for r in &cs.rules {
        let last = r
            .lhs
            .fun_symbols()
            .into_iter()
            .chain(r.rhs.fun_symbols())
            .map(|s| symbols.iter().position(|x| *x == s).unwrap())
            .max()
            .unwrap_or(0);
        ready_at[last].push(r);
    }
    let mut w = WeightMap::new();
    if symbols.is_empty() {
        return if cs.rules.iter().all(|r| verify_rule(&w, r).ok) { Some(w) } else { None };
    }
    let mut budget: u64 = 5_000_000;
    if search(0, &symbols, &cands, &ready_at, &mut w, &mut budget) {
        Some(w)
    } else {
        None
    }
}

fn search(
    i: usize,
    symbols: &[Name],
    cands: &[Vec<LinearWeight>],
    ready_at: &[Vec<&Rule>],
    w: &mut WeightMap,
    budget: &mut u64,
) -> bool {
    if i == symbols.len() {
        return true;
    }
    for c in &cands[i] {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        w.insert(symbols[i].clone(), c.clone());
        if ready_at[i].iter().all(|r| verify_rule(w, r).ok) && search(i + 1, symbols, cands, ready_at, w, budget) {
            return true;
        }
    }
    w.remove(&symbols[i]);
    false
}
