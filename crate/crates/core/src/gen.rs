//! Deterministic enumeration of well-typed terms and of ground instances
//! of left-hand sides, used to seed the oracle and the loop search.

use std::collections::HashMap;

use crate::term::{substitute_metavars, Abs, Assignment, ComputationSystem, MetaTerm, MolType, Signature, Term};

/// Default number of terms kept per (type, scope, depth).
pub const DEFAULT_CAP: usize = 6;

/// Enumerates terms of type `ty` under bound variables of types `scope`
/// (outermost first) with depth at most `depth`.
pub struct Enumerator<'a> {
    sig: &'a Signature,
    order: Vec<&'a str>,
    cap: usize,
    memo: HashMap<(MolType, Vec<MolType>, usize), Vec<Term>>,
}

impl<'a> Enumerator<'a> {
    /// `preferred` symbols (typically constructors) are tried first.
    pub fn new(sig: &'a Signature, preferred: &[&str], cap: usize) -> Self {
        let mut order: Vec<&str> = sig.names().map(|n| &**n).filter(|n| preferred.contains(n)).collect();
        order.extend(sig.names().map(|n| &**n).filter(|n| !preferred.contains(n)));
        Enumerator { sig, order, cap, memo: HashMap::new() }
    }

    pub fn terms(&mut self, ty: &MolType, scope: &[MolType], depth: usize) -> Vec<Term> {
        if depth == 0 {
            return Vec::new();
        }
        let key = (ty.clone(), scope.to_vec(), depth);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out: Vec<Term> = Vec::new();
        for (i, t) in scope.iter().enumerate().rev() {
            if t == ty {
                out.push(MetaTerm::BVar(scope.len() - 1 - i));
            }
        }
        let order = self.order.clone();
        for f in order {
            if out.len() >= self.cap {
                break;
            }
            let fty = self.sig.get(f).expect("enumerator symbol is declared").clone();
            if &fty.result != ty {
                continue;
            }
            let mut choices: Vec<Vec<Abs>> = Vec::new();
            let mut possible = true;
            for a in &fty.args {
                let mut inner = scope.to_vec();
                inner.extend(a.binders.iter().cloned());
                let bodies = self.terms(&a.result, &inner, depth - 1);
                if bodies.is_empty() {
                    possible = false;
                    break;
                }
                choices.push(bodies.into_iter().map(|b| Abs::anonymous(a.binders.clone(), b)).collect());
            }
            if !possible {
                continue;
            }
            for args in product(&choices, self.cap - out.len()) {
                out.push(MetaTerm::Fun(crate::term::name(f), args));
            }
        }
        out.sort_by_key(|t| t.size());
        out.truncate(self.cap);
        self.memo.insert(key, out.clone());
        out
    }
}

/// Cartesian product, varying the last coordinate fastest, at most `limit`
/// tuples, spread so every coordinate's first choices appear early.
fn product<T: Clone>(choices: &[Vec<T>], limit: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::new();
        'outer: for round in 0..c.len() {
            for prefix in &out {
                let mut v = prefix.clone();
                v.push(c[round].clone());
                next.push(v);
                if next.len() >= limit.max(1) * 4 {
                    break 'outer;
                }
            }
        }
        out = next;
    }
    out.truncate(limit);
    out
}

/// Ground instances of every left-hand side whose metavariable bodies
/// have depth at most `depth`; at most `cap * cap` instances per rule.
pub fn lhs_instances(cs: &ComputationSystem, depth: usize, cap: usize) -> Vec<Term> {
    let constructors = cs.constructors();
    let preferred: Vec<&str> = constructors.iter().map(|c| &**c).collect();
    let mut en = Enumerator::new(&cs.signature, &preferred, cap);
    let mut out = Vec::new();
    for r in &cs.rules {
        let mut choices: Vec<Vec<(crate::term::Name, Abs)>> = Vec::new();
        let mut possible = true;
        for d in r.context.iter() {
            let bodies = en.terms(&d.result, &d.args, depth);
            if bodies.is_empty() {
                possible = false;
                break;
            }
            choices.push(bodies.into_iter().map(|b| (d.name.clone(), Abs::anonymous(d.args.clone(), b))).collect());
        }
        if !possible {
            continue;
        }
        for combo in product(&choices, cap * cap) {
            let mut theta = Assignment::new();
            for (m, a) in combo {
                theta.insert(m, a);
            }
            if let Ok(t) = substitute_metavars(&theta, &r.lhs) {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}
