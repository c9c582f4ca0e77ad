use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::order::TypeOrder;
use crate::term::{distinct_bound_vars, Abs, MetaTerm, Name, Signature};

/// Step of an accessibility derivation: descend into argument `arg` of
/// symbol `symbol` by (a3).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AccStep {
    pub symbol: Name,
    pub arg: usize,
}

/// Worklist discipline used to compute the fixpoint; the result does not
/// depend on it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Traversal {
    #[default]
    BreadthFirst,
    DepthFirst,
}

/// Accessible metavariables of an abstraction, each with the (a3) path
/// reaching its first accessible occurrence.
pub fn accessible_in(sig: &Signature, t: &Abs, ord: &TypeOrder, traversal: Traversal) -> BTreeMap<Name, Vec<AccStep>> {
    let mut out: BTreeMap<Name, Vec<AccStep>> = BTreeMap::new();
    // items: (body, binder depth within t, path)
    let mut work: VecDeque<(&MetaTerm, usize, Vec<AccStep>)> = VecDeque::new();
    // (a1), (a2): t and its body
    work.push_back((&t.body, t.arity(), Vec::new()));
    while let Some((body, depth, path)) = match traversal {
        Traversal::BreadthFirst => work.pop_front(),
        Traversal::DepthFirst => work.pop_back(),
    } {
        match body {
            MetaTerm::Meta(m, args) => {
                if distinct_bound_vars(args, depth, true) {
                    let better = match out.get(m) {
                        None => true,
                        Some(p) => shorter(&path, p),
                    };
                    if better {
                        out.insert(m.clone(), path);
                    }
                }
            }
            MetaTerm::Fun(f, args) => {
                let Some(fty) = sig.get(f) else { continue };
                for (i, (decl, a)) in fty.args.iter().zip(args).enumerate() {
                    // (a3)
                    let ok = decl.binders.iter().all(|b| ord.lt(b, &fty.result)) && ord.le(&decl.result, &fty.result);
                    if ok {
                        let mut p = path.clone();
                        p.push(AccStep { symbol: f.clone(), arg: i });
                        work.push_back((&a.body, depth + a.arity(), p));
                    }
                }
            }
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => {}
        }
    }
    out
}

fn shorter(a: &[AccStep], b: &[AccStep]) -> bool {
    (a.len(), format!("{a:?}")) < (b.len(), format!("{b:?}"))
}

/// Metavariables `M` with some `M[x..]` (distinct bound variables) in
/// `Acc(t)`.
pub fn accessible_metavars(sig: &Signature, t: &Abs, ord: &TypeOrder) -> BTreeSet<Name> {
    accessible_in(sig, t, ord, Traversal::BreadthFirst).into_keys().collect()
}

/// Re-checks an accessibility path against the (a3) side condition and
/// returns whether it ends at an `M[x..]` occurrence.
pub fn replay_path(sig: &Signature, t: &Abs, ord: &TypeOrder, path: &[AccStep], m: &str) -> bool {
    fn ends_at(sig: &Signature, body: &MetaTerm, depth: usize, ord: &TypeOrder, path: &[AccStep], m: &str) -> bool {
        match path.split_first() {
            None => matches!(body, MetaTerm::Meta(n, args) if &**n == m && distinct_bound_vars(args, depth, true)),
            Some((step, rest)) => {
                let MetaTerm::Fun(f, args) = body else { return false };
                if *f != step.symbol {
                    return false;
                }
                let Some(fty) = sig.get(f) else { return false };
                let (Some(decl), Some(a)) = (fty.args.get(step.arg), args.get(step.arg)) else { return false };
                if !(decl.binders.iter().all(|b| ord.lt(b, &fty.result)) && ord.le(&decl.result, &fty.result)) {
                    return false;
                }
                ends_at(sig, &a.body, depth + a.arity(), ord, rest, m)
            }
        }
    }
    ends_at(sig, &t.body, t.arity(), ord, path, m)
}
