use std::collections::BTreeMap;
use std::fmt;

use super::access::{accessible_in, replay_path, AccStep, Traversal};
use super::order::{SymbolPrecedence, TypeOrder};
use crate::term::{print_in_scope, Abs, MetaTerm, MolType, Name, Signature};

/// Subterm ordering used by clause (fun =).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SubtermVariant {
    /// Proper sub-meta-term whose free variables are free in the whole.
    #[default]
    Stable,
    /// Also allows occurrences mentioning variables bound above them.
    Structural,
}

/// Extension comparing argument lists in clause (fun =).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Clause5 {
    #[default]
    Lex,
    Multiset,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct GsConfig {
    pub variant: SubtermVariant,
    pub clause5: Clause5,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Clause {
    Meta,
    Var,
    Abs,
    FunGt,
    FunEq,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Meta => "(meta)",
            Clause::Var => "(var)",
            Clause::Abs => "(abs)",
            Clause::FunGt => "(fun >)",
            Clause::FunEq => "(fun =)",
        })
    }
}

/// Computable-closure derivation of a right-hand side.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Derivation {
    /// `M[t..]` with `M` accessible in lhs argument `source` along `path`.
    Meta { name: Name, source: usize, path: Vec<AccStep>, args: Vec<Derivation> },
    Var,
    /// Abstraction over `binders` variables.
    Abs { binders: usize, body: Box<Derivation> },
    FunGt { callee: Name, args: Vec<Derivation> },
    FunEq { callee: Name, decrease: Decrease, args: Vec<Derivation> },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Decrease {
    /// Arguments equal before `index`, strictly smaller at `index`.
    Lex { index: usize },
    Multiset,
}

impl Derivation {
    /// Number of derivation nodes.
    pub fn size(&self) -> usize {
        match self {
            Derivation::Var => 1,
            Derivation::Abs { body, .. } => 1 + body.size(),
            Derivation::Meta { args, .. } | Derivation::FunGt { args, .. } | Derivation::FunEq { args, .. } => {
                1 + args.iter().map(Derivation::size).sum::<usize>()
            }
        }
    }

    /// One-line rendering listing the clauses used.
    pub fn summary(&self) -> String {
        match self {
            Derivation::Var => "var".into(),
            Derivation::Abs { body, .. } => format!("abs({})", body.summary()),
            Derivation::Meta { name, source, args, .. } => {
                let a: Vec<String> = args.iter().map(|d| d.summary()).collect();
                if a.is_empty() {
                    format!("meta {name}@{}", source + 1)
                } else {
                    format!("meta {name}@{}[{}]", source + 1, a.join(", "))
                }
            }
            Derivation::FunGt { callee, args } => {
                let a: Vec<String> = args.iter().map(|d| d.summary()).collect();
                if a.is_empty() {
                    format!("fun> {callee}")
                } else {
                    format!("fun> {callee}({})", a.join(", "))
                }
            }
            Derivation::FunEq { callee, decrease, args } => {
                let a: Vec<String> = args.iter().map(|d| d.summary()).collect();
                let how = match decrease {
                    Decrease::Lex { index } => format!("lex@{}", index + 1),
                    Decrease::Multiset => "mul".into(),
                };
                format!("fun= {callee}[{how}]({})", a.join(", "))
            }
        }
    }
}

/// Why a right-hand side is not in the computable closure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Failure {
    pub clause: Clause,
    pub subterm: String,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {}: {}", self.clause, self.subterm, self.detail)
    }
}

/// Context of one membership question `candidate in CC(f(lhs_args))`.
pub struct Closure<'a> {
    pub sig: &'a Signature,
    pub f: Name,
    pub lhs_args: &'a [Abs],
    pub ord: &'a TypeOrder,
    pub prec: &'a SymbolPrecedence,
    pub config: GsConfig,
    accessible: Vec<BTreeMap<Name, Vec<AccStep>>>,
}

impl<'a> Closure<'a> {
    pub fn new(
        sig: &'a Signature,
        f: Name,
        lhs_args: &'a [Abs],
        ord: &'a TypeOrder,
        prec: &'a SymbolPrecedence,
        config: GsConfig,
    ) -> Self {
        let accessible = lhs_args.iter().map(|a| accessible_in(sig, a, ord, Traversal::BreadthFirst)).collect();
        Closure { sig, f, lhs_args, ord, prec, config, accessible }
    }

    /// Decides membership, returning a derivation or the innermost failure.
    pub fn derive(&self, candidate: &MetaTerm) -> Result<Derivation, Failure> {
        self.cc(candidate, &mut Vec::new(), &mut Vec::new())
    }

    /// `stack` holds the binder types above `t`, `names` their hints.
    fn cc(&self, t: &MetaTerm, stack: &mut Vec<MolType>, names: &mut Vec<String>) -> Result<Derivation, Failure> {
        match t {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => Ok(Derivation::Var),
            MetaTerm::Meta(m, args) => {
                let found = self.accessible.iter().enumerate().find_map(|(i, acc)| acc.get(m).map(|p| (i, p.clone())));
                let Some((source, path)) = found else {
                    return Err(Failure {
                        clause: Clause::Meta,
                        subterm: print_in_scope(t, names),
                        detail: format!("{m} is not accessible in any argument of {}", self.f),
                    });
                };
                let args = args.iter().map(|a| self.cc(a, stack, names)).collect::<Result<Vec<_>, _>>()?;
                Ok(Derivation::Meta { name: m.clone(), source, path, args })
            }
            MetaTerm::Fun(g, args) => {
                if self.prec.gt(&self.f, g) {
                    let args = self.cc_args(args, stack, names)?;
                    return Ok(Derivation::FunGt { callee: g.clone(), args });
                }
                if self.prec.eq(&self.f, g) {
                    let Some(decrease) = self.decreasing(args, stack) else {
                        return Err(Failure {
                            clause: Clause::FunEq,
                            subterm: print_in_scope(t, names),
                            detail: format!(
                                "arguments of {g} are not smaller than those of {} ({})",
                                self.f,
                                match self.config.clause5 {
                                    Clause5::Lex => "lexicographic",
                                    Clause5::Multiset => "multiset",
                                }
                            ),
                        });
                    };
                    let args = self.cc_args(args, stack, names)?;
                    return Ok(Derivation::FunEq { callee: g.clone(), decrease, args });
                }
                Err(Failure {
                    clause: Clause::FunGt,
                    subterm: print_in_scope(t, names),
                    detail: format!("{g} is not below {} in the precedence", self.f),
                })
            }
        }
    }

    fn cc_args(&self, args: &[Abs], stack: &mut Vec<MolType>, names: &mut Vec<String>) -> Result<Vec<Derivation>, Failure> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            let base = stack.len();
            stack.extend(a.binders.iter().cloned());
            names.extend(a.hints.iter().map(|h| h.to_string()));
            let d = self.cc(&a.body, stack, names);
            stack.truncate(base);
            names.truncate(base);
            let d = d?;
            out.push(if a.arity() == 0 { d } else { Derivation::Abs { binders: a.arity(), body: Box::new(d) } });
        }
        Ok(out)
    }

    fn decreasing(&self, args: &[Abs], stack: &[MolType]) -> Option<Decrease> {
        match self.config.clause5 {
            Clause5::Lex => {
                for (i, (l, r)) in self.lhs_args.iter().zip(args).enumerate() {
                    if l == r {
                        continue;
                    }
                    return if strictly_below(r, l, self.config.variant, stack) { Some(Decrease::Lex { index: i }) } else { None };
                }
                None
            }
            Clause5::Multiset => {
                if multiset_greater(self.lhs_args, args, self.config.variant, stack) {
                    Some(Decrease::Multiset)
                } else {
                    None
                }
            }
        }
    }

    /// Independent re-check of a derivation for `candidate`.
    pub fn replay(&self, candidate: &MetaTerm, d: &Derivation) -> Result<(), String> {
        self.replay_at(candidate, d, &mut Vec::new())
    }

    fn replay_at(&self, t: &MetaTerm, d: &Derivation, stack: &mut Vec<MolType>) -> Result<(), String> {
        match (t, d) {
            (MetaTerm::BVar(_) | MetaTerm::FVar(_), Derivation::Var) => Ok(()),
            (MetaTerm::Meta(m, args), Derivation::Meta { name, source, path, args: ds }) => {
                if m != name || args.len() != ds.len() {
                    return Err(format!("meta node mismatch at {t}"));
                }
                let src = self.lhs_args.get(*source).ok_or("accessibility source out of range")?;
                if !replay_path(self.sig, src, self.ord, path, m) {
                    return Err(format!("{m} is not accessible along the recorded path"));
                }
                args.iter().zip(ds).try_for_each(|(a, d)| self.replay_at(a, d, stack))
            }
            (MetaTerm::Fun(g, args), Derivation::FunGt { callee, args: ds }) => {
                if g != callee || !self.prec.gt(&self.f, g) {
                    return Err(format!("{} > {g} does not hold", self.f));
                }
                self.replay_args(args, ds, stack)
            }
            (MetaTerm::Fun(g, args), Derivation::FunEq { callee, decrease, args: ds }) => {
                if g != callee || !self.prec.eq(&self.f, g) {
                    return Err(format!("{} = {g} does not hold", self.f));
                }
                let ok = match decrease {
                    Decrease::Lex { index } => {
                        self.lhs_args.iter().zip(args).take(*index).all(|(l, r)| l == r)
                            && match (args.get(*index), self.lhs_args.get(*index)) {
                                (Some(r), Some(l)) => strictly_below(r, l, self.config.variant, stack),
                                _ => false,
                            }
                    }
                    Decrease::Multiset => multiset_greater(self.lhs_args, args, self.config.variant, stack),
                };
                if !ok {
                    return Err(format!("arguments of {g} are not decreasing"));
                }
                self.replay_args(args, ds, stack)
            }
            _ => Err(format!("derivation does not fit {t}")),
        }
    }

    fn replay_args(&self, args: &[Abs], ds: &[Derivation], stack: &mut Vec<MolType>) -> Result<(), String> {
        if args.len() != ds.len() {
            return Err("argument count mismatch".into());
        }
        for (a, d) in args.iter().zip(ds) {
            let base = stack.len();
            stack.extend(a.binders.iter().cloned());
            let r = match d {
                Derivation::Abs { binders, body } if *binders == a.arity() && a.arity() > 0 => self.replay_at(&a.body, body, stack),
                _ if a.arity() == 0 => self.replay_at(&a.body, d, stack),
                _ => Err("missing abstraction step".into()),
            };
            stack.truncate(base);
            r?;
        }
        Ok(())
    }
}

fn multiset_greater(lhs: &[Abs], rhs: &[Abs], variant: SubtermVariant, stack: &[MolType]) -> bool {
    let mut l: Vec<Option<&Abs>> = lhs.iter().map(Some).collect();
    let mut rest = Vec::new();
    for r in rhs {
        match l.iter().position(|x| *x == Some(r)) {
            Some(i) => l[i] = None,
            None => rest.push(r),
        }
    }
    let l: Vec<&Abs> = l.into_iter().flatten().collect();
    !l.is_empty() && rest.iter().all(|r| l.iter().any(|t| strictly_below(r, t, variant, stack)))
}

/// `u` is strictly below `t` in the chosen subterm ordering.
///
/// `stack` gives the types of right-hand-side binders enclosing `u`
/// (outermost first); under the structural variant an index escaping `u`
/// may coincide with a binder of `t` of the same type.
pub fn strictly_below(u: &Abs, t: &Abs, variant: SubtermVariant, stack: &[MolType]) -> bool {
    let k = u.arity();
    let closed = u.body.dangling(k).is_empty();
    let subs = t.body.subterms_with_depth();
    // binder types of t along the path to each subterm, innermost last
    let typed = |sub_depth_types: &[MolType]| -> bool {
        u.body.dangling(k).iter().all(|j| {
            let n = sub_depth_types.len();
            let rhs_ty = stack.len().checked_sub(1 + j).map(|i| &stack[i]);
            let lhs_ty = n.checked_sub(1 + j).map(|i| &sub_depth_types[i]);
            matches!((rhs_ty, lhs_ty), (Some(a), Some(b)) if a == b)
        })
    };
    if k == t.arity() && u.binders == t.binders {
        for (sub, e) in &subs[1..] {
            if closed && **sub == u.body.shift(*e, 0) {
                return true;
            }
        }
    }
    if k == 0 {
        let start = if t.arity() > 0 { 0 } else { 1 };
        for (sub, _) in subs.iter().skip(start) {
            if **sub == u.body {
                if closed {
                    return true;
                }
                if variant == SubtermVariant::Structural {
                    if let Some(types) = binder_types_to(t, sub) {
                        if typed(&types) {
                            return true;
                        }
                    }
                }
            }
        }
    } else {
        // abstractions nested inside t with the same binder types
        for p in nested_abs(&t.body) {
            if p.binders == u.binders && p.body == u.body && (closed || variant == SubtermVariant::Structural) {
                return true;
            }
        }
    }
    false
}

/// Binder types crossed from the root of `t` (including its own binders)
/// down to the subterm `target` (compared by address).
fn binder_types_to(t: &Abs, target: &MetaTerm) -> Option<Vec<MolType>> {
    fn go(cur: &MetaTerm, target: &MetaTerm, acc: &mut Vec<MolType>) -> bool {
        if std::ptr::eq(cur, target) {
            return true;
        }
        match cur {
            MetaTerm::Fun(_, args) => {
                for a in args {
                    let base = acc.len();
                    acc.extend(a.binders.iter().cloned());
                    if go(&a.body, target, acc) {
                        return true;
                    }
                    acc.truncate(base);
                }
                false
            }
            MetaTerm::Meta(_, args) => args.iter().any(|a| go(a, target, acc)),
            _ => false,
        }
    }
    let mut acc = t.binders.clone();
    if go(&t.body, target, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

fn nested_abs(t: &MetaTerm) -> Vec<&Abs> {
    let mut out = Vec::new();
    fn go<'a>(t: &'a MetaTerm, out: &mut Vec<&'a Abs>) {
        match t {
            MetaTerm::Fun(_, args) => {
                for a in args {
                    if a.arity() > 0 {
                        out.push(a);
                    }
                    go(&a.body, out);
                }
            }
            MetaTerm::Meta(_, args) => args.iter().for_each(|a| go(a, out)),
            _ => {}
        }
    }
    go(t, &mut out);
    out
}
