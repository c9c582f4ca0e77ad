use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::syntax::{Abs, MetaTerm, Term};
use super::types::{MolType, Name, Signature};
use super::typing::{typecheck, TypeError};

/// Metavariable assignment `{M1 -> x1.s1, ...}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Assignment {
    map: BTreeMap<Name, Abs>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, m: Name, body: Abs) -> Option<Abs> {
        self.map.insert(m, body)
    }

    pub fn bind(mut self, m: &str, body: Abs) -> Self {
        self.map.insert(super::types::name(m), body);
        self
    }

    pub fn get(&self, m: &str) -> Option<&Abs> {
        self.map.get(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Abs)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Applies `f` to every body.
    pub fn map_bodies(&self, mut f: impl FnMut(&Abs) -> MetaTerm) -> Assignment {
        Assignment {
            map: self
                .map
                .iter()
                .map(|(m, a)| (m.clone(), Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: f(a) }))
                .collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (m, a)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m} := {a}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("no binding for metavariable {0}")]
    MissingBinding(String),
    #[error("metavariable {name} applied to {got} arguments, bound with {expected} binders")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("type mismatch substituting for {var}: expected {expected}, got {got}")]
    TypeMismatch { var: String, expected: String, got: String },
}

/// Capture-avoiding simultaneous substitution of terms for free variables.
///
/// Replacements are typed under `env` and must have the variable's type.
pub fn substitute_vars(
    sig: &Signature,
    env: &[(Name, MolType)],
    t: &Term,
    sub: &BTreeMap<Name, Term>,
) -> Result<Term, SubstError> {
    for (x, r) in sub {
        let want = env.iter().rev().find(|(n, _)| n == x).map(|(_, ty)| ty.clone());
        let got = typecheck(sig, &Default::default(), env, r)?;
        match want {
            Some(w) if w != got => {
                return Err(SubstError::TypeMismatch { var: x.to_string(), expected: w.to_string(), got: got.to_string() })
            }
            None => return Err(TypeError::UnboundVariable(x.to_string()).into()),
            _ => {}
        }
    }
    Ok(replace_free(t, sub, 0))
}

fn replace_free(t: &MetaTerm, sub: &BTreeMap<Name, Term>, depth: usize) -> MetaTerm {
    match t {
        MetaTerm::BVar(_) => t.clone(),
        MetaTerm::FVar(x) => match sub.get(x) {
            Some(r) => r.shift(depth, 0),
            None => t.clone(),
        },
        MetaTerm::Fun(f, args) => MetaTerm::Fun(
            f.clone(),
            args.iter()
                .map(|a| Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: replace_free(&a.body, sub, depth + a.arity()) })
                .collect(),
        ),
        MetaTerm::Meta(m, args) => MetaTerm::Meta(m.clone(), args.iter().map(|a| replace_free(a, sub, depth)).collect()),
    }
}

/// Substitution of terms for metavariables: `M[t1..tn]` becomes the body
/// bound to `M` with its binders replaced by the (substituted) arguments.
pub fn substitute_metavars(theta: &Assignment, t: &MetaTerm) -> Result<MetaTerm, SubstError> {
    msubst(theta, t, 0, true)
}

/// As [`substitute_metavars`] for a meta-term sitting under `depth`
/// binders of the site the assignment was computed for.
pub fn substitute_metavars_at(theta: &Assignment, t: &MetaTerm, depth: usize) -> Result<MetaTerm, SubstError> {
    msubst(theta, t, depth, true)
}

/// As [`substitute_metavars`], leaving unbound metavariables in place.
pub fn substitute_metavars_partial(theta: &Assignment, t: &MetaTerm) -> MetaTerm {
    msubst(theta, t, 0, false).expect("partial substitution cannot miss a binding")
}

fn msubst(theta: &Assignment, t: &MetaTerm, depth: usize, total: bool) -> Result<MetaTerm, SubstError> {
    Ok(match t {
        MetaTerm::BVar(_) | MetaTerm::FVar(_) => t.clone(),
        MetaTerm::Fun(f, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(Abs {
                    binders: a.binders.clone(),
                    hints: a.hints.clone(),
                    body: msubst(theta, &a.body, depth + a.arity(), total)?,
                });
            }
            MetaTerm::Fun(f.clone(), out)
        }
        MetaTerm::Meta(m, args) => {
            let args = args.iter().map(|a| msubst(theta, a, depth, total)).collect::<Result<Vec<_>, _>>()?;
            match theta.get(m) {
                Some(abs) => {
                    if abs.arity() != args.len() {
                        return Err(SubstError::ArityMismatch { name: m.to_string(), expected: abs.arity(), got: args.len() });
                    }
                    instantiate(&abs.body, &args, depth)
                }
                None if total => return Err(SubstError::MissingBinding(m.to_string())),
                None => MetaTerm::Meta(m.clone(), args),
            }
        }
    })
}

/// Instantiates the binders of an abstraction body with `args`.
///
/// `body` lives under `args.len()` binders (the last argument is index 0);
/// indices beyond them refer to binders outside the abstraction's original
/// site and are re-based onto the `depth` binders enclosing the new site.
/// The arguments themselves are expressed relative to the new site.
pub fn instantiate(body: &MetaTerm, args: &[MetaTerm], depth: usize) -> MetaTerm {
    inst(body, args, depth, 0)
}

fn inst(t: &MetaTerm, args: &[MetaTerm], depth: usize, local: usize) -> MetaTerm {
    let k = args.len();
    match t {
        MetaTerm::BVar(i) => {
            if *i < local {
                MetaTerm::BVar(*i)
            } else if i - local < k {
                args[k - 1 - (i - local)].shift(local, 0)
            } else {
                MetaTerm::BVar(i - k + depth)
            }
        }
        MetaTerm::FVar(_) => t.clone(),
        MetaTerm::Fun(f, fargs) => MetaTerm::Fun(
            f.clone(),
            fargs
                .iter()
                .map(|a| Abs {
                    binders: a.binders.clone(),
                    hints: a.hints.clone(),
                    body: inst(&a.body, args, depth, local + a.arity()),
                })
                .collect(),
        ),
        MetaTerm::Meta(m, margs) => MetaTerm::Meta(m.clone(), margs.iter().map(|a| inst(a, args, depth, local)).collect()),
    }
}

/// True iff every meta-application is `M[x1..xn]` with pairwise distinct
/// bound variables, each bound above the occurrence within `t`.
pub fn is_second_order_pattern(t: &MetaTerm) -> bool {
    pattern_at(t, 0)
}

fn pattern_at(t: &MetaTerm, depth: usize) -> bool {
    match t {
        MetaTerm::BVar(_) | MetaTerm::FVar(_) => true,
        MetaTerm::Fun(_, args) => args.iter().all(|a| pattern_at(&a.body, depth + a.arity())),
        MetaTerm::Meta(_, args) => distinct_bound_vars(args, depth, true),
    }
}

/// Arguments are bound variables bound within `depth` binders; with
/// `distinct`, pairwise distinct.
pub fn distinct_bound_vars(args: &[MetaTerm], depth: usize, distinct: bool) -> bool {
    let mut seen = Vec::new();
    for a in args {
        match a {
            MetaTerm::BVar(i) if *i < depth => {
                if distinct && seen.contains(i) {
                    return false;
                }
                seen.push(*i);
            }
            _ => return false,
        }
    }
    true
}
