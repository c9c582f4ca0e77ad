use std::fmt;

use thiserror::Error;

use super::syntax::MetaTerm;
use super::types::{MolType, Name, Signature};

/// Declaration `M : a1,...,an -> b` of a metavariable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MetaDecl {
    pub name: Name,
    pub args: Vec<MolType>,
    pub result: MolType,
}

impl fmt::Display for MetaDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.name)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "{} -> ", args.join(","))?;
        }
        write!(f, "{}", self.result)
    }
}

/// Ordered metavariable context with distinct names.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct MetaContext {
    entries: Vec<MetaDecl>,
}

impl MetaContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a declaration; returns false if the name was already present.
    pub fn push(&mut self, m: &str, args: Vec<MolType>, result: MolType) -> bool {
        if self.get(m).is_some() {
            return false;
        }
        self.entries.push(MetaDecl { name: super::types::name(m), args, result });
        true
    }

    pub fn get(&self, m: &str) -> Option<&MetaDecl> {
        self.entries.iter().find(|d| &*d.name == m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetaDecl> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable in {0}")]
    UnboundVariable(String),
    #[error("unbound metavariable {0}")]
    UnboundMetavariable(String),
    #[error("arity mismatch in {term}: expected {expected}, got {got}")]
    ArityMismatch { term: String, expected: usize, got: usize },
    #[error("type mismatch in {term}: expected {expected}, got {got}")]
    TypeMismatch { term: String, expected: String, got: String },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
}

/// Infers the type of `t` under metavariable context `ctx` and free
/// variable environment `env`.
pub fn typecheck(sig: &Signature, ctx: &MetaContext, env: &[(Name, MolType)], t: &MetaTerm) -> Result<MolType, TypeError> {
    typecheck_under(sig, ctx, env, &mut Vec::new(), t)
}

/// As [`typecheck`], with `bound` giving the types of enclosing binders
/// (outermost first) for dangling indices.
pub fn typecheck_under(
    sig: &Signature,
    ctx: &MetaContext,
    env: &[(Name, MolType)],
    bound: &mut Vec<MolType>,
    t: &MetaTerm,
) -> Result<MolType, TypeError> {
    match t {
        MetaTerm::BVar(i) => {
            if *i < bound.len() {
                Ok(bound[bound.len() - 1 - i].clone())
            } else {
                Err(TypeError::UnboundVariable(t.to_string()))
            }
        }
        MetaTerm::FVar(x) => env
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, ty)| ty.clone())
            .ok_or_else(|| TypeError::UnboundVariable(t.to_string())),
        MetaTerm::Fun(f, args) => {
            let fty = sig.get(f).ok_or_else(|| TypeError::UnknownSymbol(f.to_string()))?;
            if fty.args.len() != args.len() {
                return Err(TypeError::ArityMismatch { term: t.to_string(), expected: fty.args.len(), got: args.len() });
            }
            for (decl, a) in fty.args.iter().zip(args) {
                if decl.binders.len() != a.binders.len() {
                    return Err(TypeError::ArityMismatch {
                        term: t.to_string(),
                        expected: decl.binders.len(),
                        got: a.binders.len(),
                    });
                }
                if decl.binders != a.binders {
                    return Err(TypeError::TypeMismatch {
                        term: a.to_string(),
                        expected: format!("binders {}", join(&decl.binders)),
                        got: format!("binders {}", join(&a.binders)),
                    });
                }
                let base = bound.len();
                bound.extend(a.binders.iter().cloned());
                let got = typecheck_under(sig, ctx, env, bound, &a.body);
                bound.truncate(base);
                let got = got?;
                if got != decl.result {
                    return Err(TypeError::TypeMismatch {
                        term: a.body.to_string(),
                        expected: decl.result.to_string(),
                        got: got.to_string(),
                    });
                }
            }
            Ok(fty.result.clone())
        }
        MetaTerm::Meta(m, args) => {
            let decl = ctx.get(m).ok_or_else(|| TypeError::UnboundMetavariable(m.to_string()))?;
            if decl.args.len() != args.len() {
                return Err(TypeError::ArityMismatch { term: t.to_string(), expected: decl.args.len(), got: args.len() });
            }
            for (want, a) in decl.args.iter().zip(args) {
                let got = typecheck_under(sig, ctx, env, bound, a)?;
                if &got != want {
                    return Err(TypeError::TypeMismatch { term: a.to_string(), expected: want.to_string(), got: got.to_string() });
                }
            }
            Ok(decl.result.clone())
        }
    }
}

fn join(ts: &[MolType]) -> String {
    let v: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
    format!("({})", v.join(","))
}
