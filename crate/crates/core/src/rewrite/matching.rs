use thiserror::Error;

use crate::term::{Abs, Assignment, MetaContext, MetaTerm, MolType, Name, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("not a second-order pattern: {0}")]
    NotAPattern(String),
}

/// Second-order pattern matching.
///
/// Returns the most general assignment `theta` with
/// `substitute_metavars(theta, pattern) == subject`, or `None`. The subject
/// may mention bound variables of an enclosing context (indices escaping
/// the subject); such variables may appear in metavariable bodies.
pub fn match_second_order(pattern: &MetaTerm, subject: &Term, ctx: &MetaContext) -> Result<Option<Assignment>, MatchError> {
    let mut m = Matcher { theta: Assignment::new(), ctx };
    let mut stack = Vec::new();
    if m.go(pattern, subject, &mut stack)? {
        Ok(Some(m.theta))
    } else {
        Ok(None)
    }
}

struct Matcher<'a> {
    theta: Assignment,
    ctx: &'a MetaContext,
}

impl Matcher<'_> {
    fn go(&mut self, p: &MetaTerm, s: &MetaTerm, stack: &mut Vec<(MolType, Name)>) -> Result<bool, MatchError> {
        match (p, s) {
            (MetaTerm::BVar(i), MetaTerm::BVar(j)) => Ok(i == j),
            (MetaTerm::FVar(x), MetaTerm::FVar(y)) => Ok(x == y),
            (MetaTerm::Fun(f, pargs), MetaTerm::Fun(g, sargs)) => {
                if f != g || pargs.len() != sargs.len() {
                    return Ok(false);
                }
                for (pa, sa) in pargs.iter().zip(sargs) {
                    if pa.binders != sa.binders {
                        return Ok(false);
                    }
                    let base = stack.len();
                    stack.extend(pa.binders.iter().cloned().zip(pa.hints.iter().cloned()));
                    let ok = self.go(&pa.body, &sa.body, stack);
                    stack.truncate(base);
                    if !ok? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (MetaTerm::Meta(m, xs), _) => {
                let depth = stack.len();
                let mut idx = Vec::with_capacity(xs.len());
                for x in xs {
                    match x {
                        MetaTerm::BVar(i) if *i < depth && !idx.contains(i) => idx.push(*i),
                        _ => return Err(MatchError::NotAPattern(p.to_string())),
                    }
                }
                let Some(body) = abstract_vars(s, depth, &idx, 0) else {
                    return Ok(false);
                };
                let binders: Vec<MolType> = match self.ctx.get(m) {
                    Some(d) => d.args.clone(),
                    None => idx.iter().map(|i| stack[depth - 1 - i].0.clone()).collect(),
                };
                let hints = idx.iter().map(|i| stack[depth - 1 - i].1.clone()).collect();
                let abs = Abs::with_hints(binders, hints, body);
                match self.theta.get(m) {
                    Some(prev) => Ok(prev == &abs),
                    None => {
                        self.theta.insert(m.clone(), abs);
                        Ok(true)
                    }
                }
            }
            _ => Ok(false),
        }
    }
}

/// Rewrites `s` (seen under `depth` pattern binders) into the body of an
/// abstraction over the variables `idx`; fails when another pattern-bound
/// variable occurs.
fn abstract_vars(s: &MetaTerm, depth: usize, idx: &[usize], local: usize) -> Option<MetaTerm> {
    let k = idx.len();
    Some(match s {
        MetaTerm::BVar(i) => {
            if *i < local {
                MetaTerm::BVar(*i)
            } else {
                let j = i - local;
                if j < depth {
                    let pos = idx.iter().position(|x| *x == j)?;
                    MetaTerm::BVar(local + k - 1 - pos)
                } else {
                    MetaTerm::BVar(i - depth + k)
                }
            }
        }
        MetaTerm::FVar(_) => s.clone(),
        MetaTerm::Fun(f, args) => {
            let mut out = Vec::with_capacity(args.len());
            for a in args {
                out.push(Abs {
                    binders: a.binders.clone(),
                    hints: a.hints.clone(),
                    body: abstract_vars(&a.body, depth, idx, local + a.arity())?,
                });
            }
            MetaTerm::Fun(f.clone(), out)
        }
        MetaTerm::Meta(m, args) => {
            MetaTerm::Meta(m.clone(), args.iter().map(|a| abstract_vars(a, depth, idx, local)).collect::<Option<_>>()?)
        }
    })
}
