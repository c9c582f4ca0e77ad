use std::collections::BTreeSet;
use std::fmt::{self, Write};

use super::syntax::{Abs, MetaTerm};
use super::types::Name;

impl fmt::Display for MetaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_term(self, &mut Vec::new(), &mut out);
        f.write_str(&out)
    }
}

impl fmt::Display for Abs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_abs(self, &mut Vec::new(), &mut out);
        f.write_str(&out)
    }
}

/// Prints `t` under an enclosing binder scope (outermost name first).
pub fn print_in_scope(t: &MetaTerm, scope: &[String]) -> String {
    let mut names = scope.to_vec();
    let mut out = String::new();
    write_term(t, &mut names, &mut out);
    out
}

fn write_term(t: &MetaTerm, names: &mut Vec<String>, out: &mut String) {
    match t {
        MetaTerm::BVar(i) => {
            if *i < names.len() {
                out.push_str(&names[names.len() - 1 - i]);
            } else {
                let _ = write!(out, "#{}", i - names.len());
            }
        }
        MetaTerm::FVar(x) => out.push_str(x),
        MetaTerm::Fun(f, args) => {
            out.push_str(f);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_abs(a, names, out);
                }
                out.push(')');
            }
        }
        MetaTerm::Meta(m, args) => {
            out.push_str(m);
            if !args.is_empty() {
                out.push('[');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    write_term(a, names, out);
                }
                out.push(']');
            }
        }
    }
}

fn write_abs(a: &Abs, names: &mut Vec<String>, out: &mut String) {
    if a.binders.is_empty() {
        write_term(&a.body, names, out);
        return;
    }
    let mut avoid: BTreeSet<String> = names.iter().cloned().collect();
    a.body.visit(&mut |t| match t {
        MetaTerm::FVar(x) | MetaTerm::Meta(x, _) => {
            avoid.insert(x.to_string());
        }
        MetaTerm::Fun(f, _) => {
            avoid.insert(f.to_string());
        }
        _ => {}
    });
    let base = names.len();
    for h in &a.hints {
        let n = fresh(h, &avoid);
        avoid.insert(n.clone());
        names.push(n.clone());
        out.push_str(&n);
        out.push('.');
    }
    write_term(&a.body, names, out);
    names.truncate(base);
}

fn fresh(hint: &Name, avoid: &BTreeSet<String>) -> String {
    let mut n = hint.to_string();
    while avoid.contains(&n) {
        n.push('\'');
    }
    n
}
