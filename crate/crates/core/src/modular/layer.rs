use std::collections::BTreeSet;
use std::fmt;

use crate::schema::{accessible_metavars, TypeOrder};
use crate::term::{MetaTerm, Name, Rule, Signature};

/// Offending A-headed sub-meta-term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LayerViolation {
    pub rule: Name,
    pub side: &'static str,
    pub subterm: MetaTerm,
    pub reason: String,
}

impl fmt::Display for LayerViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {} side: {} ({})", self.rule, self.side, self.subterm, self.reason)
    }
}

fn meta_args_bound(t: &MetaTerm) -> Option<&MetaTerm> {
    let mut bad = None;
    t.visit(&mut |s| {
        if bad.is_none() {
            if let MetaTerm::Meta(_, args) = s {
                if !args.iter().all(|a| matches!(a, MetaTerm::BVar(_))) {
                    bad = Some(s);
                }
            }
        }
    });
    bad
}

/// Every A-headed sub-meta-term on either side uses only `sigma_a` and
/// `theta` symbols, and its metavariables are applied to bound variables.
pub fn check_a_layer(rule: &Rule, sigma_a: &BTreeSet<Name>, theta: &BTreeSet<Name>) -> Result<(), LayerViolation> {
    for (side, t) in [("left", &rule.lhs), ("right", &rule.rhs)] {
        let mut err = None;
        t.visit(&mut |s| {
            if err.is_some() {
                return;
            }
            let MetaTerm::Fun(f, _) = s else { return };
            if !sigma_a.contains(f) {
                return;
            }
            if let Some(g) = s.fun_symbols().into_iter().find(|g| !sigma_a.contains(g) && !theta.contains(g)) {
                err = Some((s.clone(), format!("symbol {g} is outside the A-layer")));
            } else if let Some(m) = meta_args_bound(s) {
                err = Some((s.clone(), format!("{m} is not a pattern")));
            }
        });
        if let Some((subterm, reason)) = err {
            return Err(LayerViolation { rule: rule.name.clone(), side, subterm, reason });
        }
    }
    Ok(())
}

/// Every metavariable of each rhs is accessible in some lhs argument.
pub fn check_a_accessible(sig: &Signature, rules_a: &[Rule], ord: &TypeOrder) -> Result<(), (Name, Name)> {
    for r in rules_a {
        let MetaTerm::Fun(_, args) = &r.lhs else { continue };
        let mut acc = BTreeSet::new();
        for a in args {
            acc.extend(accessible_metavars(sig, a, ord));
        }
        if let Some(m) = r.rhs.metavars().into_iter().find(|m| !acc.contains(m)) {
            return Err((r.name.clone(), m));
        }
    }
    Ok(())
}
