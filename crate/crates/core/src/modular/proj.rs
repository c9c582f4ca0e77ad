use std::collections::BTreeSet;

use thiserror::Error;

use crate::term::{ArgType, FunType, MetaContext, MetaTerm, MolType, Rule, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("projection symbol {0} clashes with a declared symbol")]
pub struct NameClash(pub String);

pub fn pair_symbol(b: &MolType) -> String {
    format!("pair_{}", b.mangle())
}

pub fn bot_symbol(b: &MolType) -> String {
    format!("bot_{}", b.mangle())
}

/// Pairing and bottom constructors per type, with the two projection
/// rules `pair(M1,M2) -> M1` and `pair(M1,M2) -> M2`.
pub fn build_projection_rules(types: &BTreeSet<MolType>, existing: &Signature) -> Result<(Signature, Vec<Rule>), NameClash> {
    let mut ext = Signature::new();
    ext.atomics = existing.atomics.clone();
    ext.type_cons = existing.type_cons.clone();
    let mut rules = Vec::new();
    for b in types {
        let pair = pair_symbol(b);
        let bot = bot_symbol(b);
        for s in [&pair, &bot] {
            if existing.contains(s) {
                return Err(NameClash(s.clone()));
            }
        }
        ext.declare(&bot, FunType::constant(b.clone()));
        ext.declare(&pair, FunType::new(vec![ArgType::first_order(b.clone()), ArgType::first_order(b.clone())], b.clone()));
    }
    let full = existing.merged(&ext);
    for b in types {
        let pair = pair_symbol(b);
        let mut ctx = MetaContext::new();
        ctx.push("M1", vec![], b.clone());
        ctx.push("M2", vec![], b.clone());
        let lhs = MetaTerm::app(&pair, vec![MetaTerm::meta("M1", vec![]), MetaTerm::meta("M2", vec![])]);
        for (i, m) in ["M1", "M2"].iter().enumerate() {
            let r = Rule::new(&full, &format!("proj{}_{}", i + 1, b.mangle()), ctx.clone(), lhs.clone(), MetaTerm::meta(m, vec![]))
                .expect("projection rule is well-formed");
            rules.push(r);
        }
    }
    Ok((ext, rules))
}
