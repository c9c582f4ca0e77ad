use super::closure::{Closure, Derivation, Failure, GsConfig};
use super::order::{CallEdge, SymbolPrecedence, TypeOrder};
use crate::term::{ComputationSystem, MetaTerm, Name, Rule};

/// Outcome of the schema check for one rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleOutcome {
    pub rule: Name,
    pub result: Result<Derivation, Failure>,
}

/// A precedence class forced by mutual calls, with the rules creating it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrecedenceConflict {
    pub symbols: Vec<Name>,
    pub edges: Vec<CallEdge>,
}

impl PrecedenceConflict {
    pub fn describe(&self) -> String {
        let syms: Vec<&str> = self.symbols.iter().map(|s| &**s).collect();
        let needs: Vec<String> = self.edges.iter().map(|e| format!("({}) requires {} > {}", e.rule, e.from, e.to)).collect();
        format!("{} are mutually recursive: {}", syms.join(", "), needs.join(" while "))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GsResult {
    pub outcomes: Vec<RuleOutcome>,
    pub conflicts: Vec<PrecedenceConflict>,
    pub precedence: SymbolPrecedence,
}

impl GsResult {
    pub fn is_yes(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Name, &Failure)> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().err().map(|f| (&o.rule, f)))
    }

    pub fn first_failure(&self) -> Option<(&Name, &Failure)> {
        self.failures().next()
    }
}

fn closure_for<'a>(
    cs: &'a ComputationSystem,
    r: &'a Rule,
    ord: &'a TypeOrder,
    prec: &'a SymbolPrecedence,
    config: GsConfig,
) -> Closure<'a> {
    let MetaTerm::Fun(f, args) = &r.lhs else { unreachable!("rule lhs is a function term") };
    Closure::new(&cs.signature, f.clone(), args, ord, prec, config)
}

/// Checks every rule's right-hand side for membership in the computable
/// closure of its left-hand side.
pub fn check_general_schema(cs: &ComputationSystem, ord: &TypeOrder, prec: &SymbolPrecedence, config: GsConfig) -> GsResult {
    let mut outcomes = Vec::new();
    for r in &cs.rules {
        let cl = closure_for(cs, r, ord, prec, config);
        outcomes.push(RuleOutcome { rule: r.name.clone(), result: cl.derive(&r.rhs) });
    }
    let failing_heads: Vec<&Name> =
        outcomes.iter().filter(|o| o.result.is_err()).map(|o| cs.rule(&o.rule).expect("outcome for known rule").head()).collect();
    let conflicts = prec
        .cycles()
        .into_iter()
        .filter(|(members, _)| members.iter().any(|m| failing_heads.contains(&m)))
        .map(|(symbols, edges)| PrecedenceConflict { symbols, edges })
        .collect();
    GsResult { outcomes, conflicts, precedence: prec.clone() }
}

/// Re-validates every derivation of a schema result clause by clause.
pub fn replay_general_schema(
    cs: &ComputationSystem,
    ord: &TypeOrder,
    prec: &SymbolPrecedence,
    config: GsConfig,
    result: &GsResult,
) -> Result<(), String> {
    for o in &result.outcomes {
        let r = cs.rule(&o.rule).ok_or_else(|| format!("unknown rule {}", o.rule))?;
        if let Ok(d) = &o.result {
            closure_for(cs, r, ord, prec, config).replay(&r.rhs, d).map_err(|e| format!("({}): {e}", r.name))?;
        }
    }
    Ok(())
}

/// Membership test `candidate in CC(f(lhs_args))`.
pub fn in_computable_closure(
    cs: &ComputationSystem,
    f: &str,
    lhs_args: &[crate::term::Abs],
    candidate: &MetaTerm,
    ord: &TypeOrder,
    prec: &SymbolPrecedence,
    config: GsConfig,
) -> Result<Derivation, Failure> {
    Closure::new(&cs.signature, crate::term::name(f), lhs_args, ord, prec, config).derive(candidate)
}
