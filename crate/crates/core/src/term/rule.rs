use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::subst::is_second_order_pattern;
use super::syntax::MetaTerm;
use super::types::{name, MolType, Name, Signature};
use super::typing::{typecheck, MetaContext, TypeError};

/// Typed rewrite rule `lhs -> rhs` over a metavariable context.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    pub name: Name,
    pub context: MetaContext,
    pub lhs: MetaTerm,
    pub rhs: MetaTerm,
    pub ty: MolType,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule ({0}): left-hand side is not a function term")]
    NotAFunction(String),
    #[error("rule ({0}): left-hand side is not a second-order pattern")]
    NotAPattern(String),
    #[error("rule ({rule}): metavariable {meta} of the right-hand side does not occur on the left")]
    UnboundRhsMeta { rule: String, meta: String },
    #[error("rule ({0}): free variables are not allowed in rules")]
    FreeVariable(String),
    #[error("rule ({rule}): {err}")]
    Type { rule: String, err: TypeError },
    #[error("rule ({rule}): sides have different types {lhs} and {rhs}")]
    SideTypes { rule: String, lhs: String, rhs: String },
    #[error("duplicate rule name ({0})")]
    DuplicateName(String),
}

impl Rule {
    /// Builds a rule and checks its invariants.
    pub fn new(sig: &Signature, rule_name: &str, context: MetaContext, lhs: MetaTerm, rhs: MetaTerm) -> Result<Rule, RuleError> {
        let r = rule_name.to_string();
        if !matches!(lhs, MetaTerm::Fun(..)) {
            return Err(RuleError::NotAFunction(r));
        }
        if !is_second_order_pattern(&lhs) {
            return Err(RuleError::NotAPattern(r));
        }
        if !lhs.free_vars().is_empty() || !rhs.free_vars().is_empty() || !lhs.is_closed() || !rhs.is_closed() {
            return Err(RuleError::FreeVariable(r));
        }
        let lm = lhs.metavars();
        if let Some(m) = rhs.metavars().difference(&lm).next() {
            return Err(RuleError::UnboundRhsMeta { rule: r, meta: m.to_string() });
        }
        let lt = typecheck(sig, &context, &[], &lhs).map_err(|err| RuleError::Type { rule: r.clone(), err })?;
        let rt = typecheck(sig, &context, &[], &rhs).map_err(|err| RuleError::Type { rule: r.clone(), err })?;
        if lt != rt {
            return Err(RuleError::SideTypes { rule: r, lhs: lt.to_string(), rhs: rt.to_string() });
        }
        Ok(Rule { name: name(rule_name), context, lhs, rhs, ty: lt })
    }

    /// The defined symbol heading the left-hand side.
    pub fn head(&self) -> &Name {
        match &self.lhs {
            MetaTerm::Fun(f, _) => f,
            _ => unreachable!("rule lhs is a function term"),
        }
    }

    pub fn fun_symbols(&self) -> BTreeSet<Name> {
        let mut s = self.lhs.fun_symbols();
        s.extend(self.rhs.fun_symbols());
        s
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {} -> {}", self.name, self.lhs, self.rhs)
    }
}

/// Signature plus rules. Roles are derived: a symbol is defined iff it
/// heads some left-hand side, otherwise it is a constructor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComputationSystem {
    pub signature: Signature,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    Defined,
    Constructor,
}

impl ComputationSystem {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Self, RuleError> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.name.clone()) {
                return Err(RuleError::DuplicateName(r.name.to_string()));
            }
        }
        Ok(ComputationSystem { signature, rules })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Same signature, different rules (names assumed distinct).
    pub fn with_rules(&self, rules: Vec<Rule>) -> Self {
        ComputationSystem { signature: self.signature.clone(), rules }
    }

    pub fn defined(&self) -> BTreeSet<Name> {
        self.rules.iter().map(|r| r.head().clone()).collect()
    }

    pub fn is_defined(&self, f: &str) -> bool {
        self.rules.iter().any(|r| &**r.head() == f)
    }

    pub fn role(&self, f: &str) -> Role {
        if self.is_defined(f) {
            Role::Defined
        } else {
            Role::Constructor
        }
    }

    pub fn constructors(&self) -> Vec<Name> {
        let d = self.defined();
        self.signature.names().filter(|n| !d.contains(*n)).cloned().collect()
    }

    pub fn rule(&self, rule_name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| &*r.name == rule_name)
    }

    /// Mol types mentioned by the signature and the rules.
    pub fn mol_types(&self) -> BTreeSet<MolType> {
        let mut out = self.signature.mol_types();
        for r in &self.rules {
            out.insert(r.ty.clone());
            for d in r.context.iter() {
                out.extend(d.args.iter().cloned());
                out.insert(d.result.clone());
            }
        }
        out
    }
}
