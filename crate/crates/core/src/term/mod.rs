//! Molecular types, signatures, meta-terms, typing and substitution.

mod print;
mod rule;
mod subst;
mod syntax;
mod types;
mod typing;

pub use print::print_in_scope;
pub use rule::{ComputationSystem, Role, Rule, RuleError};
pub use subst::{
    distinct_bound_vars, instantiate, is_second_order_pattern, substitute_metavars, substitute_metavars_at, substitute_metavars_partial,
    substitute_vars, Assignment, SubstError,
};
pub use syntax::{Abs, MetaTerm, Position, Term};
pub use types::{name, ArgType, FunType, MolType, Name, Signature};
pub use typing::{typecheck, typecheck_under, MetaContext, MetaDecl, TypeError};
