//! The General Schema: type order, precedence, accessibility and the
//! computable closure.

mod access;
mod check;
mod closure;
mod order;

pub use access::{accessible_in, accessible_metavars, replay_path, AccStep, Traversal};
pub use check::{check_general_schema, in_computable_closure, replay_general_schema, GsResult, PrecedenceConflict, RuleOutcome};
pub use closure::{strictly_below, Clause, Clause5, Closure, Decrease, Derivation, Failure, GsConfig, SubtermVariant};
pub use order::{default_type_order, synthesize_precedence, CallEdge, SymbolPrecedence, TypeOrder, TypeOrderKind};
