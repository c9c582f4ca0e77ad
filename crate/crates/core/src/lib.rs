//! Second-order computation systems: typed rewriting with binders and
//! metavariables, the General Schema, modular termination via projection
//! rules and linear weights, and a trace-labelling test harness.

pub mod frontend;
pub mod gen;
pub mod labelling;
pub mod modular;
pub mod rewrite;
pub mod schema;
pub mod term;

pub use frontend::{parse_manifest, run_check, CheckStrategy, Manifest, ProofReport, Verdict};
pub use term::{Abs, Assignment, ComputationSystem, FunType, MetaContext, MetaTerm, MolType, Name, Rule, Signature, Term};
