//! Second-order pattern matching, one-step rewriting, normalization, a
//! bounded termination oracle and loop search.

mod matching;
mod oracle;
mod step;

pub use matching::{match_second_order, MatchError};
pub use oracle::{find_loop, find_loop_from, sn_oracle, Budget, LoopWitness, OracleResult, WitnessStep};
pub use step::{normalize, one_step_reducts, BudgetExhausted, Normalized, Redex, Rewriter, Strategy};
