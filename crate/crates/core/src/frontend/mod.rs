//! Input files, the check driver, verdict reports and the bundled corpus.

mod corpus;
mod lexer;
mod manifest;
mod report;
mod run;

pub use corpus::{corpus, corpus_names};
pub use manifest::{
    parse_manifest, parse_meta_term, parse_term, parse_term_typed, Manifest, ManifestError, Options, PrecDecl, SplitDirective,
    WeightDecl,
};
pub use report::{parse_machine_report, Format, Method, Obligation, ProofReport, ReportParseError, Status, Verdict};
pub use run::{
    run_check, run_check_with, seeds, CheckConfig, CheckStrategy, SplitChoice, DEFAULT_ORACLE_DEPTH, DEFAULT_WEIGHTS_BOUND,
    LOOP_STEPS,
};
