//! Modular termination: A/B splits, the A-layer condition, projection
//! rules, linear weights and a first-order backend.

mod check;
mod dp;
mod fo;
mod layer;
mod proj;
mod split;
mod weights;

pub use check::{
    a_with_projections, check_modular_sn, complete_weights, projection_types, run_external, AProof, FoBackend, ModularResult,
    Obligation, Status, OBLIGATION_ACCESSIBLE, OBLIGATION_A_PROJ, OBLIGATION_B_GS, OBLIGATION_LAYER,
};
pub use dp::{check_interpretation, dependency_pairs, prove_dp, unifiable, DependencyPair, DpProof, Interpretation, MaxLinear};
pub use fo::{emit_fo_trs, fo_rule, fo_rules, parse_fo_trs, render_fo_trs, FoError, FoRule, FoTerm};
pub use layer::{check_a_accessible, check_a_layer, LayerViolation};
pub use proj::{bot_symbol, build_projection_rules, pair_symbol, NameClash};
pub use split::{is_first_order_rule, split_fo_ho, InvalidSplit, SplitSpec};
pub use weights::{
    find_linear_weights, interpret_weight, redex_hosting, verify_rule, verify_weights, weights_decrease, LinearWeight,
    RuleWeightCheck, WeightError, WeightMap, WeightPolynomial,
};
