//! Trace map, tuple builder, trace labelling, labelled rules and the
//! simulation check over a split system.

mod labelled;
mod trace;

pub use labelled::{b_symbols, forget, LAbs, LStep, LTerm, LabelledRule, Simulation, SimulationError};
pub use trace::{tuple_elements, tuple_of_set, Lab, LabBudget, TraceError};
