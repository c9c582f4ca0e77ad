//! Benchmark inputs.

use modsn_core::frontend::{corpus, parse_manifest, parse_term};
use modsn_core::{Manifest, Term};

pub fn system(name: &str) -> Manifest {
    parse_manifest(corpus(name).expect("bundled system")).expect("bundled systems parse")
}

/// `appv(runState(TM), 0)`, the state-handler example.
pub fn run_state_term(m: &Manifest) -> Term {
    parse_term(&m.system.signature, "appv(runState(get(x.put(inc(x), get(y.put(y, get(z.return(z))))))), 0)")
        .expect("effect term parses")
}
