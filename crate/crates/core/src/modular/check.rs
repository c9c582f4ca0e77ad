use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::process::Command;

use super::dp::prove_dp;
use super::fo::{emit_fo_trs, fo_rules};
use super::layer::{check_a_accessible, check_a_layer};
use super::proj::{bot_symbol, build_projection_rules, pair_symbol};
use super::split::{InvalidSplit, SplitSpec};
use super::weights::{redex_hosting, verify_weights, find_linear_weights, LinearWeight, WeightMap};
use crate::schema::{check_general_schema, synthesize_precedence, GsConfig, GsResult, TypeOrder};
use crate::term::{ComputationSystem, MolType};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Discharged,
    Failed,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Discharged => "discharged",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
        })
    }
}

/// One proof obligation with its evidence lines.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Obligation {
    pub name: String,
    pub status: Status,
    pub evidence: Vec<String>,
}

impl Obligation {
    pub fn new(name: &str, status: Status, evidence: Vec<String>) -> Self {
        Obligation { name: name.to_string(), status, evidence }
    }
}

/// How the A-part together with the projection rules is shown SN.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FoBackend {
    /// Search bounds (coefficients, constants) for linear weights.
    pub weights_bound: (u64, u64),
    /// User weights, tried before the search.
    pub weights: Option<WeightMap>,
    /// Dependency pairs when weights fail and the A-part is first-order.
    pub dependency_pairs: bool,
    /// External command; replaces the internal backends when set.
    pub external: Option<String>,
}

impl Default for FoBackend {
    fn default() -> Self {
        FoBackend { weights_bound: (2, 2), weights: None, dependency_pairs: true, external: None }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AProof {
    Weights(WeightMap),
    DependencyPairs(Vec<String>),
    External(String),
}

#[derive(Clone, Debug)]
pub struct ModularResult {
    pub split: SplitSpec,
    pub obligations: Vec<Obligation>,
    pub a_proj: ComputationSystem,
    pub a_proof: Option<AProof>,
    pub b_result: Option<GsResult>,
}

impl ModularResult {
    pub fn is_yes(&self) -> bool {
        self.obligations.iter().all(|o| o.status == Status::Discharged)
    }

    pub fn failed(&self) -> Vec<&Obligation> {
        self.obligations.iter().filter(|o| o.status != Status::Discharged).collect()
    }
}

pub const OBLIGATION_LAYER: &str = "(0) assumption";
pub const OBLIGATION_ACCESSIBLE: &str = "(i) A accessible";
pub const OBLIGATION_A_PROJ: &str = "(ii) A+Proj SN";
pub const OBLIGATION_B_GS: &str = "(iii) B by GS";

/// Result types of the A-defined symbols: the types projections are needed at.
pub fn projection_types(cs: &ComputationSystem, split: &SplitSpec) -> BTreeSet<MolType> {
    split.sigma_a.iter().filter_map(|f| cs.signature.get(f)).map(|t| t.result.clone()).collect()
}

/// `A + Proj` over the signature without B-defined symbols.
pub fn a_with_projections(cs: &ComputationSystem, split: &SplitSpec) -> Result<ComputationSystem, String> {
    let base = cs.signature.restricted(|f| !split.sigma_b.contains(f));
    let (ext, proj) = build_projection_rules(&projection_types(cs, split), &base).map_err(|e| e.to_string())?;
    let sig = base.merged(&ext);
    let mut rules = split.rules_a.clone();
    rules.extend(proj);
    ComputationSystem::new(sig, rules).map_err(|e| e.to_string())
}

/// Completes user weights: projection pairs `x + y + 1`, bottoms `0`,
/// other symbols `0` plus their redex-hosting arguments.
pub fn complete_weights(a_proj: &ComputationSystem, types: &BTreeSet<MolType>, w: &WeightMap) -> WeightMap {
    let mut out = w.clone();
    for b in types {
        out.entry(crate::term::name(&pair_symbol(b))).or_insert(LinearWeight::new(1, vec![1, 1]));
        out.entry(crate::term::name(&bot_symbol(b))).or_insert(LinearWeight::new(0, vec![]));
    }
    let hosting = redex_hosting(a_proj);
    for r in &a_proj.rules {
        for f in r.fun_symbols() {
            if !out.contains_key(&f) {
                let h = hosting.get(&f).cloned().unwrap_or_default();
                out.insert(f, LinearWeight::new(0, h.iter().map(|b| u64::from(*b)).collect()));
            }
        }
    }
    out
}

fn render_weights(cs: &ComputationSystem, w: &WeightMap) -> String {
    let mut parts = Vec::new();
    for (f, lw) in w {
        if cs.rules.iter().any(|r| r.fun_symbols().contains(f)) {
            parts.push(format!("{f}({}) = {}", params(lw.coeffs.len()), lw.render_default()));
        }
    }
    parts.join(", ")
}

fn params(n: usize) -> String {
    (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

/// Runs an external first-order prover on `doc`; the first output line
/// must be `YES`, `NO` or `MAYBE`.
pub fn run_external(command: &str, doc: &str) -> Result<String, String> {
    let mut file = tempfile::Builder::new().suffix(".trs").tempfile().map_err(|e| e.to_string())?;
    file.write_all(doc.as_bytes()).map_err(|e| e.to_string())?;
    let mut parts = command.split_whitespace();
    let prog = parts.next().ok_or("empty external command")?;
    let out = Command::new(prog).args(parts).arg(file.path()).output().map_err(|e| format!("{prog}: {e}"))?;
    let text = String::from_utf8_lossy(&out.stdout);
    let first = text.lines().next().unwrap_or("").trim().to_string();
    match first.as_str() {
        "YES" | "NO" | "MAYBE" => Ok(first),
        other => Err(format!("unexpected answer '{other}'")),
    }
}

fn obligation_zero(cs: &ComputationSystem, split: &SplitSpec) -> Obligation {
    let mut ev = Vec::new();
    if let Err(e) = split.validate() {
        return Obligation::new(OBLIGATION_LAYER, Status::Failed, vec![e.to_string()]);
    }
    ev.push(format!("partition: {split}"));
    ev.push(format!("finitely branching: {} rules with pattern left-hand sides", cs.rules.len()));
    let mut failed = false;
    for r in split.rules_a.iter().chain(&split.rules_b) {
        if let Err(v) = check_a_layer(r, &split.sigma_a, &split.theta) {
            ev.push(format!("layer violation {v}"));
            failed = true;
        }
    }
    if !failed {
        ev.push("A-layer condition holds on both sides of every rule".into());
    }
    Obligation::new(OBLIGATION_LAYER, if failed { Status::Failed } else { Status::Discharged }, ev)
}

fn prove_a_proj(a_proj: &ComputationSystem, types: &BTreeSet<MolType>, backend: &FoBackend) -> (Obligation, Option<AProof>) {
    if let Some(cmd) = &backend.external {
        return match emit_fo_trs(&a_proj.rules) {
            Err(e) => (Obligation::new(OBLIGATION_A_PROJ, Status::Failed, vec![e.to_string()]), None),
            Ok(doc) => match run_external(cmd, &doc) {
                Ok(ans) if ans == "YES" => (
                    Obligation::new(OBLIGATION_A_PROJ, Status::Discharged, vec![format!("external prover `{cmd}` answered YES")]),
                    Some(AProof::External(cmd.clone())),
                ),
                Ok(ans) => (Obligation::new(OBLIGATION_A_PROJ, Status::Failed, vec![format!("external prover `{cmd}` answered {ans}")]), None),
                Err(e) => (Obligation::new(OBLIGATION_A_PROJ, Status::Failed, vec![format!("external prover `{cmd}`: {e}")]), None),
            },
        };
    }
    let mut ev = Vec::new();
    if let Some(user) = &backend.weights {
        let w = complete_weights(a_proj, types, user);
        let checks = verify_weights(a_proj, &w);
        if checks.iter().all(|c| c.ok) {
            ev.push(format!("weights {}", render_weights(a_proj, &w)));
            ev.extend(checks.iter().map(|c| c.to_string()));
            return (Obligation::new(OBLIGATION_A_PROJ, Status::Discharged, ev), Some(AProof::Weights(w)));
        }
        ev.push("declared weights do not decrease:".into());
        ev.extend(checks.iter().filter(|c| !c.ok).map(|c| c.to_string()));
    }
    let (cb, kb) = backend.weights_bound;
    if let Some(w) = find_linear_weights(a_proj, cb, kb) {
        ev.push(format!("weights found within bounds ({cb},{kb}): {}", render_weights(a_proj, &w)));
        ev.extend(verify_weights(a_proj, &w).iter().map(|c| c.to_string()));
        return (Obligation::new(OBLIGATION_A_PROJ, Status::Discharged, ev), Some(AProof::Weights(w)));
    }
    ev.push(format!("no linear weights within bounds ({cb},{kb})"));
    if backend.dependency_pairs {
        match fo_rules(&a_proj.rules) {
            Ok(fo) => {
                let p = prove_dp(&fo);
                ev.push("dependency pairs:".into());
                ev.extend(p.steps.iter().cloned());
                if p.proved {
                    return (Obligation::new(OBLIGATION_A_PROJ, Status::Discharged, ev), Some(AProof::DependencyPairs(p.steps)));
                }
            }
            Err(e) => ev.push(format!("dependency pairs not applicable: {e}")),
        }
    }
    (Obligation::new(OBLIGATION_A_PROJ, Status::Failed, ev), None)
}

/// Checks the obligations of the modular termination theorem for `split`.
pub fn check_modular_sn(
    cs: &ComputationSystem,
    split: &SplitSpec,
    backend: &FoBackend,
    ord: &TypeOrder,
    gs: GsConfig,
) -> Result<ModularResult, InvalidSplit> {
    split.validate()?;
    let mut obligations = vec![obligation_zero(cs, split)];

    obligations.push(match check_a_accessible(&cs.signature, &split.rules_a, ord) {
        Ok(()) => Obligation::new(
            OBLIGATION_ACCESSIBLE,
            Status::Discharged,
            vec![format!("every right-hand metavariable of the {} A-rules is accessible", split.rules_a.len())],
        ),
        Err((r, m)) => Obligation::new(OBLIGATION_ACCESSIBLE, Status::Failed, vec![format!("({r}): {m} is not accessible")]),
    });

    let types = projection_types(cs, split);
    let (a_proj, a_proof) = match a_with_projections(cs, split) {
        Ok(a_proj) => {
            let (o, p) = prove_a_proj(&a_proj, &types, backend);
            obligations.push(o);
            (a_proj, p)
        }
        Err(e) => {
            obligations.push(Obligation::new(OBLIGATION_A_PROJ, Status::Failed, vec![e]));
            (ComputationSystem::empty(), None)
        }
    };

    let b = split.b_system(cs);
    let prec = synthesize_precedence(&b);
    let res = check_general_schema(&b, ord, &prec, gs);
    let mut ev = Vec::new();
    let status = if res.is_yes() {
        ev.push(format!("precedence {prec}"));
        for o in &res.outcomes {
            if let Ok(d) = &o.result {
                ev.push(format!("({}) {}", o.rule, d.summary()));
            }
        }
        Status::Discharged
    } else {
        for (r, f) in res.failures() {
            ev.push(format!("({r}) {f}"));
        }
        for c in &res.conflicts {
            ev.push(c.describe());
        }
        Status::Failed
    };
    obligations.push(Obligation::new(OBLIGATION_B_GS, status, ev));

    Ok(ModularResult { split: split.clone(), obligations, a_proj, a_proof, b_result: Some(res) })
}

