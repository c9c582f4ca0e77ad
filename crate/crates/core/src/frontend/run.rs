use std::time::Instant;

use super::manifest::{Manifest, PrecDecl, SplitDirective};
use super::report::{Method, ProofReport, Verdict};
use crate::gen;
use crate::modular::{check_modular_sn, split_fo_ho, FoBackend, Obligation, SplitSpec, Status};
use crate::rewrite::{find_loop, sn_oracle, Budget, OracleResult};
use crate::schema::{check_general_schema, synthesize_precedence, Clause5, GsConfig, SubtermVariant, SymbolPrecedence, TypeOrder, TypeOrderKind};
use crate::term::{ComputationSystem, Name};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum CheckStrategy {
    /// GS, then modular, then the loop finder.
    #[default]
    Auto,
    Gs,
    Modular,
    Oracle,
    Loop,
}

impl std::str::FromStr for CheckStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(CheckStrategy::Auto),
            "gs" => Ok(CheckStrategy::Gs),
            "modular" => Ok(CheckStrategy::Modular),
            "oracle" => Ok(CheckStrategy::Oracle),
            "loop" => Ok(CheckStrategy::Loop),
            _ => Err(format!("unknown strategy '{s}'")),
        }
    }
}

/// Which split the modular check uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SplitChoice {
    /// First-order rules form A.
    Auto,
    /// The split declared in the file.
    Manifest,
}

/// Checker settings; `None` fields fall back to the file's options and
/// then to the defaults.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CheckConfig {
    pub strategy: CheckStrategy,
    pub subterm: Option<SubtermVariant>,
    pub clause5: Option<Clause5>,
    pub type_order: Option<TypeOrderKind>,
    pub weights_bound: Option<(u64, u64)>,
    pub oracle_depth: Option<usize>,
    pub split: Option<SplitChoice>,
    pub external_fo: Option<String>,
}

pub const DEFAULT_WEIGHTS_BOUND: (u64, u64) = (2, 2);
pub const DEFAULT_ORACLE_DEPTH: usize = 3;
/// Steps explored per seed by the loop finder.
pub const LOOP_STEPS: usize = 12;

struct Settings {
    gs: GsConfig,
    ord: TypeOrder,
    weights_bound: (u64, u64),
    oracle_depth: usize,
}

fn settings(m: &Manifest, c: &CheckConfig) -> Settings {
    let o = &m.options;
    Settings {
        gs: GsConfig {
            variant: c.subterm.or(o.subterm).unwrap_or_default(),
            clause5: c.clause5.or(o.clause5).unwrap_or_default(),
        },
        ord: TypeOrder { kind: c.type_order.or(o.type_order).unwrap_or_default() },
        weights_bound: c.weights_bound.or(o.weights_bound).unwrap_or(DEFAULT_WEIGHTS_BOUND),
        oracle_depth: c.oracle_depth.or(o.oracle_depth).unwrap_or(DEFAULT_ORACLE_DEPTH),
    }
}

pub fn run_check(m: &Manifest, strategy: CheckStrategy) -> ProofReport {
    run_check_with(m, &CheckConfig { strategy, ..CheckConfig::default() })
}

pub fn run_check_with(m: &Manifest, c: &CheckConfig) -> ProofReport {
    let s = settings(m, c);
    match c.strategy {
        CheckStrategy::Gs => timed("gs", || gs_report(m, &s)),
        CheckStrategy::Modular => {
            let choice = c.split.unwrap_or(if m.split.is_some() { SplitChoice::Manifest } else { SplitChoice::Auto });
            timed("modular", || modular_report(m, &s, c, choice))
        }
        CheckStrategy::Loop => timed("loop", || loop_report(m, &s)),
        CheckStrategy::Oracle => timed("oracle", || oracle_report(m, &s)),
        CheckStrategy::Auto => auto_report(m, &s, c),
    }
}

fn timed(phase: &str, f: impl FnOnce() -> ProofReport) -> ProofReport {
    let t = Instant::now();
    let mut r = f();
    r.timings.push((phase.to_string(), t.elapsed()));
    r
}

fn precedence(m: &Manifest) -> Result<SymbolPrecedence, String> {
    if m.precedence.is_empty() {
        return Ok(synthesize_precedence(&m.system));
    }
    let symbols: Vec<Name> = m.system.signature.names().cloned().collect();
    let mut strict = Vec::new();
    let mut equal = Vec::new();
    for p in &m.precedence {
        match p {
            PrecDecl::Greater(a, b) => strict.push((a.clone(), b.clone())),
            PrecDecl::Equal(a, b) => equal.push((a.clone(), b.clone())),
        }
    }
    SymbolPrecedence::from_relations(&symbols, &strict, &equal)
}

fn gs_report(m: &Manifest, s: &Settings) -> ProofReport {
    let prec = match precedence(m) {
        Ok(p) => p,
        Err(e) => {
            let mut r = ProofReport::new(Verdict::Maybe, Method::Gs);
            r.obligations.push(Obligation::new("precedence", Status::Failed, vec![e]));
            return r;
        }
    };
    let res = check_general_schema(&m.system, &s.ord, &prec, s.gs);
    let yes = res.is_yes() && res.conflicts.is_empty();
    let mut r = ProofReport::new(if yes { Verdict::Yes } else { Verdict::Maybe }, Method::Gs);
    let mut ev = vec![if prec.to_string().is_empty() { "no precedence needed".to_string() } else { prec.to_string() }];
    ev.extend(res.conflicts.iter().map(|c| c.describe()));
    let st = if res.conflicts.is_empty() { Status::Discharged } else { Status::Failed };
    r.obligations.push(Obligation::new("precedence", st, ev));
    for o in &res.outcomes {
        let name = format!("({})", o.rule);
        r.obligations.push(match &o.result {
            Ok(d) => Obligation::new(&name, Status::Discharged, vec![d.summary()]),
            Err(f) => Obligation::new(&name, Status::Failed, vec![f.to_string()]),
        });
    }
    if !yes {
        for (rule, f) in res.failures() {
            r.notes.push(format!("({rule}) does not satisfy GS: {} fails", f.clause));
        }
    }
    r
}

fn manifest_split(m: &Manifest) -> Result<Option<SplitSpec>, String> {
    match &m.split {
        None => Ok(None),
        Some(SplitDirective::AutoFo) => Ok(Some(split_fo_ho(&m.system))),
        Some(SplitDirective::Explicit { a, b }) => SplitSpec::from_rule_names(&m.system, a, b).map(Some).map_err(|e| e.to_string()),
    }
}

fn backend(m: &Manifest, s: &Settings, c: &CheckConfig) -> FoBackend {
    let w = m.weight_map();
    FoBackend {
        weights_bound: s.weights_bound,
        weights: if w.is_empty() { None } else { Some(w) },
        dependency_pairs: true,
        external: c.external_fo.clone(),
    }
}

fn modular_with(m: &Manifest, s: &Settings, c: &CheckConfig, split: &SplitSpec, label: &str) -> ProofReport {
    match check_modular_sn(&m.system, split, &backend(m, s, c), &s.ord, s.gs) {
        Ok(res) => {
            let mut r = ProofReport::new(if res.is_yes() { Verdict::Yes } else { Verdict::Maybe }, Method::Modular);
            r.notes.push(format!("split {label}: A = {{{}}}, B = {{{}}}", rule_list(&res.split.rule_names_a()), rule_list(&res.split.rule_names_b())));
            r.obligations = res.obligations;
            r
        }
        Err(e) => {
            let mut r = ProofReport::new(Verdict::Maybe, Method::Modular);
            r.notes.push(format!("split {label} is invalid: {e}"));
            r
        }
    }
}

fn rule_list(ns: &[Name]) -> String {
    ns.iter().map(|n| format!("({n})")).collect::<Vec<_>>().join(", ")
}

fn modular_report(m: &Manifest, s: &Settings, c: &CheckConfig, choice: SplitChoice) -> ProofReport {
    match choice {
        SplitChoice::Auto => modular_with(m, s, c, &split_fo_ho(&m.system), "auto-fo"),
        SplitChoice::Manifest => match manifest_split(m) {
            Ok(Some(sp)) => modular_with(m, s, c, &sp, "manifest"),
            Ok(None) => {
                let mut r = ProofReport::new(Verdict::Maybe, Method::Modular);
                r.notes.push("no split declared".into());
                r
            }
            Err(e) => {
                let mut r = ProofReport::new(Verdict::Maybe, Method::Modular);
                r.notes.push(format!("split manifest is invalid: {e}"));
                r
            }
        },
    }
}

fn loop_report(m: &Manifest, s: &Settings) -> ProofReport {
    match find_loop(&m.system, s.oracle_depth, LOOP_STEPS) {
        Some(w) if w.replay(&m.system) => {
            let mut r = ProofReport::new(Verdict::No, Method::Loop);
            let kind = if w.is_cycle() { format!("{}-cycle", w.steps.len()) } else { "self-embedding loop".to_string() };
            let mut ev = vec![kind, w.to_string()];
            if !w.is_cycle() {
                ev.push(format!("start term reappears at position {}", show_position(&w.embedding)));
            }
            r.obligations.push(Obligation::new("loop", Status::Discharged, ev));
            r
        }
        _ => {
            let mut r = ProofReport::new(Verdict::Maybe, Method::Loop);
            r.notes.push(format!("no loop from left-hand side instances of depth {} within {LOOP_STEPS} steps", s.oracle_depth));
            r
        }
    }
}

fn show_position(p: &[usize]) -> String {
    p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(".")
}

fn oracle_report(m: &Manifest, s: &Settings) -> ProofReport {
    let seeds = gen::lhs_instances(&m.system, s.oracle_depth, gen::DEFAULT_CAP);
    match sn_oracle(&m.system, &seeds, Budget::default()) {
        OracleResult::NonSN(w) => {
            let mut r = ProofReport::new(Verdict::No, Method::Oracle);
            r.obligations.push(Obligation::new("loop", Status::Discharged, vec![format!("{}-cycle", w.steps.len()), w.to_string()]));
            r
        }
        OracleResult::SN { max_depth, nodes } => {
            let mut r = ProofReport::new(Verdict::Maybe, Method::Oracle);
            r.notes.push(format!(
                "all reductions from {} seeds of depth {} terminate (longest {max_depth}, {nodes} terms); bounded evidence only",
                seeds.len(),
                s.oracle_depth
            ));
            r
        }
        OracleResult::Unknown { reason } => {
            let mut r = ProofReport::new(Verdict::Maybe, Method::Oracle);
            r.notes.push(format!("oracle inconclusive: {reason}"));
            r
        }
    }
}

fn auto_report(m: &Manifest, s: &Settings, c: &CheckConfig) -> ProofReport {
    let start = Instant::now();
    let mut tried: Vec<(String, ProofReport)> = Vec::new();

    let gs = timed("gs", || gs_report(m, s));
    if gs.verdict == Verdict::Yes {
        return finish(gs, start);
    }
    tried.push(("gs".into(), gs));

    let fo = split_fo_ho(&m.system);
    if fo.rules_a.is_empty() {
        let mut r = ProofReport::new(Verdict::Maybe, Method::Modular);
        r.notes.push("split auto-fo: no first-order rules".into());
        tried.push(("modular auto-fo".into(), r));
    } else {
        let r = timed("modular auto-fo", || modular_with(m, s, c, &fo, "auto-fo"));
        if r.verdict == Verdict::Yes {
            return finish(r, start);
        }
        tried.push(("modular auto-fo".into(), r));
    }

    match manifest_split(m) {
        Ok(Some(sp)) if sp != fo => {
            let r = timed("modular manifest", || modular_with(m, s, c, &sp, "manifest"));
            if r.verdict == Verdict::Yes {
                return finish(r, start);
            }
            tried.push(("modular manifest".into(), r));
        }
        Ok(_) => {}
        Err(e) => {
            let mut r = ProofReport::new(Verdict::Maybe, Method::Modular);
            r.notes.push(format!("split manifest is invalid: {e}"));
            tried.push(("modular manifest".into(), r));
        }
    }

    let lp = timed("loop", || loop_report(m, s));
    if lp.verdict == Verdict::No {
        return finish(lp, start);
    }
    tried.push(("loop".into(), lp));

    let mut out = ProofReport::new(Verdict::Maybe, Method::Loop);
    for (label, r) in tried {
        for mut o in r.obligations {
            o.name = format!("{label}: {}", o.name);
            out.obligations.push(o);
        }
        for n in r.notes {
            out.notes.push(format!("{label}: {n}"));
        }
        out.timings.extend(r.timings);
    }
    finish(out, start)
}

fn finish(mut r: ProofReport, start: Instant) -> ProofReport {
    r.timings.push(("total".into(), start.elapsed()));
    r
}

/// Seeds used by the oracle and the loop finder.
pub fn seeds(cs: &ComputationSystem, depth: usize) -> Vec<crate::term::Term> {
    gen::lhs_instances(cs, depth, gen::DEFAULT_CAP)
}
