//! Random instances and the property checks shared with the acceptance run.

use std::sync::OnceLock;

use modsn_core::frontend::{corpus_names, seeds, SplitDirective};
use modsn_core::labelling::{Lab, TraceError};
use modsn_core::modular::SplitSpec;
use modsn_core::rewrite::Rewriter;
use modsn_core::term::{substitute_metavars, typecheck};
use modsn_core::{Abs, Assignment, Manifest, MetaContext, MetaTerm, MolType, Rule, Signature, Term};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::load;

pub const CASES: u32 = 500;
pub const SEED: [u8; 32] = *b"modular-sn-property-suite-seed!!";

pub fn runner() -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, max_global_rejects: 100_000, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

pub fn try_check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

pub fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>)
where
    S::Value: std::fmt::Debug,
{
    if let Err(e) = try_check(strategy, test) {
        panic!("{e}");
    }
}

pub fn systems() -> &'static Vec<(&'static str, Manifest)> {
    static S: OnceLock<Vec<(&'static str, Manifest)>> = OnceLock::new();
    S.get_or_init(|| corpus_names().into_iter().map(|n| (n, load(n))).collect())
}

/// Random well-typed term of type `ty`; `scope` lists the enclosing
/// binders, innermost last.
pub fn gen(sig: &Signature, ty: &MolType, scope: &[MolType], depth: usize, rng: &mut ChaCha8Rng) -> Option<Term> {
    let vars: Vec<usize> = scope.iter().rev().enumerate().filter(|(_, b)| *b == ty).map(|(i, _)| i).collect();
    let mut syms: Vec<(&str, usize)> =
        sig.symbols().filter(|(_, f)| f.result == *ty && (depth > 0 || f.args.is_empty())).map(|(n, f)| (&**n, f.args.len())).collect();
    syms.shuffle(rng);
    // leaves first a third of the time, so terms stay small
    if rng.gen_ratio(1, 3) {
        syms.sort_by_key(|s| s.1);
    }
    if !vars.is_empty() && (syms.is_empty() || rng.gen_ratio(1, 3)) {
        return Some(MetaTerm::BVar(*vars.choose(rng).unwrap()));
    }
    for (f, _) in syms {
        let fty = sig.get(f).unwrap();
        let mut args = Vec::with_capacity(fty.args.len());
        for a in &fty.args {
            let mut inner = scope.to_vec();
            inner.extend(a.binders.iter().cloned());
            match gen(sig, &a.result, &inner, depth.saturating_sub(1), rng) {
                Some(body) => args.push(Abs::anonymous(a.binders.clone(), body)),
                None => break,
            }
        }
        if args.len() == fty.args.len() {
            return Some(MetaTerm::fun(f, args));
        }
    }
    vars.choose(rng).map(|&i| MetaTerm::BVar(i))
}

/// Random assignment for every metavariable of `ctx`.
pub fn gen_assignment(sig: &Signature, ctx: &MetaContext, depth: usize, rng: &mut ChaCha8Rng) -> Option<Assignment> {
    let mut theta = Assignment::new();
    for d in ctx.iter() {
        let body = gen(sig, &d.result, &d.args, depth, rng)?;
        theta.insert(d.name.clone(), Abs::anonymous(d.args.clone(), body));
    }
    Some(theta)
}

pub fn env() -> MetaContext {
    MetaContext::new()
}

pub fn instance(m: &Manifest, rule_pick: usize, seed: u64, depth: usize) -> Option<(Rule, Assignment)> {
    let rule = m.system.rules[rule_pick % m.system.rules.len()].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = gen_assignment(&m.system.signature, &rule.context, depth, &mut rng)?;
    Some((rule, theta))
}

pub fn effect() -> &'static (Manifest, SplitSpec) {
    static E: OnceLock<(Manifest, SplitSpec)> = OnceLock::new();
    E.get_or_init(|| {
        let m = load("effect-full");
        let Some(SplitDirective::Explicit { a, b }) = &m.split else { panic!() };
        let split = SplitSpec::from_rule_names(&m.system, a, b).unwrap();
        (m, split)
    })
}

pub fn trace_assignment(lab: &Lab, theta: &Assignment) -> Result<Assignment, TraceError> {
    let mut out = Assignment::new();
    for (m, a) in theta.iter() {
        out.insert(m.clone(), Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: lab.trace(&a.body)? });
    }
    Ok(out)
}

pub type Step = (usize, Term, Term);

/// Every one-step reduction from depth-3 seeds of the effect systems.
pub fn effect_steps() -> &'static (Vec<(Manifest, SplitSpec)>, Vec<Step>) {
    static S: OnceLock<(Vec<(Manifest, SplitSpec)>, Vec<Step>)> = OnceLock::new();
    S.get_or_init(|| {
        let mut systems = Vec::new();
        let mut steps = Vec::new();
        for (i, n) in ["effect-full", "handle", "gstate", "mam"].into_iter().enumerate() {
            let m = load(n);
            let split = match &m.split {
                Some(SplitDirective::Explicit { a, b }) => SplitSpec::from_rule_names(&m.system, a, b).unwrap(),
                _ => modsn_core::modular::split_fo_ho(&m.system),
            };
            let rw = Rewriter::new(&m.system);
            for s in seeds(&m.system, 3) {
                for t in rw.reducts(&s) {
                    steps.push((i, s.clone(), t));
                }
            }
            systems.push((m, split));
        }
        (systems, steps)
    })
}

// (a) substituting a well-typed assignment keeps the type of both sides.
pub fn substitution_preserves_types() -> Result<(), String> {
    let n = systems().len();
    try_check((0..n, any::<usize>(), any::<u64>(), 0..3usize), |(k, r, seed, depth)| {
        let (_, m) = &systems()[k];
        let Some((rule, theta)) = instance(m, r, seed, depth) else { return Err(TestCaseError::reject("no instance")) };
        let sig = &m.system.signature;
        for side in [&rule.lhs, &rule.rhs] {
            let t = substitute_metavars(&theta, side).unwrap();
            prop_assert!(t.is_closed());
            prop_assert_eq!(typecheck(sig, &env(), &[], &t).unwrap(), rule.ty.clone());
        }
        Ok(())
    })
}

// (b) every one-step reduct of a redex instance keeps its type.
pub fn subject_reduction() -> Result<(), String> {
    let n = systems().len();
    try_check((0..n, any::<usize>(), any::<u64>(), 0..3usize), |(k, r, seed, depth)| {
        let (name, m) = &systems()[k];
        let Some((rule, theta)) = instance(m, r, seed, depth) else { return Err(TestCaseError::reject("no instance")) };
        let sig = &m.system.signature;
        let s = substitute_metavars(&theta, &rule.lhs).unwrap();
        let reducts = Rewriter::new(&m.system).one_step_reducts(&s);
        prop_assert!(reducts.iter().any(|(x, _)| x.rule == rule.name && x.position.is_empty()), "{} {}", name, s);
        for (_, u) in reducts {
            prop_assert_eq!(typecheck(sig, &env(), &[], &u).unwrap(), rule.ty.clone(), "{}: {}", name, s);
        }
        Ok(())
    })
}

// (c) trace(t theta) = t (trace . theta) for the B-free sides of A rules.
pub fn trace_commutes_with_substitution() -> Result<(), String> {
    let (m, split) = effect();
    let lab = Lab::new(&m.system, split);
    let n = split.rules_a.len();
    try_check((0..n, any::<u64>(), 0..3usize), |(r, seed, depth)| {
        let rule = &split.rules_a[r];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(theta) = gen_assignment(&m.system.signature, &rule.context, depth, &mut rng) else {
            return Err(TestCaseError::reject("no instance"));
        };
        let Ok(phi) = trace_assignment(&lab, &theta) else { return Err(TestCaseError::reject("not SN within budget")) };
        for side in [&rule.lhs, &rule.rhs] {
            let t = substitute_metavars(&theta, side).unwrap();
            let Ok(tr) = lab.trace(&t) else { return Err(TestCaseError::reject("not SN within budget")) };
            prop_assert_eq!(tr, substitute_metavars(&phi, side).unwrap(), "({}) {}", rule.name, t);
        }
        Ok(())
    })
}

// (d) simulation of sampled steps from effect seeds, each replayed.
pub fn simulation_on_seed_steps() -> Result<(), String> {
    let (systems, steps) = effect_steps();
    assert!(steps.len() > 1000);
    let labs: Vec<Lab> = systems.iter().map(|(m, s)| Lab::new(&m.system, s)).collect();
    try_check(0..steps.len(), |i| {
        let (k, s, t) = &steps[i];
        let lab = &labs[*k];
        let sim = lab.simulation_check(s, t).map_err(|e| TestCaseError::fail(format!("{s} -> {t}: {e}")))?;
        prop_assert!(lab.replay(&sim).unwrap());
        Ok(())
    })
}

/// Every step from the seeds, not a sample.
pub fn simulation_on_all_seed_steps() -> Result<usize, String> {
    let (systems, steps) = effect_steps();
    let labs: Vec<Lab> = systems.iter().map(|(m, s)| Lab::new(&m.system, s)).collect();
    for (k, s, t) in steps {
        let lab = &labs[*k];
        let sim = lab.simulation_check(s, t).map_err(|e| format!("{s} -> {t}: {e}"))?;
        if !lab.replay(&sim).map_err(|e| e.to_string())? {
            return Err(format!("{s} -> {t}: replay failed"));
        }
    }
    Ok(steps.len())
}
