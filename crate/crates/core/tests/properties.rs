mod common;

use std::sync::OnceLock;

use common::load;
use common::props::{self, check, effect, env, gen, gen_assignment, instance, systems, trace_assignment};
use modsn_core::frontend::{parse_machine_report, parse_manifest, parse_term, Format, Method, Obligation, ProofReport, Status, Verdict};
use modsn_core::labelling::{forget, Lab, SimulationError};
use modsn_core::modular::{
    a_with_projections, build_projection_rules, complete_weights, interpret_weight, projection_types, LinearWeight, SplitSpec,
    WeightMap,
};
use modsn_core::rewrite::Rewriter;
use modsn_core::schema::{default_type_order, synthesize_precedence};
use modsn_core::term::{substitute_metavars, typecheck};
use modsn_core::{ComputationSystem, MetaTerm, MolType, Rule, Term};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn substitution_preserves_types() {
    props::substitution_preserves_types().unwrap();
}

#[test]
fn subject_reduction() {
    props::subject_reduction().unwrap();
}

#[test]
fn trace_commutes_with_substitution() {
    props::trace_commutes_with_substitution().unwrap();
}

#[test]
fn simulation_on_sampled_seed_steps() {
    props::simulation_on_seed_steps().unwrap();
}

// Random closed terms typecheck at the type they were built for.
#[test]
fn generated_terms_are_well_typed() {
    let n = systems().len();
    check((0..n, any::<u64>(), 0..4usize), |(k, seed, depth)| {
        let (_, m) = &systems()[k];
        let sig = &m.system.signature;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tys: Vec<MolType> = sig.symbols().map(|(_, f)| f.result.clone()).collect();
        let ty = tys.choose(&mut rng).unwrap().clone();
        let Some(t) = gen(sig, &ty, &[], depth, &mut rng) else { return Err(TestCaseError::reject("no term")) };
        prop_assert_eq!(typecheck(sig, &env(), &[], &t).unwrap(), ty);
        Ok(())
    });
}

// trace is the identity on B-free terms.
#[test]
fn trace_fixes_b_free_terms() {
    let (m, split) = effect();
    let lab = Lab::new(&m.system, split);
    let free = m.system.signature.restricted(|f| !split.sigma_b.contains(f));
    check(any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ty = MolType::con("Arr", vec![MolType::atomic("N"), MolType::atomic("N")]);
        let Some(t) = gen(&free, &ty, &[], 3, &mut rng) else { return Err(TestCaseError::reject("no term")) };
        prop_assert_eq!(lab.trace(&t).unwrap(), t);
        Ok(())
    });
}

// Labelled rule image, substituted, is the trace labelling of the
// instance.
#[test]
fn labelled_rule_instance_is_trace_labelling() {
    let (m, split) = effect();
    let lab = Lab::new(&m.system, split);
    let n = m.system.rules.len();
    check((0..n, any::<u64>(), 0..2usize), |(r, seed, depth)| {
        let rule = &m.system.rules[r];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(theta) = gen_assignment(&m.system.signature, &rule.context, depth, &mut rng) else {
            return Err(TestCaseError::reject("no instance"));
        };
        let Ok(phi) = trace_assignment(&lab, &theta) else { return Err(TestCaseError::reject("not SN within budget")) };
        let lr = lab.label_rule(rule, &phi).unwrap();
        let lhs = substitute_metavars(&theta, &rule.lhs).unwrap();
        let Ok(want) = lab.trace_label(&lhs) else { return Err(TestCaseError::reject("not SN within budget")) };
        prop_assert_eq!(lab.lext(&theta, &lr.lhs).unwrap(), want, "({})", rule.name);
        prop_assert_eq!(forget(&lab.lext(&theta, &lr.rhs).unwrap()), substitute_metavars(&theta, &rule.rhs).unwrap());
        Ok(())
    });
}

// (d) on random redex instances of effect-full rules.
#[test]
fn simulation_on_random_instances() {
    let (m, split) = effect();
    let lab = Lab::new(&m.system, split);
    let rw = Rewriter::new(&m.system);
    let n = m.system.rules.len();
    check((0..n, any::<u64>(), 0..3usize), |(r, seed, depth)| {
        let Some((rule, theta)) = instance(m, r, seed, depth) else { return Err(TestCaseError::reject("no instance")) };
        let s = substitute_metavars(&theta, &rule.lhs).unwrap();
        for t in rw.reducts(&s) {
            match lab.simulation_check(&s, &t) {
                Ok(sim) => prop_assert!(lab.replay(&sim).unwrap()),
                Err(SimulationError::Trace(_)) => return Err(TestCaseError::reject("not SN within budget")),
                Err(e) => return Err(TestCaseError::fail(format!("({}) {s} -> {t}: {e}", rule.name))),
            }
        }
        Ok(())
    });
}

#[test]
fn printed_terms_parse_back() {
    let n = systems().len();
    check((0..n, any::<u64>(), 0..4usize), |(k, seed, depth)| {
        let (_, m) = &systems()[k];
        let sig = &m.system.signature;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tys: Vec<MolType> = sig.symbols().map(|(_, f)| f.result.clone()).collect();
        let ty = tys.choose(&mut rng).unwrap().clone();
        let Some(t) = gen(sig, &ty, &[], depth, &mut rng) else { return Err(TestCaseError::reject("no term")) };
        let text = t.to_string();
        prop_assert_eq!(parse_term(sig, &text).unwrap(), t, "{}", text);
        Ok(())
    });
}

#[test]
fn manifests_round_trip_after_dropping_rules() {
    let n = systems().len();
    check((0..n, any::<u64>()), |(k, seed)| {
        let (_, m) = &systems()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = m.clone();
        let keep: Vec<Rule> = m.system.rules.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        m.system = m.system.with_rules(keep);
        m.split = None;
        let text = m.print();
        prop_assert_eq!(parse_manifest(&text).unwrap(), m);
        Ok(())
    });
}

fn field() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z(\\]\\[ \\t\\n\\\\>=@.,]{0,24}").unwrap()
}

#[test]
fn machine_reports_round_trip() {
    let verdict = prop_oneof![Just(Verdict::Yes), Just(Verdict::No), Just(Verdict::Maybe)];
    let method = prop_oneof![Just(Method::Gs), Just(Method::Modular), Just(Method::Loop), Just(Method::Oracle)];
    let status = prop_oneof![Just(Status::Discharged), Just(Status::Failed), Just(Status::Skipped)];
    let obligation = (field(), status, prop::collection::vec(field(), 0..3))
        .prop_map(|(n, s, e)| Obligation { name: format!("o{n}"), status: s, evidence: e });
    let report = (verdict, method, prop::collection::vec(obligation, 0..4), prop::collection::vec(field(), 0..3));
    check(report, |(v, me, obligations, notes)| {
        let r = ProofReport { verdict: v, method: me, obligations, notes, timings: Vec::new() };
        let text = r.emit(Format::Machine);
        prop_assert_eq!(parse_machine_report(&text).unwrap(), r);
        Ok(())
    });
}

fn proj_system() -> &'static ComputationSystem {
    static P: OnceLock<ComputationSystem> = OnceLock::new();
    P.get_or_init(|| {
        let m = load("effect-full");
        let types = m.system.signature.symbols().map(|(_, f)| f.result.clone()).collect();
        let (ext, rules) = build_projection_rules(&types, &m.system.signature).unwrap();
        ComputationSystem::new(m.system.signature.merged(&ext), rules).unwrap()
    })
}

// Each projection step removes at least the pair node.
#[test]
fn projection_steps_shrink_terms() {
    let cs = proj_system();
    let rw = Rewriter::new(cs);
    check(any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tys: Vec<MolType> = cs.signature.symbols().map(|(_, f)| f.result.clone()).collect();
        let ty = tys.choose(&mut rng).unwrap().clone();
        let Some(t) = gen(&cs.signature, &ty, &[], 4, &mut rng) else { return Err(TestCaseError::reject("no term")) };
        for u in rw.reducts(&t) {
            prop_assert!(common::node_count(&u) < common::node_count(&t));
        }
        Ok(())
    });
}

fn weighted_gstate() -> &'static (ComputationSystem, WeightMap) {
    static W: OnceLock<(ComputationSystem, WeightMap)> = OnceLock::new();
    W.get_or_init(|| {
        let m = load("gstate");
        let split = SplitSpec::new(&m.system, m.system.rules.clone(), Vec::new());
        let a = a_with_projections(&m.system, &split).unwrap();
        let mut w = complete_weights(&a, &projection_types(&m.system, &split), &m.weight_map());
        for (f, ty) in a.signature.symbols() {
            w.entry(f.clone()).or_insert_with(|| LinearWeight::new(1, vec![1; ty.arity()]));
        }
        (a, w)
    })
}

fn ground(w: &WeightMap, t: &Term) -> u64 {
    match t {
        MetaTerm::Fun(f, args) => {
            let lw = &w[f];
            lw.constant + args.iter().zip(&lw.coeffs).map(|(a, c)| c * ground(w, &a.body)).sum::<u64>()
        }
        _ => 0,
    }
}

// den(C[s]) = k den(s) + den(C[0]) where k is the coefficient of the hole.
#[test]
fn weights_are_linear_in_a_hole() {
    let (a, w) = weighted_gstate();
    let fnn = common::fn_();
    check((any::<u64>(), any::<u64>()), |(seed, pick)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(c) = gen(&a.signature, &fnn, &[], 3, &mut rng) else { return Err(TestCaseError::reject("no term")) };
        let Some(s) = gen(&a.signature, &fnn, &[], 2, &mut rng) else { return Err(TestCaseError::reject("no term")) };
        let holes: Vec<_> = c
            .positions()
            .into_iter()
            .filter(|p| {
                let (sub, outer) = c.at(p).unwrap();
                outer.is_empty() && matches!(sub, MetaTerm::Fun(f, _) if a.signature.get(f).unwrap().result == fnn)
            })
            .collect();
        let pos = &holes[(pick % holes.len() as u64) as usize];
        let ctx = c.replace_at(pos, MetaTerm::meta("Z", vec![]));
        let p = interpret_weight(w, &ctx).unwrap();
        prop_assert_eq!(p.coeff("Z") * ground(w, &s) + p.constant, ground(w, &c.replace_at(pos, s.clone())));
        prop_assert_eq!(interpret_weight(w, &c).unwrap().constant, ground(w, &c));
        Ok(())
    });
}

// Type orders of the corpus: strict part irreflexive and transitive,
// rank decreasing along it.
#[test]
fn type_orders_are_well_founded() {
    for (n, m) in systems() {
        let ord = default_type_order(&m.system.signature);
        let mut tys: Vec<MolType> = Vec::new();
        for (_, f) in m.system.signature.symbols() {
            for t in f.args.iter().flat_map(|a| a.binders.iter().chain([&a.result])).chain([&f.result]) {
                if !tys.contains(t) {
                    tys.push(t.clone());
                }
            }
        }
        for a in &tys {
            assert!(!ord.lt(a, a), "{n}");
            for b in &tys {
                if ord.lt(a, b) {
                    assert!(ord.rank(a) < ord.rank(b), "{n}");
                    assert!(!ord.lt(b, a), "{n}");
                    for c in &tys {
                        if ord.lt(b, c) {
                            assert!(ord.lt(a, c), "{n}");
                        }
                    }
                }
                assert_eq!(ord.equiv(a, b), a == b);
            }
        }
    }
}

#[test]
fn synthesized_precedences_are_well_founded() {
    for (n, m) in systems() {
        let p = synthesize_precedence(&m.system);
        assert!(p.is_well_founded(), "{n}");
        let syms: Vec<_> = m.system.signature.names().cloned().collect();
        for f in &syms {
            assert!(!p.gt(f, f), "{n}");
            for g in &syms {
                if p.eq(f, g) {
                    assert!(!p.gt(f, g), "{n}");
                }
            }
        }
    }
}
