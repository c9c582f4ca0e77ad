mod common;

use common::{at, ctx, load, manifest, meta, term};
use modsn_core::frontend::corpus_names;
use modsn_core::gen::{lhs_instances, DEFAULT_CAP};
use modsn_core::rewrite::{
    find_loop, match_second_order, normalize, one_step_reducts, sn_oracle, Budget, OracleResult, Rewriter, Strategy,
};
use modsn_core::term::{substitute_metavars, typecheck};
use modsn_core::{Abs, Assignment, ComputationSystem, MetaTerm, MolType};

fn untyped() -> modsn_core::Manifest {
    manifest("atomic o\nunit : -> o\nlam : (o -> o) -> o\napp : o, o -> o\n")
}

/// Every term over unit/app/lam with exactly `size` nodes, under `scope`
/// bound variables.
fn all_terms(size: usize, scope: usize) -> Vec<MetaTerm> {
    let mut out = Vec::new();
    if size == 1 {
        out.push(MetaTerm::constant("unit"));
        out.extend((0..scope).map(MetaTerm::BVar));
        return out;
    }
    for body in all_terms(size - 1, scope + 1) {
        out.push(MetaTerm::fun("lam", vec![Abs::new(vec![("x", at("o"))], body)]));
    }
    for k in 1..size - 1 {
        for a in all_terms(k, scope) {
            for b in all_terms(size - 1 - k, scope) {
                out.push(MetaTerm::app("app", vec![a.clone(), b]));
            }
        }
    }
    out
}

// Brute force: every binding of M (one binder) and N of size at most 3
// that reproduces the subject; the matcher must return exactly that one.
#[test]
fn match_beta_redex_agrees_with_brute_force() {
    let m = untyped();
    let o = at("o");
    let decls = [("M", vec![o.clone()], o.clone()), ("N", vec![], o.clone())];
    let pat = meta(&m, &decls, "app(lam(x.M[x]), N)");
    let subject = term(&m, "app(lam(x.app(x, x)), unit)");

    let mut solutions = Vec::new();
    for ms in 1..=3 {
        for mb in all_terms(ms, 1) {
            for ns in 1..=3 {
                for nb in all_terms(ns, 0) {
                    let theta = Assignment::new()
                        .bind("M", Abs::new(vec![("x", o.clone())], mb.clone()))
                        .bind("N", Abs::plain(nb.clone()));
                    if substitute_metavars(&theta, &pat).unwrap() == subject {
                        solutions.push(theta);
                    }
                }
            }
        }
    }
    assert_eq!(solutions.len(), 1);
    let got = match_second_order(&pat, &subject, &ctx(&decls)).unwrap().unwrap();
    assert_eq!(got, solutions[0]);
    assert_eq!(got.get("M").unwrap().body, MetaTerm::app("app", vec![MetaTerm::BVar(0), MetaTerm::BVar(0)]));
    assert_eq!(got.get("N").unwrap().body, MetaTerm::constant("unit"));
}

// The metavariable L sits under the binder without x as an argument, so
// it cannot capture x.
#[test]
fn match_fails_on_escaping_bound_variable() {
    let m = untyped();
    let o = at("o");
    let decls = [("L", vec![], o.clone())];
    let pat = meta(&m, &decls, "lam(x.app(L, x))");
    let subject = term(&m, "lam(x.app(x, x))");
    assert_eq!(match_second_order(&pat, &subject, &ctx(&decls)).unwrap(), None);
    let closed = term(&m, "lam(x.app(unit, x))");
    let theta = match_second_order(&pat, &closed, &ctx(&decls)).unwrap().unwrap();
    assert_eq!(theta.get("L").unwrap().body, MetaTerm::constant("unit"));
}

#[test]
fn match_nullary_metavariable() {
    let m = untyped();
    let o = at("o");
    let decls = [("M", vec![], o)];
    let pat = MetaTerm::meta("M", vec![]);
    let theta = match_second_order(&pat, &term(&m, "unit"), &ctx(&decls)).unwrap().unwrap();
    assert_eq!(theta.len(), 1);
    assert_eq!(theta.get("M").unwrap(), &Abs::plain(MetaTerm::constant("unit")));
}

// Every match found on the seeds reproduces its subject.
#[test]
fn matching_is_sound_on_corpus_seeds() {
    for n in corpus_names() {
        let m = load(n);
        for s in lhs_instances(&m.system, 2, DEFAULT_CAP) {
            for r in &m.system.rules {
                if let Ok(Some(theta)) = match_second_order(&r.lhs, &s, &r.context) {
                    assert_eq!(substitute_metavars(&theta, &r.lhs).unwrap(), s, "{n} ({})", r.name);
                }
            }
        }
    }
}

#[test]
fn projection_redex_in_mam() {
    let m = load("mam");
    let t = term(&m, "prj1(cpair(return(unit), return(unit)))");
    let r = one_step_reducts(&m.system, &t);
    assert_eq!(r.len(), 1);
    assert_eq!(&*r[0].0.rule, "prod1");
    assert!(r[0].0.position.is_empty());
    assert_eq!(r[0].1, term(&m, "return(unit)"));
}

#[test]
fn constructor_is_normal() {
    let m = load("mam");
    assert!(one_step_reducts(&m.system, &term(&m, "unit")).is_empty());
}

// By hand: (uu) matches at the root; the inner put(0, return(0)) has no
// put or get below it, and no other rule has head put.
#[test]
fn double_update_has_one_reduct() {
    let m = load("gstate");
    let t = term(&m, "put(0, put(0, return(0)))");
    let r = one_step_reducts(&m.system, &t);
    assert_eq!(r.len(), 1);
    assert_eq!(&*r[0].0.rule, "uu");
    assert!(r[0].0.position.is_empty());
    assert_eq!(r[0].1, term(&m, "put(0, return(0))"));
}

const TM: &str = "get(x.put(inc(x), get(y.put(y, get(z.return(z))))))";

#[test]
fn run_state_computes_inc_zero() {
    for n in ["handle", "effect-full"] {
        let m = load(n);
        let t = term(&m, &format!("appv(runState({TM}), 0)"));
        assert_eq!(normalize(&m.system, &t, 10_000).unwrap(), term(&m, "inc(0)"), "{n}");
    }
}

// The displayed reduction: one (run) step, then eventually
// lamv(z.inc(z)) applied to 0, then inc(0) by (betav).
#[test]
fn run_state_trace_steps_are_reducts() {
    let m = load("effect-full");
    let start = term(&m, &format!("appv(runState({TM}), 0)"));
    let first = term(
        &m,
        &format!("appv(handler(y.lamv(z.y), k.lamv(n.appv(app(k, n), n)), p.k.lamv(n.appv(app(k, p), p)), {TM}), 0)"),
    );
    let rw = Rewriter::new(&m.system);
    assert!(rw.reducts(&start).contains(&first));
    let last = term(&m, "appv(lamv(z.inc(z)), 0)");
    assert_eq!(rw.reducts(&last), vec![term(&m, "inc(0)")]);
    // lamv(z.inc(z))@0 is reachable from the first reduct
    let mut frontier = vec![first];
    let mut seen = std::collections::HashSet::new();
    let mut found = false;
    while let Some(t) = frontier.pop() {
        if t == last {
            found = true;
            break;
        }
        if seen.insert(t.clone()) && seen.len() < 20_000 {
            frontier.extend(rw.reducts(&t));
        }
    }
    assert!(found);
}

#[test]
fn normalize_without_rules_is_identity() {
    let m = load("gstate");
    let empty = m.system.with_rules(Vec::new());
    let t = term(&m, "get(v.put(v, return(v)))");
    assert_eq!(normalize(&empty, &t, 10).unwrap(), t);
}

// By hand: (ll) at the root merges the two reads, and (lu) applies to the
// inner get since its payload return(w) does not mention v. The root
// reduct is normal: (lu) would need return(v) not to mention v.
#[test]
fn normalize_merges_reads() {
    let m = load("gstate");
    let t = term(&m, "get(w.get(v.put(v, return(w))))");
    let nf = term(&m, "get(v.put(v, return(v)))");
    let rw = Rewriter::new(&m.system);
    let r = rw.one_step_reducts(&t);
    let got: Vec<(String, Vec<usize>, MetaTerm)> = r.into_iter().map(|(x, u)| (x.rule.to_string(), x.position, u)).collect();
    assert_eq!(got.len(), 2);
    assert!(got.contains(&("ll".into(), vec![], nf.clone())));
    assert!(got.contains(&("lu".into(), vec![0], term(&m, "get(w.return(w))"))));
    assert!(rw.is_normal(&nf));
    assert_eq!(normalize(&m.system, &t, 100).unwrap(), nf);
}

#[test]
fn normalize_is_deterministic() {
    let m = load("effect-full");
    let t = term(&m, &format!("appv(runState({TM}), 0)"));
    let rw = Rewriter::new(&m.system);
    for s in [Strategy::Outermost, Strategy::Innermost] {
        assert_eq!(rw.normalize(&t, 10_000, s), rw.normalize(&t, 10_000, s));
    }
}

#[test]
fn normalize_reports_exhausted_fuel() {
    let m = load("loop");
    let t = term(&m, "f(c)");
    let e = normalize(&m.system, &t, 5).unwrap_err();
    assert_eq!(e.last, t);
}

#[test]
fn oracle_mam_seeds_are_sn() {
    let m = load("mam");
    let seeds = lhs_instances(&m.system, 3, DEFAULT_CAP);
    assert!(!seeds.is_empty());
    assert!(sn_oracle(&m.system, &seeds, Budget::default()).is_sn());
}

#[test]
fn oracle_finds_self_loop() {
    let m = load("loop");
    match sn_oracle(&m.system, &[term(&m, "f(c)")], Budget::default()) {
        OracleResult::NonSN(w) => {
            assert_eq!(w.steps.len(), 1);
            assert!(w.is_cycle());
            assert!(w.replay(&m.system));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn oracle_without_rules() {
    let m = load("gstate");
    let empty = m.system.with_rules(Vec::new());
    let r = sn_oracle(&empty, &[term(&m, "get(v.put(v, return(v)))")], Budget::default());
    assert_eq!(r, OracleResult::SN { max_depth: 0, nodes: 1 });
}

#[test]
fn loop_finder_sees_self_embedding() {
    let m = manifest("atomic o\nc : -> o\nf : o -> o\ng : o -> o\n(e) f(c) -> g(f(c))\n");
    let w = find_loop(&m.system, 1, 5).expect("witness");
    assert_eq!(w.start(), &term(&m, "f(c)"));
    assert_eq!(w.end(), &term(&m, "g(f(c))"));
    assert_eq!(w.embedding, vec![0]);
    assert!(!w.is_cycle());
    assert!(w.replay(&m.system));
}

#[test]
fn loop_finder_on_recursor_finds_nothing() {
    let m = load("recursor");
    assert!(find_loop(&m.system, 3, 50).is_none());
}

#[test]
fn loop_finder_without_rules() {
    assert!(find_loop(&ComputationSystem::empty(), 3, 50).is_none());
}

// Reducts keep the type of the reduced term.
#[test]
fn subject_reduction_on_corpus_seeds() {
    for n in corpus_names() {
        let m = load(n);
        let sig = &m.system.signature;
        for s in lhs_instances(&m.system, 2, DEFAULT_CAP) {
            let ty: MolType = typecheck(sig, &ctx(&[]), &[], &s).unwrap();
            for (redex, u) in one_step_reducts(&m.system, &s) {
                assert_eq!(typecheck(sig, &ctx(&[]), &[], &u).unwrap(), ty, "{n}: {s} -> {u} by {redex}");
            }
        }
    }
}
