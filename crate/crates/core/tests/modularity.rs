mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{at, fn_, load, manifest, node_count, term};
use modsn_core::frontend::SplitDirective;
use modsn_core::gen::{lhs_instances, Enumerator, DEFAULT_CAP};
use modsn_core::modular::{
    a_with_projections, bot_symbol, build_projection_rules, check_a_accessible, check_a_layer, check_modular_sn, complete_weights,
    emit_fo_trs, find_linear_weights, fo_rules, interpret_weight, pair_symbol, parse_fo_trs, projection_types, split_fo_ho,
    verify_weights, AProof, FoBackend, LinearWeight, SplitSpec, Status, WeightMap, OBLIGATION_ACCESSIBLE, OBLIGATION_A_PROJ,
    OBLIGATION_B_GS, OBLIGATION_LAYER,
};
use modsn_core::rewrite::{sn_oracle, Budget, Rewriter};
use modsn_core::schema::{
    check_general_schema, default_type_order, replay_general_schema, synthesize_precedence, Clause5, GsConfig, SubtermVariant,
};
use modsn_core::term::name;
use modsn_core::{ComputationSystem, Manifest, MetaTerm, Name, Signature, Term};

fn set(xs: &[&str]) -> BTreeSet<Name> {
    xs.iter().map(|x| name(x)).collect()
}

fn manifest_split(m: &Manifest) -> SplitSpec {
    let Some(SplitDirective::Explicit { a, b }) = &m.split else { panic!("no explicit split") };
    SplitSpec::from_rule_names(&m.system, a, b).unwrap()
}

/// gstate entirely in A.
fn gstate_split(m: &Manifest) -> SplitSpec {
    SplitSpec::new(&m.system, m.system.rules.clone(), Vec::new())
}

fn names(rules: &[modsn_core::Rule]) -> Vec<String> {
    rules.iter().map(|r| r.name.to_string()).collect()
}

#[test]
fn handler_get_rule_satisfies_layer_condition() {
    let m = load("effect-full");
    let split = manifest_split(&m);
    assert_eq!(split.sigma_a, set(&["get", "put", "sub"]));
    let hg = m.system.rule("h_g").unwrap();
    assert!(check_a_layer(hg, &split.sigma_a, &split.theta).is_ok());
}

fn gstate_with(extra: &str) -> Manifest {
    let base = modsn_core::frontend::corpus("gstate").unwrap();
    manifest(&format!("{base}\n{extra}\n"))
}

#[test]
fn meta_argument_under_a_head_violates_layer() {
    let m = gstate_with("f : N, (N -> F(N)), N -> F(N)\n(bad) f(V, x.M[x], K) -> put(V, M[K])");
    let bad = m.system.rule("bad").unwrap();
    let v = check_a_layer(bad, &set(&["get", "put", "sub"]), &set(&["0", "return"])).unwrap_err();
    assert!(v.to_string().contains("put"), "{v}");
}

#[test]
fn rule_without_a_symbols_satisfies_layer() {
    let m = load("mam");
    let beta = m.system.rule("beta").unwrap();
    assert!(check_a_layer(beta, &set(&["get", "put", "sub"]), &BTreeSet::new()).is_ok());
}

#[test]
fn projection_rules_at_one_type() {
    let m = load("gstate");
    let types = BTreeSet::from([fn_()]);
    let (ext, rules) = build_projection_rules(&types, &m.system.signature).unwrap();
    let pair = pair_symbol(&fn_());
    let bot = bot_symbol(&fn_());
    assert_eq!(ext.len(), 2);
    assert_eq!(ext.get(&bot).unwrap().arity(), 0);
    assert_eq!(ext.get(&pair).unwrap().arity(), 2);
    assert_eq!(rules.len(), 2);
    let sig = m.system.signature.merged(&ext);
    let cs = ComputationSystem::new(sig, rules).unwrap();
    let t = term(&cs_manifest(&cs), &format!("{pair}(return(0), {bot})"));
    let mut reducts = Rewriter::new(&cs).reducts(&t);
    reducts.sort();
    let mut want = vec![term(&cs_manifest(&cs), "return(0)"), MetaTerm::constant(&bot)];
    want.sort();
    assert_eq!(reducts, want);
}

fn cs_manifest(cs: &ComputationSystem) -> Manifest {
    Manifest { system: cs.clone(), ..Default::default() }
}

#[test]
fn no_projection_types_no_rules() {
    let (ext, rules) = build_projection_rules(&BTreeSet::new(), &Signature::new()).unwrap();
    assert!(ext.is_empty());
    assert!(rules.is_empty());
}

#[test]
fn projection_names_must_be_fresh() {
    let m = manifest("atomic N\nbot_N : -> N\n");
    assert!(build_projection_rules(&BTreeSet::from([at("N")]), &m.system.signature).is_err());
}

fn proj_only() -> ComputationSystem {
    let m = load("gstate");
    let (ext, rules) = build_projection_rules(&BTreeSet::from([fn_()]), &m.system.signature).unwrap();
    ComputationSystem::new(m.system.signature.merged(&ext), rules).unwrap()
}

// Every projection step drops at least the pair node.
#[test]
fn projection_terms_are_sn() {
    let cs = proj_only();
    let pair = pair_symbol(&fn_());
    let bot = bot_symbol(&fn_());
    let mut en = Enumerator::new(&cs.signature, &[pair.as_str(), bot.as_str(), "return", "0"], 12);
    let seeds = en.terms(&fn_(), &[], 4);
    assert!(seeds.iter().any(|t| t.depth() >= 3));
    let rw = Rewriter::new(&cs);
    for s in &seeds {
        for u in rw.reducts(s) {
            assert!(node_count(&u) < node_count(s));
        }
    }
    assert!(sn_oracle(&cs, &seeds, Budget::default()).is_sn());
}

#[test]
fn split_map_div_minus() {
    let m = load("mapDivMinusHard");
    let s = split_fo_ho(&m.system);
    assert_eq!(names(&s.rules_a), vec!["3", "4", "5", "6", "7"]);
    assert_eq!(names(&s.rules_b), vec!["1", "2"]);
    s.validate().unwrap();
}

#[test]
fn split_first_order_system() {
    let m = load("loop");
    let s = split_fo_ho(&m.system);
    assert_eq!(names(&s.rules_a), vec!["loop"]);
    assert!(s.rules_b.is_empty());
}

// rec's third argument binds two variables.
#[test]
fn split_higher_order_system() {
    let m = load("recursor");
    let s = split_fo_ho(&m.system);
    assert!(s.rules_a.is_empty());
    assert_eq!(names(&s.rules_b), vec!["recZ", "recS"]);
}

fn declared_weights() -> WeightMap {
    load("gstate").weight_map()
}

#[test]
fn declared_weights_as_written() {
    let w = declared_weights();
    assert_eq!(w[&name("get")], LinearWeight::new(2, vec![2]));
    assert_eq!(w[&name("put")], LinearWeight::new(1, vec![0, 1]));
    assert_eq!(w[&name("sub")], LinearWeight::new(1, vec![2, 0]));
}

fn gstate_meta(text: &str) -> MetaTerm {
    let m = load("gstate");
    let f = fn_();
    let decls = [
        ("V", vec![], at("N")),
        ("K", vec![], at("N")),
        ("X", vec![at("N")], f.clone()),
        ("M", vec![at("N")], f.clone()),
    ];
    common::meta(&m, &decls, text)
}

// put(V, get(w.X[w])) = (2 w_X + 2) + 1, V has coefficient 0.
#[test]
fn weight_of_update_then_lookup() {
    let p = interpret_weight(&declared_weights(), &gstate_meta("put(V, get(w.X[w]))")).unwrap();
    assert_eq!(p.coeff("X"), 2);
    assert_eq!(p.coeff("V"), 0);
    assert_eq!(p.constant, 3);
}

#[test]
fn weight_of_bare_metavariable() {
    let p = interpret_weight(&WeightMap::new(), &MetaTerm::meta("M", vec![])).unwrap();
    assert_eq!(p.coeff("M"), 1);
    assert_eq!(p.constant, 0);
}

// den[sub](den[put](V, M[x]), K) = 2 (w_M + 1) + 1.
#[test]
fn weight_of_substitution_over_update() {
    let p = interpret_weight(&declared_weights(), &gstate_meta("sub(x.put(V, M[x]), K)")).unwrap();
    assert_eq!(p.coeff("M"), 2);
    assert_eq!(p.coeff("V"), 0);
    assert_eq!(p.coeff("K"), 0);
    assert_eq!(p.constant, 3);
}

#[test]
fn missing_weight_is_an_error() {
    assert!(interpret_weight(&WeightMap::new(), &gstate_meta("put(V, get(w.X[w]))")).is_err());
}

/// gstate with projections at F(N), and the declared weights completed.
fn gstate_proj() -> (ComputationSystem, WeightMap) {
    let m = load("gstate");
    let split = gstate_split(&m);
    let a = a_with_projections(&m.system, &split).unwrap();
    let w = complete_weights(&a, &projection_types(&m.system, &split), &m.weight_map());
    (a, w)
}

// Hand-computed sides per rule, as (coefficient of the one metavariable
// that matters, constant).
#[test]
fn declared_weights_decrease_on_every_rule() {
    let (a, w) = gstate_proj();
    assert_eq!(a.rules.len(), 10);
    let pair = pair_symbol(&fn_());
    assert_eq!(w[&name(&pair)], LinearWeight::new(1, vec![1, 1]));
    assert_eq!(w[&name(&bot_symbol(&fn_()))], LinearWeight::new(0, vec![]));
    let expected: BTreeMap<&str, (&str, (u64, u64), (u64, u64))> = BTreeMap::from([
        ("lu", ("X", (2, 4), (1, 0))),
        ("ll", ("X", (4, 6), (2, 2))),
        ("uu", ("X", (1, 2), (1, 1))),
        ("ul", ("X", (2, 3), (2, 2))),
        ("sub1", ("K", (0, 1), (0, 0))),
        ("sub2", ("M", (2, 1), (1, 0))),
        ("sub3", ("M", (4, 5), (4, 4))),
        ("sub4", ("M", (2, 3), (2, 2))),
    ]);
    let checks = verify_weights(&a, &w);
    assert_eq!(checks.len(), 10);
    for c in &checks {
        assert!(c.ok, "{c}");
        let (l, r) = (c.lhs.as_ref().unwrap(), c.rhs.as_ref().unwrap());
        if let Some((mv, (lc, lk), (rc, rk))) = expected.get(&*c.rule) {
            assert_eq!((l.coeff(mv), l.constant), (*lc, *lk), "({}) lhs", c.rule);
            assert_eq!((r.coeff(mv), r.constant), (*rc, *rk), "({}) rhs", c.rule);
        } else {
            // projections: M1 + M2 + 1 against one of them
            assert_eq!(l.constant, 1);
            assert_eq!(l.coeff("M1") + l.coeff("M2"), 2);
            assert_eq!(r.constant, 0);
        }
    }
}

#[test]
fn non_decreasing_rule_is_rejected() {
    let m = manifest("atomic o\nf : o -> o\n(r) f(X) -> f(X)\n");
    for c in 0..=2 {
        for k in 0..=2 {
            let w = WeightMap::from([(name("f"), LinearWeight::new(k, vec![c]))]);
            assert!(!verify_weights(&m.system, &w)[0].ok);
        }
    }
    assert!(find_linear_weights(&m.system, 3, 3).is_none());
}

#[test]
fn empty_system_has_trivial_weights() {
    assert!(verify_weights(&ComputationSystem::empty(), &WeightMap::new()).is_empty());
}

/// Symbols outside the rules get constant 1 and coefficients 1.
fn total(cs: &ComputationSystem, mut w: WeightMap) -> WeightMap {
    for (f, ty) in cs.signature.symbols() {
        w.entry(f.clone()).or_insert_with(|| LinearWeight::new(1, vec![1; ty.arity()]));
    }
    w
}

/// Weight of a ground term evaluated directly, independent of the
/// polynomial code.
fn ground_weight(w: &WeightMap, t: &Term) -> u64 {
    match t {
        MetaTerm::Fun(f, args) => {
            let lw = &w[f];
            lw.constant + args.iter().zip(&lw.coeffs).map(|(a, c)| c * ground_weight(w, &a.body)).sum::<u64>()
        }
        _ => 0,
    }
}

#[test]
fn search_finds_weights_within_bounds() {
    let (a, _) = gstate_proj();
    let w = find_linear_weights(&a, 2, 2).expect("weights within (2,2)");
    assert!(verify_weights(&a, &w).iter().all(|c| c.ok));
    let w = total(&a, w);
    let rw = Rewriter::new(&a);
    for s in lhs_instances(&a, 3, DEFAULT_CAP) {
        for u in rw.reducts(&s) {
            assert!(ground_weight(&w, &s) > ground_weight(&w, &u), "{s} -> {u}");
        }
    }
}

#[test]
fn search_on_projections_alone() {
    let cs = proj_only();
    let w = find_linear_weights(&cs, 1, 1).expect("found");
    assert_eq!(w[&name(&pair_symbol(&fn_()))], LinearWeight::new(1, vec![1, 1]));
}

#[test]
fn gstate_is_accessible() {
    let m = load("gstate");
    let ord = default_type_order(&m.system.signature);
    assert!(check_a_accessible(&m.system.signature, &m.system.rules, &ord).is_ok());
    assert!(check_a_accessible(&m.system.signature, &[], &ord).is_ok());
}

// c binds a variable of its own result type, so (a3) stops at c.
#[test]
fn inaccessible_metavariable_is_reported() {
    let m = manifest(
        "atomic N\ntype F/1\n0 : -> N\nreturn : N -> F(N)\nc : (F(N) -> F(N)) -> F(N)\ng : F(N) -> F(N)\n\
         (g1) g(c(x.M[x])) -> M[return(0)]\n",
    );
    let ord = default_type_order(&m.system.signature);
    let e = check_a_accessible(&m.system.signature, &m.system.rules, &ord).unwrap_err();
    assert_eq!((&*e.0, &*e.1), ("g1", "M"));
}

fn structural() -> GsConfig {
    GsConfig { variant: SubtermVariant::Structural, clause5: Clause5::Lex }
}

#[test]
fn effect_system_is_modular_yes() {
    let m = load("effect-full");
    let split = manifest_split(&m);
    let backend = FoBackend { weights: Some(m.weight_map()), ..Default::default() };
    let ord = default_type_order(&m.system.signature);
    let r = check_modular_sn(&m.system, &split, &backend, &ord, structural()).unwrap();
    let names: Vec<&str> = r.obligations.iter().map(|o| o.name.as_str()).collect();
    assert_eq!(names, vec![OBLIGATION_LAYER, OBLIGATION_ACCESSIBLE, OBLIGATION_A_PROJ, OBLIGATION_B_GS]);
    for o in &r.obligations {
        assert_eq!(o.status, Status::Discharged, "{}: {:?}", o.name, o.evidence);
    }
    assert!(r.is_yes());
    // every sub-verdict replays on its own
    let Some(AProof::Weights(w)) = &r.a_proof else { panic!("{:?}", r.a_proof) };
    assert!(verify_weights(&r.a_proj, w).iter().all(|c| c.ok));
    let b = split.b_system(&m.system);
    let prec = synthesize_precedence(&b);
    let res = check_general_schema(&b, &ord, &prec, structural());
    replay_general_schema(&b, &ord, &prec, structural(), &res).unwrap();
    assert_eq!(r.b_result.as_ref().unwrap(), &res);
}

#[test]
fn map_div_minus_is_modular_yes() {
    let m = load("mapDivMinusHard");
    let split = split_fo_ho(&m.system);
    let ord = default_type_order(&m.system.signature);
    let r = check_modular_sn(&m.system, &split, &FoBackend::default(), &ord, GsConfig::default()).unwrap();
    assert!(r.is_yes(), "{:?}", r.failed());
    assert!(matches!(r.a_proof, Some(AProof::DependencyPairs(_))));
}

#[test]
fn layer_violation_fails_obligation_zero() {
    let m = gstate_with("f : N, (N -> F(N)), N -> F(N)\n(bad) f(V, x.M[x], K) -> put(V, M[K])");
    let a: Vec<_> = m.system.rules.iter().filter(|r| &*r.name != "bad").cloned().collect();
    let b = vec![m.system.rule("bad").unwrap().clone()];
    let split = SplitSpec::new(&m.system, a, b);
    let backend = FoBackend { weights: Some(m.weight_map()), ..Default::default() };
    let ord = default_type_order(&m.system.signature);
    let r = check_modular_sn(&m.system, &split, &backend, &ord, GsConfig::default()).unwrap();
    assert!(!r.is_yes());
    let zero = &r.obligations[0];
    assert_eq!(zero.name, OBLIGATION_LAYER);
    assert_eq!(zero.status, Status::Failed);
}

#[test]
fn invalid_split_is_an_error() {
    let m = load("effect-full");
    assert!(SplitSpec::from_rule_names(&m.system, &[name("lu")], &[]).is_err());
    assert!(SplitSpec::from_rule_names(&m.system, &[name("nope")], &[]).is_err());
}

// A rules never mention B-defined symbols.
#[test]
fn split_soundness_on_corpus() {
    for n in modsn_core::frontend::corpus_names() {
        let m = load(n);
        let mut splits = vec![split_fo_ho(&m.system)];
        if let Some(SplitDirective::Explicit { .. }) = m.split {
            splits.push(manifest_split(&m));
        }
        for s in splits {
            for r in &s.rules_a {
                assert!(r.fun_symbols().is_disjoint(&s.sigma_b), "{n} ({})", r.name);
            }
        }
    }
}

#[test]
fn fo_document_for_map_div_minus() {
    let m = load("mapDivMinusHard");
    let split = split_fo_ho(&m.system);
    let a = a_with_projections(&m.system, &split).unwrap();
    let doc = emit_fo_trs(&a.rules).unwrap();
    let rules: Vec<&str> = doc.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(rules.len(), 7);
    assert!(rules.contains(&"minus(W,0) -> W"));
    assert_eq!(parse_fo_trs(&doc).unwrap(), fo_rules(&a.rules).unwrap());
    assert_eq!(doc, emit_fo_trs(&a.rules).unwrap());
}

#[test]
fn fo_document_for_no_rules() {
    let doc = emit_fo_trs(&[]).unwrap();
    assert!(!doc.contains("->"));
    assert!(parse_fo_trs(&doc).unwrap().is_empty());
}

#[test]
fn binders_are_not_first_order() {
    let m = load("gstate");
    assert!(emit_fo_trs(&m.system.rules).is_err());
}

// Declared weights that decrease on seeds: the oracle agrees.
#[test]
fn weights_agree_with_oracle() {
    let (a, w) = gstate_proj();
    assert!(verify_weights(&a, &w).iter().all(|c| c.ok));
    let seeds = lhs_instances(&a, 3, DEFAULT_CAP);
    assert!(sn_oracle(&a, &seeds, Budget::default()).is_sn());
}

// den(C[s]) = k den(s) + den(C[0]) with k fixed by the context.
#[test]
fn weights_are_compositional() {
    let (a, w) = gstate_proj();
    let w = total(&a, w);
    let seeds = lhs_instances(&a, 2, DEFAULT_CAP);
    let fillers: Vec<Term> = seeds.iter().take(8).cloned().collect();
    let mut checked = 0;
    for t in seeds.iter().take(40) {
        for pos in t.positions() {
            let (sub, _) = t.at(&pos).unwrap();
            if !matches!(sub, MetaTerm::Fun(f, _) if a.signature.get(f).map(|ty| ty.result == fn_()).unwrap_or(false)) {
                continue;
            }
            let ctx = t.replace_at(&pos, MetaTerm::meta("Z", vec![]));
            let p = interpret_weight(&w, &ctx).unwrap();
            for s in &fillers {
                if !s.is_closed() {
                    continue;
                }
                let filled = t.replace_at(&pos, s.clone());
                let ds = ground_weight(&w, s);
                assert_eq!(ground_weight(&w, &filled), p.coeff("Z") * ds + p.constant);
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "{checked}");
}
