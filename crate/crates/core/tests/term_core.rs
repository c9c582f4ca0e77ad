mod common;

use std::collections::BTreeMap;

use common::{at, con, ctx, load, manifest, meta, term};
use modsn_core::term::{
    is_second_order_pattern, name, substitute_metavars, substitute_vars, typecheck, SubstError, TypeError,
};
use modsn_core::{Abs, Assignment, MetaTerm, MolType};

fn l(t: MolType) -> MolType {
    con("L", vec![t])
}

// The beta rule's left-hand side at a = b = o judges to L(o).
#[test]
fn typecheck_beta_lhs() {
    let m = load("stl-beta");
    let o = at("o");
    let c = ctx(&[("M", vec![l(o.clone())], l(o.clone())), ("N", vec![], l(o.clone()))]);
    let t = meta(&m, &[("M", vec![l(o.clone())], l(o.clone())), ("N", vec![], l(o.clone()))], "app(lam(x.M[x]), N)");
    assert_eq!(typecheck(&m.system.signature, &c, &[], &t).unwrap(), l(o));
}

#[test]
fn typecheck_variable_axiom() {
    let m = load("stl-beta");
    let b = at("b");
    let env = vec![(name("x"), b.clone())];
    assert_eq!(typecheck(&m.system.signature, &ctx(&[]), &env, &MetaTerm::fvar("x")).unwrap(), b);
}

// rec : L(Nat), L(Nat), (L(Nat), L(Nat) -> L(Nat)) -> L(Nat): the third
// argument x.y.succ(y) types as succ(y) : L(Nat) under x, y : L(Nat).
#[test]
fn typecheck_recursor_instance() {
    let m = load("recursor");
    let nat = l(at("Nat"));
    let lnat = || nat.clone();
    let body = MetaTerm::app("succ", vec![MetaTerm::BVar(0)]);
    let t = MetaTerm::fun(
        "rec",
        vec![
            Abs::plain(MetaTerm::constant("zero")),
            Abs::plain(MetaTerm::constant("zero")),
            Abs::new(vec![("x", lnat()), ("y", lnat())], body),
        ],
    );
    assert_eq!(typecheck(&m.system.signature, &ctx(&[]), &[], &t).unwrap(), nat);
    assert_eq!(t, term(&m, "rec(zero, zero, x.y.succ(y))"));
}

#[test]
fn typecheck_errors_name_the_problem() {
    let m = load("recursor");
    let sig = &m.system.signature;
    let nat = l(at("Nat"));
    let e = typecheck(sig, &ctx(&[]), &[], &MetaTerm::fvar("q")).unwrap_err();
    assert!(matches!(e, TypeError::UnboundVariable(_)));
    let e = typecheck(sig, &ctx(&[]), &[], &MetaTerm::meta("M", vec![])).unwrap_err();
    assert!(matches!(e, TypeError::UnboundMetavariable(_)));
    let e = typecheck(sig, &ctx(&[]), &[], &MetaTerm::app("succ", vec![])).unwrap_err();
    assert!(matches!(e, TypeError::ArityMismatch { expected: 1, got: 0, .. }));
    let one_binder = MetaTerm::fun(
        "rec",
        vec![
            Abs::plain(MetaTerm::constant("zero")),
            Abs::plain(MetaTerm::constant("zero")),
            Abs::new(vec![("x", nat.clone())], MetaTerm::BVar(0)),
        ],
    );
    assert!(typecheck(sig, &ctx(&[]), &[], &one_binder).is_err());
    let env = vec![(name("b"), at("Nat"))];
    let e = typecheck(sig, &ctx(&[]), &env, &MetaTerm::app("succ", vec![MetaTerm::fvar("b")])).unwrap_err();
    assert!(matches!(e, TypeError::TypeMismatch { .. }));
}

#[test]
fn typecheck_is_deterministic() {
    let m = load("recursor");
    let t = term(&m, "rec(succ(zero), zero, x.y.succ(x))");
    let a = typecheck(&m.system.signature, &ctx(&[]), &[], &t);
    let b = typecheck(&m.system.signature, &ctx(&[]), &[], &t);
    assert_eq!(a, b);
}

#[test]
fn beta_lhs_is_a_pattern() {
    let m = load("stl-beta");
    assert!(is_second_order_pattern(&m.system.rule("beta").unwrap().lhs));
}

#[test]
fn metavariable_argument_is_not_a_pattern() {
    let t = MetaTerm::meta("M", vec![MetaTerm::meta("N", vec![])]);
    assert!(!is_second_order_pattern(&t));
}

#[test]
fn repeated_bound_variable_is_not_a_pattern() {
    let o = at("o");
    let t = MetaTerm::fun("f", vec![Abs::new(vec![("x", o)], MetaTerm::meta("M", vec![MetaTerm::BVar(0), MetaTerm::BVar(0)]))]);
    assert!(!is_second_order_pattern(&t));
}

// Every sub-meta-term of a left-hand side, closed over the binders above
// it, is again a pattern.
#[test]
fn subterms_of_patterns_are_patterns() {
    for n in modsn_core::frontend::corpus_names() {
        let m = load(n);
        for r in &m.system.rules {
            for (sub, depth) in r.lhs.subterms_with_depth() {
                let closed = MetaTerm::fun("wrap", vec![Abs::anonymous(vec![at("o"); depth], sub.clone())]);
                assert!(is_second_order_pattern(&closed), "{n} ({}): {sub}", r.name);
            }
        }
    }
}

fn untyped() -> modsn_core::Manifest {
    manifest("atomic o\nunit : -> o\nzero : -> o\nlam : (o -> o) -> o\napp : o, o -> o\n")
}

#[test]
fn substitute_variable_by_constant() {
    let m = untyped();
    let env = vec![(name("x"), at("o"))];
    let sub = BTreeMap::from([(name("x"), MetaTerm::constant("zero"))]);
    let r = substitute_vars(&m.system.signature, &env, &MetaTerm::fvar("x"), &sub).unwrap();
    assert_eq!(r, MetaTerm::constant("zero"));
}

// lam(y.x){x := y}: the free y must not be captured by the binder.
#[test]
fn substitution_avoids_capture() {
    let m = untyped();
    let env = vec![(name("x"), at("o")), (name("y"), at("o"))];
    let t = MetaTerm::fun("lam", vec![Abs::new(vec![("y", at("o"))], MetaTerm::fvar("x"))]);
    let sub = BTreeMap::from([(name("x"), MetaTerm::fvar("y"))]);
    let r = substitute_vars(&m.system.signature, &env, &t, &sub).unwrap();
    let MetaTerm::Fun(_, args) = &r else { panic!() };
    assert_eq!(args[0].body, MetaTerm::fvar("y"));
    assert_ne!(args[0].body, MetaTerm::BVar(0));
    // the lambda is now constant: it is not the identity
    let id = MetaTerm::fun("lam", vec![Abs::new(vec![("y", at("o"))], MetaTerm::BVar(0))]);
    assert_ne!(r, id);
}

#[test]
fn substitution_is_simultaneous_in_all_occurrences() {
    let m = untyped();
    let env = vec![(name("x"), at("o"))];
    let t = MetaTerm::app("app", vec![MetaTerm::fvar("x"), MetaTerm::fvar("x")]);
    let sub = BTreeMap::from([(name("x"), MetaTerm::constant("unit"))]);
    let r = substitute_vars(&m.system.signature, &env, &t, &sub).unwrap();
    assert_eq!(r, term(&m, "app(unit, unit)"));
}

#[test]
fn substitution_rejects_ill_typed_replacement() {
    let m = load("recursor");
    let env = vec![(name("x"), l(at("Nat")))];
    let sub = BTreeMap::from([(name("x"), MetaTerm::fvar("x"))]);
    let env2 = vec![(name("x"), at("Nat"))];
    assert!(substitute_vars(&m.system.signature, &env, &MetaTerm::fvar("x"), &sub).is_ok());
    let bad = BTreeMap::from([(name("x"), MetaTerm::constant("zero"))]);
    let e = substitute_vars(&m.system.signature, &env2, &MetaTerm::fvar("x"), &bad).unwrap_err();
    assert!(matches!(e, SubstError::TypeMismatch { .. }));
}

#[test]
fn identity_abstraction_returns_its_argument() {
    let theta = Assignment::new().bind("M", Abs::new(vec![("x", at("o"))], MetaTerm::BVar(0)));
    let t = MetaTerm::meta("M", vec![MetaTerm::constant("unit")]);
    assert_eq!(substitute_metavars(&theta, &t).unwrap(), MetaTerm::constant("unit"));
}

// {M := x.app(x,x), N := unit} on app(lam(x.M[x]), N), expected term built
// by hand: the body of M lands under lam's binder.
#[test]
fn metavariable_substitution_under_binder() {
    let m = untyped();
    let o = at("o");
    let theta = Assignment::new()
        .bind("M", Abs::new(vec![("x", o.clone())], MetaTerm::app("app", vec![MetaTerm::BVar(0), MetaTerm::BVar(0)])))
        .bind("N", Abs::plain(MetaTerm::constant("unit")));
    let pat = meta(&m, &[("M", vec![o.clone()], o.clone()), ("N", vec![], o.clone())], "app(lam(x.M[x]), N)");
    let expected = MetaTerm::app(
        "app",
        vec![
            MetaTerm::fun("lam", vec![Abs::new(vec![("x", o)], MetaTerm::app("app", vec![MetaTerm::BVar(0), MetaTerm::BVar(0)]))]),
            MetaTerm::constant("unit"),
        ],
    );
    let r = substitute_metavars(&theta, &pat).unwrap();
    assert_eq!(r, expected);
    assert_eq!(r, term(&m, "app(lam(x.app(x, x)), unit)"));
}

// X ranges over F(N), so the payload is return(0) rather than a bare 0.
#[test]
fn metavariable_substitution_in_gstate_lhs() {
    let m = load("gstate");
    let lu = m.system.rule("lu").unwrap();
    let theta = Assignment::new().bind("X", Abs::plain(term(&m, "return(0)")));
    let r = substitute_metavars(&theta, &lu.lhs).unwrap();
    assert_eq!(r, term(&m, "get(v.put(v, return(0)))"));
    assert_eq!(typecheck(&m.system.signature, &ctx(&[]), &[], &r).unwrap(), lu.ty);
}

#[test]
fn missing_binding_and_arity_errors() {
    let t = MetaTerm::meta("M", vec![]);
    assert!(matches!(substitute_metavars(&Assignment::new(), &t), Err(SubstError::MissingBinding(_))));
    let theta = Assignment::new().bind("M", Abs::new(vec![("x", at("o"))], MetaTerm::BVar(0)));
    assert!(matches!(substitute_metavars(&theta, &t), Err(SubstError::ArityMismatch { expected: 1, got: 0, .. })));
}

#[test]
fn fun_symbols_examples() {
    let m = load("gstate");
    assert!(MetaTerm::fvar("x").fun_symbols().is_empty());
    let lu = &m.system.rule("lu").unwrap().lhs;
    let syms: Vec<String> = lu.fun_symbols().iter().map(|s| s.to_string()).collect();
    assert_eq!(syms, vec!["get", "put"]);
    let mx = MetaTerm::meta("M", vec![MetaTerm::fvar("x")]);
    assert!(mx.fun_symbols().is_empty());
}

// Binder names are hints: renamed terms are equal and get the same answers.
#[test]
fn alpha_equivalent_inputs_agree() {
    let m = load("gstate");
    let fnn = common::fn_();
    let d = [("X", vec![], fnn.clone())];
    let a = meta(&m, &d, "get(v.put(v, X))");
    let b = meta(&m, &d, "get(w.put(w, X))");
    assert_eq!(a, b);
    assert_eq!(a.fun_symbols(), b.fun_symbols());
    assert_eq!(is_second_order_pattern(&a), is_second_order_pattern(&b));
    let c = ctx(&d);
    assert_eq!(typecheck(&m.system.signature, &c, &[], &a), typecheck(&m.system.signature, &c, &[], &b));
    let theta = Assignment::new().bind("X", Abs::plain(term(&m, "return(0)")));
    assert_eq!(substitute_metavars(&theta, &a), substitute_metavars(&theta, &b));
}
