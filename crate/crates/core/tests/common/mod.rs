#![allow(dead_code)]

pub mod props;

use modsn_core::frontend::{corpus, parse_manifest, parse_meta_term, parse_term, Manifest};
use modsn_core::{MetaContext, MetaTerm, MolType, Term};

pub fn load(name: &str) -> Manifest {
    parse_manifest(corpus(name).unwrap_or_else(|| panic!("no bundled system {name}"))).unwrap()
}

pub fn manifest(text: &str) -> Manifest {
    parse_manifest(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn term(m: &Manifest, text: &str) -> Term {
    parse_term(&m.system.signature, text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Meta-term under the given metavariable declarations.
pub fn meta(m: &Manifest, decls: &[(&str, Vec<MolType>, MolType)], text: &str) -> MetaTerm {
    parse_meta_term(&m.system.signature, &ctx(decls), text).unwrap_or_else(|e| panic!("{text}: {e}")).0
}

pub fn ctx(decls: &[(&str, Vec<MolType>, MolType)]) -> MetaContext {
    let mut c = MetaContext::new();
    for (n, args, res) in decls {
        assert!(c.push(n, args.clone(), res.clone()));
    }
    c
}

pub fn at(s: &str) -> MolType {
    MolType::atomic(s)
}

pub fn con(c: &str, args: Vec<MolType>) -> MolType {
    MolType::con(c, args)
}

/// `F(N)`, the computation type of the effect systems.
pub fn fn_() -> MolType {
    con("F", vec![at("N")])
}

/// Number of function-symbol nodes, counted independently of the library.
pub fn node_count(t: &MetaTerm) -> usize {
    match t {
        MetaTerm::BVar(_) | MetaTerm::FVar(_) => 1,
        MetaTerm::Meta(_, args) => 1 + args.iter().map(node_count).sum::<usize>(),
        MetaTerm::Fun(_, args) => 1 + args.iter().map(|a| node_count(&a.body)).sum::<usize>(),
    }
}
