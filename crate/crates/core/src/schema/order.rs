use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::term::{ComputationSystem, MolType, Name, Signature};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum TypeOrderKind {
    /// `a < T(..a..)`: strict part is the proper-subterm relation on types.
    #[default]
    Structural,
    /// Only reflexivity.
    Identity,
}

/// Well-founded preorder on mol types with `rank` as certificate.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TypeOrder {
    pub kind: TypeOrderKind,
}

impl TypeOrder {
    pub fn identity() -> Self {
        TypeOrder { kind: TypeOrderKind::Identity }
    }

    /// Strict part `a <_B b`.
    pub fn lt(&self, a: &MolType, b: &MolType) -> bool {
        match self.kind {
            TypeOrderKind::Structural => a.is_proper_subterm_of(b),
            TypeOrderKind::Identity => false,
        }
    }

    pub fn le(&self, a: &MolType, b: &MolType) -> bool {
        a == b || self.lt(a, b)
    }

    /// `=_B`, syntactic equality for both kinds.
    pub fn equiv(&self, a: &MolType, b: &MolType) -> bool {
        self.le(a, b) && self.le(b, a)
    }

    pub fn rank(&self, a: &MolType) -> usize {
        a.size()
    }

    /// Checks that `rank` strictly decreases along `<_B` on `types`.
    pub fn certify<'a>(&self, types: impl IntoIterator<Item = &'a MolType> + Clone) -> bool {
        for a in types.clone() {
            for b in types.clone() {
                if self.lt(a, b) && self.rank(a) >= self.rank(b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Type order induced by constructor applications.
pub fn default_type_order(_sig: &Signature) -> TypeOrder {
    TypeOrder { kind: TypeOrderKind::Structural }
}

/// Call edge `from -> to` contributed by a rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CallEdge {
    pub from: Name,
    pub to: Name,
    pub rule: Name,
}

/// Symbol precedence as equivalence classes plus a strict order on them.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SymbolPrecedence {
    classes: Vec<Vec<Name>>,
    class_of: BTreeMap<Name, usize>,
    /// `below[c]`: classes strictly below class `c`.
    below: Vec<BTreeSet<usize>>,
    /// Call edges between distinct defined symbols, for reporting.
    pub edges: Vec<CallEdge>,
}

impl SymbolPrecedence {
    fn class(&self, f: &str) -> Option<usize> {
        self.class_of.get(f).copied()
    }

    /// `f >_Σ g`.
    pub fn gt(&self, f: &str, g: &str) -> bool {
        match (self.class(f), self.class(g)) {
            (Some(a), Some(b)) => self.below[a].contains(&b),
            _ => false,
        }
    }

    /// `f =_Σ g`.
    pub fn eq(&self, f: &str, g: &str) -> bool {
        f == g || matches!((self.class(f), self.class(g)), (Some(a), Some(b)) if a == b)
    }

    pub fn classes(&self) -> &[Vec<Name>] {
        &self.classes
    }

    /// Strict order is irreflexive (and by construction transitive).
    pub fn is_well_founded(&self) -> bool {
        self.below.iter().enumerate().all(|(c, b)| !b.contains(&c))
    }

    /// Classes with more than one symbol, with the rule-induced call edges
    /// inside each.
    pub fn cycles(&self) -> Vec<(Vec<Name>, Vec<CallEdge>)> {
        let mut out = Vec::new();
        for (c, members) in self.classes.iter().enumerate() {
            if members.len() < 2 {
                continue;
            }
            let edges = self
                .edges
                .iter()
                .filter(|e| e.from != e.to && self.class(&e.from) == Some(c) && self.class(&e.to) == Some(c))
                .cloned()
                .collect();
            out.push((members.clone(), edges));
        }
        out
    }

    /// Strict pairs `f > g` witnessed by a call edge (rhs occurrence).
    pub fn used_pairs(&self) -> Vec<(Name, Name)> {
        let mut out: Vec<(Name, Name)> = Vec::new();
        for e in &self.edges {
            if self.gt(&e.from, &e.to) && !out.iter().any(|(a, b)| *a == e.from && *b == e.to) {
                out.push((e.from.clone(), e.to.clone()));
            }
        }
        out
    }

    /// Builds a precedence from explicit relations `f > g` and `f = g`.
    pub fn from_relations(symbols: &[Name], strict: &[(Name, Name)], equal: &[(Name, Name)]) -> Result<Self, String> {
        let mut g: DiGraph<Name, ()> = DiGraph::new();
        let mut idx: BTreeMap<Name, NodeIndex> = BTreeMap::new();
        for s in symbols {
            idx.insert(s.clone(), g.add_node(s.clone()));
        }
        for (a, b) in strict {
            let (Some(&x), Some(&y)) = (idx.get(a), idx.get(b)) else {
                return Err(format!("unknown symbol in precedence {a} > {b}"));
            };
            g.add_edge(x, y, ());
        }
        for (a, b) in equal {
            let (Some(&x), Some(&y)) = (idx.get(a), idx.get(b)) else {
                return Err(format!("unknown symbol in precedence {a} = {b}"));
            };
            g.add_edge(x, y, ());
            g.add_edge(y, x, ());
        }
        let p = from_graph(&g, &[]);
        for (a, b) in strict {
            if p.eq(a, b) {
                return Err(format!("precedence {a} > {b} lies on a cycle"));
            }
        }
        Ok(p)
    }
}

impl fmt::Display for SymbolPrecedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.used_pairs();
        let mut parts: Vec<String> = pairs.iter().map(|(a, b)| format!("{a} > {b}")).collect();
        for (members, _) in self.cycles() {
            let m: Vec<&str> = members.iter().map(|n| &**n).collect();
            parts.push(m.join(" = "));
        }
        write!(f, "{}", parts.join(", "))
    }
}

/// Call-graph precedence: `f -> g` when `g` occurs in the rhs of an
/// `f`-rule; strongly connected components become equivalence classes and
/// constructors sit below every defined symbol.
pub fn synthesize_precedence(cs: &ComputationSystem) -> SymbolPrecedence {
    let defined = cs.defined();
    let mut g: DiGraph<Name, ()> = DiGraph::new();
    let mut idx: BTreeMap<Name, NodeIndex> = BTreeMap::new();
    for s in cs.signature.names() {
        idx.insert(s.clone(), g.add_node(s.clone()));
    }
    let mut edges = Vec::new();
    for r in &cs.rules {
        let f = r.head().clone();
        for callee in r.rhs.fun_symbols() {
            if !idx.contains_key(&callee) {
                continue;
            }
            if defined.contains(&callee) {
                g.update_edge(idx[&f], idx[&callee], ());
            }
            edges.push(CallEdge { from: f.clone(), to: callee, rule: r.name.clone() });
        }
    }
    // constructors below all defined symbols
    for d in &defined {
        for c in cs.signature.names() {
            if !defined.contains(c) {
                g.update_edge(idx[d], idx[c], ());
            }
        }
    }
    from_graph(&g, &edges)
}

fn from_graph(g: &DiGraph<Name, ()>, edges: &[CallEdge]) -> SymbolPrecedence {
    let sccs = tarjan_scc(g);
    let mut class_of = BTreeMap::new();
    let mut classes = Vec::new();
    let mut node_class = vec![0usize; g.node_count()];
    for (c, comp) in sccs.iter().enumerate() {
        let mut members: Vec<Name> = comp.iter().map(|n| g[*n].clone()).collect();
        members.sort();
        for n in comp {
            node_class[n.index()] = c;
        }
        for m in &members {
            class_of.insert(m.clone(), c);
        }
        classes.push(members);
    }
    // tarjan_scc returns components in reverse topological order, so every
    // successor class has a smaller index and is finished first.
    let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); classes.len()];
    for (c, comp) in sccs.iter().enumerate() {
        let mut acc = BTreeSet::new();
        for n in comp {
            for s in g.neighbors(*n) {
                let d = node_class[s.index()];
                if d != c {
                    acc.insert(d);
                    acc.extend(below[d].iter().copied());
                }
            }
        }
        below[c] = acc;
    }
    SymbolPrecedence { classes, class_of, below, edges: edges.to_vec() }
}
