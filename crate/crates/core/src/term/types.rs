use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-by-sharing identifier used for symbols, metavariables and types.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Molecular type: an atomic type or a type constructor applied to mol types.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum MolType {
    Atomic(Name),
    Con(Name, Vec<MolType>),
}

impl MolType {
    pub fn atomic(s: &str) -> Self {
        MolType::Atomic(name(s))
    }

    pub fn con(s: &str, args: Vec<MolType>) -> Self {
        MolType::Con(name(s), args)
    }

    /// Number of constructor and atom occurrences.
    pub fn size(&self) -> usize {
        match self {
            MolType::Atomic(_) => 1,
            MolType::Con(_, args) => 1 + args.iter().map(MolType::size).sum::<usize>(),
        }
    }

    /// Proper subterms, outermost first.
    pub fn proper_subterms(&self) -> Vec<&MolType> {
        let mut out = Vec::new();
        if let MolType::Con(_, args) = self {
            for a in args {
                out.push(a);
                out.extend(a.proper_subterms());
            }
        }
        out
    }

    pub fn is_proper_subterm_of(&self, other: &MolType) -> bool {
        other.proper_subterms().into_iter().any(|s| s == self)
    }

    /// Identifier-safe rendering, used to derive symbol names from types.
    pub fn mangle(&self) -> String {
        match self {
            MolType::Atomic(a) => a.to_string(),
            MolType::Con(c, args) => {
                let mut s = c.to_string();
                for a in args {
                    s.push('_');
                    s.push_str(&a.mangle());
                }
                s
            }
        }
    }
}

impl fmt::Display for MolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MolType::Atomic(a) => write!(f, "{a}"),
            MolType::Con(c, args) => {
                write!(f, "{c}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// One argument slot of a function type: `a1,...,ak -> b`, with `k = 0` for
/// first-order positions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ArgType {
    pub binders: Vec<MolType>,
    pub result: MolType,
}

impl ArgType {
    pub fn first_order(result: MolType) -> Self {
        ArgType { binders: Vec::new(), result }
    }
}

impl fmt::Display for ArgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.binders.is_empty() {
            return write!(f, "{}", self.result);
        }
        write!(f, "(")?;
        for (i, b) in self.binders.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, " -> {})", self.result)
    }
}

/// Second-order function type `(a1 -> b1), ..., (am -> bm) -> c`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FunType {
    pub args: Vec<ArgType>,
    pub result: MolType,
}

impl FunType {
    pub fn new(args: Vec<ArgType>, result: MolType) -> Self {
        FunType { args, result }
    }

    pub fn constant(result: MolType) -> Self {
        FunType { args: Vec::new(), result }
    }

    pub fn first_order(args: Vec<MolType>, result: MolType) -> Self {
        FunType { args: args.into_iter().map(ArgType::first_order).collect(), result }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_first_order(&self) -> bool {
        self.args.iter().all(|a| a.binders.is_empty())
    }

    /// Every mol type mentioned by this function type.
    pub fn mol_types(&self) -> Vec<&MolType> {
        let mut out = Vec::new();
        for a in &self.args {
            out.extend(a.binders.iter());
            out.push(&a.result);
        }
        out.push(&self.result);
        out
    }
}

impl fmt::Display for FunType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.result);
        }
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " -> {}", self.result)
    }
}

/// Declared type constructors, atomic types and function symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub atomics: BTreeSet<Name>,
    pub type_cons: BTreeMap<Name, usize>,
    symbols: BTreeMap<Name, FunType>,
    order: Vec<Name>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a symbol; declaration order is kept for printing.
    pub fn declare(&mut self, f: &str, ty: FunType) {
        let n = name(f);
        if self.symbols.insert(n.clone(), ty).is_none() {
            self.order.push(n);
        }
    }

    pub fn declare_atomic(&mut self, a: &str) {
        self.atomics.insert(name(a));
    }

    pub fn declare_type_con(&mut self, c: &str, arity: usize) {
        self.type_cons.insert(name(c), arity);
    }

    pub fn get(&self, f: &str) -> Option<&FunType> {
        self.symbols.get(f)
    }

    pub fn contains(&self, f: &str) -> bool {
        self.symbols.contains_key(f)
    }

    /// Symbols in declaration order.
    pub fn symbols(&self) -> impl Iterator<Item = (&Name, &FunType)> {
        self.order.iter().map(move |n| (n, &self.symbols[n]))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.order.iter()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Checks that a mol type only uses declared atoms and constructors at
    /// their arity. Undeclared atoms are accepted when no atom is declared.
    pub fn check_mol_type(&self, t: &MolType) -> Result<(), String> {
        match t {
            MolType::Atomic(a) => {
                if self.atomics.contains(a) || self.type_cons.get(a) == Some(&0) {
                    Ok(())
                } else {
                    Err(format!("unknown atomic type {a}"))
                }
            }
            MolType::Con(c, args) => match self.type_cons.get(c) {
                Some(&n) if n == args.len() => args.iter().try_for_each(|a| self.check_mol_type(a)),
                Some(&n) => Err(format!("type constructor {c} expects {n} arguments, got {}", args.len())),
                None => Err(format!("unknown type constructor {c}")),
            },
        }
    }

    /// All mol types mentioned by declared symbols, closed under subterms.
    pub fn mol_types(&self) -> BTreeSet<MolType> {
        let mut out = BTreeSet::new();
        for (_, ty) in self.symbols() {
            for t in ty.mol_types() {
                out.insert(t.clone());
                for s in t.proper_subterms() {
                    out.insert(s.clone());
                }
            }
        }
        out
    }

    /// Union of two signatures; symbols of `other` win on clashes.
    pub fn merged(&self, other: &Signature) -> Signature {
        let mut s = self.clone();
        s.atomics.extend(other.atomics.iter().cloned());
        for (c, n) in &other.type_cons {
            s.type_cons.insert(c.clone(), *n);
        }
        for (f, ty) in other.symbols() {
            s.declare(f, ty.clone());
        }
        s
    }

    /// Restriction to the given symbol names, keeping type declarations.
    pub fn restricted<'a>(&self, keep: impl Fn(&str) -> bool + 'a) -> Signature {
        let mut s = Signature { atomics: self.atomics.clone(), type_cons: self.type_cons.clone(), ..Default::default() };
        for (f, ty) in self.symbols() {
            if keep(f) {
                s.declare(f, ty.clone());
            }
        }
        s
    }
}
