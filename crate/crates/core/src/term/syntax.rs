use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use super::types::{name, MolType, Name};

/// Meta-terms in locally nameless form.
///
/// Bound variables are de Bruijn indices counted outwards across binders
/// (the innermost binder of the innermost abstraction is index 0). Free
/// variables are named. A term is a meta-term with no `Meta` node.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum MetaTerm {
    BVar(usize),
    FVar(Name),
    Fun(Name, Vec<Abs>),
    Meta(Name, Vec<MetaTerm>),
}

/// Metavariable-free meta-term.
pub type Term = MetaTerm;

/// Abstraction `x1...xk.body`; only appears as an argument of `Fun`.
///
/// Binder name hints are kept for printing and ignored by equality,
/// hashing and ordering.
#[derive(Clone, Debug)]
pub struct Abs {
    pub binders: Vec<MolType>,
    pub hints: Vec<Name>,
    pub body: MetaTerm,
}

impl PartialEq for Abs {
    fn eq(&self, other: &Self) -> bool {
        self.binders == other.binders && self.body == other.body
    }
}

impl Eq for Abs {}

impl Hash for Abs {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.binders.hash(state);
        self.body.hash(state);
    }
}

impl PartialOrd for Abs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Abs {
    fn cmp(&self, other: &Self) -> Ordering {
        self.binders.cmp(&other.binders).then_with(|| self.body.cmp(&other.body))
    }
}

impl Abs {
    pub fn new(binders: Vec<(&str, MolType)>, body: MetaTerm) -> Self {
        let (hints, binders) = binders.into_iter().map(|(h, t)| (name(h), t)).unzip();
        Abs { binders, hints, body }
    }

    /// Zero-binder wrapper.
    pub fn plain(body: MetaTerm) -> Self {
        Abs { binders: Vec::new(), hints: Vec::new(), body }
    }

    pub fn with_hints(binders: Vec<MolType>, hints: Vec<Name>, body: MetaTerm) -> Self {
        debug_assert_eq!(binders.len(), hints.len());
        Abs { binders, hints, body }
    }

    /// Fills in hints `x`, `x1`, ... when none are known.
    pub fn anonymous(binders: Vec<MolType>, body: MetaTerm) -> Self {
        let hints = (0..binders.len()).map(|i| default_hint(i)).collect();
        Abs { binders, hints, body }
    }

    pub fn arity(&self) -> usize {
        self.binders.len()
    }
}

pub(crate) fn default_hint(i: usize) -> Name {
    const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    if i < NAMES.len() {
        name(NAMES[i])
    } else {
        name(&format!("x{i}"))
    }
}

/// Path to a subterm: the argument index taken at each `Fun` or `Meta` node.
pub type Position = Vec<usize>;

impl MetaTerm {
    pub fn fun(f: &str, args: Vec<Abs>) -> Self {
        MetaTerm::Fun(name(f), args)
    }

    /// Function application with first-order arguments only.
    pub fn app(f: &str, args: Vec<MetaTerm>) -> Self {
        MetaTerm::Fun(name(f), args.into_iter().map(Abs::plain).collect())
    }

    pub fn constant(f: &str) -> Self {
        MetaTerm::Fun(name(f), Vec::new())
    }

    pub fn meta(m: &str, args: Vec<MetaTerm>) -> Self {
        MetaTerm::Meta(name(m), args)
    }

    pub fn fvar(x: &str) -> Self {
        MetaTerm::FVar(name(x))
    }

    /// True when no metavariable occurs.
    pub fn is_term(&self) -> bool {
        match self {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => true,
            MetaTerm::Fun(_, args) => args.iter().all(|a| a.body.is_term()),
            MetaTerm::Meta(..) => false,
        }
    }

    pub fn head(&self) -> Option<&Name> {
        match self {
            MetaTerm::Fun(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn fun_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Name>) {
        match self {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => {}
            MetaTerm::Fun(f, args) => {
                out.insert(f.clone());
                for a in args {
                    a.body.collect_symbols(out);
                }
            }
            MetaTerm::Meta(_, args) => {
                for a in args {
                    a.collect_symbols(out);
                }
            }
        }
    }

    pub fn metavars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let MetaTerm::Meta(m, _) = t {
                out.insert(m.clone());
            }
        });
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let MetaTerm::FVar(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Pre-order visit of every sub-meta-term.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a MetaTerm)) {
        f(self);
        match self {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => {}
            MetaTerm::Fun(_, args) => {
                for a in args {
                    a.body.visit(f);
                }
            }
            MetaTerm::Meta(_, args) => {
                for a in args {
                    a.visit(f);
                }
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => 1,
            MetaTerm::Fun(_, args) => 1 + args.iter().map(|a| a.body.size()).sum::<usize>(),
            MetaTerm::Meta(_, args) => 1 + args.iter().map(MetaTerm::size).sum::<usize>(),
        }
    }

    /// Height of the syntax tree, leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => 1,
            MetaTerm::Fun(_, args) => 1 + args.iter().map(|a| a.body.depth()).max().unwrap_or(0),
            MetaTerm::Meta(_, args) => 1 + args.iter().map(MetaTerm::depth).max().unwrap_or(0),
        }
    }

    /// Adds `by` to every bound index at or above `cutoff`.
    pub fn shift(&self, by: usize, cutoff: usize) -> MetaTerm {
        if by == 0 {
            return self.clone();
        }
        match self {
            MetaTerm::BVar(i) => MetaTerm::BVar(if *i >= cutoff { i + by } else { *i }),
            MetaTerm::FVar(_) => self.clone(),
            MetaTerm::Fun(f, args) => MetaTerm::Fun(
                f.clone(),
                args.iter()
                    .map(|a| Abs { binders: a.binders.clone(), hints: a.hints.clone(), body: a.body.shift(by, cutoff + a.arity()) })
                    .collect(),
            ),
            MetaTerm::Meta(m, args) => MetaTerm::Meta(m.clone(), args.iter().map(|a| a.shift(by, cutoff)).collect()),
        }
    }

    /// Subtracts `by` from indices at or above `cutoff`; `None` if an index in
    /// `[cutoff, cutoff + by)` occurs.
    pub fn unshift(&self, by: usize, cutoff: usize) -> Option<MetaTerm> {
        if by == 0 {
            return Some(self.clone());
        }
        Some(match self {
            MetaTerm::BVar(i) => {
                if *i < cutoff {
                    MetaTerm::BVar(*i)
                } else if *i < cutoff + by {
                    return None;
                } else {
                    MetaTerm::BVar(i - by)
                }
            }
            MetaTerm::FVar(_) => self.clone(),
            MetaTerm::Fun(f, args) => {
                let mut out = Vec::with_capacity(args.len());
                for a in args {
                    out.push(Abs {
                        binders: a.binders.clone(),
                        hints: a.hints.clone(),
                        body: a.body.unshift(by, cutoff + a.arity())?,
                    });
                }
                MetaTerm::Fun(f.clone(), out)
            }
            MetaTerm::Meta(m, args) => {
                MetaTerm::Meta(m.clone(), args.iter().map(|a| a.unshift(by, cutoff)).collect::<Option<_>>()?)
            }
        })
    }

    /// Bound indices that escape `depth` enclosing binders, relative to the
    /// outside (index `i` at local depth `d` escapes as `i - d`).
    pub fn dangling(&self, depth: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_dangling(depth, &mut out);
        out
    }

    fn collect_dangling(&self, depth: usize, out: &mut BTreeSet<usize>) {
        match self {
            MetaTerm::BVar(i) => {
                if *i >= depth {
                    out.insert(i - depth);
                }
            }
            MetaTerm::FVar(_) => {}
            MetaTerm::Fun(_, args) => {
                for a in args {
                    a.body.collect_dangling(depth + a.arity(), out);
                }
            }
            MetaTerm::Meta(_, args) => {
                for a in args {
                    a.collect_dangling(depth, out);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.dangling(0).is_empty()
    }

    /// All positions in pre-order (root first, then arguments left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_positions(&mut cur, &mut out);
        out
    }

    fn collect_positions(&self, cur: &mut Position, out: &mut Vec<Position>) {
        out.push(cur.clone());
        match self {
            MetaTerm::Fun(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    a.body.collect_positions(cur, out);
                    cur.pop();
                }
            }
            MetaTerm::Meta(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    a.collect_positions(cur, out);
                    cur.pop();
                }
            }
            _ => {}
        }
    }

    /// Subterm at a position together with the binder types crossed on the
    /// way (outermost first).
    pub fn at(&self, pos: &[usize]) -> Option<(&MetaTerm, Vec<&MolType>)> {
        let mut t = self;
        let mut crossed = Vec::new();
        for &i in pos {
            match t {
                MetaTerm::Fun(_, args) => {
                    let a = args.get(i)?;
                    crossed.extend(a.binders.iter());
                    t = &a.body;
                }
                MetaTerm::Meta(_, args) => t = args.get(i)?,
                _ => return None,
            }
        }
        Some((t, crossed))
    }

    /// Replaces the subterm at `pos`. The replacement must already be
    /// expressed relative to the binders above `pos`.
    pub fn replace_at(&self, pos: &[usize], new: MetaTerm) -> MetaTerm {
        match pos.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                MetaTerm::Fun(f, args) => {
                    let mut args = args.clone();
                    args[i].body = args[i].body.replace_at(rest, new);
                    MetaTerm::Fun(f.clone(), args)
                }
                MetaTerm::Meta(m, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, new);
                    MetaTerm::Meta(m.clone(), args)
                }
                _ => panic!("replace_at: position does not exist"),
            },
        }
    }

    /// Total order comparing tree shape before variables: two terms that
    /// differ only in variable names or indices are ordered by the
    /// variables, never by a variable against a non-variable elsewhere.
    pub fn shape_cmp(&self, other: &MetaTerm) -> Ordering {
        self.shape_key().cmp(&other.shape_key()).then_with(|| self.cmp(other))
    }

    fn shape_key(&self) -> ShapeKey<'_> {
        ShapeKey(self)
    }

    /// Sub-meta-terms with the number of binders crossed to reach them.
    pub fn subterms_with_depth(&self) -> Vec<(&MetaTerm, usize)> {
        let mut out = Vec::new();
        self.collect_subterms(0, &mut out);
        out
    }

    fn collect_subterms<'a>(&'a self, depth: usize, out: &mut Vec<(&'a MetaTerm, usize)>) {
        out.push((self, depth));
        match self {
            MetaTerm::Fun(_, args) => {
                for a in args {
                    a.body.collect_subterms(depth + a.arity(), out);
                }
            }
            MetaTerm::Meta(_, args) => {
                for a in args {
                    a.collect_subterms(depth, out);
                }
            }
            _ => {}
        }
    }
}

struct ShapeKey<'a>(&'a MetaTerm);

impl ShapeKey<'_> {
    fn rank(&self) -> u8 {
        match self.0 {
            MetaTerm::BVar(_) | MetaTerm::FVar(_) => 0,
            MetaTerm::Fun(..) => 1,
            MetaTerm::Meta(..) => 2,
        }
    }
}

impl PartialEq for ShapeKey<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ShapeKey<'_> {}

impl PartialOrd for ShapeKey<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ShapeKey<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (MetaTerm::Fun(f, xs), MetaTerm::Fun(g, ys)) => f.cmp(g).then_with(|| {
                xs.len().cmp(&ys.len()).then_with(|| {
                    for (a, b) in xs.iter().zip(ys) {
                        let c = a.binders.cmp(&b.binders).then_with(|| ShapeKey(&a.body).cmp(&ShapeKey(&b.body)));
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            }),
            (MetaTerm::Meta(m, xs), MetaTerm::Meta(n, ys)) => m.cmp(n).then_with(|| {
                xs.len().cmp(&ys.len()).then_with(|| {
                    for (a, b) in xs.iter().zip(ys) {
                        let c = ShapeKey(a).cmp(&ShapeKey(b));
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            }),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}
