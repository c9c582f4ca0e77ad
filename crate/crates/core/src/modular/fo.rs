use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{name, MetaTerm, Name, Rule};

/// First-order term; metavariables become variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FoTerm {
    Var(Name),
    App(Name, Vec<FoTerm>),
}

impl FoTerm {
    pub fn app(f: &str, args: Vec<FoTerm>) -> FoTerm {
        FoTerm::App(name(f), args)
    }

    pub fn var(x: &str) -> FoTerm {
        FoTerm::Var(name(x))
    }

    pub fn vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            FoTerm::Var(x) => {
                out.insert(x.clone());
            }
            FoTerm::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn root(&self) -> Option<&Name> {
        match self {
            FoTerm::App(f, _) => Some(f),
            FoTerm::Var(_) => None,
        }
    }

    pub fn subterms(&self) -> Vec<&FoTerm> {
        let mut out = vec![self];
        if let FoTerm::App(_, args) = self {
            for a in args {
                out.extend(a.subterms());
            }
        }
        out
    }

    pub fn contains(&self, other: &FoTerm) -> bool {
        self.subterms().into_iter().any(|s| s == other)
    }

    pub fn size(&self) -> usize {
        match self {
            FoTerm::Var(_) => 1,
            FoTerm::App(_, args) => 1 + args.iter().map(FoTerm::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for FoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoTerm::Var(x) => write!(f, "{x}"),
            FoTerm::App(g, args) if args.is_empty() => write!(f, "{g}"),
            FoTerm::App(g, args) => {
                write!(f, "{g}(")?;
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

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FoRule {
    pub lhs: FoTerm,
    pub rhs: FoTerm,
}

impl fmt::Display for FoRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoError {
    #[error("rule ({0}) is not first-order")]
    NotFirstOrder(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn to_fo(t: &MetaTerm) -> Option<FoTerm> {
    match t {
        MetaTerm::Meta(m, args) if args.is_empty() => Some(FoTerm::Var(m.clone())),
        MetaTerm::Fun(f, args) => {
            let mut out = Vec::new();
            for a in args {
                if !a.binders.is_empty() {
                    return None;
                }
                out.push(to_fo(&a.body)?);
            }
            Some(FoTerm::App(f.clone(), out))
        }
        _ => None,
    }
}

pub fn fo_rule(r: &Rule) -> Result<FoRule, FoError> {
    match (to_fo(&r.lhs), to_fo(&r.rhs)) {
        (Some(lhs), Some(rhs)) => Ok(FoRule { lhs, rhs }),
        _ => Err(FoError::NotFirstOrder(r.name.to_string())),
    }
}

pub fn fo_rules(rules: &[Rule]) -> Result<Vec<FoRule>, FoError> {
    rules.iter().map(fo_rule).collect()
}

/// Plain-text document:
///
/// ```text
/// # fo-trs v1
/// (VAR X Y)
/// (RULES
/// f(X,Y) -> X
/// )
/// ```
///
/// Variables are listed sorted; rules keep their order.
pub fn emit_fo_trs(rules: &[Rule]) -> Result<String, FoError> {
    Ok(render_fo_trs(&fo_rules(rules)?))
}

pub fn render_fo_trs(rules: &[FoRule]) -> String {
    let mut vars = BTreeSet::new();
    for r in rules {
        r.lhs.vars(&mut vars);
        r.rhs.vars(&mut vars);
    }
    let mut s = String::from("# fo-trs v1\n(VAR");
    for v in &vars {
        s.push(' ');
        s.push_str(v);
    }
    s.push_str(")\n(RULES\n");
    for r in rules {
        s.push_str(&format!("{r}\n"));
    }
    s.push_str(")\n");
    s
}

struct TermParser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a BTreeSet<String>,
    line: usize,
}

impl TermParser<'_> {
    fn err(&self, msg: &str) -> FoError {
        FoError::Parse { line: self.line, msg: format!("{msg} at column {}", self.pos + 1) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String, FoError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !"(),".contains(self.chars[self.pos]) && !self.chars[self.pos].is_whitespace() {
            if self.chars[self.pos] == '-' && self.chars.get(self.pos + 1) == Some(&'>') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self) -> Result<FoTerm, FoError> {
        let id = self.ident()?;
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&'(') {
            self.pos += 1;
            let mut args = Vec::new();
            self.skip_ws();
            if self.chars.get(self.pos) == Some(&')') {
                self.pos += 1;
                return Ok(FoTerm::app(&id, args));
            }
            loop {
                args.push(self.term()?);
                self.skip_ws();
                match self.chars.get(self.pos) {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
            Ok(FoTerm::app(&id, args))
        } else if self.vars.contains(&id) {
            Ok(FoTerm::var(&id))
        } else {
            Ok(FoTerm::app(&id, vec![]))
        }
    }
}

/// Reads the document produced by [`emit_fo_trs`].
pub fn parse_fo_trs(text: &str) -> Result<Vec<FoRule>, FoError> {
    let mut vars = BTreeSet::new();
    let mut rules = Vec::new();
    let mut in_rules = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("(VAR") {
            let rest = rest.strip_suffix(')').ok_or(FoError::Parse { line, msg: "unterminated (VAR".into() })?;
            vars.extend(rest.split_whitespace().map(String::from));
            continue;
        }
        if l == "(RULES" {
            in_rules = true;
            continue;
        }
        if l == ")" {
            in_rules = false;
            continue;
        }
        if !in_rules {
            return Err(FoError::Parse { line, msg: format!("unexpected line '{l}'") });
        }
        let mut p = TermParser { chars: l.chars().collect(), pos: 0, vars: &vars, line };
        let lhs = p.term()?;
        p.skip_ws();
        if p.chars.get(p.pos) != Some(&'-') || p.chars.get(p.pos + 1) != Some(&'>') {
            return Err(p.err("expected '->'"));
        }
        p.pos += 2;
        let rhs = p.term()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        rules.push(FoRule { lhs, rhs });
    }
    Ok(rules)
}
