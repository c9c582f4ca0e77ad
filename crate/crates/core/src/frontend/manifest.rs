use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use super::lexer::{lex_line, Spanned, Tok};
use crate::modular::LinearWeight;
use crate::schema::{Clause5, SubtermVariant, TypeOrderKind};
use crate::term::{
    name, Abs, ArgType, ComputationSystem, FunType, MetaContext, MetaTerm, MolType, Name, Rule, RuleError, Signature, Term,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ManifestError {
    #[error("{line}:{col}: parse error: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: arity error: {msg}")]
    ArityError { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown symbol {name}")]
    UnknownSymbol { line: usize, col: usize, name: String },
}

impl ManifestError {
    pub fn line(&self) -> usize {
        match self {
            ManifestError::ParseError { line, .. }
            | ManifestError::ArityError { line, .. }
            | ManifestError::UnknownSymbol { line, .. } => *line,
        }
    }
}

/// How the rules are divided for the modular check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SplitDirective {
    /// First-order rules form the A part.
    AutoFo,
    /// Explicit rule names for the A and B parts.
    Explicit { a: Vec<Name>, b: Vec<Name> },
}

/// Per-file defaults for the checker; command-line flags take precedence.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Options {
    pub subterm: Option<SubtermVariant>,
    pub clause5: Option<Clause5>,
    pub type_order: Option<TypeOrderKind>,
    pub weights_bound: Option<(u64, u64)>,
    pub oracle_depth: Option<usize>,
}

/// Declared weight `f(x1..xn) = c0 + c1 x1 + ...`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightDecl {
    pub symbol: Name,
    pub params: Vec<Name>,
    pub weight: LinearWeight,
}

/// Explicit precedence relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PrecDecl {
    Greater(Name, Name),
    Equal(Name, Name),
}

/// Parsed input file.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Manifest {
    pub aliases: Vec<(MolType, MolType)>,
    pub system: ComputationSystem,
    pub split: Option<SplitDirective>,
    pub options: Options,
    pub weights: Vec<WeightDecl>,
    pub precedence: Vec<PrecDecl>,
}

impl Manifest {
    pub fn weight_map(&self) -> BTreeMap<Name, LinearWeight> {
        self.weights.iter().map(|w| (w.symbol.clone(), w.weight.clone())).collect()
    }

    /// Renders the manifest in the input grammar.
    pub fn print(&self) -> String {
        let sig = &self.system.signature;
        let mut out = String::new();
        for a in &sig.atomics {
            let _ = writeln!(out, "atomic {a}");
        }
        for (c, n) in &sig.type_cons {
            let _ = writeln!(out, "type {c}/{n}");
        }
        for (from, to) in &self.aliases {
            let _ = writeln!(out, "alias {from} = {to}");
        }
        for (f, ty) in sig.symbols() {
            if ty.args.is_empty() {
                let _ = writeln!(out, "{f} : -> {}", ty.result);
            } else {
                let _ = writeln!(out, "{f} : {ty}");
            }
        }
        for r in &self.system.rules {
            let _ = writeln!(out, "{r}");
        }
        if let Some(v) = self.options.subterm {
            let _ = writeln!(out, "option subterm {}", if v == SubtermVariant::Stable { "stable" } else { "structural" });
        }
        if let Some(c) = self.options.clause5 {
            let _ = writeln!(out, "option clause5 {}", if c == Clause5::Lex { "lex" } else { "multiset" });
        }
        if let Some(k) = self.options.type_order {
            let _ = writeln!(out, "option type-order {}", if k == TypeOrderKind::Identity { "identity" } else { "structural" });
        }
        if let Some((c, k)) = self.options.weights_bound {
            let _ = writeln!(out, "option weights-bound {c} {k}");
        }
        if let Some(d) = self.options.oracle_depth {
            let _ = writeln!(out, "option oracle-depth {d}");
        }
        for w in &self.weights {
            let _ = writeln!(out, "weight {}({}) = {}", w.symbol, join(&w.params), w.weight.render(&w.params));
        }
        for p in &self.precedence {
            let _ = match p {
                PrecDecl::Greater(a, b) => writeln!(out, "precedence {a} > {b}"),
                PrecDecl::Equal(a, b) => writeln!(out, "precedence {a} = {b}"),
            };
        }
        match &self.split {
            None => {}
            Some(SplitDirective::AutoFo) => {
                let _ = writeln!(out, "split auto-fo");
            }
            Some(SplitDirective::Explicit { a, b }) => {
                let _ = writeln!(out, "split A = {}", join(a));
                let _ = writeln!(out, "split B = {}", join(b));
            }
        }
        out
    }
}

fn join(ns: &[Name]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
}

/// Parses a manifest.
pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let mut p = FileParser { m: Manifest::default(), rules: Vec::new(), split_a: None, split_b: None };
    for (i, line) in text.lines().enumerate() {
        let toks = lex_line(line, i + 1)?;
        if toks.is_empty() {
            continue;
        }
        p.line(&toks, i + 1)?;
    }
    p.finish()
}

struct FileParser {
    m: Manifest,
    rules: Vec<Rule>,
    split_a: Option<Vec<Name>>,
    split_b: Option<Vec<Name>>,
}

fn perr(t: &Spanned, msg: impl Into<String>) -> ManifestError {
    ManifestError::ParseError { line: t.line, col: t.col, msg: msg.into() }
}

impl FileParser {
    fn sig(&self) -> &Signature {
        &self.m.system.signature
    }

    fn line(&mut self, toks: &[Spanned], line: usize) -> Result<(), ManifestError> {
        let mut c = Cursor { toks, i: 0, line };
        match &toks[0].tok {
            Tok::LParen => self.rule(&mut c),
            Tok::Ident(kw) if toks.get(1).map(|t| &t.tok) != Some(&Tok::Colon) => match kw.as_str() {
                "type" => {
                    c.next();
                    let n = c.ident()?;
                    c.expect(Tok::Slash)?;
                    let ar = c.number()?;
                    c.end()?;
                    self.m.system.signature.declare_type_con(&n, ar as usize);
                    Ok(())
                }
                "atomic" => {
                    c.next();
                    loop {
                        let n = c.ident()?;
                        self.m.system.signature.declare_atomic(&n);
                        if c.at_end() {
                            return Ok(());
                        }
                        if c.peek() == Some(&Tok::Comma) {
                            c.next();
                        }
                    }
                }
                "alias" => {
                    c.next();
                    let from = self.mol_type(&mut c, false)?;
                    c.expect(Tok::Eq)?;
                    let to = self.mol_type(&mut c, true)?;
                    c.end()?;
                    self.m.aliases.push((from, to));
                    Ok(())
                }
                "option" => self.option(&mut c),
                "weight" => self.weight(&mut c),
                "precedence" => {
                    c.next();
                    let a = c.symbol_name(self.sig())?;
                    let gt = match c.next_tok() {
                        Some(Tok::Gt) => true,
                        Some(Tok::Eq) => false,
                        _ => return Err(c.err("expected '>' or '='")),
                    };
                    let b = c.symbol_name(self.sig())?;
                    c.end()?;
                    self.m.precedence.push(if gt { PrecDecl::Greater(a, b) } else { PrecDecl::Equal(a, b) });
                    Ok(())
                }
                "split" => self.split(&mut c),
                _ => Err(perr(&toks[0], format!("unknown directive '{kw}'"))),
            },
            Tok::Ident(_) => self.symbol_decl(&mut c),
            _ => Err(perr(&toks[0], "expected a declaration or a rule")),
        }
    }

    fn option(&mut self, c: &mut Cursor<'_>) -> Result<(), ManifestError> {
        c.next();
        let key = c.ident()?;
        let key_tok = c.prev().clone();
        match key.as_str() {
            "subterm" => {
                self.m.options.subterm = Some(match c.ident()?.as_str() {
                    "stable" => SubtermVariant::Stable,
                    "structural" => SubtermVariant::Structural,
                    v => return Err(c.err(format!("unknown subterm variant '{v}'"))),
                })
            }
            "clause5" => {
                self.m.options.clause5 = Some(match c.ident()?.as_str() {
                    "lex" => Clause5::Lex,
                    "multiset" => Clause5::Multiset,
                    v => return Err(c.err(format!("unknown extension '{v}'"))),
                })
            }
            "type-order" | "type_order" => {
                self.m.options.type_order = Some(match c.ident()?.as_str() {
                    "identity" => TypeOrderKind::Identity,
                    "structural" | "default" => TypeOrderKind::Structural,
                    v => return Err(c.err(format!("unknown type order '{v}'"))),
                })
            }
            "weights-bound" | "weights_bound" => {
                let a = c.number()?;
                let b = if c.at_end() { a } else { c.number()? };
                self.m.options.weights_bound = Some((a, b));
            }
            "oracle-depth" | "oracle_depth" => self.m.options.oracle_depth = Some(c.number()? as usize),
            _ => return Err(perr(&key_tok, format!("unknown option '{key}'"))),
        }
        c.end()
    }

    fn weight(&mut self, c: &mut Cursor<'_>) -> Result<(), ManifestError> {
        c.next();
        let f = c.symbol_name(self.sig())?;
        let arity = self.sig().get(&f).map(|t| t.arity()).unwrap_or(0);
        let mut params = Vec::new();
        if c.peek() == Some(&Tok::LParen) {
            c.next();
            if c.peek() != Some(&Tok::RParen) {
                loop {
                    params.push(name(&c.ident()?));
                    if c.peek() == Some(&Tok::Comma) {
                        c.next();
                    } else {
                        break;
                    }
                }
            }
            c.expect(Tok::RParen)?;
        }
        if params.len() != arity {
            return Err(ManifestError::ArityError {
                line: c.line,
                col: c.toks[1].col,
                msg: format!("weight for {f} lists {} parameters, {f} has {arity} arguments", params.len()),
            });
        }
        c.expect(Tok::Eq)?;
        let mut w = LinearWeight { constant: 0, coeffs: vec![0; arity] };
        loop {
            let tok = c.cur().cloned().ok_or_else(|| c.err("expected a weight term"))?;
            let Tok::Ident(s) = &tok.tok else { return Err(perr(&tok, "expected a weight term")) };
            c.next();
            let digits: String = s.chars().take_while(|ch| ch.is_ascii_digit()).collect();
            let rest = &s[digits.len()..];
            let k: u64 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| perr(&tok, "number too large"))? };
            let var = if !rest.is_empty() {
                Some(rest.to_string())
            } else if c.peek() == Some(&Tok::Star) {
                c.next();
                Some(c.ident()?)
            } else {
                None
            };
            match var {
                None => w.constant += k,
                Some(v) => {
                    let Some(i) = params.iter().position(|p| **p == *v) else {
                        return Err(perr(&tok, format!("unknown weight parameter '{v}'")));
                    };
                    w.coeffs[i] += k;
                }
            }
            if c.peek() == Some(&Tok::Plus) {
                c.next();
            } else {
                break;
            }
        }
        c.end()?;
        self.m.weights.push(WeightDecl { symbol: f, params, weight: w });
        Ok(())
    }

    fn split(&mut self, c: &mut Cursor<'_>) -> Result<(), ManifestError> {
        c.next();
        let which = c.ident()?;
        match which.as_str() {
            "auto-fo" | "auto" => {
                c.end()?;
                self.m.split = Some(SplitDirective::AutoFo);
                Ok(())
            }
            "A" | "B" => {
                c.expect(Tok::Eq)?;
                let mut names = Vec::new();
                while !c.at_end() {
                    let n = match c.next_tok() {
                        Some(Tok::Ident(s)) => s.clone(),
                        Some(Tok::LParen) => {
                            let s = c.ident()?;
                            c.expect(Tok::RParen)?;
                            s
                        }
                        _ => return Err(c.err("expected a rule name")),
                    };
                    names.push(name(&n));
                    if c.peek() == Some(&Tok::Comma) {
                        c.next();
                    }
                }
                if which == "A" {
                    self.split_a = Some(names);
                } else {
                    self.split_b = Some(names);
                }
                Ok(())
            }
            _ => Err(c.err(format!("unknown split '{which}'"))),
        }
    }

    fn symbol_decl(&mut self, c: &mut Cursor<'_>) -> Result<(), ManifestError> {
        let f = c.ident()?;
        c.expect(Tok::Colon)?;
        let mut args = Vec::new();
        if c.peek() == Some(&Tok::Arrow) {
            c.next();
            let res = self.mol_type(c, true)?;
            c.end()?;
            self.m.system.signature.declare(&f, FunType::constant(res));
            return Ok(());
        }
        loop {
            if c.peek() == Some(&Tok::LParen) {
                c.next();
                let mut binders = Vec::new();
                loop {
                    binders.push(self.mol_type(c, true)?);
                    match c.next_tok() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::Arrow) => break,
                        _ => return Err(c.err("expected ',' or '->' in argument type")),
                    }
                }
                let res = self.mol_type(c, true)?;
                c.expect(Tok::RParen)?;
                args.push(ArgType { binders, result: res });
            } else {
                args.push(ArgType::first_order(self.mol_type(c, true)?));
            }
            match c.peek() {
                Some(Tok::Comma) => {
                    c.next();
                }
                Some(Tok::Arrow) => {
                    c.next();
                    let res = self.mol_type(c, true)?;
                    c.end()?;
                    self.m.system.signature.declare(&f, FunType::new(args, res));
                    return Ok(());
                }
                None if args.len() == 1 && args[0].binders.is_empty() => {
                    let res = args.pop().unwrap().result;
                    self.m.system.signature.declare(&f, FunType::constant(res));
                    return Ok(());
                }
                _ => return Err(c.err("expected ',' or '->'")),
            }
        }
    }

    fn mol_type(&self, c: &mut Cursor<'_>, resolve: bool) -> Result<MolType, ManifestError> {
        let start = c.cur().cloned().ok_or_else(|| c.err("expected a type"))?;
        let n = c.ident()?;
        let t = if c.peek() == Some(&Tok::LParen) {
            c.next();
            let mut args = Vec::new();
            loop {
                args.push(self.mol_type(c, resolve)?);
                match c.next_tok() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RParen) => break,
                    _ => return Err(c.err("expected ',' or ')' in type")),
                }
            }
            MolType::con(&n, args)
        } else {
            MolType::atomic(&n)
        };
        if let Err(msg) = self.sig().check_mol_type(&t) {
            let is_arity = msg.contains("expects");
            return Err(if is_arity {
                ManifestError::ArityError { line: start.line, col: start.col, msg }
            } else {
                ManifestError::ParseError { line: start.line, col: start.col, msg }
            });
        }
        Ok(if resolve { self.resolve(t) } else { t })
    }

    fn resolve(&self, t: MolType) -> MolType {
        let t = match t {
            MolType::Con(c, args) => MolType::Con(c, args.into_iter().map(|a| self.resolve(a)).collect()),
            a => a,
        };
        for (from, to) in &self.m.aliases {
            if *from == t {
                return to.clone();
            }
        }
        t
    }

    fn rule(&mut self, c: &mut Cursor<'_>) -> Result<(), ManifestError> {
        c.expect(Tok::LParen)?;
        let rname = c.ident()?;
        c.expect(Tok::RParen)?;
        let lhs_start = c.i;
        let arrow = c.toks[lhs_start..]
            .iter()
            .position(|t| t.tok == Tok::Arrow)
            .map(|p| p + lhs_start)
            .ok_or_else(|| c.err("expected '->' in rule"))?;
        let mut lhs_c = Cursor { toks: &c.toks[..arrow], i: lhs_start, line: c.line };
        let lhs_raw = parse_raw(&mut lhs_c)?;
        lhs_c.end()?;
        let mut rhs_c = Cursor { toks: c.toks, i: arrow + 1, line: c.line };
        let rhs_raw = parse_raw(&mut rhs_c)?;
        rhs_c.end()?;
        let mut el = Elab { sig: self.sig(), ctx: MetaContext::new(), infer: true };
        let (lhs, ty) = el.synth(&lhs_raw, &mut Vec::new())?;
        el.infer = false;
        let rhs = el.check(&rhs_raw, &ty, &mut Vec::new())?;
        let ctx = el.ctx;
        let first = &c.toks[0];
        let rule = Rule::new(self.sig(), &rname, ctx, lhs, rhs).map_err(|e| match e {
            RuleError::Type { err, .. } => perr(first, err.to_string()),
            e => perr(first, e.to_string()),
        })?;
        if self.rules.iter().any(|r| r.name == rule.name) {
            return Err(perr(first, format!("duplicate rule name ({rname})")));
        }
        self.rules.push(rule);
        Ok(())
    }

    fn finish(mut self) -> Result<Manifest, ManifestError> {
        match (self.split_a.take(), self.split_b.take()) {
            (None, None) => {}
            (a, b) => {
                let a = a.unwrap_or_default();
                let b = b.unwrap_or_default();
                for n in a.iter().chain(&b) {
                    if !self.rules.iter().any(|r| &r.name == n) {
                        return Err(ManifestError::UnknownSymbol { line: 0, col: 0, name: format!("rule ({n}) in split") });
                    }
                }
                self.m.split = Some(SplitDirective::Explicit { a, b });
            }
        }
        let sig = self.m.system.signature.clone();
        self.m.system = ComputationSystem::new(sig, self.rules)
            .map_err(|e| ManifestError::ParseError { line: 0, col: 0, msg: e.to_string() })?;
        Ok(self.m)
    }
}

/// Parses a closed term over the signature (no metavariables).
pub fn parse_term(sig: &Signature, text: &str) -> Result<Term, ManifestError> {
    let (t, _) = parse_term_typed(sig, text)?;
    Ok(t)
}

/// Parses a closed term and returns its type.
pub fn parse_term_typed(sig: &Signature, text: &str) -> Result<(Term, MolType), ManifestError> {
    let toks = lex_line(text, 1)?;
    let mut c = Cursor { toks: &toks, i: 0, line: 1 };
    let raw = parse_raw(&mut c)?;
    c.end()?;
    let mut el = Elab { sig, ctx: MetaContext::new(), infer: false };
    el.synth(&raw, &mut Vec::new())
}

/// Parses a meta-term against a given metavariable context.
pub fn parse_meta_term(sig: &Signature, ctx: &MetaContext, text: &str) -> Result<(MetaTerm, MolType), ManifestError> {
    let toks = lex_line(text, 1)?;
    let mut c = Cursor { toks: &toks, i: 0, line: 1 };
    let raw = parse_raw(&mut c)?;
    c.end()?;
    let mut el = Elab { sig, ctx: ctx.clone(), infer: true };
    el.synth(&raw, &mut Vec::new())
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    i: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn cur(&self) -> Option<&'a Spanned> {
        self.toks.get(self.i)
    }

    fn prev(&self) -> &'a Spanned {
        &self.toks[self.i - 1]
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.cur().map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&'a Tok> {
        self.toks.get(self.i + 1).map(|t| &t.tok)
    }

    fn next(&mut self) {
        self.i += 1;
    }

    fn next_tok(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.i += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    fn err(&self, msg: impl Into<String>) -> ManifestError {
        let col = match self.cur() {
            Some(t) => t.col,
            None => self.toks.last().map(|t| t.col + t.tok.show().chars().count()).unwrap_or(1),
        };
        ManifestError::ParseError { line: self.line, col, msg: msg.into() }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ManifestError> {
        if self.peek() == Some(&t) {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected '{}', found {}",
                t.show(),
                self.peek().map(|x| format!("'{}'", x.show())).unwrap_or_else(|| "end of line".into())
            )))
        }
    }

    fn end(&self) -> Result<(), ManifestError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected '{}'", t.show()))),
        }
    }

    fn ident(&mut self) -> Result<String, ManifestError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.next();
                Ok(s.clone())
            }
            _ => Err(self.err("expected an identifier")),
        }
    }

    fn number(&mut self) -> Result<u64, ManifestError> {
        let s = self.ident()?;
        s.parse().map_err(|_| ManifestError::ParseError { line: self.line, col: self.prev().col, msg: format!("expected a number, found '{s}'") })
    }

    fn symbol_name(&mut self, sig: &Signature) -> Result<Name, ManifestError> {
        let t = self.cur().cloned().ok_or_else(|| self.err("expected a symbol"))?;
        let s = self.ident()?;
        if !sig.contains(&s) {
            return Err(ManifestError::UnknownSymbol { line: t.line, col: t.col, name: s });
        }
        Ok(name(&s))
    }
}

/// Untyped syntax tree.
#[derive(Clone, Debug)]
enum Raw {
    /// Identifier with optional `( .. )` arguments.
    App { id: String, args: Option<Vec<RawArg>>, at: (usize, usize) },
    /// `M[ .. ]`.
    Meta { id: String, args: Vec<Raw>, at: (usize, usize) },
}

#[derive(Clone, Debug)]
struct RawArg {
    binders: Vec<(String, (usize, usize))>,
    body: Raw,
}

fn parse_raw(c: &mut Cursor<'_>) -> Result<Raw, ManifestError> {
    let t = c.cur().cloned().ok_or_else(|| c.err("expected a term"))?;
    let id = c.ident()?;
    let at = (t.line, t.col);
    match c.peek() {
        Some(Tok::LParen) => {
            c.next();
            let mut args = Vec::new();
            if c.peek() != Some(&Tok::RParen) {
                loop {
                    let mut binders = Vec::new();
                    while let (Some(Tok::Ident(x)), Some(Tok::Dot)) = (c.peek(), c.peek2()) {
                        let tk = c.cur().unwrap();
                        binders.push((x.clone(), (tk.line, tk.col)));
                        c.next();
                        c.next();
                    }
                    let body = parse_raw(c)?;
                    args.push(RawArg { binders, body });
                    match c.peek() {
                        Some(Tok::Comma) => c.next(),
                        _ => break,
                    }
                }
            }
            c.expect(Tok::RParen)?;
            Ok(Raw::App { id, args: Some(args), at })
        }
        Some(Tok::LBrack) => {
            c.next();
            let mut args = Vec::new();
            if c.peek() != Some(&Tok::RBrack) {
                loop {
                    args.push(parse_raw(c)?);
                    match c.peek() {
                        Some(Tok::Comma) => c.next(),
                        _ => break,
                    }
                }
            }
            c.expect(Tok::RBrack)?;
            Ok(Raw::Meta { id, args, at })
        }
        _ => Ok(Raw::App { id, args: None, at }),
    }
}

/// Type-directed elaboration of raw syntax.
struct Elab<'a> {
    sig: &'a Signature,
    ctx: MetaContext,
    /// Whether unknown metavariables may be declared on first use.
    infer: bool,
}

type Scope = Vec<(String, MolType)>;

fn is_meta_name(s: &str) -> bool {
    s.chars().next().map(|c| c.is_ascii_uppercase()).unwrap_or(false)
}

impl Elab<'_> {
    fn synth(&mut self, raw: &Raw, scope: &mut Scope) -> Result<(MetaTerm, MolType), ManifestError> {
        self.elab(raw, None, scope)
    }

    fn check(&mut self, raw: &Raw, want: &MolType, scope: &mut Scope) -> Result<MetaTerm, ManifestError> {
        let (t, got) = self.elab(raw, Some(want), scope)?;
        if &got != want {
            let (line, col) = at_of(raw);
            return Err(ManifestError::ParseError { line, col, msg: format!("type mismatch: expected {want}, found {got}") });
        }
        Ok(t)
    }

    fn elab(&mut self, raw: &Raw, want: Option<&MolType>, scope: &mut Scope) -> Result<(MetaTerm, MolType), ManifestError> {
        match raw {
            Raw::App { id, args: None, at } => {
                if let Some(pos) = scope.iter().rposition(|(x, _)| x == id) {
                    return Ok((MetaTerm::BVar(scope.len() - 1 - pos), scope[pos].1.clone()));
                }
                if self.sig.contains(id) {
                    return self.fun(id, &[], *at, scope);
                }
                if is_meta_name(id) || self.ctx.get(id).is_some() {
                    return self.meta(id, &[], want, *at, scope);
                }
                Err(ManifestError::UnknownSymbol { line: at.0, col: at.1, name: id.clone() })
            }
            Raw::App { id, args: Some(args), at } => {
                if !self.sig.contains(id) {
                    return Err(ManifestError::UnknownSymbol { line: at.0, col: at.1, name: id.clone() });
                }
                self.fun(id, args, *at, scope)
            }
            Raw::Meta { id, args, at } => self.meta(id, args, want, *at, scope),
        }
    }

    fn fun(&mut self, f: &str, args: &[RawArg], at: (usize, usize), scope: &mut Scope) -> Result<(MetaTerm, MolType), ManifestError> {
        let fty = self.sig.get(f).expect("caller checked the symbol").clone();
        if fty.args.len() != args.len() {
            return Err(ManifestError::ArityError {
                line: at.0,
                col: at.1,
                msg: format!("{f} expects {} arguments, got {}", fty.args.len(), args.len()),
            });
        }
        let mut out = Vec::with_capacity(args.len());
        for (i, (decl, a)) in fty.args.iter().zip(args).enumerate() {
            if decl.binders.len() != a.binders.len() {
                let (line, col) = a.binders.first().map(|b| b.1).unwrap_or_else(|| at_of(&a.body));
                return Err(ManifestError::ArityError {
                    line,
                    col,
                    msg: format!("argument {} of {f} binds {} variables, got {}", i + 1, decl.binders.len(), a.binders.len()),
                });
            }
            for (x, (line, col)) in &a.binders {
                if self.sig.contains(x) {
                    return Err(ManifestError::ParseError {
                        line: *line,
                        col: *col,
                        msg: format!("bound variable '{x}' clashes with a symbol"),
                    });
                }
            }
            let base = scope.len();
            scope.extend(a.binders.iter().map(|(x, _)| x.clone()).zip(decl.binders.iter().cloned()));
            let body = self.check(&a.body, &decl.result, scope);
            scope.truncate(base);
            out.push(Abs::with_hints(decl.binders.clone(), a.binders.iter().map(|(x, _)| name(x)).collect(), body?));
        }
        Ok((MetaTerm::Fun(name(f), out), fty.result))
    }

    fn meta(
        &mut self,
        m: &str,
        args: &[Raw],
        want: Option<&MolType>,
        at: (usize, usize),
        scope: &mut Scope,
    ) -> Result<(MetaTerm, MolType), ManifestError> {
        if let Some(d) = self.ctx.get(m).cloned() {
            if d.args.len() != args.len() {
                return Err(ManifestError::ArityError {
                    line: at.0,
                    col: at.1,
                    msg: format!("metavariable {m} expects {} arguments, got {}", d.args.len(), args.len()),
                });
            }
            let mut out = Vec::new();
            for (a, ty) in args.iter().zip(&d.args) {
                out.push(self.check(a, ty, scope)?);
            }
            return Ok((MetaTerm::Meta(name(m), out), d.result));
        }
        if !self.infer {
            return Err(ManifestError::UnknownSymbol { line: at.0, col: at.1, name: m.to_string() });
        }
        let Some(want) = want else {
            return Err(ManifestError::ParseError { line: at.0, col: at.1, msg: format!("cannot infer the type of metavariable {m}") });
        };
        let mut out = Vec::new();
        let mut tys = Vec::new();
        for a in args {
            let (t, ty) = self.synth(a, scope)?;
            out.push(t);
            tys.push(ty);
        }
        self.ctx.push(m, tys, want.clone());
        Ok((MetaTerm::Meta(name(m), out), want.clone()))
    }
}

fn at_of(r: &Raw) -> (usize, usize) {
    match r {
        Raw::App { at, .. } | Raw::Meta { at, .. } => *at,
    }
}
