//! Term syntax: AST, parser, printer, substitution and the `⪯` desugaring.
//!
//! Concrete syntax (ASCII, Unicode aliases in parentheses):
//!
//! ```text
//! term  := unary { binop unary }      -- one binop kind per level, right nested
//! unary := unop unary | atom
//! atom  := bot (⊥) | top (⊤) | var | "(" term ")"
//! unop  := hd (⊖ ⌽) | sh (⊚ ○) | dia (◇) | box (□) | F | F*
//! binop := \/ (⋎ ∨) | /\ (⋏ ∧)
//! ident := term ("=" | "<=" (⪯ ≤)) term
//! ```
//!
//! Variables start with a lowercase letter, function symbols with an
//! uppercase letter. Mixing `\/` and `/\` without parentheses is rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type Name = Arc<str>;
pub type Subst = BTreeMap<Name, Term>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Bot,
    Top,
    Var(Name),
    Join(Arc<Term>, Arc<Term>),
    Meet(Arc<Term>, Arc<Term>),
    Head(Arc<Term>),
    Shift(Arc<Term>),
    Majorum(Arc<Term>),
    Minorum(Arc<Term>),
    Apply(Name, Arc<Term>),
    Orbit(Name, Arc<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Arc::new(a), Arc::new(b))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Arc::new(a), Arc::new(b))
    }

    pub fn head(a: Term) -> Term {
        Term::Head(Arc::new(a))
    }

    pub fn shift(a: Term) -> Term {
        Term::Shift(Arc::new(a))
    }

    pub fn majorum(a: Term) -> Term {
        Term::Majorum(Arc::new(a))
    }

    pub fn minorum(a: Term) -> Term {
        Term::Minorum(Arc::new(a))
    }

    pub fn apply(f: &str, a: Term) -> Term {
        Term::Apply(f.into(), Arc::new(a))
    }

    pub fn orbit(f: &str, a: Term) -> Term {
        Term::Orbit(f.into(), Arc::new(a))
    }

    /// `⊚ⁿ t`.
    pub fn shift_n(t: Term, n: usize) -> Term {
        (0..n).fold(t, |acc, _| Term::shift(acc))
    }

    /// Direct subterms, left to right.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Bot | Term::Top | Term::Var(_) => vec![],
            Term::Join(a, b) | Term::Meet(a, b) => vec![a, b],
            Term::Head(a)
            | Term::Shift(a)
            | Term::Majorum(a)
            | Term::Minorum(a)
            | Term::Apply(_, a)
            | Term::Orbit(_, a) => vec![a],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            _ => self.children().into_iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn func_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_funcs(&mut out);
        out
    }

    pub(crate) fn collect_funcs(&self, out: &mut BTreeSet<Name>) {
        if let Term::Apply(f, _) | Term::Orbit(f, _) = self {
            out.insert(f.clone());
        }
        self.children().into_iter().for_each(|c| c.collect_funcs(out));
    }

    pub fn mentions_var(&self, v: &str) -> bool {
        match self {
            Term::Var(x) => &**x == v,
            _ => self.children().iter().any(|c| c.mentions_var(v)),
        }
    }

    /// Simultaneous substitution; variables outside `sigma` are kept.
    pub fn substitute(&self, sigma: &Subst) -> Term {
        match self {
            Term::Bot | Term::Top => self.clone(),
            Term::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Join(a, b) => Term::join(a.substitute(sigma), b.substitute(sigma)),
            Term::Meet(a, b) => Term::meet(a.substitute(sigma), b.substitute(sigma)),
            Term::Head(a) => Term::head(a.substitute(sigma)),
            Term::Shift(a) => Term::shift(a.substitute(sigma)),
            Term::Majorum(a) => Term::majorum(a.substitute(sigma)),
            Term::Minorum(a) => Term::minorum(a.substitute(sigma)),
            Term::Apply(f, a) => Term::Apply(f.clone(), Arc::new(a.substitute(sigma))),
            Term::Orbit(f, a) => Term::Orbit(f.clone(), Arc::new(a.substitute(sigma))),
        }
    }

    /// `self[v := t]`.
    pub fn replace_var(&self, v: &str, t: &Term) -> Term {
        let mut sigma = Subst::new();
        sigma.insert(v.into(), t.clone());
        self.substitute(&sigma)
    }

    /// Renames function symbols according to `map`.
    pub fn rename_funcs(&self, map: &BTreeMap<Name, Name>) -> Term {
        let r = |f: &Name| map.get(f).cloned().unwrap_or_else(|| f.clone());
        match self {
            Term::Bot | Term::Top | Term::Var(_) => self.clone(),
            Term::Join(a, b) => Term::join(a.rename_funcs(map), b.rename_funcs(map)),
            Term::Meet(a, b) => Term::meet(a.rename_funcs(map), b.rename_funcs(map)),
            Term::Head(a) => Term::head(a.rename_funcs(map)),
            Term::Shift(a) => Term::shift(a.rename_funcs(map)),
            Term::Majorum(a) => Term::majorum(a.rename_funcs(map)),
            Term::Minorum(a) => Term::minorum(a.rename_funcs(map)),
            Term::Apply(f, a) => Term::Apply(r(f), Arc::new(a.rename_funcs(map))),
            Term::Orbit(f, a) => Term::Orbit(r(f), Arc::new(a.rename_funcs(map))),
        }
    }

    /// Same constructor (and function symbol), ignoring children.
    pub fn same_head(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Apply(f, _), Term::Apply(g, _)) | (Term::Orbit(f, _), Term::Orbit(g, _)) => f == g,
            (Term::Var(x), Term::Var(y)) => x == y,
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }

    /// Rebuilds `self`'s constructor around new children (same count).
    pub fn with_children(&self, kids: Vec<Term>) -> Term {
        let mut it = kids.into_iter();
        let mut next = || it.next().expect("child count");
        match self {
            Term::Bot | Term::Top | Term::Var(_) => self.clone(),
            Term::Join(..) => {
                let a = next();
                Term::join(a, next())
            }
            Term::Meet(..) => {
                let a = next();
                Term::meet(a, next())
            }
            Term::Head(_) => Term::head(next()),
            Term::Shift(_) => Term::shift(next()),
            Term::Majorum(_) => Term::majorum(next()),
            Term::Minorum(_) => Term::minorum(next()),
            Term::Apply(f, _) => Term::Apply(f.clone(), Arc::new(next())),
            Term::Orbit(f, _) => Term::Orbit(f.clone(), Arc::new(next())),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

/// Relation of an identity: `=` or the sugar `⪯`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Leq,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    pub rel: Rel,
}

impl Identity {
    pub fn eq(lhs: Term, rhs: Term) -> Identity {
        Identity { lhs, rhs, rel: Rel::Eq }
    }

    pub fn leq(lhs: Term, rhs: Term) -> Identity {
        Identity { lhs, rhs, rel: Rel::Leq }
    }

    /// `s ⪯ t` becomes `s ⋎ t = t`; equalities are unchanged.
    pub fn desugar(&self) -> Identity {
        match self.rel {
            Rel::Eq => self.clone(),
            Rel::Leq => Identity::eq(Term::join(self.lhs.clone(), self.rhs.clone()), self.rhs.clone()),
        }
    }

    /// Inverse of [`Identity::desugar`] where the shape allows it.
    pub fn resugar(&self) -> Identity {
        if self.rel == Rel::Eq {
            if let Term::Join(a, b) = &self.lhs {
                if **b == self.rhs {
                    return Identity::leq((**a).clone(), self.rhs.clone());
                }
            }
        }
        self.clone()
    }

    pub fn substitute(&self, sigma: &Subst) -> Identity {
        Identity { lhs: self.lhs.substitute(sigma), rhs: self.rhs.substitute(sigma), rel: self.rel }
    }

    pub fn replace_var(&self, v: &str, t: &Term) -> Identity {
        Identity { lhs: self.lhs.replace_var(v, t), rhs: self.rhs.replace_var(v, t), rel: self.rel }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.lhs.collect_vars(&mut out);
        self.rhs.collect_vars(&mut out);
        out
    }

    pub fn func_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.lhs.collect_funcs(&mut out);
        self.rhs.collect_funcs(&mut out);
        out
    }

    pub fn swapped(&self) -> Identity {
        Identity { lhs: self.rhs.clone(), rhs: self.lhs.clone(), rel: self.rel }
    }

    pub fn rename_funcs(&self, map: &BTreeMap<Name, Name>) -> Identity {
        Identity { lhs: self.lhs.rename_funcs(map), rhs: self.rhs.rename_funcs(map), rel: self.rel }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.rel {
            Rel::Eq => "=",
            Rel::Leq => "<=",
        };
        write!(f, "{} {} {}", self.lhs, rel, self.rhs)
    }
}

impl fmt::Debug for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Premises (finite, ordered) and a conclusion.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quasiequation {
    pub premises: Vec<Identity>,
    pub conclusion: Identity,
}

impl Quasiequation {
    pub fn new(premises: Vec<Identity>, conclusion: Identity) -> Self {
        Quasiequation { premises, conclusion }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = self.conclusion.free_vars();
        for p in &self.premises {
            out.extend(p.free_vars());
        }
        out
    }

    pub fn func_symbols(&self) -> BTreeSet<Name> {
        let mut out = self.conclusion.func_symbols();
        for p in &self.premises {
            out.extend(p.func_symbols());
        }
        out
    }

    pub fn substitute(&self, sigma: &Subst) -> Quasiequation {
        Quasiequation {
            premises: self.premises.iter().map(|p| p.substitute(sigma)).collect(),
            conclusion: self.conclusion.substitute(sigma),
        }
    }

    /// The `assume ...; show ...` file form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.premises {
            out.push_str(&format!("assume {p};\n"));
        }
        out.push_str(&format!("show {};\n", self.conclusion));
        out
    }
}

impl fmt::Display for Quasiequation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.premises.is_empty() {
            return write!(f, "==> {}", self.conclusion);
        }
        let prem: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        write!(f, "{} ==> {}", prem.join(", "), self.conclusion)
    }
}

impl fmt::Debug for Quasiequation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("parse error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function symbol `{0}`")]
    UnknownFunctionSymbol(String),
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Bot,
    Top,
    Var(String),
    Func(String, bool),
    Unop(Unop),
    Join,
    Meet,
    LParen,
    RParen,
    Eq,
    Leq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Unop {
    Head,
    Shift,
    Majorum,
    Minorum,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    word.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "bot" => Tok::Bot,
                "top" => Tok::Top,
                "hd" => Tok::Unop(Unop::Head),
                "sh" => Tok::Unop(Unop::Shift),
                "dia" => Tok::Unop(Unop::Majorum),
                "box" => Tok::Unop(Unop::Minorum),
                _ if c.is_ascii_uppercase() => {
                    let star = matches!(chars.peek(), Some(&(_, '*')));
                    if star {
                        chars.next();
                    }
                    Tok::Func(word, star)
                }
                _ => Tok::Var(word),
            };
            out.push((pos, tok));
            continue;
        }
        chars.next();
        let next_is = |chars: &mut std::iter::Peekable<std::str::CharIndices>, e: char| {
            if matches!(chars.peek(), Some(&(_, d)) if d == e) {
                chars.next();
                true
            } else {
                false
            }
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Eq,
            '\\' if next_is(&mut chars, '/') => Tok::Join,
            '/' if next_is(&mut chars, '\\') => Tok::Meet,
            '<' if next_is(&mut chars, '=') => Tok::Leq,
            '⊥' => Tok::Bot,
            '⊤' => Tok::Top,
            '⋎' | '∨' => Tok::Join,
            '⋏' | '∧' => Tok::Meet,
            '⊖' | '⌽' => Tok::Unop(Unop::Head),
            '⊚' | '○' => Tok::Unop(Unop::Shift),
            '◇' => Tok::Unop(Unop::Majorum),
            '□' => Tok::Unop(Unop::Minorum),
            '⪯' | '≤' | '⩽' => Tok::Leq,
            _ => return Err(syntax(pos, format!("unexpected character `{c}`"))),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    funcs: Option<&'a BTreeSet<Name>>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let first = self.unary()?;
        let op = match self.peek() {
            Some(Tok::Join) => Tok::Join,
            Some(Tok::Meet) => Tok::Meet,
            _ => return Ok(first),
        };
        let mut operands = vec![first];
        while let Some(t) = self.peek() {
            if *t == op {
                self.i += 1;
                operands.push(self.unary()?);
            } else if matches!(t, Tok::Join | Tok::Meet) {
                return Err(syntax(self.pos(), "mixing \\/ and /\\ requires parentheses"));
            } else {
                break;
            }
        }
        let mut acc = operands.pop().unwrap();
        while let Some(x) = operands.pop() {
            acc = if op == Tok::Join { Term::join(x, acc) } else { Term::meet(x, acc) };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        let tok = self.peek().cloned().ok_or_else(|| syntax(pos, "unexpected end of input"))?;
        self.i += 1;
        match tok {
            Tok::Bot => Ok(Term::Bot),
            Tok::Top => Ok(Term::Top),
            Tok::Var(v) => Ok(Term::var(&v)),
            Tok::LParen => {
                let t = self.term()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.i += 1;
                        Ok(t)
                    }
                    _ => Err(syntax(self.pos(), "expected `)`")),
                }
            }
            Tok::Unop(op) => {
                let arg = self.unary()?;
                Ok(match op {
                    Unop::Head => Term::head(arg),
                    Unop::Shift => Term::shift(arg),
                    Unop::Majorum => Term::majorum(arg),
                    Unop::Minorum => Term::minorum(arg),
                })
            }
            Tok::Func(f, star) => {
                if let Some(funcs) = self.funcs {
                    if !funcs.contains(f.as_str()) {
                        return Err(ParseError::UnknownFunctionSymbol(f));
                    }
                }
                let arg = self.unary()?;
                Ok(if star { Term::orbit(&f, arg) } else { Term::apply(&f, arg) })
            }
            other => Err(syntax(pos, format!("unexpected token {other:?}"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.i < self.toks.len() {
            Err(syntax(self.pos(), "trailing input"))
        } else {
            Ok(())
        }
    }
}

fn parser<'a>(text: &str, funcs: Option<&'a BTreeSet<Name>>) -> Result<Parser<'a>, ParseError> {
    Ok(Parser { toks: tokenize(text)?, i: 0, end: text.len(), funcs })
}

/// Parses a term; any uppercase identifier is accepted as a function symbol.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_in(text, None)
}

/// Parses a term, rejecting function symbols outside `funcs` when given.
pub fn parse_term_in(text: &str, funcs: Option<&BTreeSet<Name>>) -> Result<Term, ParseError> {
    let mut p = parser(text, funcs)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_identity(text: &str) -> Result<Identity, ParseError> {
    parse_identity_in(text, None)
}

pub fn parse_identity_in(text: &str, funcs: Option<&BTreeSet<Name>>) -> Result<Identity, ParseError> {
    let mut p = parser(text, funcs)?;
    let lhs = p.term()?;
    let rel = match p.peek() {
        Some(Tok::Eq) => Rel::Eq,
        Some(Tok::Leq) => Rel::Leq,
        _ => return Err(syntax(p.pos(), "expected `=` or `<=`")),
    };
    p.i += 1;
    let rhs = p.term()?;
    p.finish()?;
    Ok(Identity { lhs, rhs, rel })
}

/// Parses the `assume <id>; ...; show <id>` form. `#` starts a comment.
pub fn parse_quasiequation(text: &str) -> Result<Quasiequation, ParseError> {
    let mut premises = Vec::new();
    let mut conclusion = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let code = line.split('#').next().unwrap_or("");
        let mut stmt_off = offset;
        for stmt in code.split(';') {
            let trimmed = stmt.trim();
            let lead = stmt.len() - stmt.trim_start().len();
            let at = |e: ParseError| match e {
                ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + stmt_off + lead, msg },
                other => other,
            };
            if let Some(rest) = trimmed.strip_prefix("assume ") {
                if conclusion.is_some() {
                    return Err(syntax(stmt_off + lead, "assume after show"));
                }
                premises.push(parse_identity(rest).map_err(|e| shift_pos(at(e), 7))?);
            } else if let Some(rest) = trimmed.strip_prefix("show ") {
                if conclusion.is_some() {
                    return Err(syntax(stmt_off + lead, "duplicate show"));
                }
                conclusion = Some(parse_identity(rest).map_err(|e| shift_pos(at(e), 5))?);
            } else if !trimmed.is_empty() {
                return Err(syntax(stmt_off + lead, "expected `assume` or `show`"));
            }
            stmt_off += stmt.len() + 1;
        }
        offset += line.len();
    }
    let conclusion = conclusion.ok_or_else(|| syntax(text.len(), "missing `show`"))?;
    Ok(Quasiequation { premises, conclusion })
}

fn shift_pos(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Syntax { pos, msg } => ParseError::Syntax { pos: pos + by, msg },
        other => other,
    }
}

/// ASCII rendering that parses back to the same term.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Bot => out.push_str("bot"),
        Term::Top => out.push_str("top"),
        Term::Var(v) => out.push_str(v),
        Term::Join(a, b) | Term::Meet(a, b) => {
            let op = if matches!(t, Term::Join(..)) { " \\/ " } else { " /\\ " };
            write_operand(a, out, false, t);
            out.push_str(op);
            write_operand(b, out, true, t);
        }
        Term::Head(a) => write_unary("hd ", a, out),
        Term::Shift(a) => write_unary("sh ", a, out),
        Term::Majorum(a) => write_unary("dia ", a, out),
        Term::Minorum(a) => write_unary("box ", a, out),
        Term::Apply(f, a) => write_unary(&format!("{f} "), a, out),
        Term::Orbit(f, a) => write_unary(&format!("{f}* "), a, out),
    }
}

fn is_binary(t: &Term) -> bool {
    matches!(t, Term::Join(..) | Term::Meet(..))
}

fn write_operand(child: &Term, out: &mut String, right: bool, parent: &Term) {
    let same = std::mem::discriminant(child) == std::mem::discriminant(parent);
    if is_binary(child) && !(right && same) {
        out.push('(');
        write_term(child, out);
        out.push(')');
    } else {
        write_term(child, out);
    }
}

fn write_unary(op: &str, arg: &Term, out: &mut String) {
    out.push_str(op);
    if is_binary(arg) {
        out.push('(');
        write_term(arg, out);
        out.push(')');
    } else {
        write_term(arg, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(t("dia F* bot"), Term::majorum(Term::orbit("F", Term::Bot)));
        assert_eq!(t("box dia a"), Term::minorum(Term::majorum(Term::var("a"))));
        assert!(matches!(parse_term("a \\/ b /\\ c"), Err(ParseError::Syntax { .. })));
        assert_eq!(t("a \\/ (b /\\ c)"), Term::join(Term::var("a"), Term::meet(Term::var("b"), Term::var("c"))));
        assert_eq!(t("◇ F* ⊥"), t("dia F* bot"));
        assert_eq!(t("⊚ a ⋎ a"), Term::join(Term::shift(Term::var("a")), Term::var("a")));
    }

    #[test]
    fn chains_nest_to_the_right() {
        assert_eq!(t("a \\/ b \\/ c"), t("a \\/ (b \\/ c)"));
        assert_ne!(t("a \\/ b \\/ c"), t("(a \\/ b) \\/ c"));
        assert_eq!(print_term(&t("(a \\/ b) \\/ c")), "(a \\/ b) \\/ c");
        assert_eq!(print_term(&t("a \\/ (b \\/ c)")), "a \\/ b \\/ c");
    }

    #[test]
    fn unknown_symbols_and_garbage() {
        let sig: BTreeSet<Name> = ["F".into()].into();
        assert!(parse_term_in("G a", Some(&sig)).is_err());
        assert_eq!(
            parse_term_in("G a", Some(&sig)).unwrap_err(),
            ParseError::UnknownFunctionSymbol("G".into())
        );
        assert!(parse_term_in("F* a", Some(&sig)).is_ok());
        assert!(parse_term("a b").is_err());
        assert!(parse_term("(a").is_err());
        assert!(parse_term("sh").is_err());
        assert!(matches!(parse_term("a $ b"), Err(ParseError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut s = Subst::new();
        s.insert("a".into(), Term::Bot);
        assert_eq!(t("a \\/ b").substitute(&s), t("bot \\/ b"));
        let mut s = Subst::new();
        s.insert("a".into(), t("sh a"));
        assert_eq!(t("a").substitute(&s), t("sh a"));
        let mut s = Subst::new();
        s.insert("a".into(), t("b"));
        s.insert("b".into(), t("a"));
        assert_eq!(t("a /\\ b").substitute(&s), t("b /\\ a"));
        let mut s = Subst::new();
        s.insert("a".into(), t("dia b"));
        assert_eq!(t("F* hd a").substitute(&s), t("F* hd dia b"));
    }

    #[test]
    fn desugaring() {
        let d = parse_identity("a <= b").unwrap().desugar();
        assert_eq!(d, Identity::eq(t("a \\/ b"), t("b")));
        let e = parse_identity("a = b").unwrap();
        assert_eq!(e.desugar(), e);
        assert_eq!(parse_identity("sh a <= a").unwrap().desugar().to_string(), "sh a \\/ a = a");
        assert_eq!(d.resugar(), parse_identity("a <= b").unwrap());
    }

    #[test]
    fn quasiequation_file() {
        let q = parse_quasiequation("# park\nassume F a <= a;\nshow dia F* bot <= a;").unwrap();
        assert_eq!(q.premises.len(), 1);
        assert_eq!(q.conclusion, parse_identity("dia F* bot <= a").unwrap());
        assert_eq!(parse_quasiequation(&q.render()).unwrap(), q);
        assert!(parse_quasiequation("assume a = a").is_err());
        assert!(parse_quasiequation("show a = a; assume a = a").is_err());
    }

    #[test]
    fn printing_parenthesizes_operands() {
        for s in ["F (a \\/ b)", "sh (a /\\ b) \\/ c", "(a /\\ b) \\/ (c /\\ d)", "F* G* hd a", "box (a \\/ b) /\\ c"] {
            assert_eq!(print_term(&t(s)), s);
        }
    }
}
