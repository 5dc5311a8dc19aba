//! The derivation checker.
//!
//! A derivation is a finite tree whose nodes state their conclusions. Steps
//! name a rule; the substitution is found by first-order matching of the
//! rule's conclusion and premises (desugared) against the node and its
//! children. Context steps replace equals by equals inside an identity: either
//! the `indiscern` schema with an equation as second child, or a one-child step
//! named after a premise-free equational axiom, whose instance plays that role.
//! Contexts are given explicitly (`ctx ...`) or recovered by a parallel walk of
//! the child and node conclusions.

use crate::rules::{Rule, RuleKind, RuleSet};
use crate::term::{parse_identity, parse_term, Identity, Name, Quasiequation, Rel, Subst, Term};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Replacement of `u` by `w` at the `hole` positions of `s ~ t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub s: Term,
    pub t: Term,
    pub hole: Name,
    pub u: Term,
    pub w: Term,
    /// `None` until resolved: both `s ⪯ t` and `s = t` are tried, in that order.
    pub rel: Option<Rel>,
}

impl Context {
    fn frame(&self, rel: Rel) -> Identity {
        Identity { lhs: self.s.clone(), rhs: self.t.clone(), rel }.desugar()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Node {
    Leaf(usize),
    Step { rule: String, bindings: Subst, ctx: Option<Context>, children: Vec<Derivation> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Identity,
    pub node: Node,
    /// Source line in a proof script, for diagnostics.
    pub line: Option<usize>,
}

impl Derivation {
    pub fn leaf(i: usize, conclusion: Identity) -> Derivation {
        Derivation { conclusion, node: Node::Leaf(i), line: None }
    }

    pub fn step(rule: &str, children: Vec<Derivation>, conclusion: Identity) -> Derivation {
        Derivation {
            conclusion,
            node: Node::Step { rule: rule.to_string(), bindings: Subst::new(), ctx: None, children },
            line: None,
        }
    }

    pub fn with_bindings(mut self, b: Subst) -> Derivation {
        if let Node::Step { bindings, .. } = &mut self.node {
            *bindings = b;
        }
        self
    }

    pub fn with_ctx(mut self, c: Context) -> Derivation {
        if let Node::Step { ctx, .. } = &mut self.node {
            *ctx = Some(c);
        }
        self
    }

    pub fn children(&self) -> &[Derivation] {
        match &self.node {
            Node::Leaf(_) => &[],
            Node::Step { children, .. } => children,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children().iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Names of the rules used anywhere in the tree.
    pub fn rules_used(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut BTreeSet<String>) {
        if let Node::Step { rule, children, .. } = &self.node {
            out.insert(rule.clone());
            for c in children {
                c.collect_rules(out);
            }
        }
    }

    fn vars(&self, out: &mut BTreeSet<Name>) {
        out.extend(self.conclusion.free_vars());
        if let Node::Step { bindings, ctx, children, .. } = &self.node {
            for t in bindings.values() {
                out.extend(t.free_vars());
            }
            if let Some(c) = ctx {
                out.insert(c.hole.clone());
                for t in [&c.s, &c.t, &c.u, &c.w] {
                    out.extend(t.free_vars());
                }
            }
            for c in children {
                c.vars(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelErrorKind {
    #[error("conclusion mismatch: expected `{expected}`, found `{found}`")]
    ConclusionMismatch { expected: String, found: String },
    #[error("leaf {0} does not state premise {0}")]
    BadLeaf(usize),
    #[error("rule `{0}` not found")]
    RuleNotFound(String),
    #[error("rule `{rule}` takes {expected} premises, step has {found} children")]
    ArityMismatch { rule: String, expected: usize, found: usize },
    #[error("match failure: {0}")]
    MatchFail(String),
    #[error("pattern variable `{0}` unbound; supply it with `with`")]
    UnboundPatternVar(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
    #[error("script syntax: {0}")]
    Syntax(String),
}

impl KernelErrorKind {
    pub fn class(&self) -> &'static str {
        match self {
            KernelErrorKind::ConclusionMismatch { .. } => "ConclusionMismatch",
            KernelErrorKind::BadLeaf(_) => "BadLeaf",
            KernelErrorKind::RuleNotFound(_) => "RuleNotFound",
            KernelErrorKind::ArityMismatch { .. } => "ArityMismatch",
            KernelErrorKind::MatchFail(_) => "MatchFail",
            KernelErrorKind::UnboundPatternVar(_) => "UnboundPatternVar",
            KernelErrorKind::DuplicateName(_) => "DuplicateName",
            KernelErrorKind::Syntax(_) => "Syntax",
        }
    }
}

/// A kernel error with the path (child indices from the root) and source line of the offending node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct KernelError {
    pub kind: KernelErrorKind,
    pub path: Vec<usize>,
    pub line: Option<usize>,
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(l) = self.line {
            write!(f, " (line {l})")?;
        }
        if !self.path.is_empty() {
            write!(f, " at path {:?}", self.path)?;
        }
        Ok(())
    }
}

impl KernelError {
    pub fn class(&self) -> &'static str {
        self.kind.class()
    }

    fn at(kind: KernelErrorKind, path: &[usize], d: &Derivation) -> KernelError {
        KernelError { kind, path: path.to_vec(), line: d.line }
    }

    fn bare(kind: KernelErrorKind) -> KernelError {
        KernelError { kind, path: Vec::new(), line: None }
    }
}

fn match_term(p: &Term, c: &Term, sigma: &mut Subst, pos: &mut String) -> Result<(), String> {
    match (p, c) {
        (Term::Var(v), _) => match sigma.get(v) {
            Some(bound) if bound == c => Ok(()),
            Some(bound) => Err(format!("at {pos}: `{v}` bound to `{bound}` and to `{c}`")),
            None => {
                sigma.insert(v.clone(), c.clone());
                Ok(())
            }
        },
        _ if p.same_head(c) => {
            for (i, (pk, ck)) in p.children().into_iter().zip(c.children()).enumerate() {
                let len = pos.len();
                pos.push_str(&format!(".{i}"));
                match_term(pk, ck, sigma, pos)?;
                pos.truncate(len);
            }
            Ok(())
        }
        _ => Err(format!("at {pos}: pattern `{p}` vs `{c}`")),
    }
}

/// First-order matching of the desugared `pattern` against the desugared
/// `concrete`, extending `seed`.
pub fn match_identity(pattern: &Identity, concrete: &Identity, seed: &Subst) -> Result<Subst, String> {
    let mut sigma = seed.clone();
    match_desugared(&pattern.desugar(), &concrete.desugar(), &mut sigma, "")?;
    Ok(sigma)
}

fn match_desugared(p: &Identity, c: &Identity, sigma: &mut Subst, label: &str) -> Result<(), String> {
    let mut pos = format!("{label}lhs");
    match_term(&p.lhs, &c.lhs, sigma, &mut pos)?;
    let mut pos = format!("{label}rhs");
    match_term(&p.rhs, &c.rhs, sigma, &mut pos)
}

fn fresh_var(avoid: &BTreeSet<Name>, stem: &str) -> Name {
    (0..)
        .map(|i| Name::from(if i == 0 { stem.to_string() } else { format!("{stem}{i}") }))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Walks `c` and `n` in parallel; differing subterm pairs must all equal the
/// pair fixed by `pair` (or the first one `fix` accepts). Returns the common
/// frame with `hole` at the replaced positions.
fn infer_frame(
    c: &Term,
    n: &Term,
    hole: &Name,
    pair: &mut Option<(Term, Term)>,
    fix: &mut dyn FnMut(&Term, &Term) -> bool,
) -> Option<Term> {
    if c == n {
        return Some(c.clone());
    }
    match pair {
        Some((u, w)) if u == c && w == n => return Some(Term::Var(hole.clone())),
        None if fix(c, n) => {
            *pair = Some((c.clone(), n.clone()));
            return Some(Term::Var(hole.clone()));
        }
        _ => {}
    }
    if !c.same_head(n) {
        return None;
    }
    let kids = c
        .children()
        .into_iter()
        .zip(n.children())
        .map(|(ck, nk)| infer_frame(ck, nk, hole, pair, fix))
        .collect::<Option<Vec<_>>>()?;
    Some(c.with_children(kids))
}

/// Finds a context turning `child` into `node`. `fixed` pins the replaced
/// pair; otherwise `fix` decides which differing pair is the replacement.
fn infer_context(
    child: &Identity,
    node: &Identity,
    fixed: Option<(Term, Term)>,
    fix: &mut dyn FnMut(&Term, &Term) -> bool,
) -> Option<Context> {
    let c = child.desugar();
    let n = node.desugar();
    let mut avoid = c.free_vars();
    avoid.extend(n.free_vars());
    if let Some((u, w)) = &fixed {
        avoid.extend(u.free_vars());
        avoid.extend(w.free_vars());
    }
    let hole = fresh_var(&avoid, "_h");
    let mut pair = fixed;
    let s = infer_frame(&c.lhs, &n.lhs, &hole, &mut pair, fix)?;
    let t = infer_frame(&c.rhs, &n.rhs, &hole, &mut pair, fix)?;
    // Identical conclusions: any pair works; use the trivial one.
    let (u, w) = pair.unwrap_or((c.lhs.clone(), c.lhs.clone()));
    Some(Context { s, t, hole, u, w, rel: Some(Rel::Eq) })
}

/// Checks that `ctx` carries `child` to `node`; returns it with its relation resolved.
fn verify_context(ctx: &Context, child: &Identity, node: &Identity) -> Option<Context> {
    let c = child.desugar();
    let n = node.desugar();
    let rels = match ctx.rel {
        Some(r) => vec![r],
        None => vec![Rel::Leq, Rel::Eq],
    };
    rels.into_iter().find_map(|rel| {
        let frame = ctx.frame(rel);
        let ok = frame.replace_var(&ctx.hole, &ctx.u) == c && frame.replace_var(&ctx.hole, &ctx.w) == n;
        ok.then(|| Context { rel: Some(rel), ..ctx.clone() })
    })
}

/// Matches `u = w` against the rule's equation in either orientation.
fn match_rewrite(rule: &Rule, u: &Term, w: &Term, seed: &Subst) -> Option<Subst> {
    let p = &rule.pattern().conclusion;
    let inst = Identity::eq(u.clone(), w.clone());
    let mut s1 = seed.clone();
    if match_desugared(p, &inst, &mut s1, "").is_ok() {
        return Some(s1);
    }
    let mut s2 = seed.clone();
    match_desugared(p, &inst.swapped(), &mut s2, "").is_ok().then_some(s2)
}

/// Checks `d` as a derivation of `q`; on success returns the elaborated tree
/// (full substitutions and resolved contexts on every step).
pub fn check(d: &Derivation, q: &Quasiequation, rules: &RuleSet) -> Result<Derivation, KernelError> {
    if d.conclusion.desugar() != q.conclusion.desugar() {
        return Err(KernelError::at(
            KernelErrorKind::ConclusionMismatch { expected: q.conclusion.to_string(), found: d.conclusion.to_string() },
            &[],
            d,
        ));
    }
    let mut path = Vec::new();
    check_node(d, q, rules, &mut path)
}

fn check_node(d: &Derivation, q: &Quasiequation, rules: &RuleSet, path: &mut Vec<usize>) -> Result<Derivation, KernelError> {
    let err = |kind: KernelErrorKind, path: &[usize]| KernelError::at(kind, path, d);
    let (name, bindings, ctx, children) = match &d.node {
        Node::Leaf(i) => {
            return match q.premises.get(*i) {
                Some(p) if p.desugar() == d.conclusion.desugar() => Ok(d.clone()),
                _ => Err(err(KernelErrorKind::BadLeaf(*i), path)),
            }
        }
        Node::Step { rule, bindings, ctx, children } => (rule, bindings, ctx, children),
    };
    let rule = rules.get(name).ok_or_else(|| err(KernelErrorKind::RuleNotFound(name.clone()), path))?;
    let arity_err = |path: &[usize]| {
        err(KernelErrorKind::ArityMismatch { rule: name.clone(), expected: rule.arity(), found: children.len() }, path)
    };

    let (sigma, ctx) = if rule.is_context_schema() {
        if children.len() != 2 {
            return Err(arity_err(path));
        }
        let eqn = children[1].conclusion.desugar();
        let resolved = match ctx {
            Some(c) => {
                if eqn != Identity::eq(c.u.clone(), c.w.clone()) {
                    return Err(err(
                        KernelErrorKind::MatchFail(format!("second premise `{eqn}` is not `{} = {}`", c.u, c.w)),
                        path,
                    ));
                }
                verify_context(c, &children[0].conclusion, &d.conclusion)
            }
            None => infer_context(
                &children[0].conclusion,
                &d.conclusion,
                Some((eqn.lhs.clone(), eqn.rhs.clone())),
                &mut |_, _| false,
            ),
        };
        let c = resolved.ok_or_else(|| err(KernelErrorKind::MatchFail("context does not fit the step".into()), path))?;
        (bindings.clone(), Some(c))
    } else if rule.is_rewrite() && children.len() == 1 {
        let mut found = None;
        let resolved = match ctx {
            Some(c) => {
                found = match_rewrite(rule, &c.u, &c.w, bindings);
                if found.is_none() {
                    return Err(err(
                        KernelErrorKind::MatchFail(format!("`{} = {}` is not an instance of `{}`", c.u, c.w, rule.name)),
                        path,
                    ));
                }
                verify_context(c, &children[0].conclusion, &d.conclusion)
            }
            None => infer_context(&children[0].conclusion, &d.conclusion, None, &mut |u, w| {
                match match_rewrite(rule, u, w, bindings) {
                    Some(s) => {
                        found = Some(s);
                        true
                    }
                    None => false,
                }
            }),
        };
        let c = resolved
            .ok_or_else(|| err(KernelErrorKind::MatchFail(format!("no context rewrites with `{}`", rule.name)), path))?;
        let sigma = match found {
            Some(s) => s,
            // Child and node coincide; the rewrite is the trivial `u = u`.
            None => match_rewrite(rule, &c.u, &c.w, bindings).ok_or_else(|| {
                err(KernelErrorKind::MatchFail(format!("no context rewrites with `{}`", rule.name)), path)
            })?,
        };
        (sigma, Some(c))
    } else {
        if children.len() != rule.arity() {
            return Err(arity_err(path));
        }
        let pat = rule.pattern();
        let mut sigma = bindings.clone();
        match_desugared(&pat.conclusion, &d.conclusion.desugar(), &mut sigma, "conclusion.")
            .map_err(|m| err(KernelErrorKind::MatchFail(m), path))?;
        for (i, (p, child)) in pat.premises.iter().zip(children).enumerate() {
            match_desugared(p, &child.conclusion.desugar(), &mut sigma, &format!("premise {i}."))
                .map_err(|m| err(KernelErrorKind::MatchFail(m), path))?;
        }
        if let Some(v) = pat.free_vars().into_iter().find(|v| !sigma.contains_key(v)) {
            return Err(err(KernelErrorKind::UnboundPatternVar(v.to_string()), path));
        }
        (sigma, None)
    };

    let mut kids = Vec::with_capacity(children.len());
    for (i, c) in children.iter().enumerate() {
        path.push(i);
        kids.push(check_node(c, q, rules, path)?);
        path.pop();
    }
    Ok(Derivation {
        conclusion: d.conclusion.clone(),
        node: Node::Step { rule: name.clone(), bindings: sigma, ctx, children: kids },
        line: d.line,
    })
}

/// Checks `d` and returns `rules` extended by `q` as the derived rule `name`.
pub fn register_derived(name: &str, q: &Quasiequation, d: &Derivation, rules: &RuleSet) -> Result<RuleSet, KernelError> {
    if rules.contains(name) {
        return Err(KernelError::bare(KernelErrorKind::DuplicateName(name.to_string())));
    }
    let elaborated = check(d, q, rules)?;
    let mut out = rules.clone();
    out.insert(Rule::derived(name, q, elaborated))
        .map_err(|_| KernelError::bare(KernelErrorKind::DuplicateName(name.to_string())))?;
    Ok(out)
}

/// Applies `sigma` to every label of an elaborated derivation, renaming context holes apart.
fn instantiate(d: &Derivation, sigma: &Subst, avoid: &mut BTreeSet<Name>) -> Derivation {
    let node = match &d.node {
        Node::Leaf(i) => Node::Leaf(*i),
        Node::Step { rule, bindings, ctx, children } => {
            let ctx = ctx.as_ref().map(|c| {
                let hole = fresh_var(avoid, "_h");
                avoid.insert(hole.clone());
                let h = Term::Var(hole.clone());
                let mut inner = sigma.clone();
                inner.insert(c.hole.clone(), h);
                Context {
                    s: c.s.substitute(&inner),
                    t: c.t.substitute(&inner),
                    hole,
                    u: c.u.substitute(sigma),
                    w: c.w.substitute(sigma),
                    rel: c.rel,
                }
            });
            Node::Step {
                rule: rule.clone(),
                bindings: bindings.iter().map(|(k, v)| (k.clone(), v.substitute(sigma))).collect(),
                ctx,
                children: children.iter().map(|c| instantiate(c, sigma, avoid)).collect(),
            }
        }
    };
    Derivation { conclusion: d.conclusion.substitute(sigma), node, line: None }
}

fn splice(d: Derivation, leaves: &[Derivation]) -> Derivation {
    match d.node {
        Node::Leaf(i) => leaves[i].clone(),
        Node::Step { rule, bindings, ctx, children } => Derivation {
            conclusion: d.conclusion,
            node: Node::Step {
                rule,
                bindings,
                ctx,
                children: children.into_iter().map(|c| splice(c, leaves)).collect(),
            },
            line: None,
        },
    }
}

/// Replaces every derived-rule step of the elaborated derivation `d` by the
/// recorded derivation of that rule, recursively, so only base rules remain.
pub fn inline(d: &Derivation, rules: &RuleSet) -> Result<Derivation, KernelError> {
    let Node::Step { rule, bindings, ctx, children } = &d.node else {
        return Ok(d.clone());
    };
    let kids = children.iter().map(|c| inline(c, rules)).collect::<Result<Vec<_>, _>>()?;
    let r = rules.get(rule).ok_or_else(|| KernelError::bare(KernelErrorKind::RuleNotFound(rule.clone())))?;
    match (&r.kind, &r.provenance) {
        (RuleKind::Derived, Some(prov)) => {
            let mut avoid = BTreeSet::new();
            prov.vars(&mut avoid);
            for t in bindings.values() {
                avoid.extend(t.free_vars());
            }
            let body = inline(&instantiate(prov, bindings, &mut avoid), rules)?;
            let mut out = splice(body, &kids);
            out.conclusion = d.conclusion.clone();
            Ok(out)
        }
        _ => Ok(Derivation {
            conclusion: d.conclusion.clone(),
            node: Node::Step { rule: rule.clone(), bindings: bindings.clone(), ctx: ctx.clone(), children: kids },
            line: None,
        }),
    }
}

fn cong_rule(t: &Term) -> String {
    match t {
        Term::Head(_) => "cong-hd".into(),
        Term::Shift(_) => "cong-sh".into(),
        Term::Majorum(_) => "cong-dia".into(),
        Term::Minorum(_) => "cong-box".into(),
        Term::Join(..) => "cong-join".into(),
        Term::Meet(..) => "cong-meet".into(),
        Term::Apply(f, _) => format!("cong-{f}"),
        Term::Orbit(f, _) => format!("cong-{f}*"),
        Term::Bot | Term::Top | Term::Var(_) => unreachable!("leaves have no congruence rule"),
    }
}

/// Derivation of `x[u] = x[w]` from one of `u = w`.
fn cong_chain(x: &Term, hole: &Name, eqn: &Derivation, u: &Term, w: &Term) -> Derivation {
    if let Term::Var(v) = x {
        if v == hole {
            return eqn.clone();
        }
    }
    let xu = x.replace_var(hole, u);
    if !x.mentions_var(hole) {
        return Derivation::step("eq-reflex", vec![], Identity::eq(xu.clone(), xu));
    }
    let kids = x.children().into_iter().map(|k| cong_chain(k, hole, eqn, u, w)).collect();
    Derivation::step(&cong_rule(x), kids, Identity::eq(xu, x.replace_var(hole, w)))
}

fn trans_eq(a: Derivation, b: Derivation) -> Derivation {
    let concl = Identity::eq(a.conclusion.desugar().lhs, b.conclusion.desugar().rhs);
    Derivation::step("eq-trans", vec![a, b], concl)
}

/// Rewrites every context step of an elaborated, inlined derivation into
/// congruence, symmetry and transitivity steps.
pub fn expand_contexts(d: &Derivation, rules: &RuleSet) -> Result<Derivation, KernelError> {
    let Node::Step { rule, bindings, ctx, children } = &d.node else {
        return Ok(d.clone());
    };
    let kids = children.iter().map(|c| expand_contexts(c, rules)).collect::<Result<Vec<_>, _>>()?;
    let Some(c) = ctx else {
        return Ok(Derivation {
            conclusion: d.conclusion.clone(),
            node: Node::Step { rule: rule.clone(), bindings: bindings.clone(), ctx: None, children: kids },
            line: None,
        });
    };
    let r = rules.get(rule).ok_or_else(|| KernelError::bare(KernelErrorKind::RuleNotFound(rule.clone())))?;
    let uw = Identity::eq(c.u.clone(), c.w.clone());
    let eqn = if r.is_context_schema() {
        kids[1].clone()
    } else {
        let forward = r.pattern().conclusion.substitute(bindings);
        let axiom = Derivation::step(rule, vec![], forward.clone()).with_bindings(bindings.clone());
        if forward == uw {
            axiom
        } else {
            Derivation::step("symm", vec![axiom], uw.clone())
        }
    };
    let frame = c.frame(c.rel.unwrap_or(Rel::Eq));
    let left = cong_chain(&frame.lhs, &c.hole, &eqn, &c.u, &c.w);
    let right = cong_chain(&frame.rhs, &c.hole, &eqn, &c.u, &c.w);
    let base = kids[0].clone();
    let mut out = if frame.rhs.mentions_var(&c.hole) { trans_eq(base, right) } else { base };
    if frame.lhs.mentions_var(&c.hole) {
        let back = Derivation::step("symm", vec![left.clone()], left.conclusion.swapped());
        out = trans_eq(back, out);
    }
    out.conclusion = d.conclusion.clone();
    Ok(out)
}

/// Inlines derived rules and expands contexts, then re-checks the result
/// against the base rules only (no derived rules, no context schema).
pub fn to_base(d: &Derivation, q: &Quasiequation, rules: &RuleSet) -> Result<(Derivation, RuleSet), KernelError> {
    let elaborated = check(d, q, rules)?;
    let flat = expand_contexts(&inline(&elaborated, rules)?, rules)?;
    let mut base = RuleSet::new(&format!("{}-base", rules.name));
    for r in rules.without_contexts().iter().filter(|r| r.kind != RuleKind::Derived) {
        base.insert((**r).clone()).expect("names stay unique");
    }
    check(&flat, q, &base)?;
    Ok((flat, base))
}

// ---------------------------------------------------------------------------
// Script format

fn syntax(line: usize, msg: impl Into<String>) -> KernelError {
    KernelError { kind: KernelErrorKind::Syntax(msg.into()), path: Vec::new(), line: Some(line) }
}

fn parse_assignments(text: &str, line: usize) -> Result<Vec<(String, String)>, KernelError> {
    text.split(',')
        .map(|part| {
            let (k, v) = part.split_once(":=").ok_or_else(|| syntax(line, format!("expected `name:=term` in `{part}`")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

struct ScriptLine {
    indent: usize,
    number: usize,
    derivation: Derivation,
}

fn parse_line(text: &str, number: usize) -> Result<Derivation, KernelError> {
    let (head, concl) = text.split_once("::").ok_or_else(|| syntax(number, "missing `::`"))?;
    let conclusion = parse_identity(concl.trim()).map_err(|e| syntax(number, e.to_string()))?;
    let head = head.trim();
    if let Some(idx) = head.strip_prefix("leaf") {
        let i = idx.trim().parse().map_err(|_| syntax(number, "leaf index"))?;
        return Ok(Derivation { conclusion, node: Node::Leaf(i), line: Some(number) });
    }
    let rest = head.strip_prefix("step").ok_or_else(|| syntax(number, "expected `step` or `leaf`"))?.trim();
    let (rule, mut rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    if rule.is_empty() {
        return Err(syntax(number, "missing rule name"));
    }
    let mut bindings = Subst::new();
    let mut ctx = None;
    rest = rest.trim();
    if let Some(r) = rest.strip_prefix("with ") {
        let (w, tail) = match r.find(" ctx ") {
            Some(i) => (&r[..i], r[i..].trim()),
            None => (r, ""),
        };
        for (k, v) in parse_assignments(w, number)? {
            let t = parse_term(&v).map_err(|e| syntax(number, e.to_string()))?;
            bindings.insert(Name::from(k.as_str()), t);
        }
        rest = tail;
    }
    if let Some(r) = rest.strip_prefix("ctx ") {
        let mut parts = std::collections::BTreeMap::new();
        for (k, v) in parse_assignments(r, number)? {
            parts.insert(k, v);
        }
        let term = |k: &str| -> Result<Term, KernelError> {
            let v = parts.get(k).ok_or_else(|| syntax(number, format!("ctx needs `{k}`")))?;
            parse_term(v).map_err(|e| syntax(number, e.to_string()))
        };
        let hole = match term("hole")? {
            Term::Var(h) => h,
            _ => return Err(syntax(number, "hole must be a variable")),
        };
        let rel = match parts.get("rel").map(String::as_str) {
            None => None,
            Some("eq") => Some(Rel::Eq),
            Some("leq") => Some(Rel::Leq),
            Some(other) => return Err(syntax(number, format!("unknown ctx relation `{other}`"))),
        };
        ctx = Some(Context { s: term("s")?, t: term("t")?, hole, u: term("u")?, w: term("w")?, rel });
        rest = "";
    }
    if !rest.is_empty() {
        return Err(syntax(number, format!("unexpected `{rest}`")));
    }
    Ok(Derivation { conclusion, node: Node::Step { rule: rule.to_string(), bindings, ctx, children: vec![] }, line: Some(number) })
}

fn build_tree(lines: &[ScriptLine], pos: &mut usize) -> Result<Derivation, KernelError> {
    let me = &lines[*pos];
    *pos += 1;
    let mut d = me.derivation.clone();
    let mut kids = Vec::new();
    let mut child_indent = None;
    while *pos < lines.len() && lines[*pos].indent > me.indent {
        let ind = lines[*pos].indent;
        match child_indent {
            None => child_indent = Some(ind),
            Some(ci) if ci != ind => return Err(syntax(lines[*pos].number, "inconsistent indentation")),
            _ => {}
        }
        kids.push(build_tree(lines, pos)?);
    }
    match &mut d.node {
        Node::Leaf(_) if !kids.is_empty() => return Err(syntax(me.number, "leaf with children")),
        Node::Step { rule, children, .. } => {
            if rule == "cuts" {
                return expand_cuts(d.conclusion.clone(), kids, me.number);
            }
            *children = kids;
        }
        _ => {}
    }
    Ok(d)
}

/// `cuts` over children `a₁ ⪯ a₂, …, aₖ₋₁ ⪯ aₖ` becomes right-nested `trans`.
fn expand_cuts(conclusion: Identity, mut kids: Vec<Derivation>, line: usize) -> Result<Derivation, KernelError> {
    if kids.is_empty() {
        return Err(syntax(line, "`cuts` needs children"));
    }
    if kids.iter().any(|k| k.conclusion.rel != Rel::Leq) {
        return Err(syntax(line, "`cuts` children must be inequalities"));
    }
    let mut acc = kids.pop().unwrap();
    while let Some(k) = kids.pop() {
        let concl = Identity::leq(k.conclusion.lhs.clone(), acc.conclusion.rhs.clone());
        acc = Derivation { line: Some(line), ..Derivation::step("trans", vec![k, acc], concl) };
    }
    acc.conclusion = conclusion;
    Ok(acc)
}

/// Parses tree lines (`step ...`/`leaf ...`, indentation = depth). Blank
/// lines and `#` comments are skipped; `first_line` numbers the first line.
pub fn parse_derivation(text: &str, first_line: usize) -> Result<Derivation, KernelError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        if code.trim().is_empty() {
            continue;
        }
        let number = first_line + i;
        let indent = code.len() - code.trim_start().len();
        lines.push(ScriptLine { indent, number, derivation: parse_line(code.trim(), number)? });
    }
    if lines.is_empty() {
        return Err(syntax(first_line, "empty derivation"));
    }
    let mut pos = 0;
    let d = build_tree(&lines, &mut pos)?;
    if pos != lines.len() {
        return Err(syntax(lines[pos].number, "more than one root"));
    }
    Ok(d)
}

fn render_subst(s: &Subst) -> String {
    s.iter().map(|(k, v)| format!("{k}:={v}")).collect::<Vec<_>>().join(", ")
}

/// Script text for `d`; parses back to an equivalent derivation.
pub fn render_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    render_into(d, 0, &mut out);
    out
}

fn render_into(d: &Derivation, depth: usize, out: &mut String) {
    out.push_str(&"  ".repeat(depth));
    match &d.node {
        Node::Leaf(i) => out.push_str(&format!("leaf {i}")),
        Node::Step { rule, bindings, ctx, .. } => {
            out.push_str(&format!("step {rule}"));
            if !bindings.is_empty() {
                out.push_str(&format!(" with {}", render_subst(bindings)));
            }
            if let Some(c) = ctx {
                out.push_str(&format!(" ctx s:={}, t:={}, hole:={}, u:={}, w:={}", c.s, c.t, c.hole, c.u, c.w));
                match c.rel {
                    Some(Rel::Eq) => out.push_str(", rel:=eq"),
                    Some(Rel::Leq) => out.push_str(", rel:=leq"),
                    None => {}
                }
            }
        }
    }
    out.push_str(&format!(" :: {}\n", d.conclusion));
    for c in d.children() {
        render_into(c, depth + 1, out);
    }
}

/// Shared handle used by derived rules.
pub type Provenance = Arc<Derivation>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parse_ruleset;
    use crate::term::parse_quasiequation;

    fn id(s: &str) -> Identity {
        parse_identity(s).unwrap()
    }

    fn rs(spec: &str) -> RuleSet {
        parse_ruleset(spec, &BTreeSet::new()).unwrap()
    }

    #[test]
    fn matching_examples() {
        let s = match_identity(&id("a \\/ b = b"), &id("sh x \\/ x = x"), &Subst::new()).unwrap();
        assert_eq!(s[&Name::from("a")], parse_term("sh x").unwrap());
        assert!(match_identity(&id("a \\/ a = a"), &id("x \\/ y = x"), &Subst::new()).is_err());
        let s = match_identity(
            &id("F dia a <= dia F a"),
            &id("F dia F* bot \\/ dia F F* bot = dia F F* bot"),
            &Subst::new(),
        )
        .unwrap();
        assert_eq!(s[&Name::from("a")], parse_term("F* bot").unwrap());
    }

    #[test]
    fn one_node_trees() {
        let q = parse_quasiequation("show x = x;").unwrap();
        let d = Derivation::step("eq-reflex", vec![], id("x = x"));
        check(&d, &q, &rs("EQ")).unwrap();
        let d = Derivation::step("symm", vec![], id("x = x"));
        assert_eq!(check(&d, &q, &rs("EQ")).unwrap_err().class(), "ArityMismatch");
    }

    #[test]
    fn implicit_rewrite_and_expansion() {
        let q = parse_quasiequation("assume sh (a \\/ b) <= c; show sh a \\/ sh b <= c;").unwrap();
        let d = parse_derivation("step sh-join :: sh a \\/ sh b <= c\n  leaf 0 :: sh (a \\/ b) <= c\n", 1).unwrap();
        let set = rs("AIC0");
        let e = check(&d, &q, &set).unwrap();
        let Node::Step { ctx: Some(c), .. } = &e.node else { panic!() };
        assert_eq!(c.u, parse_term("sh (a \\/ b)").unwrap());
        let (flat, base) = to_base(&d, &q, &set).unwrap();
        assert!(!flat.rules_used().contains("indiscern"));
        check(&flat, &q, &base).unwrap();
    }

    #[test]
    fn register_and_inline() {
        let set = rs("AIC0");
        let q = parse_quasiequation("show a \\/ a = a;").unwrap();
        // a ⋎ a = a ⋎ (a ⋏ (a ⋎ a)) = a
        let d = parse_derivation(
            "step eq-trans :: a \\/ a = a\n  step cong-join :: a \\/ a = a \\/ (a /\\ (a \\/ a))\n    step eq-reflex :: a = a\n    step symm :: a = a /\\ (a \\/ a)\n      step meet-absorb :: a /\\ (a \\/ a) = a\n  step join-absorb :: a \\/ (a /\\ (a \\/ a)) = a\n",
            1,
        )
        .unwrap();
        let bigger = register_derived("join-idem", &q, &d, &set).unwrap();
        assert!(register_derived("join-idem", &q, &d, &bigger).is_err());
        let q2 = parse_quasiequation("show sh x \\/ sh x = sh x;").unwrap();
        let use_it = Derivation::step("join-idem", vec![], id("sh x \\/ sh x = sh x"));
        let (flat, _) = to_base(&use_it, &q2, &bigger).unwrap();
        assert_eq!(flat.size(), d.size());
    }

    #[test]
    fn script_round_trip() {
        let text = "step trans with b:=sh x :: x <= dia x\n  leaf 0 :: x <= sh x\n  step cuts :: sh x <= dia x\n    leaf 1 :: sh x <= y\n    leaf 2 :: y <= dia x\n";
        let d = parse_derivation(text, 1).unwrap();
        assert_eq!(d.size(), 5);
        let again = parse_derivation(&render_derivation(&d), 1).unwrap();
        assert_eq!(render_derivation(&again), render_derivation(&d));
    }
}
