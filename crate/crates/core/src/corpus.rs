//! Proof documents, the built-in proof corpus and the k-induction generator.
//!
//! A proof document is line oriented:
//!
//! ```text
//! @name tkp-fp
//! @rules AIC1+wcont(F)
//! @uses tkp-pre-fp tkp-post-fp
//! @group fixed points
//! assume a <= sh a
//! assume a <= F a
//! show F dia F* a = dia F* a
//! step antisymm :: F dia F* a = dia F* a
//!   ...
//! ```
//!
//! `@lemma <name>` ... `@end` blocks (same `assume`/`show`/tree layout) are
//! checked and registered as derived rules before the main derivation. Rules
//! named in `@uses` are other documents of the corpus, registered in
//! dependency order; a used name the rule set already provides must carry the
//! same statement.

use crate::kernel::{check, parse_derivation, register_derived, Derivation, KernelError};
use crate::rules::{parse_ruleset, RuleError, RuleSet};
use crate::term::{parse_identity, Name, Quasiequation, Term};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use thiserror::Error;

mod embedded {
    include!(concat!(env!("OUT_DIR"), "/embedded_proofs.rs"));
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("{source_name}:{line}: {msg}")]
    Parse { source_name: String, line: usize, msg: String },
    #[error("unknown proof `{0}`")]
    UnknownProof(String),
    #[error("dependency cycle through `{0}`")]
    Cycle(String),
    #[error("`{0}` is provided by the rule set with a different statement")]
    StatementMismatch(String),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("{proof}: {error}")]
    Kernel { proof: String, error: KernelError },
    #[error("io: {0}")]
    Io(String),
}

impl CorpusError {
    /// Short error class name; kernel errors report the kernel's class and
    /// script parse failures report `Syntax`.
    pub fn class(&self) -> &'static str {
        match self {
            CorpusError::Parse { .. } => "Syntax",
            CorpusError::UnknownProof(_) => "UnknownProof",
            CorpusError::Cycle(_) => "Cycle",
            CorpusError::StatementMismatch(_) => "StatementMismatch",
            CorpusError::Rules(_) => "Rules",
            CorpusError::Kernel { error, .. } => error.kind.class(),
            CorpusError::Io(_) => "Io",
        }
    }
}

/// A named quasiequation with its derivation.
#[derive(Clone, Debug)]
pub struct Lemma {
    pub name: String,
    pub quasieq: Quasiequation,
    pub derivation: Derivation,
}

#[derive(Clone, Debug)]
pub struct NamedProof {
    pub name: String,
    pub quasieq: Quasiequation,
    /// Rule set expression, e.g. `AIC1+wcont(F)`.
    pub ruleset: String,
    pub uses: Vec<String>,
    pub group: String,
    pub lemmas: Vec<Lemma>,
    pub derivation: Derivation,
    /// The document text.
    pub script: String,
}

impl NamedProof {
    pub fn func_symbols(&self) -> BTreeSet<Name> {
        let mut out = self.quasieq.func_symbols();
        for l in &self.lemmas {
            out.extend(l.quasieq.func_symbols());
        }
        out
    }

    /// Total node count over the main derivation and all lemmas.
    pub fn size(&self) -> usize {
        self.derivation.size() + self.lemmas.iter().map(|l| l.derivation.size()).sum::<usize>()
    }
}

struct Block {
    premises: Vec<crate::term::Identity>,
    conclusion: Option<crate::term::Identity>,
    tree: String,
    tree_start: Option<usize>,
}

impl Block {
    fn new() -> Block {
        Block { premises: Vec::new(), conclusion: None, tree: String::new(), tree_start: None }
    }

    fn finish(self, err: &dyn Fn(usize, String) -> CorpusError, line: usize) -> Result<(Quasiequation, Derivation), CorpusError> {
        let conclusion = self.conclusion.ok_or_else(|| err(line, "missing `show`".into()))?;
        let start = self.tree_start.ok_or_else(|| err(line, "missing derivation".into()))?;
        let d = parse_derivation(&self.tree, start).map_err(|e| err(e.line.unwrap_or(start), e.kind.to_string()))?;
        Ok((Quasiequation::new(self.premises, conclusion), d))
    }
}

/// Parses a proof document. `source_name` labels diagnostics.
pub fn parse_document(text: &str, source_name: &str) -> Result<NamedProof, CorpusError> {
    let err = |line: usize, msg: String| CorpusError::Parse { source_name: source_name.to_string(), line, msg };
    let mut name = None;
    let mut ruleset = None;
    let mut uses = Vec::new();
    let mut group = String::new();
    let mut lemmas = Vec::new();
    let mut open_lemma: Option<(String, Block, usize)> = None;
    let mut main = Block::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let code = raw.split('#').next().unwrap_or("");
        let trimmed = code.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(directive) = trimmed.strip_prefix('@') {
            let (key, value) = directive.split_once(char::is_whitespace).unwrap_or((directive, ""));
            let value = value.trim();
            match key {
                "name" => name = Some(value.to_string()),
                "rules" => ruleset = Some(value.to_string()),
                "uses" => uses.extend(value.split_whitespace().map(str::to_string)),
                "group" => group = value.to_string(),
                "lemma" => {
                    if open_lemma.is_some() {
                        return Err(err(number, "nested `@lemma`".into()));
                    }
                    if value.is_empty() {
                        return Err(err(number, "`@lemma` needs a name".into()));
                    }
                    open_lemma = Some((value.to_string(), Block::new(), number));
                }
                "end" => {
                    let (lname, block, _) = open_lemma.take().ok_or_else(|| err(number, "`@end` without `@lemma`".into()))?;
                    let (quasieq, derivation) = block.finish(&err, number)?;
                    lemmas.push(Lemma { name: lname, quasieq, derivation });
                }
                other => return Err(err(number, format!("unknown directive `@{other}`"))),
            }
            continue;
        }
        let block = match &mut open_lemma {
            Some((_, b, _)) => b,
            None => &mut main,
        };
        let stmt = trimmed.trim_end_matches(';');
        if block.tree_start.is_none() {
            if let Some(rest) = stmt.strip_prefix("assume ") {
                if block.conclusion.is_some() {
                    return Err(err(number, "`assume` after `show`".into()));
                }
                block.premises.push(parse_identity(rest).map_err(|e| err(number, e.to_string()))?);
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("show ") {
                if block.conclusion.is_some() {
                    return Err(err(number, "duplicate `show`".into()));
                }
                block.conclusion = Some(parse_identity(rest).map_err(|e| err(number, e.to_string()))?);
                continue;
            }
            block.tree_start = Some(number);
        }
        // Keep line numbering aligned with the document.
        let offset = block.tree_start.unwrap();
        while block.tree.lines().count() < number - offset {
            block.tree.push('\n');
        }
        block.tree.push_str(code);
        block.tree.push('\n');
    }
    if let Some((lname, _, line)) = open_lemma {
        return Err(err(line, format!("unterminated `@lemma {lname}`")));
    }
    let (quasieq, derivation) = main.finish(&err, text.lines().count())?;
    Ok(NamedProof {
        name: name.ok_or_else(|| err(1, "missing `@name`".into()))?,
        quasieq,
        ruleset: ruleset.ok_or_else(|| err(1, "missing `@rules`".into()))?,
        uses,
        group,
        lemmas,
        derivation,
        script: text.to_string(),
    })
}

/// Parses a user rule file: each `rule <name>: <id>; ...; |- <id>` header is
/// followed by the tree lines of the rule's derivation.
pub fn parse_rule_file(text: &str, source_name: &str) -> Result<Vec<Lemma>, CorpusError> {
    let err = |line: usize, msg: String| CorpusError::Parse { source_name: source_name.to_string(), line, msg };
    let mut rules = Vec::new();
    let mut open: Option<(String, Block, usize)> = None;
    let close = |open: Option<(String, Block, usize)>, rules: &mut Vec<Lemma>| -> Result<(), CorpusError> {
        if let Some((name, block, line)) = open {
            if block.tree_start.is_none() {
                return Err(err(line, format!("rule `{name}` has no derivation")));
            }
            let (quasieq, derivation) = block.finish(&err, line)?;
            rules.push(Lemma { name, quasieq, derivation });
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let code = raw.split('#').next().unwrap_or("");
        let trimmed = code.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(header) = trimmed.strip_prefix("rule ") {
            close(open.take(), &mut rules)?;
            let (name, body) = header.split_once(':').ok_or_else(|| err(number, "expected `rule <name>: ...`".into()))?;
            let (premises, conclusion) = body.split_once("|-").ok_or_else(|| err(number, "missing `|-`".into()))?;
            let mut block = Block::new();
            for p in premises.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                block.premises.push(parse_identity(p).map_err(|e| err(number, e.to_string()))?);
            }
            block.conclusion = Some(parse_identity(conclusion.trim()).map_err(|e| err(number, e.to_string()))?);
            open = Some((name.trim().to_string(), block, number));
            continue;
        }
        let (_, block, _) = open.as_mut().ok_or_else(|| err(number, "derivation line before any `rule` header".into()))?;
        let offset = *block.tree_start.get_or_insert(number);
        while block.tree.lines().count() < number - offset {
            block.tree.push('\n');
        }
        block.tree.push_str(code);
        block.tree.push('\n');
    }
    close(open, &mut rules)?;
    Ok(rules)
}

/// A collection of proof documents addressable by name.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    proofs: Vec<NamedProof>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(proofs: Vec<NamedProof>) -> Result<Corpus, CorpusError> {
        let mut index = HashMap::new();
        for (i, p) in proofs.iter().enumerate() {
            if index.insert(p.name.clone(), i).is_some() {
                return Err(CorpusError::Rules(RuleError::DuplicateName(p.name.clone())));
            }
        }
        Ok(Corpus { proofs, index })
    }

    /// The documents shipped in the `proofs/` directory, embedded at build time.
    pub fn builtin() -> Result<Corpus, CorpusError> {
        let proofs = embedded::EMBEDDED
            .iter()
            .map(|(file, text)| parse_document(text, file))
            .collect::<Result<Vec<_>, _>>()?;
        Corpus::new(proofs)
    }

    /// All `*.proof` files of a directory.
    pub fn from_dir(dir: &Path) -> Result<Corpus, CorpusError> {
        let io = |e: std::io::Error| CorpusError::Io(e.to_string());
        let mut files: Vec<_> = std::fs::read_dir(dir).map_err(io)?.filter_map(Result::ok).map(|e| e.path()).collect();
        files.retain(|p| p.extension().is_some_and(|e| e == "proof"));
        files.sort();
        let mut proofs = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(io)?;
            proofs.push(parse_document(&text, &f.display().to_string())?);
        }
        Corpus::new(proofs)
    }

    pub fn proofs(&self) -> &[NamedProof] {
        &self.proofs
    }

    pub fn get(&self, name: &str) -> Option<&NamedProof> {
        self.index.get(name).map(|&i| &self.proofs[i])
    }

    pub fn len(&self) -> usize {
        self.proofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proofs.is_empty()
    }

    /// Transitive `uses` of `roots`, dependencies first.
    fn dependency_order(&self, roots: &[String]) -> Result<Vec<&NamedProof>, CorpusError> {
        fn visit<'a>(
            c: &'a Corpus,
            name: &str,
            state: &mut HashMap<String, bool>,
            out: &mut Vec<&'a NamedProof>,
        ) -> Result<(), CorpusError> {
            match state.get(name) {
                Some(true) => return Ok(()),
                Some(false) => return Err(CorpusError::Cycle(name.to_string())),
                None => {}
            }
            let p = c.get(name).ok_or_else(|| CorpusError::UnknownProof(name.to_string()))?;
            state.insert(name.to_string(), false);
            for u in &p.uses {
                visit(c, u, state, out)?;
            }
            state.insert(name.to_string(), true);
            out.push(p);
            Ok(())
        }
        let mut state = HashMap::new();
        let mut out = Vec::new();
        for r in roots {
            visit(self, r, &mut state, &mut out)?;
        }
        Ok(out)
    }

    /// The rule set a proof is checked against: its declared set (or
    /// `override_spec`), then its dependencies and lemmas as derived rules.
    pub fn ruleset_for(&self, p: &NamedProof, override_spec: Option<&str>) -> Result<RuleSet, CorpusError> {
        self.ruleset_with(p, override_spec, &[])
    }

    /// As [`Corpus::ruleset_for`], with `user_rules` checked and registered
    /// after the dependencies.
    pub fn ruleset_with(&self, p: &NamedProof, override_spec: Option<&str>, user_rules: &[Lemma]) -> Result<RuleSet, CorpusError> {
        let deps = self.dependency_order(&p.uses)?;
        let mut sig = p.func_symbols();
        for d in &deps {
            sig.extend(d.func_symbols());
        }
        for r in user_rules {
            sig.extend(r.quasieq.func_symbols());
        }
        let mut rules = parse_ruleset(override_spec.unwrap_or(&p.ruleset), &sig)?;
        for d in deps {
            rules = register_lemmas(rules, &d.lemmas, &d.name)?;
            rules = register_one(rules, &d.name, &d.quasieq, &d.derivation)?;
        }
        rules = register_user_rules(rules, user_rules)?;
        register_lemmas(rules, &p.lemmas, &p.name)
    }

    /// Checks one proof; returns the elaborated main derivation.
    pub fn check_proof(&self, p: &NamedProof, override_spec: Option<&str>) -> Result<Derivation, CorpusError> {
        self.check_proof_with(p, override_spec, &[])
    }

    pub fn check_proof_with(&self, p: &NamedProof, override_spec: Option<&str>, user_rules: &[Lemma]) -> Result<Derivation, CorpusError> {
        let rules = self.ruleset_with(p, override_spec, user_rules)?;
        check(&p.derivation, &p.quasieq, &rules).map_err(|error| CorpusError::Kernel { proof: p.name.clone(), error })
    }

    pub fn check(&self, name: &str) -> Result<Derivation, CorpusError> {
        let p = self.get(name).ok_or_else(|| CorpusError::UnknownProof(name.to_string()))?;
        self.check_proof(p, None)
    }

    /// Checks every proof, in parallel; results in corpus order.
    pub fn check_all(&self) -> Vec<(String, Result<(), CorpusError>)> {
        self.proofs.par_iter().map(|p| (p.name.clone(), self.check_proof(p, None).map(|_| ()))).collect()
    }
}

/// Checks each user rule's derivation against `rules` (extended by the
/// earlier user rules) and registers it as a derived rule.
pub fn register_user_rules(rules: RuleSet, user_rules: &[Lemma]) -> Result<RuleSet, CorpusError> {
    register_lemmas(rules, user_rules, "user rules")
}

fn register_one(rules: RuleSet, name: &str, q: &Quasiequation, d: &Derivation) -> Result<RuleSet, CorpusError> {
    if let Some(existing) = rules.get(name) {
        let same = existing.premises.len() == q.premises.len()
            && existing.pattern().conclusion == q.conclusion.desugar()
            && existing.pattern().premises.iter().zip(&q.premises).all(|(a, b)| *a == b.desugar());
        return if same { Ok(rules) } else { Err(CorpusError::StatementMismatch(name.to_string())) };
    }
    register_derived(name, q, d, &rules).map_err(|error| CorpusError::Kernel { proof: name.to_string(), error })
}

fn register_lemmas(mut rules: RuleSet, lemmas: &[Lemma], owner: &str) -> Result<RuleSet, CorpusError> {
    for l in lemmas {
        rules = register_one(rules, &l.name, &l.quasieq, &l.derivation).map_err(|e| match e {
            CorpusError::Kernel { error, .. } => CorpusError::Kernel { proof: format!("{owner}/{}", l.name), error },
            other => other,
        })?;
    }
    Ok(rules)
}

/// `Φ⁰b = b`, `Φᵏ⁺¹b = F Φᵏb ⋏ b`.
pub fn gen_kind_term(k: usize, b: &Term, f: &str) -> Term {
    (0..k).fold(b.clone(), |acc, _| Term::meet(Term::apply(f, acc), b.clone()))
}

/// Document text of the k-induction rule
/// `F Φᵏb ⪯ b, ⊚b ⪯ b ⟹ ◇F*⊥ ⪯ b`, built from per-level lemmas so that its
/// size is linear in `k`.
pub fn kind_script(k: usize) -> String {
    let b = Term::var("b");
    let phi = |j: usize| gen_kind_term(j, &b, "F").to_string();
    let fphi = |j: usize| Term::apply("F", gen_kind_term(j, &b, "F")).to_string();
    let mut s = format!(
        "# Latticed {k}-induction, generated.\n@name k-ind-{k}\n@rules AIC1\n@uses park\n@group k-induction\n"
    );
    for j in 0..k {
        s.push_str(&format!("\n@lemma kind-desc-{j}\nshow {} <= {}\n", phi(j + 1), phi(j)));
        if j == 0 {
            s.push_str(&format!("step meet-introL :: {} <= b\n  step reflex :: b <= b\n", phi(1)));
        } else {
            s.push_str(&format!("step meet-introR :: {} <= {}\n", phi(j + 1), phi(j)));
            s.push_str(&format!("  step meet-comm :: {} /\\ b <= {}\n", fphi(j), fphi(j - 1)));
            s.push_str(&format!("    step meet-introL :: b /\\ {} <= {}\n", fphi(j), fphi(j - 1)));
            s.push_str(&format!("      step F-mono :: {} <= {}\n", fphi(j), fphi(j - 1)));
            s.push_str(&format!("        step kind-desc-{} :: {} <= {}\n", j - 1, phi(j), phi(j - 1)));
            s.push_str(&format!("  step meet-introL :: {} <= b\n    step reflex :: b <= b\n", phi(j + 1)));
        }
        s.push_str("@end\n");
    }
    for j in 1..=k {
        s.push_str(&format!("\n@lemma kind-asc-{j}\nassume sh b <= b\nshow sh {} <= {}\n", paren(&phi(j)), phi(j)));
        let inner = fphi(j - 1);
        s.push_str(&format!("step sh-meet :: sh ({inner} /\\ b) <= {}\n", phi(j)));
        s.push_str(&format!("  step meet-introR :: sh {inner} /\\ sh b <= {}\n", phi(j)));
        s.push_str(&format!("    step meet-comm :: sh {inner} /\\ sh b <= {inner}\n"));
        s.push_str(&format!("      step meet-introL :: sh b /\\ sh {inner} <= {inner}\n"));
        s.push_str(&format!("        step FN-comm :: sh {inner} <= {inner}\n"));
        let shifted = Term::apply("F", Term::shift(gen_kind_term(j - 1, &b, "F")));
        s.push_str(&format!("          step F-mono :: {shifted} <= {inner}\n"));
        if j == 1 {
            s.push_str("            leaf 0 :: sh b <= b\n");
        } else {
            s.push_str(&format!(
                "            step kind-asc-{} :: sh {} <= {}\n              leaf 0 :: sh b <= b\n",
                j - 1,
                paren(&phi(j - 1)),
                phi(j - 1)
            ));
        }
        s.push_str(&format!("    step meet-introL :: sh {inner} /\\ sh b <= b\n      leaf 0 :: sh b <= b\n"));
        s.push_str("@end\n");
    }
    if k >= 1 {
        s.push_str(&format!("\n@lemma kind-park-{k}\nassume {} <= b\nshow {} <= {}\n", fphi(k), fphi(k), phi(k)));
        s.push_str(&format!("step meet-introR :: {} <= {}\n", fphi(k), phi(k)));
        s.push_str(&format!("  step F-mono :: {} <= {}\n", fphi(k), fphi(k - 1)));
        s.push_str(&format!("    step kind-desc-{} :: {} <= {}\n", k - 1, phi(k), phi(k - 1)));
        s.push_str(&format!("  leaf 0 :: {} <= b\n@end\n", fphi(k)));
    }
    s.push_str(&format!("\nassume {} <= b\nassume sh b <= b\nshow dia F* bot <= b\n", fphi(k)));
    if k == 0 {
        s.push_str("step park :: dia F* bot <= b\n  leaf 0 :: F b <= b\n  leaf 1 :: sh b <= b\n");
    } else {
        s.push_str("step trans :: dia F* bot <= b\n");
        s.push_str(&format!("  step park :: dia F* bot <= {}\n", phi(k)));
        s.push_str(&format!("    step kind-park-{k} :: {} <= {}\n", fphi(k), phi(k)));
        s.push_str(&format!("      leaf 0 :: {} <= b\n", fphi(k)));
        s.push_str(&format!("    step kind-asc-{k} :: sh {} <= {}\n", paren(&phi(k)), phi(k)));
        s.push_str("      leaf 1 :: sh b <= b\n");
        s.push_str(&format!("  step meet-introL :: {} <= b\n    step reflex :: b <= b\n", phi(k)));
    }
    s
}

fn paren(t: &str) -> String {
    if t.contains(' ') {
        format!("({t})")
    } else {
        t.to_string()
    }
}

/// Generates and kernel-checks the k-induction proof against `corpus`.
pub fn gen_kind_proof(k: usize, corpus: &Corpus) -> Result<NamedProof, CorpusError> {
    let p = parse_document(&kind_script(k), &format!("k-ind-{k}"))?;
    corpus.check_proof(&p, None)?;
    Ok(p)
}
