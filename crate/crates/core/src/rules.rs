//! The rule database: equational logic, AIC0, the AIC1 additions, the
//! continuity schemas and the AICω axioms.
//!
//! Rules are written with the generic function symbol `F`; per-symbol rules
//! are instantiated for every symbol of the signature. Names containing `F`
//! have it replaced by the symbol (`F*-mono` becomes `G*-mono`); names without
//! it get a `-G` suffix for symbols other than `F` (`iter-G`).

use crate::kernel::Derivation;
use crate::lasso::Lasso;
use crate::lattice::split_top_level;
use crate::semantics::{eval, EvalError, Interpretation};
use crate::term::{parse_identity, Identity, Name, Quasiequation, Term};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
    #[error("unknown ruleset `{0}`")]
    UnknownRuleset(String),
    #[error("bad rule text `{0}`")]
    BadRule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Equational,
    Aic0,
    Aic1,
    Continuity,
    AicwFinitary,
    Derived,
    ContextSchema,
    /// Supplied for soundness testing only; never trusted by the kernel's callers.
    Candidate,
}

impl RuleKind {
    pub fn label(self) -> &'static str {
        match self {
            RuleKind::Equational => "equational",
            RuleKind::Aic0 => "AIC0",
            RuleKind::Aic1 => "AIC1",
            RuleKind::Continuity => "continuity",
            RuleKind::AicwFinitary => "AICw",
            RuleKind::Derived => "derived",
            RuleKind::ContextSchema => "context",
            RuleKind::Candidate => "candidate",
        }
    }
}

/// An inference rule. Premises and conclusion are kept as written; the
/// desugared pattern is what the kernel matches against.
#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<Identity>,
    pub conclusion: Identity,
    pub kind: RuleKind,
    pattern: Quasiequation,
    /// Checked derivation of a `Derived` rule, over the set it was registered in.
    pub provenance: Option<Arc<Derivation>>,
}

impl Rule {
    pub fn new(name: &str, premises: Vec<Identity>, conclusion: Identity, kind: RuleKind) -> Rule {
        let pattern = Quasiequation::new(premises.iter().map(Identity::desugar).collect(), conclusion.desugar());
        Rule { name: name.to_string(), premises, conclusion, kind, pattern, provenance: None }
    }

    /// Parses `p1; p2 |- c` (the `|-` part alone for axioms).
    pub fn parse(name: &str, text: &str, kind: RuleKind) -> Result<Rule, RuleError> {
        let bad = || RuleError::BadRule(text.to_string());
        let (prem, concl) = text.split_once("|-").ok_or_else(bad)?;
        let premises = prem
            .split(';')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(parse_identity)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let conclusion = parse_identity(concl.trim()).map_err(|_| bad())?;
        Ok(Rule::new(name, premises, conclusion, kind))
    }

    pub fn derived(name: &str, q: &Quasiequation, d: Derivation) -> Rule {
        let mut r = Rule::new(name, q.premises.clone(), q.conclusion.clone(), RuleKind::Derived);
        r.provenance = Some(Arc::new(d));
        r
    }

    /// Desugared premises and conclusion.
    pub fn pattern(&self) -> &Quasiequation {
        &self.pattern
    }

    pub fn quasiequation(&self) -> Quasiequation {
        Quasiequation::new(self.premises.clone(), self.conclusion.clone())
    }

    pub fn arity(&self) -> usize {
        self.premises.len()
    }

    pub fn is_context_schema(&self) -> bool {
        self.kind == RuleKind::ContextSchema
    }

    /// A premise-free equality, usable for implicit rewriting in context.
    pub fn is_rewrite(&self) -> bool {
        self.premises.is_empty() && self.conclusion.rel == crate::term::Rel::Eq && !self.is_context_schema()
    }

    fn rename_funcs(&self, map: &BTreeMap<Name, Name>, name: String) -> Rule {
        let mut r = Rule::new(
            &name,
            self.premises.iter().map(|p| p.rename_funcs(map)).collect(),
            self.conclusion.rename_funcs(map),
            self.kind,
        );
        r.provenance = self.provenance.clone();
        r
    }

    fn same_statement(&self, other: &Rule) -> bool {
        self.pattern == other.pattern && self.kind == other.kind
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_context_schema() {
            return write!(f, "{}: s[h:=u] <= t[h:=u]; u = w |- s[h:=w] <= t[h:=w]", self.name);
        }
        let prem: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        if prem.is_empty() {
            write!(f, "{}: |- {}", self.name, self.conclusion)
        } else {
            write!(f, "{}: {} |- {}", self.name, prem.join("; "), self.conclusion)
        }
    }
}

/// The three infinitary sequence schemas of AICω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceSchema {
    /// `⋀ₙ ⊖⊚ⁿa ⪯ b ⟹ ⊖◇a ⪯ b`
    Sup,
    /// `⋀ₙ b ⪯ ⊖⊚ⁿa ⟹ b ⪯ ⊖□a`
    Inf,
    /// `⋀ₙ ⊖⊚ⁿa = ⊖⊚ⁿb ⟹ a = b`
    Ext,
}

impl SequenceSchema {
    pub const ALL: [SequenceSchema; 3] = [SequenceSchema::Sup, SequenceSchema::Inf, SequenceSchema::Ext];

    pub fn name(self) -> &'static str {
        match self {
            SequenceSchema::Sup => "seq-sup",
            SequenceSchema::Inf => "seq-inf",
            SequenceSchema::Ext => "seq-ext",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            SequenceSchema::Sup => "forall n. hd sh^n a <= b |- hd dia a <= b",
            SequenceSchema::Inf => "forall n. b <= hd sh^n a |- b <= hd box a",
            SequenceSchema::Ext => "forall n. hd sh^n a = hd sh^n b |- a = b",
        }
    }
}

/// Decides an infinitary schema instance under `interp` (which binds `a`, `b`).
/// The quantifier over `n` is exact: beyond prefix plus period of the bound
/// lassos no new heads occur.
pub fn check_aicw_infinitary(schema: SequenceSchema, interp: &Interpretation) -> Result<bool, EvalError> {
    let a = Term::var("a");
    let b = Term::var("b");
    let va = eval(&a, interp)?;
    let vb = eval(&b, interp)?;
    let horizon = match schema {
        SequenceSchema::Ext => va.window(&vb),
        _ => va.prefix().len() + va.period().len(),
    };
    let head_at = |t: &Term, n: usize| eval(&Term::head(Term::shift_n(t.clone(), n)), interp);
    let leq = |x: &Lasso, y: &Lasso| x.leq_seq(y).map_err(EvalError::from);
    let mut premise = true;
    for n in 0..horizon {
        let h = head_at(&a, n)?;
        let holds = match schema {
            SequenceSchema::Sup => leq(&h, &vb)?,
            SequenceSchema::Inf => leq(&vb, &h)?,
            SequenceSchema::Ext => h.eq_seq(&head_at(&b, n)?)?,
        };
        if !holds {
            premise = false;
            break;
        }
    }
    if !premise {
        return Ok(true);
    }
    match schema {
        SequenceSchema::Sup => leq(&eval(&Term::head(Term::majorum(a)), interp)?, &vb),
        SequenceSchema::Inf => leq(&vb, &eval(&Term::head(Term::minorum(a)), interp)?),
        SequenceSchema::Ext => Ok(va.eq_seq(&vb)?),
    }
}

/// A flattened, named collection of rules.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub name: String,
    pub includes: Vec<String>,
    rules: Vec<Arc<Rule>>,
    index: HashMap<String, usize>,
    pub schemas: Vec<SequenceSchema>,
}

impl RuleSet {
    pub fn new(name: &str) -> RuleSet {
        RuleSet { name: name.to_string(), ..RuleSet::default() }
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Rule>> {
        self.index.get(name).map(|&i| &self.rules[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Rule>> {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn insert(&mut self, rule: Rule) -> Result<(), RuleError> {
        if self.index.contains_key(&rule.name) {
            return Err(RuleError::DuplicateName(rule.name));
        }
        self.index.insert(rule.name.clone(), self.rules.len());
        self.rules.push(Arc::new(rule));
        Ok(())
    }

    /// Adds every rule of `other`; a name already present must carry the same statement.
    pub fn include(&mut self, other: &RuleSet) -> Result<(), RuleError> {
        for r in &other.rules {
            match self.get(&r.name) {
                Some(existing) if existing.same_statement(r) => {}
                Some(_) => return Err(RuleError::DuplicateName(r.name.clone())),
                None => {
                    self.index.insert(r.name.clone(), self.rules.len());
                    self.rules.push(r.clone());
                }
            }
        }
        for s in &other.schemas {
            if !self.schemas.contains(s) {
                self.schemas.push(*s);
            }
        }
        self.includes.push(other.name.clone());
        Ok(())
    }

    /// The same set without context schemas: derivations checked against it
    /// use congruence steps only.
    pub fn without_contexts(&self) -> RuleSet {
        let mut out = RuleSet::new(&format!("{}-strict", self.name));
        for r in self.rules.iter().filter(|r| !r.is_context_schema()) {
            out.index.insert(r.name.clone(), out.rules.len());
            out.rules.push(r.clone());
        }
        out.schemas = self.schemas.clone();
        out
    }

    pub fn allows_contexts(&self) -> bool {
        self.rules.iter().any(|r| r.is_context_schema())
    }

    pub fn signature(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.extend(r.pattern.func_symbols());
        }
        out
    }

    /// One rule per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&format!("{r}\n"));
        }
        for s in &self.schemas {
            out.push_str(&format!("{}: {}\n", s.name(), s.statement()));
        }
        out
    }
}

type Table = &'static [(&'static str, &'static str)];

const EQ_RULES: Table = &[
    ("eq-reflex", "|- a = a"),
    ("symm", "a = b |- b = a"),
    ("eq-trans", "a = b; b = c |- a = c"),
    ("cong-hd", "a = b |- hd a = hd b"),
    ("cong-sh", "a = b |- sh a = sh b"),
    ("cong-dia", "a = b |- dia a = dia b"),
    ("cong-box", "a = b |- box a = box b"),
    ("cong-join", "a = c; b = d |- a \\/ b = c \\/ d"),
    ("cong-meet", "a = c; b = d |- a /\\ b = c /\\ d"),
];

const EQ_PER_SYMBOL: Table = &[("cong-F", "a = b |- F a = F b"), ("cong-F*", "a = b |- F* a = F* b")];

const AIC0_RULES: Table = &[
    ("bot", "|- bot <= a"),
    ("top", "|- a <= top"),
    ("join-comm", "|- a \\/ b = b \\/ a"),
    ("meet-comm", "|- a /\\ b = b /\\ a"),
    ("join-absorb", "|- a \\/ (a /\\ b) = a"),
    ("meet-absorb", "|- a /\\ (a \\/ b) = a"),
    ("join-assoc", "|- a \\/ (b \\/ c) = (a \\/ b) \\/ c"),
    ("meet-assoc", "|- a /\\ (b /\\ c) = (a /\\ b) /\\ c"),
    ("sh-mono", "a <= b |- sh a <= sh b"),
    ("sh-bot", "|- sh bot <= bot"),
    ("sh-top", "|- top <= sh top"),
    ("sh-join", "|- sh (a \\/ b) = sh a \\/ sh b"),
    ("sh-meet", "|- sh (a /\\ b) = sh a /\\ sh b"),
    ("dia-inflate", "|- a <= dia a"),
    ("box-deflate", "|- box a <= a"),
    ("dia-idem", "|- dia dia a <= dia a"),
    ("box-idem", "|- box a <= box box a"),
    ("dia-mono", "a <= b |- dia a <= dia b"),
    ("box-mono", "a <= b |- box a <= box b"),
    ("sh-dia-comm", "|- sh dia a = dia sh a"),
    ("sh-box-comm", "|- sh box a = box sh a"),
    ("dia-ind", "sh a <= a |- dia a <= a"),
    ("dia-ind-inv", "dia a <= a |- sh a <= a"),
    ("box-coind", "a <= sh a |- a <= box a"),
    ("box-coind-inv", "a <= box a |- a <= sh a"),
];

const AIC0_PER_SYMBOL: Table = &[
    ("F-mono", "a <= b |- F a <= F b"),
    ("F*-mono", "a <= b |- F* a <= F* b"),
    ("FN-comm", "|- sh F a = F sh a"),
    ("FF*-comm", "|- F F* a = F* F a"),
    ("iter", "|- sh F* a = F F* sh a"),
    ("F-ind", "F a <= a |- F* a <= a"),
    ("F-coind", "a <= F a |- a <= F* a"),
];

const AIC1_RULES: Table = &[
    ("reflex", "|- a <= a"),
    ("trans", "a <= b; b <= c |- a <= c"),
    ("antisymm", "a <= b; b <= a |- a = b"),
    ("weakenL", "a = b |- a <= b"),
    ("weakenR", "a = b |- b <= a"),
    ("join-idem", "|- a \\/ a = a"),
    ("meet-idem", "|- a /\\ a = a"),
    ("join-introL", "a <= c; b <= c |- a \\/ b <= c"),
    ("meet-introR", "a <= b; a <= c |- a <= b /\\ c"),
    ("meet-introL", "b <= c |- a /\\ b <= c"),
    ("join-introR", "a <= b |- a <= b \\/ c"),
    ("join-elim", "a \\/ b <= c |- b <= c"),
    ("meet-elim", "a <= b /\\ c |- a <= b"),
    ("dia-introR", "a <= b |- a <= dia b"),
    ("box-introL", "a <= b |- box a <= b"),
    ("dia-elim", "dia a <= b |- a <= b"),
    ("box-elim", "a <= box b |- a <= b"),
    ("dia-introL", "a <= b; sh b <= b |- dia a <= b"),
    ("box-introR", "a <= sh a; a <= b |- a <= box b"),
    ("dia-exp", "|- dia a = a \\/ sh dia a"),
    ("box-exp", "|- box a = a /\\ sh box a"),
    ("dia-desc", "|- sh dia a <= dia a"),
    ("box-asc", "|- box a <= sh box a"),
];

const AIC1_PER_SYMBOL: Table = &[
    ("semi-cont", "|- dia F a <= F dia a"),
    ("semi-cocont", "|- F box a <= box F a"),
    ("asc-iter", "a <= sh a |- F F* a <= sh F* a"),
    ("desc-iter", "sh a <= a |- sh F* a <= F F* a"),
    ("orbit-asc", "a <= F a; a <= sh a |- F* a <= sh F* a"),
    ("orbit-desc", "sh a <= a; F a <= a |- sh F* a <= F* a"),
    ("F*-introL", "a <= b; F b <= b |- F* a <= b"),
    ("F*-introR", "a <= F a; a <= b |- a <= F* b"),
];

/// The context schema shared by every set (see [`RuleSet::without_contexts`]).
pub const INDISCERN: &str = "indiscern";

/// Continuity schemas a function symbol can be flagged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Continuity {
    /// Preserves suprema of ascending chains.
    Omega,
    /// Preserves infima of descending chains.
    OmegaCo,
    /// Preserves countable suprema.
    Countable,
    /// Preserves countable infima.
    CountableCo,
}

impl Continuity {
    pub const ALL: [Continuity; 4] =
        [Continuity::Omega, Continuity::OmegaCo, Continuity::Countable, Continuity::CountableCo];

    pub fn keyword(self) -> &'static str {
        match self {
            Continuity::Omega => "wcont",
            Continuity::OmegaCo => "wcocont",
            Continuity::Countable => "acont",
            Continuity::CountableCo => "acocont",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Continuity> {
        match s {
            "wcont" | "ω-cont" | "omega-cont" => Some(Continuity::Omega),
            "wcocont" | "ω-cocont" | "omega-cocont" => Some(Continuity::OmegaCo),
            "acont" | "ℵ₀-cont" | "ℵ0-cont" | "aleph0-cont" => Some(Continuity::Countable),
            "acocont" | "ℵ₀-cocont" | "ℵ0-cocont" | "aleph0-cocont" => Some(Continuity::CountableCo),
            _ => None,
        }
    }

    fn template(self) -> (&'static str, &'static str) {
        match self {
            Continuity::Omega => ("w-cont", "a <= sh a |- F dia a <= dia F a"),
            Continuity::OmegaCo => ("w-cocont", "sh a <= a |- box F a <= F box a"),
            Continuity::Countable => ("a-cont", "|- F dia a <= dia F a"),
            Continuity::CountableCo => ("a-cocont", "|- box F a <= F box a"),
        }
    }

    /// The semantic condition on a map over a finite lattice.
    pub fn holds_for(self, f: &crate::lattice::MonotoneMap) -> bool {
        match self {
            Continuity::Omega => f.is_omega_continuous(),
            Continuity::OmegaCo => f.is_omega_cocontinuous(),
            Continuity::Countable => f.is_countably_continuous(),
            Continuity::CountableCo => f.is_countably_cocontinuous(),
        }
    }
}

const AICW_RULES: Table = &[
    ("bot", "|- bot <= a"),
    ("top", "|- a <= top"),
    ("join-comm", "|- a \\/ b = b \\/ a"),
    ("meet-comm", "|- a /\\ b = b /\\ a"),
    ("meet-absorb", "|- a /\\ (a \\/ b) = a"),
    ("join-absorb-r", "|- a = a \\/ (a /\\ b)"),
    ("join-assoc", "|- a \\/ (b \\/ c) = (a \\/ b) \\/ c"),
    ("meet-assoc", "|- a /\\ (b /\\ c) = (a /\\ b) /\\ c"),
    ("sh-bot-eq", "|- sh bot = bot"),
    ("sh-top-eq", "|- sh top = top"),
    ("sh-join", "|- sh (a \\/ b) = sh a \\/ sh b"),
    ("sh-meet", "|- sh (a /\\ b) = sh a /\\ sh b"),
    ("sh-dia-comm", "|- sh dia a = dia sh a"),
    ("sh-box-comm", "|- sh box a = box sh a"),
    ("dia-inflate", "|- a <= dia a"),
    ("box-deflate", "|- box a <= a"),
    ("dia-idem-eq", "|- dia dia a = dia a"),
    ("box-idem-eq", "|- box box a = box a"),
    ("dia-ind", "sh a <= a |- dia a <= a"),
    ("dia-ind-inv", "dia a <= a |- sh a <= a"),
    ("box-coind", "a <= sh a |- a <= box a"),
    ("box-coind-inv", "a <= box a |- a <= sh a"),
];

const AICW_PER_SYMBOL: Table = &[
    ("F-mono", "a <= b |- F a <= F b"),
    ("FN-comm", "|- sh F a = F sh a"),
    ("iter", "|- sh F* a = F F* sh a"),
];

const HEAD_RULES: Table = &[
    ("hd-bot", "|- hd bot = bot"),
    ("hd-top", "|- hd top = top"),
    ("hd-meet", "|- hd (a /\\ b) = hd a /\\ hd b"),
    ("hd-join", "|- hd (a \\/ b) = hd a \\/ hd b"),
    ("sh-hd", "|- sh hd a = hd a"),
    ("dia-hd", "|- dia hd a = hd a"),
    ("box-hd", "|- box hd a = hd a"),
    ("hd-hd", "|- hd hd a = hd a"),
];

const HEAD_PER_SYMBOL: Table = &[("hd-F", "|- hd F a = F hd a"), ("hd-F*", "|- hd F* a = hd a")];

fn symbol_name(template: &str, sym: &str) -> String {
    if template.contains('F') {
        template.replace('F', sym)
    } else if sym == "F" {
        template.to_string()
    } else {
        format!("{template}-{sym}")
    }
}

fn from_table(set: &mut RuleSet, table: Table, kind: RuleKind) {
    for (name, text) in table {
        let rule = Rule::parse(name, text, kind).expect("builtin rule table parses");
        set.insert(rule).expect("builtin rule names are unique");
    }
}

fn per_symbol(set: &mut RuleSet, table: Table, kind: RuleKind, sig: &BTreeSet<Name>) {
    for (name, text) in table {
        let rule = Rule::parse(name, text, kind).expect("builtin rule table parses");
        for sym in sig {
            let map = BTreeMap::from([(Name::from("F"), sym.clone())]);
            set.insert(rule.rename_funcs(&map, symbol_name(name, sym))).expect("builtin rule names are unique");
        }
    }
}

fn indiscern_rule() -> Rule {
    let s = Term::var("s");
    let t = Term::var("t");
    let u = Term::var("u");
    let w = Term::var("w");
    Rule::new(
        INDISCERN,
        vec![Identity::leq(s.clone(), t.clone()), Identity::eq(u, w)],
        Identity::leq(s, t),
        RuleKind::ContextSchema,
    )
}

fn default_signature(sig: &BTreeSet<Name>) -> BTreeSet<Name> {
    if sig.is_empty() {
        BTreeSet::from([Name::from("F")])
    } else {
        sig.clone()
    }
}

/// Equational logic: reflexivity, symmetry, transitivity, one congruence
/// rule per operation, and the context schema.
pub fn eq_rules(sig: &BTreeSet<Name>) -> RuleSet {
    let sig = default_signature(sig);
    let mut set = RuleSet::new("EQ");
    from_table(&mut set, EQ_RULES, RuleKind::Equational);
    per_symbol(&mut set, EQ_PER_SYMBOL, RuleKind::Equational, &sig);
    set.insert(indiscern_rule()).unwrap();
    set
}

/// The AIC0 axioms alone, without the equational layer.
pub fn aic0_axioms(sig: &BTreeSet<Name>) -> RuleSet {
    let sig = default_signature(sig);
    let mut set = RuleSet::new("AIC0-axioms");
    from_table(&mut set, AIC0_RULES, RuleKind::Aic0);
    per_symbol(&mut set, AIC0_PER_SYMBOL, RuleKind::Aic0, &sig);
    set
}

/// The rules AIC1 adds to AIC0 (the context schema lives in the equational layer).
pub fn aic1_additions(sig: &BTreeSet<Name>) -> RuleSet {
    let sig = default_signature(sig);
    let mut set = RuleSet::new("AIC1-additions");
    from_table(&mut set, AIC1_RULES, RuleKind::Aic1);
    per_symbol(&mut set, AIC1_PER_SYMBOL, RuleKind::Aic1, &sig);
    set
}

pub fn continuity_rules(kind: Continuity, sym: &str) -> RuleSet {
    let (name, text) = kind.template();
    let mut set = RuleSet::new(&format!("{}({sym})", kind.keyword()));
    let rule = Rule::parse(name, text, RuleKind::Continuity).unwrap();
    let map = BTreeMap::from([(Name::from("F"), Name::from(sym))]);
    set.insert(rule.rename_funcs(&map, symbol_name(name, sym))).unwrap();
    set
}

/// The head axioms of AICω, usable on their own alongside AIC0/AIC1.
pub fn head_axioms(sig: &BTreeSet<Name>) -> RuleSet {
    let sig = default_signature(sig);
    let mut set = RuleSet::new("HD");
    from_table(&mut set, HEAD_RULES, RuleKind::AicwFinitary);
    per_symbol(&mut set, HEAD_PER_SYMBOL, RuleKind::AicwFinitary, &sig);
    set
}

/// The finitary AICω axioms (head rows included) plus the three sequence schemas.
pub fn aicw_axioms(sig: &BTreeSet<Name>) -> RuleSet {
    let sig = default_signature(sig);
    let mut set = RuleSet::new("AICw-axioms");
    from_table(&mut set, AICW_RULES, RuleKind::AicwFinitary);
    per_symbol(&mut set, AICW_PER_SYMBOL, RuleKind::AicwFinitary, &sig);
    set.include(&head_axioms(&sig)).unwrap();
    set.schemas = SequenceSchema::ALL.to_vec();
    set
}

fn layered(name: &str, parts: &[RuleSet]) -> RuleSet {
    let mut set = RuleSet::new(name);
    for p in parts {
        set.include(p).expect("builtin layers are disjoint");
    }
    set
}

/// `EQ`, `AIC0`, `AIC1`, `AICw` and `HD` over the given signature (default `{F}`).
pub fn builtin_rulesets(sig: &BTreeSet<Name>) -> BTreeMap<String, RuleSet> {
    let eq = eq_rules(sig);
    let aic0 = layered("AIC0", &[eq.clone(), aic0_axioms(sig)]);
    let aic1 = layered("AIC1", &[aic0.clone(), aic1_additions(sig)]);
    let aicw = layered("AICw", &[eq.clone(), aicw_axioms(sig)]);
    let hd = head_axioms(sig);
    BTreeMap::from([
        ("EQ".to_string(), eq),
        ("AIC0".to_string(), aic0),
        ("AIC1".to_string(), aic1),
        ("AICw".to_string(), aicw),
        ("HD".to_string(), hd),
    ])
}

/// Symbols named in continuity atoms of a ruleset expression.
fn spec_symbols(spec: &str) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for atom in split_top_level(spec, '+') {
        if let Some((_, arg)) = atom.trim().split_once('(') {
            out.insert(Name::from(arg.trim_end_matches(')').trim()));
        }
    }
    out
}

/// Builds a set from an expression such as `AIC1+wcont(F)+acocont(G)`.
/// Atoms: `EQ`, `AIC0`, `AIC1`, `AICw` (or `AICω`), `HD`, and
/// `wcont`/`wcocont`/`acont`/`acocont` applied to a symbol. The signature is
/// `sig` together with the symbols of continuity atoms, or `{F}` if both are empty.
pub fn parse_ruleset(spec: &str, sig: &BTreeSet<Name>) -> Result<RuleSet, RuleError> {
    let mut sig: BTreeSet<Name> = sig.union(&spec_symbols(spec)).cloned().collect();
    if sig.is_empty() {
        sig.insert("F".into());
    }
    let builtins = builtin_rulesets(&sig);
    let mut set = RuleSet::new(spec.trim());
    for atom in split_top_level(spec, '+') {
        let atom = atom.trim();
        let part = if let Some((kw, arg)) = atom.split_once('(') {
            let sym = arg.strip_suffix(')').map(str::trim).filter(|s| !s.is_empty());
            match (Continuity::from_keyword(kw.trim()), sym) {
                (Some(c), Some(sym)) => continuity_rules(c, sym),
                _ => return Err(RuleError::UnknownRuleset(atom.to_string())),
            }
        } else {
            let key = if atom == "AICω" { "AICw" } else { atom };
            builtins.get(key).cloned().ok_or_else(|| RuleError::UnknownRuleset(atom.to_string()))?
        };
        set.include(&part)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;
    use crate::semantics::Model;

    fn sig() -> BTreeSet<Name> {
        BTreeSet::new()
    }

    #[test]
    fn aic0_has_iter_and_no_head() {
        let b = builtin_rulesets(&sig());
        let aic0 = &b["AIC0"];
        assert_eq!(aic0.get("iter").unwrap().to_string(), "iter: |- sh F* a = F F* sh a");
        for r in aic0.iter().filter(|r| r.kind != RuleKind::Equational && !r.is_context_schema()) {
            assert!(!format!("{r}").contains("hd"), "{r}");
        }
        assert_eq!(aic0_axioms(&sig()).len(), 32);
        assert_eq!(aic1_additions(&sig()).len(), 31);
    }

    #[test]
    fn aic1_has_dia_exp() {
        let b = builtin_rulesets(&sig());
        let r = b["AIC1"].get("dia-exp").unwrap();
        assert_eq!(r.conclusion, parse_identity("dia a = a \\/ sh dia a").unwrap());
        assert!(b["AIC1"].contains("F-mono"));
    }

    #[test]
    fn per_symbol_names() {
        let sig = BTreeSet::from([Name::from("F"), Name::from("G")]);
        let set = aic0_axioms(&sig);
        assert!(set.contains("G*-mono") && set.contains("GG*-comm") && set.contains("iter-G"));
        let c = parse_ruleset("AIC1+wcont(G)", &BTreeSet::new()).unwrap();
        assert!(c.contains("w-cont-G") && c.contains("G-mono") && !c.contains("F-mono"));
    }

    #[test]
    fn ruleset_expressions() {
        let s = parse_ruleset("AIC1+wcont(F)+acont(F)", &sig()).unwrap();
        assert!(s.contains("w-cont") && s.contains("a-cont") && s.contains("dia-exp"));
        assert!(parse_ruleset("AIC2", &sig()).is_err());
        assert!(parse_ruleset("AIC0+HD", &sig()).unwrap().contains("hd-hd"));
        assert!(parse_ruleset("AICω", &sig()).unwrap().schemas.len() == 3);
    }

    #[test]
    fn infinitary_examples() {
        let c3 = build_lattice("C3").unwrap();
        let a = Lasso::new(&c3, vec![], vec![0, 2]).unwrap();
        let i = Interpretation::new(Model::new(c3.clone())).with_var("a", a.clone()).with_var("b", Lasso::flat(&c3, 2));
        assert!(check_aicw_infinitary(SequenceSchema::Sup, &i).unwrap());
        let i = i.with_var("b", Lasso::flat(&c3, 1));
        assert!(check_aicw_infinitary(SequenceSchema::Sup, &i).unwrap());
        let i = i.with_var("b", a);
        assert!(check_aicw_infinitary(SequenceSchema::Ext, &i).unwrap());
    }
}
