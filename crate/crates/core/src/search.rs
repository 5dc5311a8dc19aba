//! Randomized finite-model search: counterexamples to quasiequations,
//! soundness fuzzing of rule sets and fixed-point cross-checks.
//!
//! Every trial draws its own generator from the configured seed and the trial
//! index, so results do not depend on how trials are scheduled across threads.
//! The search never claims validity: a run either yields a counterexample or
//! reports that none was found.

use crate::discrete::flatness_quasieq;
use crate::lasso::Lasso;
use crate::lattice::{catalogue, Elem, FiniteLattice, MonotoneMap};
use crate::rules::{check_aicw_infinitary, continuity_rules, Continuity, Rule, RuleSet, SequenceSchema};
use crate::semantics::{eval, failing_premise, satisfies_identity, satisfies_quasieq, EvalError, Interpretation, Model};
use crate::term::{Identity, Name, Quasiequation, Rel, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 0xA1C0_5EED;

/// Trials are run in chunks of this size; a chunk containing a violation ends the run.
const CHUNK: usize = 512;

/// Attempts at drawing a map that passes the continuity filter before
/// falling back to the identity map (which passes every filter).
const FILTER_ATTEMPTS: usize = 64;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("rule `{rule}` is violated:\n{counterexample}")]
    SoundnessViolation { rule: String, counterexample: Box<Counterexample> },
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub lattices: Vec<Arc<FiniteLattice>>,
    pub trials: usize,
    /// Largest sampled prefix length (may be 0).
    pub max_prefix: usize,
    /// Largest sampled period length (at least 1).
    pub max_period: usize,
    pub seed: u64,
    /// Only maps satisfying these semantic conditions are sampled for the named symbols.
    pub continuity: Vec<(Continuity, Name)>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            lattices: catalogue(),
            trials: 1000,
            max_prefix: 3,
            max_period: 4,
            seed: DEFAULT_SEED,
            continuity: Vec::new(),
        }
    }
}

impl SearchConfig {
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_lattices(mut self, lattices: Vec<Arc<FiniteLattice>>) -> Self {
        self.lattices = lattices;
        self
    }

    pub fn with_caps(mut self, max_prefix: usize, max_period: usize) -> Self {
        self.max_prefix = max_prefix;
        self.max_period = max_period;
        self
    }

    pub fn with_continuity(mut self, kind: Continuity, f: &str) -> Self {
        self.continuity.push((kind, f.into()));
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.trials == 0 {
            return Err(SearchError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.max_period == 0 {
            return Err(SearchError::InvalidConfig("period cap must be at least 1".into()));
        }
        if self.lattices.is_empty() {
            return Err(SearchError::InvalidConfig("empty lattice pool".into()));
        }
        Ok(())
    }

    /// The generator for one trial: the configured seed, stream = trial index.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    fn filters_for<'a>(&'a self, f: &'a str) -> impl Iterator<Item = Continuity> + 'a {
        self.continuity.iter().filter(move |(_, g)| &**g == f).map(|(c, _)| *c)
    }

    /// Whether every flagged symbol of `model` meets its continuity conditions.
    pub fn accepts(&self, model: &Model) -> bool {
        self.continuity
            .iter()
            .all(|(c, f)| model.funcs.get(f).is_none_or(|m| c.holds_for(m)))
    }
}

fn sample_map(cfg: &SearchConfig, lattice: &Arc<FiniteLattice>, f: &str, rng: &mut ChaCha8Rng) -> MonotoneMap {
    for _ in 0..FILTER_ATTEMPTS {
        let m = MonotoneMap::random(lattice, rng);
        if cfg.filters_for(f).all(|c| c.holds_for(&m)) {
            return m;
        }
    }
    MonotoneMap::identity(lattice)
}

/// A random lasso: uniform, ascending, descending or flat.
pub fn sample_lasso(cfg: &SearchConfig, lattice: &Arc<FiniteLattice>, rng: &mut impl Rng) -> Lasso {
    let n = lattice.size();
    let prefix_len = rng.gen_range(0..=cfg.max_prefix);
    let period_len = rng.gen_range(1..=cfg.max_period);
    let mut draw = |len: usize| -> Vec<Elem> { (0..len).map(|_| rng.gen_range(0..n)).collect() };
    let (prefix, period) = match draw(1)[0] % 5 {
        0 | 1 => (draw(prefix_len), draw(period_len)),
        2 | 3 => {
            let raw = draw(prefix_len + 1);
            let ascending = raw[0] % 2 == 0;
            let mut acc = raw[0];
            let chain: Vec<Elem> = raw
                .iter()
                .map(|&x| {
                    acc = if ascending { lattice.join(acc, x) } else { lattice.meet(acc, x) };
                    acc
                })
                .collect();
            (chain[..prefix_len].to_vec(), vec![chain[prefix_len]])
        }
        _ => (Vec::new(), draw(1)),
    };
    Lasso::new(lattice, prefix, period).expect("sampled elements are in range")
}

/// Interpretation for trial `trial`: lattice from the pool, a monotone map per
/// symbol (respecting the continuity filter) and a lasso per variable. Later
/// variables are sometimes tied to earlier ones (equal, or above/below) so
/// that premises relating variables are not almost always false.
pub fn sample_trial(cfg: &SearchConfig, trial: u64, vars: &BTreeSet<Name>, funcs: &BTreeSet<Name>) -> Interpretation {
    let mut rng = cfg.trial_rng(trial);
    let lattice = cfg.lattices.choose(&mut rng).expect("validated pool is nonempty").clone();
    let mut model = Model::new(lattice.clone());
    for f in funcs {
        let m = sample_map(cfg, &lattice, f, &mut rng);
        model.funcs.insert(f.clone(), m);
    }
    let mut interp = Interpretation::new(model);
    let mut bound: Vec<Lasso> = Vec::new();
    for v in vars {
        let fresh = sample_lasso(cfg, &lattice, &mut rng);
        let value = match (bound.choose(&mut rng), rng.gen_range(0..8)) {
            (Some(prev), 0) => prev.clone(),
            (Some(prev), 1) => prev.op_join(&fresh).expect("same lattice"),
            (Some(prev), 2) => prev.op_meet(&fresh).expect("same lattice"),
            _ => fresh,
        };
        bound.push(value.clone());
        interp.vars.insert(v.clone(), value);
    }
    interp
}

/// The interpretation of trial 0.
pub fn sample_interpretation(cfg: &SearchConfig, vars: &BTreeSet<Name>, funcs: &BTreeSet<Name>) -> Interpretation {
    sample_trial(cfg, 0, vars, funcs)
}

/// What a counterexample refutes.
#[derive(Clone, Debug)]
pub enum Target {
    Quasi(Quasiequation),
    Schema(SequenceSchema),
}

/// An interpretation under which all premises hold and the conclusion fails.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub target: Target,
    pub interpretation: Interpretation,
    pub trial: u64,
    /// First index at which the conclusion fails, when it is an identity.
    pub index: Option<usize>,
}

impl Counterexample {
    /// Re-evaluates the target; true iff it still fails.
    pub fn replays(&self) -> Result<bool, EvalError> {
        Ok(match &self.target {
            Target::Quasi(q) => !satisfies_quasieq(q, &self.interpretation)?,
            Target::Schema(s) => !check_aicw_infinitary(*s, &self.interpretation)?,
        })
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        self.interpretation.lattice()
    }

    /// `(lhs, rhs)` values of the failing conclusion.
    pub fn conclusion_values(&self) -> Option<(Lasso, Lasso)> {
        match &self.target {
            Target::Quasi(q) => {
                let i = &self.interpretation;
                Some((eval(&q.conclusion.lhs, i).ok()?, eval(&q.conclusion.rhs, i).ok()?))
            }
            Target::Schema(_) => None,
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.target {
            Target::Quasi(q) => writeln!(f, "refutes: {q}")?,
            Target::Schema(s) => writeln!(f, "refutes: {}", s.statement())?,
        }
        writeln!(f, "trial {}, lattice {}", self.trial, self.lattice().name())?;
        for (name, m) in &self.interpretation.model.funcs {
            writeln!(f, "let {name} = {};", m.render())?;
        }
        for (name, v) in &self.interpretation.vars {
            writeln!(f, "let {name} = {};", v.render())?;
        }
        if let Some((l, r)) = self.conclusion_values() {
            writeln!(f, "lhs = {}, rhs = {}", l.render(), r.render())?;
        }
        if let Some(i) = self.index {
            write!(f, "first failing index: {i}")?;
        }
        Ok(())
    }
}

fn failing_index(id: &Identity, interp: &Interpretation) -> Result<Option<usize>, EvalError> {
    let l = eval(&id.lhs, interp)?;
    let r = eval(&id.rhs, interp)?;
    let lat = interp.lattice();
    Ok((0..l.window(&r)).find(|&n| match id.rel {
        Rel::Eq => l.at(n) != r.at(n),
        Rel::Leq => !lat.leq(l.at(n), r.at(n)),
    }))
}

#[derive(Clone, Debug)]
pub struct RefuteReport {
    pub trials: usize,
    /// Trials in which every premise held.
    pub premises_held: usize,
    pub counterexample: Option<Counterexample>,
}

impl RefuteReport {
    pub fn found(&self) -> bool {
        self.counterexample.is_some()
    }
}

enum Outcome {
    Vacuous,
    Held,
    Violated(Box<Counterexample>),
}

/// Runs `trial` over `0..cfg.trials` in parallel chunks, stopping after the
/// first chunk with a violation; the lowest violating trial wins.
fn run_trials<F>(cfg: &SearchConfig, trial: F) -> Result<RefuteReport, SearchError>
where
    F: Fn(u64) -> Result<Outcome, SearchError> + Sync,
{
    cfg.validate()?;
    let mut report = RefuteReport { trials: 0, premises_held: 0, counterexample: None };
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + CHUNK).min(cfg.trials);
        let outcomes = (start..end).into_par_iter().map(|t| trial(t as u64)).collect::<Result<Vec<_>, _>>()?;
        for o in outcomes {
            report.trials += 1;
            match o {
                Outcome::Vacuous => {}
                Outcome::Held => report.premises_held += 1,
                Outcome::Violated(c) => {
                    report.premises_held += 1;
                    report.counterexample = Some(*c);
                    return Ok(report);
                }
            }
        }
        start = end;
    }
    Ok(report)
}

/// Looks for an interpretation satisfying the premises of `q` but not its conclusion.
pub fn refute(q: &Quasiequation, cfg: &SearchConfig) -> Result<RefuteReport, SearchError> {
    let vars = q.free_vars();
    let funcs = q.func_symbols();
    run_trials(cfg, |t| {
        let interp = sample_trial(cfg, t, &vars, &funcs);
        if failing_premise(q, &interp)?.is_some() {
            return Ok(Outcome::Vacuous);
        }
        if satisfies_identity(&q.conclusion, &interp)? {
            return Ok(Outcome::Held);
        }
        let index = failing_index(&q.conclusion, &interp)?;
        Ok(Outcome::Violated(Box::new(Counterexample { target: Target::Quasi(q.clone()), interpretation: interp, trial: t, index })))
    })
}

/// Trials of an infinitary schema, with `a` and `b` sampled.
pub fn refute_schema(schema: SequenceSchema, cfg: &SearchConfig) -> Result<RefuteReport, SearchError> {
    let vars: BTreeSet<Name> = [Name::from("a"), Name::from("b")].into();
    run_trials(cfg, |t| {
        let interp = sample_trial(cfg, t, &vars, &BTreeSet::new());
        if check_aicw_infinitary(schema, &interp)? {
            Ok(Outcome::Held)
        } else {
            Ok(Outcome::Violated(Box::new(Counterexample { target: Target::Schema(schema), interpretation: interp, trial: t, index: None })))
        }
    })
}

/// The continuity condition a rule stands for, if it is a continuity rule.
pub fn continuity_of(rule: &Rule) -> Option<(Continuity, Name)> {
    let syms = rule.quasiequation().func_symbols();
    Continuity::ALL.into_iter().find_map(|c| {
        syms.iter()
            .find(|f| continuity_rules(c, f).get(&rule.name).is_some_and(|r| r.conclusion == rule.conclusion))
            .map(|f| (c, f.clone()))
    })
}

/// Continuity conditions of every continuity rule in `rules`.
pub fn continuity_requirements(rules: &RuleSet) -> Vec<(Continuity, Name)> {
    rules.iter().filter_map(|r| continuity_of(r)).collect()
}

/// A random context `C[x]` over the operations and the given symbols.
fn random_context(rng: &mut impl Rng, funcs: &[Name], depth: usize) -> Term {
    let leaf = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..4) {
        0 => Term::var("c"),
        1 => Term::Bot,
        2 => Term::Top,
        _ => Term::var("x"),
    };
    if depth == 0 {
        return leaf(rng);
    }
    let sub = |rng: &mut _| random_context(rng, funcs, depth - 1);
    match rng.gen_range(0..9) {
        0 => Term::join(sub(rng), sub(rng)),
        1 => Term::meet(sub(rng), sub(rng)),
        2 => Term::head(sub(rng)),
        3 => Term::shift(sub(rng)),
        4 => Term::majorum(sub(rng)),
        5 => Term::minorum(sub(rng)),
        6 if !funcs.is_empty() => Term::apply(&funcs[rng.gen_range(0..funcs.len())], sub(rng)),
        7 if !funcs.is_empty() => Term::orbit(&funcs[rng.gen_range(0..funcs.len())], sub(rng)),
        _ => Term::var("x"),
    }
}

/// Instances `a = b |- C[a] = C[b]` of the context schema for random contexts.
fn context_instances(cfg: &SearchConfig, funcs: &BTreeSet<Name>) -> Vec<Quasiequation> {
    let mut rng = cfg.trial_rng(u64::MAX);
    let funcs: Vec<Name> = funcs.iter().cloned().collect();
    (0..16)
        .map(|_| {
            let ctx = random_context(&mut rng, &funcs, 3);
            let premise = Identity::eq(Term::var("a"), Term::var("b"));
            let concl = Identity::eq(ctx.replace_var("x", &Term::var("a")), ctx.replace_var("x", &Term::var("b")));
            Quasiequation::new(vec![premise], concl)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FuzzEntry {
    pub rule: String,
    pub kind: &'static str,
    pub trials: usize,
    pub premises_held: usize,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub entries: Vec<FuzzEntry>,
}

impl FuzzReport {
    pub fn total_trials(&self) -> usize {
        self.entries.iter().map(|e| e.trials).sum()
    }
}

/// Refutation trials for every rule of `rules` (continuity rules under their
/// filter, the context schema on random contexts, sequence schemas through
/// the exact head-set check). The first violation is an error.
pub fn fuzz_soundness(rules: &RuleSet, cfg: &SearchConfig) -> Result<FuzzReport, SearchError> {
    cfg.validate()?;
    let mut report = FuzzReport::default();
    let violation = |rule: &str, c: Counterexample| SearchError::SoundnessViolation { rule: rule.to_string(), counterexample: Box::new(c) };
    for rule in rules.iter() {
        if rule.is_context_schema() {
            let mut entry = FuzzEntry { rule: rule.name.clone(), kind: rule.kind.label(), trials: 0, premises_held: 0 };
            let per = (cfg.trials / 16).max(1);
            for q in context_instances(cfg, &rules.signature()) {
                let r = refute(&q, &cfg.clone().with_trials(per))?;
                entry.trials += r.trials;
                entry.premises_held += r.premises_held;
                if let Some(c) = r.counterexample {
                    return Err(violation(&rule.name, c));
                }
            }
            report.entries.push(entry);
            continue;
        }
        let mut rule_cfg = cfg.clone();
        if let Some((c, f)) = continuity_of(rule) {
            rule_cfg.continuity.push((c, f));
        }
        let r = refute(&rule.quasiequation(), &rule_cfg)?;
        if let Some(c) = r.counterexample {
            return Err(violation(&rule.name, c));
        }
        report.entries.push(FuzzEntry { rule: rule.name.clone(), kind: rule.kind.label(), trials: r.trials, premises_held: r.premises_held });
    }
    for &schema in &rules.schemas {
        let r = refute_schema(schema, cfg)?;
        if let Some(c) = r.counterexample {
            return Err(violation(schema.name(), c));
        }
        report.entries.push(FuzzEntry { rule: schema.name().to_string(), kind: "schema", trials: r.trials, premises_held: r.premises_held });
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub period: usize,
    pub sampled: RefuteReport,
    /// Purely periodic sequences with period word of length `period`, enumerated per small lattice.
    pub enumerated: usize,
    pub enumerated_premises_held: usize,
    pub violations: usize,
}

/// Checks the period-`n` flatness quasiequation on sampled interpretations and
/// on every periodic sequence with an `n`-letter period word over each pool
/// lattice small enough to enumerate. On enumerated instances the evaluator's
/// verdict is compared with a direct reading of the sequence.
pub fn validity_family_flatness(n: usize, cfg: &SearchConfig) -> Result<FlatnessReport, SearchError> {
    if n == 0 {
        return Err(SearchError::InvalidConfig("period length must be at least 1".into()));
    }
    let q = flatness_quasieq(n);
    let sampled = refute(&q, cfg)?;
    let mut report = FlatnessReport { period: n, sampled, enumerated: 0, enumerated_premises_held: 0, violations: 0 };
    let a = Name::from("a");
    for lattice in &cfg.lattices {
        let size = lattice.size();
        let Some(count) = (size as u64).checked_pow(n as u32).filter(|&c| c <= 20_000) else { continue };
        for code in 0..count {
            let mut word = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                word.push((c % size as u64) as Elem);
                c /= size as u64;
            }
            let seq = Lasso::new(lattice, Vec::new(), word.clone()).expect("elements in range");
            let mut interp = Interpretation::new(Model::new(lattice.clone()));
            interp.vars.insert(a.clone(), seq.clone());
            let held = failing_premise(&q, &interp)?.is_none();
            let direct_held = (0..n).all(|i| seq.at(i) == seq.at(i + 1));
            let concl = satisfies_identity(&q.conclusion, &interp)?;
            let direct_concl = word.iter().all(|&x| x == word[0]);
            report.enumerated += 1;
            if held {
                report.enumerated_premises_held += 1;
            }
            if held != direct_held || (held && (!concl || concl != direct_concl)) {
                report.violations += 1;
            }
        }
    }
    if report.sampled.found() {
        report.violations += 1;
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct FixedPointReport {
    pub trials: usize,
    /// Trials where the extra hypothesis (continuity) was met.
    pub conditional: usize,
    pub mismatches: Vec<String>,
}

fn sample_model_and_map(cfg: &SearchConfig, t: u64) -> (ChaCha8Rng, Arc<FiniteLattice>, MonotoneMap) {
    let mut rng = cfg.trial_rng(t);
    let lattice = cfg.lattices.choose(&mut rng).expect("validated pool is nonempty").clone();
    let f = sample_map(cfg, &lattice, "F", &mut rng);
    (rng, lattice, f)
}

fn orbit_value(term: &str, lattice: &Arc<FiniteLattice>, f: &MonotoneMap, a: Elem) -> Result<Lasso, EvalError> {
    let interp = Interpretation::new(Model::new(lattice.clone()).with_func("F", f.clone())).with_var("a", Lasso::flat(lattice, a));
    let t = crate::term::parse_term(term).expect("fixed term parses");
    eval(&t, &interp)
}

/// For sampled maps and flat postfixed seeds `a`, compares the head of
/// `◇F*a` with the least fixed point above `a` computed by iteration; and
/// dually the head of `□F*a` with the greatest fixed point below a prefixed seed.
pub fn tkp_agreement(cfg: &SearchConfig) -> Result<FixedPointReport, SearchError> {
    cfg.validate()?;
    let results = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<Vec<String>, SearchError> {
            let (mut rng, lattice, f) = sample_model_and_map(cfg, t);
            let mut bad = Vec::new();
            let post: Vec<Elem> = lattice.elements().filter(|&x| lattice.leq(x, f.apply(x))).collect();
            let a = *post.choose(&mut rng).expect("bottom is postfixed");
            let lfp = f.lfp_above(a).expect("seed is postfixed");
            let got = orbit_value("dia F* a", &lattice, &f, a)?.at(0);
            if got != lfp {
                bad.push(format!("trial {t}: lfp above {a} of {} is {lfp}, head of dia F* a is {got}", f.render()));
            }
            let pre: Vec<Elem> = lattice.elements().filter(|&x| lattice.leq(f.apply(x), x)).collect();
            let b = *pre.choose(&mut rng).expect("top is prefixed");
            let gfp = f.gfp_below(b).expect("seed is prefixed");
            let got = orbit_value("box F* a", &lattice, &f, b)?.at(0);
            if got != gfp {
                bad.push(format!("trial {t}: gfp below {b} of {} is {gfp}, head of box F* a is {got}", f.render()));
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FixedPointReport { trials: cfg.trials, conditional: cfg.trials, mismatches: results.into_iter().flatten().collect() })
}

/// For sampled maps and arbitrary flat seeds: `□◇F*a` is flat and its value
/// is a postfixed point of `F`, and a fixed point when `F` preserves binary joins.
pub fn olszewski_check(cfg: &SearchConfig) -> Result<FixedPointReport, SearchError> {
    cfg.validate()?;
    let results = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<(bool, Option<String>), SearchError> {
            let (mut rng, lattice, f) = sample_model_and_map(cfg, t);
            let a = rng.gen_range(0..lattice.size());
            let v = orbit_value("box dia F* a", &lattice, &f, a)?;
            let cont = f.is_countably_continuous();
            let Some(x) = v.flat_value() else {
                return Ok((cont, Some(format!("trial {t}: box dia F* a = {} is not flat", v.render()))));
            };
            if !lattice.leq(x, f.apply(x)) {
                return Ok((cont, Some(format!("trial {t}: {x} is not postfixed for {}", f.render()))));
            }
            if cont && f.apply(x) != x {
                return Ok((cont, Some(format!("trial {t}: {x} is not a fixed point of {}", f.render()))));
            }
            Ok((cont, None))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FixedPointReport {
        trials: cfg.trials,
        conditional: results.iter().filter(|(c, _)| *c).count(),
        mismatches: results.into_iter().filter_map(|(_, m)| m).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, parse_table};
    use crate::term::parse_quasiequation;

    fn names(xs: &[&str]) -> BTreeSet<Name> {
        xs.iter().map(|&x| Name::from(x)).collect()
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SearchConfig::default().with_seed(42);
        let a = sample_interpretation(&cfg, &names(&["a", "b"]), &names(&["F"]));
        let b = sample_interpretation(&cfg, &names(&["a", "b"]), &names(&["F"]));
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn flat_caps_give_flat_sequences() {
        let cfg = SearchConfig::default().with_caps(0, 1);
        for t in 0..200 {
            let i = sample_trial(&cfg, t, &names(&["a", "b", "c"]), &BTreeSet::new());
            assert!(i.vars.values().all(|v| v.flat_value().is_some()));
        }
    }

    #[test]
    fn continuity_filter_rejects_non_join_preserving_map() {
        let b2 = build_lattice("B2").unwrap();
        let f = parse_table(&b2, "table{bot->bot,a->bot,b->bot,top->top}").unwrap();
        let model = Model::new(b2).with_func("F", f);
        let cfg = SearchConfig::default().with_continuity(Continuity::Countable, "F");
        assert!(!cfg.accepts(&model));
        assert!(SearchConfig::default().accepts(&model));
    }

    #[test]
    fn invalid_configs() {
        assert!(SearchConfig::default().with_trials(0).validate().is_err());
        assert!(SearchConfig::default().with_caps(2, 0).validate().is_err());
    }

    #[test]
    fn countable_continuity_is_refuted_without_filter() {
        let q = parse_quasiequation("show F dia a <= dia F a").unwrap();
        let cfg = SearchConfig::default().with_lattices(vec![build_lattice("B2").unwrap()]).with_trials(2000);
        let r = refute(&q, &cfg).unwrap();
        let c = r.counterexample.expect("counterexample on B2");
        assert!(c.replays().unwrap());
        assert!(!c.interpretation.model.funcs["F"].is_countably_continuous());
    }

    #[test]
    fn trivial_identity_is_not_refuted() {
        let q = parse_quasiequation("show a = a").unwrap();
        let r = refute(&q, &SearchConfig::default().with_trials(300)).unwrap();
        assert!(!r.found());
        assert_eq!(r.premises_held, 300);
    }
}
