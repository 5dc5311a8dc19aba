//! `aic`: batch front-end for checking derivations, evaluating terms,
//! searching for counterexamples and deciding the discrete fragment.
//!
//! Exit codes: 0 when the requested verification succeeds, 1 when it fails,
//! 2 on usage errors and unreadable input.

mod report;

use aic_core::corpus::{gen_kind_proof, kind_script, parse_document, parse_rule_file, register_user_rules, Corpus, CorpusError, Lemma};
use aic_core::discrete::{decide_identity, default_bound, homogeneous_link, proof_search_oracle, HomogeneousPremises, OracleVerdict};
use aic_core::lattice::{build_lattice, catalogue, FiniteLattice};
use aic_core::rules::{builtin_rulesets, parse_ruleset, Continuity, Rule, RuleKind};
use aic_core::search::{fuzz_soundness, refute, Counterexample, SearchConfig, SearchError, DEFAULT_SEED};
use aic_core::semantics::{eval, satisfies_identity, Interpretation};
use aic_core::term::{parse_identity, parse_quasiequation, parse_term, Identity, Name};
use clap::{Args, Parser, Subcommand};
use report::{Failure, Report};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "aic", version, about = "Checker and model search for sequence-algebra quasiequations")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof document.
    Check(CheckArgs),
    /// Evaluate a term or identity in a finite model.
    Eval(EvalArgs),
    /// Search for a counterexample to a quasiequation file.
    Refute(RefuteArgs),
    /// Randomized soundness trials for every rule of a rule set.
    Fuzz(FuzzArgs),
    /// The proof corpus.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// The head/shift fragment.
    #[command(subcommand)]
    Discrete(DiscreteCommand),
    /// Rule sets and user rule files.
    #[command(subcommand)]
    Rules(RulesCommand),
    /// Generate and check k-induction derivations.
    GenKind(GenKindArgs),
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    /// Rule set expression overriding the document's `@rules`.
    #[arg(long)]
    rules: Option<String>,
    /// Rule file whose rules are checked and then made available.
    #[arg(long)]
    user_rules: Option<PathBuf>,
    /// Directory resolving `@uses` (default: the built-in corpus).
    #[arg(long)]
    proofs_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Lattice, e.g. `C3`, `product(C3,B2)`.
    #[arg(long)]
    lattice: String,
    /// Binding `a=<..>` or `F=table{..}`; repeatable.
    #[arg(long)]
    bind: Vec<String>,
    /// Interpretation file of `let` bindings.
    #[arg(long)]
    interp: Option<PathBuf>,
    #[arg(long, conflicts_with = "identity", required_unless_present = "identity")]
    term: Option<String>,
    #[arg(long)]
    identity: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Seed (default: `AIC_SEED` or the built-in seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated lattices (default: the catalogue).
    #[arg(long)]
    lattices: Option<String>,
    #[arg(long, default_value_t = 3)]
    max_prefix: usize,
    #[arg(long, default_value_t = 4)]
    max_period: usize,
    /// Continuity filter such as `wcont(F)`; repeatable.
    #[arg(long)]
    continuity: Vec<String>,
}

#[derive(Args)]
struct RefuteArgs {
    /// File with `assume <id>; ...; show <id>`.
    file: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct FuzzArgs {
    /// Rule set expression.
    #[arg(long, default_value = "AIC1")]
    rules: String,
    /// Extra rule `name: p1; p2 |- c` to test alongside the set; repeatable.
    #[arg(long)]
    candidate: Vec<String>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Check one proof by name, or all of them.
    Check {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// List proof names and statements.
    List {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Write a generated script (`k-ind`).
    Emit {
        kind: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DiscreteCommand {
    /// Decide a homogeneous goal from homogeneous premises.
    Decide {
        /// File with one premise identity per line.
        #[arg(long)]
        premises: Option<PathBuf>,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 8)]
        oracle_depth: usize,
        /// Also run the proof-search oracle and compare verdicts.
        #[arg(long)]
        compare: bool,
    },
}

#[derive(Subcommand)]
enum RulesCommand {
    /// Print the rules of a set expression.
    List {
        set: String,
        /// Function symbols (comma-separated).
        #[arg(long, default_value = "F")]
        sig: String,
    },
    /// Check a user rule file against a base set.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "AIC1")]
        rules: String,
    },
}

#[derive(Args)]
struct GenKindArgs {
    /// Largest k; derivations for 0..=k are generated.
    #[arg(long)]
    k: usize,
    /// Print the script for k instead of the size table.
    #[arg(long)]
    emit: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command);
    match result {
        Ok(r) => r.finish(cli.json),
        Err(f) => f.finish(cli.json),
    }
}

fn run(cmd: Command) -> Result<Report, Failure> {
    match cmd {
        Command::Check(a) => check(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Refute(a) => refute_cmd(a),
        Command::Fuzz(a) => fuzz_cmd(a),
        Command::Corpus(c) => corpus_cmd(c),
        Command::Discrete(DiscreteCommand::Decide { premises, goal, bound, oracle_depth, compare }) => {
            decide_cmd(premises.as_deref(), &goal, bound, oracle_depth, compare)
        }
        Command::Rules(c) => rules_cmd(c),
        Command::GenKind(a) => gen_kind_cmd(a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_corpus(dir: Option<&Path>) -> Result<Corpus, Failure> {
    match dir {
        Some(d) => Corpus::from_dir(d),
        None => Corpus::builtin(),
    }
    .map_err(|e| Failure::usage(e.to_string()))
}

fn corpus_error_json(e: &CorpusError) -> Value {
    let mut v = json!({ "class": e.class(), "message": e.to_string() });
    match e {
        CorpusError::Kernel { proof, error } => {
            v["proof"] = json!(proof);
            v["path"] = json!(error.path);
            v["line"] = json!(error.line);
        }
        CorpusError::Parse { line, .. } => v["line"] = json!(line),
        _ => {}
    }
    v
}

fn check(a: CheckArgs) -> Result<Report, Failure> {
    let text = read(&a.file)?;
    let corpus = load_corpus(a.proofs_dir.as_deref())?;
    let user: Vec<Lemma> = match &a.user_rules {
        Some(p) => parse_rule_file(&read(p)?, &p.display().to_string()).map_err(|e| Failure::usage(e.to_string()))?,
        None => Vec::new(),
    };
    let start = Instant::now();
    let outcome = parse_document(&text, &a.file.display().to_string())
        .and_then(|p| corpus.check_proof_with(&p, a.rules.as_deref(), &user).map(|d| (p, d)));
    let ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(match outcome {
        Ok((p, d)) => Report::ok(
            "check",
            format!("ok {}: {} (size {}, height {}, {ms:.1} ms)", p.name, p.quasieq, d.size(), d.height()),
            json!({ "proof": p.name, "statement": p.quasieq.to_string(), "rules": a.rules.unwrap_or(p.ruleset), "size": d.size(), "height": d.height(), "millis": ms }),
        ),
        Err(e) => Report::fail("check", format!("error [{}]: {e}", e.class()), json!({ "error": corpus_error_json(&e) })),
    })
}

fn eval_cmd(a: EvalArgs) -> Result<Report, Failure> {
    let lattice = build_lattice(&a.lattice).map_err(|e| Failure::usage(e.to_string()))?;
    let mut interp = Interpretation::new(aic_core::semantics::Model::new(lattice));
    if let Some(p) = &a.interp {
        interp.extend_from_text(&read(p)?).map_err(|e| Failure::usage(e.to_string()))?;
    }
    for b in &a.bind {
        interp.bind(b).map_err(|e| Failure::usage(e.to_string()))?;
    }
    if let Some(t) = &a.term {
        let term = parse_term(t).map_err(|e| Failure::usage(e.to_string()))?;
        let value = eval(&term, &interp).map_err(|e| Failure::usage(e.to_string()))?.normalize();
        return Ok(Report::ok("eval", value.render(), json!({ "term": term.to_string(), "value": value.render() })));
    }
    let id = parse_identity(a.identity.as_deref().unwrap_or_default()).map_err(|e| Failure::usage(e.to_string()))?;
    let holds = satisfies_identity(&id, &interp).map_err(|e| Failure::usage(e.to_string()))?;
    let lhs = eval(&id.lhs, &interp).map_err(|e| Failure::usage(e.to_string()))?.normalize();
    let rhs = eval(&id.rhs, &interp).map_err(|e| Failure::usage(e.to_string()))?.normalize();
    let text = format!("{}: lhs = {}, rhs = {}", if holds { "holds" } else { "fails" }, lhs.render(), rhs.render());
    let data = json!({ "identity": id.to_string(), "holds": holds, "lhs": lhs.render(), "rhs": rhs.render() });
    Ok(if holds { Report::ok("eval", text, data) } else { Report::fail("eval", text, data) })
}

/// Splits at commas outside parentheses.
fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let (mut depth, mut cur) = (0i32, String::new());
    for c in s.chars() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn seed_of(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("AIC_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::usage(format!("AIC_SEED is not an integer: `{v}`"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn search_config(a: &SearchArgs) -> Result<SearchConfig, Failure> {
    let lattices: Vec<Arc<FiniteLattice>> = match &a.lattices {
        Some(list) => split_list(list).iter().map(|l| build_lattice(l)).collect::<Result<_, _>>().map_err(|e| Failure::usage(e.to_string()))?,
        None => catalogue(),
    };
    let mut cfg = SearchConfig::default()
        .with_trials(a.trials)
        .with_seed(seed_of(a.seed)?)
        .with_lattices(lattices)
        .with_caps(a.max_prefix, a.max_period);
    for c in &a.continuity {
        let bad = || Failure::usage(format!("continuity filter `{c}`: expected e.g. `wcont(F)`"));
        let (kw, sym) = c.split_once('(').ok_or_else(bad)?;
        let sym = sym.strip_suffix(')').map(str::trim).filter(|s| !s.is_empty()).ok_or_else(bad)?;
        let kind = Continuity::from_keyword(kw.trim()).ok_or_else(bad)?;
        cfg = cfg.with_continuity(kind, sym);
    }
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(cfg)
}

fn counterexample_json(c: &Counterexample) -> Value {
    let i = &c.interpretation;
    let funcs: serde_json::Map<String, Value> = i.model.funcs.iter().map(|(k, m)| (k.to_string(), json!(m.render()))).collect();
    let vars: serde_json::Map<String, Value> = i.vars.iter().map(|(k, v)| (k.to_string(), json!(v.render()))).collect();
    let mut v = json!({ "trial": c.trial, "lattice": c.lattice().name(), "funcs": funcs, "vars": vars, "index": c.index });
    if let Some((l, r)) = c.conclusion_values() {
        v["lhs"] = json!(l.render());
        v["rhs"] = json!(r.render());
    }
    v
}

fn refute_cmd(a: RefuteArgs) -> Result<Report, Failure> {
    let q = parse_quasiequation(&read(&a.file)?).map_err(|e| Failure::usage(e.to_string()))?;
    let cfg = search_config(&a.search)?;
    let r = refute(&q, &cfg).map_err(|e| Failure::usage(e.to_string()))?;
    let data = json!({
        "quasiequation": q.to_string(),
        "seed": cfg.seed,
        "trials": r.trials,
        "premises_held": r.premises_held,
        "counterexample": r.counterexample.as_ref().map(counterexample_json),
    });
    Ok(match &r.counterexample {
        None => Report::ok("refute", format!("seed {}: no counterexample in {} trials ({} with premises holding)", cfg.seed, r.trials, r.premises_held), data),
        Some(c) => Report::fail("refute", format!("seed {}: counterexample\n{c}", cfg.seed), data),
    })
}

fn fuzz_cmd(a: FuzzArgs) -> Result<Report, Failure> {
    let mut rules = parse_ruleset(&a.rules, &BTreeSet::new()).map_err(|e| Failure::usage(e.to_string()))?;
    for c in &a.candidate {
        let (name, body) = c.split_once(':').ok_or_else(|| Failure::usage(format!("candidate `{c}`: expected `name: ... |- ...`")))?;
        let rule = Rule::parse(name.trim(), body, RuleKind::Candidate).map_err(|e| Failure::usage(e.to_string()))?;
        rules.insert(rule).map_err(|e| Failure::usage(e.to_string()))?;
    }
    let cfg = search_config(&a.search)?;
    let start = Instant::now();
    match fuzz_soundness(&rules, &cfg) {
        Ok(report) => {
            let secs = start.elapsed().as_secs_f64();
            let entries: Vec<Value> = report
                .entries
                .iter()
                .map(|e| json!({ "rule": e.rule, "kind": e.kind, "trials": e.trials, "premises_held": e.premises_held }))
                .collect();
            let mut text = format!("seed {}: {} rules, {} trials, no violations ({secs:.1} s)", cfg.seed, report.entries.len(), report.total_trials());
            for e in &report.entries {
                text.push_str(&format!("\n  {:<16} {:<10} {:>7} trials, premises held {}", e.rule, e.kind, e.trials, e.premises_held));
            }
            Ok(Report::ok("fuzz", text, json!({ "rules": a.rules, "seed": cfg.seed, "entries": entries, "seconds": secs })))
        }
        Err(SearchError::SoundnessViolation { rule, counterexample }) => Ok(Report::fail(
            "fuzz",
            format!("seed {}: rule {rule} violated\n{counterexample}", cfg.seed),
            json!({ "rules": a.rules, "seed": cfg.seed, "violated": rule, "counterexample": counterexample_json(&counterexample) }),
        )),
        Err(e) => Err(Failure::usage(e.to_string())),
    }
}

fn corpus_cmd(c: CorpusCommand) -> Result<Report, Failure> {
    match c {
        CorpusCommand::Check { name, all, dir } => {
            let corpus = load_corpus(dir.as_deref())?;
            let start = Instant::now();
            let results: Vec<(String, Result<(), CorpusError>)> = match (name, all) {
                (Some(n), _) => vec![(n.clone(), corpus.check(&n).map(|_| ()))],
                (None, true) => corpus.check_all(),
                (None, false) => return Err(Failure::usage("give a proof name or --all".into())),
            };
            let secs = start.elapsed().as_secs_f64();
            let failed = results.iter().filter(|(_, r)| r.is_err()).count();
            let mut text = String::new();
            let mut entries = Vec::new();
            for (n, r) in &results {
                match r {
                    Ok(()) => text.push_str(&format!("ok    {n}\n")),
                    Err(e) => text.push_str(&format!("FAIL  {n}: [{}] {e}\n", e.class())),
                }
                entries.push(json!({ "name": n, "ok": r.is_ok(), "error": r.as_ref().err().map(corpus_error_json) }));
            }
            text.push_str(&format!("{} checked, {failed} failed ({secs:.2} s)", results.len()));
            let data = json!({ "proofs": entries, "checked": results.len(), "failed": failed, "seconds": secs });
            Ok(if failed == 0 { Report::ok("corpus check", text, data) } else { Report::fail("corpus check", text, data) })
        }
        CorpusCommand::List { dir } => {
            let corpus = load_corpus(dir.as_deref())?;
            let mut text = String::new();
            let mut entries = Vec::new();
            for p in corpus.proofs() {
                text.push_str(&format!("{:<22} [{}] {}\n", p.name, p.ruleset, p.quasieq));
                entries.push(json!({ "name": p.name, "rules": p.ruleset, "group": p.group, "statement": p.quasieq.to_string() }));
            }
            Ok(Report::ok("corpus list", text.trim_end().to_string(), json!({ "proofs": entries })))
        }
        CorpusCommand::Emit { kind, k, out } => {
            if kind != "k-ind" {
                return Err(Failure::usage(format!("unknown generator `{kind}` (expected `k-ind`)")));
            }
            let script = kind_script(k);
            match out {
                Some(path) => {
                    std::fs::write(&path, &script).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                    Ok(Report::ok("corpus emit", format!("wrote {}", path.display()), json!({ "k": k, "path": path.display().to_string() })))
                }
                None => Ok(Report::ok("corpus emit", script.trim_end().to_string(), json!({ "k": k, "script": script }))),
            }
        }
    }
}

fn gen_kind_cmd(a: GenKindArgs) -> Result<Report, Failure> {
    let corpus = Corpus::builtin().map_err(|e| Failure::usage(e.to_string()))?;
    if a.emit {
        let p = gen_kind_proof(a.k, &corpus);
        return Ok(match p {
            Ok(p) => Report::ok("gen-kind", p.script.trim_end().to_string(), json!({ "k": a.k, "script": p.script })),
            Err(e) => Report::fail("gen-kind", format!("k = {}: {e}", a.k), json!({ "k": a.k, "error": corpus_error_json(&e) })),
        });
    }
    let mut text = String::from("k  size  millis");
    let mut rows = Vec::new();
    for k in 0..=a.k {
        let start = Instant::now();
        match gen_kind_proof(k, &corpus) {
            Ok(p) => {
                let ms = start.elapsed().as_secs_f64() * 1e3;
                text.push_str(&format!("\n{k:<2} {:>5}  {ms:.1}", p.size()));
                rows.push(json!({ "k": k, "size": p.size(), "millis": ms }));
            }
            Err(e) => {
                return Ok(Report::fail("gen-kind", format!("k = {k}: {e}"), json!({ "k": k, "error": corpus_error_json(&e), "checked": rows })));
            }
        }
    }
    Ok(Report::ok("gen-kind", text, json!({ "checked": rows })))
}

fn decide_cmd(premises: Option<&Path>, goal: &str, bound: Option<usize>, depth: usize, compare: bool) -> Result<Report, Failure> {
    let usage = |e: String| Failure::usage(e);
    let mut ids: Vec<Identity> = Vec::new();
    if let Some(p) = premises {
        for line in read(p)?.lines() {
            let code = line.split('#').next().unwrap_or("").trim().trim_end_matches(';');
            if !code.is_empty() {
                ids.push(parse_identity(code).map_err(|e| usage(e.to_string()))?);
            }
        }
    }
    let goal = parse_identity(goal).map_err(|e| usage(e.to_string()))?;
    let p = HomogeneousPremises::from_identities(&ids).map_err(|e| usage(e.to_string()))?;
    let (_, (_, n, _, k)) = homogeneous_link(&goal).map_err(|e| usage(e.to_string()))?;
    let bound = bound.unwrap_or_else(|| default_bound(&p, n, k));
    let verdict = decide_identity(&p, &goal, Some(bound)).map_err(|e| usage(e.to_string()))?;
    let mut text = format!("{goal}: {verdict} (bound {bound})");
    let mut data = json!({ "goal": goal.to_string(), "premises": ids.iter().map(|i| i.to_string()).collect::<Vec<_>>(), "bound": bound, "verdict": verdict.to_string() });
    let mut ok = true;
    if compare {
        let oracle = proof_search_oracle(&ids, &goal, depth, &[]).map_err(|e| usage(e.to_string()))?;
        let agree = oracle.verdict() == verdict;
        ok = agree;
        let shown = match oracle {
            OracleVerdict::Provable { depth } => format!("provable at height {depth}"),
            OracleVerdict::Unknown => format!("unknown within height {depth}"),
        };
        text.push_str(&format!("\nproof search: {shown}; {}", if agree { "agrees" } else { "DISAGREES" }));
        data["oracle"] = json!({ "depth": depth, "verdict": oracle.verdict().to_string(), "height": match oracle { OracleVerdict::Provable { depth } => Some(depth), OracleVerdict::Unknown => None } });
        data["agree"] = json!(agree);
    }
    Ok(if ok { Report::ok("discrete decide", text, data) } else { Report::fail("discrete decide", text, data) })
}

fn rules_cmd(c: RulesCommand) -> Result<Report, Failure> {
    match c {
        RulesCommand::List { set, sig } => {
            let sig: BTreeSet<Name> = split_list(&sig).iter().map(|s| Name::from(s.as_str())).collect();
            let rules = if let Some(b) = builtin_rulesets(&sig).get(set.trim()) {
                b.clone()
            } else {
                parse_ruleset(&set, &sig).map_err(|e| Failure::usage(e.to_string()))?
            };
            let text = rules.render();
            let entries: Vec<Value> = rules.iter().map(|r| json!({ "name": r.name, "kind": r.kind.label(), "statement": r.to_string() })).collect();
            let schemas: Vec<Value> = rules.schemas.iter().map(|s| json!({ "name": s.name(), "statement": s.statement() })).collect();
            Ok(Report::ok("rules list", text.trim_end().to_string(), json!({ "set": set, "count": entries.len(), "rules": entries, "schemas": schemas })))
        }
        RulesCommand::Check { file, rules } => {
            let user = parse_rule_file(&read(&file)?, &file.display().to_string());
            let user = match user {
                Ok(u) => u,
                Err(e) => return Ok(Report::fail("rules check", format!("error [{}]: {e}", e.class()), json!({ "error": corpus_error_json(&e) }))),
            };
            let sig: BTreeSet<Name> = user.iter().flat_map(|l| l.quasieq.func_symbols()).collect();
            let base = parse_ruleset(&rules, &sig).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(match register_user_rules(base, &user) {
                Ok(_) => {
                    let names: Vec<&str> = user.iter().map(|l| l.name.as_str()).collect();
                    Report::ok("rules check", format!("ok: {} rules derived over {rules}: {}", names.len(), names.join(", ")), json!({ "base": rules, "derived": names }))
                }
                Err(e) => Report::fail("rules check", format!("error [{}]: {e}", e.class()), json!({ "base": rules, "error": corpus_error_json(&e) })),
            })
        }
    }
}
