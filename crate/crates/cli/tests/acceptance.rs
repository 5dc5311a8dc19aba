//! Acceptance suite: one PASS/FAIL line per criterion, with measured values
//! and the tolerances they are held to. Runs without the test harness so the
//! lines always appear in `cargo test` output.
//!
//! A criterion listed in `KNOWN_SHORTFALLS` is reported as FAIL without
//! failing the target, but only while its shortfall still matches the
//! recorded description exactly; any other failure fails the target.

use aic_core::corpus::{gen_kind_proof, Corpus};
use aic_core::discrete::{
    decide_head, decide_shift, flatness_quasieq, proof_search_oracle, theta_axioms, HomogeneousPremises, LinkKind, OracleVerdict, Saturation,
    Universe, Verdict,
};
use aic_core::lasso::Lasso;
use aic_core::lattice::{build_lattice, catalogue, Elem, FiniteLattice, MonotoneMap};
use aic_core::rules::{aic1_additions, builtin_rulesets, RuleSet};
use aic_core::search::{fuzz_soundness, olszewski_check, refute, tkp_agreement, validity_family_flatness, SearchConfig};
use aic_core::term::{parse_quasiequation, Identity, Name, Term};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

/// Criteria that are reported but known not to hold as stated.
const KNOWN_SHORTFALLS: &[&str] = &["8a"];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: &'static str, title: &'static str, pass: bool, detail: String) -> Outcome {
    let o = Outcome { id, title, pass, detail };
    println!("[{}] {:<3} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
    o
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sig() -> BTreeSet<Name> {
    BTreeSet::from([Name::from("F")])
}

fn fuzz_set(rules: &RuleSet, trials: usize) -> (bool, String) {
    let start = Instant::now();
    let result = fuzz_soundness(rules, &SearchConfig::default().with_trials(trials));
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok(r) => {
            let starved: Vec<&str> = r.entries.iter().filter(|e| e.premises_held == 0).map(|e| e.rule.as_str()).collect();
            let covered = r.entries.len() == rules.len() + rules.schemas.len();
            let pass = covered && starved.is_empty() && r.entries.iter().all(|e| e.trials >= trials);
            (pass, format!("{} rules/schemas x {trials} trials, 0 counterexamples, {secs:.1} s, never-exercised premises: {starved:?}", r.entries.len()))
        }
        Err(e) => (false, format!("{e}")),
    }
}

fn criterion_1() -> Outcome {
    let sets = builtin_rulesets(&sig());
    let start = Instant::now();
    let (ok, detail) = fuzz_set(&sets["AIC1"], 10_000);
    let secs = start.elapsed().as_secs_f64();
    report("1", "soundness fuzz of AIC0 and AIC1 (tolerance: 0 counterexamples, < 60 s)", ok && secs < 60.0, detail)
}

fn criterion_2() -> Outcome {
    let sets = builtin_rulesets(&sig());
    let (ok, detail) = fuzz_set(&sets["AICw"], 10_000);
    report("2", "AICw finitary rows and sequence schemas (tolerance: 0 violations)", ok, detail)
}

fn criterion_3() -> Outcome {
    let corpus = Corpus::builtin().unwrap();
    let mut required: Vec<String> = [
        "tkp-fp", "tkp-above", "tkp-least", "dia-quasi-pre-fp", "dia-quasi-post-fp", "ol-post-fp", "ol-pre-fp", "ol-fp", "collapse",
        "collapse-2", "kleene-fp", "park", "shift-point-down", "shift-point-up", "dia-asc-pt", "box-desc-pt", "hd-flat",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let additions = aic1_additions(&sig());
    required.extend(additions.iter().map(|r| r.name.clone()));
    let missing: Vec<&String> = required.iter().filter(|n| corpus.get(n).is_none()).collect();
    // Encoded AIC1 additions must derive exactly the rule's statement over AIC0.
    let mismatched: Vec<String> = additions
        .iter()
        .filter(|r| corpus.get(&r.name).is_some_and(|p| p.ruleset != "AIC0" || p.quasieq.to_string() != r.quasiequation().to_string()))
        .map(|r| r.name.clone())
        .collect();

    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_aic")).args(["corpus", "check", "--all", "--json"]).current_dir(root()).output().unwrap();
    let secs = start.elapsed().as_secs_f64();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let checked = v["checked"].as_u64().unwrap_or(0);
    let failed = v["failed"].as_u64().unwrap_or(u64::MAX);
    let pass = out.status.code() == Some(0) && checked >= 30 && failed == 0 && missing.is_empty() && mismatched.is_empty() && secs < 5.0;
    report(
        "3",
        "corpus replay (tolerance: >= 30 proofs, exit 0, < 5 s)",
        pass,
        format!("{checked} checked, {failed} failed, exit {:?}, {secs:.2} s; missing {missing:?}; statement mismatches {mismatched:?}", out.status.code()),
    )
}

fn criterion_4() -> Outcome {
    let corpus = Corpus::builtin().unwrap();
    let mut sizes = Vec::new();
    let mut errors = Vec::new();
    let mut k8 = f64::INFINITY;
    for k in 0..=8 {
        let start = Instant::now();
        match gen_kind_proof(k, &corpus) {
            Ok(p) => sizes.push(p.size() as i64),
            Err(e) => errors.push(format!("k={k}: {e}")),
        }
        if k == 8 {
            k8 = start.elapsed().as_secs_f64();
        }
    }
    let steps: Vec<i64> = sizes.windows(2).map(|w| w[1] - w[0]).collect();
    let linear = errors.is_empty() && steps.len() == 8 && steps[1..].iter().all(|&d| d == steps[1] && d > 0);
    report(
        "4",
        "k-induction generator, k = 0..8 (tolerance: all check, constant size increment, k=8 < 2 s)",
        linear && k8 < 2.0,
        format!("sizes {sizes:?}, increments {steps:?}, k=8 generated and checked in {:.1} ms {errors:?}", k8 * 1e3),
    )
}

fn criterion_5() -> Outcome {
    let r = tkp_agreement(&SearchConfig::default().with_trials(1000)).unwrap();
    report(
        "5",
        "least/greatest fixed point agreement (tolerance: 0 mismatches in 1000)",
        r.mismatches.is_empty() && r.trials == 1000,
        format!("{} samples, {} mismatches {:?}", r.trials, r.mismatches.len(), r.mismatches.iter().take(3).collect::<Vec<_>>()),
    )
}

fn criterion_6() -> Outcome {
    let r = olszewski_check(&SearchConfig::default().with_trials(1000)).unwrap();
    let q = parse_quasiequation("show F dia a <= dia F a").unwrap();
    let cfg = SearchConfig::default().with_lattices(vec![build_lattice("B2").unwrap()]).with_trials(100);
    let refutation = refute(&q, &cfg).unwrap().counterexample;
    let refuted = refutation.as_ref().is_some_and(|c| c.replays().unwrap_or(false));
    let witness = refutation
        .as_ref()
        .map(|c| format!("trial {}, F = {}", c.trial, c.interpretation.model.funcs[&Name::from("F")].render()))
        .unwrap_or_else(|| "none".into());
    report(
        "6",
        "limsup of the orbit is postfixed, fixed under the countable filter; B2 refutes unconditional countable continuity within 100 trials",
        r.mismatches.is_empty() && refuted,
        format!("{} samples ({} passed the filter), {} violations; B2 refutation: {witness}", r.trials, r.conditional, r.mismatches.len()),
    )
}

fn random_lasso(l: &Arc<FiniteLattice>, rng: &mut impl Rng) -> Lasso {
    let (pre_len, per_len) = (rng.gen_range(0..=4), rng.gen_range(1..=4));
    let pre: Vec<Elem> = (0..pre_len).map(|_| rng.gen_range(0..l.size())).collect();
    let per: Vec<Elem> = (0..per_len).map(|_| rng.gen_range(0..l.size())).collect();
    Lasso::new(l, pre, per).unwrap()
}

/// Value at `n` of each operation, computed from an unrolled prefix of the inputs.
fn unrolled(op: usize, s: &Lasso, t: &Lasso, f: &MonotoneMap, n: usize) -> Elem {
    let l = s.lattice();
    let span = s.prefix().len() + s.period().len();
    let xs = s.unroll(n + span + 1);
    let ys = t.unroll(n + 1);
    match op {
        0 => l.join(xs[n], ys[n]),
        1 => l.meet(xs[n], ys[n]),
        2 => xs[0],
        3 => xs[n + 1],
        4 => l.join_all(xs[n..n + span].iter().copied()),
        5 => l.meet_all(xs[n..n + span].iter().copied()),
        6 => f.apply(xs[n]),
        7 => (0..n).fold(xs[n], |x, _| f.apply(x)),
        8 => l.bot(),
        _ => l.top(),
    }
}

fn lasso_op(op: usize, s: &Lasso, t: &Lasso, f: &MonotoneMap) -> Lasso {
    match op {
        0 => s.op_join(t).unwrap(),
        1 => s.op_meet(t).unwrap(),
        2 => s.op_head(),
        3 => s.op_shift(),
        4 => s.op_majorum(),
        5 => s.op_minorum(),
        6 => s.op_apply(f).unwrap(),
        7 => s.op_orbit(f).unwrap(),
        8 => Lasso::op_bot(s.lattice()),
        _ => Lasso::op_top(s.lattice()),
    }
}

fn criterion_7() -> Outcome {
    let pool = catalogue();
    let mismatches: Vec<String> = (0..100u64)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007 ^ chunk);
            let pool = &pool;
            (0..1000).filter_map(move |i| {
                let l = &pool[rng.gen_range(0..pool.len())];
                let (s, t) = (random_lasso(l, &mut rng), random_lasso(l, &mut rng));
                let f = MonotoneMap::random(l, &mut rng);
                let op = i % 10;
                let r = lasso_op(op, &s, &t, &f);
                let lcm = s.period().len().lcm(&t.period().len()).lcm(&r.period().len());
                let window = s.prefix().len().max(t.prefix().len()).max(r.prefix().len()) + 2 * lcm + 2;
                (0..window).find(|&n| r.at(n) != unrolled(op, &s, &t, &f, n)).map(|n| format!("op {op} on {s}, {t}, index {n}"))
            })
        })
        .collect();
    report(
        "7",
        "lasso operations vs unrolled evaluation (tolerance: 0 mismatches in 10^5)",
        mismatches.is_empty(),
        format!("100000 cases over the catalogue, {} mismatches {:?}", mismatches.len(), mismatches.iter().take(3).collect::<Vec<_>>()),
    )
}

fn side(kind: LinkKind, v: &str, d: usize) -> Term {
    let t = Term::shift_n(Term::var(v), d);
    match kind {
        LinkKind::Shift => t,
        LinkKind::Head => Term::head(t),
    }
}

/// Graph verdicts and shortest derivation heights up to `deep`, over all
/// premise sets of at most two homogeneous identities in `x`, `y` with degrees up to 3.
fn discrete_space(deep: usize) -> (usize, Vec<(String, Verdict, Option<usize>)>) {
    let nodes: Vec<(&str, usize)> = ["x", "y"].iter().flat_map(|v| (0..=3).map(move |d| (*v, d))).collect();
    let mut ids = Vec::new();
    for kind in [LinkKind::Shift, LinkKind::Head] {
        for (i, &(x, n)) in nodes.iter().enumerate() {
            for &(y, k) in &nodes[i + 1..] {
                ids.push((kind, Name::from(x), n, Name::from(y), k, Identity::eq(side(kind, x, n), side(kind, y, k))));
            }
        }
    }
    let mut sets: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..ids.len() {
        sets.push(vec![i]);
        sets.extend((i + 1..ids.len()).map(|j| vec![i, j]));
    }
    let vars: BTreeSet<Name> = ["x", "y"].into_iter().map(Name::from).collect();
    let rows: Vec<_> = sets
        .par_iter()
        .flat_map_iter(|set| {
            let premises: Vec<Identity> = set.iter().map(|&i| ids[i].5.clone()).collect();
            let p = HomogeneousPremises::from_identities(&premises).unwrap();
            let mut sat = Saturation::new(&vars, Universe::Homogeneous(4 + deep), &premises, &[]).unwrap();
            sat.run(deep);
            let shown: Vec<String> = premises.iter().map(|p| p.to_string()).collect();
            ids.iter()
                .map(|(kind, x, n, y, k, goal)| {
                    let graph = match kind {
                        LinkKind::Shift => decide_shift(&p, x, *n, y, *k, 12),
                        LinkKind::Head => decide_head(&p, x, *n, y, *k, 12),
                    }
                    .unwrap();
                    (format!("{{{}}} |- {goal}", shown.join(", ")), graph, sat.provable_at(goal))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    (sets.len(), rows)
}

fn criterion_8() -> Vec<Outcome> {
    const DEPTH: usize = 8;
    const DEEP: usize = 14;
    let (sets, rows) = discrete_space(DEEP);
    let strict: Vec<&(String, Verdict, Option<usize>)> =
        rows.iter().filter(|(_, g, h)| (*g == Verdict::Provable) != h.is_some_and(|h| h <= DEPTH)).collect();
    // The shortfall as recorded: every disagreement is a graph-provable goal whose
    // shortest derivation is just over the depth limit.
    let explained = strict.iter().all(|(_, g, h)| *g == Verdict::Provable && h.is_some_and(|h| h > DEPTH && h <= DEEP));
    let deep_agree = rows.iter().all(|(_, g, h)| (*g == Verdict::Provable) == h.is_some());
    let heights: BTreeSet<usize> = strict.iter().filter_map(|r| r.2).collect();
    let a = report(
        "8a",
        "graph decision vs depth-8 proof search, exhaustive (tolerance: 0 disagreements)",
        strict.is_empty(),
        format!(
            "{sets} premise sets, {} instances, {} disagreements (all graph-provable goals whose shortest derivation has height {heights:?}){}; e.g. {}",
            rows.len(),
            strict.len(),
            if explained { "" } else { " [UNEXPLAINED]" },
            strict.first().map(|r| r.0.as_str()).unwrap_or("-")
        ),
    );
    let b = report(
        "8b",
        "graph decision vs depth-14 proof search, same space (tolerance: 0 disagreements)",
        deep_agree,
        format!("{} instances, {} disagreements", rows.len(), rows.iter().filter(|(_, g, h)| (*g == Verdict::Provable) != h.is_some()).count()),
    );

    let mut semantic = Vec::new();
    for n in 1..=8 {
        let r = validity_family_flatness(n, &SearchConfig::default().with_trials(2000)).unwrap();
        semantic.push((n, !r.sampled.found() && r.violations == 0 && r.enumerated_premises_held > 0));
    }
    let c = report(
        "8c",
        "period-N flatness quasiequation valid for N = 1..8 (tolerance: 0 violations, sampled and enumerated)",
        semantic.iter().all(|s| s.1),
        format!("{semantic:?}"),
    );

    let theta = theta_axioms();
    let start = Instant::now();
    let underived: Vec<(usize, bool)> = (5..=8)
        .map(|n| {
            let q = flatness_quasieq(n);
            (n, proof_search_oracle(&q.premises, &q.conclusion, 10, &theta).unwrap() == OracleVerdict::Unknown)
        })
        .collect();
    let d = report(
        "8d",
        "flatness for N = 5..8 not found from the four head/shift axioms by depth-10 search (evidence only)",
        underived.iter().all(|u| u.1),
        format!("{underived:?} (true = not derived), {:.1} s", start.elapsed().as_secs_f64()),
    );
    let mut out = vec![a, b, c, d];
    if !explained {
        out[0].id = "8a!";
    }
    out
}

fn criterion_9() -> Outcome {
    let dir = root().join("crates/core/tests/negative");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut wrong = Vec::new();
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let expect = text.lines().next().and_then(|l| l.strip_prefix("# expect: ")).unwrap().trim().to_string();
        let out = Command::new(env!("CARGO_BIN_EXE_aic")).args(["check", "--json"]).arg(f).output().unwrap();
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let class = v["error"]["class"].as_str().unwrap_or("accepted").to_string();
        if out.status.code() != Some(1) || class != expect {
            wrong.push(format!("{}: expected {expect}, got {class} (exit {:?})", f.file_name().unwrap().to_string_lossy(), out.status.code()));
        }
    }
    report(
        "9",
        "kernel negative suite (tolerance: 20 scripts, each rejected with its class, exit 1)",
        files.len() == 20 && wrong.is_empty(),
        format!("{} scripts, {} wrong {wrong:?}", files.len(), wrong.len()),
    )
}

fn main() -> ExitCode {
    let mut all = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(), criterion_6(), criterion_7()];
    all.extend(criterion_8());
    all.push(criterion_9());
    let passed = all.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria lines pass", all.len());
    let unexpected: Vec<String> =
        all.iter().filter(|o| !o.pass && !KNOWN_SHORTFALLS.contains(&o.id)).map(|o| format!("{} {}: {}", o.id, o.title, o.detail)).collect();
    for o in all.iter().filter(|o| !o.pass && KNOWN_SHORTFALLS.contains(&o.id)) {
        println!("known shortfall {}: {}", o.id, o.title);
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected failures: {unexpected:#?}");
        ExitCode::FAILURE
    }
}
