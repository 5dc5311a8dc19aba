use aic_core::corpus::Corpus;
use aic_core::lattice::{build_lattice, catalogue};
use aic_core::rules::{builtin_rulesets, Continuity, Rule, RuleKind, RuleSet};
use aic_core::search::{
    continuity_requirements, fuzz_soundness, olszewski_check, refute, tkp_agreement, validity_family_flatness, SearchConfig,
    SearchError,
};
use aic_core::term::{parse_quasiequation, Name};
use std::collections::BTreeSet;

fn sets() -> std::collections::BTreeMap<String, RuleSet> {
    builtin_rulesets(&BTreeSet::from([Name::from("F")]))
}

fn fuzz(name: &str, trials: usize) {
    let rules = &sets()[name];
    let report = fuzz_soundness(rules, &SearchConfig::default().with_trials(trials)).unwrap_or_else(|e| panic!("{e}"));
    assert_eq!(report.entries.len(), rules.len() + rules.schemas.len());
    for e in &report.entries {
        assert!(e.premises_held > 0, "{} never had its premises hold", e.rule);
    }
}

#[test]
fn aic0_and_aic1_are_sound() {
    fuzz("AIC1", 10_000);
}

#[test]
fn aicw_is_sound() {
    fuzz("AICw", 10_000);
}

#[test]
fn continuity_rules_are_sound_under_their_filters() {
    for c in Continuity::ALL {
        let rules = aic_core::rules::parse_ruleset(&format!("{}(F)", c.keyword()), &BTreeSet::new()).unwrap();
        assert_eq!(continuity_requirements(&rules), vec![(c, Name::from("F"))]);
        fuzz_soundness(&rules, &SearchConfig::default().with_trials(2000)).unwrap();
    }
}

#[test]
fn corrupted_rule_is_caught_quickly() {
    let mut rules = RuleSet::new("bad");
    rules.insert(Rule::parse("sh-fixed", "|- sh a = a", RuleKind::Aic0).unwrap()).unwrap();
    match fuzz_soundness(&rules, &SearchConfig::default().with_trials(100)) {
        Err(SearchError::SoundnessViolation { rule, counterexample }) => {
            assert_eq!(rule, "sh-fixed");
            assert!(counterexample.replays().unwrap());
            assert!(counterexample.trial < 100);
        }
        other => panic!("expected a violation, got {other:?}"),
    }
}

#[test]
fn majorum_of_ascending_sequence_is_flat() {
    let q = parse_quasiequation("assume a <= sh a; show dia dia a <= box dia a").unwrap();
    let r = refute(&q, &SearchConfig::default().with_trials(100_000)).unwrap();
    assert!(!r.found());
    assert!(r.premises_held > 1000);
}

#[test]
fn unconditional_countable_continuity_is_refuted_on_b2() {
    let q = parse_quasiequation("show F dia a <= dia F a").unwrap();
    let cfg = SearchConfig::default().with_lattices(vec![build_lattice("B2").unwrap()]).with_trials(100);
    let c = refute(&q, &cfg).unwrap().counterexample.expect("refuted within 100 trials");
    assert!(c.replays().unwrap());
    let filtered = cfg.clone().with_trials(2000).with_continuity(Continuity::Countable, "F");
    assert!(!refute(&q, &filtered).unwrap().found());
}

#[test]
fn omega_filter_accepts_every_map_on_finite_lattices() {
    let cfg = SearchConfig::default();
    let mut rng = cfg.trial_rng(7);
    for l in catalogue() {
        for _ in 0..200 {
            let f = aic_core::lattice::MonotoneMap::random(&l, &mut rng);
            assert!(f.is_omega_continuous() && f.is_omega_cocontinuous(), "{}", f.render());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let q = parse_quasiequation("assume a <= b; show sh a <= b").unwrap();
    let cfg = SearchConfig::default().with_trials(3000).with_seed(9);
    let a = refute(&q, &cfg).unwrap();
    let b = refute(&q, &cfg).unwrap();
    let ca = a.counterexample.expect("invalid quasiequation");
    let cb = b.counterexample.unwrap();
    assert_eq!(ca.trial, cb.trial);
    assert_eq!(ca.to_string(), cb.to_string());
    assert_eq!(a.premises_held, b.premises_held);
}

#[test]
fn fixed_point_oracles_agree() {
    let cfg = SearchConfig::default().with_trials(1000);
    let r = tkp_agreement(&cfg).unwrap();
    assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    let r = olszewski_check(&cfg).unwrap();
    assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    assert!(r.conditional > 0 && r.conditional < r.trials);
}

#[test]
fn flatness_family_holds() {
    for n in 1..=8 {
        let r = validity_family_flatness(n, &SearchConfig::default().with_trials(2000)).unwrap();
        assert_eq!(r.violations, 0, "N={n}");
        assert!(r.enumerated_premises_held > 0, "N={n}");
    }
}

#[test]
fn corpus_conclusions_hold_in_sampled_models() {
    let corpus = Corpus::builtin().unwrap();
    for p in corpus.proofs() {
        let rules = corpus.ruleset_for(p, None).unwrap();
        let mut cfg = SearchConfig::default().with_trials(1000);
        cfg.continuity = continuity_requirements(&rules);
        let r = refute(&p.quasieq, &cfg).unwrap();
        assert!(!r.found(), "{}: {}", p.name, r.counterexample.unwrap());
    }
}
