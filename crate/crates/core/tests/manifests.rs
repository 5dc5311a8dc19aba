//! Rule inventories compared against the audited listings in `tests/manifests/`.
//! Run with `AIC_BLESS=1` to rewrite the listings after an intended change.

use aic_core::rules::{aic0_axioms, aic1_additions, aicw_axioms, continuity_rules, eq_rules, head_axioms, Continuity, RuleSet};
use aic_core::term::Name;
use std::collections::BTreeSet;
use std::path::Path;

fn check(file: &str, set: &RuleSet, expected_len: usize) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/manifests").join(file);
    let rendered = set.render();
    if std::env::var_os("AIC_BLESS").is_some() {
        std::fs::write(&path, &rendered).unwrap();
    }
    let audited = std::fs::read_to_string(&path).unwrap();
    assert_eq!(rendered, audited, "{file} drifted from its manifest");
    assert_eq!(rendered.lines().count(), expected_len, "{file}");
}

fn sig() -> BTreeSet<Name> {
    BTreeSet::from([Name::from("F")])
}

#[test]
fn equational_layer() {
    check("EQ.txt", &eq_rules(&sig()), 12);
}

#[test]
fn aic0_axiom_list() {
    check("AIC0.txt", &aic0_axioms(&sig()), 32);
}

#[test]
fn aic1_addition_list() {
    check("AIC1-additions.txt", &aic1_additions(&sig()), 31);
}

#[test]
fn aicw_axiom_list() {
    let set = aicw_axioms(&sig());
    check("AICw.txt", &set, set.len() + 3);
}

#[test]
fn head_axiom_list() {
    let set = head_axioms(&sig());
    check("HD.txt", &set, set.len());
}

#[test]
fn continuity_schemas() {
    let mut all = RuleSet::new("continuity");
    for kind in [Continuity::Omega, Continuity::OmegaCo, Continuity::Countable, Continuity::CountableCo] {
        all.include(&continuity_rules(kind, "F")).unwrap();
    }
    check("continuity.txt", &all, 4);
}
