use aic_core::corpus::{gen_kind_proof, gen_kind_term, kind_script, parse_document, Corpus, CorpusError};
use aic_core::kernel::{check, to_base};
use aic_core::rules::aic1_additions;
use aic_core::term::{parse_identity, Name, Term};
use std::collections::BTreeSet;
use std::time::Instant;

fn corpus() -> Corpus {
    Corpus::builtin().unwrap()
}

#[test]
fn every_proof_checks() {
    let corpus = corpus();
    let failures: Vec<_> = corpus
        .check_all()
        .into_iter()
        .filter_map(|(name, r)| r.err().map(|e| format!("{name}: {e}")))
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    assert!(corpus.len() >= 30, "only {} proofs", corpus.len());
}

#[test]
fn headline_statements() {
    let c = corpus();
    let tkp = c.get("tkp-fp").unwrap();
    assert_eq!(tkp.ruleset, "AIC1+wcont(F)");
    assert_eq!(tkp.quasieq.conclusion, parse_identity("F dia F* a = dia F* a").unwrap());
    assert_eq!(c.get("ol-fp").unwrap().ruleset, "AIC1+wcocont(F)+acont(F)");
    assert_eq!(c.get("collapse-2").unwrap().quasieq.conclusion, parse_identity("dia box dia a = box dia a").unwrap());
    for name in [
        "tkp-above",
        "tkp-least",
        "dia-quasi-pre-fp",
        "dia-quasi-post-fp",
        "kleene-fp",
        "park",
        "park-gen",
        "ol-post-fp",
        "ol-pre-fp",
        "dia-exp",
        "box-exp",
        "shift-point-down",
        "shift-point-up",
        "dia-over-join",
    ] {
        assert!(c.get(name).is_some(), "missing {name}");
    }
}

#[test]
fn aic1_additions_are_derived_from_aic0() {
    let c = corpus();
    let sig: BTreeSet<Name> = [Name::from("F")].into();
    let additions = aic1_additions(&sig);
    assert_eq!(additions.len(), 31);
    for rule in additions.iter() {
        let p = c.get(&rule.name).unwrap_or_else(|| panic!("no derivation of {}", rule.name));
        assert_eq!(p.ruleset, "AIC0", "{}", rule.name);
        assert_eq!(p.quasieq.premises, rule.premises, "{}", rule.name);
        assert_eq!(p.quasieq.conclusion, rule.conclusion, "{}", rule.name);
        c.check_proof(p, None).unwrap();
    }
}

#[test]
fn fixed_point_proof_flattens_to_base_rules() {
    let c = corpus();
    for name in ["tkp-fp", "ol-fp", "dia-exp"] {
        let p = c.get(name).unwrap();
        let rules = c.ruleset_for(p, None).unwrap();
        let (flat, base) = to_base(&p.derivation, &p.quasieq, &rules).unwrap();
        assert!(flat.size() > p.derivation.size());
        check(&flat, &p.quasieq, &base).unwrap();
        for r in flat.rules_used() {
            assert!(base.contains(&r), "{name}: {r} not in base");
        }
    }
}

#[test]
fn proofs_need_their_declared_rules() {
    let c = corpus();
    // Without the continuity atom the fixed-point proofs fail.
    assert!(c.check_proof(c.get("tkp-fp").unwrap(), Some("AIC1")).is_err());
    assert!(c.check_proof(c.get("ol-pre-fp").unwrap(), Some("AIC1+wcont(F)")).is_err());
    // Head axioms are not part of AIC1.
    assert!(c.check_proof(c.get("hd-flat").unwrap(), Some("AIC1")).is_err());
}

#[test]
fn tampered_documents_are_rejected() {
    let c = corpus();
    let text = &c.get("trans").unwrap().script;
    let bad = text.replace("leaf 1 :: b <= c\n  step eq-trans", "leaf 0 :: b <= c\n  step eq-trans");
    assert_ne!(&bad, text);
    let p = parse_document(&bad, "bad").unwrap();
    assert!(matches!(c.check_proof(&p, None), Err(CorpusError::Kernel { .. })));

    let bad = c.get("dia-desc").unwrap().script.replace("dia-ind-inv", "box-coind-inv");
    let p = parse_document(&bad, "bad").unwrap();
    assert!(c.check_proof(&p, None).is_err());
}

#[test]
fn dependency_errors() {
    let doc = "@name x\n@rules AIC1\n@uses nowhere\nshow a <= a\nstep reflex :: a <= a\n";
    let p = parse_document(doc, "x").unwrap();
    assert!(matches!(corpus().check_proof(&p, None), Err(CorpusError::UnknownProof(_))));

    let a = parse_document("@name a\n@rules AIC1\n@uses b\nshow a <= a\nstep reflex :: a <= a\n", "a").unwrap();
    let b = parse_document("@name b\n@rules AIC1\n@uses a\nshow a <= a\nstep reflex :: a <= a\n", "b").unwrap();
    let cyc = Corpus::new(vec![a, b]).unwrap();
    assert!(matches!(cyc.check("a"), Err(CorpusError::Cycle(_))));

    // A used name the rule set already has must keep its statement.
    let fake = parse_document("@name trans\n@rules AIC1\nshow a <= a\nstep reflex :: a <= a\n", "t").unwrap();
    let user = parse_document("@name u\n@rules AIC1\n@uses trans\nshow a <= a\nstep reflex :: a <= a\n", "u").unwrap();
    let mixed = Corpus::new(vec![fake, user]).unwrap();
    assert!(matches!(mixed.check("u"), Err(CorpusError::StatementMismatch(_))));
}

#[test]
fn kind_term_shapes() {
    let b = Term::var("b");
    assert_eq!(gen_kind_term(0, &b, "F"), b);
    assert_eq!(gen_kind_term(2, &b, "F").to_string(), "F (F b /\\ b) /\\ b");
}

#[test]
fn kind_proofs_check_and_grow_linearly() {
    let c = corpus();
    let sizes: Vec<usize> = (0..=8).map(|k| gen_kind_proof(k, &c).unwrap_or_else(|e| panic!("k={k}: {e}")).size()).collect();
    let steps: Vec<isize> = sizes.windows(2).skip(1).map(|w| w[1] as isize - w[0] as isize).collect();
    assert!(steps.iter().all(|&d| d == steps[0]), "sizes {sizes:?}");
    let zero = gen_kind_proof(0, &c).unwrap();
    assert_eq!(zero.quasieq.conclusion, parse_identity("dia F* bot <= b").unwrap());
    assert!(zero.derivation.rules_used().contains("park"));
}

#[test]
fn kind_eight_is_fast() {
    let c = corpus();
    let start = Instant::now();
    gen_kind_proof(8, &c).unwrap();
    assert!(start.elapsed().as_secs_f64() < 2.0, "{:?}", start.elapsed());
    assert!(kind_script(8).contains("@lemma kind-asc-8"));
}
