//! End-to-end runs of the four constructions through the public API:
//! generate or load a source structure, build the host, machine-check the
//! three interpretation conditions, and translate sentences across.

mod common;

use common::naive_eval;
use fointerp::classes::{gen_random, ClassId, SizeSpec};
use fointerp::constructions::{build, schema, ConstructionKind};
use fointerp::fixtures;
use fointerp::interpret::translation_class;
use fointerp::{
    assignment, classify, eval, parse, translate, translate_open, verify, Witness,
};

#[test]
fn random_bipartite_sources_verify_with_parameters() {
    let sch = schema(ConstructionKind::BipartiteInTwoEqWithParams);
    for seed in 0..8 {
        let spec = SizeSpec::Bipartite {
            left: 2 + (seed as usize % 3),
            right: 2 + (seed as usize / 3 % 3),
            edge_prob: 0.4,
        };
        let a = gen_random(ClassId::BipartiteGraph, spec, seed).unwrap();
        let w = build(ConstructionKind::BipartiteInTwoEqWithParams, &a).unwrap();
        let outcome = verify(&sch, &a, &w).unwrap();
        assert!(outcome.valid(), "seed {seed}");
        assert_eq!(outcome.report.domain.len(), a.size(), "seed {seed}");
    }
}

#[test]
fn random_two_eq_sources_verify_through_both_order_kinds() {
    for kind in [
        ConstructionKind::TwoEqInOrderWithParams,
        ConstructionKind::TwoEqInOrder,
    ] {
        let sch = schema(kind);
        for seed in 0..8 {
            let n = 1 + (seed as usize) % 6;
            let a = gen_random(ClassId::TwoEq, SizeSpec::Elements(n), 100 + seed).unwrap();
            let w = build(kind, &a).unwrap();
            let outcome = verify(&sch, &a, &w).unwrap();
            assert!(outcome.valid(), "{kind:?} seed {seed} n {n}");
        }
    }
}

#[test]
fn host_for_a_different_graph_fails_only_the_isomorphism_condition() {
    let sch = schema(ConstructionKind::BipartiteInTwoEqWithParams);
    let matching = fixtures::bipartite_2x2_matching();
    let three_edges = fixtures::bipartite_2x2_three_edges();
    let w = build(ConstructionKind::BipartiteInTwoEqWithParams, &matching).unwrap();

    // The host codes a graph with two edges, so checking it against the
    // three-edge source leaves conditions 1 and 2 intact and breaks the
    // isomorphism.
    let outcome = verify(&sch, &three_edges, &w).unwrap();
    assert!(outcome.report.domain_nonempty);
    assert!(outcome.report.complement_consistent);
    assert!(outcome.report.induced.is_some());
    assert!(outcome.bijection.is_none());
    assert!(!outcome.valid());
}

#[test]
fn colliding_tag_parameters_break_the_complement_condition() {
    let sch = schema(ConstructionKind::BipartiteInTwoEqWithParams);
    let a = fixtures::bipartite_2x2_matching();
    let good = build(ConstructionKind::BipartiteInTwoEqWithParams, &a).unwrap();

    // Pointing the edge tag and the non-edge tag at the same class makes
    // the positive and negative edge definitions both true on edge pairs.
    let mut params = good.params.clone();
    params.insert("yN".into(), params["yP"]);
    let outcome = verify(&sch, &a, &Witness::new(good.structure.clone(), params)).unwrap();
    assert!(outcome.report.domain_nonempty);
    assert!(!outcome.report.complement_consistent);
    assert!(outcome.report.violations.iter().any(|(label, _)| label == "E"));
    assert!(!outcome.valid());

    // Swapping the side anchors keeps everything consistent but carves
    // the reversed graph. On a square matching that is isomorphic to the
    // source, so unequal sides are needed to see the failure.
    let mut lopsided = fointerp::FiniteStructure::new(fointerp::Signature::bipartite(), 5).unwrap();
    lopsided.set_tuples("L", [vec![0], vec![1]]).unwrap();
    lopsided
        .set_tuples("R", [vec![2], vec![3], vec![4]])
        .unwrap();
    lopsided.add_tuple("E", &[0, 2]).unwrap();
    let good = build(ConstructionKind::BipartiteInTwoEqWithParams, &lopsided).unwrap();
    let mut params = good.params.clone();
    let (yl, yr) = (params["yL"], params["yR"]);
    params.insert("yL".into(), yr);
    params.insert("yR".into(), yl);
    let outcome = verify(
        &sch,
        &lopsided,
        &Witness::new(good.structure.clone(), params),
    )
    .unwrap();
    assert!(outcome.report.domain_nonempty);
    assert!(outcome.report.complement_consistent);
    assert!(outcome.bijection.is_none());
    assert!(!outcome.valid());
}

#[test]
fn misplaced_order_anchor_empties_the_domain() {
    let sch = schema(ConstructionKind::TwoEqInOrderWithParams);
    let a = fixtures::two_eq_two_by_two();
    let good = build(ConstructionKind::TwoEqInOrderWithParams, &a).unwrap();
    let outcome = verify(
        &sch,
        &a,
        &Witness::new(good.structure.clone(), assignment(&[("y", 0)])),
    )
    .unwrap();
    assert!(!outcome.report.domain_nonempty);
    assert!(outcome.report.induced.is_none());
    assert!(!outcome.valid());
}

#[test]
fn open_translations_agree_with_the_source_on_random_inputs() {
    // Lightweight version of the acceptance corpus: a few seeded sentences
    // per construction, checked on both sides with the reference
    // evaluator on the source and the library evaluator on the host.
    for kind in ConstructionKind::ALL {
        let sch = schema(kind);
        let a = match kind {
            ConstructionKind::BipartiteInTwoEqWithParams => fixtures::bipartite_2x2_matching(),
            ConstructionKind::BipartiteInTwoEq => fixtures::bipartite_3x3_diagonal(),
            _ => fixtures::two_eq_two_by_two(),
        };
        let w = build(kind, &a).unwrap();
        let mut gen = common::SentenceGen::new(0xfee1 + kind as u64, &sch.source);
        for i in 0..12 {
            let phi = gen.sentence(2);
            let translated = translate_open(&sch, &phi).unwrap();
            let source_truth = naive_eval(&a, &phi);
            let host_truth = eval(&w.structure, &translated, &w.params).unwrap();
            assert_eq!(source_truth, host_truth, "{kind:?} sentence {i}: {phi}");
        }
    }
}

#[test]
fn closed_translations_of_true_sentences_hold_on_the_host() {
    let truths = [
        "forall x. forall y. (E(x,y) -> (L(x) & R(y)))",
        "exists x. exists y. E(x,y)",
        "forall x. (L(x) -> exists y. E(x,y))",
    ];
    let kind = ConstructionKind::BipartiteInTwoEqWithParams;
    let sch = schema(kind);
    let a = fixtures::bipartite_2x2_matching();
    let w = build(kind, &a).unwrap();
    for text in truths {
        let phi = parse(text).unwrap();
        assert!(naive_eval(&a, &phi), "{text}");
        let closed = translate(&sch, &phi).unwrap();
        assert!(closed.free_vars().is_empty());
        assert!(
            eval(&w.structure, &closed, &assignment(&[])).unwrap(),
            "{text}"
        );
    }
}

#[test]
fn translations_land_within_the_promised_prefix_class() {
    for kind in ConstructionKind::ALL {
        let shapes: &[&str] = match kind {
            ConstructionKind::BipartiteInTwoEqWithParams | ConstructionKind::BipartiteInTwoEq => &[
                "exists x. exists y. (E(x,y) & !(x = y))",
                "exists x. forall y. (E(x,y) | E(y,x))",
                "forall x. exists y. E(x,y)",
                "forall x. forall y. (E(x,y) -> E(y,x))",
            ],
            ConstructionKind::TwoEqInOrderWithParams | ConstructionKind::TwoEqInOrder => &[
                "exists x. exists y. (P(x,y) & !(x = y))",
                "exists x. forall y. (P(x,y) | Q(x,y))",
                "forall x. exists y. P(x,y)",
                "forall x. forall y. (P(x,y) -> P(y,x))",
            ],
        };
        let sch = schema(kind);
        for text in shapes {
            let phi = parse(text).unwrap();
            let bound = translation_class(&sch, classify(&phi)).unwrap();
            // The bound is about the translated core; closing off the
            // parameters of a parameterized schema prepends one more
            // existential block.
            let got = classify(&translate_open(&sch, &phi).unwrap());
            let fits = match bound.kind {
                fointerp::PrefixKind::Sigma => got.within_sigma(bound.k),
                fointerp::PrefixKind::Pi => got.within_pi(bound.k),
                fointerp::PrefixKind::Both => got.k <= bound.k,
            };
            assert!(fits, "{kind:?} {text}: {got} outside {bound}");
        }
    }
}
