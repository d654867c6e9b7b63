//! The acceptance gate: one check per shipping requirement, run in a fixed
//! order with one printed line each. Corpora are seeded, so every run sees
//! the same structures and sentences. Budgets are wall-clock for the whole
//! criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! on a green run; on a red run the report prints either way.

mod common;

use common::{naive_eval, naive_structures, random_structure, SentenceGen};
use fointerp::classes::{gen_random, ClassId, SizeSpec};
use fointerp::constructions::{
    build, marker_formula, q_link_count, schema, ConstructionKind, Marker,
};
use fointerp::decide::{decide_pi2, decide_pi2_in_class, search_counterexample, DecideOptions};
use fointerp::fixtures;
use fointerp::interpret::translation_class;
use fointerp::structure::definable_set;
use fointerp::transform::to_prenex_toward;
use fointerp::{
    classify, eval, parse, to_nnf, to_prenex, translate, translate_open, verify, FiniteStructure,
    Formula, PrefixKind, Signature,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::panic::catch_unwind;
use std::time::Instant;

/// 50 bipartite graphs with sides in {3, 4}, mixed densities.
fn bipartite_corpus() -> Vec<FiniteStructure> {
    let dims = [(3, 3), (3, 4), (4, 3), (4, 4)];
    let probs = [0.3, 0.5, 0.7];
    (0..50u64)
        .map(|i| {
            let (left, right) = dims[i as usize % 4];
            let spec = SizeSpec::Bipartite {
                left,
                right,
                edge_prob: probs[i as usize % 3],
            };
            gen_random(ClassId::BipartiteGraph3, spec, 0xB1B + i).unwrap()
        })
        .collect()
}

/// 50 pairs of equivalences on at most 6 points.
fn two_eq_corpus() -> Vec<FiniteStructure> {
    (0..50u64)
        .map(|i| {
            let n = 1 + i as usize % 6;
            gen_random(ClassId::TwoEq, SizeSpec::Elements(n), 0x2E0 + i).unwrap()
        })
        .collect()
}

fn verify_corpus(
    kind: ConstructionKind,
    sources: &[FiniteStructure],
    budget_secs: f64,
) -> Result<String, String> {
    let start = Instant::now();
    let sch = schema(kind);
    for (i, a) in sources.iter().enumerate() {
        let w = build(kind, a).map_err(|e| format!("build of sample {i}: {e}"))?;
        let outcome = verify(&sch, a, &w).map_err(|e| format!("verify of sample {i}: {e}"))?;
        if !outcome.valid() {
            return Err(format!("sample {i} failed verification"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > budget_secs {
        return Err(format!(
            "all {} samples verified but took {secs:.1}s, budget {budget_secs:.0}s",
            sources.len()
        ));
    }
    Ok(format!(
        "{} builds verified in {secs:.1}s",
        sources.len()
    ))
}

fn criterion_1() -> Result<String, String> {
    let mut sources = bipartite_corpus();
    sources.push(fixtures::bipartite_2x2_matching());
    verify_corpus(ConstructionKind::BipartiteInTwoEqWithParams, &sources, 60.0)
}

fn criterion_2() -> Result<String, String> {
    verify_corpus(ConstructionKind::BipartiteInTwoEq, &bipartite_corpus(), 300.0)
}

fn criterion_3() -> Result<String, String> {
    let start = Instant::now();
    let sources = two_eq_corpus();
    let mut detail = String::new();
    for kind in [
        ConstructionKind::TwoEqInOrderWithParams,
        ConstructionKind::TwoEqInOrder,
    ] {
        detail = verify_corpus(kind, &sources, 60.0).map_err(|e| format!("{kind:?}: {e}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 60.0 {
        return Err(format!("both kinds passed but took {secs:.1}s, budget 60s"));
    }
    let _ = detail;
    Ok(format!(
        "both order kinds on {} sources in {secs:.1}s",
        sources.len()
    ))
}

fn criterion_4() -> Result<String, String> {
    let sources = bipartite_corpus();
    let table = [("cL1", "cLt1", 4), ("cR1", "cRt1", 3), ("cP1", "cPt1", 2), ("cN1", "cNt1", 1)];
    for (i, a) in sources.iter().enumerate() {
        let w = build(ConstructionKind::BipartiteInTwoEq, a).map_err(|e| e.to_string())?;
        let b = &w.structure;
        for (x, y, want) in table {
            let ex = b.element(x).ok_or(format!("sample {i}: no element {x}"))?;
            let ey = b.element(y).ok_or(format!("sample {i}: no element {y}"))?;
            let got = q_link_count(b, ex, ey).map_err(|e| format!("sample {i}: {e}"))?;
            if got != want {
                return Err(format!("sample {i}: {x}/{y} link count {got}, expected {want}"));
            }
        }
    }
    Ok(format!("4/3/2/1 on all {} builds", sources.len()))
}

fn named_set(b: &FiniteStructure, stem: &str, count: usize) -> Result<BTreeSet<usize>, String> {
    (1..=count)
        .map(|k| {
            let name = format!("{stem}{k}");
            b.element(&name).ok_or(format!("no element {name}"))
        })
        .collect()
}

fn criterion_5() -> Result<String, String> {
    let mut checked = 0;
    for (i, a) in bipartite_corpus().iter().enumerate() {
        let w = build(ConstructionKind::BipartiteInTwoEq, a).map_err(|e| e.to_string())?;
        let b = &w.structure;
        let m = a.tuples("L").map_err(|e| e.to_string())?.len();
        let n = a.tuples("R").map_err(|e| e.to_string())?.len();
        let mut expected: Vec<(Marker, BTreeSet<usize>)> = vec![
            (Marker::Left, (0..m).collect()),
            (Marker::Right, (m..m + n).collect()),
        ];
        let mut tags = named_set(b, "cP", 6)?;
        tags.extend(named_set(b, "cPt", 6)?);
        expected.push((Marker::EdgeTags, tags));
        let mut tags = named_set(b, "cN", 7)?;
        tags.extend(named_set(b, "cNt", 7)?);
        expected.push((Marker::NonEdgeTags, tags));
        for (marker, want) in expected {
            let got = definable_set(b, &marker_formula(marker), "x").map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("sample {i}: {marker:?} defines {got:?}, expected {want:?}"));
            }
            checked += 1;
        }
    }
    for (i, a) in two_eq_corpus().iter().enumerate() {
        let w = build(ConstructionKind::TwoEqInOrder, a).map_err(|e| e.to_string())?;
        let origin = definable_set(&w.structure, &marker_formula(Marker::OrderOrigin), "x")
            .map_err(|e| e.to_string())?;
        let c1 = w.structure.element("c1").ok_or("no element c1")?;
        if origin != BTreeSet::from([c1]) {
            return Err(format!("two-eq sample {i}: origin marker defines {origin:?}"));
        }
        let w = build(ConstructionKind::TwoEqInOrderWithParams, a).map_err(|e| e.to_string())?;
        let anchor = definable_set(&w.structure, &marker_formula(Marker::OrderAnchor), "y")
            .map_err(|e| e.to_string())?;
        let astar = w.structure.element("astar").ok_or("no element astar")?;
        if anchor != BTreeSet::from([astar]) {
            return Err(format!("two-eq sample {i}: anchor marker defines {anchor:?}"));
        }
        checked += 2;
    }
    Ok(format!("{checked} definable sets matched exactly"))
}

fn criterion_6() -> Result<String, String> {
    let start = Instant::now();
    let mut checked = 0;
    for kind in ConstructionKind::ALL {
        let a = match kind {
            ConstructionKind::BipartiteInTwoEqWithParams => fixtures::bipartite_2x2_matching(),
            ConstructionKind::BipartiteInTwoEq => fixtures::bipartite_3x3_diagonal(),
            _ => fixtures::two_eq_two_by_two(),
        };
        let sch = schema(kind);
        let w = build(kind, &a).map_err(|e| e.to_string())?;
        let mut gen = SentenceGen::new(0x6ACC + kind as u64, &sch.source);
        for i in 0..100 {
            let phi = gen.sentence(2);
            let t = translate_open(&sch, &phi).map_err(|e| format!("{kind:?} {i}: {e}"))?;
            let source_truth = naive_eval(&a, &phi);
            let host_truth =
                eval(&w.structure, &t, &w.params).map_err(|e| format!("{kind:?} {i}: {e}"))?;
            if source_truth != host_truth {
                return Err(format!(
                    "{kind:?} sentence {i} disagrees (source {source_truth}): {phi}"
                ));
            }
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 300.0 {
        return Err(format!("{checked} sentences agreed but took {secs:.1}s, budget 300s"));
    }
    Ok(format!("{checked} translated sentences agreed in {secs:.1}s"))
}

fn criterion_7() -> Result<String, String> {
    let mut checked = 0;
    for kind in [ConstructionKind::BipartiteInTwoEq, ConstructionKind::TwoEqInOrder] {
        let sch = schema(kind);
        let mut gen = SentenceGen::new(0x7ACC + kind as u64, &sch.source);
        let vars = ["v1".to_string(), "v2".to_string()];
        for shape in 0..3 {
            for _ in 0..40 {
                let m = gen.matrix(&vars, 3);
                let phi = match shape {
                    0 => Formula::Exists(vec!["v1".into(), "v2".into()], Box::new(m)),
                    1 => Formula::Exists(
                        vec!["v1".into()],
                        Box::new(Formula::Forall(vec!["v2".into()], Box::new(m))),
                    ),
                    _ => Formula::Forall(
                        vec!["v1".into()],
                        Box::new(Formula::Exists(vec!["v2".into()], Box::new(m))),
                    ),
                };
                let bound = translation_class(&sch, classify(&phi)).map_err(|e| e.to_string())?;
                let got = classify(&translate(&sch, &phi).map_err(|e| e.to_string())?);
                let fits = match bound.kind {
                    PrefixKind::Sigma => got.within_sigma(bound.k),
                    PrefixKind::Pi => got.within_pi(bound.k),
                    PrefixKind::Both => got.k <= bound.k,
                };
                if !fits {
                    return Err(format!("{kind:?}: {got} outside {bound} for {phi}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} translations stayed within their class bound"))
}

fn criterion_8() -> Result<String, String> {
    let start = Instant::now();
    let mut checked = 0;

    let sigs = [
        Signature::graph(),
        Signature::new([("E", 2), ("U", 1)]).unwrap(),
        Signature::two_eq(),
    ];
    for (si, sig) in sigs.iter().enumerate() {
        let mut gen = SentenceGen::new(0x8ACC + si as u64, sig);
        let vars = ["u1".to_string(), "u2".to_string(), "e1".to_string()];
        for i in 0..10 {
            let matrix = gen.matrix(&vars, 3);
            let f = Formula::Forall(
                vec!["u1".into(), "u2".into()],
                Box::new(Formula::Exists(vec!["e1".into()], Box::new(matrix))),
            );
            let verdict =
                decide_pi2(sig, &f, DecideOptions::default()).map_err(|e| e.to_string())?;
            let mut misses = 0;
            for n in 1..=verdict.bound {
                misses += naive_structures(sig, n)
                    .iter()
                    .filter(|s| !naive_eval(s, &f))
                    .count();
            }
            if verdict.is_valid() != (misses == 0) {
                return Err(format!("signature {si} sentence {i}: decider disagrees on {f}"));
            }
            checked += 1;
        }
    }

    let battery = [
        (ClassId::TwoEq, "forall x. P(x,x)", true),
        (ClassId::TwoEq, "forall x. forall y. (P(x,y) -> P(y,x))", true),
        (ClassId::TwoEq, "forall x. exists y. (P(x,y) & Q(x,y))", true),
        (ClassId::TwoEq, "forall x. exists y. (P(x,y) & !(x = y))", false),
        (ClassId::TwoEq, "forall x. forall y. (P(x,y) -> Q(x,y))", false),
        (ClassId::LEq, "forall x. !(x < x)", true),
        (ClassId::LEq, "forall x. forall y. (x < y -> !(y < x))", true),
        (ClassId::LEq, "forall x. exists y. x < y", false),
        (ClassId::LEq, "forall x. forall y. (x < y | y < x)", false),
        (ClassId::LEq, "forall x. exists y. (x ≈ y & !(y < x) & !(x < y))", true),
    ];
    for (class, text, expected) in battery {
        let f = parse(text).unwrap();
        let verdict =
            decide_pi2_in_class(class, &f, DecideOptions::default()).map_err(|e| e.to_string())?;
        if verdict.is_valid() != expected {
            return Err(format!("{class:?} {text}: verdict {}", verdict.outcome));
        }
        let found = search_counterexample(class, &f, verdict.bound, 24)
            .map_err(|e| format!("{class:?} {text}: {e}"))?;
        if verdict.is_valid() != found.is_none() {
            return Err(format!("{class:?} {text}: decider and bounded search disagree"));
        }
        checked += 1;
    }

    let secs = start.elapsed().as_secs_f64();
    if secs > 120.0 {
        return Err(format!("{checked} checks passed but took {secs:.1}s, budget 120s"));
    }
    Ok(format!("{checked} verdicts matched the reference in {secs:.1}s"))
}

fn criterion_9() -> Result<String, String> {
    let sources = bipartite_corpus();
    for (i, a) in sources.iter().enumerate() {
        let b = build(ConstructionKind::BipartiteInTwoEq, a)
            .map_err(|e| e.to_string())?
            .structure;
        for x in 0..b.size() {
            for y in 0..b.size() {
                if x != y
                    && b.contains_tuple("P", &[x, y]).unwrap()
                    && b.contains_tuple("Q", &[x, y]).unwrap()
                {
                    return Err(format!("sample {i}: {x} and {y} agree in both P and Q"));
                }
            }
        }
    }
    Ok(format!("element pairs distinct in P or Q on all {} builds", sources.len()))
}

fn criterion_10() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10ACC);
    let mut checked = 0;
    for (si, sig) in [Signature::bipartite(), Signature::two_eq()].iter().enumerate() {
        let mut gen = SentenceGen::new(0x10ACC + si as u64, sig);
        for i in 0..100 {
            let f = gen.sentence(2);
            let text = f.to_string();
            let back = parse(&text).map_err(|e| format!("sig {si} sentence {i}: {e}"))?;
            if back != f {
                return Err(format!("sig {si} sentence {i}: round trip changed {text}"));
            }
            let forms = [
                to_nnf(&f),
                to_prenex(&f),
                to_prenex_toward(&f, PrefixKind::Pi),
            ];
            for n in 1..=3 {
                for _ in 0..3 {
                    let s = random_structure(sig, n, &mut rng);
                    let want = naive_eval(&s, &f);
                    for g in &forms {
                        let got = eval(&s, g, &Default::default())
                            .map_err(|e| format!("sig {si} sentence {i}: {e}"))?;
                        if got != want {
                            return Err(format!(
                                "sig {si} sentence {i}: {g} evaluates to {got}, source {want}"
                            ));
                        }
                    }
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} formulas round-tripped and kept their truth"))
}

#[test]
fn acceptance_gate() {
    let criteria: [(&str, fn() -> Result<String, String>); 10] = [
        ("parameterized bipartite corpus", criterion_1),
        ("parameter-free bipartite corpus", criterion_2),
        ("order constructions corpus", criterion_3),
        ("tag pair link counts", criterion_4),
        ("marker definable sets", criterion_5),
        ("translation preservation", criterion_6),
        ("translation prefix bookkeeping", criterion_7),
        ("universal-existential decider", criterion_8),
        ("host element distinctness", criterion_9),
        ("syntax round trips and normal forms", criterion_10),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match catch_unwind(run) {
            Ok(Ok(detail)) => format!("criterion {:>2}: pass - {name}: {detail}", i + 1),
            Ok(Err(detail)) => {
                failures.push(format!("criterion {} ({name}): {detail}", i + 1));
                format!("criterion {:>2}: FAIL - {name}: {detail}", i + 1)
            }
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panicked".to_string());
                failures.push(format!("criterion {} ({name}): panic: {msg}", i + 1));
                format!("criterion {:>2}: FAIL - {name}: panic: {msg}", i + 1)
            }
        };
        println!("{line}");
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}
