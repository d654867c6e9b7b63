//! Decision procedure for universal-existential sentences over all finite
//! structures of a relational signature.
//!
//! The negation of such a sentence is existential-universal, and a model
//! of an existential-universal sentence restricted to the existential
//! witnesses is still a model. A universal-existential sentence that fails
//! anywhere therefore fails in a structure with at most as many elements
//! as it has universal variables, and checking every structure up to that
//! bound decides it.

use crate::classes::{axiom, class_members, ClassError, ClassId};
use crate::enumerate::{enumerate_structures, next_tuple, slot_count};
use crate::formula::{not, or, Formula};
use crate::signature::Signature;
use crate::structure::{eval, Assignment, EvalError, FiniteStructure};
use crate::transform::{classify, to_prenex_toward, PrefixClass, PrefixKind};
use serde_json::{json, Value};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug)]
pub struct DecideOptions {
    /// Sizes whose tuple-slot count stays within this bound are decided by
    /// exhaustive enumeration; larger ones fall back to a pruned search.
    pub slot_cap: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { slot_cap: 24 }
    }
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("prenex form lands in {class}, beyond the universal-existential fragment")]
    NotPi2 { class: PrefixClass },
    #[error("free variables {0:?} keep this from being a sentence")]
    NotASentence(Vec<String>),
    #[error("relation {relation} is not in the signature")]
    UnknownRelation { relation: String },
    #[error("relation {relation} used with arity {got}, declared with {expected}")]
    ArityMismatch {
        relation: String,
        got: usize,
        expected: usize,
    },
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Valid,
    Invalid,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Valid => "valid",
            Outcome::Invalid => "invalid",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Pi2Verdict {
    pub outcome: Outcome,
    /// Largest universe size the search had to consider.
    pub bound: usize,
    /// Smallest falsifying structure in enumeration order, when invalid.
    pub countermodel: Option<FiniteStructure>,
}

impl Pi2Verdict {
    pub fn is_valid(&self) -> bool {
        self.outcome == Outcome::Valid
    }

    pub fn to_json_value(&self) -> Value {
        let mut v = json!({
            "outcome": self.outcome.to_string(),
            "bound": self.bound,
        });
        if let Some(c) = &self.countermodel {
            v["countermodel"] = c.to_json_value();
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).unwrap()
    }
}

/// Prenex form with universals leading, rejected unless it stays within
/// the universal-existential fragment. The universal-first normal form is
/// what makes the membership test complete: a conjunction of a universal
/// and an existential sentence classifies existential-first otherwise.
fn pi2_prenex(f: &Formula) -> Result<Formula, DecideError> {
    let p = to_prenex_toward(f, PrefixKind::Pi);
    let class = classify(&p);
    if !class.within_pi(2) {
        return Err(DecideError::NotPi2 { class });
    }
    Ok(p)
}

/// Countermodel size bound: the universal variables of the prenex form,
/// at least one.
pub fn bsr_bound(f: &Formula) -> Result<usize, DecideError> {
    let p = pi2_prenex(f)?;
    let mut count = 0;
    let mut cur = &p;
    while let Formula::Forall(vs, body) = cur {
        count += vs.len();
        cur = body;
    }
    Ok(count.max(1))
}

fn check_sentence(f: &Formula, signature: &Signature) -> Result<(), DecideError> {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    if !free.is_empty() {
        return Err(DecideError::NotASentence(free));
    }
    for (relation, got) in f.relation_uses() {
        match signature.arity(&relation) {
            None => return Err(DecideError::UnknownRelation { relation }),
            Some(expected) if expected != got => {
                return Err(DecideError::ArityMismatch {
                    relation,
                    got,
                    expected,
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Does the sentence hold in every finite structure of the signature?
/// Invalid verdicts carry the smallest countermodel in enumeration order.
pub fn decide_pi2(
    signature: &Signature,
    f: &Formula,
    opts: DecideOptions,
) -> Result<Pi2Verdict, DecideError> {
    check_sentence(f, signature)?;
    let bound = bsr_bound(f)?;
    for n in 1..=bound {
        if let Some(countermodel) = find_countermodel(signature, f, n, opts.slot_cap)? {
            return Ok(Pi2Verdict {
                outcome: Outcome::Invalid,
                bound,
                countermodel: Some(countermodel),
            });
        }
    }
    Ok(Pi2Verdict {
        outcome: Outcome::Valid,
        bound,
        countermodel: None,
    })
}

fn find_countermodel(
    signature: &Signature,
    f: &Formula,
    n: usize,
    slot_cap: usize,
) -> Result<Option<FiniteStructure>, DecideError> {
    if slot_count(signature, n) <= slot_cap as u128 {
        for s in enumerate_structures(signature, n, slot_cap).unwrap() {
            if !eval(&s, f, &Assignment::new())? {
                return Ok(Some(s));
            }
        }
        Ok(None)
    } else {
        Ok(falsify_by_search(signature, f, n))
    }
}

/// Relativizes a sentence to a finitely axiomatized class: the result
/// holds in every finite structure of the class signature iff the input
/// holds in every member of the class. Falsifiers of the result are
/// members falsifying the input.
pub fn relativize_to_class(class: ClassId, f: &Formula) -> Result<Formula, DecideError> {
    pi2_prenex(f)?;
    let theta = axiom(class)?;
    Ok(to_prenex_toward(&or(not(theta), f.clone()), PrefixKind::Pi))
}

/// Does the sentence hold in every member of the class?
pub fn decide_pi2_in_class(
    class: ClassId,
    f: &Formula,
    opts: DecideOptions,
) -> Result<Pi2Verdict, DecideError> {
    let relativized = relativize_to_class(class, f)?;
    let signature = class
        .signature()
        .expect("axiomatized classes have signatures");
    decide_pi2(&signature, &relativized, opts)
}

/// Smallest member of the class falsifying the sentence, up to the size
/// limit. Exhaustive per size, so sizes with too many members to stream
/// under the cap are an error rather than a partial answer.
pub fn search_counterexample(
    class: ClassId,
    f: &Formula,
    max_size: usize,
    cap_log2: u32,
) -> Result<Option<FiniteStructure>, DecideError> {
    if let Some(signature) = class.signature() {
        check_sentence(f, &signature)?;
    } else {
        return Err(DecideError::Class(ClassError::NoAxiom));
    }
    for n in 1..=max_size {
        for s in class_members(class, n, cap_log2)? {
            if !eval(&s, f, &Assignment::new())? {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// Truth values of the strong three-valued logic; `Unknown` tracks slots
/// the search has not committed yet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum K3 {
    False,
    Unknown,
    True,
}

fn k3_not(v: K3) -> K3 {
    match v {
        K3::False => K3::True,
        K3::True => K3::False,
        K3::Unknown => K3::Unknown,
    }
}

fn k3_and(a: K3, b: K3) -> K3 {
    match (a, b) {
        (K3::False, _) | (_, K3::False) => K3::False,
        (K3::True, K3::True) => K3::True,
        _ => K3::Unknown,
    }
}

fn k3_or(a: K3, b: K3) -> K3 {
    match (a, b) {
        (K3::True, _) | (_, K3::True) => K3::True,
        (K3::False, K3::False) => K3::False,
        _ => K3::Unknown,
    }
}

/// Relation tables with an undecided state per tuple slot, laid out in the
/// same order `enumerate_structures` fills them.
struct PartialStructure {
    n: usize,
    layout: Vec<(String, usize, usize)>,
    values: Vec<Option<bool>>,
}

impl PartialStructure {
    fn new(signature: &Signature, n: usize) -> Self {
        let mut layout = Vec::new();
        let mut next = 0usize;
        for (rel, arity) in signature.relations() {
            layout.push((rel.to_string(), arity, next));
            next += n.pow(arity as u32);
        }
        PartialStructure {
            n,
            layout,
            values: vec![None; next],
        }
    }

    fn lookup(&self, rel: &str, tuple: &[usize]) -> Option<bool> {
        let (_, _, base) = self
            .layout
            .iter()
            .find(|(name, _, _)| name == rel)
            .expect("relation checked against the signature");
        let mut idx = 0usize;
        for &t in tuple {
            idx = idx * self.n + t;
        }
        self.values[base + idx]
    }

    /// Completes every undecided slot as empty.
    fn to_structure(&self, signature: &Signature) -> FiniteStructure {
        let mut s = FiniteStructure::new(signature.clone(), self.n).unwrap();
        for (rel, arity, base) in &self.layout {
            let mut tuple = vec![0usize; *arity];
            let mut idx = 0usize;
            loop {
                if self.values[base + idx] == Some(true) {
                    s.add_tuple(rel, &tuple).unwrap();
                }
                if !next_tuple(&mut tuple, self.n) {
                    break;
                }
                idx += 1;
            }
        }
        s
    }
}

fn env_value(env: &[(String, usize)], var: &str) -> usize {
    env.iter()
        .rev()
        .find(|(name, _)| name == var)
        .map(|(_, v)| *v)
        .expect("sentence has no free variables")
}

fn keval(f: &Formula, env: &mut Vec<(String, usize)>, partial: &PartialStructure) -> K3 {
    match f {
        Formula::Atom(rel, args) => {
            let tuple: Vec<usize> = args.iter().map(|a| env_value(env, a)).collect();
            match partial.lookup(rel, &tuple) {
                Some(true) => K3::True,
                Some(false) => K3::False,
                None => K3::Unknown,
            }
        }
        Formula::Equal(a, b) => {
            if env_value(env, a) == env_value(env, b) {
                K3::True
            } else {
                K3::False
            }
        }
        Formula::Not(g) => k3_not(keval(g, env, partial)),
        Formula::And(l, r) => {
            let lv = keval(l, env, partial);
            if lv == K3::False {
                return K3::False;
            }
            k3_and(lv, keval(r, env, partial))
        }
        Formula::Or(l, r) => {
            let lv = keval(l, env, partial);
            if lv == K3::True {
                return K3::True;
            }
            k3_or(lv, keval(r, env, partial))
        }
        Formula::Implies(l, r) => {
            let lv = keval(l, env, partial);
            if lv == K3::False {
                return K3::True;
            }
            k3_or(k3_not(lv), keval(r, env, partial))
        }
        Formula::Iff(l, r) => {
            let lv = keval(l, env, partial);
            let rv = keval(r, env, partial);
            k3_and(k3_or(k3_not(lv), rv), k3_or(k3_not(rv), lv))
        }
        Formula::Exists(vs, body) => quantify(body, vs, env, partial, K3::True),
        Formula::Forall(vs, body) => quantify(body, vs, env, partial, K3::False),
    }
}

/// Runs the body over every assignment of the block, short-circuiting on
/// the dominant value.
fn quantify(
    body: &Formula,
    vars: &[String],
    env: &mut Vec<(String, usize)>,
    partial: &PartialStructure,
    dominant: K3,
) -> K3 {
    let base = env.len();
    for v in vars {
        env.push((v.clone(), 0));
    }
    let mut acc = k3_not(dominant);
    loop {
        let v = keval(body, env, partial);
        if v == dominant {
            acc = dominant;
            break;
        }
        if v == K3::Unknown {
            acc = K3::Unknown;
        }
        let mut i = env.len();
        let exhausted = loop {
            if i == base {
                break true;
            }
            i -= 1;
            env[i].1 += 1;
            if env[i].1 < partial.n {
                break false;
            }
            env[i].1 = 0;
        };
        if exhausted {
            break;
        }
    }
    env.truncate(base);
    acc
}

/// Depth-first over tuple slots, empty side first, pruning branches the
/// partial tables already decide. Branch order mirrors the enumeration
/// order, so the first falsifier found is the enumeration-minimal one.
fn falsify_by_search(signature: &Signature, f: &Formula, n: usize) -> Option<FiniteStructure> {
    let mut partial = PartialStructure::new(signature, n);
    if dfs(f, &mut partial, 0) {
        Some(partial.to_structure(signature))
    } else {
        None
    }
}

fn dfs(f: &Formula, partial: &mut PartialStructure, depth: usize) -> bool {
    match keval(f, &mut Vec::new(), partial) {
        K3::True => false,
        K3::False => true,
        K3::Unknown => {
            for b in [false, true] {
                partial.values[depth] = Some(b);
                if dfs(f, partial, depth + 1) {
                    return true;
                }
            }
            partial.values[depth] = None;
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::validate;
    use crate::formula::{and, atom, exists, forall};
    use crate::parser::parse;

    fn opts() -> DecideOptions {
        DecideOptions::default()
    }

    #[test]
    fn bound_counts_leading_universals() {
        let f = parse("forall x y. exists z. (E(x,z) & E(z,y))").unwrap();
        assert_eq!(bsr_bound(&f).unwrap(), 2);
        let g = parse("exists x. E(x,x)").unwrap();
        assert_eq!(bsr_bound(&g).unwrap(), 1);
    }

    #[test]
    fn membership_test_uses_the_universal_first_form() {
        // Existential-first prenexing would classify this conjunction as
        // existential-universal and reject it.
        let f = and(
            forall(&["x"], atom("P", &["x", "x"])),
            exists(&["y"], atom("Q", &["y", "y"])),
        );
        assert_eq!(bsr_bound(&f).unwrap(), 1);
    }

    #[test]
    fn genuinely_existential_universal_is_rejected() {
        let f = parse("exists x. forall y. E(x,y)").unwrap();
        assert!(matches!(
            bsr_bound(&f).unwrap_err(),
            DecideError::NotPi2 { .. }
        ));
    }

    #[test]
    fn identity_witness_is_valid() {
        let f = parse("forall x. exists y. x = y").unwrap();
        let verdict = decide_pi2(&Signature::graph(), &f, opts()).unwrap();
        assert!(verdict.is_valid());
        assert_eq!(verdict.bound, 1);
        assert!(verdict.countermodel.is_none());
    }

    #[test]
    fn successor_claim_fails_on_the_empty_structure() {
        let f = parse("forall x. exists y. E(x,y)").unwrap();
        let verdict = decide_pi2(&Signature::graph(), &f, opts()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Invalid);
        let c = verdict.countermodel.unwrap();
        assert_eq!(c.size(), 1);
        assert!(c.tuples("E").unwrap().is_empty());
    }

    #[test]
    fn symmetry_fails_with_a_single_directed_pair() {
        let f = parse("forall x y. (P(x,y) -> P(y,x))").unwrap();
        let verdict = decide_pi2(&Signature::two_eq(), &f, opts()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Invalid);
        assert_eq!(verdict.bound, 2);
        let c = verdict.countermodel.unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(
            c.tuples("P").unwrap().iter().collect::<Vec<_>>(),
            [&vec![1usize, 0]]
        );
        assert!(c.tuples("Q").unwrap().is_empty());
    }

    #[test]
    fn pruned_search_matches_enumeration() {
        let f = parse("forall x y. (P(x,y) -> P(y,x))").unwrap();
        let by_enumeration = decide_pi2(&Signature::two_eq(), &f, opts()).unwrap();
        let by_search =
            decide_pi2(&Signature::two_eq(), &f, DecideOptions { slot_cap: 0 }).unwrap();
        assert_eq!(by_search.outcome, by_enumeration.outcome);
        let (a, b) = (
            by_enumeration.countermodel.unwrap(),
            by_search.countermodel.unwrap(),
        );
        assert_eq!(a.size(), b.size());
        for rel in ["P", "Q"] {
            assert_eq!(a.tuples(rel).unwrap(), b.tuples(rel).unwrap());
        }
    }

    #[test]
    fn pruned_search_agrees_on_valid_sentences() {
        let f = parse("forall x y. ((P(x,y) & P(y,x)) -> P(x,y))").unwrap();
        let verdict =
            decide_pi2(&Signature::two_eq(), &f, DecideOptions { slot_cap: 0 }).unwrap();
        assert!(verdict.is_valid());
    }

    #[test]
    fn relativized_sentences_stay_universal_existential() {
        let f = parse("forall x. exists y. x = y").unwrap();
        for class in [
            ClassId::SimpleGraph,
            ClassId::BipartiteGraph,
            ClassId::BipartiteGraph3,
            ClassId::TwoEq,
            ClassId::LEq,
        ] {
            let r = relativize_to_class(class, &f).unwrap();
            assert!(classify(&r).within_pi(2), "{class:?}");
        }
    }

    #[test]
    fn symmetry_is_valid_inside_the_class() {
        let f = parse("forall x y. (P(x,y) -> P(y,x))").unwrap();
        let verdict = decide_pi2_in_class(ClassId::TwoEq, &f, opts()).unwrap();
        assert!(verdict.is_valid());
    }

    #[test]
    fn proper_classmate_claim_fails_inside_the_class() {
        let f = parse("forall x. exists y. (P(x,y) & !(x = y))").unwrap();
        let verdict = decide_pi2_in_class(ClassId::TwoEq, &f, opts()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Invalid);
        let c = verdict.countermodel.unwrap();
        assert_eq!(c.size(), 1);
        assert!(validate(ClassId::TwoEq, &c).unwrap());
    }

    #[test]
    fn totality_is_valid_inside_the_order_class() {
        let f = parse("forall x y. (x<y | y<x | x = y)").unwrap();
        let verdict = decide_pi2_in_class(ClassId::LEq, &f, opts()).unwrap();
        assert!(verdict.is_valid());
    }

    #[test]
    fn open_formulas_and_foreign_relations_are_rejected() {
        let sig = Signature::graph();
        assert!(matches!(
            decide_pi2(&sig, &atom("E", &["x", "y"]), opts()).unwrap_err(),
            DecideError::NotASentence(..)
        ));
        let f = forall(&["x"], atom("S", &["x"]));
        assert!(matches!(
            decide_pi2(&sig, &f, opts()).unwrap_err(),
            DecideError::UnknownRelation { .. }
        ));
        let g = forall(&["x"], atom("E", &["x"]));
        assert!(matches!(
            decide_pi2(&sig, &g, opts()).unwrap_err(),
            DecideError::ArityMismatch { .. }
        ));
    }

    #[test]
    fn search_returns_the_smallest_falsifying_member() {
        let f = parse("forall x. exists y. (P(x,y) & !(x = y))").unwrap();
        let hit = search_counterexample(ClassId::TwoEq, &f, 3, 20)
            .unwrap()
            .unwrap();
        assert_eq!(hit.size(), 1);
        assert!(validate(ClassId::TwoEq, &hit).unwrap());

        let reflexive = forall(&["x"], atom("P", &["x", "x"]));
        assert!(search_counterexample(ClassId::TwoEq, &reflexive, 3, 20)
            .unwrap()
            .is_none());
    }

    #[test]
    fn search_respects_the_member_cap() {
        let f = forall(&["x"], atom("P", &["x", "x"]));
        assert!(matches!(
            search_counterexample(ClassId::TwoEq, &f, 6, 10).unwrap_err(),
            DecideError::Class(ClassError::TooManyMembers(..))
        ));
    }

    #[test]
    fn verdict_json_shapes() {
        let valid = Pi2Verdict {
            outcome: Outcome::Valid,
            bound: 2,
            countermodel: None,
        };
        let v = valid.to_json_value();
        assert_eq!(v["outcome"], "valid");
        assert_eq!(v["bound"], 2);
        assert!(v.get("countermodel").is_none());

        let f = parse("forall x. exists y. E(x,y)").unwrap();
        let verdict = decide_pi2(&Signature::graph(), &f, opts()).unwrap();
        let v = verdict.to_json_value();
        assert_eq!(v["outcome"], "invalid");
        assert_eq!(v["countermodel"]["size"], 1);
    }

    #[test]
    fn equality_only_sentences_work() {
        // Refutable exactly at size one.
        let f = parse("forall x. exists y. !(x = y)").unwrap();
        let verdict = decide_pi2(&Signature::graph(), &f, opts()).unwrap();
        assert_eq!(verdict.outcome, Outcome::Invalid);
        assert_eq!(verdict.countermodel.unwrap().size(), 1);
    }
}
