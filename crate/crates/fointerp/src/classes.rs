//! The structure classes under study: their signatures, defining axioms,
//! validators, seeded random generators, and exhaustive member streams.

use crate::enumerate::{partition_to_pairs, permutations, set_partitions};
use crate::formula::{and, and_all, atom, eq, exists, forall, iff, implies, not, or_all, Formula};
use crate::signature::Signature;
use crate::structure::{eval, Assignment, FiniteStructure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassId {
    SimpleGraph,
    BipartiteGraph,
    /// Bipartite graphs with at least three elements on each side.
    BipartiteGraph3,
    TwoEq,
    LEq,
    All,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassError {
    #[error("the class of all structures has no axiom or fixed signature")]
    NoAxiom,
    #[error("structure signature {got} does not match the class signature {expected}")]
    SignatureMismatch { expected: String, got: String },
    #[error("invalid size spec: {0}")]
    InvalidSizeSpec(String),
    #[error("{0} members of size {1} exceed the cap of 2^{2}")]
    TooManyMembers(u128, usize, u32),
}

impl ClassId {
    pub fn signature(self) -> Option<Signature> {
        match self {
            ClassId::SimpleGraph => Some(Signature::graph()),
            ClassId::BipartiteGraph | ClassId::BipartiteGraph3 => Some(Signature::bipartite()),
            ClassId::TwoEq => Some(Signature::two_eq()),
            ClassId::LEq => Some(Signature::leq()),
            ClassId::All => None,
        }
    }
}

fn equivalence_axioms(rel: &str) -> Vec<Formula> {
    vec![
        forall(&["x"], atom(rel, &["x", "x"])),
        forall(
            &["x", "y"],
            implies(atom(rel, &["x", "y"]), atom(rel, &["y", "x"])),
        ),
        forall(
            &["x", "y", "z"],
            implies(
                and(atom(rel, &["x", "y"]), atom(rel, &["y", "z"])),
                atom(rel, &["x", "z"]),
            ),
        ),
    ]
}

fn three_distinct(rel: &str, vars: [&str; 3]) -> Formula {
    let [a, b, c] = vars;
    exists(
        &vars,
        and_all([
            atom(rel, &[a]),
            atom(rel, &[b]),
            atom(rel, &[c]),
            not(eq(a, b)),
            not(eq(a, c)),
            not(eq(b, c)),
        ]),
    )
}

/// The defining sentence of a class; finite models of it are exactly the
/// class members.
pub fn axiom(class: ClassId) -> Result<Formula, ClassError> {
    match class {
        ClassId::SimpleGraph => Ok(and(
            forall(&["x"], not(atom("E", &["x", "x"]))),
            forall(
                &["x", "y"],
                iff(atom("E", &["x", "y"]), atom("E", &["y", "x"])),
            ),
        )),
        ClassId::BipartiteGraph => Ok(bipartite_core()),
        ClassId::BipartiteGraph3 => Ok(and_all([
            bipartite_core(),
            three_distinct("L", ["u", "v", "w"]),
            three_distinct("R", ["u'", "v'", "w'"]),
        ])),
        ClassId::TwoEq => {
            let mut conjuncts = equivalence_axioms("P");
            conjuncts.extend(equivalence_axioms("Q"));
            Ok(and_all(conjuncts))
        }
        ClassId::LEq => {
            let mut conjuncts = vec![
                forall(&["x"], not(atom("<", &["x", "x"]))),
                forall(
                    &["x", "y", "z"],
                    implies(
                        and(atom("<", &["x", "y"]), atom("<", &["y", "z"])),
                        atom("<", &["x", "z"]),
                    ),
                ),
                forall(
                    &["x", "y"],
                    or_all([
                        atom("<", &["x", "y"]),
                        atom("<", &["y", "x"]),
                        eq("x", "y"),
                    ]),
                ),
            ];
            conjuncts.extend(equivalence_axioms("≈"));
            Ok(and_all(conjuncts))
        }
        ClassId::All => Err(ClassError::NoAxiom),
    }
}

fn bipartite_core() -> Formula {
    and(
        forall(&["x"], iff(atom("L", &["x"]), not(atom("R", &["x"])))),
        forall(
            &["x", "y"],
            implies(
                atom("E", &["x", "y"]),
                and(atom("L", &["x"]), atom("R", &["y"])),
            ),
        ),
    )
}

/// True iff `s` is a member of the class. The class of all structures
/// accepts everything.
pub fn validate(class: ClassId, s: &FiniteStructure) -> Result<bool, ClassError> {
    let Some(sig) = class.signature() else {
        return Ok(true);
    };
    if *s.signature() != sig {
        return Err(ClassError::SignatureMismatch {
            expected: sig.to_string(),
            got: s.signature().to_string(),
        });
    }
    let ax = axiom(class)?;
    Ok(eval(s, &ax, &Assignment::new()).expect("axiom is well-formed and closed"))
}

#[derive(Clone, Copy, Debug)]
pub enum SizeSpec {
    /// Carrier size; for equivalences the partitions are drawn uniformly
    /// per element.
    Elements(usize),
    /// Simple graph: size and edge probability.
    Graph { size: usize, edge_prob: f64 },
    /// Bipartite graph: part sizes and edge probability.
    Bipartite {
        left: usize,
        right: usize,
        edge_prob: f64,
    },
}

/// A random member of the class, deterministic in the seed.
pub fn gen_random(
    class: ClassId,
    spec: SizeSpec,
    seed: u64,
) -> Result<FiniteStructure, ClassError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (class, spec) {
        (ClassId::SimpleGraph, SizeSpec::Graph { size, edge_prob }) => {
            if size == 0 {
                return Err(ClassError::InvalidSizeSpec("size must be positive".into()));
            }
            check_prob(edge_prob)?;
            let mut s = FiniteStructure::new(Signature::graph(), size).unwrap();
            for a in 0..size {
                for b in a + 1..size {
                    if rng.gen_bool(edge_prob) {
                        s.add_tuple("E", &[a, b]).unwrap();
                        s.add_tuple("E", &[b, a]).unwrap();
                    }
                }
            }
            Ok(s)
        }
        (
            ClassId::BipartiteGraph | ClassId::BipartiteGraph3,
            SizeSpec::Bipartite {
                left,
                right,
                edge_prob,
            },
        ) => {
            if left == 0 || right == 0 {
                return Err(ClassError::InvalidSizeSpec(
                    "both parts must be nonempty".into(),
                ));
            }
            if class == ClassId::BipartiteGraph3 && (left < 3 || right < 3) {
                return Err(ClassError::InvalidSizeSpec(format!(
                    "parts of size {left} and {right}, need at least 3 each"
                )));
            }
            check_prob(edge_prob)?;
            let mut s = FiniteStructure::new(Signature::bipartite(), left + right).unwrap();
            for e in 0..left {
                s.add_tuple("L", &[e]).unwrap();
            }
            for e in left..left + right {
                s.add_tuple("R", &[e]).unwrap();
            }
            for l in 0..left {
                for r in left..left + right {
                    if rng.gen_bool(edge_prob) {
                        s.add_tuple("E", &[l, r]).unwrap();
                    }
                }
            }
            Ok(s)
        }
        (ClassId::TwoEq, SizeSpec::Elements(size)) => {
            if size == 0 {
                return Err(ClassError::InvalidSizeSpec("size must be positive".into()));
            }
            let mut s = FiniteStructure::new(Signature::two_eq(), size).unwrap();
            s.set_tuples("P", partition_to_pairs(&random_labels(&mut rng, size)))
                .unwrap();
            s.set_tuples("Q", partition_to_pairs(&random_labels(&mut rng, size)))
                .unwrap();
            Ok(s)
        }
        (ClassId::LEq, SizeSpec::Elements(size)) => {
            if size == 0 {
                return Err(ClassError::InvalidSizeSpec("size must be positive".into()));
            }
            let mut s = FiniteStructure::new(Signature::leq(), size).unwrap();
            // rank[e] = position of e in the order.
            let mut rank: Vec<usize> = (0..size).collect();
            for i in (1..size).rev() {
                rank.swap(i, rng.gen_range(0..=i));
            }
            let mut less = Vec::new();
            for a in 0..size {
                for b in 0..size {
                    if rank[a] < rank[b] {
                        less.push(vec![a, b]);
                    }
                }
            }
            s.set_tuples("<", less).unwrap();
            s.set_tuples("≈", partition_to_pairs(&random_labels(&mut rng, size)))
                .unwrap();
            Ok(s)
        }
        (ClassId::All, _) => Err(ClassError::NoAxiom),
        (c, spec) => Err(ClassError::InvalidSizeSpec(format!(
            "{spec:?} does not fit {c:?}"
        ))),
    }
}

fn check_prob(p: f64) -> Result<(), ClassError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ClassError::InvalidSizeSpec(format!(
            "edge probability {p} outside [0, 1]"
        )))
    }
}

fn random_labels(rng: &mut ChaCha8Rng, size: usize) -> Vec<usize> {
    (0..size).map(|_| rng.gen_range(0..size)).collect()
}

/// Number of members of the class with carrier exactly 0..n-1.
pub fn member_count(class: ClassId, n: usize) -> u128 {
    let bell = |n: usize| set_partitions(n).len() as u128;
    match class {
        ClassId::SimpleGraph => 1u128 << (n * (n - 1) / 2),
        ClassId::BipartiteGraph | ClassId::BipartiteGraph3 => {
            let mut total = 0u128;
            for mask in 0u64..(1u64 << n) {
                let left = mask.count_ones() as usize;
                let right = n - left;
                if class == ClassId::BipartiteGraph3 && (left < 3 || right < 3) {
                    continue;
                }
                total = total.saturating_add(1u128 << (left * right));
            }
            total
        }
        ClassId::TwoEq => bell(n) * bell(n),
        ClassId::LEq => {
            let fact: u128 = (1..=n as u128).product();
            fact * bell(n)
        }
        ClassId::All => 0,
    }
}

/// Every member of the class with carrier exactly 0..n-1, deterministically
/// ordered. Refuses when the member count exceeds 2^cap_log2.
pub fn class_members(
    class: ClassId,
    n: usize,
    cap_log2: u32,
) -> Result<Vec<FiniteStructure>, ClassError> {
    if class == ClassId::All {
        return Err(ClassError::NoAxiom);
    }
    if n == 0 || n >= 64 {
        return Err(ClassError::InvalidSizeSpec(format!("size {n}")));
    }
    let count = member_count(class, n);
    if count > 1u128 << cap_log2.min(127) {
        return Err(ClassError::TooManyMembers(count, n, cap_log2));
    }
    let mut out = Vec::new();
    match class {
        ClassId::SimpleGraph => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect();
            for mask in 0u64..(1u64 << pairs.len()) {
                let mut s = FiniteStructure::new(Signature::graph(), n).unwrap();
                for (i, (a, b)) in pairs.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        s.add_tuple("E", &[*a, *b]).unwrap();
                        s.add_tuple("E", &[*b, *a]).unwrap();
                    }
                }
                out.push(s);
            }
        }
        ClassId::BipartiteGraph | ClassId::BipartiteGraph3 => {
            for left_mask in 0u64..(1u64 << n) {
                let left: Vec<usize> = (0..n).filter(|e| left_mask & (1 << e) != 0).collect();
                let right: Vec<usize> = (0..n).filter(|e| left_mask & (1 << e) == 0).collect();
                if class == ClassId::BipartiteGraph3 && (left.len() < 3 || right.len() < 3) {
                    continue;
                }
                let slots: Vec<(usize, usize)> = left
                    .iter()
                    .flat_map(|&l| right.iter().map(move |&r| (l, r)))
                    .collect();
                for edge_mask in 0u64..(1u64 << slots.len()) {
                    let mut s = FiniteStructure::new(Signature::bipartite(), n).unwrap();
                    for &l in &left {
                        s.add_tuple("L", &[l]).unwrap();
                    }
                    for &r in &right {
                        s.add_tuple("R", &[r]).unwrap();
                    }
                    for (i, (l, r)) in slots.iter().enumerate() {
                        if edge_mask & (1 << i) != 0 {
                            s.add_tuple("E", &[*l, *r]).unwrap();
                        }
                    }
                    out.push(s);
                }
            }
        }
        ClassId::TwoEq => {
            let parts = set_partitions(n);
            for p in &parts {
                for q in &parts {
                    let mut s = FiniteStructure::new(Signature::two_eq(), n).unwrap();
                    s.set_tuples("P", partition_to_pairs(p)).unwrap();
                    s.set_tuples("Q", partition_to_pairs(q)).unwrap();
                    out.push(s);
                }
            }
        }
        ClassId::LEq => {
            let parts = set_partitions(n);
            for rank in permutations(n) {
                let mut less = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        if rank[a] < rank[b] {
                            less.push(vec![a, b]);
                        }
                    }
                }
                for part in &parts {
                    let mut s = FiniteStructure::new(Signature::leq(), n).unwrap();
                    s.set_tuples("<", less.clone()).unwrap();
                    s.set_tuples("≈", partition_to_pairs(part)).unwrap();
                    out.push(s);
                }
            }
        }
        ClassId::All => unreachable!(),
    }
    Ok(out)
}
