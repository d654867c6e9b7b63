//! Small named structures used across tests and the demo subcommand.

use crate::signature::Signature;
use crate::structure::FiniteStructure;

fn bipartite(left: &[&str], right: &[&str], edges: &[(&str, &str)]) -> FiniteStructure {
    let mut s = FiniteStructure::new(Signature::bipartite(), left.len() + right.len()).unwrap();
    for (i, name) in left.iter().chain(right.iter()).enumerate() {
        s.set_name(name, i).unwrap();
    }
    for name in left {
        let e = s.element(name).unwrap();
        s.add_tuple("L", &[e]).unwrap();
    }
    for name in right {
        let e = s.element(name).unwrap();
        s.add_tuple("R", &[e]).unwrap();
    }
    for (a, b) in edges {
        let (a, b) = (s.element(a).unwrap(), s.element(b).unwrap());
        s.add_tuple("E", &[a, b]).unwrap();
    }
    s
}

/// Two vertices per side, edges l1-r1 and l2-r2.
pub fn bipartite_2x2_matching() -> FiniteStructure {
    bipartite(
        &["l1", "l2"],
        &["r1", "r2"],
        &[("l1", "r1"), ("l2", "r2")],
    )
}

/// Two vertices per side, edges l1-r2 and l2-r1; isomorphic to the
/// matching by swapping r1 and r2.
pub fn bipartite_2x2_crossed() -> FiniteStructure {
    bipartite(
        &["l1", "l2"],
        &["r1", "r2"],
        &[("l1", "r2"), ("l2", "r1")],
    )
}

/// Two vertices per side, three edges; not isomorphic to the matching.
pub fn bipartite_2x2_three_edges() -> FiniteStructure {
    bipartite(
        &["l1", "l2"],
        &["r1", "r2"],
        &[("l1", "r1"), ("l1", "r2"), ("l2", "r2")],
    )
}

/// Three vertices per side, edges l_i-r_i.
pub fn bipartite_3x3_diagonal() -> FiniteStructure {
    bipartite(
        &["l1", "l2", "l3"],
        &["r1", "r2", "r3"],
        &[("l1", "r1"), ("l2", "r2"), ("l3", "r3")],
    )
}

/// Four elements; P-classes {0,1} and {2,3}, Q-classes {0,2} and {1,3}.
pub fn two_eq_two_by_two() -> FiniteStructure {
    let mut s = FiniteStructure::new(Signature::two_eq(), 4).unwrap();
    for (rel, blocks) in [("P", [[0usize, 1], [2, 3]]), ("Q", [[0, 2], [1, 3]])] {
        for block in blocks {
            for &a in &block {
                for &b in &block {
                    s.add_tuple(rel, &[a, b]).unwrap();
                }
            }
        }
    }
    s
}
