//! Structure isomorphism by backtracking search.
//!
//! Candidates are pruned by a per-element invariant (membership counts per
//! relation and argument position), and partial maps are checked both ways
//! on every extension. Element names are bookkeeping and are ignored.

use crate::structure::FiniteStructure;
use std::collections::BTreeMap;

/// Tuples of each relation grouped by the element occurring in them, for
/// incremental consistency checks.
struct TupleIndex<'s> {
    /// `by_element[e]` lists (relation, tuple) pairs mentioning `e`.
    by_element: Vec<Vec<(&'s str, &'s [usize])>>,
}

impl<'s> TupleIndex<'s> {
    fn new(s: &'s FiniteStructure) -> Self {
        let mut by_element: Vec<Vec<(&str, &[usize])>> = vec![Vec::new(); s.size()];
        for (rel, _) in s.signature().relations() {
            for t in s.tuples(rel).unwrap() {
                let mut seen = [usize::MAX; 8];
                let mut seen_len = 0;
                for &e in t {
                    if !seen[..seen_len].contains(&e) {
                        by_element[e].push((rel, t.as_slice()));
                        if seen_len < seen.len() {
                            seen[seen_len] = e;
                            seen_len += 1;
                        }
                    }
                }
            }
        }
        TupleIndex { by_element }
    }
}

/// Occurrence counts per (relation, position), the backtracking invariant.
fn profiles(s: &FiniteStructure) -> Vec<BTreeMap<(String, usize), usize>> {
    let mut out = vec![BTreeMap::new(); s.size()];
    for (rel, arity) in s.signature().relations() {
        for t in s.tuples(rel).unwrap() {
            for pos in 0..arity {
                *out[t[pos]].entry((rel.to_string(), pos)).or_insert(0) += 1;
            }
        }
    }
    out
}

/// A relation-preserving bijection from `a` onto `b`, as the image array of
/// `a`'s universe, or `None` when the structures are not isomorphic.
/// Structures over different signatures are never isomorphic.
pub fn find_isomorphism(a: &FiniteStructure, b: &FiniteStructure) -> Option<Vec<usize>> {
    if a.signature() != b.signature() || a.size() != b.size() {
        return None;
    }
    let n = a.size();
    let prof_a = profiles(a);
    let prof_b = profiles(b);
    let idx_a = TupleIndex::new(a);
    let idx_b = TupleIndex::new(b);
    let mut map = vec![usize::MAX; n];
    let mut inv = vec![usize::MAX; n];
    // Most constrained elements first: larger tuple neighborhoods fail
    // earlier.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| std::cmp::Reverse(idx_a.by_element[e].len()));
    if assign(a, b, &idx_a, &idx_b, &prof_a, &prof_b, &order, 0, &mut map, &mut inv) {
        Some(map)
    } else {
        None
    }
}

pub fn are_isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    find_isomorphism(a, b).is_some()
}

#[allow(clippy::too_many_arguments)]
fn assign(
    a: &FiniteStructure,
    b: &FiniteStructure,
    idx_a: &TupleIndex,
    idx_b: &TupleIndex,
    prof_a: &[BTreeMap<(String, usize), usize>],
    prof_b: &[BTreeMap<(String, usize), usize>],
    order: &[usize],
    depth: usize,
    map: &mut Vec<usize>,
    inv: &mut Vec<usize>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let e = order[depth];
    for cand in 0..b.size() {
        if inv[cand] != usize::MAX || prof_a[e] != prof_b[cand] {
            continue;
        }
        map[e] = cand;
        inv[cand] = e;
        if consistent(a, b, idx_a, idx_b, e, cand, map, inv)
            && assign(a, b, idx_a, idx_b, prof_a, prof_b, order, depth + 1, map, inv)
        {
            return true;
        }
        map[e] = usize::MAX;
        inv[cand] = usize::MAX;
    }
    false
}

/// Checks every fully mapped tuple through `e` forward and every fully
/// covered tuple through `cand` backward.
fn consistent(
    a: &FiniteStructure,
    b: &FiniteStructure,
    idx_a: &TupleIndex,
    idx_b: &TupleIndex,
    e: usize,
    cand: usize,
    map: &[usize],
    inv: &[usize],
) -> bool {
    for (rel, t) in &idx_a.by_element[e] {
        if t.iter().all(|&x| map[x] != usize::MAX) {
            let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            if !b.tuples(rel).unwrap().contains(&image) {
                return false;
            }
        }
    }
    for (rel, t) in &idx_b.by_element[cand] {
        if t.iter().all(|&x| inv[x] != usize::MAX) {
            let pre: Vec<usize> = t.iter().map(|&x| inv[x]).collect();
            if !a.tuples(rel).unwrap().contains(&pre) {
                return false;
            }
        }
    }
    true
}
