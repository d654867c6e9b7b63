//! Exhaustive generation of labeled structures and of the combinatorial
//! raw material for class-aware searches (set partitions, permutations).

use crate::signature::Signature;
use crate::structure::FiniteStructure;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("enumeration needs {needed} tuple slots, cap is {cap}")]
    SlotCapExceeded { needed: u128, cap: u128 },
}

/// Total number of tuple slots for structures of size `n`: the sum of
/// n^arity over the signature. 2^slots structures exist.
pub fn slot_count(signature: &Signature, n: usize) -> u128 {
    signature
        .relations()
        .map(|(_, arity)| (n as u128).saturating_pow(arity as u32))
        .fold(0u128, u128::saturating_add)
}

/// Streams every labeled structure of size exactly `n`, each exactly once.
///
/// Order: the slot list is all (relation, tuple) pairs, relations in sorted
/// order and tuples lexicographic; structures run through subsets of that
/// list counting upward with the last slot varying fastest, so the first
/// structure is empty and the last has every slot filled.
pub fn enumerate_structures(
    signature: &Signature,
    n: usize,
    cap: usize,
) -> Result<StructureIter, EnumerateError> {
    let needed = slot_count(signature, n);
    if needed > cap as u128 {
        return Err(EnumerateError::SlotCapExceeded {
            needed,
            cap: cap as u128,
        });
    }
    let mut slots = Vec::new();
    for (rel, arity) in signature.relations() {
        let mut tuple = vec![0usize; arity];
        loop {
            slots.push((rel.to_string(), tuple.clone()));
            if !next_tuple(&mut tuple, n) {
                break;
            }
        }
    }
    Ok(StructureIter {
        signature: signature.clone(),
        n,
        slots,
        counter: None,
        done: false,
    })
}

pub(crate) fn next_tuple(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

pub struct StructureIter {
    signature: Signature,
    n: usize,
    slots: Vec<(String, Vec<usize>)>,
    counter: Option<Vec<bool>>,
    done: bool,
}

impl Iterator for StructureIter {
    type Item = FiniteStructure;

    fn next(&mut self) -> Option<FiniteStructure> {
        if self.done {
            return None;
        }
        match &mut self.counter {
            None => self.counter = Some(vec![false; self.slots.len()]),
            Some(counter) => {
                let mut carried = true;
                for bit in counter.iter_mut().rev() {
                    if *bit {
                        *bit = false;
                    } else {
                        *bit = true;
                        carried = false;
                        break;
                    }
                }
                if carried {
                    self.done = true;
                    return None;
                }
            }
        }
        let counter = self.counter.as_ref().unwrap();
        let mut s = FiniteStructure::new(self.signature.clone(), self.n).unwrap();
        for (on, (rel, tuple)) in counter.iter().zip(&self.slots) {
            if *on {
                s.add_tuple(rel, tuple).unwrap();
            }
        }
        Some(s)
    }
}

/// All set partitions of {0..n-1} as restricted growth strings: position e
/// holds the block label of element e, labels first appearing in ascending
/// order. Lexicographic; count is the Bell number of n.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    grow(&mut current, n, &mut out);
    out
}

fn grow(current: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    let max = current.iter().copied().max().map_or(0, |m| m + 1);
    for label in 0..=max {
        current.push(label);
        grow(current, n, out);
        current.pop();
    }
}

/// Pairs of the equivalence relation whose classes are the partition's
/// blocks, diagonal included.
pub fn partition_to_pairs(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut pairs = Vec::new();
    for (a, la) in labels.iter().enumerate() {
        for (b, lb) in labels.iter().enumerate() {
            if la == lb {
                pairs.push(vec![a, b]);
            }
        }
    }
    pairs
}

/// All permutations of 0..n-1 in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push(perm.clone());
        // Standard next-permutation step.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}
