//! Negation normal form, prenex normal form, and prefix classification.

use crate::formula::{and, not, or, rename_bound_apart, Formula};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

/// Whether a prefix starts with an existential block, a universal block,
/// or is empty (quantifier-free formulas belong to both hierarchies).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrefixKind {
    Sigma,
    Pi,
    Both,
}

/// Prefix class of a prenex form: `k` counts the maximal homogeneous
/// quantifier blocks, `kind` says which quantifier leads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixClass {
    pub kind: PrefixKind,
    pub k: usize,
}

impl PrefixClass {
    pub fn new(kind: PrefixKind, k: usize) -> Self {
        PrefixClass { kind, k }
    }

    /// Inclusion in the class Σ_k: holds for Σ_j with j ≤ k, Π_j with
    /// j < k, and quantifier-free formulas.
    pub fn within_sigma(&self, k: usize) -> bool {
        match self.kind {
            PrefixKind::Sigma => self.k <= k,
            PrefixKind::Pi => self.k < k,
            PrefixKind::Both => true,
        }
    }

    /// Inclusion in the class Π_k.
    pub fn within_pi(&self, k: usize) -> bool {
        match self.kind {
            PrefixKind::Pi => self.k <= k,
            PrefixKind::Sigma => self.k < k,
            PrefixKind::Both => true,
        }
    }
}

impl fmt::Display for PrefixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            PrefixKind::Sigma => "Sigma",
            PrefixKind::Pi => "Pi",
            PrefixKind::Both => "Both",
        };
        write!(f, "{kind} {}", self.k)
    }
}

/// Negation normal form: `->` and `<->` eliminated, negation pushed onto
/// atoms and equalities. `<->` expands into the conjunction of the two
/// implications before the push.
pub fn to_nnf(f: &Formula) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Equal(..) => f.clone(),
        Formula::Not(g) => negate_nnf(g),
        Formula::And(l, r) => and(to_nnf(l), to_nnf(r)),
        Formula::Or(l, r) => or(to_nnf(l), to_nnf(r)),
        Formula::Implies(l, r) => or(negate_nnf(l), to_nnf(r)),
        Formula::Iff(l, r) => and(
            or(negate_nnf(l), to_nnf(r)),
            or(negate_nnf(r), to_nnf(l)),
        ),
        Formula::Exists(vs, b) => Formula::Exists(vs.clone(), Box::new(to_nnf(b))),
        Formula::Forall(vs, b) => Formula::Forall(vs.clone(), Box::new(to_nnf(b))),
    }
}

fn negate_nnf(f: &Formula) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Equal(..) => not(f.clone()),
        Formula::Not(g) => to_nnf(g),
        Formula::And(l, r) => or(negate_nnf(l), negate_nnf(r)),
        Formula::Or(l, r) => and(negate_nnf(l), negate_nnf(r)),
        Formula::Implies(l, r) => and(to_nnf(l), negate_nnf(r)),
        Formula::Iff(l, r) => or(
            and(to_nnf(l), negate_nnf(r)),
            and(to_nnf(r), negate_nnf(l)),
        ),
        Formula::Exists(vs, b) => Formula::Forall(vs.clone(), Box::new(negate_nnf(b))),
        Formula::Forall(vs, b) => Formula::Exists(vs.clone(), Box::new(negate_nnf(b))),
    }
}

/// True when negations sit only on atoms and no `->`/`<->` remains.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Atom(..) | Formula::Equal(..) => true,
        Formula::Not(g) => matches!(**g, Formula::Atom(..) | Formula::Equal(..)),
        Formula::And(l, r) | Formula::Or(l, r) => is_nnf(l) && is_nnf(r),
        Formula::Implies(..) | Formula::Iff(..) => false,
        Formula::Exists(_, b) | Formula::Forall(_, b) => is_nnf(b),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Q {
    Ex,
    All,
}

impl Q {
    fn flip(self) -> Q {
        match self {
            Q::Ex => Q::All,
            Q::All => Q::Ex,
        }
    }
}

type Block = (Q, Vec<String>);

/// Prenex normal form with an existential-first merge bias; see
/// [`to_prenex_toward`].
pub fn to_prenex(f: &Formula) -> Formula {
    to_prenex_toward(f, PrefixKind::Sigma)
}

/// Prenex normal form. The formula is first brought to NNF and its bound
/// variables renamed apart, then quantifier blocks are extracted. Sibling
/// prefixes at `&`/`|` nodes are independent, so they may be interleaved
/// freely; blocks matching the type of the innermost enclosing quantifier
/// (or `target` at the top) are hoisted first, which groups same-type
/// quantifiers and avoids spurious alternations. The choice is greedy and
/// deterministic, not a global minimum over all prenexings.
pub fn to_prenex_toward(f: &Formula, target: PrefixKind) -> Formula {
    let n = to_nnf(f);
    let n = rename_bound_apart(&n, &BTreeSet::new());
    let bias = match target {
        PrefixKind::Pi => Q::All,
        _ => Q::Ex,
    };
    let (blocks, matrix) = prenex_core(&n, bias);
    let mut out = matrix;
    for (q, vars) in blocks.into_iter().rev() {
        out = match q {
            Q::Ex => Formula::Exists(vars, Box::new(out)),
            Q::All => Formula::Forall(vars, Box::new(out)),
        };
    }
    out
}

fn prenex_core(f: &Formula, bias: Q) -> (Vec<Block>, Formula) {
    match f {
        Formula::Atom(..) | Formula::Equal(..) | Formula::Not(_) => (Vec::new(), f.clone()),
        Formula::Exists(vs, b) => {
            let (blocks, m) = prenex_core(b, Q::Ex);
            (push_front(Q::Ex, vs.clone(), blocks), m)
        }
        Formula::Forall(vs, b) => {
            let (blocks, m) = prenex_core(b, Q::All);
            (push_front(Q::All, vs.clone(), blocks), m)
        }
        Formula::And(l, r) => {
            let (bl, ml) = prenex_core(l, bias);
            let (br, mr) = prenex_core(r, bias);
            (merge_prefixes(vec![bl, br], bias), and(ml, mr))
        }
        Formula::Or(l, r) => {
            let (bl, ml) = prenex_core(l, bias);
            let (br, mr) = prenex_core(r, bias);
            (merge_prefixes(vec![bl, br], bias), or(ml, mr))
        }
        Formula::Implies(..) | Formula::Iff(..) => {
            unreachable!("prenex extraction runs on NNF input")
        }
    }
}

fn push_front(q: Q, vars: Vec<String>, mut blocks: Vec<Block>) -> Vec<Block> {
    if let Some(first) = blocks.first_mut() {
        if first.0 == q {
            let mut joined = vars;
            joined.append(&mut first.1);
            first.1 = joined;
            return blocks;
        }
    }
    blocks.insert(0, (q, vars));
    blocks
}

fn merge_prefixes(children: Vec<Vec<Block>>, bias: Q) -> Vec<Block> {
    let mut queues: Vec<VecDeque<Block>> = children.into_iter().map(Into::into).collect();
    let mut out: Vec<Block> = Vec::new();
    let mut t = bias;
    while queues.iter().any(|q| !q.is_empty()) {
        if queues
            .iter()
            .any(|q| q.front().map_or(false, |b| b.0 == t))
        {
            for queue in queues.iter_mut() {
                while queue.front().map_or(false, |b| b.0 == t) {
                    let (q, vars) = queue.pop_front().unwrap();
                    match out.last_mut() {
                        Some(last) if last.0 == q => last.1.extend(vars),
                        _ => out.push((q, vars)),
                    }
                }
            }
        }
        t = t.flip();
    }
    out
}

/// Splits a prenex formula into its leading blocks and matrix.
fn leading_blocks(f: &Formula) -> (Vec<(Q, usize)>, &Formula) {
    let mut runs: Vec<(Q, usize)> = Vec::new();
    let mut cur = f;
    loop {
        let (q, vs, b) = match cur {
            Formula::Exists(vs, b) => (Q::Ex, vs, b),
            Formula::Forall(vs, b) => (Q::All, vs, b),
            _ => return (runs, cur),
        };
        match runs.last_mut() {
            Some(last) if last.0 == q => last.1 += vs.len(),
            _ => runs.push((q, vs.len())),
        }
        cur = b;
    }
}

/// Prefix class of the deterministic prenex form of `f`.
pub fn classify(f: &Formula) -> PrefixClass {
    let p = to_prenex(f);
    let (runs, _) = leading_blocks(&p);
    match runs.first() {
        None => PrefixClass::new(PrefixKind::Both, 0),
        Some((Q::Ex, _)) => PrefixClass::new(PrefixKind::Sigma, runs.len()),
        Some((Q::All, _)) => PrefixClass::new(PrefixKind::Pi, runs.len()),
    }
}

/// Negation of a prenex formula, kept prenex: quantifiers flip and the
/// matrix is negated into NNF.
pub fn negate_prenex(f: &Formula) -> Formula {
    match f {
        Formula::Exists(vs, b) => Formula::Forall(vs.clone(), Box::new(negate_prenex(b))),
        Formula::Forall(vs, b) => Formula::Exists(vs.clone(), Box::new(negate_prenex(b))),
        matrix => to_nnf(&not(matrix.clone())),
    }
}

/// Number of existentially quantified variables in the prefix of a prenex
/// formula.
pub fn existential_prefix_vars(f: &Formula) -> usize {
    let mut count = 0;
    let mut cur = f;
    loop {
        match cur {
            Formula::Exists(vs, b) => {
                count += vs.len();
                cur = b;
            }
            Formula::Forall(_, b) => cur = b,
            _ => return count,
        }
    }
}
