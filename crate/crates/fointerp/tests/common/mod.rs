//! Independent reference implementations the integration tests check the
//! library against. Everything here is written the slow, obvious way on
//! purpose: plain recursion over the syntax tree, plain bit counting over
//! relation slots. No code is shared with the engines under test.

#![allow(dead_code)]

use fointerp::{FiniteStructure, Formula, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Truth of `f` in `s` under the empty environment, by direct recursion.
pub fn naive_eval(s: &FiniteStructure, f: &Formula) -> bool {
    naive_eval_env(s, f, &mut HashMap::new())
}

fn naive_eval_env(s: &FiniteStructure, f: &Formula, env: &mut HashMap<String, usize>) -> bool {
    match f {
        Formula::Atom(rel, args) => {
            let tuple: Vec<usize> = args.iter().map(|v| env[v.as_str()]).collect();
            s.contains_tuple(rel, &tuple).expect("reference atom lookup")
        }
        Formula::Equal(a, b) => env[a.as_str()] == env[b.as_str()],
        Formula::Not(g) => !naive_eval_env(s, g, env),
        Formula::And(a, b) => naive_eval_env(s, a, env) && naive_eval_env(s, b, env),
        Formula::Or(a, b) => naive_eval_env(s, a, env) || naive_eval_env(s, b, env),
        Formula::Implies(a, b) => !naive_eval_env(s, a, env) || naive_eval_env(s, b, env),
        Formula::Iff(a, b) => naive_eval_env(s, a, env) == naive_eval_env(s, b, env),
        Formula::Exists(vars, body) => block(s, vars, body, env, false),
        Formula::Forall(vars, body) => block(s, vars, body, env, true),
    }
}

fn block(
    s: &FiniteStructure,
    vars: &[String],
    body: &Formula,
    env: &mut HashMap<String, usize>,
    universal: bool,
) -> bool {
    let Some((var, rest)) = vars.split_first() else {
        return naive_eval_env(s, body, env);
    };
    for e in 0..s.size() {
        let shadowed = env.insert(var.clone(), e);
        let r = block(s, rest, body, env, universal);
        match shadowed {
            Some(old) => {
                env.insert(var.clone(), old);
            }
            None => {
                env.remove(var);
            }
        }
        if r != universal {
            return !universal;
        }
    }
    universal
}

/// Every structure with carrier 0..n over `sig`, by counting through the
/// relation slots bit by bit. Panics past 2^24 structures; keep inputs
/// small.
pub fn naive_structures(sig: &Signature, n: usize) -> Vec<FiniteStructure> {
    let mut slots: Vec<(String, Vec<usize>)> = Vec::new();
    for (rel, arity) in sig.relations() {
        let mut tuple = vec![0usize; arity];
        loop {
            slots.push((rel.to_string(), tuple.clone()));
            if !bump(&mut tuple, n) {
                break;
            }
        }
    }
    assert!(slots.len() <= 24, "too many slots for the reference enumerator");
    let mut out = Vec::new();
    for bits in 0u64..(1 << slots.len()) {
        let mut s = FiniteStructure::new(sig.clone(), n).unwrap();
        for (i, (rel, tuple)) in slots.iter().enumerate() {
            if bits >> i & 1 == 1 {
                s.add_tuple(rel, tuple).unwrap();
            }
        }
        out.push(s);
    }
    out
}

fn bump(tuple: &mut [usize], n: usize) -> bool {
    for v in tuple.iter_mut().rev() {
        *v += 1;
        if *v < n {
            return true;
        }
        *v = 0;
    }
    false
}

/// A structure over `sig` with each tuple present independently with
/// probability 1/2.
pub fn random_structure(sig: &Signature, n: usize, rng: &mut ChaCha8Rng) -> FiniteStructure {
    let mut s = FiniteStructure::new(sig.clone(), n).unwrap();
    for (rel, arity) in sig.relations() {
        let mut tuple = vec![0usize; arity];
        loop {
            if rng.gen_bool(0.5) {
                s.add_tuple(rel, &tuple).unwrap();
            }
            if !bump(&mut tuple, n) {
                break;
            }
        }
    }
    s
}

/// Seeded generator of random formulas over a fixed signature.
pub struct SentenceGen {
    rng: ChaCha8Rng,
    rels: Vec<(String, usize)>,
}

impl SentenceGen {
    pub fn new(seed: u64, sig: &Signature) -> Self {
        SentenceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            rels: sig
                .relations()
                .map(|(r, a)| (r.to_string(), a))
                .collect(),
        }
    }

    /// A closed formula of quantifier rank at most `rank` (at least 1).
    pub fn sentence(&mut self, rank: usize) -> Formula {
        assert!(rank >= 1);
        let mut scope = Vec::new();
        self.quantified(rank, &mut scope)
    }

    /// A quantifier-free formula whose variables come from `scope`.
    pub fn matrix(&mut self, scope: &[String], depth: usize) -> Formula {
        assert!(!scope.is_empty());
        let mut vars = scope.to_vec();
        self.body(0, &mut vars, depth)
    }

    fn quantified(&mut self, rank: usize, scope: &mut Vec<String>) -> Formula {
        let var = format!("v{}", scope.len() + 1);
        scope.push(var.clone());
        let body = self.body(rank - 1, scope, 3);
        scope.pop();
        if self.rng.gen_bool(0.5) {
            Formula::Exists(vec![var], Box::new(body))
        } else {
            Formula::Forall(vec![var], Box::new(body))
        }
    }

    fn body(&mut self, rank: usize, scope: &mut Vec<String>, depth: usize) -> Formula {
        if depth == 0 {
            return self.leaf(scope);
        }
        match self.rng.gen_range(0..10) {
            0..=3 => self.leaf(scope),
            4 if rank > 0 => self.quantified(rank, scope),
            4 => self.leaf(scope),
            5 => Formula::Not(Box::new(self.body(rank, scope, depth - 1))),
            n => {
                let a = Box::new(self.body(rank, scope, depth - 1));
                let b = Box::new(self.body(rank, scope, depth - 1));
                match n {
                    6 => Formula::And(a, b),
                    7 => Formula::Or(a, b),
                    8 => Formula::Implies(a, b),
                    _ => Formula::Iff(a, b),
                }
            }
        }
    }

    fn leaf(&mut self, scope: &[String]) -> Formula {
        let pick = |rng: &mut ChaCha8Rng| scope[rng.gen_range(0..scope.len())].clone();
        if self.rels.is_empty() || self.rng.gen_bool(0.2) {
            return Formula::Equal(pick(&mut self.rng), pick(&mut self.rng));
        }
        let (rel, arity) = self.rels[self.rng.gen_range(0..self.rels.len())].clone();
        let args = (0..arity).map(|_| pick(&mut self.rng)).collect();
        Formula::Atom(rel, args)
    }
}
