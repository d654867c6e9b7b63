//! Finite relational structures and formula evaluation.
//!
//! Universes are `0..size`. Relations are tuple sets; an optional injective
//! naming table labels distinguished elements. Evaluation compiles the
//! formula once per structure: atoms become dense table lookups, quantifier
//! blocks run a backtracking search that checks each conjunct (or, under a
//! universal block, each disjunct) as soon as its variables are bound, and
//! quantified subformulas with few free variables are memoized. This keeps
//! formulas with a dozen quantified variables tractable on structures with
//! a hundred elements.

use crate::formula::Formula;
use crate::signature::Signature;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// Map from free variable names to universe elements.
pub type Assignment = BTreeMap<String, usize>;

/// Convenience constructor for assignments in tests and reports.
pub fn assignment(pairs: &[(&str, usize)]) -> Assignment {
    pairs.iter().map(|(v, e)| (v.to_string(), *e)).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("structures must have at least one element")]
    EmptyUniverse,
    #[error("relation `{relation}` is not in the signature")]
    UnknownRelation { relation: String },
    #[error("relation `{relation}` expects {expected} arguments, tuple has {got}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        got: usize,
    },
    #[error("element {element} out of range for size {size} in relation `{relation}`")]
    ElementOutOfRange {
        relation: String,
        element: usize,
        size: usize,
    },
    #[error("name `{name}` refers to element {element}, but the size is {size}")]
    NameOutOfRange {
        name: String,
        element: usize,
        size: usize,
    },
    #[error("names `{first}` and `{second}` both label element {element}")]
    DuplicateName {
        first: String,
        second: String,
        element: usize,
    },
    #[error("invalid structure JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula uses relation `{relation}` which is not in the signature")]
    UnknownRelation { relation: String },
    #[error("relation `{relation}` has arity {expected}, atom has {got} arguments")]
    ArityMismatch {
        relation: String,
        expected: usize,
        got: usize,
    },
    #[error("variable `{variable}` is free in the formula but not assigned")]
    UnboundVariable { variable: String },
    #[error("assignment maps `{variable}` to {element}, but the size is {size}")]
    AssignmentOutOfRange {
        variable: String,
        element: usize,
        size: usize,
    },
}

/// A finite structure over a relational signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    signature: Signature,
    size: usize,
    relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
    names: BTreeMap<String, usize>,
}

impl FiniteStructure {
    /// A structure with the given universe size and all relations empty.
    pub fn new(signature: Signature, size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let relations = signature
            .relations()
            .map(|(name, _)| (name.to_string(), BTreeSet::new()))
            .collect();
        Ok(FiniteStructure {
            signature,
            size,
            relations,
            names: BTreeMap::new(),
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn check_tuple(&self, relation: &str, tuple: &[usize]) -> Result<(), StructureError> {
        let arity = self.signature.arity(relation).ok_or_else(|| {
            StructureError::UnknownRelation {
                relation: relation.to_string(),
            }
        })?;
        if tuple.len() != arity {
            return Err(StructureError::ArityMismatch {
                relation: relation.to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&e| e >= self.size) {
            return Err(StructureError::ElementOutOfRange {
                relation: relation.to_string(),
                element: bad,
                size: self.size,
            });
        }
        Ok(())
    }

    pub fn add_tuple(&mut self, relation: &str, tuple: &[usize]) -> Result<(), StructureError> {
        self.check_tuple(relation, tuple)?;
        self.relations
            .get_mut(relation)
            .unwrap()
            .insert(tuple.to_vec());
        Ok(())
    }

    pub fn set_tuples(
        &mut self,
        relation: &str,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<(), StructureError> {
        let mut set = BTreeSet::new();
        for t in tuples {
            self.check_tuple(relation, &t)?;
            set.insert(t);
        }
        *self
            .relations
            .get_mut(relation)
            .ok_or_else(|| StructureError::UnknownRelation {
                relation: relation.to_string(),
            })? = set;
        Ok(())
    }

    pub fn tuples(&self, relation: &str) -> Result<&BTreeSet<Vec<usize>>, StructureError> {
        self.relations
            .get(relation)
            .ok_or_else(|| StructureError::UnknownRelation {
                relation: relation.to_string(),
            })
    }

    pub fn contains_tuple(&self, relation: &str, tuple: &[usize]) -> Result<bool, StructureError> {
        self.check_tuple(relation, tuple)?;
        Ok(self.relations[relation].contains(tuple))
    }

    /// Labels an element. Names are injective: two names may not share an
    /// element, and re-registering a name moves it.
    pub fn set_name(&mut self, name: &str, element: usize) -> Result<(), StructureError> {
        if element >= self.size {
            return Err(StructureError::NameOutOfRange {
                name: name.to_string(),
                element,
                size: self.size,
            });
        }
        if let Some((other, _)) = self
            .names
            .iter()
            .find(|(other, &e)| e == element && other.as_str() != name)
        {
            return Err(StructureError::DuplicateName {
                first: other.clone(),
                second: name.to_string(),
                element,
            });
        }
        self.names.insert(name.to_string(), element);
        Ok(())
    }

    pub fn names(&self) -> &BTreeMap<String, usize> {
        &self.names
    }

    /// Element labelled `name`, if any.
    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    /// Name of `element`, if it has one.
    pub fn name_of(&self, element: usize) -> Option<&str> {
        self.names
            .iter()
            .find(|(_, &e)| e == element)
            .map(|(n, _)| n.as_str())
    }

    /// Applies a permutation of the universe: element `i` becomes `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> FiniteStructure {
        assert_eq!(map.len(), self.size, "relabel map must cover the universe");
        let mut out = FiniteStructure::new(self.signature.clone(), self.size).unwrap();
        for (rel, tuples) in &self.relations {
            let mapped = tuples
                .iter()
                .map(|t| t.iter().map(|&e| map[e]).collect::<Vec<_>>());
            out.set_tuples(rel, mapped).unwrap();
        }
        for (name, &e) in &self.names {
            out.set_name(name, map[e]).unwrap();
        }
        out
    }

    /// Connected components of the symmetric closure of a binary relation,
    /// sorted by least element. For an equivalence relation these are its
    /// classes.
    pub fn equivalence_classes(&self, relation: &str) -> Result<Vec<Vec<usize>>, StructureError> {
        let arity =
            self.signature
                .arity(relation)
                .ok_or_else(|| StructureError::UnknownRelation {
                    relation: relation.to_string(),
                })?;
        if arity != 2 {
            return Err(StructureError::ArityMismatch {
                relation: relation.to_string(),
                expected: 2,
                got: arity,
            });
        }
        let mut parent: Vec<usize> = (0..self.size).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for t in &self.relations[relation] {
            let (a, b) = (find(&mut parent, t[0]), find(&mut parent, t[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in 0..self.size {
            let root = find(&mut parent, e);
            classes.entry(root).or_default().push(e);
        }
        Ok(classes.into_values().collect())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&StructureJson::from(self)).unwrap()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(StructureJson::from(self)).unwrap()
    }

    pub fn from_json_str(text: &str) -> Result<Self, StructureError> {
        let dto: StructureJson =
            serde_json::from_str(text).map_err(|e| StructureError::Json(e.to_string()))?;
        dto.try_into()
    }
}

/// External JSON form of a structure. Tuple lists are compared as sets;
/// relations missing from the map are empty; `names` may be omitted.
#[derive(Serialize, Deserialize)]
struct StructureJson {
    signature: BTreeMap<String, usize>,
    size: usize,
    relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    names: Option<BTreeMap<String, usize>>,
}

impl From<&FiniteStructure> for StructureJson {
    fn from(s: &FiniteStructure) -> Self {
        StructureJson {
            signature: s.signature.arity_map().clone(),
            size: s.size,
            relations: s
                .relations
                .iter()
                .map(|(n, ts)| (n.clone(), ts.iter().cloned().collect()))
                .collect(),
            names: if s.names.is_empty() {
                None
            } else {
                Some(s.names.clone())
            },
        }
    }
}

impl TryFrom<StructureJson> for FiniteStructure {
    type Error = StructureError;

    fn try_from(dto: StructureJson) -> Result<Self, StructureError> {
        let signature = Signature::new(dto.signature)
            .map_err(|e| StructureError::Json(e.to_string()))?;
        let mut s = FiniteStructure::new(signature, dto.size)?;
        for (rel, tuples) in dto.relations {
            s.set_tuples(&rel, tuples)?;
        }
        for (name, element) in dto.names.unwrap_or_default() {
            s.set_name(&name, element)?;
        }
        Ok(s)
    }
}

// Compiled evaluation.

enum RelData {
    Dense { strides: Vec<usize>, table: Vec<bool> },
    Sparse(BTreeSet<Vec<usize>>),
}

impl RelData {
    fn contains(&self, env: &[usize], slots: &[usize]) -> bool {
        match self {
            RelData::Dense { strides, table } => {
                let mut idx = 0;
                for (slot, stride) in slots.iter().zip(strides) {
                    idx += env[*slot] * stride;
                }
                table[idx]
            }
            RelData::Sparse(set) => {
                let tuple: Vec<usize> = slots.iter().map(|&s| env[s]).collect();
                set.contains(&tuple)
            }
        }
    }
}

const DENSE_TABLE_LIMIT: usize = 1 << 26;

enum Code {
    Atom { rel: usize, slots: Vec<usize> },
    Equal(usize, usize),
    Not(Box<Code>),
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Implies(Box<Code>, Box<Code>),
    Iff(Box<Code>, Box<Code>),
    Quant {
        id: usize,
        exists: bool,
        slots: Vec<usize>,
        /// `groups[k]` holds the pieces whose quantified variables are all
        /// among `slots[..k]`; conjuncts of an existential block, disjuncts
        /// of a universal one.
        groups: Vec<Vec<Code>>,
        /// Outer slots read below this node; memo key when at most four.
        free: Vec<usize>,
    },
}

struct Compiler<'f> {
    signature: &'f Signature,
    rel_ids: BTreeMap<&'f str, usize>,
    scopes: Vec<(String, usize)>,
    frees: Vec<(String, usize)>,
    slot_count: usize,
    quant_count: usize,
}

impl<'f> Compiler<'f> {
    fn lookup(&mut self, var: &str) -> usize {
        if let Some((_, slot)) = self.scopes.iter().rev().find(|(v, _)| v == var) {
            return *slot;
        }
        if let Some((_, slot)) = self.frees.iter().find(|(v, _)| v == var) {
            return *slot;
        }
        let slot = self.slot_count;
        self.slot_count += 1;
        self.frees.push((var.to_string(), slot));
        slot
    }

    fn compile(&mut self, f: &'f Formula, free: &mut BTreeSet<usize>) -> Result<Code, EvalError> {
        match f {
            Formula::Atom(rel, args) => {
                let arity = self.signature.arity(rel).ok_or_else(|| {
                    EvalError::UnknownRelation {
                        relation: rel.clone(),
                    }
                })?;
                if args.len() != arity {
                    return Err(EvalError::ArityMismatch {
                        relation: rel.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                let slots: Vec<usize> = args.iter().map(|a| self.lookup(a)).collect();
                free.extend(slots.iter().copied());
                Ok(Code::Atom {
                    rel: self.rel_ids[rel.as_str()],
                    slots,
                })
            }
            Formula::Equal(a, b) => {
                let (sa, sb) = (self.lookup(a), self.lookup(b));
                free.insert(sa);
                free.insert(sb);
                Ok(Code::Equal(sa, sb))
            }
            Formula::Not(g) => Ok(Code::Not(Box::new(self.compile(g, free)?))),
            Formula::And(l, r) => Ok(Code::And(
                Box::new(self.compile(l, free)?),
                Box::new(self.compile(r, free)?),
            )),
            Formula::Or(l, r) => Ok(Code::Or(
                Box::new(self.compile(l, free)?),
                Box::new(self.compile(r, free)?),
            )),
            Formula::Implies(l, r) => Ok(Code::Implies(
                Box::new(self.compile(l, free)?),
                Box::new(self.compile(r, free)?),
            )),
            Formula::Iff(l, r) => Ok(Code::Iff(
                Box::new(self.compile(l, free)?),
                Box::new(self.compile(r, free)?),
            )),
            Formula::Exists(vs, body) => self.compile_quant(true, vs, body, free),
            Formula::Forall(vs, body) => self.compile_quant(false, vs, body, free),
        }
    }

    fn compile_quant(
        &mut self,
        exists: bool,
        vs: &'f [String],
        body: &'f Formula,
        free: &mut BTreeSet<usize>,
    ) -> Result<Code, EvalError> {
        // ∃v̄ (A ∨ B) ≡ ∃v̄ A ∨ ∃v̄ B and dually; splitting keeps each
        // branch a homogeneous piece list so scheduling can prune early.
        let branches = if exists {
            split_or(body)
        } else {
            split_and(body)
        };
        if branches.len() > 1 {
            let mut compiled = branches
                .into_iter()
                .map(|b| self.compile_quant_single(exists, vs, b, free))
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = compiled.remove(0);
            for c in compiled {
                out = if exists {
                    Code::Or(Box::new(out), Box::new(c))
                } else {
                    Code::And(Box::new(out), Box::new(c))
                };
            }
            Ok(out)
        } else {
            self.compile_quant_single(exists, vs, body, free)
        }
    }

    fn compile_quant_single(
        &mut self,
        exists: bool,
        vs: &'f [String],
        body: &'f Formula,
        free: &mut BTreeSet<usize>,
    ) -> Result<Code, EvalError> {
        let depth = self.scopes.len();
        let mut slots = Vec::with_capacity(vs.len());
        for v in vs {
            let slot = self.slot_count;
            self.slot_count += 1;
            self.scopes.push((v.clone(), slot));
            slots.push(slot);
        }
        let pieces = if exists { split_and(body) } else { split_or(body) };
        let mut groups: Vec<Vec<Code>> = (0..=slots.len()).map(|_| Vec::new()).collect();
        let mut inner_free = BTreeSet::new();
        for piece in pieces {
            let mut piece_free = BTreeSet::new();
            let code = self.compile(piece, &mut piece_free)?;
            let level = piece_free
                .iter()
                .filter_map(|s| slots.iter().position(|x| x == s))
                .map(|p| p + 1)
                .max()
                .unwrap_or(0);
            groups[level].push(code);
            inner_free.extend(piece_free);
        }
        self.scopes.truncate(depth);
        let node_free: Vec<usize> = inner_free
            .into_iter()
            .filter(|s| !slots.contains(s))
            .collect();
        free.extend(node_free.iter().copied());
        let id = self.quant_count;
        self.quant_count += 1;
        Ok(Code::Quant {
            id,
            exists,
            slots,
            groups,
            free: node_free,
        })
    }
}

fn split_and(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(l, r) => {
            let mut out = split_and(l);
            out.extend(split_and(r));
            out
        }
        _ => vec![f],
    }
}

fn split_or(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Or(l, r) => {
            let mut out = split_or(l);
            out.extend(split_or(r));
            out
        }
        _ => vec![f],
    }
}

/// Compiled form of one formula over one structure; evaluates many
/// assignments, sharing relation tables and the memo between calls.
pub struct Evaluator<'s> {
    structure: &'s FiniteStructure,
    code: Code,
    free_slots: Vec<(String, usize)>,
    env: Vec<usize>,
    rels: Vec<RelData>,
    memo: HashMap<(usize, u64), bool>,
}

impl<'s> Evaluator<'s> {
    pub fn new(structure: &'s FiniteStructure, formula: &Formula) -> Result<Self, EvalError> {
        let signature = structure.signature();
        let rel_ids: BTreeMap<&str, usize> = signature
            .relations()
            .enumerate()
            .map(|(i, (n, _))| (n, i))
            .collect();
        let n = structure.size();
        let mut rels = Vec::with_capacity(rel_ids.len());
        for (name, arity) in signature.relations() {
            let total = n.checked_pow(arity as u32);
            let tuples = structure.tuples(name).unwrap();
            match total {
                Some(total) if total <= DENSE_TABLE_LIMIT => {
                    let mut strides = vec![1usize; arity];
                    for i in (0..arity.saturating_sub(1)).rev() {
                        strides[i] = strides[i + 1] * n;
                    }
                    let mut table = vec![false; total];
                    for t in tuples {
                        let idx: usize =
                            t.iter().zip(&strides).map(|(e, s)| e * s).sum();
                        table[idx] = true;
                    }
                    rels.push(RelData::Dense { strides, table });
                }
                _ => rels.push(RelData::Sparse(tuples.clone())),
            }
        }
        let mut compiler = Compiler {
            signature,
            rel_ids,
            scopes: Vec::new(),
            frees: Vec::new(),
            slot_count: 0,
            quant_count: 0,
        };
        let mut free = BTreeSet::new();
        let code = compiler.compile(formula, &mut free)?;
        let free_slots = compiler.frees;
        let env = vec![0; compiler.slot_count];
        Ok(Evaluator {
            structure,
            code,
            free_slots,
            env,
            rels,
            memo: HashMap::new(),
        })
    }

    /// Free variables the formula needs assigned.
    pub fn free_vars(&self) -> impl Iterator<Item = &str> {
        self.free_slots.iter().map(|(v, _)| v.as_str())
    }

    pub fn structure(&self) -> &'s FiniteStructure {
        self.structure
    }

    pub fn eval(&mut self, asg: &Assignment) -> Result<bool, EvalError> {
        let n = self.structure.size();
        for i in 0..self.free_slots.len() {
            let (var, slot) = &self.free_slots[i];
            let value = *asg
                .get(var)
                .ok_or_else(|| EvalError::UnboundVariable {
                    variable: var.clone(),
                })?;
            if value >= n {
                return Err(EvalError::AssignmentOutOfRange {
                    variable: var.clone(),
                    element: value,
                    size: n,
                });
            }
            self.env[*slot] = value;
        }
        Ok(run(
            &self.code,
            &mut self.env,
            &self.rels,
            n,
            &mut self.memo,
        ))
    }
}

fn run(
    code: &Code,
    env: &mut Vec<usize>,
    rels: &[RelData],
    n: usize,
    memo: &mut HashMap<(usize, u64), bool>,
) -> bool {
    match code {
        Code::Atom { rel, slots } => rels[*rel].contains(env, slots),
        Code::Equal(a, b) => env[*a] == env[*b],
        Code::Not(g) => !run(g, env, rels, n, memo),
        Code::And(l, r) => run(l, env, rels, n, memo) && run(r, env, rels, n, memo),
        Code::Or(l, r) => run(l, env, rels, n, memo) || run(r, env, rels, n, memo),
        Code::Implies(l, r) => !run(l, env, rels, n, memo) || run(r, env, rels, n, memo),
        Code::Iff(l, r) => run(l, env, rels, n, memo) == run(r, env, rels, n, memo),
        Code::Quant {
            id,
            exists,
            slots,
            groups,
            free,
        } => {
            let key = if free.len() <= 4 && n <= 0xffff {
                let mut packed: u64 = 0;
                for slot in free {
                    packed = (packed << 16) | env[*slot] as u64;
                }
                Some((*id, packed))
            } else {
                None
            };
            if let Some(k) = key {
                if let Some(&v) = memo.get(&k) {
                    return v;
                }
            }
            let result = quant_dfs(*exists, slots, groups, 0, env, rels, n, memo);
            if let Some(k) = key {
                memo.insert(k, result);
            }
            result
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn quant_dfs(
    exists: bool,
    slots: &[usize],
    groups: &[Vec<Code>],
    level: usize,
    env: &mut Vec<usize>,
    rels: &[RelData],
    n: usize,
    memo: &mut HashMap<(usize, u64), bool>,
) -> bool {
    if level == 0 {
        // Pieces with no quantified variables decide the node by themselves
        // when they fail (exists) or succeed (forall).
        for piece in &groups[0] {
            let v = run(piece, env, rels, n, memo);
            if v != exists {
                return v;
            }
        }
        if slots.is_empty() {
            return exists;
        }
    }
    if level == slots.len() {
        return exists;
    }
    let slot = slots[level];
    'candidates: for cand in 0..n {
        env[slot] = cand;
        let mut settled = false;
        for piece in &groups[level + 1] {
            let v = run(piece, env, rels, n, memo);
            if exists {
                if !v {
                    continue 'candidates;
                }
            } else if v {
                settled = true;
                break;
            }
        }
        if !exists && settled {
            continue;
        }
        if level + 1 == slots.len() {
            if exists {
                return true;
            }
            // Universal block: no disjunct held for this full assignment.
            return false;
        }
        let sub = quant_dfs(exists, slots, groups, level + 1, env, rels, n, memo);
        if sub == exists {
            return exists;
        }
    }
    !exists
}

/// Evaluates `formula` in `structure` under `asg`. Total on well-formed
/// input: the formula must fit the structure's signature and `asg` must
/// cover its free variables.
pub fn eval(
    structure: &FiniteStructure,
    formula: &Formula,
    asg: &Assignment,
) -> Result<bool, EvalError> {
    Evaluator::new(structure, formula)?.eval(asg)
}

/// Elements satisfying a formula whose only free variable is `var`.
pub fn definable_set(
    structure: &FiniteStructure,
    formula: &Formula,
    var: &str,
) -> Result<BTreeSet<usize>, EvalError> {
    for v in formula.free_vars() {
        if v != var {
            return Err(EvalError::UnboundVariable { variable: v });
        }
    }
    let mut evaluator = Evaluator::new(structure, formula)?;
    let mut asg = Assignment::new();
    let mut out = BTreeSet::new();
    for e in 0..structure.size() {
        asg.insert(var.to_string(), e);
        if evaluator.eval(&asg)? {
            out.insert(e);
        }
    }
    Ok(out)
}
