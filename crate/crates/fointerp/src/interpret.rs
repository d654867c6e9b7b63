//! Interpretation schemas: existential definitions of one class of
//! structures inside another, the checker for their three defining
//! conditions, and the induced translation on sentences.

use crate::formula::{and, and_all, not, or_all, rename_bound_apart, replace_free_vars, Formula};
use crate::iso::find_isomorphism;
use crate::signature::Signature;
use crate::structure::{Assignment, EvalError, Evaluator, FiniteStructure};
use crate::transform::{to_nnf, PrefixClass, PrefixKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpretError {
    #[error("schema: {0}")]
    BadSchema(String),
    #[error("{role} structure has signature {got}, schema expects {expected}")]
    SignatureMismatch {
        role: &'static str,
        expected: String,
        got: String,
    },
    #[error("witness names parameters {got:?}, schema declares {expected:?}")]
    ParamMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("parameter {name} = {value} is outside a structure of size {size}")]
    ParamOutOfRange {
        name: String,
        value: usize,
        size: usize,
    },
    #[error("expected a sentence, found free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("sentence uses {relation}/{got}, source signature declares {declared}")]
    BadSourceRelation {
        relation: String,
        got: usize,
        declared: String,
    },
    #[error("schema formula for {name} sits in {class}, outside every Sigma level")]
    NotExistential { name: String, class: String },
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("json: {0}")]
    Json(String),
}

/// Defining formulas for one source relation: `pos` holds on the tuples in
/// the relation, `neg` on the tuples out of it. Argument variables are
/// x1..xn; schema parameters may occur free as well.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaRelation {
    pub pos: Formula,
    pub neg: Formula,
}

/// An interpretation of source-signature structures inside
/// target-signature structures.
///
/// `domain` (argument variable x) carves the carrier out of the host;
/// `domain_complement`, when present, must define exactly the rest of the
/// host. Each source relation gets a positive and a negative definition,
/// required to be complementary on domain tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretationSchema {
    pub source: Signature,
    pub target: Signature,
    pub params: Vec<String>,
    pub domain: Formula,
    pub domain_complement: Option<Formula>,
    pub relations: BTreeMap<String, SchemaRelation>,
}

/// A host structure together with values for the schema parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub structure: FiniteStructure,
    pub params: Assignment,
}

impl Witness {
    pub fn new(structure: FiniteStructure, params: Assignment) -> Self {
        Witness { structure, params }
    }
}

fn argument_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl InterpretationSchema {
    /// Structural well-formedness: every source relation defined, every
    /// formula over the target signature, free variables confined to the
    /// declared arguments and parameters.
    pub fn validate(&self) -> Result<(), InterpretError> {
        let mut seen = BTreeSet::new();
        for p in &self.params {
            if !seen.insert(p.clone()) {
                return Err(InterpretError::BadSchema(format!(
                    "duplicate parameter {p}"
                )));
            }
            if p == "x" || (p.starts_with('x') && p[1..].chars().all(|c| c.is_ascii_digit())) {
                return Err(InterpretError::BadSchema(format!(
                    "parameter {p} collides with argument variable names"
                )));
            }
        }
        let declared: BTreeSet<&str> = self.source.relations().map(|(n, _)| n).collect();
        let defined: BTreeSet<&str> = self.relations.keys().map(String::as_str).collect();
        if declared != defined {
            return Err(InterpretError::BadSchema(format!(
                "source relations {declared:?} but definitions for {defined:?}"
            )));
        }
        self.check_formula("U", &self.domain, &["x".to_string()])?;
        if let Some(c) = &self.domain_complement {
            self.check_formula("¬U", c, &["x".to_string()])?;
        }
        for (name, rel) in &self.relations {
            let args = argument_vars(self.source.arity(name).unwrap());
            self.check_formula(name, &rel.pos, &args)?;
            self.check_formula(&format!("¬{name}"), &rel.neg, &args)?;
        }
        Ok(())
    }

    fn check_formula(
        &self,
        name: &str,
        f: &Formula,
        args: &[String],
    ) -> Result<(), InterpretError> {
        for (rel, arity) in f.relation_uses() {
            match self.target.arity(&rel) {
                Some(a) if a == arity => {}
                declared => {
                    return Err(InterpretError::BadSchema(format!(
                        "formula for {name} uses {rel}/{arity}, target declares {declared:?}"
                    )))
                }
            }
        }
        let allowed: BTreeSet<&String> = args.iter().chain(self.params.iter()).collect();
        let stray: Vec<String> = f
            .free_vars()
            .into_iter()
            .filter(|v| !allowed.contains(v))
            .collect();
        if !stray.is_empty() {
            return Err(InterpretError::BadSchema(format!(
                "formula for {name} has stray free variables {stray:?}"
            )));
        }
        Ok(())
    }

    /// The domain formula instantiated at a variable.
    fn domain_at(&self, v: &str) -> Formula {
        instantiate(&self.domain, &[("x", v)], &self.params)
    }

    /// A formula true exactly off the domain: the negated domain formula
    /// in negation normal form. The declared complement is not used here.
    /// It is existential, and guarding a universal block with an
    /// existential formula would cost a quantifier alternation the
    /// promised translation class has no room for; the negated domain is
    /// equivalent on any host that passes verification and universal.
    fn complement_at(&self, v: &str) -> Formula {
        to_nnf(&not(self.domain_at(v)))
    }

    fn all_formulas(&self) -> Vec<(String, &Formula)> {
        let mut out = vec![("U".to_string(), &self.domain)];
        if let Some(c) = &self.domain_complement {
            out.push(("¬U".to_string(), c));
        }
        for (name, rel) in &self.relations {
            out.push((name.clone(), &rel.pos));
            out.push((format!("¬{name}"), &rel.neg));
        }
        out
    }

    /// Every variable occurring anywhere in the schema; sentence variables
    /// are renamed away from these before translation.
    fn reserved_vars(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.params.iter().cloned().collect();
        for (_, f) in self.all_formulas() {
            out.extend(f.all_vars());
        }
        out
    }

    /// Human-readable listing of the schema's formulas.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("source: {}\n", self.source));
        out.push_str(&format!("target: {}\n", self.target));
        if !self.params.is_empty() {
            out.push_str(&format!("params: {}\n", self.params.join(", ")));
        }
        out.push_str(&format!("U(x) := {}\n", self.domain));
        if let Some(c) = &self.domain_complement {
            out.push_str(&format!("¬U(x) := {c}\n"));
        }
        for (name, rel) in &self.relations {
            let args = argument_vars(self.source.arity(name).unwrap()).join(", ");
            out.push_str(&format!("{name}({args}) := {}\n", rel.pos));
            out.push_str(&format!("¬{name}({args}) := {}\n", rel.neg));
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SchemaJson::from(self)).expect("schema serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SchemaJson::from(self)).expect("schema serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, InterpretError> {
        let dto: SchemaJson =
            serde_json::from_str(text).map_err(|e| InterpretError::Json(e.to_string()))?;
        let schema = dto.into_schema()?;
        schema.validate()?;
        Ok(schema)
    }
}

/// Substitute argument variables, renaming the formula's bound variables
/// first so neither the substituted values nor the parameters are captured.
fn instantiate(f: &Formula, subs: &[(&str, &str)], params: &[String]) -> Formula {
    let mut avoid: BTreeSet<String> = params.iter().cloned().collect();
    avoid.extend(subs.iter().map(|(_, v)| v.to_string()));
    let renamed = rename_bound_apart(f, &avoid);
    let map: Vec<(String, String)> = subs
        .iter()
        .map(|(from, to)| (from.to_string(), to.to_string()))
        .collect();
    replace_free_vars(&renamed, &map)
}

/// Outcome of checking the schema's conditions against one witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// Host elements satisfying the domain formula, ascending.
    pub domain: Vec<usize>,
    pub domain_nonempty: bool,
    /// True when the negative definitions complement the positive ones
    /// where required.
    pub complement_consistent: bool,
    /// Offending (formula label, host tuple) pairs; label "U" marks a
    /// domain-complement failure.
    pub violations: Vec<(String, Vec<usize>)>,
    /// The structure the schema carves out, present when the two checks
    /// above pass. Its element i is host element `domain[i]`.
    pub induced: Option<FiniteStructure>,
}

impl ConditionReport {
    pub fn conditions_met(&self) -> bool {
        self.domain_nonempty && self.complement_consistent
    }
}

fn check_witness(
    schema: &InterpretationSchema,
    w: &Witness,
) -> Result<(), InterpretError> {
    if *w.structure.signature() != schema.target {
        return Err(InterpretError::SignatureMismatch {
            role: "host",
            expected: schema.target.to_string(),
            got: w.structure.signature().to_string(),
        });
    }
    let expected: Vec<String> = schema.params.clone();
    let got: Vec<String> = w.params.keys().cloned().collect();
    let mut sorted = expected.clone();
    sorted.sort();
    if got != sorted {
        return Err(InterpretError::ParamMismatch { expected, got });
    }
    for (name, &value) in &w.params {
        if value >= w.structure.size() {
            return Err(InterpretError::ParamOutOfRange {
                name: name.clone(),
                value,
                size: w.structure.size(),
            });
        }
    }
    Ok(())
}

/// Evaluate the schema against one witness: compute the domain, check the
/// complement conditions, and build the induced structure when they hold.
pub fn induce(
    schema: &InterpretationSchema,
    w: &Witness,
) -> Result<ConditionReport, InterpretError> {
    schema.validate()?;
    check_witness(schema, w)?;
    let b = &w.structure;

    let mut dom_eval = Evaluator::new(b, &schema.domain)?;
    let mut asg = w.params.clone();
    let mut domain = Vec::new();
    for e in 0..b.size() {
        asg.insert("x".to_string(), e);
        if dom_eval.eval(&asg)? {
            domain.push(e);
        }
    }
    let domain_nonempty = !domain.is_empty();

    let mut violations: Vec<(String, Vec<usize>)> = Vec::new();
    if let Some(c) = &schema.domain_complement {
        let mut comp_eval = Evaluator::new(b, c)?;
        for e in 0..b.size() {
            asg.insert("x".to_string(), e);
            if comp_eval.eval(&asg)? == domain.binary_search(&e).is_ok() {
                violations.push(("U".to_string(), vec![e]));
            }
        }
    }
    asg.remove("x");

    let mut positives: BTreeMap<String, Vec<Vec<usize>>> = BTreeMap::new();
    for (name, rel) in &schema.relations {
        let arity = schema.source.arity(name).unwrap();
        let mut pos_eval = Evaluator::new(b, &rel.pos)?;
        let mut neg_eval = Evaluator::new(b, &rel.neg)?;
        let args = argument_vars(arity);
        let mut tuples = Vec::new();
        if domain.is_empty() {
            positives.insert(name.clone(), tuples);
            continue;
        }
        // All tuples over the domain, odometer order.
        let mut idx = vec![0usize; arity];
        'tuples: loop {
            for (v, i) in args.iter().zip(&idx) {
                asg.insert(v.clone(), domain[*i]);
            }
            let p = pos_eval.eval(&asg)?;
            let n = neg_eval.eval(&asg)?;
            if p == n {
                violations.push((name.clone(), idx.iter().map(|&i| domain[i]).collect()));
            }
            if p {
                tuples.push(idx.clone());
            }
            for pos in (0..arity).rev() {
                idx[pos] += 1;
                if idx[pos] < domain.len() {
                    continue 'tuples;
                }
                idx[pos] = 0;
            }
            break;
        }
        for v in &args {
            asg.remove(v);
        }
        positives.insert(name.clone(), tuples);
    }

    let complement_consistent = violations.is_empty();
    let induced = if domain_nonempty && complement_consistent {
        let mut s = FiniteStructure::new(schema.source.clone(), domain.len())
            .expect("domain checked nonempty");
        for (name, tuples) in positives {
            s.set_tuples(&name, tuples).expect("tuples in range");
        }
        Some(s)
    } else {
        None
    };

    Ok(ConditionReport {
        domain,
        domain_nonempty,
        complement_consistent,
        violations,
        induced,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub report: ConditionReport,
    /// Maps each element of the interpreted structure to the position in
    /// `report.domain` carrying it, when the check succeeds.
    pub bijection: Option<Vec<usize>>,
}

impl VerifyOutcome {
    pub fn valid(&self) -> bool {
        self.bijection.is_some()
    }
}

/// Full check that the witness makes the schema interpret `a`: the domain
/// is nonempty, negative definitions are complementary, and the induced
/// structure is isomorphic to `a`.
pub fn verify(
    schema: &InterpretationSchema,
    a: &FiniteStructure,
    w: &Witness,
) -> Result<VerifyOutcome, InterpretError> {
    if *a.signature() != schema.source {
        return Err(InterpretError::SignatureMismatch {
            role: "interpreted",
            expected: schema.source.to_string(),
            got: a.signature().to_string(),
        });
    }
    let report = induce(schema, w)?;
    let bijection = report
        .induced
        .as_ref()
        .and_then(|induced| find_isomorphism(a, induced));
    Ok(VerifyOutcome { report, bijection })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pol {
    Ex,
    All,
}

/// Translate a source-signature sentence into a host sentence with the
/// schema parameters left free. Satisfying the result under the witness
/// parameters is equivalent to the interpreted structure satisfying the
/// original, whenever the witness passes verification.
pub fn translate_open(
    schema: &InterpretationSchema,
    sentence: &Formula,
) -> Result<Formula, InterpretError> {
    schema.validate()?;
    let free: Vec<String> = sentence.free_vars().into_iter().collect();
    if !free.is_empty() {
        return Err(InterpretError::NotASentence(free));
    }
    for (rel, arity) in sentence.relation_uses() {
        if schema.source.arity(&rel) != Some(arity) {
            let declared = match schema.source.arity(&rel) {
                Some(a) => format!("arity {a}"),
                None => "no such relation".to_string(),
            };
            return Err(InterpretError::BadSourceRelation {
                relation: rel,
                got: arity,
                declared,
            });
        }
    }
    let nnf = to_nnf(sentence);
    let prepared = rename_bound_apart(&nnf, &schema.reserved_vars());
    tr(schema, &prepared, Pol::Ex)
}

/// `translate_open` with the parameters closed off existentially, giving a
/// host sentence.
pub fn translate(
    schema: &InterpretationSchema,
    sentence: &Formula,
) -> Result<Formula, InterpretError> {
    let open = translate_open(schema, sentence)?;
    if schema.params.is_empty() {
        Ok(open)
    } else {
        Ok(Formula::Exists(schema.params.clone(), Box::new(open)))
    }
}

/// Atoms are rewritten by the polarity of the innermost enclosing
/// quantifier: under an existential block the positive and negative
/// definitions go in directly; under a universal block their negated duals
/// go in instead, which is equivalent on domain tuples and keeps universal
/// matrices universal.
fn tr(schema: &InterpretationSchema, f: &Formula, pol: Pol) -> Result<Formula, InterpretError> {
    match f {
        Formula::Atom(rel, args) => Ok(literal(schema, rel, args, false, pol)),
        Formula::Not(inner) => match &**inner {
            Formula::Atom(rel, args) => Ok(literal(schema, rel, args, true, pol)),
            Formula::Equal(..) => Ok(f.clone()),
            other => unreachable!("not in negation normal form: ¬({other})"),
        },
        Formula::Equal(..) => Ok(f.clone()),
        Formula::And(a, b) => Ok(and(tr(schema, a, pol)?, tr(schema, b, pol)?)),
        Formula::Or(a, b) => Ok(crate::formula::or(tr(schema, a, pol)?, tr(schema, b, pol)?)),
        Formula::Exists(vars, body) => {
            let mut parts: Vec<Formula> = vars.iter().map(|v| schema.domain_at(v)).collect();
            parts.push(tr(schema, body, Pol::Ex)?);
            Ok(Formula::Exists(vars.clone(), Box::new(and_all(parts))))
        }
        Formula::Forall(vars, body) => {
            let mut parts: Vec<Formula> = vars.iter().map(|v| schema.complement_at(v)).collect();
            parts.push(tr(schema, body, Pol::All)?);
            Ok(Formula::Forall(vars.clone(), Box::new(or_all(parts))))
        }
        Formula::Implies(..) | Formula::Iff(..) => {
            unreachable!("not in negation normal form: {f}")
        }
    }
}

fn literal(
    schema: &InterpretationSchema,
    rel: &str,
    args: &[String],
    negated: bool,
    pol: Pol,
) -> Formula {
    let def = &schema.relations[rel];
    let formal = argument_vars(args.len());
    let subs: Vec<(&str, &str)> = formal
        .iter()
        .map(String::as_str)
        .zip(args.iter().map(String::as_str))
        .collect();
    let pick_pos = negated == (pol == Pol::All);
    let picked = if pick_pos { &def.pos } else { &def.neg };
    let inst = instantiate(picked, &subs, &schema.params);
    match pol {
        Pol::Ex => inst,
        Pol::All => to_nnf(&not(inst)),
    }
}

/// Largest quantifier depth among the schema's formulas, at least 1; the
/// translation of a prefix-class-c sentence lands within class
/// (c.kind, c.k + depth - 1). Errors when some schema formula sits outside
/// every Sigma level.
pub fn schema_depth(schema: &InterpretationSchema) -> Result<usize, InterpretError> {
    let mut depth = 1;
    for (name, f) in schema.all_formulas() {
        let c = crate::transform::classify(f);
        if c.kind == PrefixKind::Pi {
            return Err(InterpretError::NotExistential {
                name,
                class: c.to_string(),
            });
        }
        depth = depth.max(c.k);
    }
    Ok(depth)
}

/// Prefix class bound for translations of sentences in class `c`.
pub fn translation_class(
    schema: &InterpretationSchema,
    c: PrefixClass,
) -> Result<PrefixClass, InterpretError> {
    let depth = schema_depth(schema)?;
    if c.k == 0 {
        return Ok(PrefixClass {
            kind: PrefixKind::Sigma,
            k: depth,
        });
    }
    Ok(PrefixClass {
        kind: c.kind,
        k: c.k + depth - 1,
    })
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    pos: String,
    neg: String,
}

#[derive(Serialize, Deserialize)]
struct SchemaJson {
    source: BTreeMap<String, usize>,
    target: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<String>,
    #[serde(rename = "phiU")]
    phi_u: String,
    #[serde(rename = "phiNotU", default, skip_serializing_if = "Option::is_none")]
    phi_not_u: Option<String>,
    relations: BTreeMap<String, RelationJson>,
}

impl From<&InterpretationSchema> for SchemaJson {
    fn from(s: &InterpretationSchema) -> Self {
        SchemaJson {
            source: s.source.relations().map(|(n, a)| (n.to_string(), a)).collect(),
            target: s.target.relations().map(|(n, a)| (n.to_string(), a)).collect(),
            params: s.params.clone(),
            phi_u: s.domain.to_string(),
            phi_not_u: s.domain_complement.as_ref().map(Formula::to_string),
            relations: s
                .relations
                .iter()
                .map(|(n, r)| {
                    (
                        n.clone(),
                        RelationJson {
                            pos: r.pos.to_string(),
                            neg: r.neg.to_string(),
                        },
                    )
                })
                .collect(),
        }
    }
}

impl SchemaJson {
    fn into_schema(self) -> Result<InterpretationSchema, InterpretError> {
        let mk_sig = |m: BTreeMap<String, usize>| {
            Signature::new(m).map_err(|e| InterpretError::Json(e.to_string()))
        };
        let parse = |label: &str, text: &str| {
            crate::parser::parse(text)
                .map_err(|e| InterpretError::Json(format!("{label}: {e}")))
        };
        let mut relations = BTreeMap::new();
        for (name, r) in self.relations {
            let pos = parse(&name, &r.pos)?;
            let neg = parse(&format!("¬{name}"), &r.neg)?;
            relations.insert(name, SchemaRelation { pos, neg });
        }
        Ok(InterpretationSchema {
            source: mk_sig(self.source)?,
            target: mk_sig(self.target)?,
            params: self.params.clone(),
            domain: parse("phiU", &self.phi_u)?,
            domain_complement: match &self.phi_not_u {
                Some(t) => Some(parse("phiNotU", t)?),
                None => None,
            },
            relations,
        })
    }
}
