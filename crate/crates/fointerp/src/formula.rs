//! First-order formula syntax over relational signatures.
//!
//! Formulas are built from relation atoms and equalities between variables;
//! there are no constant or function symbols. Two binary relation names,
//! `<` and `≈`, are rendered infix; everything else prints as `R(x,y)`.

use std::collections::BTreeSet;
use std::fmt;

/// Formula of first-order logic with equality.
///
/// Quantifiers carry a non-empty block of variables; `exists x y. φ` is one
/// node, not two. Connectives are binary, `&`/`|` associate left and
/// `->`/`<->` associate right when parsed or printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    /// Relation application `R(v1, …, vk)`.
    Atom(String, Vec<String>),
    /// Equality `v1 = v2` between variables.
    Equal(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

pub fn atom(rel: impl Into<String>, args: &[&str]) -> Formula {
    Formula::Atom(rel.into(), args.iter().map(|s| s.to_string()).collect())
}

pub fn eq(a: impl Into<String>, b: impl Into<String>) -> Formula {
    Formula::Equal(a.into(), b.into())
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    Formula::Iff(Box::new(a), Box::new(b))
}

/// Left fold of a non-empty conjunct list, so `and_all([a, b, c])` prints as
/// `a & b & c` and round-trips through the parser unchanged.
pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
    let mut it = parts.into_iter();
    let first = it.next().expect("and_all needs at least one conjunct");
    it.fold(first, and)
}

/// Left fold of a non-empty disjunct list.
pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
    let mut it = parts.into_iter();
    let first = it.next().expect("or_all needs at least one disjunct");
    it.fold(first, or)
}

pub fn exists(vars: &[&str], body: Formula) -> Formula {
    assert!(!vars.is_empty(), "empty quantifier block");
    Formula::Exists(vars.iter().map(|s| s.to_string()).collect(), Box::new(body))
}

pub fn forall(vars: &[&str], body: Formula) -> Formula {
    assert!(!vars.is_empty(), "empty quantifier block");
    Formula::Forall(vars.iter().map(|s| s.to_string()).collect(), Box::new(body))
}

/// Relation names printed infix between their two arguments.
pub fn is_infix_relation(name: &str) -> bool {
    name == "<" || name == "≈"
}

impl Formula {
    /// Variables occurring free, in sorted order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    if !bound.iter().any(|b| b == a) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::Equal(a, b) => {
                for v in [a, b] {
                    if !bound.iter().any(|x| x == v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// All variables mentioned anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Equal(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Not(g) => g.collect_all(out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_all(out);
                r.collect_all(out);
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                out.extend(vs.iter().cloned());
                body.collect_all(out);
            }
        }
    }

    /// Relation names used, with the arity of each occurrence.
    pub fn relation_uses(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.collect_relations(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_relations(&self, out: &mut Vec<(String, usize)>) {
        match self {
            Formula::Atom(rel, args) => out.push((rel.clone(), args.len())),
            Formula::Equal(..) => {}
            Formula::Not(g) => g.collect_relations(out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_relations(out);
                r.collect_relations(out);
            }
            Formula::Exists(_, body) | Formula::Forall(_, body) => body.collect_relations(out),
        }
    }
}

/// Picks a name based on `base` that is not in `used`, inserting it.
/// Generated names carry a prime so they cannot shadow plain input variables
/// by accident; primes are legal identifier characters in the parser.
pub fn fresh_var(base: &str, used: &mut BTreeSet<String>) -> String {
    let stem: String = base.chars().take_while(|c| *c != '\'').collect();
    for k in 1.. {
        let cand = format!("{stem}'{k}");
        if used.insert(cand.clone()) {
            return cand;
        }
    }
    unreachable!()
}

/// Renames bound variables so that no binder reuses a name from `avoid`,
/// from the free variables, or from an earlier binder. The result binds
/// every variable at most once.
pub fn rename_bound_apart(f: &Formula, avoid: &BTreeSet<String>) -> Formula {
    let mut used: BTreeSet<String> = avoid.clone();
    used.extend(f.free_vars());
    rename_rec(f, &mut used)
}

fn rename_rec(f: &Formula, used: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Equal(..) => f.clone(),
        Formula::Not(g) => not(rename_rec(g, used)),
        Formula::And(l, r) => and(rename_rec(l, used), rename_rec(r, used)),
        Formula::Or(l, r) => or(rename_rec(l, used), rename_rec(r, used)),
        Formula::Implies(l, r) => implies(rename_rec(l, used), rename_rec(r, used)),
        Formula::Iff(l, r) => iff(rename_rec(l, used), rename_rec(r, used)),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let mut new_vs = Vec::with_capacity(vs.len());
            let mut new_body = (**body).clone();
            for v in vs {
                if used.contains(v) {
                    let nv = fresh_var(v, used);
                    new_body = replace_free_var(&new_body, v, &nv);
                    new_vs.push(nv);
                } else {
                    used.insert(v.clone());
                    new_vs.push(v.clone());
                }
            }
            let new_body = rename_rec(&new_body, used);
            match f {
                Formula::Exists(..) => Formula::Exists(new_vs, Box::new(new_body)),
                _ => Formula::Forall(new_vs, Box::new(new_body)),
            }
        }
    }
}

/// Replaces free occurrences of `from` by `to`; `to` must not be captured,
/// which holds whenever `to` is fresh for the formula.
pub fn replace_free_var(f: &Formula, from: &str, to: &str) -> Formula {
    let swap = |v: &String| {
        if v == from {
            to.to_string()
        } else {
            v.clone()
        }
    };
    match f {
        Formula::Atom(rel, args) => Formula::Atom(rel.clone(), args.iter().map(swap).collect()),
        Formula::Equal(a, b) => Formula::Equal(swap(a), swap(b)),
        Formula::Not(g) => not(replace_free_var(g, from, to)),
        Formula::And(l, r) => and(
            replace_free_var(l, from, to),
            replace_free_var(r, from, to),
        ),
        Formula::Or(l, r) => or(
            replace_free_var(l, from, to),
            replace_free_var(r, from, to),
        ),
        Formula::Implies(l, r) => implies(
            replace_free_var(l, from, to),
            replace_free_var(r, from, to),
        ),
        Formula::Iff(l, r) => iff(
            replace_free_var(l, from, to),
            replace_free_var(r, from, to),
        ),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let new_body = if vs.iter().any(|v| v == from) {
                (**body).clone()
            } else {
                replace_free_var(body, from, to)
            };
            match f {
                Formula::Exists(..) => Formula::Exists(vs.clone(), Box::new(new_body)),
                _ => Formula::Forall(vs.clone(), Box::new(new_body)),
            }
        }
    }
}

/// Simultaneous renaming of free variables. The caller must ensure no
/// binder of `f` occurs among the keys or values of `map`; `substitute`
/// in the interpretation code re-binds schema formulas apart first.
pub fn replace_free_vars(f: &Formula, map: &[(String, String)]) -> Formula {
    let swap = |v: &String| {
        map.iter()
            .find(|(from, _)| from == v)
            .map(|(_, to)| to.clone())
            .unwrap_or_else(|| v.clone())
    };
    match f {
        Formula::Atom(rel, args) => Formula::Atom(rel.clone(), args.iter().map(swap).collect()),
        Formula::Equal(a, b) => Formula::Equal(swap(a), swap(b)),
        Formula::Not(g) => not(replace_free_vars(g, map)),
        Formula::And(l, r) => and(replace_free_vars(l, map), replace_free_vars(r, map)),
        Formula::Or(l, r) => or(replace_free_vars(l, map), replace_free_vars(r, map)),
        Formula::Implies(l, r) => implies(replace_free_vars(l, map), replace_free_vars(r, map)),
        Formula::Iff(l, r) => iff(replace_free_vars(l, map), replace_free_vars(r, map)),
        Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
            let inner: Vec<(String, String)> = map
                .iter()
                .filter(|(from, _)| !vs.iter().any(|v| v == from))
                .cloned()
                .collect();
            debug_assert!(
                !vs.iter()
                    .any(|v| inner.iter().any(|(_, to)| to == v)),
                "binder captures a substitution target"
            );
            let new_body = replace_free_vars(body, &inner);
            match f {
                Formula::Exists(..) => Formula::Exists(vs.clone(), Box::new(new_body)),
                _ => Formula::Forall(vs.clone(), Box::new(new_body)),
            }
        }
    }
}

// Printing. Binding strength: ! > & > | > -> > <->, quantifier bodies extend
// maximally to the right. `tail` is true when nothing follows the subformula
// in the output, which is exactly when a quantifier needs no parentheses.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Atom(..) | Formula::Equal(..) => 6,
        Formula::Not(_) => 5,
        Formula::And(..) => 4,
        Formula::Or(..) => 3,
        Formula::Implies(..) => 2,
        Formula::Iff(..) => 1,
        Formula::Exists(..) | Formula::Forall(..) => 0,
    }
}

fn fmt_rec(f: &Formula, out: &mut fmt::Formatter<'_>, required: u8, tail: bool) -> fmt::Result {
    let quantified = matches!(f, Formula::Exists(..) | Formula::Forall(..));
    let needs_parens = if quantified {
        !tail
    } else {
        prec(f) < required
    };
    if needs_parens {
        write!(out, "(")?;
        fmt_rec(f, out, 0, true)?;
        return write!(out, ")");
    }
    match f {
        Formula::Atom(rel, args) => {
            if args.len() == 2 && is_infix_relation(rel) {
                write!(out, "{} {} {}", args[0], rel, args[1])
            } else {
                write!(out, "{}({})", rel, args.join(","))
            }
        }
        Formula::Equal(a, b) => write!(out, "{a} = {b}"),
        Formula::Not(g) => {
            write!(out, "!")?;
            fmt_rec(g, out, 5, tail)
        }
        Formula::And(l, r) => {
            fmt_rec(l, out, 4, false)?;
            write!(out, " & ")?;
            fmt_rec(r, out, 5, tail)
        }
        Formula::Or(l, r) => {
            fmt_rec(l, out, 3, false)?;
            write!(out, " | ")?;
            fmt_rec(r, out, 4, tail)
        }
        Formula::Implies(l, r) => {
            fmt_rec(l, out, 3, false)?;
            write!(out, " -> ")?;
            fmt_rec(r, out, 2, tail)
        }
        Formula::Iff(l, r) => {
            fmt_rec(l, out, 2, false)?;
            write!(out, " <-> ")?;
            fmt_rec(r, out, 1, tail)
        }
        Formula::Exists(vs, body) => {
            write!(out, "exists {}. ", vs.join(" "))?;
            fmt_rec(body, out, 0, true)
        }
        Formula::Forall(vs, body) => {
            write!(out, "forall {}. ", vs.join(" "))?;
            fmt_rec(body, out, 0, true)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rec(self, f, 0, true)
    }
}

/// Canonical text form; `parse` inverts it exactly.
pub fn render(f: &Formula) -> String {
    f.to_string()
}
