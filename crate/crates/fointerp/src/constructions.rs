//! The concrete interpretations this crate ships: bipartite graphs inside
//! a pair of equivalence relations, and a pair of equivalence relations
//! inside a linear order with an equivalence, each in a version that takes
//! distinguished parameter elements and a parameter-free version built
//! around definable marker blocks.

use crate::classes::{validate, ClassError, ClassId};
use crate::formula::{
    and, and_all, atom, exists, forall, implies, not, or, or_all, replace_free_var, Formula,
};
use crate::interpret::{InterpretationSchema, SchemaRelation, Witness};
use crate::signature::Signature;
use crate::structure::{assignment, Assignment, FiniteStructure, StructureError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionKind {
    /// Bipartite graph in two equivalences, four parameters.
    BipartiteInTwoEqWithParams,
    /// Bipartite graph (three or more vertices per side) in two
    /// equivalences, parameter-free.
    BipartiteInTwoEq,
    /// Two equivalences in an ordered equivalence, one parameter.
    TwoEqInOrderWithParams,
    /// Two equivalences in an ordered equivalence, parameter-free.
    TwoEqInOrder,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 4] = [
        ConstructionKind::BipartiteInTwoEqWithParams,
        ConstructionKind::BipartiteInTwoEq,
        ConstructionKind::TwoEqInOrderWithParams,
        ConstructionKind::TwoEqInOrder,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            ConstructionKind::BipartiteInTwoEqWithParams => "big2eq-param",
            ConstructionKind::BipartiteInTwoEq => "big2eq",
            ConstructionKind::TwoEqInOrderWithParams => "2eq2leq-param",
            ConstructionKind::TwoEqInOrder => "2eq2leq",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        ConstructionKind::ALL
            .into_iter()
            .find(|k| k.cli_name() == name)
    }

    /// Class the interpreted structure must belong to.
    pub fn source_class(self) -> ClassId {
        match self {
            ConstructionKind::BipartiteInTwoEqWithParams => ClassId::BipartiteGraph,
            ConstructionKind::BipartiteInTwoEq => ClassId::BipartiteGraph3,
            ConstructionKind::TwoEqInOrderWithParams | ConstructionKind::TwoEqInOrder => {
                ClassId::TwoEq
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("input must be a {required}")]
    NotInClass { required: &'static str },
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("elements {0} and {1} share a P-class")]
    SameBlock(usize, usize),
}

fn p(a: &str, b: &str) -> Formula {
    atom("P", &[a, b])
}

fn q(a: &str, b: &str) -> Formula {
    atom("Q", &[a, b])
}

fn lt(a: &str, b: &str) -> Formula {
    atom("<", &[a, b])
}

fn equiv(a: &str, b: &str) -> Formula {
    atom("≈", &[a, b])
}

fn grid(rel: &str, vars: &[&str]) -> Formula {
    and_all(
        vars.iter()
            .flat_map(|a| vars.iter().map(move |b| atom(rel, &[*a, *b]))),
    )
}

/// All arguments lie in one P-class.
pub fn pbar(vars: &[&str]) -> Formula {
    grid("P", vars)
}

/// All arguments lie in one Q-class.
pub fn qbar(vars: &[&str]) -> Formula {
    grid("Q", vars)
}

/// Two P-classes described member by member: the `xs` in one, the `ys` in
/// another, every listed element in its own Q-class, and the first `links`
/// positions Q-connected pairwise across.
pub fn theta_applied(xs: &[&str], ys: &[&str], links: usize) -> Formula {
    assert!(!xs.is_empty() && !ys.is_empty());
    assert!(links >= 1 && links <= xs.len().min(ys.len()));
    let mut parts = vec![pbar(xs), pbar(ys), not(p(xs[0], ys[0]))];
    for (i, a) in xs.iter().enumerate() {
        for (j, b) in xs.iter().enumerate() {
            if i != j {
                parts.push(not(q(a, b)));
            }
        }
    }
    for (i, a) in ys.iter().enumerate() {
        for (j, b) in ys.iter().enumerate() {
            if i != j {
                parts.push(not(q(a, b)));
            }
        }
    }
    for k in 0..links {
        parts.push(q(xs[k], ys[k]));
    }
    and_all(parts)
}

/// `theta_applied` over conventional variable names x1..x{k1}, y1..y{k2}.
pub fn theta(k1: usize, k2: usize, links: usize) -> Formula {
    let xs: Vec<String> = (1..=k1).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=k2).map(|i| format!("y{i}")).collect();
    theta_applied(
        &xs.iter().map(String::as_str).collect::<Vec<_>>(),
        &ys.iter().map(String::as_str).collect::<Vec<_>>(),
        links,
    )
}

/// The definable blocks the parameter-free interpretations rest on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marker {
    /// In a two-equivalence host: carriers of left-side vertices.
    Left,
    /// Carriers of right-side vertices.
    Right,
    /// The twelve-element block whose aggregate class tags edges.
    EdgeTags,
    /// The fourteen-element block whose aggregate class tags non-edges.
    NonEdgeTags,
    /// In an ordered host: bottom of the one size-four class (free
    /// variable x).
    OrderOrigin,
    /// In an ordered host: the element with nothing equivalent above it
    /// and no repetition below it (free variable y).
    OrderAnchor,
}

fn names(stem: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{stem}{i}")).collect()
}

fn str_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// The defining formula of a marker block, one free variable.
pub fn marker_formula(marker: Marker) -> Formula {
    match marker {
        Marker::Left => {
            let ys = names("y", 4);
            let zs = names("z", 4);
            let mut xs = str_refs(&ys);
            xs.push("x");
            let bound: Vec<String> = ys.iter().chain(zs.iter()).cloned().collect();
            exists(
                &str_refs(&bound),
                theta_applied(&xs, &str_refs(&zs), 4),
            )
        }
        Marker::Right => {
            let ys = names("y", 5);
            let zs = names("z", 5);
            let mut xs = str_refs(&ys);
            xs.push("x");
            let bound: Vec<String> = ys.iter().chain(zs.iter()).cloned().collect();
            exists(
                &str_refs(&bound),
                theta_applied(&xs, &str_refs(&zs), 3),
            )
        }
        Marker::EdgeTags => two_sided_marker(5, 6, 2),
        Marker::NonEdgeTags => two_sided_marker(6, 7, 1),
        Marker::OrderOrigin => exists(
            &["x1", "x2", "x3"],
            and_all([
                equiv("x", "x1"),
                equiv("x1", "x2"),
                equiv("x2", "x3"),
                lt("x", "x1"),
                lt("x1", "x2"),
                lt("x2", "x3"),
            ]),
        ),
        Marker::OrderAnchor => and(
            forall(
                &["x"],
                implies(lt("y", "x"), not(equiv("x", "y"))),
            ),
            forall(
                &["x1", "x2"],
                implies(
                    and(lt("x1", "x2"), lt("x2", "y")),
                    not(equiv("x1", "x2")),
                ),
            ),
        ),
    }
}

/// x may head the block or close it, so both positions are tried.
fn two_sided_marker(others: usize, side: usize, links: usize) -> Formula {
    let ys = names("y", others);
    let zs = names("z", side);
    let mut head = vec!["x"];
    head.extend(str_refs(&ys));
    let mut tail = str_refs(&ys);
    tail.push("x");
    let bound: Vec<String> = ys.iter().chain(zs.iter()).cloned().collect();
    exists(
        &str_refs(&bound),
        or(
            theta_applied(&head, &str_refs(&zs), links),
            theta_applied(&tail, &str_refs(&zs), links),
        ),
    )
}

/// The defining formulas of a construction, independent of any particular
/// structure.
pub fn schema(kind: ConstructionKind) -> InterpretationSchema {
    match kind {
        ConstructionKind::BipartiteInTwoEqWithParams => bipartite_schema_with_params(),
        ConstructionKind::BipartiteInTwoEq => bipartite_schema(),
        ConstructionKind::TwoEqInOrderWithParams => order_schema_with_params(),
        ConstructionKind::TwoEqInOrder => order_schema(),
    }
}

fn bipartite_schema_with_params() -> InterpretationSchema {
    let edge_block = |tag: &str| {
        exists(
            &["uL", "uR", "uE"],
            and_all([
                q("x1", "uL"),
                q("x2", "uR"),
                pbar(&["uL", "uR", "uE"]),
                q("uE", tag),
            ]),
        )
    };
    InterpretationSchema {
        source: Signature::bipartite(),
        target: Signature::two_eq(),
        params: vec!["yL".into(), "yR".into(), "yP".into(), "yN".into()],
        domain: or(
            and(not(q("x", "yL")), p("x", "yL")),
            and(not(q("x", "yR")), p("x", "yR")),
        ),
        domain_complement: None,
        relations: BTreeMap::from([
            (
                "L".to_string(),
                SchemaRelation {
                    pos: p("x1", "yL"),
                    neg: not(p("x1", "yL")),
                },
            ),
            (
                "R".to_string(),
                SchemaRelation {
                    pos: p("x1", "yR"),
                    neg: not(p("x1", "yR")),
                },
            ),
            (
                "E".to_string(),
                SchemaRelation {
                    pos: and_all([p("x1", "yL"), p("x2", "yR"), edge_block("yP")]),
                    neg: or_all([
                        not(p("x1", "yL")),
                        not(p("x2", "yR")),
                        edge_block("yN"),
                    ]),
                },
            ),
        ]),
    }
}

fn bipartite_schema() -> InterpretationSchema {
    let at = |m: Marker, v: &str| replace_free_var(&marker_formula(m), "x", v);
    let edge_block = |m: Marker, tag: &str| {
        exists(
            &["uL", "uR", "uE", tag],
            and_all([
                at(m, tag),
                q("x1", "uL"),
                q("x2", "uR"),
                pbar(&["uL", "uR", "uE"]),
                q("uE", tag),
            ]),
        )
    };
    InterpretationSchema {
        source: Signature::bipartite(),
        target: Signature::two_eq(),
        params: vec![],
        domain: or(at(Marker::Left, "x"), at(Marker::Right, "x")),
        domain_complement: None,
        relations: BTreeMap::from([
            (
                "L".to_string(),
                SchemaRelation {
                    pos: at(Marker::Left, "x1"),
                    neg: at(Marker::Right, "x1"),
                },
            ),
            (
                "R".to_string(),
                SchemaRelation {
                    pos: at(Marker::Right, "x1"),
                    neg: at(Marker::Left, "x1"),
                },
            ),
            (
                "E".to_string(),
                SchemaRelation {
                    pos: and_all([
                        at(Marker::Left, "x1"),
                        at(Marker::Right, "x2"),
                        edge_block(Marker::EdgeTags, "uP"),
                    ]),
                    neg: or_all([
                        at(Marker::Right, "x1"),
                        at(Marker::Left, "x2"),
                        edge_block(Marker::NonEdgeTags, "uN"),
                    ]),
                },
            ),
        ]),
    }
}

fn order_schema_with_params() -> InterpretationSchema {
    let domain = exists(
        &["z0", "z1", "z2"],
        and_all([
            equiv("z0", "z1"),
            equiv("z1", "z2"),
            lt("z0", "y"),
            lt("y", "z1"),
            lt("z1", "x"),
            lt("x", "z2"),
        ]),
    );
    let complement = exists(&["z0"], and(equiv("z0", "x"), not(lt("y", "z0"))));
    let p_pos = exists(
        &["z0", "z1", "z2"],
        and_all([
            equiv("z0", "z1"),
            equiv("z1", "z2"),
            lt("z0", "y"),
            lt("y", "z1"),
            lt("z1", "x1"),
            lt("x1", "z2"),
            lt("z1", "x2"),
            lt("x2", "z2"),
        ]),
    );
    let p_neg = exists(
        &["z"],
        and(
            replace_free_var(&complement, "x", "z"),
            or(
                and(lt("x1", "z"), lt("z", "x2")),
                and(lt("x2", "z"), lt("z", "x1")),
            ),
        ),
    );
    InterpretationSchema {
        source: Signature::two_eq(),
        target: Signature::leq(),
        params: vec!["y".into()],
        domain,
        domain_complement: Some(complement),
        relations: BTreeMap::from([
            (
                "P".to_string(),
                SchemaRelation {
                    pos: p_pos,
                    neg: p_neg,
                },
            ),
            (
                "Q".to_string(),
                SchemaRelation {
                    pos: equiv("x1", "x2"),
                    neg: not(equiv("x1", "x2")),
                },
            ),
        ]),
    }
}

fn order_schema() -> InterpretationSchema {
    let psi_y = replace_free_var(&marker_formula(Marker::OrderOrigin), "x", "y");
    // A class-of-three straddle: y0 below the origin, y1 and y2 above it.
    let bracket = |tail: Vec<Formula>| {
        let mut parts = vec![
            psi_y.clone(),
            lt("y0", "y"),
            lt("y", "y1"),
            lt("y1", "y2"),
            equiv("y0", "y1"),
            equiv("y1", "y2"),
        ];
        parts.extend(tail);
        parts
    };
    let domain = exists(
        &["y", "y0", "y1", "y2", "z"],
        and_all([
            psi_y.clone(),
            lt("y0", "y"),
            lt("y", "y1"),
            lt("y1", "x"),
            lt("x", "y2"),
            equiv("y0", "y1"),
            equiv("y1", "y2"),
            equiv("x", "z"),
            lt("x", "z"),
        ]),
    );
    // Both arguments are shadowed by their strictly greater copies; the
    // extra x<z conjuncts force genuine copies rather than the arguments
    // themselves.
    let p_pos = exists(
        &["y", "y0", "y1", "y2", "z1", "z2"],
        and_all(bracket(vec![
            equiv("z1", "x1"),
            equiv("z2", "x2"),
            lt("x1", "z1"),
            lt("x2", "z2"),
            lt("y1", "z1"),
            lt("z1", "y2"),
            lt("y1", "z2"),
            lt("z2", "y2"),
        ])),
    );
    let p_neg = exists(
        &["y", "y0", "y1", "y2", "z1", "z2"],
        and_all(bracket(vec![
            equiv("z1", "x1"),
            equiv("z2", "x2"),
            lt("x1", "z1"),
            lt("x2", "z2"),
            or(
                and(lt("z1", "y2"), lt("y2", "z2")),
                and(lt("z2", "y2"), lt("y2", "z1")),
            ),
        ])),
    );
    let q_pos = exists(
        &["y", "y0", "y1", "y2"],
        and_all(bracket(vec![
            lt("y1", "x1"),
            lt("x1", "y2"),
            lt("y1", "x2"),
            lt("x2", "y2"),
        ])),
    );
    let q_neg = exists(
        &["y", "y0", "y1", "y2"],
        and_all(bracket(vec![or(
            and(lt("x1", "y2"), lt("y2", "x2")),
            and(lt("x2", "y2"), lt("y2", "x1")),
        )])),
    );
    InterpretationSchema {
        source: Signature::two_eq(),
        target: Signature::leq(),
        params: vec![],
        domain,
        domain_complement: None,
        relations: BTreeMap::from([
            (
                "P".to_string(),
                SchemaRelation {
                    pos: p_pos,
                    neg: p_neg,
                },
            ),
            (
                "Q".to_string(),
                SchemaRelation {
                    pos: q_pos,
                    neg: q_neg,
                },
            ),
        ]),
    }
}

/// Build the canonical host structure and parameter values interpreting
/// `a` under the given construction.
pub fn build(kind: ConstructionKind, a: &FiniteStructure) -> Result<Witness, ConstructError> {
    let required = match kind {
        ConstructionKind::BipartiteInTwoEqWithParams => "bipartite graph",
        ConstructionKind::BipartiteInTwoEq => {
            "bipartite graph with at least three vertices per side"
        }
        ConstructionKind::TwoEqInOrderWithParams | ConstructionKind::TwoEqInOrder => {
            "pair of equivalence relations"
        }
    };
    if !validate(kind.source_class(), a)? {
        return Err(ConstructError::NotInClass { required });
    }
    match kind {
        ConstructionKind::BipartiteInTwoEqWithParams => build_bipartite_with_params(a),
        ConstructionKind::BipartiteInTwoEq => build_bipartite(a),
        ConstructionKind::TwoEqInOrderWithParams => build_order_with_params(a),
        ConstructionKind::TwoEqInOrder => build_order(a),
    }
}

fn side(a: &FiniteStructure, rel: &str) -> Vec<usize> {
    (0..a.size())
        .filter(|&e| a.contains_tuple(rel, &[e]).unwrap())
        .collect()
}

fn set_equivalence(
    s: &mut FiniteStructure,
    rel: &str,
    blocks: &[Vec<usize>],
) -> Result<(), StructureError> {
    let mut seen = vec![false; s.size()];
    let mut pairs = Vec::new();
    for block in blocks {
        for &a in block {
            assert!(!seen[a], "blocks must not overlap");
            seen[a] = true;
            for &b in block {
                pairs.push(vec![a, b]);
            }
        }
    }
    assert!(seen.iter().all(|&x| x), "blocks must cover the carrier");
    s.set_tuples(rel, pairs)
}

/// Shared skeleton of both bipartite hosts: vertex carriers first, then
/// one three-element strip per left-right pair.
struct BipartiteCore {
    left: Vec<usize>,
    right: Vec<usize>,
    m: usize,
    n: usize,
}

impl BipartiteCore {
    fn new(a: &FiniteStructure) -> Self {
        let left = side(a, "L");
        let right = side(a, "R");
        let (m, n) = (left.len(), right.len());
        BipartiteCore { left, right, m, n }
    }

    fn strips_base(&self) -> usize {
        self.m + self.n
    }

    fn s_l(&self, i: usize, j: usize) -> usize {
        self.strips_base() + i * self.n + j
    }

    fn s_r(&self, i: usize, j: usize) -> usize {
        self.strips_base() + self.m * self.n + i * self.n + j
    }

    fn s_e(&self, i: usize, j: usize) -> usize {
        self.strips_base() + 2 * self.m * self.n + i * self.n + j
    }

    fn tail_base(&self) -> usize {
        self.strips_base() + 3 * self.m * self.n
    }

    fn edge(&self, a: &FiniteStructure, i: usize, j: usize) -> bool {
        a.contains_tuple("E", &[self.left[i], self.right[j]]).unwrap()
    }

    fn name_core(&self, s: &mut FiniteStructure) -> Result<(), StructureError> {
        for i in 0..self.m {
            s.set_name(&format!("l{}", i + 1), i)?;
        }
        for j in 0..self.n {
            s.set_name(&format!("r{}", j + 1), self.m + j)?;
        }
        for i in 0..self.m {
            for j in 0..self.n {
                s.set_name(&format!("sL_{}_{}", i + 1, j + 1), self.s_l(i, j))?;
                s.set_name(&format!("sR_{}_{}", i + 1, j + 1), self.s_r(i, j))?;
                s.set_name(&format!("sE_{}_{}", i + 1, j + 1), self.s_e(i, j))?;
            }
        }
        Ok(())
    }

    /// One strip per pair; P groups each strip, Q ties its pieces to the
    /// row vertex, the column vertex, and the matching tag class.
    fn strip_p_blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = Vec::new();
        for i in 0..self.m {
            for j in 0..self.n {
                blocks.push(vec![self.s_l(i, j), self.s_r(i, j), self.s_e(i, j)]);
            }
        }
        blocks
    }

    fn row_blocks(&self) -> Vec<Vec<usize>> {
        (0..self.m)
            .map(|i| {
                let mut block = vec![i];
                block.extend((0..self.n).map(|j| self.s_l(i, j)));
                block
            })
            .collect()
    }

    fn column_blocks(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|j| {
                let mut block = vec![self.m + j];
                block.extend((0..self.m).map(|i| self.s_r(i, j)));
                block
            })
            .collect()
    }

    fn tag_blocks(&self, a: &FiniteStructure, edge_tag: usize, non_edge_tag: usize) -> [Vec<usize>; 2] {
        let mut edges = vec![edge_tag];
        let mut non_edges = vec![non_edge_tag];
        for i in 0..self.m {
            for j in 0..self.n {
                if self.edge(a, i, j) {
                    edges.push(self.s_e(i, j));
                } else {
                    non_edges.push(self.s_e(i, j));
                }
            }
        }
        [edges, non_edges]
    }
}

fn build_bipartite_with_params(a: &FiniteStructure) -> Result<Witness, ConstructError> {
    let core = BipartiteCore::new(a);
    let base = core.tail_base();
    let (c_p, c_n, c_l, c_r) = (base, base + 1, base + 2, base + 3);
    let mut s = FiniteStructure::new(Signature::two_eq(), base + 4)?;
    core.name_core(&mut s)?;
    for (name, e) in [("cP", c_p), ("cN", c_n), ("cL", c_l), ("cR", c_r)] {
        s.set_name(name, e)?;
    }

    let mut p_blocks = vec![
        {
            let mut b = vec![c_l];
            b.extend(0..core.m);
            b
        },
        {
            let mut b = vec![c_r];
            b.extend(core.m..core.m + core.n);
            b
        },
        vec![c_p],
        vec![c_n],
    ];
    p_blocks.extend(core.strip_p_blocks());
    set_equivalence(&mut s, "P", &p_blocks)?;

    let mut q_blocks = core.row_blocks();
    q_blocks.extend(core.column_blocks());
    q_blocks.extend(core.tag_blocks(a, c_p, c_n));
    q_blocks.push(vec![c_l]);
    q_blocks.push(vec![c_r]);
    set_equivalence(&mut s, "Q", &q_blocks)?;

    let params = assignment(&[("yL", c_l), ("yR", c_r), ("yP", c_p), ("yN", c_n)]);
    Ok(Witness::new(s, params))
}

fn build_bipartite(a: &FiniteStructure) -> Result<Witness, ConstructError> {
    let core = BipartiteCore::new(a);
    let base = core.tail_base();
    // Four tag blocks with their shadows; block sizes 4, 3, 6, 7 and
    // shadow sizes 4, 5, 6, 7 tell them apart.
    let c_l = |k: usize| base + k; // 4
    let c_lt = |k: usize| base + 4 + k; // 4
    let c_r = |k: usize| base + 8 + k; // 3
    let c_rt = |k: usize| base + 11 + k; // 5
    let c_p = |k: usize| base + 16 + k; // 6
    let c_pt = |k: usize| base + 22 + k; // 6
    let c_n = |k: usize| base + 28 + k; // 7
    let c_nt = |k: usize| base + 35 + k; // 7
    let mut s = FiniteStructure::new(Signature::two_eq(), base + 42)?;
    core.name_core(&mut s)?;
    for k in 0..4 {
        s.set_name(&format!("cL{}", k + 1), c_l(k))?;
        s.set_name(&format!("cLt{}", k + 1), c_lt(k))?;
    }
    for k in 0..3 {
        s.set_name(&format!("cR{}", k + 1), c_r(k))?;
    }
    for k in 0..5 {
        s.set_name(&format!("cRt{}", k + 1), c_rt(k))?;
    }
    for k in 0..6 {
        s.set_name(&format!("cP{}", k + 1), c_p(k))?;
        s.set_name(&format!("cPt{}", k + 1), c_pt(k))?;
    }
    for k in 0..7 {
        s.set_name(&format!("cN{}", k + 1), c_n(k))?;
        s.set_name(&format!("cNt{}", k + 1), c_nt(k))?;
    }

    let mut p_blocks = vec![
        {
            let mut b: Vec<usize> = (0..4).map(c_l).collect();
            b.extend(0..core.m);
            b
        },
        (0..4).map(c_lt).collect(),
        {
            let mut b: Vec<usize> = (0..3).map(c_r).collect();
            b.extend(core.m..core.m + core.n);
            b
        },
        (0..5).map(c_rt).collect(),
        (0..6).map(c_p).collect(),
        (0..6).map(c_pt).collect(),
        (0..7).map(c_n).collect(),
        (0..7).map(c_nt).collect(),
    ];
    p_blocks.extend(core.strip_p_blocks());
    set_equivalence(&mut s, "P", &p_blocks)?;

    let mut q_blocks = core.row_blocks();
    q_blocks.extend(core.column_blocks());
    // Aggregate classes: the last element of each shadowless pairable run
    // collects the strip tags.
    q_blocks.extend(core.tag_blocks(a, c_p(5), c_n(6)));
    for k in 0..4 {
        q_blocks.push(vec![c_l(k), c_lt(k)]);
    }
    for k in 0..3 {
        q_blocks.push(vec![c_r(k), c_rt(k)]);
    }
    for k in 3..5 {
        q_blocks.push(vec![c_rt(k)]);
    }
    for k in 0..2 {
        q_blocks.push(vec![c_p(k), c_pt(k)]);
    }
    for k in 2..5 {
        q_blocks.push(vec![c_p(k)]);
    }
    for k in 2..6 {
        q_blocks.push(vec![c_pt(k)]);
    }
    q_blocks.push(vec![c_n(0), c_nt(0)]);
    for k in 1..6 {
        q_blocks.push(vec![c_n(k)]);
    }
    for k in 1..7 {
        q_blocks.push(vec![c_nt(k)]);
    }
    set_equivalence(&mut s, "Q", &q_blocks)?;

    Ok(Witness::new(s, Assignment::new()))
}

fn chain_order(s: &mut FiniteStructure) -> Result<(), StructureError> {
    let mut pairs = Vec::new();
    for i in 0..s.size() {
        for j in i + 1..s.size() {
            pairs.push(vec![i, j]);
        }
    }
    s.set_tuples("<", pairs)
}

fn sorted_classes(
    a: &FiniteStructure,
    rel: &str,
) -> Result<Vec<Vec<usize>>, StructureError> {
    let mut classes = a.equivalence_classes(rel)?;
    for c in &mut classes {
        c.sort_unstable();
    }
    Ok(classes)
}

fn build_order_with_params(a: &FiniteStructure) -> Result<Witness, ConstructError> {
    let p_classes = sorted_classes(a, "P")?;
    let n = p_classes.len();
    let size = a.size() + 3 * n + 1;
    let mut s = FiniteStructure::new(Signature::leq(), size)?;

    // Ranks: one stub per P-block, the anchor, then each P-block fenced by
    // its block's second and third pieces.
    for (i, _) in p_classes.iter().enumerate() {
        s.set_name(&format!("s0_{}", i + 1), i)?;
    }
    s.set_name("astar", n)?;
    let mut next = n + 1;
    let mut carrier = vec![0usize; a.size()];
    let mut eq_blocks: Vec<Vec<usize>> = Vec::new();
    for (i, class) in p_classes.iter().enumerate() {
        let s1 = next;
        s.set_name(&format!("s1_{}", i + 1), s1)?;
        next += 1;
        for &orig in class {
            s.set_name(&format!("a{}", orig + 1), next)?;
            carrier[orig] = next;
            next += 1;
        }
        let s2 = next;
        s.set_name(&format!("s2_{}", i + 1), s2)?;
        next += 1;
        eq_blocks.push(vec![i, s1, s2]);
    }
    debug_assert_eq!(next, size);

    for class in sorted_classes(a, "Q")? {
        eq_blocks.push(class.iter().map(|&orig| carrier[orig]).collect());
    }
    eq_blocks.push(vec![n]);
    chain_order(&mut s)?;
    set_equivalence(&mut s, "≈", &eq_blocks)?;

    Ok(Witness::new(s, assignment(&[("y", n)])))
}

fn build_order(a: &FiniteStructure) -> Result<Witness, ConstructError> {
    let p_classes = sorted_classes(a, "P")?;
    let q_classes = sorted_classes(a, "Q")?;
    let (n, m) = (p_classes.len(), q_classes.len());
    let size = 2 * a.size() + 3 * n + 3 * m + 4;
    let mut s = FiniteStructure::new(Signature::leq(), size)?;

    // Ranks: block stubs, the size-four origin class, originals fenced
    // per Q-block, then copies fenced per P-block.
    for i in 0..n {
        s.set_name(&format!("s0_{}", i + 1), i)?;
    }
    for j in 0..m {
        s.set_name(&format!("r0_{}", j + 1), n + j)?;
    }
    for k in 0..4 {
        s.set_name(&format!("c{}", k + 1), n + m + k)?;
    }
    let mut next = n + m + 4;
    let mut original = vec![0usize; a.size()];
    let mut copy = vec![0usize; a.size()];
    let mut eq_blocks: Vec<Vec<usize>> = vec![(n + m..n + m + 4).collect()];
    for (j, class) in q_classes.iter().enumerate() {
        let r1 = next;
        s.set_name(&format!("r1_{}", j + 1), r1)?;
        next += 1;
        for &orig in class {
            s.set_name(&format!("a{}", orig + 1), next)?;
            original[orig] = next;
            next += 1;
        }
        let r2 = next;
        s.set_name(&format!("r2_{}", j + 1), r2)?;
        next += 1;
        eq_blocks.push(vec![n + j, r1, r2]);
    }
    for (i, class) in p_classes.iter().enumerate() {
        let s1 = next;
        s.set_name(&format!("s1_{}", i + 1), s1)?;
        next += 1;
        for &orig in class {
            s.set_name(&format!("at{}", orig + 1), next)?;
            copy[orig] = next;
            next += 1;
        }
        let s2 = next;
        s.set_name(&format!("s2_{}", i + 1), s2)?;
        next += 1;
        eq_blocks.push(vec![i, s1, s2]);
    }
    debug_assert_eq!(next, size);
    for e in 0..a.size() {
        eq_blocks.push(vec![original[e], copy[e]]);
    }
    chain_order(&mut s)?;
    set_equivalence(&mut s, "≈", &eq_blocks)?;

    Ok(Witness::new(s, Assignment::new()))
}

/// Number of Q-connections between the P-classes of two elements; the
/// elements must lie in different P-classes.
pub fn q_link_count(
    s: &FiniteStructure,
    a: usize,
    b: usize,
) -> Result<usize, ConstructError> {
    let classes = s.equivalence_classes("P")?;
    let find = |e: usize| classes.iter().position(|c| c.contains(&e)).unwrap();
    let (ca, cb) = (find(a), find(b));
    if ca == cb {
        return Err(ConstructError::SameBlock(a, b));
    }
    let mut count = 0;
    for &u in &classes[ca] {
        for &v in &classes[cb] {
            if s.contains_tuple("Q", &[u, v])? {
                count += 1;
            }
        }
    }
    Ok(count)
}
