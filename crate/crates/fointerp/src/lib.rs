//! First-order interpretations between classes of finite structures:
//! formulas and prefix classes, finite-structure evaluation, existential
//! interpretation schemas with machine-checked verification, concrete
//! interpretations of bipartite graphs in pairs of equivalences and of
//! pairs of equivalences in ordered equivalences, and a small-model
//! decision procedure for universal-existential sentences.

pub mod classes;
pub mod cli;
pub mod constructions;
pub mod decide;
pub mod enumerate;
pub mod fixtures;
pub mod formula;
pub mod interpret;
pub mod iso;
pub mod parser;
pub mod signature;
pub mod structure;
pub mod transform;

pub use classes::{gen_random, validate, ClassId, SizeSpec};
pub use constructions::{build, schema, ConstructError, ConstructionKind};
pub use decide::{
    decide_pi2, decide_pi2_in_class, relativize_to_class, search_counterexample, DecideOptions,
    Outcome, Pi2Verdict,
};
pub use formula::Formula;
pub use interpret::{
    induce, translate, translate_open, translation_class, verify, ConditionReport,
    InterpretationSchema, SchemaRelation, VerifyOutcome, Witness,
};
pub use parser::parse;
pub use signature::Signature;
pub use structure::{assignment, eval, Assignment, EvalError, Evaluator, FiniteStructure};
pub use transform::{classify, to_nnf, to_prenex, PrefixClass, PrefixKind};
