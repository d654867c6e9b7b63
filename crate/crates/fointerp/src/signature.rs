//! Relational signatures: finite maps from relation names to arities.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("relation `{0}` declared with arity 0; arities must be at least 1")]
    ZeroArity(String),
    #[error("relation `{0}` declared twice")]
    Duplicate(String),
}

/// A purely relational signature. No constants, no functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        relations: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, SignatureError> {
        let mut arities = BTreeMap::new();
        for (name, arity) in relations {
            let name = name.into();
            if arity == 0 {
                return Err(SignatureError::ZeroArity(name));
            }
            if arities.insert(name.clone(), arity).is_some() {
                return Err(SignatureError::Duplicate(name));
            }
        }
        Ok(Signature { arities })
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.arities.get(relation).copied()
    }

    pub fn contains(&self, relation: &str) -> bool {
        self.arities.contains_key(relation)
    }

    /// Relations in sorted name order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    pub(crate) fn arity_map(&self) -> &BTreeMap<String, usize> {
        &self.arities
    }

    /// Directed graphs: one binary edge relation.
    pub fn graph() -> Signature {
        Signature::new([("E", 2)]).unwrap()
    }

    /// Bipartite graphs: unary part predicates and edges from the `L` part
    /// to the `R` part.
    pub fn bipartite() -> Signature {
        Signature::new([("L", 1), ("R", 1), ("E", 2)]).unwrap()
    }

    /// Structures with two binary relations `P` and `Q`.
    pub fn two_eq() -> Signature {
        Signature::new([("P", 2), ("Q", 2)]).unwrap()
    }

    /// Structures with a strict order `<` and an equivalence `≈`.
    pub fn leq() -> Signature {
        Signature::new([("<", 2), ("≈", 2)]).unwrap()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, arity)) in self.relations().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}/{arity}")?;
        }
        write!(f, "}}")
    }
}
