//! Learning objects, taxonomies, relation facts and the repository holding them.

mod relation;
mod repository;
mod taxonomy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use relation::{relation_algebra, RelationAlgebra, RelationType};
pub use repository::{structural_and_taxonomic_facts, structural_and_taxonomic_seed, Repository};
pub use taxonomy::{Taxonomy, TaxonomyNode};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(
    /// Identifier of a learning object, unique within a repository.
    ObjectId
);
string_id!(
    /// Identifier of a taxonomy node.
    NodeId
);

/// Canonical keys for the educational attributes filled in by authors.
pub mod attr {
    pub const CONTEXT: &str = "context";
    pub const DIFFICULTY: &str = "difficulty";
    pub const SEMANTIC_DENSITY: &str = "semanticDensity";
    pub const LEARNING_RESOURCE_TYPE: &str = "learningResourceType";
    pub const STRUCTURE: &str = "structure";
    pub const STATUS: &str = "status";
    pub const DESCRIPTION: &str = "description";
}

/// A self-contained unit of educational content and its metadata.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ELearningObject {
    pub id: ObjectId,
    pub title: String,
    pub author: String,
    pub keywords: BTreeSet<String>,
    pub classifications: BTreeSet<NodeId>,
    pub attributes: BTreeMap<String, String>,
    /// Structurally nested objects, in document order.
    pub children: Vec<ObjectId>,
}

impl ELearningObject {
    pub fn new(id: impl Into<ObjectId>, title: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn with_author(mut self, author: impl Into<String>) -> Self {
        self.author = author.into();
        self
    }

    /// Keywords are stored in normalized form.
    pub fn with_keywords<I, S>(mut self, keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.keywords.extend(
            keywords
                .into_iter()
                .map(|k| crate::classifier::normalize_term(k.as_ref()))
                .filter(|k| !k.is_empty()),
        );
        self
    }

    pub fn with_classifications<I, S>(mut self, nodes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<NodeId>,
    {
        self.classifications.extend(nodes.into_iter().map(Into::into));
        self
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }

    pub fn with_children<I, S>(mut self, children: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<ObjectId>,
    {
        self.children.extend(children.into_iter().map(Into::into));
        self
    }
}

/// Where a fact came from, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Asserted,
    Structural,
    Taxonomic,
    Heuristic,
    Inferred,
}

impl Provenance {
    pub const ALL: [Provenance; 5] = [
        Provenance::Asserted,
        Provenance::Structural,
        Provenance::Taxonomic,
        Provenance::Heuristic,
        Provenance::Inferred,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Provenance::Asserted => "asserted",
            Provenance::Structural => "structural",
            Provenance::Taxonomic => "taxonomic",
            Provenance::Heuristic => "heuristic",
            Provenance::Inferred => "inferred",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identity of a ground fact: set semantics apply on this triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactKey {
    #[serde(rename = "from")]
    pub subject: ObjectId,
    #[serde(rename = "type")]
    pub relation: RelationType,
    #[serde(rename = "to")]
    pub object: ObjectId,
}

impl FactKey {
    pub fn new(
        subject: impl Into<ObjectId>,
        relation: RelationType,
        object: impl Into<ObjectId>,
    ) -> Self {
        Self {
            subject: subject.into(),
            relation,
            object: object.into(),
        }
    }

    /// The fact implied by the relation's inverse or symmetry, if different.
    pub fn mirror(&self) -> Option<FactKey> {
        let inverse = self.relation.inverse()?;
        let mirrored = FactKey {
            subject: self.object.clone(),
            relation: inverse,
            object: self.subject.clone(),
        };
        (mirrored != *self).then_some(mirrored)
    }
}

impl fmt::Display for FactKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.relation, self.subject, self.object)
    }
}

/// The rule and premises one inferred fact was first derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: String,
    /// Premises in rule-body order.
    pub premises: Vec<FactKey>,
}

/// A ground relation fact together with its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub subject: ObjectId,
    pub relation: RelationType,
    pub object: ObjectId,
    pub provenance: Provenance,
    pub derivation: Option<Derivation>,
}

impl RelationInstance {
    pub fn new(
        subject: impl Into<ObjectId>,
        relation: RelationType,
        object: impl Into<ObjectId>,
        provenance: Provenance,
    ) -> Self {
        Self {
            subject: subject.into(),
            relation,
            object: object.into(),
            provenance,
            derivation: None,
        }
    }

    pub fn asserted(
        subject: impl Into<ObjectId>,
        relation: RelationType,
        object: impl Into<ObjectId>,
    ) -> Self {
        Self::new(subject, relation, object, Provenance::Asserted)
    }

    pub fn inferred(key: FactKey, derivation: Derivation) -> Self {
        Self {
            subject: key.subject,
            relation: key.relation,
            object: key.object,
            provenance: Provenance::Inferred,
            derivation: Some(derivation),
        }
    }

    pub fn key(&self) -> FactKey {
        FactKey {
            subject: self.subject.clone(),
            relation: self.relation,
            object: self.object.clone(),
        }
    }

    pub(crate) fn check_derivation(&self) -> crate::Result<()> {
        match (&self.provenance, &self.derivation) {
            (Provenance::Inferred, Some(d)) if !d.premises.is_empty() && !d.rule.is_empty() => {
                Ok(())
            }
            (Provenance::Inferred, _) => Err(crate::Error::InvalidFact(format!(
                "inferred fact {} needs a derivation",
                self.key()
            ))),
            (_, None) => Ok(()),
            (p, Some(_)) => Err(crate::Error::InvalidFact(format!(
                "{p} fact {} cannot carry a derivation",
                self.key()
            ))),
        }
    }

    /// The inverse or symmetric counterpart with the same provenance.
    pub(crate) fn mirror(&self) -> Option<RelationInstance> {
        let key = self.key();
        let mirrored = key.mirror()?;
        let derivation = self.derivation.as_ref().map(|_| Derivation {
            rule: structural_rule_id(StructuralRule::Mirror, self.relation),
            premises: vec![key],
        });
        Some(RelationInstance {
            subject: mirrored.subject,
            relation: mirrored.relation,
            object: mirrored.object,
            provenance: self.provenance,
            derivation,
        })
    }
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

/// Kinds of rules generated from the relation algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralRule {
    /// `r(A,B) => inverse(r)(B,A)`, or the symmetry rule when `r` is its own inverse.
    Mirror,
    /// `r(A,B) & r(B,C) => r(A,C)`.
    Transitive,
}

/// Identifier used for generated structural rules, e.g. `inv_hasPart`,
/// `sym_isFormatOf`, `trans_requires`.
pub fn structural_rule_id(kind: StructuralRule, relation: RelationType) -> String {
    match kind {
        StructuralRule::Mirror if relation.is_symmetric() => format!("sym_{relation}"),
        StructuralRule::Mirror => format!("inv_{relation}"),
        StructuralRule::Transitive => format!("trans_{relation}"),
    }
}
