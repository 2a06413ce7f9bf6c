//! The typed relation vocabulary between learning objects and its algebra.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Named relation between two learning objects.
///
/// The first eighteen variants are the educational relations (LOM relations
/// with sharpened semantics plus the added taxonomic and horizontal ones).
/// The last two flag contradictions and are produced only by consistency
/// rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationType {
    HasPart,
    IsPartOf,
    HasVersion,
    IsVersionOf,
    IsFormatOf,
    References,
    IsReferencedBy,
    IsBasedOn,
    IsBasisFor,
    Requires,
    IsRequiredBy,
    IsNarrowerThan,
    IsBroaderThan,
    IsAlternativeTo,
    Illustrates,
    IsIllustratedBy,
    IsLessSpecificThan,
    IsMoreSpecificThan,
    IncorrectPart,
    IncorrectFormatVersion,
}

/// Algebraic properties of one relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationAlgebra {
    pub inverse: Option<RelationType>,
    pub symmetric: bool,
    pub transitive: bool,
}

use RelationType::*;

impl RelationType {
    pub const ALL: [RelationType; 20] = [
        HasPart,
        IsPartOf,
        HasVersion,
        IsVersionOf,
        IsFormatOf,
        References,
        IsReferencedBy,
        IsBasedOn,
        IsBasisFor,
        Requires,
        IsRequiredBy,
        IsNarrowerThan,
        IsBroaderThan,
        IsAlternativeTo,
        Illustrates,
        IsIllustratedBy,
        IsLessSpecificThan,
        IsMoreSpecificThan,
        IncorrectPart,
        IncorrectFormatVersion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HasPart => "hasPart",
            IsPartOf => "isPartOf",
            HasVersion => "hasVersion",
            IsVersionOf => "isVersionOf",
            IsFormatOf => "isFormatOf",
            References => "references",
            IsReferencedBy => "isReferencedBy",
            IsBasedOn => "isBasedOn",
            IsBasisFor => "isBasisFor",
            Requires => "requires",
            IsRequiredBy => "isRequiredBy",
            IsNarrowerThan => "isNarrowerThan",
            IsBroaderThan => "isBroaderThan",
            IsAlternativeTo => "isAlternativeTo",
            Illustrates => "illustrates",
            IsIllustratedBy => "isIllustratedBy",
            IsLessSpecificThan => "isLessSpecificThan",
            IsMoreSpecificThan => "isMoreSpecificThan",
            IncorrectPart => "incorrectPart",
            IncorrectFormatVersion => "incorrectFormatVersion",
        }
    }

    /// Inverse partner, symmetry and transitivity of this relation.
    pub fn algebra(self) -> RelationAlgebra {
        let (inverse, symmetric, transitive) = match self {
            HasPart => (IsPartOf, false, true),
            IsPartOf => (HasPart, false, true),
            HasVersion => (IsVersionOf, false, false),
            IsVersionOf => (HasVersion, false, false),
            IsFormatOf => (IsFormatOf, true, false),
            References => (IsReferencedBy, false, false),
            IsReferencedBy => (References, false, false),
            IsBasedOn => (IsBasisFor, false, false),
            IsBasisFor => (IsBasedOn, false, false),
            Requires => (IsRequiredBy, false, true),
            IsRequiredBy => (Requires, false, true),
            IsNarrowerThan => (IsBroaderThan, false, true),
            IsBroaderThan => (IsNarrowerThan, false, true),
            IsAlternativeTo => (IsAlternativeTo, true, true),
            Illustrates => (IsIllustratedBy, false, false),
            IsIllustratedBy => (Illustrates, false, false),
            IsLessSpecificThan => (IsMoreSpecificThan, false, true),
            IsMoreSpecificThan => (IsLessSpecificThan, false, true),
            IncorrectPart => (IncorrectPart, true, false),
            IncorrectFormatVersion => (IncorrectFormatVersion, true, false),
        };
        RelationAlgebra {
            inverse: Some(inverse),
            symmetric,
            transitive,
        }
    }

    pub fn inverse(self) -> Option<RelationType> {
        self.algebra().inverse
    }

    pub fn is_symmetric(self) -> bool {
        self.algebra().symmetric
    }

    pub fn is_transitive(self) -> bool {
        self.algebra().transitive
    }

    /// Contradiction markers live in the same fact set and are told apart by
    /// their name prefix.
    pub fn is_incorrectness(self) -> bool {
        self.name().starts_with("incorrect")
    }

    /// For an inverse pair, the member listed first in [`RelationType::ALL`].
    /// Symmetric relations are their own canonical direction.
    pub fn is_canonical_direction(self) -> bool {
        match self.inverse() {
            Some(inv) => self <= inv,
            None => true,
        }
    }
}

/// Looks up the algebra of a relation given by name.
pub fn relation_algebra(name: &str) -> Result<RelationAlgebra, Error> {
    Ok(name.parse::<RelationType>()?.algebra())
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRelation(s.to_owned()))
    }
}

impl Serialize for RelationType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RelationType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}
