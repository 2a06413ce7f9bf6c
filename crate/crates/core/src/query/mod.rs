//! A conjunctive triple-pattern query language in SPARQL syntax:
//!
//! ```text
//! PREFIX rdf:<http://www.w3.org/1999/02/22-rdf-syntax-ns#>
//! PREFIX mir:<http://www.rz.fhtw-berlin.de/MIR/mir#>
//! SELECT ?subject
//! WHERE {?subject rdf:predicate mir:BackgroundInfo}
//! ```
//!
//! Patterns are joined; there is no OPTIONAL, FILTER, UNION or path syntax.

mod context;
mod eval;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

pub use context::{select_links, LinkContextDef, LinkSelection};
pub use eval::{evaluate, BindingSet};
pub use parser::parse_query;

use crate::store::{compact_iri, Term};

/// One position of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    /// Variable name without the leading `?`.
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(name) => Some(name),
            PatternTerm::Term(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

/// A parsed query; IRIs in the patterns are already expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub prefixes: BTreeMap<String, String>,
    pub select_vars: Vec<String>,
    pub patterns: Vec<TriplePattern>,
}

impl Query {
    /// Distinct variables in order of first occurrence in the patterns.
    pub fn pattern_vars(&self) -> Vec<&str> {
        let mut vars: Vec<&str> = Vec::new();
        for name in self.patterns.iter().flat_map(|p| p.positions()).filter_map(PatternTerm::as_var) {
            if !vars.contains(&name) {
                vars.push(name);
            }
        }
        vars
    }

    fn write_term(&self, f: &mut fmt::Formatter<'_>, term: &PatternTerm) -> fmt::Result {
        match term {
            PatternTerm::Var(name) => write!(f, "?{name}"),
            PatternTerm::Term(Term::Iri(iri)) => match compact_iri(iri, &self.prefixes) {
                Some(name) => f.write_str(&name),
                None => write!(f, "<{iri}>"),
            },
            PatternTerm::Term(literal) => write!(f, "{literal}"),
        }
    }
}

/// Canonical text: one `PREFIX` line per prefix (sorted), the `SELECT` line,
/// and the patterns joined by ` . `.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (prefix, base) in &self.prefixes {
            writeln!(f, "PREFIX {prefix}:<{base}>")?;
        }
        f.write_str("SELECT")?;
        for var in &self.select_vars {
            write!(f, " ?{var}")?;
        }
        f.write_str("\nWHERE {")?;
        for (i, pattern) in self.patterns.iter().enumerate() {
            f.write_str(if i == 0 { "" } else { " ." })?;
            for term in pattern.positions() {
                f.write_str(" ")?;
                self.write_term(f, term)?;
            }
        }
        f.write_str(" }")
    }
}
