use serde::{Deserialize, Serialize};

use super::{evaluate, parse_query, Query};
use crate::error::Result;
use crate::store::{reified_to_link, LinkRecord, StatementStore, Term};

/// A named selection over the link base: the links answering `query`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkContextDef {
    pub id: String,
    #[serde(default)]
    pub creator: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(rename = "query")]
    pub query_text: String,
}

impl LinkContextDef {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn query(&self) -> Result<Query> {
        parse_query(&self.query_text)
    }
}

/// Links selected by a context, plus bindings that did not name a link.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkSelection {
    /// Sorted by link id.
    pub links: Vec<LinkRecord>,
    pub warnings: Vec<String>,
}

/// Evaluates the context query and materializes every value of its first
/// selected variable as a link. Values that are not completely reified links
/// are skipped with a warning.
pub fn select_links(store: &StatementStore, context: &LinkContextDef) -> Result<LinkSelection> {
    let query = context.query()?;
    let answers = evaluate(store, &query);
    let mut ids: Vec<&Term> = answers.rows.iter().map(|row| &row[0]).collect();
    ids.sort();
    ids.dedup();
    let mut selection = LinkSelection::default();
    for term in ids {
        match term {
            Term::Iri(id) => match reified_to_link(store, id) {
                Ok(link) => selection.links.push(link),
                Err(e) => selection.warnings.push(format!("skipping <{id}>: {e}")),
            },
            literal => selection.warnings.push(format!("skipping {literal}: not a link")),
        }
    }
    selection.links.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(selection)
}
