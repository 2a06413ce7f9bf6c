//! Repository files.
//!
//! ```json
//! {
//!   "taxonomy":  [{"id": "xml", "label": "XML", "parent": "markup"}],
//!   "objects":   [{"id": "dom", "title": "DOM", "author": "", "keywords": [],
//!                  "classifications": ["xml"], "attributes": {}, "children": []}],
//!   "relations": [{"from": "dom", "type": "requires", "to": "xml",
//!                  "provenance": "asserted"}]
//! }
//! ```
//!
//! Unknown keys are ignored; omitted lists and fields default to empty and
//! omitted provenance to `asserted`. Inverse and symmetric counterparts that
//! are not listed are added on load. Saving writes sorted keys, objects and
//! taxonomy nodes sorted by id and relations sorted by (from, type, to), so
//! any file saved once loads and saves to the same bytes.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{Derivation, ELearningObject, NodeId, Provenance, RelationInstance, RelationType, Repository, Taxonomy, TaxonomyNode};

#[derive(Deserialize)]
struct RawObject {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    author: String,
    #[serde(default)]
    keywords: Vec<String>,
    #[serde(default)]
    classifications: Vec<String>,
    #[serde(default)]
    attributes: BTreeMap<String, String>,
    #[serde(default)]
    children: Vec<String>,
}

/// One entry of a `relations` list.
#[derive(Debug, Clone, Deserialize)]
pub struct RawFact {
    pub from: String,
    #[serde(rename = "type")]
    pub relation: String,
    pub to: String,
    #[serde(default)]
    pub provenance: Option<Provenance>,
    #[serde(default)]
    pub derivation: Option<Derivation>,
}

impl RawFact {
    pub fn into_instance(self) -> Result<RelationInstance> {
        let relation: RelationType = self.relation.parse()?;
        let mut fact = RelationInstance::new(
            self.from,
            relation,
            self.to,
            self.provenance.unwrap_or(Provenance::Asserted),
        );
        fact.derivation = self.derivation;
        Ok(fact)
    }
}

#[derive(Deserialize)]
struct RawRepository {
    #[serde(default)]
    taxonomy: Vec<TaxonomyNode>,
    #[serde(default)]
    objects: Vec<RawObject>,
    #[serde(default)]
    relations: Vec<RawFact>,
}

/// Parses a list of facts as found under `relations`.
pub fn facts_from_value(value: Value) -> Result<Vec<RelationInstance>> {
    let raw: Vec<RawFact> = serde_json::from_value(value)?;
    raw.into_iter().map(RawFact::into_instance).collect()
}

/// Builds a repository from an already parsed file.
pub fn repository_from_value(value: Value) -> Result<Repository> {
    let raw: RawRepository = serde_json::from_value(value)?;
    let taxonomy = Taxonomy::new(raw.taxonomy)?;
    let objects = raw.objects.into_iter().map(|o| ELearningObject {
        id: o.id.into(),
        title: o.title,
        author: o.author,
        children: o.children.into_iter().map(Into::into).collect(),
        attributes: o.attributes,
        ..ELearningObject::default()
    }
    .with_keywords(o.keywords)
    .with_classifications(o.classifications.into_iter().map(NodeId::from)));
    let mut repo = Repository::new(taxonomy, objects)?;
    let facts = raw
        .relations
        .into_iter()
        .map(RawFact::into_instance)
        .collect::<Result<Vec<_>>>()?;
    repo.load_facts(facts)?;
    Ok(repo)
}

pub fn load_repository(text: &str) -> Result<Repository> {
    repository_from_value(serde_json::from_str(text)?)
}

fn fact_value(fact: &RelationInstance) -> Value {
    let mut entry = Map::new();
    entry.insert("from".into(), json!(fact.subject));
    entry.insert("type".into(), json!(fact.relation));
    entry.insert("to".into(), json!(fact.object));
    entry.insert("provenance".into(), json!(fact.provenance));
    if let Some(derivation) = &fact.derivation {
        entry.insert("derivation".into(), json!(derivation));
    }
    Value::Object(entry)
}

pub fn facts_to_value<'a>(facts: impl IntoIterator<Item = &'a RelationInstance>) -> Value {
    let mut facts: Vec<&RelationInstance> = facts.into_iter().collect();
    facts.sort_by_key(|f| f.key());
    Value::Array(facts.into_iter().map(fact_value).collect())
}

pub fn repository_to_value(repo: &Repository) -> Value {
    let mut nodes: Vec<&TaxonomyNode> = repo.taxonomy().nodes().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    let taxonomy: Vec<Value> = nodes
        .into_iter()
        .map(|n| {
            let mut entry = Map::new();
            entry.insert("id".into(), json!(n.id));
            entry.insert("label".into(), json!(n.label));
            if let Some(parent) = &n.parent {
                entry.insert("parent".into(), json!(parent));
            }
            Value::Object(entry)
        })
        .collect();
    let objects: Vec<Value> = repo
        .objects()
        .map(|o| {
            json!({
                "id": o.id,
                "title": o.title,
                "author": o.author,
                "keywords": o.keywords,
                "classifications": o.classifications,
                "attributes": o.attributes,
                "children": o.children,
            })
        })
        .collect();
    json!({
        "taxonomy": taxonomy,
        "objects": objects,
        "relations": facts_to_value(repo.facts()),
    })
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_canonical_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn save_repository(repo: &Repository) -> String {
    to_canonical_json(&repository_to_value(repo))
}

impl Repository {
    /// Inserts facts exactly as listed, then adds the counterparts of those
    /// whose inverse or symmetric partner is missing.
    pub(crate) fn load_facts(&mut self, facts: Vec<RelationInstance>) -> Result<()> {
        for fact in &facts {
            for id in [&fact.subject, &fact.object] {
                if self.object(id).is_none() {
                    return Err(Error::UnknownObject(id.0.clone()));
                }
            }
            fact.check_derivation()?;
        }
        let mirrors: Vec<RelationInstance> = facts.iter().filter_map(RelationInstance::mirror).collect();
        for fact in facts {
            self.merge(fact);
        }
        for mirror in mirrors {
            if !self.contains(&mirror.key()) {
                self.merge(mirror);
            }
        }
        Ok(())
    }
}
