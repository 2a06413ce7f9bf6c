//! Metadata, anchors and hyperlinks as subject–predicate–object statements.
//!
//! A hyperlink becomes a reified statement: the link IRI is the subject of
//! `rdf:type rdf:Statement`, `rdf:subject`, `rdf:predicate` and `rdf:object`
//! triples, so further statements (titles, creator) can be made about the
//! link itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{attr, ELearningObject, NodeId, ObjectId};

pub mod ns {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const DC: &str = "http://purl.org/dc/elements/1.1/";
    pub const LOM: &str = "http://ltsc.ieee.org/xsd/LOM#";
    pub const MIR: &str = "http://www.rz.fhtw-berlin.de/MIR/mir#";
    pub const ELO: &str = "http://www.rz.fhtw-berlin.de/MIR/elo/";
    pub const ANCHOR: &str = "http://www.rz.fhtw-berlin.de/MIR/anchor/";
    pub const LINK: &str = "http://www.rz.fhtw-berlin.de/MIR/link/";
    pub const TAX: &str = "http://www.rz.fhtw-berlin.de/MIR/taxonomy/";
}

/// The prefix map every store starts with.
pub fn default_prefixes() -> BTreeMap<String, String> {
    [
        ("rdf", ns::RDF),
        ("dc", ns::DC),
        ("lom", ns::LOM),
        ("mir", ns::MIR),
        ("elo", ns::ELO),
        ("anchor", ns::ANCHOR),
        ("link", ns::LINK),
        ("tax", ns::TAX),
    ]
    .into_iter()
    .map(|(p, iri)| (p.to_owned(), iri.to_owned()))
    .collect()
}

/// An IRI (always stored expanded) or a plain literal with optional language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Literal { value: String, lang: Option<String> },
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            return Err(Error::InvalidTerm(format!("`{value}` is not an IRI")));
        }
        Ok(Term::Iri(value))
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal {
            value: value.into(),
            lang: None,
        }
    }

    pub fn lang_literal(value: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal {
            value: value.into(),
            lang: Some(lang.into()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal { .. } => None,
        }
    }

    pub fn literal_value(&self) -> Option<&str> {
        match self {
            Term::Literal { value, .. } => Some(value),
            Term::Iri(_) => None,
        }
    }
}

/// Characters allowed in the local part of a prefixed name.
pub(crate) fn is_local_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '/' | '%')
}

pub(crate) fn is_prefix_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-')
}

/// Shortest prefixed form of `iri` under `prefixes`, if it has one that
/// re-parses unambiguously.
pub fn compact_iri(iri: &str, prefixes: &BTreeMap<String, String>) -> Option<String> {
    prefixes
        .iter()
        .filter_map(|(prefix, base)| {
            let local = iri.strip_prefix(base.as_str())?;
            let ok = !local.ends_with('.') && !local.starts_with('.') && local.chars().all(is_local_char);
            ok.then(|| format!("{prefix}:{local}"))
        })
        .min_by_key(|name| name.len())
}

/// Expands `prefix:local` against `prefixes`.
pub fn expand_name(name: &str, prefixes: &BTreeMap<String, String>) -> Result<String> {
    let (prefix, local) = name
        .split_once(':')
        .ok_or_else(|| Error::InvalidTerm(format!("`{name}` is not a prefixed name")))?;
    let base = prefixes
        .get(prefix)
        .ok_or_else(|| Error::UnknownPrefix(prefix.to_owned()))?;
    Ok(format!("{base}{local}"))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal { value, lang } => {
                write!(f, "\"{}\"", escape_literal(value))?;
                if let Some(lang) = lang {
                    write!(f, "@{lang}")?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Renders a term for people: IRIs compacted where a prefix applies.
pub fn render_term(term: &Term, prefixes: &BTreeMap<String, String>) -> String {
    match term {
        Term::Iri(iri) => compact_iri(iri, prefixes).unwrap_or_else(|| format!("<{iri}>")),
        literal => literal.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }
}

fn iri(base: &str, local: &str) -> Term {
    Term::Iri(format!("{base}{local}"))
}

pub fn elo_iri(id: &ObjectId) -> Term {
    iri(ns::ELO, id.as_str())
}

pub fn node_iri(id: &NodeId) -> Term {
    iri(ns::TAX, id.as_str())
}

fn rdf(local: &str) -> Term {
    iri(ns::RDF, local)
}

fn dc(local: &str) -> Term {
    iri(ns::DC, local)
}

fn mir(local: &str) -> Term {
    iri(ns::MIR, local)
}

fn lom(path: &str) -> Term {
    iri(ns::LOM, path)
}

/// An addressed part of a learning object that links attach to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    /// Expanded IRI.
    pub id: String,
    pub resource: ObjectId,
    /// Opaque locator expression, e.g. an XPointer.
    pub locator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A typed hyperlink between two anchors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRecord {
    /// Expanded IRIs.
    pub id: String,
    pub from: String,
    pub to: String,
    pub arcrole: String,
    pub titles: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
}

/// A set of triples with the prefix map used to read and write them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatementStore {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, String>,
}

impl Default for StatementStore {
    fn default() -> Self {
        Self {
            triples: BTreeSet::new(),
            prefixes: default_prefixes(),
        }
    }
}

impl FromIterator<Triple> for StatementStore {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut store = Self::default();
        store.extend(iter);
        store
    }
}

impl Extend<Triple> for StatementStore {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter);
    }
}

impl StatementStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    /// Registers (or rebinds) a prefix.
    pub fn add_prefix(&mut self, prefix: impl Into<String>, base: impl Into<String>) -> Result<()> {
        let prefix = prefix.into();
        if !prefix.chars().all(is_prefix_char) {
            return Err(Error::InvalidTerm(format!("bad prefix `{prefix}`")));
        }
        self.prefixes.insert(prefix, base.into());
        Ok(())
    }

    /// Returns `true` when the triple was not yet present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    /// A new snapshot containing `triples` as well.
    pub fn with(&self, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut next = self.clone();
        next.extend(triples);
        next
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Triples matching the given positions; `None` matches anything.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&'a Term>,
        predicate: Option<&'a Term>,
        object: Option<&'a Term>,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples.iter().filter(move |t| {
            subject.is_none_or(|s| *s == t.subject)
                && predicate.is_none_or(|p| *p == t.predicate)
                && object.is_none_or(|o| *o == t.object)
        })
    }

    /// Parses a term in interchange notation: `prefix:local`, `<iri>`, or a
    /// JSON string whose content is wrapped in double quotes for literals.
    pub fn parse_term(&self, text: &str, lang: Option<&str>) -> Result<Term> {
        if text.len() >= 2 && text.starts_with('"') && text.ends_with('"') {
            let value = &text[1..text.len() - 1];
            return Ok(match lang {
                Some(lang) => Term::lang_literal(value, lang),
                None => Term::literal(value),
            });
        }
        if lang.is_some() {
            return Err(Error::InvalidTerm(format!("language tag on non-literal `{text}`")));
        }
        if let Some(inner) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            return Term::iri(inner);
        }
        Term::iri(expand_name(text, &self.prefixes)?)
    }

    fn write_term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => compact_iri(iri, &self.prefixes).unwrap_or_else(|| format!("<{iri}>")),
            Term::Literal { value, .. } => format!("\"{value}\""),
        }
    }

    /// Reads the interchange format
    /// `{"prefixes": {...}, "triples": [{"s", "p", "o", "lang"?}]}`.
    /// Declared prefixes extend the default map.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct RawTriple {
            s: String,
            p: String,
            o: String,
            #[serde(default)]
            lang: Option<String>,
        }
        #[derive(Deserialize)]
        struct RawStore {
            #[serde(default)]
            prefixes: BTreeMap<String, String>,
            #[serde(default)]
            triples: Vec<RawTriple>,
        }
        let raw: RawStore = serde_json::from_str(text)?;
        let mut store = Self::default();
        for (prefix, base) in raw.prefixes {
            store.add_prefix(prefix, base)?;
        }
        for t in raw.triples {
            let triple = Triple::new(
                store.parse_term(&t.s, None)?,
                store.parse_term(&t.p, None)?,
                store.parse_term(&t.o, t.lang.as_deref())?,
            );
            if triple.subject.as_iri().is_none() || triple.predicate.as_iri().is_none() {
                return Err(Error::InvalidTerm(format!("literal in subject or predicate position: {}", t.s)));
            }
            store.insert(triple);
        }
        Ok(store)
    }

    pub fn to_json_value(&self) -> Value {
        let triples: Vec<Value> = self
            .triples
            .iter()
            .map(|t| {
                let mut entry = Map::new();
                entry.insert("s".into(), json!(self.write_term(&t.subject)));
                entry.insert("p".into(), json!(self.write_term(&t.predicate)));
                entry.insert("o".into(), json!(self.write_term(&t.object)));
                if let Term::Literal { lang: Some(lang), .. } = &t.object {
                    entry.insert("lang".into(), json!(lang));
                }
                Value::Object(entry)
            })
            .collect();
        json!({ "prefixes": self.prefixes, "triples": triples })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json_value()).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

/// LOM path of an attribute key.
fn attribute_path(key: &str) -> String {
    match key {
        attr::DESCRIPTION => "general.description".into(),
        attr::STRUCTURE => "general.structure".into(),
        attr::STATUS => "lifeCycle.status".into(),
        attr::CONTEXT => "educational.context".into(),
        attr::DIFFICULTY => "educational.difficulty".into(),
        attr::SEMANTIC_DENSITY => "educational.semanticDensity".into(),
        attr::LEARNING_RESOURCE_TYPE => "educational.learningResourceType".into(),
        other => format!("extension.{other}"),
    }
}

/// One statement per metadata value, with the object as subject.
///
/// Empty fields produce nothing; every keyword and classification produces
/// its own statement.
pub fn metadata_to_statements(elo: &ELearningObject) -> BTreeSet<Triple> {
    let subject = elo_iri(&elo.id);
    let mut out = BTreeSet::new();
    let mut literal = |path: &str, value: &str| {
        if !value.is_empty() {
            out.insert(Triple::new(subject.clone(), lom(path), Term::literal(value)));
        }
    };
    literal("general.title", &elo.title);
    literal("lifeCycle.contribute", &elo.author);
    for keyword in &elo.keywords {
        literal("general.keyword", keyword);
    }
    for (key, value) in &elo.attributes {
        literal(&attribute_path(key), value);
    }
    for node in &elo.classifications {
        out.insert(Triple::new(subject.clone(), lom("classification"), node_iri(node)));
    }
    out
}

/// The object's statements restated about `anchor`, plus the anchor's own
/// title and label.
pub fn harvest_anchor_descriptors(anchor: &Anchor, elo_statements: &BTreeSet<Triple>) -> Result<BTreeSet<Triple>> {
    let resource = elo_iri(&anchor.resource);
    let subject = Term::iri(anchor.id.clone())?;
    let mut out = BTreeSet::new();
    for triple in elo_statements {
        if triple.subject != resource {
            return Err(Error::ResourceMismatch {
                expected: render_term(&resource, &default_prefixes()),
                found: render_term(&triple.subject, &default_prefixes()),
            });
        }
        out.insert(Triple::new(subject.clone(), triple.predicate.clone(), triple.object.clone()));
    }
    if let Some(title) = &anchor.title {
        out.insert(Triple::new(subject.clone(), dc("title"), Term::literal(title)));
    }
    if let Some(label) = &anchor.label {
        out.insert(Triple::new(subject, mir("label"), Term::literal(label)));
    }
    Ok(out)
}

/// Statements locating an anchor: its resource and locator expression.
pub fn anchor_to_statements(anchor: &Anchor) -> Result<BTreeSet<Triple>> {
    let subject = Term::iri(anchor.id.clone())?;
    Ok([
        Triple::new(subject.clone(), mir("resource"), elo_iri(&anchor.resource)),
        Triple::new(subject, mir("locator"), Term::literal(&anchor.locator)),
    ]
    .into_iter()
    .collect())
}

/// The reification quad of a link plus its titles and creator.
pub fn link_to_reified(link: &LinkRecord) -> Result<BTreeSet<Triple>> {
    let id = Term::iri(link.id.clone())?;
    let mut out: BTreeSet<Triple> = [
        Triple::new(id.clone(), rdf("type"), rdf("Statement")),
        Triple::new(id.clone(), rdf("subject"), Term::iri(link.from.clone())?),
        Triple::new(id.clone(), rdf("predicate"), Term::iri(link.arcrole.clone())?),
        Triple::new(id.clone(), rdf("object"), Term::iri(link.to.clone())?),
    ]
    .into_iter()
    .collect();
    for title in &link.titles {
        out.insert(Triple::new(id.clone(), dc("title"), Term::literal(title)));
    }
    if let Some(author) = &link.author {
        out.insert(Triple::new(id, dc("creator"), Term::literal(author)));
    }
    Ok(out)
}

/// Rebuilds the link stated by `link_id`.
pub fn reified_to_link(store: &StatementStore, link_id: &str) -> Result<LinkRecord> {
    let id = Term::Iri(link_id.to_owned());
    let incomplete = |message: String| Error::IncompleteReification {
        id: link_id.to_owned(),
        message,
    };
    if !store.contains(&Triple::new(id.clone(), rdf("type"), rdf("Statement"))) {
        return Err(incomplete("missing rdf:type rdf:Statement".into()));
    }
    let single_iri = |local: &str| -> Result<String> {
        let predicate = rdf(local);
        let values: Vec<&Term> = store.matching(Some(&id), Some(&predicate), None).map(|t| &t.object).collect();
        match values.as_slice() {
            [Term::Iri(value)] => Ok(value.clone()),
            [] => Err(incomplete(format!("missing rdf:{local}"))),
            [_] => Err(incomplete(format!("rdf:{local} is a literal"))),
            _ => Err(incomplete(format!("{} rdf:{local} statements", values.len()))),
        }
    };
    let from = single_iri("subject")?;
    let arcrole = single_iri("predicate")?;
    let to = single_iri("object")?;
    let literals = |predicate: Term| -> Vec<String> {
        store
            .matching(Some(&id), Some(&predicate), None)
            .filter_map(|t| t.object.literal_value().map(str::to_owned))
            .collect()
    };
    let titles = literals(dc("title")).into_iter().collect();
    let mut authors = literals(dc("creator"));
    if authors.len() > 1 {
        return Err(incomplete(format!("{} dc:creator statements", authors.len())));
    }
    Ok(LinkRecord {
        id: link_id.to_owned(),
        from,
        to,
        arcrole,
        titles,
        author: authors.pop(),
    })
}
