//! Keyword spotting with a controlled vocabulary and taxonomy classification
//! by per-node keyword hit rate.

mod classify;
mod metrics;

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use classify::{classify, partition_vocabulary, ClassifierConfig, ScoreMode};
pub use metrics::{evaluate_pr, PRReport};

use crate::model::NodeId;
use crate::num::Scalar;

/// Lower-cases, deletes punctuation and collapses whitespace into tokens.
/// Letters with diacritics are kept as they are.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|word| {
            word.chars()
                .filter(|c| !c.is_ascii_punctuation() && !is_unicode_punctuation(*c))
                .flat_map(char::to_lowercase)
                .collect::<String>()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

fn is_unicode_punctuation(c: char) -> bool {
    matches!(
        c,
        '\u{2010}'..='\u{2027}' | '\u{2030}'..='\u{205E}' | '\u{00A1}' | '\u{00A7}' | '\u{00AB}'
            | '\u{00B6}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}' | '\u{3001}'..='\u{3003}'
    )
}

/// A term in normalized form: its tokens joined by single spaces.
pub fn normalize_term(term: &str) -> String {
    tokenize(term).join(" ")
}

/// One controlled-vocabulary term with its surface forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyEntry {
    pub canonical: String,
    /// Normalized flexion and synonym forms, always including the canonical form.
    pub variants: BTreeSet<String>,
    pub nodes: BTreeSet<NodeId>,
}

impl VocabularyEntry {
    pub fn new<V, N>(canonical: &str, variants: V, nodes: N) -> crate::Result<Self>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
        N: IntoIterator,
        N::Item: Into<NodeId>,
    {
        let mut entry = Self {
            canonical: canonical.trim().to_owned(),
            variants: variants.into_iter().map(|v| normalize_term(v.as_ref())).collect(),
            nodes: nodes.into_iter().map(Into::into).collect(),
        };
        entry.normalize()?;
        Ok(entry)
    }

    /// Re-establishes the entry invariants after deserialization.
    pub fn normalize(&mut self) -> crate::Result<()> {
        let canonical = normalize_term(&self.canonical);
        if canonical.is_empty() {
            return Err(crate::Error::InvalidInput("vocabulary entry without canonical term".into()));
        }
        if self.nodes.is_empty() {
            return Err(crate::Error::InvalidInput(format!(
                "vocabulary entry `{}` lists no taxonomy node",
                self.canonical
            )));
        }
        self.variants = std::mem::take(&mut self.variants)
            .into_iter()
            .map(|v| normalize_term(&v))
            .filter(|v| !v.is_empty())
            .collect();
        self.variants.insert(canonical);
        Ok(())
    }
}

/// Loads a vocabulary file: a JSON list of `{canonical, variants, nodes}`.
pub fn vocabulary_from_json(text: &str) -> crate::Result<Vec<VocabularyEntry>> {
    let mut entries: Vec<VocabularyEntry> = serde_json::from_str(text)?;
    for entry in &mut entries {
        entry.normalize()?;
    }
    Ok(entries)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TokenInput {
    Plain(String),
    Recognized {
        token: String,
        #[serde(default)]
        #[allow(dead_code)]
        confidence: Option<f64>,
    },
}

/// Reads a recognizer token list: a JSON array of strings or of
/// `{"token": ..., "confidence": ...}` objects. Confidences are accepted but
/// not used. Tokens are normalized like plain text.
pub fn tokens_from_json(text: &str) -> crate::Result<Vec<String>> {
    let items: Vec<TokenInput> = serde_json::from_str(text)?;
    Ok(items
        .into_iter()
        .flat_map(|item| match item {
            TokenInput::Plain(token) | TokenInput::Recognized { token, .. } => tokenize(&token),
        })
        .collect())
}

/// Keyword hits in a token stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpottingResult {
    /// `(canonical term, token position)` in position order.
    pub hits: Vec<(String, usize)>,
    pub spotted_set: BTreeSet<String>,
}

/// Finds every occurrence of a vocabulary variant in `tokens`.
///
/// Variants may span several tokens and must match contiguously. At one
/// position each entry contributes at most one hit (its longest matching
/// variant); different entries may hit at the same position.
pub fn spot_keywords<E: Borrow<VocabularyEntry>>(tokens: &[String], terms: &[E]) -> SpottingResult {
    // first token -> (variant tokens, entry index)
    let mut by_first: HashMap<&str, Vec<(Vec<&str>, usize)>> = HashMap::new();
    for (index, entry) in terms.iter().enumerate() {
        for variant in &entry.borrow().variants {
            let parts: Vec<&str> = variant.split(' ').collect();
            by_first.entry(parts[0]).or_default().push((parts, index));
        }
    }
    let mut result = SpottingResult::default();
    for position in 0..tokens.len() {
        let Some(candidates) = by_first.get(tokens[position].as_str()) else {
            continue;
        };
        let mut matched: BTreeSet<usize> = BTreeSet::new();
        for (parts, entry) in candidates {
            let end = position + parts.len();
            if end <= tokens.len() && tokens[position..end].iter().zip(parts).all(|(t, p)| t == p) {
                matched.insert(*entry);
            }
        }
        for entry in matched {
            let canonical = &terms[entry].borrow().canonical;
            result.hits.push((canonical.clone(), position));
            result.spotted_set.insert(canonical.clone());
        }
    }
    result
}

/// `|a ∩ b| / |a ∪ b|`, with two empty sets scoring zero.
pub fn jaccard<T: Scalar, K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>) -> T {
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    if union == 0 {
        T::zero()
    } else {
        T::from_ratio(intersection, union)
    }
}
