use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{jaccard, VocabularyEntry};
use crate::error::{Error, Result};
use crate::model::{NodeId, Taxonomy};
use crate::num::Scalar;

/// Which sets enter the per-node Jaccard score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    /// `jaccard(spotted ∩ terms(n), terms(n))`: the node's hit rate.
    #[default]
    Restricted,
    /// `jaccard(spotted, terms(n))`: off-topic hits lower the score.
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig<T> {
    /// Minimum score for a node to be reported (θ).
    pub significance_level: T,
    /// Maximum number of terms spotted together.
    pub partition_size: usize,
    /// Restricts scheduling and scoring to this subtree.
    pub context_branch: Option<NodeId>,
    pub score_mode: ScoreMode,
}

impl<T: Scalar> Default for ClassifierConfig<T> {
    fn default() -> Self {
        Self {
            significance_level: T::from_ratio(1, 2),
            partition_size: 50,
            context_branch: None,
            score_mode: ScoreMode::Restricted,
        }
    }
}

impl<T: Scalar> ClassifierConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.significance_level < T::zero() || self.significance_level > T::one() {
            return Err(Error::InvalidConfig(format!(
                "significance level {:?} outside [0, 1]",
                self.significance_level
            )));
        }
        if self.partition_size == 0 {
            return Err(Error::InvalidConfig("partition size must be positive".into()));
        }
        Ok(())
    }
}

fn check_nodes<E: Borrow<VocabularyEntry>>(vocab: &[E], taxonomy: &Taxonomy) -> Result<()> {
    for entry in vocab {
        if let Some(node) = entry.borrow().nodes.iter().find(|n| !taxonomy.contains(n)) {
            return Err(Error::UnknownNode(node.0.clone()));
        }
    }
    Ok(())
}

/// Schedules the vocabulary into term sets of at most `partition_size`
/// entries, walking the taxonomy breadth-first from the context branch (or
/// the roots).
///
/// Each entry is scheduled once, with the first visited node it is attached
/// to; a node's entries are sorted by canonical term and split into chunks.
/// Entries attached only to nodes outside the branch are left out.
pub fn partition_vocabulary<'a, T: Scalar>(
    vocab: &'a [VocabularyEntry],
    taxonomy: &Taxonomy,
    config: &ClassifierConfig<T>,
) -> Result<Vec<Vec<&'a VocabularyEntry>>> {
    config.validate()?;
    check_nodes(vocab, taxonomy)?;
    let order = taxonomy.breadth_first(config.context_branch.as_ref())?;
    let rank: BTreeMap<&NodeId, usize> = order.iter().enumerate().map(|(i, n)| (*n, i)).collect();

    let mut per_node: Vec<Vec<&VocabularyEntry>> = vec![Vec::new(); order.len()];
    for entry in vocab {
        if let Some(first) = entry.nodes.iter().filter_map(|n| rank.get(n)).min() {
            per_node[*first].push(entry);
        }
    }
    let mut sets = Vec::new();
    for mut entries in per_node {
        entries.sort_by(|a, b| a.canonical.cmp(&b.canonical));
        sets.extend(entries.chunks(config.partition_size).map(<[_]>::to_vec));
    }
    Ok(sets)
}

/// Scores every taxonomy node by keyword hit rate and returns those reaching
/// the significance level, best first (ties by node id).
///
/// Nodes without any spotted term never appear, whatever the level.
pub fn classify<T: Scalar>(
    spotted: &BTreeSet<String>,
    vocab: &[VocabularyEntry],
    taxonomy: &Taxonomy,
    config: &ClassifierConfig<T>,
) -> Result<Vec<(NodeId, T)>> {
    config.validate()?;
    check_nodes(vocab, taxonomy)?;
    let scope: Option<BTreeSet<&NodeId>> = match &config.context_branch {
        Some(branch) => Some(taxonomy.subtree(branch)?),
        None => None,
    };
    let mut terms: BTreeMap<&NodeId, BTreeSet<String>> = BTreeMap::new();
    for entry in vocab {
        for node in &entry.nodes {
            terms.entry(node).or_default().insert(entry.canonical.clone());
        }
    }
    let mut scored = Vec::new();
    for (node, node_terms) in terms {
        if scope.as_ref().is_some_and(|s| !s.contains(node)) {
            continue;
        }
        let hits: BTreeSet<String> = spotted.intersection(&node_terms).cloned().collect();
        if hits.is_empty() {
            continue;
        }
        let score: T = match config.score_mode {
            ScoreMode::Restricted => jaccard(&hits, &node_terms),
            ScoreMode::Unrestricted => jaccard(spotted, &node_terms),
        };
        if score >= config.significance_level {
            scored.push((node.clone(), score));
        }
    }
    scored.sort_by(|(na, sa), (nb, sb)| {
        sb.partial_cmp(sa)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| na.cmp(nb))
    });
    Ok(scored)
}
