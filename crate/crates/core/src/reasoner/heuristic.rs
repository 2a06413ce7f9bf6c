use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classifier::jaccard;
use crate::error::Result;
use crate::model::{attr, ELearningObject, Provenance, RelationInstance, RelationType, Repository};
use crate::num::Scalar;

/// Thresholds for conjecturing `isAlternativeTo` between similar objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig<T> {
    /// Minimum keyword Jaccard coefficient.
    pub keyword_threshold: T,
    /// Educational attributes that must agree.
    pub compared_attributes: BTreeSet<String>,
}

impl<T: Scalar> Default for HeuristicConfig<T> {
    fn default() -> Self {
        Self {
            keyword_threshold: T::from_ratio(9, 10),
            compared_attributes: [attr::CONTEXT, attr::DIFFICULTY]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl<T: Scalar> HeuristicConfig<T> {
    /// `true` when the two objects look interchangeable: same classification
    /// set, overlapping keywords and agreeing attributes.
    pub fn similar(&self, a: &ELearningObject, b: &ELearningObject) -> bool {
        a.classifications == b.classifications
            && jaccard::<T, _>(&a.keywords, &b.keywords) >= self.keyword_threshold
            && self
                .compared_attributes
                .iter()
                .all(|key| a.attributes.get(key) == b.attributes.get(key))
    }
}

/// One `isAlternativeTo` fact per similar unordered pair (mirrors excluded).
pub fn heuristic_facts<T: Scalar>(repo: &Repository, config: &HeuristicConfig<T>) -> Vec<RelationInstance> {
    let objects: Vec<&ELearningObject> = repo.objects().collect();
    let mut out = Vec::new();
    for (i, a) in objects.iter().enumerate() {
        for b in &objects[i + 1..] {
            if config.similar(a, b) {
                out.push(RelationInstance::new(
                    a.id.clone(),
                    RelationType::IsAlternativeTo,
                    b.id.clone(),
                    Provenance::Heuristic,
                ));
            }
        }
    }
    out
}

/// Returns `repo` extended by [`heuristic_facts`].
pub fn heuristic_seed<T: Scalar>(repo: &Repository, config: &HeuristicConfig<T>) -> Result<Repository> {
    let mut next = repo.clone();
    next.insert_facts(heuristic_facts(repo, config))?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FactKey, NodeId, Taxonomy, TaxonomyNode};
    use num_rational::Ratio;

    fn taxonomy() -> Taxonomy {
        Taxonomy::new([TaxonomyNode {
            id: NodeId::from("xml"),
            label: "XML".into(),
            parent: None,
        }])
        .unwrap()
    }

    fn elo(id: &str, keywords: &[&str]) -> ELearningObject {
        ELearningObject::new(id, id)
            .with_classifications(["xml"])
            .with_keywords(keywords.iter().copied())
            .with_attribute(attr::CONTEXT, "higher education")
            .with_attribute(attr::DIFFICULTY, "medium")
    }

    #[test]
    fn identical_objects_are_alternatives() {
        let repo = Repository::new(taxonomy(), [elo("a", &["sax", "dom"]), elo("b", &["sax", "dom"])]).unwrap();
        let seeded = heuristic_seed(&repo, &HeuristicConfig::<f64>::default()).unwrap();
        assert!(seeded.contains(&FactKey::new("a", RelationType::IsAlternativeTo, "b")));
        assert!(seeded.contains(&FactKey::new("b", RelationType::IsAlternativeTo, "a")));
        assert_eq!(seeded.fact_count(), 2);
    }

    #[test]
    fn disjoint_keywords_are_not() {
        let repo = Repository::new(taxonomy(), [elo("a", &["sax"]), elo("b", &["dom"])]).unwrap();
        assert!(heuristic_facts(&repo, &HeuristicConfig::<f64>::default()).is_empty());
    }

    #[test]
    fn attributes_and_classification_must_agree() {
        let b = elo("b", &["sax"]).with_attribute(attr::DIFFICULTY, "hard");
        let repo = Repository::new(taxonomy(), [elo("a", &["sax"]), b]).unwrap();
        assert!(heuristic_facts(&repo, &HeuristicConfig::<f64>::default()).is_empty());

        let mut c = elo("c", &["sax"]);
        c.classifications.clear();
        let repo = Repository::new(taxonomy(), [elo("a", &["sax"]), c]).unwrap();
        assert!(heuristic_facts(&repo, &HeuristicConfig::<f64>::default()).is_empty());
    }

    #[test]
    fn exact_threshold_boundary() {
        // jaccard = 9/10 exactly
        let shared: Vec<String> = (0..9).map(|i| format!("k{i}")).collect();
        let mut more = shared.clone();
        more.push("extra".into());
        let a = elo("a", &shared.iter().map(String::as_str).collect::<Vec<_>>());
        let b = elo("b", &more.iter().map(String::as_str).collect::<Vec<_>>());
        let repo = Repository::new(taxonomy(), [a, b]).unwrap();
        assert_eq!(heuristic_facts(&repo, &HeuristicConfig::<Ratio<i64>>::default()).len(), 1);
        let strict = HeuristicConfig {
            keyword_threshold: Ratio::new(91, 100),
            ..HeuristicConfig::default()
        };
        assert!(heuristic_facts(&repo, &strict).is_empty());
    }
}
