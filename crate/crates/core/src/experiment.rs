//! The staged yield experiment: how many relations the reasoner derives as
//! manual input is added step by step.
//!
//! * A — structural and taxonomic seed, closed;
//! * B — plus heuristic `isAlternativeTo` conjectures, closed;
//! * C — plus the relations authors set by hand, closed;
//! * D — plus the relations found missing on review, closed.
//!
//! A fixture is a repository file with an extra `stages` object:
//!
//! ```json
//! "stages": {
//!   "heuristic": {"keyword_threshold": 0.9, "compared_attributes": ["context", "difficulty"]},
//!   "author_facts": [{"from": "a", "type": "requires", "to": "b"}],
//!   "missing_facts": []
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::io::{facts_from_value, repository_from_value};
use crate::model::{structural_and_taxonomic_facts, Provenance, RelationInstance, Repository};
use crate::reasoner::{closure, heuristic_facts, HeuristicConfig, RuleSet};

pub const STAGES: [&str; 4] = ["A", "B", "C", "D"];

/// Repository and fact batches of a staged run.
#[derive(Debug, Clone)]
pub struct StagedFixture {
    /// Objects and taxonomy; preset relations, if any, are kept in every stage.
    pub repository: Repository,
    pub heuristic: HeuristicConfig<f64>,
    pub author_facts: Vec<RelationInstance>,
    pub missing_facts: Vec<RelationInstance>,
}

fn fixture_error(context: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Fixture(format!("{context}: {e}"))
}

impl StagedFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
        let Some(root) = value.as_object_mut() else {
            return Err(Error::Fixture("top level must be an object".into()));
        };
        let mut stages = match root.remove("stages") {
            Some(Value::Object(stages)) => stages,
            Some(_) => return Err(Error::Fixture("`stages` must be an object".into())),
            None => return Err(Error::Fixture("missing `stages`".into())),
        };
        let repository = repository_from_value(value).map_err(fixture_error("repository"))?;
        let heuristic = match stages.remove("heuristic") {
            Some(v) => serde_json::from_value(v).map_err(|e| Error::Fixture(format!("heuristic: {e}")))?,
            None => HeuristicConfig::default(),
        };
        let mut batch = |name: &str| -> Result<Vec<RelationInstance>> {
            let facts = match stages.remove(name) {
                Some(v) => facts_from_value(v).map_err(fixture_error(name))?,
                None => Vec::new(),
            };
            for fact in &facts {
                if fact.provenance == Provenance::Inferred {
                    return Err(Error::Fixture(format!("{name}: {fact} cannot be preset as inferred")));
                }
                for id in [&fact.subject, &fact.object] {
                    if repository.object(id).is_none() {
                        return Err(Error::Fixture(format!("{name}: unknown object `{id}`")));
                    }
                }
            }
            Ok(facts)
        };
        let author_facts = batch("author_facts")?;
        let missing_facts = batch("missing_facts")?;
        Ok(Self {
            repository,
            heuristic,
            author_facts,
            missing_facts,
        })
    }

    /// The facts added at each stage, before closure.
    pub fn stage_batches(&self) -> [Vec<RelationInstance>; 4] {
        [
            structural_and_taxonomic_facts(&self.repository),
            heuristic_facts(&self.repository, &self.heuristic),
            self.author_facts.clone(),
            self.missing_facts.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentStageReport {
    pub stage: String,
    /// Previously absent facts (counterparts included) the stage's batch added.
    pub facts_added_this_stage: usize,
    pub total_facts_after_closure: usize,
    pub inferred_count: usize,
    pub per_relation_histogram: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub stages: Vec<ExperimentStageReport>,
    /// The closed repository after stage D.
    pub repository: Repository,
}

/// Runs the four stages, closing the repository after each batch.
pub fn run_experiment(fixture: &StagedFixture, rules: &RuleSet) -> Result<ExperimentOutcome> {
    let mut repo = fixture.repository.clone();
    let mut stages = Vec::with_capacity(4);
    for (name, batch) in STAGES.iter().zip(fixture.stage_batches()) {
        let added = repo.insert_facts(batch).map_err(fixture_error(name))?;
        repo = closure(&repo, rules).repository;
        stages.push(ExperimentStageReport {
            stage: (*name).to_owned(),
            facts_added_this_stage: added,
            total_facts_after_closure: repo.fact_count(),
            inferred_count: repo.provenance_count(Provenance::Inferred),
            per_relation_histogram: repo
                .relation_histogram()
                .into_iter()
                .map(|(r, n)| (r.name().to_owned(), n))
                .collect(),
        });
    }
    Ok(ExperimentOutcome { stages, repository: repo })
}

/// Machine-readable report: `{"rules": n, "heuristic": {...}, "stages": [...]}`.
pub fn report_json(outcome: &ExperimentOutcome, fixture: &StagedFixture, rules: &RuleSet) -> Value {
    serde_json::json!({
        "rules": rules.len(),
        "heuristic": fixture.heuristic,
        "stages": outcome.stages,
    })
}

/// Checks a JSON report for shape and internal consistency: four stages A–D
/// in order, totals non-decreasing, `inferred_count ≤ total`, and histograms
/// summing to the totals.
pub fn validate_report(report: &Value) -> Result<Vec<ExperimentStageReport>> {
    let invalid = |msg: String| Error::InvalidInput(format!("experiment report: {msg}"));
    let stages = report
        .get("stages")
        .ok_or_else(|| invalid("missing `stages`".into()))?;
    let stages: Vec<ExperimentStageReport> =
        serde_json::from_value(stages.clone()).map_err(|e| invalid(e.to_string()))?;
    let names: Vec<&str> = stages.iter().map(|s| s.stage.as_str()).collect();
    if names != STAGES {
        return Err(invalid(format!("stages {names:?}, expected {STAGES:?}")));
    }
    for (i, stage) in stages.iter().enumerate() {
        if stage.inferred_count > stage.total_facts_after_closure {
            return Err(invalid(format!("stage {}: inferred exceeds total", stage.stage)));
        }
        let sum: usize = stage.per_relation_histogram.values().sum();
        if sum != stage.total_facts_after_closure {
            return Err(invalid(format!("stage {}: histogram sums to {sum}", stage.stage)));
        }
        if i > 0 && stage.total_facts_after_closure < stages[i - 1].total_facts_after_closure {
            return Err(invalid(format!("stage {}: total decreased", stage.stage)));
        }
    }
    Ok(stages)
}

impl fmt::Display for ExperimentStageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {}: +{} facts, {} after closure, {} inferred",
            self.stage, self.facts_added_this_stage, self.total_facts_after_closure, self.inferred_count
        )
    }
}

/// Human-readable summary: one line per stage, then the final histogram.
pub fn report_text(outcome: &ExperimentOutcome) -> String {
    let mut out = String::new();
    for stage in &outcome.stages {
        out.push_str(&stage.to_string());
        out.push('\n');
    }
    if let Some(last) = outcome.stages.last() {
        out.push_str(&format!("relations after stage {}:\n", last.stage));
        for (relation, count) in &last.per_relation_histogram {
            out.push_str(&format!("  {relation:<22} {count}\n"));
        }
    }
    out
}
