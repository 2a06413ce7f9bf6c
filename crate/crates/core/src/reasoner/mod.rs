//! Rule-based closure, heuristic seeding and consistency monitoring over a
//! [`Repository`](crate::model::Repository).

mod engine;
mod heuristic;
mod rules;

use std::collections::BTreeMap;

pub use engine::{closure, incremental_update, ClosureResult};
pub use heuristic::{heuristic_facts, heuristic_seed, HeuristicConfig};
pub use rules::{parse_rules, structural_rules, Atom, Rule, RuleSet, DEFAULT_RULES};

use crate::model::{FactKey, RelationInstance, Repository};

/// Incorrectness facts derivable from the current facts with the default
/// consistency rules.
pub fn check_consistency(repo: &Repository) -> Vec<RelationInstance> {
    check_consistency_with(repo, &RuleSet::default())
}

/// Incorrectness facts derivable by the consistency rules of `rules`.
///
/// Only facts of educational relations are read; stored incorrectness facts
/// are ignored and re-derived. A symmetric finding is reported once, in the
/// orientation its rule produced directly (or subject-first when both are).
pub fn check_consistency_with(repo: &Repository, rules: &RuleSet) -> Vec<RelationInstance> {
    let mut base = repo.clone();
    base.retain_facts(|f| !f.relation.is_incorrectness());
    let derived = engine::derive_only(&base, &rules.consistency_rules());

    let mut findings: BTreeMap<(FactKey, FactKey), RelationInstance> = BTreeMap::new();
    for fact in derived {
        let key = fact.key();
        let pair = match key.mirror() {
            Some(mirror) if mirror < key => (mirror, key),
            Some(mirror) => (key, mirror),
            None => (key.clone(), key),
        };
        let replace = match findings.get(&pair) {
            None => true,
            Some(current) => preference(&fact) < preference(current),
        };
        if replace {
            findings.insert(pair, fact);
        }
    }
    findings.into_values().collect()
}

fn preference(fact: &RelationInstance) -> (bool, FactKey) {
    let via_symmetry = fact
        .derivation
        .as_ref()
        .is_some_and(|d| d.rule.starts_with("sym_"));
    let key = fact.key();
    (via_symmetry, key)
}

/// Re-instantiates the rule named by `fact`'s derivation with its premises and
/// checks that it yields `fact` again.
pub fn replay_derivation(rules: &RuleSet, fact: &RelationInstance) -> bool {
    let Some(derivation) = &fact.derivation else {
        return false;
    };
    let Some(rule) = rules.get(&derivation.rule) else {
        return false;
    };
    if rule.body.len() != derivation.premises.len() {
        return false;
    }
    let mut binding: BTreeMap<&str, &crate::model::ObjectId> = BTreeMap::new();
    for (atom, premise) in rule.body.iter().zip(&derivation.premises) {
        if atom.relation != premise.relation {
            return false;
        }
        for (var, value) in [(&atom.left, &premise.subject), (&atom.right, &premise.object)] {
            if *binding.entry(var.as_str()).or_insert(value) != value {
                return false;
            }
        }
    }
    let head = &rule.head;
    head.relation == fact.relation
        && binding.get(head.left.as_str()) == Some(&&fact.subject)
        && binding.get(head.right.as_str()) == Some(&&fact.object)
}

/// Renders the derivation tree of `fact` down to non-inferred leaves.
pub fn render_derivation(repo: &Repository, fact: &RelationInstance) -> String {
    let mut out = String::new();
    let mut path = Vec::new();
    render_into(repo, fact, 0, &mut path, &mut out);
    out
}

fn render_into(
    repo: &Repository,
    fact: &RelationInstance,
    depth: usize,
    path: &mut Vec<FactKey>,
    out: &mut String,
) {
    use std::fmt::Write;

    let indent = "  ".repeat(depth);
    let origin = match &fact.derivation {
        Some(d) => d.rule.clone(),
        None => fact.provenance.to_string(),
    };
    let _ = writeln!(out, "{indent}{}  [{origin}]", fact.key());
    let Some(derivation) = &fact.derivation else {
        return;
    };
    path.push(fact.key());
    for premise in &derivation.premises {
        if path.contains(premise) {
            let _ = writeln!(out, "{indent}  {premise}  [see above]");
            continue;
        }
        match repo.fact(premise) {
            Some(p) => render_into(repo, p, depth + 1, path, out),
            None => {
                let _ = writeln!(out, "{indent}  {premise}  [missing]");
            }
        }
    }
    path.pop();
}
