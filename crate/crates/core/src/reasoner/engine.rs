//! Semi-naive forward chaining over interned ground facts.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::rules::{Rule, RuleSet};
use crate::error::Result;
use crate::model::{Derivation, FactKey, ObjectId, RelationInstance, RelationType, Repository};

/// Output of a closure run.
#[derive(Debug, Clone)]
pub struct ClosureResult {
    /// Input repository plus every inferred fact.
    pub repository: Repository,
    /// Semi-naive iterations, including the final one that found nothing new.
    pub rounds: usize,
    /// Number of facts inferred during this run.
    pub new_count: usize,
}

impl ClosureResult {
    pub fn facts(&self) -> impl Iterator<Item = &RelationInstance> {
        self.repository.facts()
    }
}

/// Least fixpoint of `rules` (plus the structural rules) over the facts of `repo`.
pub fn closure(repo: &Repository, rules: &RuleSet) -> ClosureResult {
    let mut engine = Engine::new(repo.clone(), rules.rules());
    let delta = engine.all_facts();
    let (rounds, new_count) = engine.saturate(delta);
    ClosureResult {
        repository: engine.repo,
        rounds,
        new_count,
    }
}

/// Adds `new_facts` to a repository that is already closed under `rules` and
/// re-closes it, seeding evaluation with the new facts only.
pub fn incremental_update(
    repo: &Repository,
    new_facts: impl IntoIterator<Item = RelationInstance>,
    rules: &RuleSet,
) -> Result<ClosureResult> {
    let mut next = repo.clone();
    let mut fresh = Vec::new();
    for fact in new_facts {
        let candidates: Vec<FactKey> = std::iter::once(fact.key()).chain(fact.key().mirror()).collect();
        let absent: Vec<FactKey> = candidates.into_iter().filter(|k| !next.contains(k)).collect();
        next.insert_fact(fact)?;
        fresh.extend(absent);
    }
    let mut engine = Engine::new(next, rules.rules());
    let delta = fresh.iter().map(|k| engine.intern_key(k)).collect();
    let (rounds, new_count) = engine.saturate(delta);
    Ok(ClosureResult {
        repository: engine.repo,
        rounds,
        new_count,
    })
}

/// Runs `rules` to fixpoint and returns the facts they add without touching
/// `repo` itself.
pub(crate) fn derive_only(repo: &Repository, rules: &[Rule]) -> Vec<RelationInstance> {
    let mut engine = Engine::new(repo.clone(), rules);
    let delta = engine.all_facts();
    engine.saturate(delta);
    engine.derived
}

type Fact = (RelationType, u32, u32);

#[derive(Default)]
struct RelationIndex {
    by_subject: HashMap<u32, Vec<u32>>,
    by_object: HashMap<u32, Vec<u32>>,
}

struct CompiledRule {
    id: String,
    body: Vec<(RelationType, usize, usize)>,
    head: (RelationType, usize, usize),
    vars: usize,
}

struct Engine {
    repo: Repository,
    rules: Vec<CompiledRule>,
    ids: Vec<ObjectId>,
    lookup: HashMap<ObjectId, u32>,
    known: std::collections::HashSet<Fact>,
    index: HashMap<RelationType, RelationIndex>,
    derived: Vec<RelationInstance>,
}

impl Engine {
    fn new(repo: Repository, rules: &[Rule]) -> Self {
        let rules = rules.iter().map(compile).collect();
        let mut engine = Self {
            repo,
            rules,
            ids: Vec::new(),
            lookup: HashMap::new(),
            known: Default::default(),
            index: HashMap::new(),
            derived: Vec::new(),
        };
        let keys: Vec<FactKey> = engine.repo.facts().map(RelationInstance::key).collect();
        for key in &keys {
            let fact = engine.intern_key(key);
            engine.remember(fact);
        }
        engine
    }

    fn intern(&mut self, id: &ObjectId) -> u32 {
        if let Some(&i) = self.lookup.get(id) {
            return i;
        }
        let i = self.ids.len() as u32;
        self.ids.push(id.clone());
        self.lookup.insert(id.clone(), i);
        i
    }

    fn intern_key(&mut self, key: &FactKey) -> Fact {
        (key.relation, self.intern(&key.subject), self.intern(&key.object))
    }

    fn key(&self, (relation, s, o): Fact) -> FactKey {
        FactKey {
            subject: self.ids[s as usize].clone(),
            relation,
            object: self.ids[o as usize].clone(),
        }
    }

    fn remember(&mut self, fact: Fact) -> bool {
        if !self.known.insert(fact) {
            return false;
        }
        let (relation, s, o) = fact;
        let index = self.index.entry(relation).or_default();
        index.by_subject.entry(s).or_default().push(o);
        index.by_object.entry(o).or_default().push(s);
        true
    }

    fn all_facts(&self) -> Vec<Fact> {
        let mut all: Vec<Fact> = self.known.iter().copied().collect();
        all.sort_unstable();
        all
    }

    /// Returns `(rounds, inferred)`.
    fn saturate(&mut self, mut delta: Vec<Fact>) -> (usize, usize) {
        let mut rounds = 0;
        let mut inferred = 0;
        loop {
            rounds += 1;
            delta.sort_unstable();
            delta.dedup();
            let mut by_relation: HashMap<RelationType, Vec<(u32, u32)>> = HashMap::new();
            for &(r, s, o) in &delta {
                by_relation.entry(r).or_default().push((s, o));
            }
            let mut pending: HashMap<Fact, (usize, Vec<Fact>)> = HashMap::new();
            let mut order: Vec<Fact> = Vec::new();
            for (rule_index, rule) in self.rules.iter().enumerate() {
                for (position, &(relation, left, right)) in rule.body.iter().enumerate() {
                    let Some(seeds) = by_relation.get(&relation) else {
                        continue;
                    };
                    for &(s, o) in seeds {
                        let mut binding = vec![None; rule.vars];
                        if !bind(&mut binding, left, s) || !bind(&mut binding, right, o) {
                            continue;
                        }
                        let mut premises = vec![(relation, 0, 0); rule.body.len()];
                        premises[position] = (relation, s, o);
                        self.join(rule, position, 0, &mut binding, &mut premises, &mut |head, premises| {
                            if let Entry::Vacant(slot) = pending.entry(head) {
                                slot.insert((rule_index, premises.to_vec()));
                                order.push(head);
                            }
                        });
                    }
                }
            }
            let mut next = Vec::new();
            for head in order {
                if self.known.contains(&head) {
                    continue;
                }
                let (rule_index, premises) = pending.remove(&head).expect("pending head");
                self.remember(head);
                let derivation = Derivation {
                    rule: self.rules[rule_index].id.clone(),
                    premises: premises.into_iter().map(|p| self.key(p)).collect(),
                };
                let fact = RelationInstance::inferred(self.key(head), derivation);
                self.repo.merge(fact.clone());
                self.derived.push(fact);
                inferred += 1;
                next.push(head);
            }
            if next.is_empty() {
                return (rounds, inferred);
            }
            delta = next;
        }
    }

    /// Extends `binding` over body atoms `step..`, skipping the seeded atom.
    fn join(
        &self,
        rule: &CompiledRule,
        seeded: usize,
        step: usize,
        binding: &mut Vec<Option<u32>>,
        premises: &mut Vec<Fact>,
        emit: &mut dyn FnMut(Fact, &[Fact]),
    ) {
        if step == rule.body.len() {
            let (relation, left, right) = rule.head;
            let head = (
                relation,
                binding[left].expect("range restricted"),
                binding[right].expect("range restricted"),
            );
            if !self.known.contains(&head) {
                emit(head, premises);
            }
            return;
        }
        if step == seeded {
            return self.join(rule, seeded, step + 1, binding, premises, emit);
        }
        let (relation, left, right) = rule.body[step];
        let Some(index) = self.index.get(&relation) else {
            return;
        };
        let mut visit = |s: u32, o: u32, binding: &mut Vec<Option<u32>>, premises: &mut Vec<Fact>| {
            let saved = (binding[left], binding[right]);
            if bind(binding, left, s) && bind(binding, right, o) {
                premises[step] = (relation, s, o);
                self.join(rule, seeded, step + 1, binding, premises, emit);
            }
            binding[left] = saved.0;
            binding[right] = saved.1;
        };
        match (binding[left], binding[right]) {
            (Some(s), Some(o)) => {
                if self.known.contains(&(relation, s, o)) {
                    visit(s, o, binding, premises);
                }
            }
            (Some(s), None) => {
                if let Some(objects) = index.by_subject.get(&s) {
                    for &o in objects {
                        visit(s, o, binding, premises);
                    }
                }
            }
            (None, Some(o)) => {
                if let Some(subjects) = index.by_object.get(&o) {
                    for &s in subjects {
                        visit(s, o, binding, premises);
                    }
                }
            }
            (None, None) => {
                let mut subjects: Vec<_> = index.by_subject.keys().copied().collect();
                subjects.sort_unstable();
                for s in subjects {
                    for &o in &index.by_subject[&s] {
                        visit(s, o, binding, premises);
                    }
                }
            }
        }
    }
}

fn bind(binding: &mut [Option<u32>], var: usize, value: u32) -> bool {
    match binding[var] {
        Some(bound) => bound == value,
        None => {
            binding[var] = Some(value);
            true
        }
    }
}

/// The variable `name` as borrowed from `rule` itself.
fn rule_var<'r>(rule: &'r Rule, name: &str) -> &'r str {
    rule.body
        .iter()
        .chain(std::iter::once(&rule.head))
        .flat_map(|a| [a.left.as_str(), a.right.as_str()])
        .find(|v| *v == name)
        .expect("variable occurs in its rule")
}

fn compile(rule: &Rule) -> CompiledRule {
    let mut names: Vec<&str> = Vec::new();
    let mut var = |name: &str| -> usize {
        match names.iter().position(|n| *n == name) {
            Some(i) => i,
            None => {
                names.push(rule_var(rule, name));
                names.len() - 1
            }
        }
    };
    let body = rule
        .body
        .iter()
        .map(|a| (a.relation, var(&a.left), var(&a.right)))
        .collect();
    let head = (rule.head.relation, var(&rule.head.left), var(&rule.head.right));
    CompiledRule {
        id: rule.id.clone(),
        body,
        head,
        vars: names.len(),
    }
}
