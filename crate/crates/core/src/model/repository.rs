use std::collections::{btree_map::Entry, BTreeMap, BTreeSet};

use super::{ELearningObject, FactKey, ObjectId, Provenance, RelationInstance, RelationType, Taxonomy};
use crate::error::{Error, Result};

/// Learning objects, their taxonomy and the relation facts between them.
///
/// Facts obey set semantics on `(subject, relation, object)` and the set is
/// kept closed under inversion: inserting `r(a,b)` also inserts
/// `inverse(r)(b,a)`. Operations that change the repository come in two
/// flavours: `insert_*` mutates in place, `add_*`/`with_*` return a new
/// snapshot and leave `self` untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Repository {
    objects: BTreeMap<ObjectId, ELearningObject>,
    taxonomy: Taxonomy,
    facts: BTreeMap<FactKey, RelationInstance>,
}

impl Repository {
    /// Validates objects against each other and the taxonomy.
    pub fn new(taxonomy: Taxonomy, objects: impl IntoIterator<Item = ELearningObject>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for object in objects {
            if map.contains_key(&object.id) {
                return Err(Error::DuplicateObject(object.id.0));
            }
            map.insert(object.id.clone(), object);
        }
        for object in map.values() {
            for node in &object.classifications {
                if !taxonomy.contains(node) {
                    return Err(Error::UnknownNode(node.0.clone()));
                }
            }
            for child in &object.children {
                if !map.contains_key(child) {
                    return Err(Error::UnknownObject(child.0.clone()));
                }
            }
        }
        check_nesting_acyclic(&map)?;
        Ok(Self {
            objects: map,
            taxonomy,
            facts: BTreeMap::new(),
        })
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn objects(&self) -> impl Iterator<Item = &ELearningObject> {
        self.objects.values()
    }

    pub fn object(&self, id: &ObjectId) -> Option<&ELearningObject> {
        self.objects.get(id)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// Facts in `(subject, relation, object)` order.
    pub fn facts(&self) -> impl Iterator<Item = &RelationInstance> {
        self.facts.values()
    }

    pub fn fact(&self, key: &FactKey) -> Option<&RelationInstance> {
        self.facts.get(key)
    }

    pub fn contains(&self, key: &FactKey) -> bool {
        self.facts.contains_key(key)
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn fact_keys(&self) -> BTreeSet<FactKey> {
        self.facts.keys().cloned().collect()
    }

    /// Adds a new object. Its children must already exist, which keeps the
    /// nesting acyclic.
    pub fn insert_object(&mut self, object: ELearningObject) -> Result<()> {
        if self.objects.contains_key(&object.id) {
            return Err(Error::DuplicateObject(object.id.0));
        }
        if let Some(node) = object.classifications.iter().find(|n| !self.taxonomy.contains(n)) {
            return Err(Error::UnknownNode(node.0.clone()));
        }
        if let Some(child) = object.children.iter().find(|c| !self.objects.contains_key(*c)) {
            return Err(Error::UnknownObject(child.0.clone()));
        }
        self.objects.insert(object.id.clone(), object);
        Ok(())
    }

    pub fn with_object(&self, object: ELearningObject) -> Result<Self> {
        let mut next = self.clone();
        next.insert_object(object)?;
        Ok(next)
    }

    /// Inserts a fact and its mirror. Returns how many previously absent
    /// facts were added (0, 1 or 2).
    ///
    /// A fact already present keeps the stronger of the two provenances.
    pub fn insert_fact(&mut self, fact: RelationInstance) -> Result<usize> {
        for id in [&fact.subject, &fact.object] {
            if !self.objects.contains_key(id) {
                return Err(Error::UnknownObject(id.0.clone()));
            }
        }
        fact.check_derivation()?;
        let mirror = fact.mirror();
        let mut added = usize::from(self.merge(fact));
        if let Some(mirror) = mirror {
            added += usize::from(self.merge(mirror));
        }
        Ok(added)
    }

    /// Snapshot variant of [`Repository::insert_fact`].
    pub fn add_fact(&self, fact: RelationInstance) -> Result<Self> {
        let mut next = self.clone();
        next.insert_fact(fact)?;
        Ok(next)
    }

    pub fn insert_facts(&mut self, facts: impl IntoIterator<Item = RelationInstance>) -> Result<usize> {
        let mut added = 0;
        for fact in facts {
            added += self.insert_fact(fact)?;
        }
        Ok(added)
    }

    /// Inserts without mirroring; the reasoner derives mirrors itself.
    pub(crate) fn merge(&mut self, fact: RelationInstance) -> bool {
        match self.facts.entry(fact.key()) {
            Entry::Vacant(slot) => {
                slot.insert(fact);
                true
            }
            Entry::Occupied(mut slot) => {
                if fact.provenance < slot.get().provenance {
                    slot.insert(fact);
                }
                false
            }
        }
    }

    pub(crate) fn retain_facts(&mut self, mut keep: impl FnMut(&RelationInstance) -> bool) {
        self.facts.retain(|_, f| keep(f));
    }

    /// Relation histogram over all facts.
    pub fn relation_histogram(&self) -> BTreeMap<RelationType, usize> {
        let mut histogram = BTreeMap::new();
        for key in self.facts.keys() {
            *histogram.entry(key.relation).or_insert(0) += 1;
        }
        histogram
    }

    pub fn provenance_count(&self, provenance: Provenance) -> usize {
        self.facts.values().filter(|f| f.provenance == provenance).count()
    }
}

fn check_nesting_acyclic(objects: &BTreeMap<ObjectId, ELearningObject>) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&ObjectId, Mark> = BTreeMap::new();
    for root in objects.keys() {
        if marks.contains_key(root) {
            continue;
        }
        // iterative DFS: (node, next child index)
        let mut stack = vec![(root, 0usize)];
        marks.insert(root, Mark::Open);
        while let Some((id, next)) = stack.pop() {
            let children = &objects[id].children;
            if next < children.len() {
                stack.push((id, next + 1));
                let child = &children[next];
                match marks.get(child) {
                    Some(Mark::Open) => return Err(Error::NestingCycle(child.0.clone())),
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(child, Mark::Open);
                        stack.push((child, 0));
                    }
                }
            } else {
                marks.insert(id, Mark::Done);
            }
        }
    }
    Ok(())
}

/// Facts every classified, structured repository implies on its own:
/// `hasPart(parent, child)` for each nesting edge and `isBroaderThan(x, y)`
/// whenever a classification of `x` lies strictly above a classification of
/// `y`. Mirrors are not included.
pub fn structural_and_taxonomic_facts(repo: &Repository) -> Vec<RelationInstance> {
    let mut out = Vec::new();
    for parent in repo.objects() {
        for child in &parent.children {
            out.push(RelationInstance::new(
                parent.id.clone(),
                RelationType::HasPart,
                child.clone(),
                Provenance::Structural,
            ));
        }
    }
    let taxonomy = repo.taxonomy();
    // node -> objects classified there
    let mut by_node: BTreeMap<_, Vec<&ObjectId>> = BTreeMap::new();
    for object in repo.objects() {
        for node in &object.classifications {
            by_node.entry(node).or_default().push(&object.id);
        }
    }
    let mut pairs = BTreeSet::new();
    for (node, narrower) in &by_node {
        for ancestor in taxonomy.ancestors(node) {
            let Some(broader) = by_node.get(ancestor) else {
                continue;
            };
            for x in broader {
                for y in narrower {
                    if x != y {
                        pairs.insert((*x, *y));
                    }
                }
            }
        }
    }
    out.extend(pairs.into_iter().map(|(x, y)| {
        RelationInstance::new(x.clone(), RelationType::IsBroaderThan, y.clone(), Provenance::Taxonomic)
    }));
    out
}

/// Returns `repo` extended by [`structural_and_taxonomic_facts`].
pub fn structural_and_taxonomic_seed(repo: &Repository) -> Result<Repository> {
    let mut next = repo.clone();
    next.insert_facts(structural_and_taxonomic_facts(repo))?;
    Ok(next)
}
