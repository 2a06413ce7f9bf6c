use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{PatternTerm, Query};
use crate::store::{StatementStore, Term, Triple};

/// Query answers: one row per distinct assignment of the selected variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindingSet {
    pub vars: Vec<String>,
    /// Values in `vars` order; sorted and duplicate-free.
    pub rows: Vec<Vec<Term>>,
}

impl BindingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows as variable → value maps.
    pub fn row_maps(&self) -> Vec<BTreeMap<&str, &Term>> {
        self.rows
            .iter()
            .map(|row| self.vars.iter().map(String::as_str).zip(row).collect())
            .collect()
    }

    /// Values bound to `var`, in row order.
    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let index = self.vars.iter().position(|v| v == var)?;
        Some(self.rows.iter().map(|row| &row[index]).collect())
    }
}

/// Positional indexes over the store's triples.
struct Index<'a> {
    all: Vec<&'a Triple>,
    by_subject: HashMap<&'a Term, Vec<&'a Triple>>,
    by_predicate: HashMap<&'a Term, Vec<&'a Triple>>,
    by_object: HashMap<&'a Term, Vec<&'a Triple>>,
}

impl<'a> Index<'a> {
    fn new(store: &'a StatementStore) -> Self {
        let mut index = Index {
            all: Vec::with_capacity(store.len()),
            by_subject: HashMap::new(),
            by_predicate: HashMap::new(),
            by_object: HashMap::new(),
        };
        for t in store.triples() {
            index.all.push(t);
            index.by_subject.entry(&t.subject).or_default().push(t);
            index.by_predicate.entry(&t.predicate).or_default().push(t);
            index.by_object.entry(&t.object).or_default().push(t);
        }
        index
    }

    /// The smallest candidate list for the bound positions.
    fn candidates(&self, bound: [Option<&Term>; 3]) -> &[&'a Triple] {
        let maps = [&self.by_subject, &self.by_predicate, &self.by_object];
        let mut best: &[&Triple] = &self.all;
        for (map, term) in maps.into_iter().zip(bound) {
            if let Some(term) = term {
                let list = map.get(term).map_or(&[][..], Vec::as_slice);
                if list.len() < best.len() {
                    best = list;
                }
            }
        }
        best
    }
}

/// A pattern with variables replaced by slot numbers.
type Slot = Result<usize, Term>;

struct Join<'q, 'a> {
    index: &'q Index<'a>,
    patterns: Vec<[Slot; 3]>,
    projection: Vec<usize>,
    out: BTreeSet<Vec<Term>>,
}

impl<'a> Join<'_, 'a> {
    fn run(&mut self, depth: usize, binding: &mut Vec<Option<&'a Term>>) {
        let Some(pattern) = self.patterns.get(depth) else {
            self.out.insert(
                self.projection
                    .iter()
                    .map(|&slot| binding[slot].expect("selected variables occur in patterns").clone())
                    .collect(),
            );
            return;
        };
        let pattern = pattern.clone();
        let bound: [Option<&Term>; 3] = std::array::from_fn(|i| match &pattern[i] {
            Ok(slot) => binding[*slot],
            Err(term) => Some(term),
        });
        let index = self.index;
        for triple in index.candidates(bound) {
            let values = [&triple.subject, &triple.predicate, &triple.object];
            let mut newly_bound = Vec::new();
            let mut ok = true;
            for (slot, value) in pattern.iter().zip(values) {
                match slot {
                    Err(term) => ok = term == value,
                    Ok(slot) => match binding[*slot] {
                        Some(existing) => ok = existing == value,
                        None => {
                            binding[*slot] = Some(value);
                            newly_bound.push(*slot);
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.run(depth + 1, binding);
            }
            for slot in newly_bound {
                binding[slot] = None;
            }
        }
    }
}

/// All assignments of the selected variables under which every pattern is a
/// triple of the store. Patterns are joined left to right.
pub fn evaluate(store: &StatementStore, query: &Query) -> BindingSet {
    let vars = query.pattern_vars();
    let slot_of = |name: &str| vars.iter().position(|v| *v == name).expect("pattern variable");
    let patterns = query
        .patterns
        .iter()
        .map(|p| {
            p.positions().map(|t| match t {
                PatternTerm::Var(name) => Ok(slot_of(name)),
                PatternTerm::Term(term) => Err(term.clone()),
            })
        })
        .collect();
    let index = Index::new(store);
    let mut join = Join {
        index: &index,
        patterns,
        projection: query.select_vars.iter().map(|v| slot_of(v)).collect(),
        out: BTreeSet::new(),
    };
    join.run(0, &mut vec![None; vars.len()]);
    BindingSet {
        vars: query.select_vars.clone(),
        rows: join.out.into_iter().collect(),
    }
}
