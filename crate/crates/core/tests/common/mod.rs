//! Helpers shared by the integration tests: fixture access, random
//! repositories, and a brute-force rule evaluator that shares no code with
//! the library's engine.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semnet::model::{ELearningObject, FactKey, RelationInstance, RelationType, Repository, Taxonomy};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The eighteen educational relation names, spelled out independently of the
/// library's enum.
pub const EDUCATIONAL: [&str; 18] = [
    "hasPart",
    "isPartOf",
    "hasVersion",
    "isVersionOf",
    "isFormatOf",
    "references",
    "isReferencedBy",
    "isBasedOn",
    "isBasisFor",
    "requires",
    "isRequiredBy",
    "isNarrowerThan",
    "isBroaderThan",
    "isAlternativeTo",
    "illustrates",
    "isIllustratedBy",
    "isLessSpecificThan",
    "isMoreSpecificThan",
];

pub type Fact = (String, String, String);

pub fn fact(s: &str, r: &str, o: &str) -> Fact {
    (s.to_owned(), r.to_owned(), o.to_owned())
}

pub fn key_tuple(key: &FactKey) -> Fact {
    (key.subject.to_string(), key.relation.to_string(), key.object.to_string())
}

pub fn fact_set(repo: &Repository) -> BTreeSet<Fact> {
    repo.fact_keys().iter().map(key_tuple).collect()
}

/// A rule as read by [`parse_rule_text`]: body atoms and head, each
/// `(relation, left variable, right variable)`.
#[derive(Debug, Clone)]
pub struct PlainRule {
    pub id: String,
    pub body: Vec<(String, String, String)>,
    pub head: (String, String, String),
}

fn plain_atom(text: &str) -> (String, String, String) {
    let text = text.trim();
    let open = text.find('(').expect("atom has `(`");
    let inner = text[open + 1..].strip_suffix(')').expect("atom ends with `)`");
    let (l, r) = inner.split_once(',').expect("atom has two arguments");
    (text[..open].trim().to_owned(), l.trim().to_owned(), r.trim().to_owned())
}

/// Minimal reader for the rule file format, independent of the library parser.
pub fn parse_rule_text(text: &str) -> Vec<PlainRule> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let (id, rest) = line.split_once(':').expect("rule id");
            let (body, head) = rest.split_once("=>").expect("rule arrow");
            PlainRule {
                id: id.trim().to_owned(),
                body: body.split('&').map(plain_atom).collect(),
                head: plain_atom(head),
            }
        })
        .collect()
}

/// Saturate-until-stable: every round tries every rule under every
/// assignment of objects to its variables, until a round adds nothing.
pub fn naive_saturation(objects: &[String], seed: &BTreeSet<Fact>, rules: &[PlainRule]) -> BTreeSet<Fact> {
    let index = |name: &str| objects.iter().position(|o| o == name).expect("known object") as u16;
    let relations: Vec<String> = {
        let mut names: BTreeSet<String> = seed.iter().map(|f| f.1.clone()).collect();
        for rule in rules {
            names.extend(rule.body.iter().map(|a| a.0.clone()));
            names.insert(rule.head.0.clone());
        }
        names.into_iter().collect()
    };
    let rel = |name: &str| relations.iter().position(|r| r == name).unwrap() as u16;
    let mut known: HashSet<(u16, u16, u16)> = seed.iter().map(|(s, r, o)| (index(s), rel(r), index(o))).collect();

    struct Compiled {
        body: Vec<(u16, usize, usize)>,
        head: (u16, usize, usize),
        vars: usize,
    }
    let compiled: Vec<Compiled> = rules
        .iter()
        .map(|rule| {
            let mut vars: Vec<String> = Vec::new();
            let mut var = |v: &str| match vars.iter().position(|x| x == v) {
                Some(i) => i,
                None => {
                    vars.push(v.to_owned());
                    vars.len() - 1
                }
            };
            let body = rule.body.iter().map(|(r, l, rr)| (rel(r), var(l), var(rr))).collect();
            let head = (rel(&rule.head.0), var(&rule.head.1), var(&rule.head.2));
            Compiled { body, head, vars: vars.len() }
        })
        .collect();

    let n = objects.len() as u16;
    loop {
        let mut fresh = Vec::new();
        for rule in &compiled {
            let mut assignment = vec![0u16; rule.vars];
            let total = (n as usize).pow(rule.vars as u32);
            for code in 0..total {
                let mut c = code;
                for slot in assignment.iter_mut() {
                    *slot = (c % n as usize) as u16;
                    c /= n as usize;
                }
                if rule
                    .body
                    .iter()
                    .all(|&(r, l, rr)| known.contains(&(assignment[l], r, assignment[rr])))
                {
                    let head = (assignment[rule.head.1], rule.head.0, assignment[rule.head.2]);
                    if !known.contains(&head) {
                        fresh.push(head);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        known.extend(fresh);
    }
    known
        .into_iter()
        .map(|(s, r, o)| (objects[s as usize].clone(), relations[r as usize].clone(), objects[o as usize].clone()))
        .collect()
}

pub fn object_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("o{i}")).collect()
}

pub fn bare_repository(ids: &[String]) -> Repository {
    Repository::new(Taxonomy::default(), ids.iter().map(|id| ELearningObject::new(id.as_str(), id.as_str()))).unwrap()
}

/// Random asserted facts over `ids` drawn from `relations`.
pub fn random_facts(rng: &mut ChaCha8Rng, ids: &[String], relations: &[&str], max: usize) -> Vec<RelationInstance> {
    let count = rng.gen_range(0..=max);
    (0..count)
        .map(|_| {
            let s = ids.choose(rng).unwrap();
            let o = ids.choose(rng).unwrap();
            let r: RelationType = relations.choose(rng).unwrap().parse().unwrap();
            RelationInstance::asserted(s.as_str(), r, o.as_str())
        })
        .collect()
}

/// A random repository: up to `max_objects` objects and up to `max_facts`
/// asserted educational facts.
pub fn random_repository(seed: u64, max_objects: usize, max_facts: usize) -> (Vec<String>, Vec<RelationInstance>, Repository) {
    let mut rng = rng(seed);
    let ids = object_ids(rng.gen_range(1..=max_objects));
    let facts = random_facts(&mut rng, &ids, &EDUCATIONAL, max_facts);
    let mut repo = bare_repository(&ids);
    repo.insert_facts(facts.clone()).unwrap();
    (ids, facts, repo)
}

/// The counterpart relation of `relation`: its inverse, or itself when
/// symmetric.
pub fn counterpart(relation: &str) -> &'static str {
    const PAIRS: [(&str, &str); 8] = [
        ("hasPart", "isPartOf"),
        ("hasVersion", "isVersionOf"),
        ("references", "isReferencedBy"),
        ("isBasedOn", "isBasisFor"),
        ("requires", "isRequiredBy"),
        ("isNarrowerThan", "isBroaderThan"),
        ("illustrates", "isIllustratedBy"),
        ("isLessSpecificThan", "isMoreSpecificThan"),
    ];
    const SYMMETRIC: [&str; 4] = ["isFormatOf", "isAlternativeTo", "incorrectPart", "incorrectFormatVersion"];
    for (a, b) in PAIRS {
        if relation == a {
            return b;
        }
        if relation == b {
            return a;
        }
    }
    SYMMETRIC
        .into_iter()
        .find(|s| *s == relation)
        .unwrap_or_else(|| panic!("unknown relation {relation}"))
}

pub fn mirrored(f: &Fact) -> Fact {
    (f.2.clone(), counterpart(&f.1).to_owned(), f.0.clone())
}
