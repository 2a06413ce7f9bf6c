//! Graphviz export of a repository's semantic net.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::model::{ObjectId, RelationType, Repository};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DotOptions {
    /// Draw only one direction of each inverse pair (`hasPart`, not also
    /// `isPartOf`).
    pub dedup_inverse: bool,
    pub include_incorrect: bool,
}

impl Default for DotOptions {
    fn default() -> Self {
        Self {
            dedup_inverse: true,
            include_incorrect: true,
        }
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// The edges `export_dot` draws: `(from, relation, to)`, sorted.
pub fn dot_edges(repo: &Repository, options: DotOptions) -> BTreeSet<(&ObjectId, RelationType, &ObjectId)> {
    repo.facts()
        .filter(|f| options.include_incorrect || !f.relation.is_incorrectness())
        .filter(|f| {
            if f.relation.is_symmetric() {
                f.subject <= f.object
            } else {
                !options.dedup_inverse || f.relation.is_canonical_direction()
            }
        })
        .map(|f| (&f.subject, f.relation, &f.object))
        .collect()
}

/// A `digraph` with one node per object (labelled with its title) and one
/// labelled edge per drawn fact. Symmetric relations appear once without an
/// arrow head; incorrectness findings are red and dashed.
pub fn export_dot(repo: &Repository, options: DotOptions) -> String {
    let mut out = String::from("digraph semnet {\n");
    for object in repo.objects() {
        let label = if object.title.is_empty() { object.id.as_str() } else { &object.title };
        writeln!(out, "  {} [label={}];", quote(object.id.as_str()), quote(label)).unwrap();
    }
    for (from, relation, to) in dot_edges(repo, options) {
        let mut attrs = format!("label={}", quote(relation.name()));
        if relation.is_symmetric() {
            attrs.push_str(", dir=none");
        }
        if relation.is_incorrectness() {
            attrs.push_str(", color=red, style=dashed");
        }
        writeln!(out, "  {} -> {} [{attrs}];", quote(from.as_str()), quote(to.as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}
