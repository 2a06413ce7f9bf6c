use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::NodeId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyNode {
    pub id: NodeId,
    pub label: String,
    #[serde(default)]
    pub parent: Option<NodeId>,
}

/// A classification hierarchy: a forest of labelled nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    nodes: BTreeMap<NodeId, TaxonomyNode>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Taxonomy {
    /// Builds a taxonomy, rejecting duplicate ids, dangling parents and cycles.
    pub fn new(nodes: impl IntoIterator<Item = TaxonomyNode>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for node in nodes {
            if map.contains_key(&node.id) {
                return Err(Error::DuplicateNode(node.id.0));
            }
            map.insert(node.id.clone(), node);
        }
        let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for node in map.values() {
            if let Some(parent) = &node.parent {
                if !map.contains_key(parent) {
                    return Err(Error::UnknownNode(parent.0.clone()));
                }
                children.entry(parent.clone()).or_default().push(node.id.clone());
            }
        }
        let taxonomy = Self {
            nodes: map,
            children,
        };
        // every node must reach a root within |nodes| steps
        for id in taxonomy.nodes.keys() {
            let mut cursor = taxonomy.nodes[id].parent.as_ref();
            let mut steps = 0;
            while let Some(parent) = cursor {
                steps += 1;
                if steps > taxonomy.nodes.len() {
                    return Err(Error::TaxonomyCycle(id.0.clone()));
                }
                cursor = taxonomy.nodes[parent].parent.as_ref();
            }
        }
        Ok(taxonomy)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &NodeId) -> Option<&TaxonomyNode> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TaxonomyNode> {
        self.nodes.values()
    }

    /// Nodes without a parent, sorted by id.
    pub fn roots(&self) -> Vec<&NodeId> {
        self.nodes
            .values()
            .filter(|n| n.parent.is_none())
            .map(|n| &n.id)
            .collect()
    }

    /// Direct children sorted by id.
    pub fn children(&self, id: &NodeId) -> &[NodeId] {
        self.children.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Strict ancestors, nearest first.
    pub fn ancestors(&self, id: &NodeId) -> Vec<&NodeId> {
        let mut out = Vec::new();
        let mut cursor = self.nodes.get(id).and_then(|n| n.parent.as_ref());
        while let Some(parent) = cursor {
            out.push(parent);
            cursor = self.nodes[parent].parent.as_ref();
        }
        out
    }

    /// `true` when `ancestor` lies strictly above `node`.
    pub fn is_strict_ancestor(&self, ancestor: &NodeId, node: &NodeId) -> bool {
        self.ancestors(node).into_iter().any(|a| a == ancestor)
    }

    pub fn depth(&self, id: &NodeId) -> usize {
        self.ancestors(id).len()
    }

    /// Breadth-first order from `start` (or from all roots), children visited
    /// in id order.
    pub fn breadth_first(&self, start: Option<&NodeId>) -> Result<Vec<&NodeId>> {
        let mut queue: VecDeque<&NodeId> = match start {
            Some(id) => {
                let (key, _) = self
                    .nodes
                    .get_key_value(id)
                    .ok_or_else(|| Error::UnknownNode(id.0.clone()))?;
                VecDeque::from([key])
            }
            None => self.roots().into(),
        };
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(id) = queue.pop_front() {
            order.push(id);
            queue.extend(self.children(id));
        }
        Ok(order)
    }

    /// `id` and every node below it.
    pub fn subtree(&self, id: &NodeId) -> Result<BTreeSet<&NodeId>> {
        Ok(self.breadth_first(Some(id))?.into_iter().collect())
    }
}
