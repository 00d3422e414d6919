use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::label::NodeId;

/// Fixed-size bitset (leaf sets of a DAG, automaton state sets).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn empty(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub(crate) fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub(crate) fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub(crate) fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// A finite hierarchy of named labels. Each node stands for the set of leaves
/// reachable from it; leaves are the concrete labels.
///
/// Also backs flat features, which are the two-level special case.
#[derive(Debug, Clone)]
pub struct DagFeature {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    children: Vec<Vec<NodeId>>,
    leaves: Vec<NodeId>,
    leaf_pos: Vec<Option<usize>>,
    sigma: Vec<BitSet>,
    top: NodeId,
    /// All nodes ordered by (|σ|, name); the first superset found in a scan is the
    /// minimal-cost one with the name tie-break applied.
    by_cost: Vec<NodeId>,
}

impl DagFeature {
    /// Builds a DAG from parent→child edges. `nodes` may list extra names (e.g.
    /// isolated leaves); every edge endpoint is added implicitly.
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut intern = |name: &str, names: &mut Vec<String>| -> NodeId {
            if let Some(&id) = index.get(name) {
                return id;
            }
            let id = NodeId(names.len() as u32);
            names.push(name.to_string());
            index.insert(name.to_string(), id);
            id
        };
        for n in nodes {
            intern(n.as_ref(), &mut names);
        }
        let mut children: Vec<Vec<NodeId>> = Vec::new();
        let mut edge_ids = Vec::with_capacity(edges.len());
        for (p, c) in edges {
            let p = intern(p.as_ref(), &mut names);
            let c = intern(c.as_ref(), &mut names);
            edge_ids.push((p, c));
        }
        children.resize(names.len(), Vec::new());
        for (p, c) in edge_ids {
            if p == c {
                return Err(Error::InvalidFeature(format!("self-loop on '{}'", names[p.index()])));
            }
            if !children[p.index()].contains(&c) {
                children[p.index()].push(c);
            }
        }
        if names.is_empty() {
            return Err(Error::InvalidFeature("DAG has no nodes".into()));
        }
        Self::from_parts(names, children)
    }

    /// Flat feature: a synthetic greatest element named `*` above every value.
    /// A single-value flat feature has no separate `*` label; the value is the top.
    pub fn flat<S: AsRef<str>>(values: &[S]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for v in values {
            if v.as_ref() == "*" {
                return Err(Error::InvalidFeature("flat value may not be named '*'".into()));
            }
            if !seen.insert(v.as_ref()) {
                return Err(Error::InvalidFeature(format!("duplicate flat value '{}'", v.as_ref())));
            }
        }
        match values.len() {
            0 => Err(Error::InvalidFeature("flat feature needs at least one value".into())),
            1 => Self::new(values, &[]),
            _ => {
                let edges: Vec<(&str, &str)> = values.iter().map(|v| ("*", v.as_ref())).collect();
                let nodes = ["*"];
                Self::new(&nodes, &edges)
            }
        }
    }

    fn from_parts(names: Vec<String>, children: Vec<Vec<NodeId>>) -> Result<Self> {
        let n = names.len();
        let order = topo_order(&children).ok_or_else(|| Error::InvalidFeature("graph has a cycle".into()))?;

        let leaves: Vec<NodeId> = (0..n)
            .filter(|&i| children[i].is_empty())
            .map(|i| NodeId(i as u32))
            .collect();
        let mut leaf_pos = vec![None; n];
        for (pos, leaf) in leaves.iter().enumerate() {
            leaf_pos[leaf.index()] = Some(pos);
        }

        // children before parents
        let mut sigma = vec![BitSet::empty(leaves.len()); n];
        for &v in order.iter().rev() {
            if let Some(pos) = leaf_pos[v] {
                sigma[v].insert(pos);
            } else {
                let mut acc = BitSet::empty(leaves.len());
                for c in &children[v] {
                    acc.union_with(&sigma[c.index()]);
                }
                sigma[v] = acc;
            }
        }

        let mut seen: HashMap<&BitSet, usize> = HashMap::new();
        for (i, s) in sigma.iter().enumerate() {
            if let Some(&j) = seen.get(s) {
                return Err(Error::InvalidFeature(format!(
                    "labels '{}' and '{}' represent the same set",
                    names[j], names[i]
                )));
            }
            seen.insert(s, i);
        }

        let top = (0..n)
            .find(|&i| sigma[i].len() == leaves.len())
            .map(|i| NodeId(i as u32))
            .ok_or_else(|| Error::InvalidFeature("no label covers every leaf".into()))?;

        let mut by_cost: Vec<NodeId> = (0..n).map(|i| NodeId(i as u32)).collect();
        by_cost.sort_by(|a, b| {
            sigma[a.index()]
                .len()
                .cmp(&sigma[b.index()].len())
                .then_with(|| names[a.index()].cmp(&names[b.index()]))
        });

        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), NodeId(i as u32)))
            .collect();
        Ok(DagFeature {
            names,
            index,
            children,
            leaves,
            leaf_pos,
            sigma,
            top,
            by_cost,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn top(&self) -> NodeId {
        self.top
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.index() < self.names.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(|i| NodeId(i as u32))
    }

    pub fn children(&self, n: NodeId) -> &[NodeId] {
        &self.children[n.index()]
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn is_leaf(&self, n: NodeId) -> bool {
        self.leaf_pos[n.index()].is_some()
    }

    pub fn leaf_index(&self, n: NodeId) -> Option<usize> {
        self.leaf_pos[n.index()]
    }

    pub fn leq(&self, a: NodeId, b: NodeId) -> bool {
        a == b || self.sigma[a.index()].is_subset(&self.sigma[b.index()])
    }

    pub fn card(&self, n: NodeId) -> u128 {
        self.sigma[n.index()].len() as u128
    }

    pub(crate) fn leaf_set(&self, n: NodeId) -> &BitSet {
        &self.sigma[n.index()]
    }

    pub fn sigma(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.sigma[n.index()].iter().map(|pos| self.leaves[pos])
    }

    /// Least-cost label whose set contains both inputs; ties go to the smaller name.
    pub fn join(&self, a: NodeId, b: NodeId) -> NodeId {
        if self.leq(a, b) {
            return b;
        }
        if self.leq(b, a) {
            return a;
        }
        let mut union = self.sigma[a.index()].clone();
        union.union_with(&self.sigma[b.index()]);
        self.smallest_superset(&union)
    }

    pub(crate) fn smallest_superset(&self, set: &BitSet) -> NodeId {
        let need = set.len();
        self.by_cost
            .iter()
            .copied()
            .find(|v| self.sigma[v.index()].len() >= need && set.is_subset(&self.sigma[v.index()]))
            .unwrap_or(self.top)
    }

    /// Parent→child edges in node order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |p| self.children[p.index()].iter().map(move |&c| (p, c)))
    }
}

/// Kahn's algorithm; `None` if the graph has a cycle. Parents precede children.
fn topo_order(children: &[Vec<NodeId>]) -> Option<Vec<usize>> {
    let n = children.len();
    let mut indeg = vec![0usize; n];
    for cs in children {
        for c in cs {
            indeg[c.index()] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for c in &children[v] {
            indeg[c.index()] -= 1;
            if indeg[c.index()] == 0 {
                stack.push(c.index());
            }
        }
    }
    (order.len() == n).then_some(order)
}
