//! Synthetic datasets: access-control pairs, ISP egress records and fat-tree
//! data-center paths, plus random observation subsets.

mod access;
mod fattree;
mod isp;

use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Result};
use crate::feature::FeatureType;
use crate::label::Label;

pub use access::{gen_access_control, AccessControlSpec, AccessVariant};
pub use fattree::{gen_fattree, FatTreeSpec};
pub use isp::{gen_isp, IspSpec};

#[derive(Debug, Clone)]
pub struct GeneratedDataset {
    pub feature: FeatureType,
    /// Every behavior allowed by the generating intents.
    pub possible: Vec<Label>,
    /// What the collector saw; a subset of `possible`.
    pub observed: Vec<Label>,
    /// The generating intents.
    pub truth: Vec<Label>,
}

/// Keeps `⌈rate·|observed|⌉` observed paths drawn without replacement, in their
/// original order. `possible` is untouched.
pub fn observe_subset(ds: &GeneratedDataset, rate: f64, seed: u64) -> Result<GeneratedDataset> {
    if !(rate > 0.0 && rate <= 1.0) {
        return usage(format!("observation rate must be in (0, 1], got {rate}"));
    }
    let n = ds.observed.len();
    let keep = ((rate * n as f64).ceil() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, keep).into_vec();
    picked.sort_unstable();
    Ok(GeneratedDataset {
        observed: picked.into_iter().map(|i| ds.observed[i].clone()).collect(),
        ..ds.clone()
    })
}

/// A label tree, collapsed into a DAG feature. Internal nodes with a single
/// child would duplicate that child's σ and are dropped.
pub(crate) struct Tree {
    pub name: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(name: impl Into<String>) -> Self {
        Tree {
            name: name.into(),
            children: Vec::new(),
        }
    }

    pub fn node(name: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree {
            name: name.into(),
            children,
        }
    }

    fn collapse(mut self) -> Self {
        self.children = self.children.into_iter().map(Tree::collapse).collect();
        if self.children.len() == 1 {
            let only = self.children.pop().expect("one child");
            return only;
        }
        self
    }
}

/// Builds the DAG feature and a map from every tree name (dropped ones
/// included) to the label that now carries its σ.
pub(crate) fn tree_feature(name: &str, root: Tree) -> Result<(FeatureType, HashMap<String, String>)> {
    let mut alias = HashMap::new();
    record_aliases(&root, &mut alias);
    let root_name = root.name.clone();
    let mut root = root.collapse();
    if root.children.is_empty() {
        // a single concrete label is its own top
        let (nodes, edges): (Vec<String>, Vec<(String, String)>) = (vec![root.name.clone()], vec![]);
        for v in alias.values_mut() {
            *v = root.name.clone();
        }
        return Ok((FeatureType::dag(name, &nodes, &edges)?, alias));
    }
    let collapsed_top = std::mem::replace(&mut root.name, root_name.clone());
    let mut edges = Vec::new();
    collect_edges(&root, &mut edges);
    for v in alias.values_mut() {
        if *v == collapsed_top {
            *v = root_name.clone();
        }
    }
    Ok((FeatureType::dag::<String>(name, &[], &edges)?, alias))
}

/// name -> representative: the node itself, or its single descendant along a
/// chain of one-child nodes.
fn record_aliases(t: &Tree, alias: &mut HashMap<String, String>) -> String {
    let reps: Vec<String> = t.children.iter().map(|c| record_aliases(c, alias)).collect();
    let rep = if reps.len() == 1 {
        reps[0].clone()
    } else {
        t.name.clone()
    };
    alias.insert(t.name.clone(), rep.clone());
    rep
}

fn collect_edges(t: &Tree, out: &mut Vec<(String, String)>) {
    for c in &t.children {
        out.push((t.name.clone(), c.name.clone()));
        collect_edges(c, out);
    }
}
