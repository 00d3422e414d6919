//! ISP egress records: `(organization, ingress, egress)`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GeneratedDataset;
use crate::error::{usage, Result};
use crate::feature::{Component, FeatureType};
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IspSpec {
    pub nodes: usize,
    pub egresses: usize,
    /// Number of destination organizations.
    pub destinations: usize,
    pub seed: u64,
}

/// Every organization leaves through one egress, whatever the ingress. One
/// record per (organization, ingress node).
pub fn gen_isp(spec: &IspSpec) -> Result<GeneratedDataset> {
    let IspSpec {
        nodes,
        egresses,
        destinations,
        seed,
    } = *spec;
    if nodes == 0 || egresses == 0 || destinations == 0 {
        return usage("ISP spec needs at least one node, egress and destination");
    }
    if egresses > nodes {
        return usage(format!("{egresses} egresses exceed {nodes} nodes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exits = index::sample(&mut rng, nodes, egresses).into_vec();
    exits.sort_unstable();
    let primary: Vec<usize> = (0..destinations).map(|_| exits[rng.gen_range(0..egresses)]).collect();

    let org_names: Vec<String> = (1..=destinations).map(|i| format!("O{i}")).collect();
    let node_names: Vec<String> = (1..=nodes).map(|i| format!("N{i}")).collect();
    let org = FeatureType::flat("organization", &org_names)?;
    let node = FeatureType::flat("node", &node_names)?;
    let feature = FeatureType::tuple(
        "egress",
        vec![
            Component {
                name: "organization".into(),
                feature: org.clone(),
            },
            Component {
                name: "ingress".into(),
                feature: node.clone(),
            },
            Component {
                name: "egress".into(),
                feature: node.clone(),
            },
        ],
    )?;
    let (od, nd) = (org.as_dag().expect("flat"), node.as_dag().expect("flat"));
    let o = |i: usize| Label::Node(od.leaves()[i]);
    let v = |i: usize| Label::Node(nd.leaves()[i]);

    let mut possible = Vec::with_capacity(destinations * nodes);
    let mut truth = Vec::with_capacity(destinations);
    for (d, &e) in primary.iter().enumerate() {
        for ingress in 0..nodes {
            possible.push(Label::tuple([o(d), v(ingress), v(e)]));
        }
        truth.push(Label::tuple([o(d), node.top(), v(e)]));
    }
    Ok(GeneratedDataset {
        feature,
        observed: possible.clone(),
        possible,
        truth,
    })
}
