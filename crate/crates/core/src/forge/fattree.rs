//! Fat-tree data center: servers, leaves and spines per cluster, firewalls per
//! cluster, gateways and ISPs shared. One cluster is the DMZ.
//!
//! Device labels: `Any` > role (`Server`, `Leaf`, `Spine`, `Firewall`) >
//! per-cluster role (`Cl1Leaf`, `DMZServer`) > device, with `Gateway` and
//! `Internet` directly below `Any` and one `<cluster>Rack<n>` label per rack
//! between the per-cluster server label and the servers.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tree_feature, GeneratedDataset, Tree};
use crate::error::{usage, Error, Result};
use crate::feature::FeatureType;
use crate::label::{HreElement, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FatTreeSpec {
    /// Clusters, the last of which is the DMZ.
    pub c: usize,
    /// Firewalls per cluster.
    pub f: usize,
    /// Spines per cluster.
    pub p: usize,
    /// Leaves per cluster.
    pub l: usize,
    /// Racks per leaf.
    pub r: usize,
    /// Servers per rack.
    pub s: usize,
    /// Gateways.
    pub g: usize,
    /// ISPs.
    pub i: usize,
    /// HRE length bound; raised to the longest allowed path if shorter.
    pub d: usize,
    pub seed: u64,
}

struct Device {
    name: String,
    /// Per-cluster role label (`Cl1Spine`), or `Gateway` / `Internet`.
    group: String,
}

struct Topology {
    devices: Vec<Device>,
    adj: Vec<Vec<usize>>,
    /// Servers per cluster.
    servers: Vec<Vec<usize>>,
    isps: Vec<usize>,
}

fn cluster_name(spec: &FatTreeSpec, ci: usize) -> String {
    if ci + 1 == spec.c {
        "DMZ".to_string()
    } else {
        format!("Cl{}", ci + 1)
    }
}

const ROLES: [&str; 4] = ["Server", "Leaf", "Spine", "Firewall"];

impl Topology {
    fn build(spec: &FatTreeSpec) -> Self {
        let mut t = Topology {
            devices: Vec::new(),
            adj: Vec::new(),
            servers: Vec::new(),
            isps: Vec::new(),
        };
        let add = |t: &mut Topology, name: String, group: String| {
            t.devices.push(Device { name, group });
            t.adj.push(Vec::new());
            t.devices.len() - 1
        };
        let isps: Vec<usize> = (1..=spec.i)
            .map(|k| add(&mut t, format!("ISP{k}"), "Internet".into()))
            .collect();
        let gws: Vec<usize> = (1..=spec.g)
            .map(|k| add(&mut t, format!("Gateway{k}"), "Gateway".into()))
            .collect();
        let mut links = Vec::new();
        for &a in &isps {
            links.extend(gws.iter().map(|&b| (a, b)));
        }
        for ci in 0..spec.c {
            let cl = cluster_name(spec, ci);
            let stage = |t: &mut Topology, role: &str, count: usize| -> Vec<usize> {
                (1..=count)
                    .map(|k| add(t, format!("{cl}{role}{k}"), format!("{cl}{role}")))
                    .collect()
            };
            let fws = stage(&mut t, "Firewall", spec.f);
            let spines = stage(&mut t, "Spine", spec.p);
            let leaves = stage(&mut t, "Leaf", spec.l);
            let servers = stage(&mut t, "Server", spec.l * spec.r * spec.s);
            for &a in &gws {
                links.extend(fws.iter().map(|&b| (a, b)));
            }
            for &a in &fws {
                links.extend(spines.iter().map(|&b| (a, b)));
            }
            for &a in &spines {
                links.extend(leaves.iter().map(|&b| (a, b)));
            }
            let per_leaf = spec.r * spec.s;
            for (li, &leaf) in leaves.iter().enumerate() {
                links.extend(servers[li * per_leaf..(li + 1) * per_leaf].iter().map(|&b| (leaf, b)));
            }
            t.servers.push(servers);
        }
        for (a, b) in links {
            t.adj[a].push(b);
            t.adj[b].push(a);
        }
        t.isps = isps;
        t
    }

    /// Every minimum-hop path from `a` to `b`, in lexicographic device order.
    fn shortest_paths(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let mut dist = vec![usize::MAX; self.devices.len()];
        dist[a] = 0;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist[b] == usize::MAX {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut stack = vec![b];
        self.back(&dist, a, &mut stack, &mut out);
        out.sort();
        out
    }

    fn back(&self, dist: &[usize], a: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let u = *stack.last().expect("non-empty");
        if u == a {
            out.push(stack.iter().rev().copied().collect());
            return;
        }
        for &v in &self.adj[u] {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[u] {
                stack.push(v);
                self.back(dist, a, stack, out);
                stack.pop();
            }
        }
    }

    fn label_tree(&self, spec: &FatTreeSpec) -> Tree {
        let leaves_of = |group: &str| -> Vec<Tree> {
            self.devices
                .iter()
                .filter(|d| d.group == group)
                .map(|d| Tree::leaf(d.name.clone()))
                .collect()
        };
        let mut top = Vec::new();
        for role in ROLES {
            let per_cluster = (0..spec.c)
                .map(|ci| {
                    let g = format!("{}{role}", cluster_name(spec, ci));
                    let mut kids = leaves_of(&g);
                    if role == "Server" {
                        // servers of one rack share a leaf
                        let cl = cluster_name(spec, ci);
                        let mut racks = Vec::new();
                        while !kids.is_empty() {
                            let rest = kids.split_off(spec.s.min(kids.len()));
                            racks.push(Tree::node(format!("{cl}Rack{}", racks.len() + 1), kids));
                            kids = rest;
                        }
                        kids = racks;
                    }
                    Tree::node(g, kids)
                })
                .collect();
            top.push(Tree::node(role, per_cluster));
        }
        top.push(Tree::node("Gateway", leaves_of("Gateway")));
        top.push(Tree::node("Internet", leaves_of("Internet")));
        Tree::node("Any", top)
    }
}

/// Allowed ordered endpoint pairs: servers within a cluster (self included),
/// servers to ISPs, ISPs to DMZ servers, DMZ servers to servers of the other
/// clusters.
fn endpoint_pairs(t: &Topology) -> Vec<(usize, usize)> {
    let dmz = t.servers.len() - 1;
    let mut pairs = Vec::new();
    for cluster in &t.servers {
        for &a in cluster {
            pairs.extend(cluster.iter().map(|&b| (a, b)));
        }
    }
    for cluster in &t.servers {
        for &a in cluster {
            pairs.extend(t.isps.iter().map(|&b| (a, b)));
        }
    }
    for &a in &t.isps {
        pairs.extend(t.servers[dmz].iter().map(|&b| (a, b)));
    }
    for &a in &t.servers[dmz] {
        for cluster in &t.servers[..dmz] {
            pairs.extend(cluster.iter().map(|&b| (a, b)));
        }
    }
    pairs
}

pub fn gen_fattree(spec: &FatTreeSpec) -> Result<GeneratedDataset> {
    let counts = [spec.c, spec.f, spec.p, spec.l, spec.r, spec.s, spec.g, spec.i, spec.d];
    if counts.contains(&0) {
        return usage("fat-tree parameters must all be positive");
    }
    let topo = Topology::build(spec);
    let (base, alias) = tree_feature("device", topo.label_tree(spec))?;
    let dag = base.as_dag().expect("dag").clone();
    let device_label = |u: usize| Label::Node(dag.lookup(&topo.devices[u].name).expect("device"));
    let group_label = |u: usize| Label::Node(dag.lookup(&alias[&topo.devices[u].group]).expect("group"));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut possible = Vec::new();
    let mut observed = Vec::new();
    let mut shapes = BTreeSet::new();
    let mut longest = 0;
    for (a, b) in endpoint_pairs(&topo) {
        let paths = topo.shortest_paths(a, b);
        if paths.is_empty() {
            return Err(Error::Generation(format!(
                "no path from {} to {}",
                topo.devices[a].name, topo.devices[b].name
            )));
        }
        let pick = rng.gen_range(0..paths.len());
        for (k, path) in paths.iter().enumerate() {
            longest = longest.max(path.len());
            shapes.insert(path.iter().map(|&u| group_label(u)).collect::<Vec<_>>());
            let label = Label::hre_path(path.iter().map(|&u| device_label(u)));
            if k == pick {
                observed.push(label.clone());
            }
            possible.push(label);
        }
    }
    let feature = FeatureType::hre("path", base, spec.d.max(longest))?;
    let truth = shapes
        .into_iter()
        .map(|s| Label::hre(s.into_iter().map(HreElement::one)))
        .collect();
    Ok(GeneratedDataset {
        feature,
        possible,
        observed,
        truth,
    })
}
