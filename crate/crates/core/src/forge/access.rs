//! "Server or group a can talk to server or group b" policies.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tree_feature, GeneratedDataset, Tree};
use crate::error::{usage, Result};
use crate::feature::{Component, FeatureType};
use crate::label::Label;

const SIZE_TRIES: usize = 10_000;

/// Maps an endpoint name to its label in one tuple component.
type LabelOf = Box<dyn Fn(&str) -> Label>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessControlSpec {
    pub n: usize,
    pub g: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub m: usize,
    pub seed: u64,
}

/// Which endpoint feature to emit. Both variants of one spec share groups,
/// intents and path order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessVariant {
    /// Servers below groups below `Any`.
    Hierarchical,
    /// Servers only, below `*`.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Endpoint {
    Group(usize),
    Server(usize),
}

pub fn gen_access_control(spec: &AccessControlSpec, variant: AccessVariant) -> Result<GeneratedDataset> {
    let AccessControlSpec {
        n,
        g,
        min_size,
        max_size,
        m,
        seed,
    } = *spec;
    if n == 0 || g == 0 || m == 0 || min_size == 0 || min_size > max_size {
        return usage("access-control spec needs n, g, m, min >= 1 and min <= max");
    }
    if g * min_size > n || n > g * max_size {
        return usage(format!(
            "cannot split {n} servers into {g} groups of size {min_size}..={max_size}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = group_sizes(&mut rng, n, g, min_size, max_size);
    let mut servers: Vec<usize> = (0..n).collect();
    servers.shuffle(&mut rng);
    let mut groups = Vec::with_capacity(g);
    let mut at = 0;
    for s in sizes {
        let mut members = servers[at..at + s].to_vec();
        members.sort_unstable();
        groups.push(members);
        at += s;
    }

    let mut drawn = BTreeSet::new();
    let mut intents = Vec::with_capacity(m);
    for _ in 0..m {
        let mut endpoint = || {
            if rng.gen_bool(0.5) {
                Endpoint::Group(rng.gen_range(0..g))
            } else {
                Endpoint::Server(rng.gen_range(0..n))
            }
        };
        let pair = (endpoint(), endpoint());
        if drawn.insert(pair) {
            intents.push(pair);
        }
    }
    let members = |e: Endpoint| match e {
        Endpoint::Group(i) => groups[i].clone(),
        Endpoint::Server(s) => vec![s],
    };
    let mut pairs = BTreeSet::new();
    for &(a, b) in &intents {
        for &x in &members(a) {
            for &y in &members(b) {
                pairs.insert((x, y));
            }
        }
    }

    let server_name = |s: usize| format!("S{}", s + 1);
    let group_name = |i: usize| format!("G{}", i + 1);
    let endpoint_feature = |fname: &str| -> Result<(FeatureType, LabelOf)> {
        match variant {
            AccessVariant::Hierarchical => {
                let tree = Tree::node(
                    "Any",
                    groups
                        .iter()
                        .enumerate()
                        .map(|(i, ms)| {
                            Tree::node(group_name(i), ms.iter().map(|&s| Tree::leaf(server_name(s))).collect())
                        })
                        .collect(),
                );
                let (f, alias) = tree_feature(fname, tree)?;
                let d = f.as_dag().expect("dag").clone();
                let lookup = move |name: &str| Label::Node(d.lookup(&alias[name]).expect("generated name"));
                Ok((f, Box::new(lookup)))
            }
            AccessVariant::Flat => {
                let names: Vec<String> = (0..n).map(server_name).collect();
                let f = FeatureType::flat(fname, &names)?;
                let d = f.as_dag().expect("flat").clone();
                Ok((
                    f,
                    Box::new(move |name: &str| Label::Node(d.lookup(name).expect("generated name"))),
                ))
            }
        }
    };
    let (src, src_label) = endpoint_feature("server")?;
    let (dst, dst_label) = endpoint_feature("server")?;
    let feature = FeatureType::tuple(
        "access",
        vec![
            Component {
                name: "src".into(),
                feature: src,
            },
            Component {
                name: "dst".into(),
                feature: dst,
            },
        ],
    )?;

    let possible: Vec<Label> = pairs
        .iter()
        .map(|&(x, y)| Label::tuple([src_label(&server_name(x)), dst_label(&server_name(y))]))
        .collect();
    let endpoint_labels = |e: Endpoint, label: &dyn Fn(&str) -> Label| -> Vec<Label> {
        match (variant, e) {
            (_, Endpoint::Server(s)) => vec![label(&server_name(s))],
            (AccessVariant::Hierarchical, Endpoint::Group(i)) => vec![label(&group_name(i))],
            (AccessVariant::Flat, Endpoint::Group(i)) => groups[i].iter().map(|&s| label(&server_name(s))).collect(),
        }
    };
    let mut truth = BTreeSet::new();
    for &(a, b) in &intents {
        for x in endpoint_labels(a, &*src_label) {
            for y in endpoint_labels(b, &*dst_label) {
                truth.insert(Label::tuple([x.clone(), y]));
            }
        }
    }
    Ok(GeneratedDataset {
        feature,
        observed: possible.clone(),
        possible,
        truth: truth.into_iter().collect(),
    })
}

/// Uniform sizes in `[lo, hi]` summing to `n`, by rejection; if that keeps
/// failing, start every group at `lo` and hand out the remainder one server
/// at a time to random groups with room left.
fn group_sizes(rng: &mut ChaCha8Rng, n: usize, g: usize, lo: usize, hi: usize) -> Vec<usize> {
    for _ in 0..SIZE_TRIES {
        let sizes: Vec<usize> = (0..g).map(|_| rng.gen_range(lo..=hi)).collect();
        if sizes.iter().sum::<usize>() == n {
            return sizes;
        }
    }
    let mut sizes = vec![lo; g];
    for _ in 0..n - g * lo {
        let open: Vec<usize> = (0..g).filter(|&i| sizes[i] < hi).collect();
        sizes[open[rng.gen_range(0..open.len())]] += 1;
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, g: usize, lo: usize, hi: usize, m: usize, seed: u64) -> AccessControlSpec {
        AccessControlSpec {
            n,
            g,
            min_size: lo,
            max_size: hi,
            m,
            seed,
        }
    }

    #[test]
    fn single_group_any_to_any() {
        // with one group every endpoint is a server or the whole set
        for seed in 0..20 {
            let ds = gen_access_control(&spec(4, 1, 4, 4, 1, seed), AccessVariant::Hierarchical).unwrap();
            let t = &ds.truth[0];
            if *t == ds.feature.top() {
                assert_eq!(ds.possible.len(), 16);
                return;
            }
        }
        panic!("no seed drew Any to Any");
    }

    #[test]
    fn possible_is_product_of_endpoint_sets() {
        let ds = gen_access_control(&spec(6, 2, 3, 3, 1, 11), AccessVariant::Hierarchical).unwrap();
        assert_eq!(ds.truth.len(), 1);
        let card = ds.feature.card(&ds.truth[0]).unwrap();
        assert_eq!(ds.possible.len() as u128, card);
    }

    #[test]
    fn variants_share_paths() {
        let s = spec(30, 3, 5, 15, 6, 3);
        let h = gen_access_control(&s, AccessVariant::Hierarchical).unwrap();
        let f = gen_access_control(&s, AccessVariant::Flat).unwrap();
        assert_eq!(h.possible.len(), f.possible.len());
        let show = |ds: &GeneratedDataset| -> Vec<String> {
            ds.possible
                .iter()
                .map(|p| crate::text::render(&ds.feature, p))
                .collect()
        };
        assert_eq!(show(&h), show(&f));
    }

    #[test]
    fn infeasible_bounds() {
        assert!(gen_access_control(&spec(10, 2, 6, 8, 1, 0), AccessVariant::Flat).is_err());
        assert!(gen_access_control(&spec(10, 2, 2, 4, 1, 0), AccessVariant::Flat).is_err());
    }

    #[test]
    fn group_sizes_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(n, g, lo, hi) in &[(100, 5, 5, 30), (10, 10, 1, 1), (97, 3, 30, 40)] {
            let s = group_sizes(&mut rng, n, g, lo, hi);
            assert_eq!(s.iter().sum::<usize>(), n);
            assert!(s.iter().all(|&x| (lo..=hi).contains(&x)));
        }
    }
}
