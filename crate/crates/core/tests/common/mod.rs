//! Fixtures and random instance generators shared by the integration tests.
#![allow(dead_code)]

use anime_core::{Component, FeatureType, HreElement, Interval, Ipv4Prefix, Label, Tbv};
use rand::seq::SliceRandom;
use rand::Rng;
use std::ops::RangeInclusive;

pub fn dc() -> FeatureType {
    let edges = [
        ("Any", "User"),
        ("Any", "Firewall"),
        ("Any", "Server"),
        ("User", "U1"),
        ("User", "U2"),
        ("User", "U3"),
        ("Firewall", "FW1"),
        ("Firewall", "FW2"),
        ("Server", "S1"),
        ("Server", "S2"),
    ];
    FeatureType::dag::<&str>("device", &[], &edges).unwrap()
}

pub fn isp_devices() -> FeatureType {
    let edges = [
        ("Any", "Internal"),
        ("Any", "External"),
        ("Internal", "R1"),
        ("Internal", "R2"),
        ("Internal", "R3"),
        ("Internal", "R4"),
        ("Internal", "R5"),
        ("External", "AS1"),
        ("External", "AS2"),
    ];
    FeatureType::dag::<&str>("device", &[], &edges).unwrap()
}

pub fn node(f: &FeatureType, name: &str) -> Label {
    Label::Node(f.as_dag().unwrap().lookup(name).unwrap())
}

pub fn nodes(f: &FeatureType, names: &[&str]) -> Vec<Label> {
    names.iter().map(|n| node(f, n)).collect()
}

/// Random DAG over `leaves` concrete labels with up to `internal` grouping
/// labels (each a union of 2+ earlier labels) and a top.
pub fn random_dag<R: Rng>(
    rng: &mut R,
    name: &str,
    leaves: RangeInclusive<usize>,
    internal: RangeInclusive<usize>,
) -> FeatureType {
    loop {
        let leaves = rng.gen_range(leaves.clone());
        let internal = rng.gen_range(internal.clone());
        let mut names: Vec<String> = (1..=leaves).map(|i| format!("L{i}")).collect();
        let mut edges: Vec<(String, String)> = Vec::new();
        for g in 1..=internal {
            let pool = names.len();
            let size = rng.gen_range(2..=pool.min(4));
            let kids: Vec<usize> = rand::seq::index::sample(rng, pool, size).into_vec();
            let parent = format!("G{g}");
            for k in kids {
                edges.push((parent.clone(), names[k].clone()));
            }
            names.push(parent);
        }
        for n in &names {
            if !edges.iter().any(|(_, c)| c == n) {
                edges.push(("Top".into(), n.clone()));
            }
        }
        if let Ok(f) = FeatureType::dag::<String>(name, &[], &edges) {
            return f;
        }
    }
}

/// A small feature of kind `kind % 7`: dag, flat, tbv, ipprefix, range, tuple, hre.
pub fn random_feature<R: Rng>(rng: &mut R, kind: usize) -> FeatureType {
    match kind % 7 {
        0 => random_dag(rng, "dag", 2..=8, 0..=4),
        1 => {
            let n = rng.gen_range(1..=6);
            let vals: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
            FeatureType::flat("flat", &vals).unwrap()
        }
        2 => FeatureType::tbv("tbv", rng.gen_range(1..=8)).unwrap(),
        3 => FeatureType::ipprefix("ip"),
        4 => FeatureType::range("port", 0, rng.gen_range(1..=40)).unwrap(),
        5 => {
            let (ka, kb) = (rng.gen_range(0..5), rng.gen_range(0..5));
            let a = random_feature(rng, ka);
            let b = random_feature(rng, kb);
            FeatureType::tuple(
                "tuple",
                vec![
                    Component {
                        name: "a".into(),
                        feature: a,
                    },
                    Component {
                        name: "b".into(),
                        feature: b,
                    },
                ],
            )
            .unwrap()
        }
        _ => {
            let base = random_dag(rng, "base", 2..=5, 0..=2);
            FeatureType::hre("path", base, rng.gen_range(2..=5)).unwrap()
        }
    }
}

pub fn random_concrete<R: Rng>(rng: &mut R, f: &FeatureType) -> Label {
    use anime_core::FeatureKind::*;
    match f.kind() {
        Dag(d) | Flat(d) => Label::Node(*d.leaves().choose(rng).unwrap()),
        Tbv(t) => Label::Tbv(anime_core::Tbv::new(rng.gen::<u128>() & t.full_mask(), 0)),
        IpPrefix(_) => Label::Prefix(Ipv4Prefix::host(0x0A00_0000 | rng.gen_range(0..256u32))),
        Range(r) => Label::Range(Interval::point(rng.gen_range(r.domain().lo..=r.domain().hi))),
        Tuple(t) => Label::tuple(t.components().iter().map(|c| random_concrete(rng, &c.feature))),
        Hre(h) => {
            let leaves = h.base().as_dag().unwrap().leaves();
            let len = rng.gen_range(1..=h.max_len());
            Label::hre_path((0..len).map(|_| Label::Node(*leaves.choose(rng).unwrap())))
        }
    }
}

/// Random HRE of 1..=max_len elements over any base labels.
pub fn random_hre<R: Rng>(rng: &mut R, f: &FeatureType, max_len: usize) -> Vec<HreElement> {
    let h = f.as_hre().unwrap();
    let d = h.base().as_dag().unwrap();
    let labels: Vec<_> = d.nodes().collect();
    let len = rng.gen_range(1..=max_len.min(h.max_len()));
    (0..len)
        .map(|_| HreElement::new(Label::Node(*labels.choose(rng).unwrap()), rng.gen_bool(0.3)))
        .collect()
}

/// A uniformly shaped random string accepted by `h`: plus elements repeat
/// 1..=spare extra times, each token a random leaf under its element.
pub fn sample_accepted<R: Rng>(rng: &mut R, f: &FeatureType, h: &[HreElement]) -> Vec<HreElement> {
    let hf = f.as_hre().unwrap();
    let d = hf.base().as_dag().unwrap();
    let mut spare = hf.max_len() - h.len();
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.shuffle(rng);
    let mut reps = vec![1usize; h.len()];
    for i in order {
        if h[i].plus && spare > 0 {
            let extra = rng.gen_range(0..=spare);
            reps[i] += extra;
            spare -= extra;
        }
    }
    for (e, &r) in h.iter().zip(&reps) {
        let under: Vec<_> = d.sigma(e.label.as_node().unwrap()).collect();
        for _ in 0..r {
            out.push(HreElement::one(Label::Node(*under.choose(rng).unwrap())));
        }
    }
    out
}

pub fn tbv(s: &str) -> Label {
    let mut value = 0u128;
    let mut wild = 0u128;
    for (i, ch) in s.chars().rev().enumerate() {
        match ch {
            '1' => value |= 1 << i,
            'x' => wild |= 1 << i,
            _ => {}
        }
    }
    Label::Tbv(Tbv::new(value, wild))
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}
