mod common;

use anime_core::forge::{
    gen_access_control, gen_fattree, gen_isp, observe_subset, AccessControlSpec, AccessVariant, FatTreeSpec, IspSpec,
};
use anime_core::metrics::represented_size;
use anime_core::{
    evaluate, infer, infer_many, metrics, single_intent, text, BatchSize, FeatureKind, FeatureType, InferenceConfig,
    IntentSet, Ipv4Prefix, Label, Tbv,
};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn instance(seed: u64, kind: usize, n: usize) -> (FeatureType, Vec<Label>) {
    let mut r = rng(seed);
    let f = random_feature(&mut r, kind);
    let paths = (0..n).map(|_| random_concrete(&mut r, &f)).collect();
    (f, paths)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn join_is_an_upper_bound(seed: u64, kind in 0usize..7) {
        let (f, p) = instance(seed, kind, 3);
        let ab = f.join(&p[0], &p[1]);
        prop_assert!(f.contains(&ab));
        prop_assert!(f.leq(&p[0], &ab) && f.leq(&p[1], &ab));
        let abc = f.join(&ab, &p[2]);
        prop_assert!(f.leq(&ab, &abc) && f.leq(&p[2], &abc));
    }

    #[test]
    fn join_is_commutative_and_idempotent(seed: u64, kind in 0usize..7) {
        let (f, p) = instance(seed, kind, 2);
        let ab = f.join(&p[0], &p[1]);
        let ba = f.join(&p[1], &p[0]);
        prop_assert_eq!(f.cost::<f64>(&ab), f.cost::<f64>(&ba));
        if !f.has_hre() {
            prop_assert_eq!(&ab, &ba);
        }
        prop_assert_eq!(f.join(&p[0], &p[0]), p[0].clone());
        prop_assert_eq!(f.join(&ab, &ab), ab);
    }

    #[test]
    fn cost_grows_under_join(seed: u64, kind in 0usize..6) {
        let (f, p) = instance(seed, kind, 3);
        let ab = f.join(&p[0], &p[1]);
        let abc = f.join(&ab, &p[2]);
        prop_assert!(f.cost::<f64>(&p[0]) <= f.cost::<f64>(&ab));
        prop_assert!(f.cost::<f64>(&ab) <= f.cost::<f64>(&abc));
        prop_assert!(f.cost::<f64>(&abc) <= f.cost::<f64>(&f.top()));
        prop_assert_eq!(f.cost::<f64>(&p[0]), 1.0);
    }

    #[test]
    fn labels_round_trip_through_text(seed: u64, kind in 0usize..7) {
        let (f, p) = instance(seed, kind, 2);
        for l in [p[0].clone(), f.join(&p[0], &p[1]), f.top()] {
            let v = text::format_label(&f, &l);
            prop_assert_eq!(text::parse_label(&f, &v).unwrap(), l);
        }
        let v = text::format_path(&f, &p[0]);
        prop_assert_eq!(text::parse_path(&f, &v).unwrap(), p[0].clone());
    }

    #[test]
    fn tbv_card_matches_expansion(width in 1u32..9, value: u128, wild: u128) {
        let f = FeatureType::tbv("t", width).unwrap();
        let FeatureKind::Tbv(t) = f.kind() else { unreachable!() };
        let l = Tbv::new(value & t.full_mask(), wild & t.full_mask());
        let expanded: Vec<Tbv> = t.expand(&l).collect();
        prop_assert_eq!(expanded.len() as u128, t.card(&l));
        prop_assert!(expanded.iter().all(|x| t.leq(x, &l) && x.wild == 0));
    }

    #[test]
    fn prefix_join_is_the_longest_common_prefix(a: u32, b: u32) {
        let f = FeatureType::ipprefix("ip");
        let j = f.join(&Label::Prefix(Ipv4Prefix::host(a)), &Label::Prefix(Ipv4Prefix::host(b)));
        let Label::Prefix(p) = j else { unreachable!() };
        let common = (a ^ b).leading_zeros().min(32) as u8;
        prop_assert_eq!(p.len(), common);
        prop_assert!(p.contains(&Ipv4Prefix::host(a)) && p.contains(&Ipv4Prefix::host(b)));
        prop_assert_eq!(f.card(&j), Some(1u128 << (32 - common)));
    }

    #[test]
    fn inferred_intents_cover_every_path(seed: u64, kind in 0usize..7, n in 1usize..25, k in 1usize..8, b in 0usize..4) {
        let (f, paths) = instance(seed, kind, n);
        let batch = if b == 0 { BatchSize::Unlimited } else { BatchSize::Limited(b) };
        let r = infer::<f64>(&paths, &f, &InferenceConfig::new(k).batch(batch).seed(seed)).unwrap();
        prop_assert!(r.intents.len() <= k);
        prop_assert!(paths.iter().all(|p| r.intents.represents(&f, p)));
        let e = evaluate::<f64>(&f, &r.intents, &paths, metrics::DEFAULT_CAP).unwrap();
        prop_assert_eq!(e.recall, 1.0);
        prop_assert_eq!(e.fn_, 0);
    }

    #[test]
    fn one_sweep_matches_separate_runs(seed: u64, kind in 0usize..7, n in 2usize..25, b in 0usize..3) {
        let (f, paths) = instance(seed, kind, n);
        let batch = if b == 0 { BatchSize::Unlimited } else { BatchSize::Limited(b) };
        let config = InferenceConfig::new(1).batch(batch).seed(seed).trace(true);
        let ks = [6, 1, 3, 2, 9];
        let many = infer_many::<f64>(&paths, &f, &config, &ks).unwrap();
        for (k, m) in ks.iter().zip(&many) {
            let one = infer::<f64>(&paths, &f, &InferenceConfig { k: *k, ..config }).unwrap();
            prop_assert_eq!(one.intents.intents(), m.intents.intents());
            prop_assert_eq!(one.total_cost, m.total_cost);
            prop_assert_eq!(&one.assignments, &m.assignments);
            prop_assert_eq!(one.trace.len(), m.trace.len());
            prop_assert_eq!(one.stats, m.stats);
        }
    }

    #[test]
    fn generalizing_never_raises_precision(seed: u64, kind in 0usize..6, n in 2usize..20, k in 2usize..6) {
        let (f, paths) = instance(seed, kind, n);
        let r = infer::<f64>(&paths, &f, &InferenceConfig::new(k)).unwrap();
        let single = IntentSet::unbounded(&f, vec![single_intent(&paths, &f).unwrap()]).unwrap();
        let top = IntentSet::unbounded(&f, vec![f.top()]).unwrap();
        let p = |s: &IntentSet| evaluate::<f64>(&f, s, &paths, u128::MAX).unwrap().precision;
        prop_assert!(p(&single) <= p(&r.intents) + 1e-12);
        prop_assert!(p(&top) <= p(&single) + 1e-12);
    }

    #[test]
    fn size_bounds_never_undercount(seed: u64, kind in 0usize..7, n in 1usize..6) {
        let (f, paths) = instance(seed, kind, 2 * n);
        let intents: Vec<Label> = paths.chunks(2).map(|c| f.join(&c[0], &c[c.len() - 1])).collect();
        let exact = represented_size(&f, &intents, 1 << 24).unwrap();
        let capped = represented_size(&f, &intents, 1).unwrap();
        if exact.exact {
            prop_assert!(capped.count >= exact.count);
        }
        if capped.exact {
            prop_assert_eq!(capped.count, exact.count);
        }
    }

    #[test]
    fn hre_join_is_sound_on_samples(seed: u64) {
        let mut r = rng(seed);
        let base = random_dag(&mut r, "base", 2..=5, 0..=3);
        let d = r.gen_range(1..=6);
        let f = FeatureType::hre("path", base, d).unwrap();
        let h = f.as_hre().unwrap();
        let a = random_hre(&mut r, &f, d);
        let b = random_hre(&mut r, &f, d);
        let j = h.join(&a, &b);
        prop_assert!(h.contains(&j));
        prop_assert!(h.leq(&a, &j) && h.leq(&b, &j));
        for _ in 0..20 {
            let s = sample_accepted(&mut r, &f, &a);
            prop_assert!(h.accepts(&a, &s) && h.accepts(&j, &s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generated_observations_are_possible(seed: u64, rate in 0.05f64..=1.0) {
        let spec = AccessControlSpec { n: 40, g: 4, min_size: 3, max_size: 12, m: 6, seed };
        for variant in [AccessVariant::Hierarchical, AccessVariant::Flat] {
            let full = gen_access_control(&spec, variant).unwrap();
            let ds = observe_subset(&full, rate, seed).unwrap();
            prop_assert!(ds.observed.iter().all(|p| full.possible.contains(p)));
            prop_assert!(ds.possible.iter().all(|p| ds.feature.is_concrete(p)));
            let truth = IntentSet::unbounded(&ds.feature, ds.truth.clone()).unwrap();
            prop_assert!(ds.possible.iter().all(|p| truth.represents(&ds.feature, p)));
        }
        let isp = gen_isp(&IspSpec { nodes: 8, egresses: 2, destinations: 10, seed }).unwrap();
        prop_assert!(isp.observed.iter().all(|p| isp.possible.contains(p)));
    }

    #[test]
    fn generators_are_deterministic(seed: u64) {
        let spec = FatTreeSpec { c: 2, f: 1, p: 2, l: 2, r: 1, s: 1, g: 1, i: 1, d: 8, seed };
        let (a, b) = (gen_fattree(&spec).unwrap(), gen_fattree(&spec).unwrap());
        prop_assert_eq!(&a.observed, &b.observed);
        prop_assert_eq!(&a.possible, &b.possible);
        prop_assert!(a.observed.iter().all(|p| a.possible.contains(p)));
        let ac = AccessControlSpec { n: 30, g: 3, min_size: 3, max_size: 10, m: 5, seed };
        let (x, y) = (
            gen_access_control(&ac, AccessVariant::Hierarchical).unwrap(),
            gen_access_control(&ac, AccessVariant::Hierarchical).unwrap(),
        );
        prop_assert_eq!(&x.possible, &y.possible);
        prop_assert_eq!(&x.truth, &y.truth);
    }

    #[test]
    fn inference_is_deterministic_per_seed(seed: u64, kind in 0usize..7, b in 1usize..4) {
        let (f, paths) = instance(seed, kind, 20);
        let config = InferenceConfig::new(3).batch(BatchSize::Limited(b)).seed(seed);
        let r1 = infer::<f64>(&paths, &f, &config).unwrap();
        let r2 = infer::<f64>(&paths, &f, &config).unwrap();
        prop_assert_eq!(r1.intents.intents(), r2.intents.intents());
        prop_assert_eq!(r1.stats, r2.stats);
    }
}
