//! Precision / recall of an intent set against a reference set of paths.
//!
//! TP and FN only need membership tests. FP needs the size of the union of the
//! represented sets; that is computed exactly where the feature allows it and
//! otherwise replaced by a flagged upper bound.

use std::collections::{HashMap, HashSet};

use crate::error::{usage, Result};
use crate::feature::{FeatureKind, FeatureType, IntentSet};
use crate::label::Label;
use crate::library::BitSet;
use crate::scalar::Scalar;

/// Default limit on concrete values materialized per evaluation.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// Size of a represented set; `exact == false` marks an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Represented {
    pub count: u128,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentCoverage {
    pub intent: Label,
    /// Reference paths this intent represents.
    pub reference_hits: usize,
    /// |σ(intent)|, or an upper bound.
    pub size: Represented,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<S> {
    pub tp: u128,
    pub fn_: u128,
    pub fp: u128,
    /// `false` when `fp` is an upper bound.
    pub fp_exact: bool,
    pub precision: S,
    pub recall: S,
    pub f_score: S,
    pub per_intent: Vec<IntentCoverage>,
}

impl<S: Scalar> EvalReport<S> {
    /// Ratios from raw counts: precision is 1 with nothing represented, recall
    /// is 1 against an empty reference, F is 0 if either ratio is 0.
    pub fn from_counts(tp: u128, fn_: u128, fp: u128, fp_exact: bool) -> Self {
        let ratio = |num: u128, den: u128| {
            if den == 0 {
                S::one()
            } else {
                S::from_count(num) / S::from_count(den)
            }
        };
        let precision = ratio(tp, tp.saturating_add(fp));
        let recall = ratio(tp, tp + fn_);
        let f_score = if precision <= S::zero() || recall <= S::zero() {
            S::zero()
        } else {
            let two = S::one() + S::one();
            two * precision * recall / (precision + recall)
        };
        EvalReport {
            tp,
            fn_,
            fp,
            fp_exact,
            precision,
            recall,
            f_score,
            per_intent: Vec::new(),
        }
    }
}

/// Scores `intents` against the reference paths (treated as a set).
pub fn evaluate<S: Scalar>(
    feature: &FeatureType,
    intents: &IntentSet,
    reference: &[Label],
    cap: u128,
) -> Result<EvalReport<S>> {
    for i in intents.intents() {
        feature.check(i)?;
    }
    let mut seen = HashSet::with_capacity(reference.len());
    let mut refs: Vec<&Label> = Vec::with_capacity(reference.len());
    for p in reference {
        if !feature.is_concrete(p) {
            return usage(format!(
                "reference path {p:?} is not a concrete label of '{}'",
                feature.name()
            ));
        }
        if seen.insert(p) {
            refs.push(p);
        }
    }

    let list = intents.intents();
    let mut hits = vec![0usize; list.len()];
    let mut tp: u128 = 0;
    for p in &refs {
        let mut covered = false;
        for (h, i) in hits.iter_mut().zip(list) {
            if feature.leq(p, i) {
                *h += 1;
                covered = true;
            }
        }
        tp += u128::from(covered);
    }
    let fn_ = refs.len() as u128 - tp;
    let size = represented_size(feature, list, cap)?;
    let fp = size.count.saturating_sub(tp);

    let mut report = EvalReport::from_counts(tp, fn_, fp, size.exact);
    report.per_intent = list
        .iter()
        .zip(hits)
        .map(|(i, reference_hits)| {
            Ok(IntentCoverage {
                intent: i.clone(),
                reference_hits,
                size: label_size(feature, i, cap)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(report)
}

/// |σ(l)| for one label. HRE components are counted through the union automaton.
pub fn label_size(feature: &FeatureType, l: &Label, cap: u128) -> Result<Represented> {
    if let Some(count) = feature.card(l) {
        return Ok(Represented { count, exact: true });
    }
    match (feature.kind(), l) {
        (FeatureKind::Hre(h), Label::Hre(els)) => {
            let c = h.count(&[els], memo_cap(cap))?;
            Ok(Represented {
                count: c.count,
                exact: c.exact,
            })
        }
        (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
            let mut acc = Represented { count: 1, exact: true };
            for (c, p) in t.components().iter().zip(parts.iter()) {
                let s = label_size(&c.feature, p, cap)?;
                acc.count = acc.count.saturating_mul(s.count);
                acc.exact &= s.exact;
            }
            Ok(acc)
        }
        _ => {
            feature.check(l)?;
            unreachable!("card is defined for every other kind")
        }
    }
}

fn memo_cap(cap: u128) -> usize {
    usize::try_from(cap).unwrap_or(usize::MAX)
}

/// |⋃ σ(i)| over the intents.
pub fn represented_size(feature: &FeatureType, intents: &[Label], cap: u128) -> Result<Represented> {
    let exact = |count| Ok(Represented { count, exact: true });
    if intents.is_empty() {
        return exact(0);
    }
    for i in intents {
        feature.check(i)?;
    }
    match feature.kind() {
        FeatureKind::Dag(d) | FeatureKind::Flat(d) => {
            let mut acc = BitSet::empty(d.leaves().len());
            for i in intents {
                acc.union_with(d.leaf_set(i.as_node().expect("checked")));
            }
            exact(acc.len() as u128)
        }
        FeatureKind::IpPrefix(_) => exact(interval_union(intents.iter().map(|i| match i {
            Label::Prefix(p) => {
                let (lo, hi) = p.bounds();
                (i128::from(lo), i128::from(hi))
            }
            _ => unreachable!("checked"),
        }))),
        FeatureKind::Range(_) => exact(interval_union(intents.iter().map(|i| match i {
            Label::Range(r) => (i128::from(r.lo), i128::from(r.hi)),
            _ => unreachable!("checked"),
        }))),
        FeatureKind::Hre(h) => {
            let els: Vec<&[crate::label::HreElement]> = intents.iter().map(|i| i.as_hre().expect("checked")).collect();
            let c = h.count(&els, memo_cap(cap))?;
            Ok(Represented {
                count: c.count,
                exact: c.exact,
            })
        }
        FeatureKind::Tbv(_) | FeatureKind::Tuple(_) => {
            let mut sizes = Vec::with_capacity(intents.len());
            for i in intents {
                sizes.push(label_size(feature, i, cap)?);
            }
            let bound = sizes.iter().fold(0u128, |acc, s| acc.saturating_add(s.count));
            let all_exact = sizes.iter().all(|s| s.exact);
            if let Some(count) = tuple_union_by_atoms(feature, intents, cap) {
                return exact(count);
            }
            let universe = feature.universe_size();
            if all_exact && bound <= cap && universe.is_none_or(|u| bound <= u) {
                let mut union: HashSet<Label> = HashSet::with_capacity(bound as usize);
                for i in intents {
                    union.extend(feature.sigma(i, cap)?);
                }
                return exact(union.len() as u128);
            }
            if let Some(u) = universe.filter(|&u| u <= cap) {
                let count = feature
                    .concrete_universe(u)?
                    .iter()
                    .filter(|p| feature.represents(intents, p))
                    .count();
                return exact(count as u128);
            }
            Ok(Represented {
                count: bound,
                exact: false,
            })
        }
    }
}

/// Values of one component grouped by the set of intents whose component label
/// covers them: `(group size, intent signature)`. Uncovered values are dropped.
type Atoms = Vec<(u128, BitSet)>;

fn atoms(feature: &FeatureType, labels: &[&Label], cap: u128) -> Option<Atoms> {
    let m = labels.len();
    let group = |sigs: Vec<(BitSet, u128)>| {
        let mut by_sig: HashMap<BitSet, u128> = HashMap::new();
        for (sig, n) in sigs {
            if !sig.is_empty() {
                *by_sig.entry(sig).or_insert(0) += n;
            }
        }
        let mut out: Atoms = by_sig.into_iter().map(|(s, n)| (n, s)).collect();
        out.sort_unstable_by(|a, b| a.1.cmp(&b.1));
        out
    };
    match feature.kind() {
        FeatureKind::Dag(d) | FeatureKind::Flat(d) => {
            let sets: Vec<&BitSet> = labels
                .iter()
                .map(|l| d.leaf_set(l.as_node().expect("checked")))
                .collect();
            let sigs = (0..d.leaves().len())
                .map(|leaf| {
                    let mut sig = BitSet::empty(m);
                    for (i, s) in sets.iter().enumerate() {
                        if s.contains(leaf) {
                            sig.insert(i);
                        }
                    }
                    (sig, 1)
                })
                .collect();
            Some(group(sigs))
        }
        FeatureKind::IpPrefix(_) | FeatureKind::Range(_) => {
            let spans: Vec<(i128, i128)> = labels
                .iter()
                .map(|l| match l {
                    Label::Prefix(p) => {
                        let (lo, hi) = p.bounds();
                        (i128::from(lo), i128::from(hi))
                    }
                    Label::Range(r) => (i128::from(r.lo), i128::from(r.hi)),
                    _ => unreachable!("checked"),
                })
                .collect();
            let mut cuts: Vec<i128> = spans.iter().flat_map(|&(lo, hi)| [lo, hi + 1]).collect();
            cuts.sort_unstable();
            cuts.dedup();
            let sigs = cuts
                .windows(2)
                .map(|w| {
                    let mut sig = BitSet::empty(m);
                    for (i, &(lo, hi)) in spans.iter().enumerate() {
                        if lo <= w[0] && w[0] <= hi {
                            sig.insert(i);
                        }
                    }
                    (sig, (w[1] - w[0]) as u128)
                })
                .collect();
            Some(group(sigs))
        }
        FeatureKind::Tbv(t) => {
            let total = labels.iter().fold(0u128, |acc, l| match l {
                Label::Tbv(v) => acc.saturating_add(t.card(v)),
                _ => unreachable!("checked"),
            });
            if total > cap {
                return None;
            }
            let mut by_value: HashMap<u128, BitSet> = HashMap::new();
            for (i, l) in labels.iter().enumerate() {
                if let Label::Tbv(v) = l {
                    for x in t.expand(v) {
                        by_value.entry(x.value).or_insert_with(|| BitSet::empty(m)).insert(i);
                    }
                }
            }
            Some(group(by_value.into_values().map(|s| (s, 1)).collect()))
        }
        FeatureKind::Tuple(_) | FeatureKind::Hre(_) => None,
    }
}

/// Exact union size for a tuple feature: a combination of per-component atoms
/// is covered iff the intersection of their signatures is non-empty. Gives up
/// (None) when a component has no atom decomposition or the search exceeds `cap`.
fn tuple_union_by_atoms(feature: &FeatureType, intents: &[Label], cap: u128) -> Option<u128> {
    let t = feature.as_tuple()?;
    let mut per_component = Vec::with_capacity(t.components().len());
    for (ci, c) in t.components().iter().enumerate() {
        let labels: Vec<&Label> = intents.iter().map(|i| &i.as_tuple().expect("checked")[ci]).collect();
        per_component.push(atoms(&c.feature, &labels, cap)?);
    }
    let mut full = BitSet::empty(intents.len());
    for i in 0..intents.len() {
        full.insert(i);
    }
    let mut budget = cap;
    covered_combinations(&per_component, full, &mut budget)
}

fn covered_combinations(rest: &[Atoms], sig: BitSet, budget: &mut u128) -> Option<u128> {
    let Some((first, rest)) = rest.split_first() else {
        return Some(1);
    };
    let mut total: u128 = 0;
    for (n, s) in first {
        *budget = budget.checked_sub(1)?;
        let mut next = sig.clone();
        next.intersect_with(s);
        if next.is_empty() {
            continue;
        }
        total = total.saturating_add(n.saturating_mul(covered_combinations(rest, next, budget)?));
    }
    Some(total)
}

/// Number of integers covered by a union of closed intervals.
fn interval_union(it: impl Iterator<Item = (i128, i128)>) -> u128 {
    let mut v: Vec<(i128, i128)> = it.collect();
    v.sort_unstable();
    let mut total: u128 = 0;
    let mut cur: Option<(i128, i128)> = None;
    for (lo, hi) in v {
        match cur {
            Some((clo, chi)) if lo <= chi + 1 => cur = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += (chi - clo + 1) as u128;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = cur {
        total += (chi - clo + 1) as u128;
    }
    total
}
