//! Union automaton over a list of HREs, explored with on-the-fly subset
//! construction. Used for distinct-string counting, enumeration and inclusion.

use std::collections::HashMap;

use super::{node, HreFeature};
use crate::error::{Error, Result};
use crate::label::{HreElement, Label, NodeId};
use crate::library::{BitSet, DagFeature};

/// Result of counting represented strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HreCount {
    pub count: u128,
    /// `false` when `count` is an upper bound (sum of per-HRE accepting runs).
    pub exact: bool,
}

/// State `q` of HRE `h` means "the first `s` elements are matched". Entering
/// `s + 1` consumes a token below element `s`; a plus element `s - 1` may
/// consume further tokens while staying in `s`.
struct Nfa<'a> {
    dag: &'a DagFeature,
    advance: Vec<Option<NodeId>>,
    stay: Vec<Option<NodeId>>,
    /// Minimum tokens still needed to accept from each state.
    needed: Vec<usize>,
    start: BitSet,
    accepting: BitSet,
}

impl<'a> Nfa<'a> {
    fn new(f: &'a HreFeature, hs: &[&[HreElement]]) -> Self {
        let total: usize = hs.iter().map(|h| h.len() + 1).sum();
        let mut advance = Vec::with_capacity(total);
        let mut stay = Vec::with_capacity(total);
        let mut needed = Vec::with_capacity(total);
        let mut start = BitSet::empty(total);
        let mut accepting = BitSet::empty(total);
        for h in hs {
            let n = h.len();
            for s in 0..=n {
                let q = advance.len();
                advance.push((s < n).then(|| node(&h[s].label)));
                stay.push((s >= 1 && h[s - 1].plus).then(|| node(&h[s - 1].label)));
                needed.push(n - s);
                if s == 0 {
                    start.insert(q);
                }
                if s == n {
                    accepting.insert(q);
                }
            }
        }
        Nfa {
            dag: f.dag(),
            advance,
            stay,
            needed,
            start,
            accepting,
        }
    }

    fn len(&self) -> usize {
        self.advance.len()
    }

    /// Successor set on leaf position `leaf`, dropping states that cannot accept
    /// within `budget` further tokens.
    fn step(&self, set: &BitSet, leaf: usize, budget: usize) -> BitSet {
        let mut out = BitSet::empty(self.len());
        for q in set.iter() {
            if let Some(l) = self.advance[q] {
                if self.needed[q + 1] <= budget && self.dag.leaf_set(l).contains(leaf) {
                    out.insert(q + 1);
                }
            }
            if let Some(l) = self.stay[q] {
                if self.needed[q] <= budget && self.dag.leaf_set(l).contains(leaf) {
                    out.insert(q);
                }
            }
        }
        out
    }

    fn accepts(&self, set: &BitSet) -> bool {
        set.intersects(&self.accepting)
    }

    fn leaf_count(&self) -> usize {
        self.dag.leaves().len()
    }
}

pub(super) fn count(f: &HreFeature, hs: &[&[HreElement]], cap: usize) -> HreCount {
    let nfa = Nfa::new(f, hs);
    let mut memo: HashMap<(BitSet, usize), u128> = HashMap::new();
    match count_from(&nfa, nfa.start.clone(), f.max_len(), &mut memo, cap) {
        Some(count) => HreCount { count, exact: true },
        None => HreCount {
            count: hs.iter().fold(0u128, |acc, h| acc.saturating_add(run_count(f, h))),
            exact: false,
        },
    }
}

/// Strings of length `0..=budget` leading from `set` into acceptance.
fn count_from(
    nfa: &Nfa,
    set: BitSet,
    budget: usize,
    memo: &mut HashMap<(BitSet, usize), u128>,
    cap: usize,
) -> Option<u128> {
    if set.is_empty() {
        return Some(0);
    }
    let key = (set, budget);
    if let Some(&v) = memo.get(&key) {
        return Some(v);
    }
    let (set, _) = &key;
    let mut total = u128::from(nfa.accepts(set));
    if budget > 0 {
        // group tokens by successor set
        let mut groups: HashMap<BitSet, u128> = HashMap::new();
        for leaf in 0..nfa.leaf_count() {
            let next = nfa.step(set, leaf, budget - 1);
            if !next.is_empty() {
                *groups.entry(next).or_insert(0) += 1;
            }
        }
        let mut groups: Vec<(BitSet, u128)> = groups.into_iter().collect();
        groups.sort();
        for (next, mult) in groups {
            let sub = count_from(nfa, next, budget - 1, memo, cap)?;
            total = total.saturating_add(sub.saturating_mul(mult));
        }
    }
    if memo.len() >= cap {
        return None;
    }
    memo.insert(key, total);
    Some(total)
}

/// Number of accepting runs of length `1..=d`: an upper bound on distinct strings.
fn run_count(f: &HreFeature, h: &[HreElement]) -> u128 {
    let dag = f.dag();
    let n = h.len();
    let d = f.max_len();
    // runs[s][r]: runs from state s using at most r further tokens
    let mut runs = vec![vec![0u128; d + 1]; n + 1];
    for r in 0..=d {
        for s in (0..=n).rev() {
            let mut v = u128::from(s == n);
            if r > 0 {
                if s < n {
                    let w = dag.card(node(&h[s].label));
                    v = v.saturating_add(w.saturating_mul(runs[s + 1][r - 1]));
                }
                if s >= 1 && h[s - 1].plus {
                    let w = dag.card(node(&h[s - 1].label));
                    v = v.saturating_add(w.saturating_mul(runs[s][r - 1]));
                }
            }
            runs[s][r] = v;
        }
    }
    runs[0][d]
}

pub(super) fn enumerate(f: &HreFeature, hs: &[&[HreElement]], cap: u128) -> Result<Vec<Label>> {
    for h in hs {
        if !f.contains(h) {
            return Err(Error::Usage("HRE does not belong to this feature".into()));
        }
    }
    let nfa = Nfa::new(f, hs);
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    walk(&nfa, &nfa.start, f.max_len(), &mut prefix, &mut out, cap)?;
    out.sort();
    Ok(out)
}

fn walk(
    nfa: &Nfa,
    set: &BitSet,
    budget: usize,
    prefix: &mut Vec<NodeId>,
    out: &mut Vec<Label>,
    cap: u128,
) -> Result<()> {
    if !prefix.is_empty() && nfa.accepts(set) {
        if out.len() as u128 >= cap {
            return Err(Error::Overflow { cap });
        }
        out.push(Label::hre_path(prefix.iter().map(|&n| Label::Node(n))));
    }
    if budget == 0 {
        return Ok(());
    }
    for (leaf, &id) in nfa.dag.leaves().iter().enumerate() {
        let next = nfa.step(set, leaf, budget - 1);
        if next.is_empty() {
            continue;
        }
        prefix.push(id);
        walk(nfa, &next, budget - 1, prefix, out, cap)?;
        prefix.pop();
    }
    Ok(())
}

/// `Acc(a) ⊆ Acc(b)`: searches for a string accepted by `a` but not by `b`.
pub(super) fn included(f: &HreFeature, a: &[HreElement], b: &[HreElement]) -> bool {
    let na = Nfa::new(f, &[a]);
    let nb = Nfa::new(f, &[b]);
    // (a-set, b-set) -> largest budget already explored from there
    let mut seen: HashMap<(BitSet, BitSet), usize> = HashMap::new();
    let mut stack = vec![(na.start.clone(), nb.start.clone(), f.max_len())];
    while let Some((sa, sb, budget)) = stack.pop() {
        if na.accepts(&sa) && !nb.accepts(&sb) {
            return false;
        }
        if budget == 0 {
            continue;
        }
        match seen.get(&(sa.clone(), sb.clone())) {
            Some(&b) if b >= budget => continue,
            _ => {
                seen.insert((sa.clone(), sb.clone()), budget);
            }
        }
        for leaf in 0..na.leaf_count() {
            let next_a = na.step(&sa, leaf, budget - 1);
            if next_a.is_empty() {
                continue;
            }
            // b keeps every state: it may still need tokens a does not supply
            let next_b = nb.step(&sb, leaf, usize::MAX);
            stack.push((next_a, next_b, budget - 1));
        }
    }
    true
}
