//! Brute-force references for tests: optimal inference on tiny instances and
//! represented-set enumeration by membership testing.

use std::cmp::Ordering;

use crate::error::{usage, Result};
use crate::feature::{FeatureType, IntentSet};
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Limit on |Σ_F|.
    pub max_labels: usize,
    /// Limit on distinct paths.
    pub max_paths: usize,
    /// Limit on the effective k (min of k and the path count).
    pub max_k: usize,
    /// Limit on concrete labels scanned by [`enumerate_represented`].
    pub max_universe: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_labels: 32,
            max_paths: 10,
            max_k: 4,
            max_universe: 1_000_000,
        }
    }
}

struct Search<'a> {
    paths: &'a [Label],
    /// (label, cost, which paths it covers), sorted by cost then label.
    candidates: Vec<(Label, f64, Vec<bool>)>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, chosen: &mut Vec<usize>, covered: &mut Vec<u32>, cost: f64, k: usize) {
        if let Some((b, _)) = &self.best {
            if cost > *b + 1e-9 {
                return;
            }
        }
        let Some(first) = covered.iter().position(|&c| c == 0) else {
            self.offer(cost, chosen);
            return;
        };
        if chosen.len() == k {
            return;
        }
        for ci in 0..self.candidates.len() {
            if !self.candidates[ci].2[first] || chosen.contains(&ci) {
                continue;
            }
            let c = self.candidates[ci].1;
            for (n, &hit) in covered.iter_mut().zip(&self.candidates[ci].2) {
                *n += u32::from(hit);
            }
            chosen.push(ci);
            self.run(chosen, covered, cost + c, k);
            chosen.pop();
            for (n, &hit) in covered.iter_mut().zip(&self.candidates[ci].2) {
                *n -= u32::from(hit);
            }
        }
    }

    fn offer(&mut self, cost: f64, chosen: &[usize]) {
        let mut labels: Vec<usize> = chosen.to_vec();
        labels.sort_by(|&a, &b| self.candidates[a].0.cmp(&self.candidates[b].0));
        let better = match &self.best {
            None => true,
            Some((b, cur)) => {
                if cost < b - 1e-9 {
                    true
                } else if cost > b + 1e-9 {
                    false
                } else {
                    let key = |v: &[usize]| v.iter().map(|&i| self.candidates[i].0.clone()).collect::<Vec<_>>();
                    key(&labels).cmp(&key(cur)) == Ordering::Less
                }
            }
        };
        if better {
            self.best = Some((cost, labels));
        }
    }
}

/// Minimum-cost set of at most `k` labels representing `paths`, by branch and
/// bound: the first uncovered path must be covered by one of the chosen
/// labels, so branching over its covers is exhaustive. Ties go to the smaller
/// sorted label list.
pub fn optimal_infer(paths: &[Label], feature: &FeatureType, k: usize, budget: &OracleBudget) -> Result<IntentSet> {
    if k == 0 {
        return usage("k must be at least 1");
    }
    let mut distinct: Vec<Label> = Vec::new();
    for p in paths {
        if !feature.is_concrete(p) {
            return usage(format!("path {p:?} is not concrete"));
        }
        if !distinct.contains(p) {
            distinct.push(p.clone());
        }
    }
    if distinct.is_empty() {
        return usage("optimal_infer needs at least one path");
    }
    if distinct.len() > budget.max_paths {
        return usage(format!(
            "{} paths exceed the oracle budget of {}",
            distinct.len(),
            budget.max_paths
        ));
    }
    let k = k.min(distinct.len());
    if k > budget.max_k {
        return usage(format!("k={k} exceeds the oracle budget of {}", budget.max_k));
    }
    let labels = feature.all_labels(budget.max_labels as u128).map_err(|_| {
        crate::Error::Usage(format!(
            "label universe exceeds the oracle budget of {}",
            budget.max_labels
        ))
    })?;
    let mut candidates: Vec<(Label, f64, Vec<bool>)> = labels
        .into_iter()
        .map(|l| {
            let hits = distinct.iter().map(|p| feature.leq(p, &l)).collect::<Vec<_>>();
            let c = feature.cost::<f64>(&l);
            (l, c, hits)
        })
        .filter(|(_, _, hits)| hits.iter().any(|&h| h))
        .collect();
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut search = Search {
        paths: &distinct,
        candidates,
        best: None,
    };
    let mut covered = vec![0u32; search.paths.len()];
    search.run(&mut Vec::new(), &mut covered, 0.0, k);
    let (_, chosen) = search.best.expect("the top label covers every path");
    let intents = chosen.into_iter().map(|i| search.candidates[i].0.clone()).collect();
    IntentSet::new(feature, intents, k)
}

/// Every concrete label represented by some intent, sorted, found by testing
/// each label of the concrete universe.
pub fn enumerate_represented(feature: &FeatureType, intents: &[Label], budget: &OracleBudget) -> Result<Vec<Label>> {
    for i in intents {
        feature.check(i)?;
    }
    if intents.is_empty() {
        return Ok(Vec::new());
    }
    let mut out: Vec<Label> = feature
        .concrete_universe(budget.max_universe)?
        .into_iter()
        .filter(|p| feature.represents(intents, p))
        .collect();
    out.sort();
    Ok(out)
}
