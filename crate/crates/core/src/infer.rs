//! Intent inference by agglomerative clustering.
//!
//! Every distinct path starts as its own cluster. The distance between two
//! clusters is how much the representation cost grows when they are merged:
//! `δ(⊔(a, b)) − δ(a) − δ(b)`, where the merged representative is the pairwise
//! join of the two current representatives. Distances are only computed for a
//! random batch of `b` partner clusters whenever a cluster is formed; the
//! candidates live in one global min-queue with lazy deletion.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Error, Result};
use crate::feature::{FeatureType, IntentSet};
use crate::label::Label;
use crate::scalar::Scalar;

/// Number of partner clusters sampled per cluster event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BatchSize {
    Limited(usize),
    Unlimited,
}

impl BatchSize {
    fn partners(self, live: usize) -> usize {
        let others = live.saturating_sub(1);
        match self {
            BatchSize::Limited(b) => b.min(others),
            BatchSize::Unlimited => others,
        }
    }
}

impl fmt::Display for BatchSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchSize::Limited(b) => write!(f, "{b}"),
            BatchSize::Unlimited => f.write_str("all"),
        }
    }
}

impl FromStr for BatchSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "unlimited" | "inf" => Ok(BatchSize::Unlimited),
            _ => match s.parse::<usize>() {
                Ok(0) | Err(_) => Err(Error::Parse(format!(
                    "batch size must be a positive integer or 'all', got '{s}'"
                ))),
                Ok(b) => Ok(BatchSize::Limited(b)),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceConfig {
    pub k: usize,
    pub batch: BatchSize,
    pub seed: u64,
    /// Keep merging below `k` clusters while a merge does not increase cost.
    pub merge_nonpositive: bool,
    pub trace: bool,
}

impl InferenceConfig {
    pub fn new(k: usize) -> Self {
        InferenceConfig {
            k,
            batch: BatchSize::Unlimited,
            seed: 0,
            merge_nonpositive: true,
            trace: false,
        }
    }

    pub fn batch(mut self, batch: BatchSize) -> Self {
        self.batch = batch;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn merge_nonpositive(mut self, yes: bool) -> Self {
        self.merge_nonpositive = yes;
        self
    }

    pub fn trace(mut self, yes: bool) -> Self {
        self.trace = yes;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Cluster<S> {
    pub id: usize,
    /// Indices into the deduplicated path list.
    pub members: Vec<usize>,
    pub representative: Label,
    pub rep_cost: S,
}

#[derive(Debug, Clone)]
pub struct MergeCandidate<S> {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub distance: S,
    pub joined: Label,
    pub joined_cost: S,
}

impl<S: Scalar> MergeCandidate<S> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        let ids = |c: &Self| (c.cluster_a.min(c.cluster_b), c.cluster_a.max(c.cluster_b));
        self.distance
            .total_order(&other.distance)
            .then_with(|| self.joined_cost.total_order(&other.joined_cost))
            .then_with(|| ids(self).cmp(&ids(other)))
    }
}

impl<S: Scalar> PartialEq for MergeCandidate<S> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for MergeCandidate<S> {}

impl<S: Scalar> PartialOrd for MergeCandidate<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for MergeCandidate<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

/// One merge, as recorded in the trace.
#[derive(Debug, Clone)]
pub struct MergeStep<S> {
    pub step: usize,
    pub merged: (usize, usize),
    pub new_id: usize,
    pub distance: S,
    pub representative: Label,
    /// Live clusters after the merge.
    pub live: usize,
    /// Sum of representative costs over live clusters after the merge.
    pub total_cost: S,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InferenceStats {
    pub distinct_paths: usize,
    pub queue_pushes: usize,
    pub queue_pops: usize,
    pub merges: usize,
    pub resamples: usize,
}

impl InferenceStats {
    pub fn queue_ops(&self) -> usize {
        self.queue_pushes + self.queue_pops
    }
}

#[derive(Debug, Clone)]
pub struct InferenceResult<S> {
    pub intents: IntentSet,
    /// For every input path (duplicates included), the index of its intent.
    pub assignments: Vec<usize>,
    /// Distinct member paths per intent.
    pub member_counts: Vec<usize>,
    pub total_cost: S,
    pub trace: Vec<MergeStep<S>>,
    pub stats: InferenceStats,
}

/// Merge candidate for two distinct clusters.
pub fn cluster_distance<S: Scalar>(a: &Cluster<S>, b: &Cluster<S>, feature: &FeatureType) -> Result<MergeCandidate<S>> {
    if a.id == b.id {
        return usage("distance of a cluster to itself is undefined");
    }
    Ok(candidate(feature, a, b))
}

fn candidate<S: Scalar>(feature: &FeatureType, a: &Cluster<S>, b: &Cluster<S>) -> MergeCandidate<S> {
    let joined = feature.join(&a.representative, &b.representative);
    let joined_cost: S = feature.cost(&joined);
    MergeCandidate {
        cluster_a: a.id,
        cluster_b: b.id,
        distance: joined_cost - (a.rep_cost + b.rep_cost),
        joined,
        joined_cost,
    }
}

/// The single intent covering every path: a join over all of them.
pub fn single_intent(paths: &[Label], feature: &FeatureType) -> Result<Label> {
    if paths.is_empty() {
        return usage("single intent of an empty path set");
    }
    feature.join_all(paths)
}

struct Engine<'a, S> {
    feature: &'a FeatureType,
    config: InferenceConfig,
    clusters: Vec<Option<Cluster<S>>>,
    live: Vec<usize>,
    live_pos: Vec<usize>,
    heap: BinaryHeap<Reverse<MergeCandidate<S>>>,
    rng: ChaCha8Rng,
    stats: InferenceStats,
    trace: Vec<MergeStep<S>>,
    /// Cut points still to record, largest first.
    pending: Vec<usize>,
    cuts: Vec<(usize, Snapshot<S>)>,
}

/// Live clusters at the moment a run for some `k` would have stopped.
struct Snapshot<S> {
    clusters: Vec<Cluster<S>>,
    stats: InferenceStats,
    trace_len: usize,
}

impl<'a, S: Scalar> Engine<'a, S> {
    fn is_live(&self, id: usize) -> bool {
        self.live_pos.get(id).is_some_and(|&p| p != usize::MAX)
    }

    fn cluster(&self, id: usize) -> &Cluster<S> {
        self.clusters[id].as_ref().expect("live cluster")
    }

    fn push(&mut self, c: MergeCandidate<S>) {
        self.stats.queue_pushes += 1;
        self.heap.push(Reverse(c));
    }

    fn add_live(&mut self, c: Cluster<S>) {
        let id = c.id;
        debug_assert_eq!(id, self.clusters.len());
        self.clusters.push(Some(c));
        self.live_pos.push(self.live.len());
        self.live.push(id);
    }

    fn remove_live(&mut self, id: usize) {
        let pos = self.live_pos[id];
        let last = *self.live.last().expect("non-empty");
        self.live.swap_remove(pos);
        if last != id {
            self.live_pos[last] = pos;
        }
        self.live_pos[id] = usize::MAX;
    }

    /// Random partners for `id` among the other live clusters, in ascending id order.
    fn sample_partners(&mut self, id: usize) -> Vec<usize> {
        let m = self.config.batch.partners(self.live.len());
        if m == 0 {
            return Vec::new();
        }
        if m + 1 >= self.live.len() {
            let mut all: Vec<usize> = self.live.iter().copied().filter(|&x| x != id).collect();
            all.sort_unstable();
            return all;
        }
        let picks = index::sample(&mut self.rng, self.live.len(), m + 1);
        let mut out: Vec<usize> = picks
            .into_iter()
            .map(|p| self.live[p])
            .filter(|&x| x != id)
            .take(m)
            .collect();
        out.sort_unstable();
        out
    }

    fn enqueue_for(&mut self, id: usize) {
        for other in self.sample_partners(id) {
            let c = candidate(self.feature, self.cluster(id), self.cluster(other));
            self.push(c);
        }
    }

    /// One batch per live cluster; with an unlimited batch, every pair once.
    fn seed_queue(&mut self) {
        let mut ids = self.live.clone();
        ids.sort_unstable();
        if self.config.batch == BatchSize::Unlimited {
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    let c = candidate(self.feature, self.cluster(a), self.cluster(b));
                    self.push(c);
                }
            }
        } else {
            for id in ids {
                self.enqueue_for(id);
            }
        }
    }

    fn total_cost(&self) -> S {
        self.live
            .iter()
            .fold(S::zero(), |acc, &id| acc + self.cluster(id).rep_cost)
    }

    fn merge(&mut self, c: MergeCandidate<S>) {
        let a = self.clusters[c.cluster_a].take().expect("live");
        let b = self.clusters[c.cluster_b].take().expect("live");
        self.remove_live(a.id);
        self.remove_live(b.id);
        let mut members = a.members;
        members.extend(b.members);
        let new_id = self.clusters.len();
        self.add_live(Cluster {
            id: new_id,
            members,
            representative: c.joined.clone(),
            rep_cost: c.joined_cost,
        });
        self.stats.merges += 1;
        if self.config.trace {
            let total_cost = self.total_cost();
            self.trace.push(MergeStep {
                step: self.stats.merges,
                merged: (c.cluster_a, c.cluster_b),
                new_id,
                distance: c.distance,
                representative: c.joined,
                live: self.live.len(),
                total_cost,
            });
        }
        self.enqueue_for(new_id);
    }

    /// Records every pending cut `k` with `live <= k` whose run would stop here.
    fn cut(&mut self, stops: impl Fn(usize) -> bool) {
        while let Some(&k) = self.pending.first() {
            if self.live.len() > k || !stops(k) {
                break;
            }
            self.pending.remove(0);
            let mut ids = self.live.clone();
            ids.sort_unstable();
            let snap = Snapshot {
                clusters: ids.iter().map(|&id| self.cluster(id).clone()).collect(),
                stats: self.stats,
                trace_len: self.trace.len(),
            };
            self.cuts.push((k, snap));
        }
    }

    fn run(&mut self) {
        let k = self.config.k;
        self.seed_queue();
        while self.live.len() > 1 {
            let Some(Reverse(c)) = self.heap.pop() else {
                self.cut(|_| true);
                if self.live.len() > k {
                    self.stats.resamples += 1;
                    self.seed_queue();
                    continue;
                }
                break;
            };
            self.stats.queue_pops += 1;
            if !self.is_live(c.cluster_a) || !self.is_live(c.cluster_b) {
                continue;
            }
            let free = self.config.merge_nonpositive && c.distance <= S::zero();
            self.cut(|_| !free);
            if self.live.len() <= k && !free {
                break;
            }
            self.merge(c);
        }
        self.cut(|_| true);
    }
}

/// Infers at most `config.k` intents that together represent every path.
pub fn infer<S: Scalar>(
    paths: &[Label],
    feature: &FeatureType,
    config: &InferenceConfig,
) -> Result<InferenceResult<S>> {
    let mut all = infer_many(paths, feature, config, &[config.k])?;
    Ok(all.pop().expect("one cut"))
}

/// One clustering pass serving several limits: entry `i` equals
/// `infer` with `k = ks[i]` (and `config.k` ignored). Runs for larger `k`
/// stop on a prefix of the merge sequence of smaller ones.
pub fn infer_many<S: Scalar>(
    paths: &[Label],
    feature: &FeatureType,
    config: &InferenceConfig,
    ks: &[usize],
) -> Result<Vec<InferenceResult<S>>> {
    if paths.is_empty() {
        return usage("no paths to infer from");
    }
    if ks.is_empty() {
        return usage("no values of k given");
    }
    if ks.contains(&0) {
        return usage("k must be at least 1");
    }
    let mut distinct: Vec<Label> = Vec::new();
    let mut index_of: HashMap<&Label, usize> = HashMap::new();
    let mut path_to_distinct = Vec::with_capacity(paths.len());
    for p in paths {
        if !feature.is_concrete(p) {
            return usage(format!("path {p:?} is not a concrete label of '{}'", feature.name()));
        }
        let idx = *index_of.entry(p).or_insert_with(|| {
            distinct.push(p.clone());
            distinct.len() - 1
        });
        path_to_distinct.push(idx);
    }

    let mut pending: Vec<usize> = ks.to_vec();
    pending.sort_unstable_by(|a, b| b.cmp(a));
    pending.dedup();
    let run_k = *pending.last().expect("non-empty");
    let mut engine = Engine {
        feature,
        config: InferenceConfig { k: run_k, ..*config },
        clusters: Vec::with_capacity(2 * distinct.len()),
        live: Vec::with_capacity(distinct.len()),
        live_pos: Vec::with_capacity(2 * distinct.len()),
        heap: BinaryHeap::new(),
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        stats: InferenceStats {
            distinct_paths: distinct.len(),
            ..Default::default()
        },
        trace: Vec::new(),
        pending,
        cuts: Vec::new(),
    };
    for (i, p) in distinct.iter().enumerate() {
        engine.add_live(Cluster {
            id: i,
            members: vec![i],
            representative: p.clone(),
            rep_cost: feature.cost(p),
        });
    }
    engine.run();
    if !engine.pending.is_empty() {
        return Err(Error::Invariant(format!(
            "no cut recorded for k in {:?}",
            engine.pending
        )));
    }

    let trace = engine.trace;
    let mut by_k: HashMap<usize, InferenceResult<S>> = HashMap::new();
    for (k, snap) in engine.cuts {
        let res = finish(feature, &distinct, &path_to_distinct, snap, k, &trace)?;
        by_k.insert(k, res);
    }
    Ok(ks.iter().map(|k| by_k[k].clone()).collect())
}

fn finish<S: Scalar>(
    feature: &FeatureType,
    distinct: &[Label],
    path_to_distinct: &[usize],
    snap: Snapshot<S>,
    k: usize,
    trace: &[MergeStep<S>],
) -> Result<InferenceResult<S>> {
    let mut intents = Vec::with_capacity(snap.clusters.len());
    let mut member_counts = Vec::with_capacity(snap.clusters.len());
    let mut distinct_to_intent = vec![usize::MAX; distinct.len()];
    let mut total_cost = S::zero();
    for (slot, c) in snap.clusters.into_iter().enumerate() {
        for &m in &c.members {
            if !feature.leq(&distinct[m], &c.representative) {
                return Err(Error::Invariant(format!(
                    "cluster {} representative does not cover member path {m}",
                    c.id
                )));
            }
            distinct_to_intent[m] = slot;
        }
        member_counts.push(c.members.len());
        total_cost = total_cost + c.rep_cost;
        intents.push(c.representative);
    }
    if distinct_to_intent.contains(&usize::MAX) {
        return Err(Error::Invariant("a path was left without a cluster".into()));
    }
    let assignments = path_to_distinct.iter().map(|&d| distinct_to_intent[d]).collect();
    let intents = IntentSet::new(feature, intents, k)
        .map_err(|e| Error::Invariant(format!("inferred intent set is invalid: {e}")))?;
    Ok(InferenceResult {
        intents,
        assignments,
        member_counts,
        total_cost,
        trace: trace[..snap.trace_len].to_vec(),
        stats: snap.stats,
    })
}
