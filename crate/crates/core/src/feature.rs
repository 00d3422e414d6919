//! Feature types: a label universe with a subset order, a cost per label, the
//! concrete (leaf) labels, and a join.

use crate::error::{usage, Error, Result};
use crate::hre::HreFeature;
use crate::label::Label;
use crate::library::{DagFeature, IpPrefixFeature, RangeFeature, TbvFeature};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Component {
    pub name: String,
    pub feature: FeatureType,
}

#[derive(Debug, Clone)]
pub struct TupleFeature {
    components: Vec<Component>,
}

impl TupleFeature {
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }
}

#[derive(Debug, Clone)]
pub enum FeatureKind {
    Dag(DagFeature),
    Flat(DagFeature),
    Tbv(TbvFeature),
    IpPrefix(IpPrefixFeature),
    Range(RangeFeature),
    Tuple(TupleFeature),
    Hre(HreFeature),
}

/// A named feature type. Immutable once built; every operation is a pure read.
#[derive(Debug, Clone)]
pub struct FeatureType {
    name: String,
    kind: FeatureKind,
}

impl FeatureType {
    pub fn dag<S: AsRef<str>>(name: impl Into<String>, nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        Ok(Self::from_kind(name, FeatureKind::Dag(DagFeature::new(nodes, edges)?)))
    }

    pub fn flat<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Result<Self> {
        Ok(Self::from_kind(name, FeatureKind::Flat(DagFeature::flat(values)?)))
    }

    pub fn tbv(name: impl Into<String>, width: u32) -> Result<Self> {
        Ok(Self::from_kind(name, FeatureKind::Tbv(TbvFeature::new(width)?)))
    }

    pub fn ipprefix(name: impl Into<String>) -> Self {
        Self::from_kind(name, FeatureKind::IpPrefix(IpPrefixFeature))
    }

    pub fn range(name: impl Into<String>, lo: i64, hi: i64) -> Result<Self> {
        Ok(Self::from_kind(name, FeatureKind::Range(RangeFeature::new(lo, hi)?)))
    }

    pub fn tuple(name: impl Into<String>, components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidFeature("tuple needs at least one component".into()));
        }
        let mut names = std::collections::HashSet::new();
        for c in &components {
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidFeature(format!("duplicate tuple component '{}'", c.name)));
            }
        }
        Ok(Self::from_kind(name, FeatureKind::Tuple(TupleFeature { components })))
    }

    pub fn hre(name: impl Into<String>, base: FeatureType, max_len: usize) -> Result<Self> {
        Ok(Self::from_kind(name, FeatureKind::Hre(HreFeature::new(base, max_len)?)))
    }

    pub fn from_kind(name: impl Into<String>, kind: FeatureKind) -> Self {
        FeatureType {
            name: name.into(),
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &FeatureKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FeatureKind::Dag(_) => "dag",
            FeatureKind::Flat(_) => "flat",
            FeatureKind::Tbv(_) => "tbv",
            FeatureKind::IpPrefix(_) => "ipprefix",
            FeatureKind::Range(_) => "range",
            FeatureKind::Tuple(_) => "tuple",
            FeatureKind::Hre(_) => "hre",
        }
    }

    /// The underlying hierarchy of a DAG or flat feature.
    pub fn as_dag(&self) -> Option<&DagFeature> {
        match &self.kind {
            FeatureKind::Dag(d) | FeatureKind::Flat(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&TupleFeature> {
        match &self.kind {
            FeatureKind::Tuple(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_hre(&self) -> Option<&HreFeature> {
        match &self.kind {
            FeatureKind::Hre(h) => Some(h),
            _ => None,
        }
    }

    /// Whether any component is an HRE (costs are then approximations, not set sizes).
    pub fn has_hre(&self) -> bool {
        match &self.kind {
            FeatureKind::Hre(_) => true,
            FeatureKind::Tuple(t) => t.components.iter().any(|c| c.feature.has_hre()),
            _ => false,
        }
    }

    /// Whether `l` is a label of this feature.
    pub fn contains(&self, l: &Label) -> bool {
        match (&self.kind, l) {
            (FeatureKind::Dag(d) | FeatureKind::Flat(d), Label::Node(n)) => d.contains(*n),
            (FeatureKind::Tbv(t), Label::Tbv(v)) => t.contains(v),
            (FeatureKind::IpPrefix(_), Label::Prefix(_)) => true,
            (FeatureKind::Range(r), Label::Range(v)) => r.contains(v),
            (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
                parts.len() == t.components.len()
                    && t.components
                        .iter()
                        .zip(parts.iter())
                        .all(|(c, p)| c.feature.contains(p))
            }
            (FeatureKind::Hre(h), Label::Hre(els)) => h.contains(els),
            _ => false,
        }
    }

    pub fn check(&self, l: &Label) -> Result<()> {
        if self.contains(l) {
            Ok(())
        } else {
            usage(format!("label {l:?} does not belong to feature '{}'", self.name))
        }
    }

    /// Concrete labels are the leaves of the order: no other label lies below them.
    pub fn is_concrete(&self, l: &Label) -> bool {
        match (&self.kind, l) {
            (FeatureKind::Dag(d) | FeatureKind::Flat(d), Label::Node(n)) => d.contains(*n) && d.is_leaf(*n),
            (FeatureKind::Tbv(t), Label::Tbv(v)) => t.contains(v) && v.wild == 0,
            (FeatureKind::IpPrefix(_), Label::Prefix(p)) => p.len() == 32,
            (FeatureKind::Range(r), Label::Range(v)) => r.contains(v) && v.lo == v.hi,
            (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
                parts.len() == t.components.len()
                    && t.components
                        .iter()
                        .zip(parts.iter())
                        .all(|(c, p)| c.feature.is_concrete(p))
            }
            (FeatureKind::Hre(h), Label::Hre(els)) => h.is_concrete(els),
            _ => false,
        }
    }

    /// The greatest element.
    pub fn top(&self) -> Label {
        match &self.kind {
            FeatureKind::Dag(d) | FeatureKind::Flat(d) => Label::Node(d.top()),
            FeatureKind::Tbv(t) => Label::Tbv(t.top()),
            FeatureKind::IpPrefix(p) => Label::Prefix(p.top()),
            FeatureKind::Range(r) => Label::Range(r.domain()),
            FeatureKind::Tuple(t) => Label::tuple(t.components.iter().map(|c| c.feature.top())),
            FeatureKind::Hre(h) => Label::Hre(h.top()),
        }
    }

    /// `σ(a) ⊆ σ(b)`. Labels from a different feature compare as unordered.
    pub fn leq(&self, a: &Label, b: &Label) -> bool {
        match (&self.kind, a, b) {
            (FeatureKind::Dag(d) | FeatureKind::Flat(d), Label::Node(x), Label::Node(y)) => d.leq(*x, *y),
            (FeatureKind::Tbv(t), Label::Tbv(x), Label::Tbv(y)) => t.leq(x, y),
            (FeatureKind::IpPrefix(p), Label::Prefix(x), Label::Prefix(y)) => p.leq(x, y),
            (FeatureKind::Range(r), Label::Range(x), Label::Range(y)) => r.leq(x, y),
            (FeatureKind::Tuple(t), Label::Tuple(xs), Label::Tuple(ys)) => {
                xs.len() == ys.len()
                    && t.components
                        .iter()
                        .zip(xs.iter().zip(ys.iter()))
                        .all(|(c, (x, y))| c.feature.leq(x, y))
            }
            (FeatureKind::Hre(h), Label::Hre(x), Label::Hre(y)) => h.leq(x, y),
            _ => false,
        }
    }

    pub fn try_leq(&self, a: &Label, b: &Label) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.leq(a, b))
    }

    /// Least-cost label above both inputs (exact for every kind except HRE).
    ///
    /// Both labels must belong to this feature; see [`FeatureType::try_join`].
    pub fn join(&self, a: &Label, b: &Label) -> Label {
        match (&self.kind, a, b) {
            (FeatureKind::Dag(d), Label::Node(x), Label::Node(y)) => Label::Node(d.join(*x, *y)),
            (FeatureKind::Flat(d), Label::Node(x), Label::Node(y)) => Label::Node(if x == y { *x } else { d.top() }),
            (FeatureKind::Tbv(t), Label::Tbv(x), Label::Tbv(y)) => Label::Tbv(t.join(x, y)),
            (FeatureKind::IpPrefix(p), Label::Prefix(x), Label::Prefix(y)) => Label::Prefix(p.join(x, y)),
            (FeatureKind::Range(r), Label::Range(x), Label::Range(y)) => Label::Range(r.join(x, y)),
            (FeatureKind::Tuple(t), Label::Tuple(xs), Label::Tuple(ys)) => Label::tuple(
                t.components
                    .iter()
                    .zip(xs.iter().zip(ys.iter()))
                    .map(|(c, (x, y))| c.feature.join(x, y)),
            ),
            (FeatureKind::Hre(h), Label::Hre(x), Label::Hre(y)) => Label::Hre(h.join(x, y)),
            _ => self.top(),
        }
    }

    pub fn try_join(&self, a: &Label, b: &Label) -> Result<Label> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.join(a, b))
    }

    /// Left fold of pairwise joins over the inputs sorted by label key.
    pub fn join_all(&self, labels: &[Label]) -> Result<Label> {
        let mut sorted: Vec<&Label> = labels.iter().collect();
        sorted.sort();
        let (first, rest) = match sorted.split_first() {
            Some(x) => x,
            None => return usage("join_all of an empty set"),
        };
        for l in &sorted {
            self.check(l)?;
        }
        Ok(rest.iter().fold((*first).clone(), |acc, l| self.join(&acc, l)))
    }

    /// Label cost δ. Equals |σ(l)| for every kind but HRE.
    pub fn cost<S: Scalar>(&self, l: &Label) -> S {
        match (&self.kind, l) {
            (FeatureKind::Tuple(t), Label::Tuple(parts)) => t
                .components
                .iter()
                .zip(parts.iter())
                .fold(S::one(), |acc, (c, p)| acc * c.feature.cost::<S>(p)),
            (FeatureKind::Hre(h), Label::Hre(els)) => h.cost::<S>(els).value,
            _ => S::from_count(self.card(l).unwrap_or(u128::MAX)),
        }
    }

    /// Exact |σ(l)| (saturating). `None` when an HRE is involved; use
    /// [`HreFeature::count`] there.
    pub fn card(&self, l: &Label) -> Option<u128> {
        match (&self.kind, l) {
            (FeatureKind::Dag(d) | FeatureKind::Flat(d), Label::Node(n)) => Some(d.card(*n)),
            (FeatureKind::Tbv(t), Label::Tbv(v)) => Some(t.card(v)),
            (FeatureKind::IpPrefix(p), Label::Prefix(v)) => Some(p.card(v)),
            (FeatureKind::Range(_), Label::Range(v)) => Some(v.width()),
            (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
                let mut acc: u128 = 1;
                for (c, p) in t.components.iter().zip(parts.iter()) {
                    acc = acc.saturating_mul(c.feature.card(p)?);
                }
                Some(acc)
            }
            _ => None,
        }
    }

    /// Materializes σ(l), or `Overflow` if it holds more than `cap` labels.
    pub fn sigma(&self, l: &Label, cap: u128) -> Result<Vec<Label>> {
        self.check(l)?;
        if let Some(n) = self.card(l) {
            if n > cap {
                return Err(Error::Overflow { cap });
            }
        }
        Ok(match (&self.kind, l) {
            (FeatureKind::Dag(d) | FeatureKind::Flat(d), Label::Node(n)) => d.sigma(*n).map(Label::Node).collect(),
            (FeatureKind::Tbv(t), Label::Tbv(v)) => t.expand(v).map(Label::Tbv).collect(),
            (FeatureKind::IpPrefix(p), Label::Prefix(v)) => p.expand(v).map(Label::Prefix).collect(),
            (FeatureKind::Range(r), Label::Range(v)) => r.expand(v).map(Label::Range).collect(),
            (FeatureKind::Tuple(t), Label::Tuple(parts)) => {
                let mut acc: Vec<Vec<Label>> = vec![Vec::new()];
                for (c, p) in t.components.iter().zip(parts.iter()) {
                    let vals = c.feature.sigma(p, cap)?;
                    let mut next = Vec::with_capacity(acc.len() * vals.len());
                    for prefix in &acc {
                        for v in &vals {
                            let mut row = prefix.clone();
                            row.push(v.clone());
                            next.push(row);
                        }
                    }
                    if next.len() as u128 > cap {
                        return Err(Error::Overflow { cap });
                    }
                    acc = next;
                }
                acc.into_iter().map(Label::tuple).collect()
            }
            (FeatureKind::Hre(h), Label::Hre(els)) => h.enumerate(std::slice::from_ref(els), cap)?,
            _ => unreachable!("checked above"),
        })
    }

    /// Whether some intent covers the concrete path `p`.
    pub fn represents(&self, intents: &[Label], p: &Label) -> bool {
        intents.iter().any(|i| self.leq(p, i))
    }

    /// Number of concrete labels. `None` if it does not fit in `u128`.
    pub fn universe_size(&self) -> Option<u128> {
        match &self.kind {
            FeatureKind::Dag(d) | FeatureKind::Flat(d) => Some(d.leaves().len() as u128),
            FeatureKind::Tbv(t) => (t.width() < 128).then(|| t.universe_size()),
            FeatureKind::IpPrefix(_) => Some(1 << 32),
            FeatureKind::Range(r) => Some(r.domain().width()),
            FeatureKind::Tuple(t) => t
                .components
                .iter()
                .try_fold(1u128, |acc, c| acc.checked_mul(c.feature.universe_size()?)),
            FeatureKind::Hre(h) => h.universe_size(),
        }
    }

    /// Every concrete label, or `Overflow` above `cap`.
    pub fn concrete_universe(&self, cap: u128) -> Result<Vec<Label>> {
        match self.universe_size() {
            Some(n) if n <= cap => {}
            _ => return Err(Error::Overflow { cap }),
        }
        match &self.kind {
            FeatureKind::Hre(h) => h.enumerate(&[h.top()], cap),
            _ => self.sigma(&self.top(), cap),
        }
    }

    /// Every label of Σ_F, or `Overflow` above `cap`. Not available for HRE.
    pub fn all_labels(&self, cap: u128) -> Result<Vec<Label>> {
        let overflow = Error::Overflow { cap };
        match &self.kind {
            FeatureKind::Dag(d) | FeatureKind::Flat(d) => {
                if d.len() as u128 > cap {
                    return Err(overflow);
                }
                Ok(d.nodes().map(Label::Node).collect())
            }
            FeatureKind::Tbv(t) => {
                let n = 3u128.checked_pow(t.width()).filter(|&n| n <= cap).ok_or(overflow)?;
                let mut out = Vec::with_capacity(n as usize);
                for mut code in 0..n {
                    let mut value = 0u128;
                    let mut wild = 0u128;
                    for bit in 0..t.width() {
                        match code % 3 {
                            1 => value |= 1 << bit,
                            2 => wild |= 1 << bit,
                            _ => {}
                        }
                        code /= 3;
                    }
                    out.push(Label::Tbv(crate::label::Tbv::new(value, wild)));
                }
                Ok(out)
            }
            FeatureKind::IpPrefix(_) => Err(overflow),
            FeatureKind::Range(r) => {
                let w = r.domain().width();
                let n = w
                    .checked_mul(w + 1)
                    .map(|x| x / 2)
                    .filter(|&n| n <= cap)
                    .ok_or(overflow)?;
                let mut out = Vec::with_capacity(n as usize);
                let dom = r.domain();
                for lo in dom.lo..=dom.hi {
                    for hi in lo..=dom.hi {
                        out.push(Label::Range(crate::label::Interval::new(lo, hi)));
                    }
                }
                Ok(out)
            }
            FeatureKind::Tuple(t) => {
                let mut acc: Vec<Vec<Label>> = vec![Vec::new()];
                for c in &t.components {
                    let vals = c.feature.all_labels(cap)?;
                    if (acc.len() as u128).saturating_mul(vals.len() as u128) > cap {
                        return Err(overflow);
                    }
                    acc = acc
                        .iter()
                        .flat_map(|prefix| {
                            vals.iter().map(move |v| {
                                let mut row = prefix.clone();
                                row.push(v.clone());
                                row
                            })
                        })
                        .collect();
                }
                Ok(acc.into_iter().map(Label::tuple).collect())
            }
            FeatureKind::Hre(_) => usage("the label universe of an HRE feature is not enumerable"),
        }
    }
}

/// An ordered list of intents over one feature, bounded by `k_limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntentSet {
    intents: Vec<Label>,
    k_limit: usize,
}

impl IntentSet {
    pub fn new(feature: &FeatureType, intents: Vec<Label>, k_limit: usize) -> Result<Self> {
        if k_limit == 0 {
            return usage("k must be at least 1");
        }
        if intents.len() > k_limit {
            return usage(format!("{} intents exceed the limit k={k_limit}", intents.len()));
        }
        for i in &intents {
            feature.check(i)?;
        }
        Ok(IntentSet { intents, k_limit })
    }

    /// Intent set without a meaningful bound (k = its own length, at least 1).
    pub fn unbounded(feature: &FeatureType, intents: Vec<Label>) -> Result<Self> {
        let k = intents.len().max(1);
        Self::new(feature, intents, k)
    }

    pub fn intents(&self) -> &[Label] {
        &self.intents
    }

    pub fn k_limit(&self) -> usize {
        self.k_limit
    }

    pub fn len(&self) -> usize {
        self.intents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intents.is_empty()
    }

    pub fn total_cost<S: Scalar>(&self, feature: &FeatureType) -> S {
        self.intents.iter().fold(S::zero(), |acc, i| acc + feature.cost::<S>(i))
    }

    pub fn represents(&self, feature: &FeatureType, p: &Label) -> bool {
        feature.represents(&self.intents, p)
    }
}
