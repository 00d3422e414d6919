//! Label values. A label only has meaning relative to the [`FeatureType`] that
//! owns it; the feature interprets it (order, cost, represented set, text form).
//!
//! [`FeatureType`]: crate::FeatureType

use std::sync::Arc;

/// Interned node of a DAG or flat feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ternary bit vector. `value` holds the fixed bits, `wild` marks `x` positions.
/// Bits under `wild` are kept zero in `value` so equality is structural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tbv {
    pub value: u128,
    pub wild: u128,
}

impl Tbv {
    pub fn new(value: u128, wild: u128) -> Self {
        Tbv {
            value: value & !wild,
            wild,
        }
    }

    pub fn wildcards(&self) -> u32 {
        self.wild.count_ones()
    }
}

/// IPv4 prefix with host bits cleared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ipv4Prefix {
    addr: u32,
    len: u8,
}

impl Ipv4Prefix {
    pub fn new(addr: u32, len: u8) -> Self {
        let len = len.min(32);
        Ipv4Prefix {
            addr: addr & Self::mask(len),
            len,
        }
    }

    pub fn host(addr: u32) -> Self {
        Ipv4Prefix { addr, len: 32 }
    }

    pub fn mask(len: u8) -> u32 {
        if len == 0 {
            0
        } else {
            u32::MAX << (32 - u32::from(len))
        }
    }

    pub fn addr(&self) -> u32 {
        self.addr
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, other: &Ipv4Prefix) -> bool {
        self.len <= other.len && other.addr & Self::mask(self.len) == self.addr
    }

    /// First and last address covered.
    pub fn bounds(&self) -> (u32, u32) {
        (self.addr, self.addr | !Self::mask(self.len))
    }
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: i64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> u128 {
        (i128::from(self.hi) - i128::from(self.lo) + 1) as u128
    }
}

/// One element of a hierarchical reduced regular expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HreElement {
    pub label: Label,
    /// `true` means "one or more consecutive tokens".
    pub plus: bool,
}

impl HreElement {
    pub fn new(label: Label, plus: bool) -> Self {
        HreElement { label, plus }
    }

    pub fn one(label: Label) -> Self {
        HreElement { label, plus: false }
    }
}

/// A label of any feature kind.
///
/// Variants map one-to-one onto the feature kinds except `Node`, which serves
/// both DAG and flat features.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Node(NodeId),
    Tbv(Tbv),
    Prefix(Ipv4Prefix),
    Range(Interval),
    Tuple(Arc<[Label]>),
    Hre(Arc<[HreElement]>),
}

impl Label {
    pub fn tuple(parts: impl IntoIterator<Item = Label>) -> Self {
        Label::Tuple(parts.into_iter().collect())
    }

    pub fn hre(elements: impl IntoIterator<Item = HreElement>) -> Self {
        Label::Hre(elements.into_iter().collect())
    }

    /// A concrete HRE path: each token is one non-plus element.
    pub fn hre_path(tokens: impl IntoIterator<Item = Label>) -> Self {
        Label::Hre(tokens.into_iter().map(HreElement::one).collect())
    }

    pub fn as_node(&self) -> Option<NodeId> {
        match self {
            Label::Node(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Label]> {
        match self {
            Label::Tuple(parts) => Some(parts),
            _ => None,
        }
    }

    pub fn as_hre(&self) -> Option<&[HreElement]> {
        match self {
            Label::Hre(elements) => Some(elements),
            _ => None,
        }
    }
}

impl From<NodeId> for Label {
    fn from(n: NodeId) -> Self {
        Label::Node(n)
    }
}

impl From<Tbv> for Label {
    fn from(t: Tbv) -> Self {
        Label::Tbv(t)
    }
}

impl From<Ipv4Prefix> for Label {
    fn from(p: Ipv4Prefix) -> Self {
        Label::Prefix(p)
    }
}

impl From<Interval> for Label {
    fn from(r: Interval) -> Self {
        Label::Range(r)
    }
}
