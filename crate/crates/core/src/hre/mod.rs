//! Hierarchical reduced regular expressions: concatenations of base-feature
//! labels, each optionally repeated one-or-more times (`+`), matched against
//! strings of concrete base labels where a token matches any label above it.

mod automaton;
mod join;

use crate::error::{usage, Error, Result};
use crate::feature::FeatureType;
use crate::label::{HreElement, Label, NodeId};
use crate::library::DagFeature;
use crate::scalar::Scalar;

pub use automaton::HreCount;

/// Cost breakdown of an HRE: geometric mean of the element costs and its
/// `exponent`-th power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HreCost<S> {
    pub geo_mean: S,
    pub exponent: usize,
    pub value: S,
}

/// HRE feature over a DAG or flat base feature, bounded to strings of at most
/// `max_len` tokens.
#[derive(Debug, Clone)]
pub struct HreFeature {
    base: Box<FeatureType>,
    max_len: usize,
}

impl HreFeature {
    pub fn new(base: FeatureType, max_len: usize) -> Result<Self> {
        if base.as_dag().is_none() {
            return Err(Error::InvalidFeature(format!(
                "HRE base must be a dag or flat feature, got {}",
                base.kind_name()
            )));
        }
        let dag = base.as_dag().expect("checked above");
        if let Some(n) = dag
            .nodes()
            .map(|n| dag.name(n))
            .find(|n| n.contains('.') || n.ends_with('+'))
        {
            return Err(Error::InvalidFeature(format!(
                "HRE base label '{n}' may not contain '.' or end with '+'"
            )));
        }
        if max_len == 0 {
            return Err(Error::InvalidFeature("HRE length bound must be positive".into()));
        }
        Ok(HreFeature {
            base: Box::new(base),
            max_len,
        })
    }

    pub fn base(&self) -> &FeatureType {
        &self.base
    }

    pub(crate) fn dag(&self) -> &DagFeature {
        self.base.as_dag().expect("validated at construction")
    }

    /// Maximum represented string length `d`.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn contains(&self, els: &[HreElement]) -> bool {
        !els.is_empty()
            && els.len() <= self.max_len
            && els
                .iter()
                .all(|e| matches!(e.label, Label::Node(n) if self.dag().contains(n)))
    }

    pub fn is_concrete(&self, els: &[HreElement]) -> bool {
        self.contains(els) && els.iter().all(|e| !e.plus && self.dag().is_leaf(node(&e.label)))
    }

    /// `Any+`.
    pub fn top(&self) -> std::sync::Arc<[HreElement]> {
        std::sync::Arc::from(vec![HreElement::new(Label::Node(self.dag().top()), true)])
    }

    /// Number of concrete strings of length `1..=d`.
    pub fn universe_size(&self) -> Option<u128> {
        let n = self.dag().leaves().len() as u128;
        let mut total: u128 = 0;
        let mut pow: u128 = 1;
        for _ in 0..self.max_len {
            pow = pow.checked_mul(n)?;
            total = total.checked_add(pow)?;
        }
        Some(total)
    }

    /// Generalized acceptance: each non-plus element consumes one token, each plus
    /// element one or more consecutive tokens, and every token lies below the label
    /// of the element consuming it.
    pub fn accepts(&self, h: &[HreElement], path: &[HreElement]) -> bool {
        if path.is_empty() || path.len() > self.max_len {
            return false;
        }
        let dag = self.dag();
        let n = h.len();
        // reach[j]: the tokens seen so far can be consumed by the first j elements
        let mut reach = vec![false; n + 1];
        reach[0] = true;
        for tok in path {
            let t = node(&tok.label);
            let mut next = vec![false; n + 1];
            for j in 0..=n {
                if !reach[j] {
                    continue;
                }
                if j < n && dag.leq(t, node(&h[j].label)) {
                    next[j + 1] = true;
                }
                if j >= 1 && h[j - 1].plus && dag.leq(t, node(&h[j - 1].label)) {
                    next[j] = true;
                }
            }
            reach = next;
            if !reach.iter().any(|&r| r) {
                return false;
            }
        }
        reach[n]
    }

    /// [`HreFeature::accepts`] with input validation.
    pub fn try_accepts(&self, h: &[HreElement], path: &[HreElement]) -> Result<bool> {
        if !self.contains(h) {
            return usage("HRE does not belong to this feature");
        }
        if !self.is_concrete(path) && !path.is_empty() {
            return usage("path tokens must be concrete base labels");
        }
        Ok(self.accepts(h, path))
    }

    /// Language inclusion `Acc(a) ⊆ Acc(b)`.
    pub fn leq(&self, a: &[HreElement], b: &[HreElement]) -> bool {
        if a.iter().all(|e| !e.plus && self.dag().is_leaf(node(&e.label))) {
            return self.accepts(b, a);
        }
        automaton::included(self, a, b)
    }

    /// Geometric mean of element costs raised to the length bound. Plus flags do
    /// not contribute.
    pub fn cost<S: Scalar>(&self, h: &[HreElement]) -> HreCost<S> {
        let dag = self.dag();
        let sum_log = h
            .iter()
            .fold(S::zero(), |acc, e| acc + S::from_count(dag.card(node(&e.label))).ln());
        let geo_mean = (sum_log / S::from_usize_lossy(h.len().max(1))).exp();
        let value = (sum_log * S::from_usize_lossy(self.max_len) / S::from_usize_lossy(h.len().max(1))).exp();
        HreCost {
            geo_mean,
            exponent: self.max_len,
            value,
        }
    }

    /// Generalizing join; see the `join` module for the alignment search.
    pub fn join(&self, a: &[HreElement], b: &[HreElement]) -> std::sync::Arc<[HreElement]> {
        join::join(self, a, b)
    }

    /// Distinct strings represented by at least one input, exact unless the
    /// exploration exceeded `cap` memo entries.
    pub fn count(&self, hs: &[&[HreElement]], cap: usize) -> Result<HreCount> {
        if hs.is_empty() {
            return usage("count of an empty HRE list");
        }
        for h in hs {
            if !self.contains(h) {
                return usage("HRE does not belong to this feature");
            }
        }
        Ok(automaton::count(self, hs, cap))
    }

    /// All represented strings as concrete HRE labels, sorted.
    pub fn enumerate<E: AsRef<[HreElement]>>(&self, hs: &[E], cap: u128) -> Result<Vec<Label>> {
        let refs: Vec<&[HreElement]> = hs.iter().map(|h| h.as_ref()).collect();
        automaton::enumerate(self, &refs, cap)
    }
}

pub(crate) fn node(l: &Label) -> NodeId {
    match l {
        Label::Node(n) => *n,
        other => panic!("HRE element label {other:?} is not a base node"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn isp() -> FeatureType {
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
        let base = FeatureType::dag::<&str>("device", &[], &edges).unwrap();
        FeatureType::hre("path", base, 6).unwrap()
    }

    pub(crate) fn parse(f: &FeatureType, s: &str) -> Vec<HreElement> {
        let dag = f.as_hre().unwrap().dag();
        s.split('.')
            .map(|tok| {
                let (name, plus) = match tok.strip_suffix('+') {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                HreElement::new(Label::Node(dag.lookup(name).unwrap()), plus)
            })
            .collect()
    }

    #[test]
    fn acceptance_examples() {
        let f = isp();
        let h = f.as_hre().unwrap();
        let pat = parse(&f, "AS1.R1.Internal+.R5.AS2");
        assert!(h.accepts(&pat, &parse(&f, "AS1.R1.R3.R4.R5.AS2")));
        assert!(h.accepts(&pat, &parse(&f, "AS1.R1.R2.R5.AS2")));
        assert!(!h.accepts(&pat, &parse(&f, "AS1.R1.R5.AS2")));
        let p = parse(&f, "AS1.R1.R2");
        assert!(h.accepts(&p, &p));
        assert!(!h.accepts(&p, &parse(&f, "AS1.R1")));
    }

    #[test]
    fn try_accepts_rejects_abstract_tokens() {
        let f = isp();
        let h = f.as_hre().unwrap();
        let pat = parse(&f, "Any+");
        assert!(matches!(
            h.try_accepts(&pat, &parse(&f, "Internal")),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn geometric_mean_costs() {
        let f = isp();
        let h = f.as_hre().unwrap();
        let g = |s: &str| h.cost::<f64>(&parse(&f, s)).geo_mean;
        assert!((g("AS1.R1.R2.R5.AS2") - 1.0).abs() < 1e-12);
        assert!((g("AS1.R1.Internal.R5.AS2") - 1.38).abs() < 0.01);
        assert!((g("External.Internal+.External") - 2.71).abs() < 0.01);
        assert!((g("Any+") - 7.0).abs() < 1e-9);
        let c = h.cost::<f64>(&parse(&f, "Any+"));
        assert_eq!(c.exponent, 6);
        assert!((c.value - 7f64.powi(6)).abs() < 1e-6);
    }

    #[test]
    fn inclusion_chain() {
        let f = isp();
        let h = f.as_hre().unwrap();
        let chain = [
            "AS1.R1.R2.R5.AS2",
            "AS1.R1.Internal.R5.AS2",
            "External.Internal+.External",
            "Any+",
        ];
        for w in chain.windows(2) {
            let (a, b) = (parse(&f, w[0]), parse(&f, w[1]));
            assert!(h.leq(&a, &b), "{} <= {}", w[0], w[1]);
            assert!(!h.leq(&b, &a), "{} not <= {}", w[1], w[0]);
        }
    }
}
