use crate::error::{Error, Result};
use crate::label::Interval;

/// Integer intervals inside a configured domain; the domain itself is the top label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeFeature {
    domain: Interval,
}

impl RangeFeature {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidFeature(format!("range domain {lo}..{hi} is empty")));
        }
        Ok(RangeFeature {
            domain: Interval::new(lo, hi),
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn contains(&self, r: &Interval) -> bool {
        r.lo <= r.hi && self.domain.contains(r)
    }

    pub fn leq(&self, a: &Interval, b: &Interval) -> bool {
        b.contains(a)
    }

    pub fn join(&self, a: &Interval, b: &Interval) -> Interval {
        Interval::new(a.lo.min(b.lo), a.hi.max(b.hi))
    }

    pub fn expand(&self, r: &Interval) -> impl Iterator<Item = Interval> {
        (r.lo..=r.hi).map(Interval::point)
    }

    pub fn parse(&self, s: &str) -> Result<Interval> {
        let bad = || Error::Parse(format!("bad range '{s}'"));
        let r = match s.split_once("..") {
            Some((lo, hi)) => Interval {
                lo: lo.trim().parse().map_err(|_| bad())?,
                hi: hi.trim().parse().map_err(|_| bad())?,
            },
            None => Interval::point(s.trim().parse().map_err(|_| bad())?),
        };
        if r.lo > r.hi {
            return Err(bad());
        }
        Ok(r)
    }

    pub fn render(&self, r: &Interval) -> String {
        format!("{}..{}", r.lo, r.hi)
    }
}
