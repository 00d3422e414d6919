use std::net::Ipv4Addr;

use crate::error::{Error, Result};
use crate::label::Ipv4Prefix;

/// IPv4 prefixes: ternary vectors of width 32 whose wildcards are all trailing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IpPrefixFeature;

impl IpPrefixFeature {
    pub fn top(&self) -> Ipv4Prefix {
        Ipv4Prefix::new(0, 0)
    }

    pub fn leq(&self, a: &Ipv4Prefix, b: &Ipv4Prefix) -> bool {
        b.contains(a)
    }

    /// Longest common prefix.
    pub fn join(&self, a: &Ipv4Prefix, b: &Ipv4Prefix) -> Ipv4Prefix {
        let diff = a.addr() ^ b.addr();
        let len = (diff.leading_zeros() as u8).min(a.len()).min(b.len());
        Ipv4Prefix::new(a.addr(), len)
    }

    pub fn card(&self, p: &Ipv4Prefix) -> u128 {
        1u128 << (32 - u32::from(p.len()))
    }

    pub fn expand(&self, p: &Ipv4Prefix) -> impl Iterator<Item = Ipv4Prefix> {
        let (lo, hi) = p.bounds();
        (u64::from(lo)..=u64::from(hi)).map(|a| Ipv4Prefix::host(a as u32))
    }

    pub fn parse(&self, s: &str) -> Result<Ipv4Prefix> {
        let (addr, len) = match s.split_once('/') {
            Some((a, l)) => {
                let len: u8 = l
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad prefix length in '{s}'")))?;
                if len > 32 {
                    return Err(Error::Parse(format!("prefix length {len} > 32")));
                }
                (a, len)
            }
            None => (s, 32),
        };
        let addr: Ipv4Addr = addr
            .parse()
            .map_err(|_| Error::Parse(format!("bad IPv4 address '{addr}'")))?;
        Ok(Ipv4Prefix::new(u32::from(addr), len))
    }

    pub fn render(&self, p: &Ipv4Prefix) -> String {
        if p.len() == 32 {
            Ipv4Addr::from(p.addr()).to_string()
        } else {
            format!("{}/{}", Ipv4Addr::from(p.addr()), p.len())
        }
    }
}
