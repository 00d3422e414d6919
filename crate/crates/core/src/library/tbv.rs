use crate::error::{Error, Result};
use crate::label::Tbv;

/// Ternary bit vectors of a fixed width (at most 128 bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TbvFeature {
    width: u32,
}

impl TbvFeature {
    pub fn new(width: u32) -> Result<Self> {
        if width == 0 || width > 128 {
            return Err(Error::InvalidFeature(format!("TBV width {width} not in 1..=128")));
        }
        Ok(TbvFeature { width })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn full_mask(&self) -> u128 {
        if self.width == 128 {
            u128::MAX
        } else {
            (1u128 << self.width) - 1
        }
    }

    pub fn contains(&self, t: &Tbv) -> bool {
        let m = !self.full_mask();
        t.value & m == 0 && t.wild & m == 0 && t.value & t.wild == 0
    }

    pub fn top(&self) -> Tbv {
        Tbv::new(0, self.full_mask())
    }

    pub fn leq(&self, a: &Tbv, b: &Tbv) -> bool {
        a.wild & !b.wild == 0 && (a.value ^ b.value) & !b.wild == 0
    }

    /// Bits that agree stay; all others become wildcards.
    pub fn join(&self, a: &Tbv, b: &Tbv) -> Tbv {
        let wild = a.wild | b.wild | (a.value ^ b.value);
        Tbv::new(a.value, wild)
    }

    pub fn card(&self, t: &Tbv) -> u128 {
        let w = t.wildcards();
        if w >= 128 {
            u128::MAX
        } else {
            1u128 << w
        }
    }

    /// Every concrete vector matching `t`, in increasing numeric order.
    pub fn expand(&self, t: &Tbv) -> impl Iterator<Item = Tbv> + '_ {
        let base = t.value;
        let wild = t.wild;
        let mut sub: u128 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = Tbv::new(base | sub, 0);
            // next submask of `wild` in increasing order
            sub = (sub.wrapping_sub(wild)) & wild;
            if sub == 0 {
                done = true;
            }
            Some(out)
        })
    }

    pub fn universe_size(&self) -> u128 {
        self.card(&self.top())
    }

    pub fn parse(&self, s: &str) -> Result<Tbv> {
        if s.len() != self.width as usize {
            return Err(Error::Parse(format!(
                "TBV '{s}' has length {} but width is {}",
                s.len(),
                self.width
            )));
        }
        let mut value = 0u128;
        let mut wild = 0u128;
        for ch in s.chars() {
            value <<= 1;
            wild <<= 1;
            match ch {
                '0' => {}
                '1' => value |= 1,
                'x' | 'X' => wild |= 1,
                other => return Err(Error::Parse(format!("bad TBV character '{other}'"))),
            }
        }
        Ok(Tbv::new(value, wild))
    }

    pub fn render(&self, t: &Tbv) -> String {
        (0..self.width)
            .rev()
            .map(|i| {
                if t.wild >> i & 1 == 1 {
                    'x'
                } else if t.value >> i & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_examples() {
        let f = TbvFeature::new(2).unwrap();
        let j = f.join(&f.parse("00").unwrap(), &f.parse("01").unwrap());
        assert_eq!(f.render(&j), "0x");
        let one_x = f.parse("1x").unwrap();
        assert_eq!(f.join(&one_x, &one_x), one_x);
        let f3 = TbvFeature::new(3).unwrap();
        let j = f3.join(&f3.parse("101").unwrap(), &f3.parse("010").unwrap());
        assert_eq!(f3.render(&j), "xxx");
    }

    #[test]
    fn expand_enumerates_sigma() {
        let f = TbvFeature::new(4).unwrap();
        let t = f.parse("1x0x").unwrap();
        let got: Vec<String> = f.expand(&t).map(|v| f.render(&v)).collect();
        assert_eq!(got, ["1000", "1001", "1100", "1101"]);
        assert_eq!(f.card(&t), 4);
        let c = f.parse("0110").unwrap();
        assert_eq!(f.expand(&c).count(), 1);
    }

    #[test]
    fn width_bounds() {
        assert!(TbvFeature::new(0).is_err());
        assert!(TbvFeature::new(129).is_err());
        let f = TbvFeature::new(128).unwrap();
        assert_eq!(f.card(&f.top()), u128::MAX);
        assert!(f.parse("01").is_err());
    }
}
