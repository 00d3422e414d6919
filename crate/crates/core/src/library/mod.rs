//! The concrete feature-type templates.

mod dag;
mod prefix;
mod range;
mod tbv;

pub(crate) use dag::BitSet;
pub use dag::DagFeature;
pub use prefix::IpPrefixFeature;
pub use range::RangeFeature;
pub use tbv::TbvFeature;
