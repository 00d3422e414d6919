//! Declarative feature configuration (the `feature.json` document).
//!
//! ```json
//! {"kind": "tuple", "name": "flow", "components": [
//!     {"kind": "ipprefix", "name": "src"},
//!     {"kind": "dag", "name": "role", "edges": [["Any", "User"], ["User", "U1"]]},
//!     {"kind": "hre", "name": "path", "d": 8, "base": {"kind": "flat", "name": "dev", "values": ["a", "b"]}}
//! ]}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{Component, FeatureKind, FeatureType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FeatureConfig {
    Dag {
        name: String,
        /// Isolated nodes only need listing here; nodes on edges are implied.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        nodes: Vec<String>,
        /// `[parent, child]` pairs.
        edges: Vec<(String, String)>,
        /// Optional explicit costs, checked against |σ|.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        costs: Option<BTreeMap<String, u64>>,
    },
    Flat {
        name: String,
        values: Vec<String>,
    },
    Tbv {
        name: String,
        width: u32,
    },
    Ipprefix {
        name: String,
    },
    Range {
        name: String,
        lo: i64,
        hi: i64,
    },
    Tuple {
        name: String,
        components: Vec<FeatureConfig>,
    },
    Hre {
        name: String,
        base: Box<FeatureConfig>,
        d: usize,
    },
}

impl FeatureConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("feature config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn name(&self) -> &str {
        match self {
            FeatureConfig::Dag { name, .. }
            | FeatureConfig::Flat { name, .. }
            | FeatureConfig::Tbv { name, .. }
            | FeatureConfig::Ipprefix { name }
            | FeatureConfig::Range { name, .. }
            | FeatureConfig::Tuple { name, .. }
            | FeatureConfig::Hre { name, .. } => name,
        }
    }

    /// Validates and builds the feature type.
    pub fn build(&self) -> Result<FeatureType> {
        match self {
            FeatureConfig::Dag {
                name,
                nodes,
                edges,
                costs,
            } => {
                let f = FeatureType::dag(name.clone(), nodes, edges)?;
                if let Some(costs) = costs {
                    let d = f.as_dag().expect("dag");
                    for (label, &c) in costs {
                        let n = d.lookup(label).ok_or_else(|| {
                            Error::InvalidFeature(format!("cost given for unknown label '{label}' in '{name}'"))
                        })?;
                        if u128::from(c) != d.card(n) {
                            return Err(Error::InvalidFeature(format!(
                                "cost of '{label}' in '{name}' is {c}, but it covers {} concrete labels",
                                d.card(n)
                            )));
                        }
                    }
                }
                Ok(f)
            }
            FeatureConfig::Flat { name, values } => FeatureType::flat(name.clone(), values),
            FeatureConfig::Tbv { name, width } => FeatureType::tbv(name.clone(), *width),
            FeatureConfig::Ipprefix { name } => Ok(FeatureType::ipprefix(name.clone())),
            FeatureConfig::Range { name, lo, hi } => FeatureType::range(name.clone(), *lo, *hi),
            FeatureConfig::Tuple { name, components } => {
                let comps = components
                    .iter()
                    .map(|c| {
                        Ok(Component {
                            name: c.name().to_string(),
                            feature: c.build()?,
                        })
                    })
                    .collect::<Result<_>>()?;
                FeatureType::tuple(name.clone(), comps)
            }
            FeatureConfig::Hre { name, base, d } => FeatureType::hre(name.clone(), base.build()?, *d),
        }
    }

    /// Config that rebuilds an equal feature type. Tuple components take the
    /// component name.
    pub fn describe(f: &FeatureType) -> Self {
        Self::describe_as(f, f.name())
    }

    fn describe_as(f: &FeatureType, name: &str) -> Self {
        let name = name.to_string();
        match f.kind() {
            FeatureKind::Dag(d) => {
                let edges: Vec<(String, String)> = d
                    .edges()
                    .map(|(p, c)| (d.name(p).to_string(), d.name(c).to_string()))
                    .collect();
                let nodes = if edges.is_empty() {
                    d.nodes().map(|n| d.name(n).to_string()).collect()
                } else {
                    Vec::new()
                };
                FeatureConfig::Dag {
                    name,
                    nodes,
                    edges,
                    costs: None,
                }
            }
            FeatureKind::Flat(d) => FeatureConfig::Flat {
                name,
                values: d.leaves().iter().map(|&n| d.name(n).to_string()).collect(),
            },
            FeatureKind::Tbv(t) => FeatureConfig::Tbv { name, width: t.width() },
            FeatureKind::IpPrefix(_) => FeatureConfig::Ipprefix { name },
            FeatureKind::Range(r) => FeatureConfig::Range {
                name,
                lo: r.domain().lo,
                hi: r.domain().hi,
            },
            FeatureKind::Tuple(t) => FeatureConfig::Tuple {
                name,
                components: t
                    .components()
                    .iter()
                    .map(|c| Self::describe_as(&c.feature, &c.name))
                    .collect(),
            },
            FeatureKind::Hre(h) => FeatureConfig::Hre {
                name,
                base: Box::new(Self::describe(h.base())),
                d: h.max_len(),
            },
        }
    }
}
