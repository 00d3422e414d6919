//! Intent inference over hierarchical feature types.
//!
//! A feature type is a partially ordered label universe with a join and a
//! cost. Given observed concrete paths, [`infer`] agglomerates them into at
//! most `k` intents that together represent every path at low total cost.
//! [`metrics`] scores intents against a reference, [`forge`] builds synthetic
//! datasets and [`oracle`] holds brute-force references used by the tests.

pub mod config;
mod error;
mod feature;
pub mod forge;
mod hre;
pub mod infer;
mod label;
pub mod library;
pub mod metrics;
pub mod oracle;
mod scalar;
pub mod text;

pub use error::{Error, Result};
pub use feature::{Component, FeatureKind, FeatureType, IntentSet, TupleFeature};
pub use hre::{HreCost, HreCount, HreFeature};
pub use infer::{
    cluster_distance, infer, infer_many, single_intent, BatchSize, Cluster, InferenceConfig, InferenceResult,
    InferenceStats, MergeCandidate, MergeStep,
};
pub use label::{HreElement, Interval, Ipv4Prefix, Label, NodeId, Tbv};
pub use metrics::{evaluate, represented_size, EvalReport, Represented};
pub use scalar::Scalar;

pub type ClusterF64 = Cluster<f64>;
pub type MergeCandidateF64 = MergeCandidate<f64>;
pub type MergeStepF64 = MergeStep<f64>;
pub type InferenceResultF64 = InferenceResult<f64>;
pub type EvalReportF64 = EvalReport<f64>;
pub type HreCostF64 = HreCost<f64>;
pub type InferenceResultF32 = InferenceResult<f32>;
pub type EvalReportF32 = EvalReport<f32>;
