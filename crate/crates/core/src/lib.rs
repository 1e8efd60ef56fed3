//! Instance-based data stream classification with a Mahalanobis metric
//! learned online from pairwise constraints, plus prequential evaluation
//! tooling for comparing two stream classifiers.

pub mod classifier;
pub mod drift;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod instance_base;
pub mod metric;
pub mod streams;

pub use classifier::{ClassifierConfig, OnlineKissmeStream, Prediction, Step, Voting};
pub use drift::{DriftConfig, DriftLevel, DriftState};
pub use error::{Error, Result};
pub use evaluation::{FadingEstimator, McNemarCounter, QTracker};
pub use instance_base::{ClassId, Instance, InstanceBase};
pub use metric::{ConstraintAccumulator, FeatureVector, MetricMatrix, Ridge};
