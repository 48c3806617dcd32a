//! Signature-based isolation forests for functional anomaly detection.
//!
//! The crate scores discretized curves by how quickly random
//! signature-based splits isolate them. Two criteria are built on path
//! signatures: SIF thresholds a single coordinate-signature term drawn at
//! each node, and K-SIF thresholds the truncated signature kernel against
//! a drawn dictionary function. FIF (normalized functional inner products)
//! and classic IF (raw grid values) are included as baselines.
//!
//! ```
//! use sigforest::datagen::{generate, Scenario, SynthSpec};
//! use sigforest::forest::{Forest, ForestConfig, SplitCriterion};
//! use sigforest::metrics::auroc;
//!
//! let data = generate(&SynthSpec::new(Scenario::swap_events()).with_seed(1)).unwrap();
//! let mut config = ForestConfig::new(SplitCriterion::Sif);
//! config.n_trees = 50;
//! config.depth = 2;
//! config.seed = 1;
//! let forest = Forest::fit(&data, &config).unwrap();
//! let report = forest.score_all(&data).unwrap();
//! assert!(auroc(&report).unwrap() > 0.5);
//! ```

pub mod datagen;
pub mod dataio;
pub mod dictionary;
pub mod error;
pub mod forest;
pub mod metrics;
pub mod path;
pub mod rng;
pub mod sigcore;

mod par;

pub use error::{Error, Result};
pub use par::set_thread_count;
pub use forest::{Forest, ForestConfig, SplitCriterion};
pub use metrics::ScoreReport;
pub use path::{FunctionalDataset, FunctionalPath, Label, Window};
pub use sigcore::{SignatureVector, Word};
