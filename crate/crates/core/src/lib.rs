//! Rank-order reliability for Zipf-Poisson count ensembles.
//!
//! Counts `X_i ~ Poi(N (i + k)^-alpha)` are independent Poisson variables with
//! power-law means. This crate answers "how many of the top-ranked entities are
//! in their true order?" in three ways:
//!
//! - analytic bounds and thresholds ([`bounds`]), built on Skellam Chernoff
//!   bounds, Poisson tail bounds and a Bonferroni sum over adjacent pairs;
//! - estimates of the scale `N` from observed tables ([`estimate`], [`corpus`]);
//! - seeded, parallel Monte Carlo simulation of the ensemble ([`simulate`]).
//!
//! ```
//! use zipfpoi_core::{bounds, EnsembleParams};
//!
//! let t = bounds::threshold_n_prime(1e7, 1.106).unwrap();
//! assert!((t.n_prime - 72.08).abs() < 0.05);
//!
//! let params = EnsembleParams::zipf(1e7, 1.106).unwrap();
//! let report = bounds::prefix_error_bound(72, &params);
//! assert!((report.bonferroni_sum - 0.0199).abs() < 2e-4);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod corpus;
pub mod error;
pub mod estimate;
pub mod simulate;
pub mod special;

pub use bounds::{BoundReport, EnsembleParams, PickResult, ThresholdReport};
pub use corpus::{AnalysisOptions, AnalysisReport, InputFormat, ZipfPlot};
pub use error::{Error, Result};
pub use estimate::{RankedCounts, RankedEntry, SensitivityReport};
pub use simulate::{EnsembleDraw, ExperimentSummary, FirstError, OrderingOutcome};
pub use special::Precision;
