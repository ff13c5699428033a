//! Evaluation toolkit for spoof localization.
//!
//! Scores partially spoofed audio timelines against reference annotations,
//! in two measurement styles:
//!
//! - **point-based**: split time into uniform segments at a fixed resolution
//!   and count misclassified segments;
//! - **range-based**: sum the duration of misclassified time directly from
//!   range boundaries, with no pre-segmentation.
//!
//! On top of the rates it computes equal error rates (exact sweeps for both
//! styles, plus a quantile binary search for the range-based EER), converts
//! score tracks between temporal resolutions, and generates deterministic
//! synthetic datasets for testing and benchmarking.
//!
//! Conventions throughout: spoof is the positive class, higher scores mean
//! more likely bona fide, and intervals are half-open `[start, end)`
//! seconds.
//!
//! ```
//! use rangeer::eer::{brute_force_range_eer, range_eer_binary_search, SearchConfig};
//! use rangeer::synth::{generate, SynthSpec};
//!
//! let trials = generate(&SynthSpec { seed: 7, ..SynthSpec::default() })?;
//! let estimate = range_eer_binary_search(&trials, &SearchConfig::default())?;
//! let exact = brute_force_range_eer(&trials)?;
//! assert!(!estimate.converged || (estimate.eer - exact.eer).abs() <= 1e-5);
//! # Ok::<(), rangeer::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod eer;
mod error;
pub mod formats;
pub mod metrics;
mod par;
pub mod report;
pub mod resample;
pub mod synth;
pub mod timeline;

pub use error::{Error, Result};
pub use timeline::{Label, LabeledRange, LabelRule, ScoredRange, ScoreTrack, Trial};
