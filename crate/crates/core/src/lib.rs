//! Evaluation toolkit for additive compositional embedding models.
//!
//! Two pipelines are provided:
//!
//! * a **word-sense discrimination** benchmark: generate n-sense task
//!   instances from a sense inventory ([`task`]), score them with
//!   single-vector, multi-sense, word-overlap or random strategies
//!   ([`wsd`]) over extracted context windows ([`context`]), and compare
//!   systems with a randomized pairwise permutation test;
//! * a **phrase similarity** protocol: score two-word phrase pairs under
//!   additive composition with max/min/mean sense-configuration
//!   aggregation and correlate with human judgments via Spearman's rho
//!   ([`phrase`]).
//!
//! Embedding tables ([`embedding`]) are immutable after load and safe to
//! share across threads. All randomness flows from explicit seeds through
//! per-site derived streams ([`rng`]), so every pipeline is reproducible
//! byte-for-byte.

pub mod compose;
pub mod context;
pub mod embedding;
pub mod error;
pub mod freq;
pub mod phrase;
pub mod rng;
pub mod synth;
pub mod task;
pub mod wsd;

pub use error::{Error, Result};
