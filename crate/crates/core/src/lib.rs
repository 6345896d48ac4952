//! Core library for auditing content moderation on a large social platform.
//!
//! The crate is organised as a pipeline over an annotated tweet corpus:
//!
//! * [`corpus`] — data model, CSV/JSONL ingest, validation, stratum
//!   summaries, keyword scanning, and a seeded synthetic generator.
//! * [`stats`] — Wilson intervals, percentile bootstrap, inter-rater
//!   agreement, and OLS with robust covariance estimators.
//! * [`prevalence`] — bootstrap prevalence estimates per stratum and
//!   extrapolation to platform-level daily volumes and user exposure.
//! * [`ranker_eval`] — ranking-quality metrics for continuous hate scores
//!   (average precision, PR curves, percentile ranks, top-bin composition).
//! * [`triage_sim`] — moderator-capacity triage simulation: review budgets,
//!   coverage and avoided-engagement curves with bootstrap bands.
//! * [`cost_alloc`] — staffing cost model and allocation policies
//!   (per-stratum targets vs. greedy aggregate optimisation), cost
//!   frontiers, and sensitivity sweeps.
//!
//! All randomised routines take explicit seeds and derive per-task
//! substreams (see [`seed`]), so results are reproducible bit-for-bit and
//! invariant to worker count.

pub mod corpus;
pub mod cost_alloc;
pub mod error;
pub mod numfmt;
pub mod prevalence;
pub mod ranker_eval;
pub mod seed;
pub mod stats;
pub mod triage_sim;

pub use error::{Error, Result};
