//! Proficiency ranking over signed vote graphs.
//!
//! The crate ingests a vote log from a collaborative network (users post
//! answers, other users vote them up or down), derives implicit agreement
//! and opposition signals from co-voting patterns, and runs a damped power
//! iteration over positive and negative transition matrices. The two rank
//! vectors are combined into a single signed score per user. An evaluation
//! layer correlates the scores against self-reported levels with a
//! vote-count threshold sweep, and a coarse-to-fine grid search tunes the
//! four parameters (d, alpha, beta, delta).
//!
//! With the default `parallel` feature, grid evaluation and implicit-signal
//! extraction run on rayon; disabling it falls back to sequential loops
//! with identical results.

pub mod baselines;
pub mod config;
pub mod dataset;
pub mod eval;
pub mod matrix;
pub mod rank;
pub mod search;
pub mod signals;
pub mod synth;

pub use config::{RankConfig, SignalType};
pub use dataset::{Answer, AnswerId, DatasetError, Level, Polarity, User, UserId, VoteDataset, VoteEvent};
pub use eval::{CorrelationResult, GoldLabels, SweepRecord, SweepReport};
pub use matrix::{CountMatrix, DampedMatrix, PowerIteration, StochasticMatrix};
pub use rank::ProficiencyRank;
pub use search::SearchResult;
pub use signals::SignalSet;
