//! Personality-aware neighborhood collaborative filtering.
//!
//! The crate builds user neighborhoods from two similarity signals, a
//! Pearson correlation over co-rated items and a Pearson correlation over
//! personality trait vectors, blends them with a cold-start weight that
//! decays as a user accumulates ratings, and predicts ratings with a
//! mean-centered weighted aggregate over the neighborhood.
//!
//! Five recommender variants share that machinery: three trait models
//! (five-factor, three-factor, six-factor), a discrete sixteen-type model
//! where neighborhoods are type-equality classes, and a hybrid that switches
//! between trait thresholds and type matching depending on how much history
//! the target user has.
//!
//! [`evaluation`] replays a dataset chronologically, revealing each user's
//! first `b` views and scoring the rest as a held-out set, to measure
//! precision, recall and F-measure as functions of history length.
//! [`data`] supplies dataset ingestion, canonical persistence and a seeded
//! synthetic generator; every code path is deterministic given its inputs.

pub mod data;
pub mod evaluation;
pub mod personality;
pub mod recommender;
pub mod similarity;
