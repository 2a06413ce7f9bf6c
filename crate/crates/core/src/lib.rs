//! Semantic nets of e-learning objects: typed relations with an algebra of
//! inverses, symmetry and transitivity, a rule-based reasoner that closes and
//! checks a repository, a statement store with reified hyperlinks and a small
//! query language for link contexts, keyword-based taxonomy classification of
//! transcripts, and pause-aware segmentation of lecture recordings.

pub mod classifier;
pub mod dot;
pub mod error;
pub mod experiment;
pub mod io;
pub mod model;
pub mod num;
pub mod query;
pub mod reasoner;
pub mod segmenter;
pub mod store;

pub use error::{Error, Result};

use num_rational::Ratio;

/// Exact score type for classification and similarity thresholds.
pub type ExactScore = Ratio<i64>;

pub type Envelope = segmenter::LoudnessEnvelope<f64>;
pub type Envelope32 = segmenter::LoudnessEnvelope<f32>;
pub type SegmenterConfig = segmenter::SegmenterConfig<f64>;
pub type Segment = segmenter::Segment<f64>;
pub type TriggerEvent = segmenter::TriggerEvent<f64>;
pub type ClassifierConfig = classifier::ClassifierConfig<f64>;
pub type ExactClassifierConfig = classifier::ClassifierConfig<ExactScore>;
pub type HeuristicConfig = reasoner::HeuristicConfig<f64>;
pub type PRReport = classifier::PRReport<f64>;
