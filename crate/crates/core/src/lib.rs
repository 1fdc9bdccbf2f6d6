//! Hyperpartisan text detection through engineered stylometric features.
//!
//! The crate turns raw news articles into sparse feature rows built from
//! several families — TFiDF word \[1,2\]-grams and character 3-grams (with
//! optional Naive-Bayes ratio scaling), induced bias-lexicon scores,
//! per-lexicon cue counts, vocabulary-richness statistics and readability
//! indices — and classifies them with L2-regularized logistic regression.
//!
//! The main entry points are [`pipeline::fit_pipeline`] /
//! [`pipeline::FittedPipeline::transform`] for featurization,
//! [`classifier::train`] / [`classifier::predict_proba`] for the model, and
//! [`eval::ablation_run`] / [`eval::grid_search_scales`] for experiments.
//!
//! ```
//! use partisan_core::prelude::*;
//!
//! let docs = vec![
//!     Document::labeled("a", "the senate passed the budget bill today", false),
//!     Document::labeled("b", "wake up sheeple, the traitors are selling you out", true),
//! ];
//! let corpus = Corpus::new("tiny", docs).unwrap();
//! let config = FeatureConfig::default();
//! let fitted = fit_pipeline(&corpus, &config, &[]).unwrap();
//! let row = fitted.transform(&corpus.documents()[0]);
//! assert_eq!(row.dim(), fitted.total_dim());
//! ```

pub mod archive;
pub mod classifier;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicons;
pub mod pipeline;
pub mod readability;
pub mod sparse;
pub mod stylometry;
pub mod textproc;
pub mod vectorizer;

pub use classifier::{ModelWeights, Solver, TrainOptions};
pub use corpus::{Corpus, CorpusFormat, Document};
pub use error::{Error, Result};
pub use eval::Metrics;
pub use lexicons::{Lexicon, SoScore};
pub use pipeline::{FeatureConfig, FeatureFamily, FittedPipeline};
pub use sparse::SparseVector;
pub use textproc::TokenizedDoc;
pub use vectorizer::{Channel, NbRatios, Vocabulary};

/// Convenience re-exports for downstream binaries and tests.
pub mod prelude {
    pub use crate::classifier::{predict_proba, train, ModelWeights, Solver, TrainOptions};
    pub use crate::corpus::{load_corpus, split_corpus, Corpus, CorpusFormat, Document};
    pub use crate::error::{Error, Result};
    pub use crate::eval::{ablation_run, evaluate, grid_search_scales, Metrics, NamedConfig};
    pub use crate::lexicons::{
        induce_bias_lexicons, load_lexicon, semantic_orientation, Lexicon, SoScore,
    };
    pub use crate::pipeline::{
        fit_pipeline, load_pipeline, save_pipeline, FeatureConfig, FeatureFamily, FittedPipeline,
    };
    pub use crate::sparse::SparseVector;
}
