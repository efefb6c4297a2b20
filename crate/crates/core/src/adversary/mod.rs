//! Attacks against LDP collections.
//!
//! - [`plausible`]: guessing a value from a single report, closed-form and
//!   exact accuracies, multi-survey accuracy.
//! - [`reident`]: linking accumulated profiles to background records.
//! - [`inference`]: recovering the sampled attribute behind RS+FD / RS+RFD
//!   tuples with a trained classifier.
//! - [`classifier`]: feature encoding and the default Naive Bayes model.

pub mod classifier;
pub mod inference;
pub mod plausible;
pub mod reident;

pub use classifier::{Classifier, LearningSet, NaiveBayesTrainer, Trainer};
pub use inference::{AttackModel, Inference};
pub use plausible::{
    analytic_acc, exact_acc, multi_collection_acc, predict_value, simulate_multi_collection, CollectionMode,
};
pub use reident::{AttackerProfile, BackgroundKnowledge, ReidentConfig, ReidentOutcome};
