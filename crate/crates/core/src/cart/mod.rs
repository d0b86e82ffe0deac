//! CART decision tree over the three reception features, with stratified
//! k-fold grid search and a versioned JSON model format.

mod cv;
mod features;
mod impurity;
mod model_io;
mod split;
mod tree;

use serde::{Deserialize, Serialize};

pub use cv::{default_grid, grid_search, kfold_stratified, CvReport, Fold, GridPointResult, DEFAULT_FOLDS, DEFAULT_SEED};
pub use features::{extract_features, labeled_sample};
pub use impurity::gini;
pub use model_io::{load_model, save_model, LoadedModel, MODEL_FORMAT_VERSION};
pub use split::{best_split, Split};
pub use tree::{dataset_fingerprint, fit, Fingerprint, Node, TreeModel};

use crate::SignalClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CartError {
    #[error("impurity of an empty node")]
    EmptyNode,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid tree parameters: {0}")]
    InvalidParams(String),
    #[error("class {class} has {count} samples, fewer than k = {k}")]
    TooFewSamples { class: SignalClass, count: u64, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("corrupt model: {0}")]
    CorruptModel(String),
}

pub type Result<T> = std::result::Result<T, CartError>;

/// Stopping rules for tree induction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until another rule stops it.
    pub max_depth: Option<u32>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub min_impurity_decrease: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_samples_split: 2, min_samples_leaf: 1, min_impurity_decrease: 0.0 }
    }
}

impl TreeParams {
    pub fn with_depth(max_depth: Option<u32>) -> Self {
        TreeParams { max_depth, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(CartError::InvalidParams(format!("min_samples_split {} < 2", self.min_samples_split)));
        }
        if self.min_samples_leaf < 1 {
            return Err(CartError::InvalidParams("min_samples_leaf must be >= 1".into()));
        }
        if !(self.min_impurity_decrease.is_finite() && self.min_impurity_decrease >= 0.0) {
            return Err(CartError::InvalidParams(format!(
                "min_impurity_decrease {} must be finite and >= 0",
                self.min_impurity_decrease
            )));
        }
        Ok(())
    }
}
