use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_rows, route};
use super::{CartError, Result, TreeParams};
use crate::ingest::Dataset;
use crate::SignalClass;

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPointResult {
    pub params: TreeParams,
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub grid: Vec<GridPointResult>,
    pub best_index: usize,
    pub best: TreeParams,
}

/// max_depth {3, 5, 8, 12, unlimited} x min_samples_leaf {1, 5, 20, 50}
/// x min_samples_split {2, 10, 40}.
pub fn default_grid() -> Vec<TreeParams> {
    let mut grid = Vec::with_capacity(60);
    for max_depth in [Some(3), Some(5), Some(8), Some(12), None] {
        for min_samples_leaf in [1, 5, 20, 50] {
            for min_samples_split in [2, 10, 40] {
                grid.push(TreeParams { max_depth, min_samples_split, min_samples_leaf, min_impurity_decrease: 0.0 });
            }
        }
    }
    grid
}

/// Stratified folds: each class is shuffled and dealt round-robin, with the
/// dealing offset carried across classes so fold sizes differ by at most one.
pub fn kfold_stratified(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(CartError::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    let counts = dataset.class_counts();
    for class in SignalClass::ALL {
        if counts[class] < k as u64 {
            return Err(CartError::TooFewSamples { class, count: counts[class], k });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; dataset.len()];
    let mut offset = 0;
    for class in SignalClass::ALL {
        let mut idx: Vec<usize> =
            dataset.samples().iter().enumerate().filter(|(_, s)| s.label == class).map(|(i, _)| i).collect();
        idx.shuffle(&mut rng);
        for (j, &i) in idx.iter().enumerate() {
            assignment[i] = (offset + j) % k;
        }
        offset = (offset + idx.len()) % k;
    }
    Ok((0..k)
        .map(|f| {
            let (validation, train): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| assignment[i] == f);
            Fold { train, validation }
        })
        .collect())
}

/// Simplest-model-first ordering among equal mean accuracies.
fn prefer(a: &TreeParams, b: &TreeParams) -> Ordering {
    let depth = |p: &TreeParams| p.max_depth.map_or(u64::MAX, u64::from);
    depth(a).cmp(&depth(b)).then(b.min_samples_leaf.cmp(&a.min_samples_leaf))
}

/// Mean validation accuracy of every grid point over one shared set of
/// stratified folds. Cells run in parallel; the report does not depend on
/// scheduling.
pub fn grid_search(dataset: &Dataset, grid: &[TreeParams], k: usize, seed: u64) -> Result<CvReport> {
    if grid.is_empty() {
        return Err(CartError::EmptyGrid);
    }
    for p in grid {
        p.validate()?;
    }
    let folds = kfold_stratified(dataset, k, seed)?;
    let rows: Vec<[f64; 3]> = dataset.samples().iter().map(|s| s.features.to_array()).collect();
    let labels: Vec<u8> = dataset.samples().iter().map(|s| s.label.index() as u8).collect();

    let cells: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..k).map(move |f| (g, f))).collect();
    let accuracies: Vec<f64> = cells
        .par_iter()
        .map(|&(g, f)| {
            let fold = &folds[f];
            let train_rows: Vec<[f64; 3]> = fold.train.iter().map(|&i| rows[i]).collect();
            let train_labels: Vec<u8> = fold.train.iter().map(|&i| labels[i]).collect();
            let nodes = fit_rows(&train_rows, &train_labels, &grid[g]);
            let correct =
                fold.validation.iter().filter(|&&i| route(&nodes, &rows[i]).index() as u8 == labels[i]).count();
            correct as f64 / fold.validation.len() as f64
        })
        .collect();

    let results: Vec<GridPointResult> = grid
        .iter()
        .enumerate()
        .map(|(g, params)| {
            let fold_accuracies = accuracies[g * k..(g + 1) * k].to_vec();
            let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
            GridPointResult { params: *params, mean_accuracy, fold_accuracies }
        })
        .collect();

    let mut best_index = 0;
    for (i, r) in results.iter().enumerate().skip(1) {
        let b = &results[best_index];
        let better = match r.mean_accuracy.total_cmp(&b.mean_accuracy) {
            Ordering::Greater => true,
            Ordering::Equal => prefer(&r.params, &b.params) == Ordering::Less,
            Ordering::Less => false,
        };
        if better {
            best_index = i;
        }
    }
    Ok(CvReport { k, seed, best: results[best_index].params, best_index, grid: results })
}
