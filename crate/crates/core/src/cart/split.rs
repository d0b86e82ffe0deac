use std::cmp::Ordering;

use super::TreeParams;
use crate::ingest::{FeatureVector, LabeledSample};

/// Chosen axis-aligned split: `feature <= threshold` goes left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent Gini minus the size-weighted Gini of the two children.
    pub impurity_decrease: f64,
}

/// Candidate score `sum(cL^2)/nL + sum(cR^2)/nR`, held as an exact fraction.
/// Larger is purer.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(left: &[u64; 3], n_left: u64, right: &[u64; 3], n_right: u64) -> Self {
        let sq = |c: &[u64; 3]| c.iter().map(|&x| x as u128 * x as u128).sum::<u128>();
        Score { num: sq(left) * n_right as u128 + sq(right) * n_left as u128, den: n_left as u128 * n_right as u128 }
    }

    fn cmp(&self, other: &Score) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

pub(super) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo / 2.0 + hi / 2.0;
    // adjacent floats: keep `hi` on the right
    if mid >= hi {
        lo
    } else {
        mid
    }
}

/// Best split of the rows at `indices` under `params`; `None` when no
/// admissible split strictly lowers impurity by at least
/// `params.min_impurity_decrease`.
pub(super) fn best_split_rows(rows: &[[f64; 3]], labels: &[u8], indices: &[usize], params: &TreeParams) -> Option<Split> {
    let n = indices.len() as u64;
    if n < 2 {
        return None;
    }
    let mut totals = [0u64; 3];
    for &i in indices {
        totals[labels[i] as usize] += 1;
    }
    let min_leaf = params.min_samples_leaf.max(1) as u64;

    let mut order: Vec<usize> = indices.to_vec();
    let mut best: Option<(Score, usize, f64)> = None;
    for feature in 0..FeatureVector::COUNT {
        order.sort_unstable_by(|&a, &b| rows[a][feature].total_cmp(&rows[b][feature]));
        let mut left = [0u64; 3];
        for pos in 0..order.len() - 1 {
            left[labels[order[pos]] as usize] += 1;
            let lo = rows[order[pos]][feature];
            let hi = rows[order[pos + 1]][feature];
            if lo >= hi {
                continue;
            }
            let n_left = pos as u64 + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right = [totals[0] - left[0], totals[1] - left[1], totals[2] - left[2]];
            let score = Score::new(&left, n_left, &right, n_right);
            // strict improvement keeps the lowest feature, then the lowest threshold
            if best.as_ref().is_none_or(|(b, _, _)| score.cmp(b) == Ordering::Greater) {
                best = Some((score, feature, midpoint(lo, hi)));
            }
        }
    }

    let (score, feature, threshold) = best?;
    let parent_sq: u128 = totals.iter().map(|&c| c as u128 * c as u128).sum();
    // score > parent_sq / n  <=>  strictly positive decrease
    if score.num * n as u128 <= parent_sq * score.den {
        return None;
    }
    let nf = n as f64;
    let impurity_decrease = (score.value() - parent_sq as f64 / nf) / nf;
    if impurity_decrease < params.min_impurity_decrease {
        return None;
    }
    Some(Split { feature, threshold, impurity_decrease })
}

/// Exhaustive search over all features and midpoints of consecutive distinct
/// values; ties go to the lowest feature index, then the lowest threshold.
pub fn best_split(samples: &[LabeledSample], params: &TreeParams) -> Option<Split> {
    let rows: Vec<[f64; 3]> = samples.iter().map(|s| s.features.to_array()).collect();
    let labels: Vec<u8> = samples.iter().map(|s| s.label.index() as u8).collect();
    let indices: Vec<usize> = (0..samples.len()).collect();
    best_split_rows(&rows, &labels, &indices, params)
}
