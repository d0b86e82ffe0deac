use super::{CartError, Result};
use crate::ClassCounts;

/// Gini impurity `1 - sum p_i^2` of a class distribution.
pub fn gini(counts: &ClassCounts) -> Result<f64> {
    let total = counts.total();
    if total == 0 {
        return Err(CartError::EmptyNode);
    }
    let n = total as f64;
    Ok(1.0 - counts.0.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
}
