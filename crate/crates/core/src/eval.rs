//! Accuracy, per-class recall and confusion matrices per dataset partition.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cart::TreeModel;
use crate::ingest::Dataset;
use crate::SignalClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot evaluate on an empty dataset")]
    EmptyDataset,
    #[error("no partitions given")]
    NoPartitions,
}

/// Rows are ground truth, columns predictions, both in canonical class order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; 3]; 3]);

impl ConfusionMatrix {
    pub fn record(&mut self, truth: SignalClass, predicted: SignalClass) {
        self.0[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.0[i][i]).sum()
    }

    pub fn row_sum(&self, class: SignalClass) -> u64 {
        self.0[class.index()].iter().sum()
    }

    pub fn col_sum(&self, class: SignalClass) -> u64 {
        self.0.iter().map(|r| r[class.index()]).sum()
    }

    pub fn merged(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += other.0[i][j];
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub partition_tag: String,
    pub n: u64,
    pub overall_accuracy: f64,
    /// Diagonal over truth-row sum; classes with no truth samples are absent.
    pub per_class_recall: BTreeMap<SignalClass, f64>,
    pub per_class_precision: BTreeMap<SignalClass, f64>,
    pub per_class_f1: BTreeMap<SignalClass, f64>,
    pub matrix: ConfusionMatrix,
}

impl EvalReport {
    pub fn from_matrix(partition_tag: impl Into<String>, matrix: ConfusionMatrix) -> Result<Self, EvalError> {
        let n = matrix.total();
        if n == 0 {
            return Err(EvalError::EmptyDataset);
        }
        let mut per_class_recall = BTreeMap::new();
        let mut per_class_precision = BTreeMap::new();
        let mut per_class_f1 = BTreeMap::new();
        for c in SignalClass::ALL {
            let hit = matrix.0[c.index()][c.index()] as f64;
            let recall = (matrix.row_sum(c) > 0).then(|| hit / matrix.row_sum(c) as f64);
            let precision = (matrix.col_sum(c) > 0).then(|| hit / matrix.col_sum(c) as f64);
            if let Some(r) = recall {
                per_class_recall.insert(c, r);
            }
            if let Some(p) = precision {
                per_class_precision.insert(c, p);
            }
            if let (Some(r), Some(p)) = (recall, precision) {
                per_class_f1.insert(c, if r + p > 0.0 { 2.0 * r * p / (r + p) } else { 0.0 });
            }
        }
        Ok(EvalReport {
            partition_tag: partition_tag.into(),
            n,
            overall_accuracy: matrix.trace() as f64 / n as f64,
            per_class_recall,
            per_class_precision,
            per_class_f1,
            matrix,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn confusion(model: &TreeModel, dataset: &Dataset) -> ConfusionMatrix {
    let mut m = ConfusionMatrix::default();
    for s in dataset.samples() {
        m.record(s.label, model.predict(&s.features));
    }
    m
}

pub fn evaluate(model: &TreeModel, dataset: &Dataset) -> Result<EvalReport, EvalError> {
    EvalReport::from_matrix(dataset.partition_tag(), confusion(model, dataset))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionComparison {
    pub partitions: Vec<EvalReport>,
    /// Entrywise sum of the partition matrices, tagged `A+B+...`.
    pub pooled: EvalReport,
}

pub fn compare_partitions(model: &TreeModel, partitions: &[Dataset]) -> Result<PartitionComparison, EvalError> {
    if partitions.is_empty() {
        return Err(EvalError::NoPartitions);
    }
    let reports = partitions.par_iter().map(|d| evaluate(model, d)).collect::<Result<Vec<_>, _>>()?;
    let matrix = reports.iter().fold(ConfusionMatrix::default(), |acc, r| acc.merged(&r.matrix));
    let tag = reports.iter().map(|r| r.partition_tag.as_str()).collect::<Vec<_>>().join("+");
    let pooled = EvalReport::from_matrix(tag, matrix)?;
    Ok(PartitionComparison { partitions: reports, pooled })
}

fn pct(v: Option<&f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.2}%", v * 100.0))
}

/// Plain-text accuracy table, one row per report.
pub fn render_table(reports: &[&EvalReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<16} {:>7} {:>9} {:>9} {:>9} {:>9}", "partition", "n", "overall", "NLOS", "LOS", "LOS+NLOS");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<16} {:>7} {:>9} {:>9} {:>9} {:>9}",
            r.partition_tag,
            r.n,
            pct(Some(&r.overall_accuracy)),
            pct(r.per_class_recall.get(&SignalClass::NlosOnly)),
            pct(r.per_class_recall.get(&SignalClass::LosOnly)),
            pct(r.per_class_recall.get(&SignalClass::LosNlos)),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use SignalClass::*;

    #[test]
    fn hand_counted_matrix() {
        let m = ConfusionMatrix([[8, 1, 1], [0, 10, 0], [2, 2, 6]]);
        let r = EvalReport::from_matrix("T", m).unwrap();
        assert_eq!(r.n, 30);
        assert!((r.overall_accuracy - 0.8).abs() < 1e-15);
        assert!((r.per_class_recall[&NlosOnly] - 0.8).abs() < 1e-15);
        assert_eq!(r.per_class_recall[&LosOnly], 1.0);
        assert!((r.per_class_recall[&LosNlos] - 0.6).abs() < 1e-15);
        assert!((r.per_class_precision[&NlosOnly] - 0.8).abs() < 1e-15);
        assert!((r.per_class_precision[&LosOnly] - 10.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn identity_matrix_is_perfect() {
        let r = EvalReport::from_matrix("T", ConfusionMatrix([[3, 0, 0], [0, 4, 0], [0, 0, 5]])).unwrap();
        assert_eq!(r.overall_accuracy, 1.0);
        assert!(r.per_class_recall.values().all(|&v| v == 1.0));
    }

    #[test]
    fn missing_class_recall_absent() {
        let r = EvalReport::from_matrix("T", ConfusionMatrix([[3, 1, 0], [0, 4, 0], [0, 0, 0]])).unwrap();
        assert!(!r.per_class_recall.contains_key(&LosNlos));
        assert!(!r.per_class_precision.contains_key(&LosNlos));
        assert_eq!(r.per_class_recall.len(), 2);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert_eq!(EvalReport::from_matrix("T", ConfusionMatrix::default()), Err(EvalError::EmptyDataset));
    }

    #[test]
    fn json_field_names() {
        let r = EvalReport::from_matrix("T2", ConfusionMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["partition_tag", "n", "overall_accuracy", "per_class_recall", "per_class_precision", "matrix"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["per_class_recall"]["LOS+NLOS"], 1.0);
        assert_eq!(v["matrix"][0], serde_json::json!([1, 0, 0]));
    }

    #[test]
    fn table_two_decimals() {
        let r = EvalReport::from_matrix("T2+T3", ConfusionMatrix([[6447, 3553, 0], [0, 1, 0], [0, 0, 0]])).unwrap();
        let t = render_table(&[&r]);
        assert!(t.contains("64.47%"), "{t}");
        assert!(t.contains(" -"));
    }
}
