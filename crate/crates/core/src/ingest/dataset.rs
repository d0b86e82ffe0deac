use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rows::{check_sat_id, read_rows};
use super::{IngestError, Result};
use crate::{ClassCounts, SignalClass};

pub const DATASET_HEADER: [&str; 7] =
    ["scene_id", "epoch", "sat_id", "elevation_deg", "cn0_rhcp_dbhz", "cn0_diff_dbhz", "label"];

/// Classifier input: elevation, RHCP C/N0 and the RHCP-LHCP C/N0 difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub elevation_deg: f64,
    pub cn0_rhcp_dbhz: f64,
    pub cn0_diff_dbhz: f64,
}

impl FeatureVector {
    pub const COUNT: usize = 3;
    pub const NAMES: [&'static str; 3] = ["elevation_deg", "cn0_rhcp_dbhz", "cn0_diff_dbhz"];

    pub fn new(elevation_deg: f64, cn0_rhcp_dbhz: f64, cn0_diff_dbhz: f64) -> Self {
        FeatureVector { elevation_deg, cn0_rhcp_dbhz, cn0_diff_dbhz }
    }

    pub fn get(&self, index: usize) -> f64 {
        match index {
            0 => self.elevation_deg,
            1 => self.cn0_rhcp_dbhz,
            2 => self.cn0_diff_dbhz,
            _ => panic!("feature index {index} out of range"),
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.elevation_deg, self.cn0_rhcp_dbhz, self.cn0_diff_dbhz]
    }

    pub fn from_array(values: [f64; 3]) -> Self {
        FeatureVector::new(values[0], values[1], values[2])
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite()) && (0.0..=90.0).contains(&self.elevation_deg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub scene_id: String,
    pub epoch: f64,
    pub sat_id: String,
    #[serde(default)]
    pub lhcp_imputed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub label: SignalClass,
    pub provenance: Provenance,
}

/// An ordered, tagged collection of labeled samples with cached class counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    partition_tag: String,
    samples: Vec<LabeledSample>,
    class_counts: ClassCounts,
}

impl Dataset {
    pub fn partition_tag(&self) -> &str {
        &self.partition_tag
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn class_counts(&self) -> ClassCounts {
        self.class_counts
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<LabeledSample> {
        self.samples
    }

    pub fn with_tag(mut self, partition_tag: impl Into<String>) -> Self {
        self.partition_tag = partition_tag.into();
        self
    }

    /// New dataset holding the samples at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        build_dataset(indices.iter().map(|&i| self.samples[i].clone()).collect(), self.partition_tag.clone())
    }

    /// Whether the cached counts still match the samples.
    pub fn counts_coherent(&self) -> bool {
        ClassCounts::from_labels(self.samples.iter().map(|s| s.label)) == self.class_counts
    }
}

pub fn build_dataset(samples: Vec<LabeledSample>, partition_tag: impl Into<String>) -> Dataset {
    let class_counts = ClassCounts::from_labels(samples.iter().map(|s| s.label));
    Dataset { partition_tag: partition_tag.into(), samples, class_counts }
}

/// Draws exactly `per_class` samples of every class, keeping source order.
pub fn stratified_subsample(dataset: &Dataset, per_class: u64, seed: u64) -> Result<Dataset> {
    for class in SignalClass::ALL {
        let available = dataset.class_counts[class];
        if available < per_class {
            return Err(IngestError::InsufficientClassSamples { class, available, requested: per_class });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(per_class as usize * 3);
    for class in SignalClass::ALL {
        let mut idx: Vec<usize> =
            dataset.samples.iter().enumerate().filter(|(_, s)| s.label == class).map(|(i, _)| i).collect();
        idx.shuffle(&mut rng);
        chosen.extend_from_slice(&idx[..per_class as usize]);
    }
    chosen.sort_unstable();
    Ok(dataset.select(&chosen))
}

pub fn parse_dataset_csv(text: &str, partition_tag: impl Into<String>) -> Result<Dataset> {
    let rows = read_rows(text, &DATASET_HEADER)?;
    let mut samples = Vec::with_capacity(rows.len());
    for row in &rows {
        let line = row.line;
        let scene_id = row.str(0).to_string();
        if scene_id.is_empty() {
            return Err(IngestError::MalformedRow { line, reason: "empty scene_id".into() });
        }
        let epoch = row.f64(1, "epoch")?;
        let sat_id = row.str(2).to_string();
        check_sat_id(line, &sat_id)?;
        let elevation_deg = row.f64(3, "elevation_deg")?;
        if !(0.0..=90.0).contains(&elevation_deg) {
            return Err(IngestError::RangeViolation { line, field: "elevation_deg" });
        }
        let cn0_rhcp_dbhz = row.f64(4, "cn0_rhcp_dbhz")?;
        let cn0_diff_dbhz = row.f64(5, "cn0_diff_dbhz")?;
        let label: SignalClass =
            row.str(6).parse().map_err(|e| IngestError::MalformedRow { line, reason: format!("{e}") })?;
        samples.push(LabeledSample {
            features: FeatureVector { elevation_deg, cn0_rhcp_dbhz, cn0_diff_dbhz },
            label,
            provenance: Provenance { scene_id, epoch, sat_id, lhcp_imputed: false },
        });
    }
    Ok(build_dataset(samples, partition_tag))
}

/// Serializes the samples; `lhcp_imputed` is not part of the file format.
pub fn write_dataset_csv(dataset: &Dataset) -> String {
    let mut out = DATASET_HEADER.join(",");
    out.push('\n');
    for s in &dataset.samples {
        let f = &s.features;
        let p = &s.provenance;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.scene_id, p.epoch, p.sat_id, f.elevation_deg, f.cn0_rhcp_dbhz, f.cn0_diff_dbhz, s.label
        );
    }
    out
}
