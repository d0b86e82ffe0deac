use crate::ingest::{FeatureVector, LabeledSample, ObservationRecord, Provenance};
use crate::SignalClass;

pub fn extract_features(record: &ObservationRecord) -> FeatureVector {
    FeatureVector::new(record.elevation_deg, record.cn0_rhcp_dbhz, record.cn0_rhcp_dbhz - record.cn0_lhcp_dbhz)
}

/// Pairs an observation with its ground truth, keeping the imputation flag.
pub fn labeled_sample(record: &ObservationRecord, label: SignalClass, scene_id: &str) -> LabeledSample {
    LabeledSample {
        features: extract_features(record),
        label,
        provenance: Provenance {
            scene_id: scene_id.to_string(),
            epoch: record.epoch,
            sat_id: record.sat_id.clone(),
            lhcp_imputed: record.lhcp_imputed,
        },
    }
}
