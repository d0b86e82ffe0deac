//! Parsing, validation, stream pairing and cataloging of dual-polarized
//! observation data.

mod catalog;
mod dataset;
mod observation;
mod rows;
mod satellites;

pub use catalog::{parse_catalog_csv, write_catalog_csv, CatalogEntry, CATALOG_HEADER};
pub use dataset::{
    build_dataset, parse_dataset_csv, stratified_subsample, write_dataset_csv, Dataset, FeatureVector,
    LabeledSample, Provenance, DATASET_HEADER,
};
pub use observation::{
    pair_receiver_streams, parse_channel_csv, parse_observation_csv, write_channel_csv, write_observation_csv,
    ChannelRecord, ObservationRecord, Polarization, DEFAULT_MAX_SKEW_S, LHCP_TRACKING_FLOOR_DBHZ,
    OBSERVATION_HEADER,
};

pub use satellites::{parse_satellite_csv, write_satellite_csv, SatelliteSighting, SATELLITE_HEADER};

use crate::SignalClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: expected header {expected:?}, found {found:?}")]
    BadHeader { line: u64, expected: String, found: String },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: field {field} out of range")]
    RangeViolation { line: u64, field: &'static str },
    #[error("duplicate key (epoch {epoch}, satellite {sat_id})")]
    DuplicateKey { epoch: f64, sat_id: String },
    #[error("{stream} stream is not sorted by epoch at record {index}")]
    UnsortedStream { stream: Polarization, index: usize },
    #[error("class {class} has {available} samples, {requested} requested")]
    InsufficientClassSamples { class: SignalClass, available: u64, requested: u64 },
    #[error("catalog line {line}: partition {partition_tag} total {total} != class sum {sum}")]
    CatalogMismatch { line: u64, partition_tag: String, total: u64, sum: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, IngestError>;
