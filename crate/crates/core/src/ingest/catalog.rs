use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::rows::read_rows;
use super::{Dataset, IngestError, Result};
use crate::ClassCounts;

pub const CATALOG_HEADER: [&str; 5] = ["partition_tag", "total", "nlos", "los", "los_nlos"];

/// Size bookkeeping for one dataset partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub partition_tag: String,
    pub total: u64,
    pub counts: ClassCounts,
}

impl CatalogEntry {
    pub fn from_dataset(dataset: &Dataset) -> Self {
        CatalogEntry {
            partition_tag: dataset.partition_tag().to_string(),
            total: dataset.len() as u64,
            counts: dataset.class_counts(),
        }
    }
}

/// Parses a catalog and checks that every stated total equals its class sum.
pub fn parse_catalog_csv(text: &str) -> Result<Vec<CatalogEntry>> {
    let rows = read_rows(text, &CATALOG_HEADER)?;
    let mut out = Vec::with_capacity(rows.len());
    for row in &rows {
        let partition_tag = row.str(0).to_string();
        let total = row.u64(1, "total")?;
        let counts = ClassCounts([row.u64(2, "nlos")?, row.u64(3, "los")?, row.u64(4, "los_nlos")?]);
        if counts.total() != total {
            return Err(IngestError::CatalogMismatch { line: row.line, partition_tag, total, sum: counts.total() });
        }
        out.push(CatalogEntry { partition_tag, total, counts });
    }
    Ok(out)
}

pub fn write_catalog_csv(entries: &[CatalogEntry]) -> String {
    let mut out = CATALOG_HEADER.join(",");
    out.push('\n');
    for e in entries {
        let [a, b, c] = e.counts.0;
        let _ = writeln!(out, "{},{},{},{},{}", e.partition_tag, e.total, a, b, c);
    }
    out
}
