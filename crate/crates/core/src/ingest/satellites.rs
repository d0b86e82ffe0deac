use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::rows::{check_sat_id, read_rows};
use super::{IngestError, Result};

pub const SATELLITE_HEADER: [&str; 3] = ["sat_id", "azimuth_deg", "elevation_deg"];

/// Sky position of one satellite, fixed over a generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteSighting {
    pub sat_id: String,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
}

pub fn parse_satellite_csv(text: &str) -> Result<Vec<SatelliteSighting>> {
    let rows = read_rows(text, &SATELLITE_HEADER)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for row in &rows {
        let sat_id = row.str(0).to_string();
        check_sat_id(row.line, &sat_id)?;
        let azimuth_deg = row.f64(1, "azimuth_deg")?;
        if !(0.0..360.0).contains(&azimuth_deg) {
            return Err(IngestError::RangeViolation { line: row.line, field: "azimuth_deg" });
        }
        let elevation_deg = row.f64(2, "elevation_deg")?;
        if !(0.0..=90.0).contains(&elevation_deg) {
            return Err(IngestError::RangeViolation { line: row.line, field: "elevation_deg" });
        }
        if !seen.insert(sat_id.clone()) {
            return Err(IngestError::MalformedRow { line: row.line, reason: format!("duplicate satellite {sat_id}") });
        }
        out.push(SatelliteSighting { sat_id, azimuth_deg, elevation_deg });
    }
    Ok(out)
}

pub fn write_satellite_csv(sats: &[SatelliteSighting]) -> String {
    let mut out = SATELLITE_HEADER.join(",");
    out.push('\n');
    for s in sats {
        let _ = writeln!(out, "{},{},{}", s.sat_id, s.azimuth_deg, s.elevation_deg);
    }
    out
}
