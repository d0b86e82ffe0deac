use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::rows::{check_sat_id, read_rows, Row};
use super::{IngestError, Result};

pub const OBSERVATION_HEADER: [&str; 6] =
    ["epoch", "sat_id", "elevation_deg", "azimuth_deg", "cn0_rhcp_dbhz", "cn0_lhcp_dbhz"];

/// C/N0 assigned to an RHCP epoch whose LHCP channel did not track.
pub const LHCP_TRACKING_FLOOR_DBHZ: f64 = 25.0;

/// Pairing tolerance at an assumed 1 Hz logging rate.
pub const DEFAULT_MAX_SKEW_S: f64 = 0.5;

const SECONDS_PER_WEEK: f64 = 604_800.0;
const CN0_RANGE_DBHZ: (f64, f64) = (10.0, 60.0);

/// One epoch x satellite measurement from the dual-polarized antenna.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord {
    /// GPS time of week, seconds.
    pub epoch: f64,
    pub sat_id: String,
    pub elevation_deg: f64,
    pub azimuth_deg: f64,
    pub cn0_rhcp_dbhz: f64,
    pub cn0_lhcp_dbhz: f64,
    /// Set when `cn0_lhcp_dbhz` is the tracking floor rather than a measurement.
    pub lhcp_imputed: bool,
}

impl ObservationRecord {
    /// RHCP minus LHCP C/N0, dB.
    pub fn cn0_diff_db(&self) -> f64 {
        self.cn0_rhcp_dbhz - self.cn0_lhcp_dbhz
    }
}

/// Output of a single receiver attached to one polarization port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub epoch: f64,
    pub sat_id: String,
    pub elevation_deg: f64,
    pub azimuth_deg: f64,
    pub cn0_dbhz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Rhcp,
    Lhcp,
}

impl Polarization {
    fn cn0_column(self) -> &'static str {
        match self {
            Polarization::Rhcp => "cn0_rhcp_dbhz",
            Polarization::Lhcp => "cn0_lhcp_dbhz",
        }
    }

    fn header(self) -> [&'static str; 5] {
        ["epoch", "sat_id", "elevation_deg", "azimuth_deg", self.cn0_column()]
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::Rhcp => "RHCP",
            Polarization::Lhcp => "LHCP",
        })
    }
}

struct Geometry {
    epoch: f64,
    sat_id: String,
    elevation_deg: f64,
    azimuth_deg: f64,
}

fn parse_geometry(row: &Row) -> Result<Geometry> {
    let line = row.line;
    // `+ 0.0` folds -0.0 into 0.0 so duplicate detection sees one key.
    let epoch = row.f64(0, "epoch")? + 0.0;
    if !(0.0..SECONDS_PER_WEEK).contains(&epoch) {
        return Err(IngestError::RangeViolation { line, field: "epoch" });
    }
    let sat_id = row.str(1).to_string();
    check_sat_id(line, &sat_id)?;
    let elevation_deg = row.f64(2, "elevation_deg")?;
    if !(0.0..=90.0).contains(&elevation_deg) {
        return Err(IngestError::RangeViolation { line, field: "elevation_deg" });
    }
    let azimuth_deg = row.f64(3, "azimuth_deg")?;
    if !(0.0..360.0).contains(&azimuth_deg) {
        return Err(IngestError::RangeViolation { line, field: "azimuth_deg" });
    }
    Ok(Geometry { epoch, sat_id, elevation_deg, azimuth_deg })
}

fn parse_cn0(row: &Row, idx: usize, field: &'static str) -> Result<f64> {
    let v = row.f64(idx, field)?;
    if !(CN0_RANGE_DBHZ.0..=CN0_RANGE_DBHZ.1).contains(&v) {
        return Err(IngestError::RangeViolation { line: row.line, field });
    }
    Ok(v)
}

struct KeySet(HashSet<(u64, String)>);

impl KeySet {
    fn insert(&mut self, epoch: f64, sat_id: &str) -> Result<()> {
        if self.0.insert((epoch.to_bits(), sat_id.to_string())) {
            Ok(())
        } else {
            Err(IngestError::DuplicateKey { epoch, sat_id: sat_id.to_string() })
        }
    }
}

/// Parses an observation CSV into records in file order.
pub fn parse_observation_csv(text: &str) -> Result<Vec<ObservationRecord>> {
    let rows = read_rows(text, &OBSERVATION_HEADER)?;
    let mut keys = KeySet(HashSet::with_capacity(rows.len()));
    let mut out = Vec::with_capacity(rows.len());
    for row in &rows {
        let geo = parse_geometry(row)?;
        let cn0_rhcp_dbhz = parse_cn0(row, 4, "cn0_rhcp_dbhz")?;
        let cn0_lhcp_dbhz = parse_cn0(row, 5, "cn0_lhcp_dbhz")?;
        keys.insert(geo.epoch, &geo.sat_id)?;
        out.push(ObservationRecord {
            epoch: geo.epoch,
            sat_id: geo.sat_id,
            elevation_deg: geo.elevation_deg,
            azimuth_deg: geo.azimuth_deg,
            cn0_rhcp_dbhz,
            cn0_lhcp_dbhz,
            lhcp_imputed: false,
        });
    }
    Ok(out)
}

/// Parses the CSV log of a single receiver on the given polarization port.
pub fn parse_channel_csv(text: &str, polarization: Polarization) -> Result<Vec<ChannelRecord>> {
    let header = polarization.header();
    let rows = read_rows(text, &header)?;
    let mut keys = KeySet(HashSet::with_capacity(rows.len()));
    let mut out = Vec::with_capacity(rows.len());
    for row in &rows {
        let geo = parse_geometry(row)?;
        let cn0_dbhz = parse_cn0(row, 4, polarization.cn0_column())?;
        keys.insert(geo.epoch, &geo.sat_id)?;
        out.push(ChannelRecord {
            epoch: geo.epoch,
            sat_id: geo.sat_id,
            elevation_deg: geo.elevation_deg,
            azimuth_deg: geo.azimuth_deg,
            cn0_dbhz,
        });
    }
    Ok(out)
}

pub fn write_observation_csv(records: &[ObservationRecord]) -> String {
    let mut out = OBSERVATION_HEADER.join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.epoch, r.sat_id, r.elevation_deg, r.azimuth_deg, r.cn0_rhcp_dbhz, r.cn0_lhcp_dbhz
        );
    }
    out
}

pub fn write_channel_csv(records: &[ChannelRecord], polarization: Polarization) -> String {
    let mut out = polarization.header().join(",");
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{},{},{}", r.epoch, r.sat_id, r.elevation_deg, r.azimuth_deg, r.cn0_dbhz);
    }
    out
}

fn check_sorted(records: &[ChannelRecord], stream: Polarization) -> Result<()> {
    match records.windows(2).position(|w| w[1].epoch < w[0].epoch) {
        Some(i) => Err(IngestError::UnsortedStream { stream, index: i + 1 }),
        None => Ok(()),
    }
}

/// Joins the RHCP and LHCP receiver logs into dual-polarized observations.
///
/// Each RHCP record is matched to the LHCP record of the same satellite with
/// the nearest epoch (earlier wins a tie), provided the skew is at most
/// `max_skew_s`. Unmatched RHCP records get the LHCP tracking floor and
/// `lhcp_imputed = true`; unmatched LHCP records are dropped. Output follows
/// RHCP order and carries RHCP epoch and geometry.
pub fn pair_receiver_streams(
    rhcp: &[ChannelRecord],
    lhcp: &[ChannelRecord],
    max_skew_s: f64,
) -> Result<Vec<ObservationRecord>> {
    if !(max_skew_s.is_finite() && max_skew_s >= 0.0) {
        return Err(IngestError::InvalidParameter(format!("max_skew_s must be finite and >= 0, got {max_skew_s}")));
    }
    check_sorted(rhcp, Polarization::Rhcp)?;
    check_sorted(lhcp, Polarization::Lhcp)?;

    let mut by_sat: HashMap<&str, Vec<(f64, f64)>> = HashMap::new();
    for r in lhcp {
        by_sat.entry(r.sat_id.as_str()).or_default().push((r.epoch, r.cn0_dbhz));
    }

    let out = rhcp
        .iter()
        .map(|r| {
            let matched = by_sat.get(r.sat_id.as_str()).and_then(|track| nearest(track, r.epoch, max_skew_s));
            ObservationRecord {
                epoch: r.epoch,
                sat_id: r.sat_id.clone(),
                elevation_deg: r.elevation_deg,
                azimuth_deg: r.azimuth_deg,
                cn0_rhcp_dbhz: r.cn0_dbhz,
                cn0_lhcp_dbhz: matched.unwrap_or(LHCP_TRACKING_FLOOR_DBHZ),
                lhcp_imputed: matched.is_none(),
            }
        })
        .collect();
    Ok(out)
}

fn nearest(track: &[(f64, f64)], epoch: f64, max_skew_s: f64) -> Option<f64> {
    let i = track.partition_point(|&(t, _)| t < epoch);
    let before = i.checked_sub(1).map(|j| track[j]);
    let after = track.get(i).copied();
    let best = match (before, after) {
        (Some(b), Some(a)) => {
            if epoch - b.0 <= a.0 - epoch {
                b
            } else {
                a
            }
        }
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => return None,
    };
    ((best.0 - epoch).abs() <= max_skew_s).then_some(best.1)
}
