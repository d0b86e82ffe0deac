use csv::{ReaderBuilder, StringRecord};

use super::{IngestError, Result};

pub(super) struct Row {
    pub line: u64,
    pub record: StringRecord,
}

impl Row {
    pub fn str(&self, idx: usize) -> &str {
        &self.record[idx]
    }

    pub fn f64(&self, idx: usize, field: &'static str) -> Result<f64> {
        let raw = &self.record[idx];
        let value: f64 = raw.parse().map_err(|_| IngestError::MalformedRow {
            line: self.line,
            reason: format!("{field}: cannot parse {raw:?} as a number"),
        })?;
        if !value.is_finite() {
            return Err(IngestError::RangeViolation { line: self.line, field });
        }
        Ok(value)
    }

    pub fn u64(&self, idx: usize, field: &'static str) -> Result<u64> {
        let raw = &self.record[idx];
        raw.parse().map_err(|_| IngestError::MalformedRow {
            line: self.line,
            reason: format!("{field}: cannot parse {raw:?} as a count"),
        })
    }
}

/// Reads an unquoted comma-separated stream, checks the header exactly and
/// returns the data rows with their 1-based line numbers.
pub(super) fn read_rows(text: &str, header: &[&str]) -> Result<Vec<Row>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut seen_header = false;
    for result in reader.records() {
        let record = result.map_err(|e| IngestError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if !seen_header {
            if record.iter().ne(header.iter().copied()) {
                return Err(IngestError::BadHeader {
                    line,
                    expected: header.join(","),
                    found: record.iter().collect::<Vec<_>>().join(","),
                });
            }
            seen_header = true;
            continue;
        }
        if record.len() != header.len() {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        rows.push(Row { line, record });
    }
    if !seen_header {
        return Err(IngestError::BadHeader { line: 1, expected: header.join(","), found: String::new() });
    }
    Ok(rows)
}

/// Satellite ids are opaque: a constellation letter followed by alphanumerics.
pub(super) fn check_sat_id(line: u64, sat_id: &str) -> Result<()> {
    let mut chars = sat_id.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(|c| c.is_ascii_alphanumeric());
    if ok {
        Ok(())
    } else {
        Err(IngestError::MalformedRow { line, reason: format!("invalid satellite id {sat_id:?}") })
    }
}
