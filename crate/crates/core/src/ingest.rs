//! Delimited-text ingestion of time-to-event data.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::survival::{ObservationRecord, PopulationSample};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvColumns {
    pub time: String,
    pub status: String,
    pub group: String,
    pub delimiter: u8,
}

impl Default for CsvColumns {
    fn default() -> Self {
        Self {
            time: "time".into(),
            status: "status".into(),
            group: "group".into(),
            delimiter: b',',
        }
    }
}

/// Populations read from a file. `names[i]` is the group label of `samples[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub samples: Vec<PopulationSample>,
}

impl Dataset {
    pub fn record_count(&self) -> usize {
        self.samples.iter().map(PopulationSample::len).sum()
    }
}

pub fn ingest_csv(path: &Path, columns: &CsvColumns) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, columns)
}

/// One population per distinct group label, in order of first appearance.
/// Row numbers in errors are file line numbers (the header is line 1).
pub fn ingest_reader<R: Read>(reader: R, columns: &CsvColumns) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(columns.delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::ColumnNotFound(name.to_string()))
    };
    let (ti, si, gi) = (find(&columns.time)?, find(&columns.status)?, find(&columns.group)?);

    let mut names: Vec<String> = Vec::new();
    let mut records: Vec<Vec<ObservationRecord>> = Vec::new();
    let mut missing = 0usize;
    let mut first_missing = 0usize;
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::BadRow {
            row: line,
            message: e.to_string(),
        })?;
        let cell = |idx: usize| row.get(idx).unwrap_or("");
        let (t, s, g) = (cell(ti), cell(si), cell(gi));
        if [t, s, g].iter().any(|c| c.is_empty() || c.eq_ignore_ascii_case("na")) {
            if missing == 0 {
                first_missing = line;
            }
            missing += 1;
            continue;
        }
        let time: f64 = t.parse().map_err(|_| Error::BadRow {
            row: line,
            message: format!("cannot parse time '{t}'"),
        })?;
        if !time.is_finite() || time < 0.0 {
            return Err(Error::BadRow {
                row: line,
                message: format!("time must be a non-negative number, got '{t}'"),
            });
        }
        let event = match s {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::BadRow {
                    row: line,
                    message: format!("status must be 0 or 1, got '{other}'"),
                })
            }
        };
        let population = match names.iter().position(|n| n == g) {
            Some(p) => p,
            None => {
                names.push(g.to_string());
                records.push(Vec::new());
                names.len() - 1
            }
        };
        records[population].push(ObservationRecord {
            time,
            event,
            population,
        });
    }
    if missing > 0 {
        return Err(Error::MissingValues {
            count: missing,
            first_row: first_missing,
        });
    }
    if names.is_empty() {
        return Err(Error::NoRecords);
    }
    let samples = records
        .into_iter()
        .enumerate()
        .map(|(label, recs)| PopulationSample::new(label, recs))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { names, samples })
}
