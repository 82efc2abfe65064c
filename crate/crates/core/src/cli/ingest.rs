use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::error::{CliError, CliResult};
use crate::pseudo_obs::RawPairs;

/// Minimum number of complete rows for a fit.
pub const MIN_FIT_ROWS: usize = 10;

/// Cells treated as missing rather than malformed.
const MISSING_TOKENS: &[&str] = &["", "na", "nan", "n/a", ".", "null", "none"];

/// Names of the measurement columns and the optional identifier column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnSpec {
    pub x: String,
    pub y: String,
    pub id: Option<String>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            x: "x".into(),
            y: "y".into(),
            id: None,
        }
    }
}

impl FromStr for ColumnSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(format!("empty column name in {s:?}"));
        }
        match parts.as_slice() {
            [x, y] => Ok(Self {
                x: x.to_string(),
                y: y.to_string(),
                id: None,
            }),
            [x, y, id] => Ok(Self {
                x: x.to_string(),
                y: y.to_string(),
                id: Some(id.to_string()),
            }),
            _ => Err(format!("expected x,y[,id], got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputRow {
    pub id: Option<String>,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputTable {
    pub path: PathBuf,
    pub columns: ColumnSpec,
    #[serde(skip)]
    pub rows: Vec<InputRow>,
    pub rows_read: usize,
    /// Rows with a blank-like or non-finite coordinate.
    pub dropped_missing: usize,
    /// Rows with unparseable text (lenient mode only).
    pub dropped_malformed: usize,
}

impl InputTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn raw_pairs(&self) -> CliResult<RawPairs> {
        if self.rows.len() < MIN_FIT_ROWS {
            return Err(CliError::TooFewRows {
                path: self.path.clone(),
                n: self.rows.len(),
                min: MIN_FIT_ROWS,
            });
        }
        let (x, y) = self.rows.iter().map(|r| (r.x, r.y)).unzip();
        Ok(RawPairs::new(x, y)?)
    }
}

enum Cell {
    Value(f64),
    Missing,
    Malformed,
}

fn classify(text: &str) -> Cell {
    let t = text.trim();
    if MISSING_TOKENS.contains(&t.to_ascii_lowercase().as_str()) {
        return Cell::Missing;
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Cell::Value(v),
        Ok(_) => Cell::Missing,
        Err(_) => Cell::Malformed,
    }
}

/// Reads the `columns` of a headered UTF-8 CSV. Rows with a missing
/// coordinate are dropped and counted; unparseable text is an error when
/// `strict`, otherwise dropped and counted separately.
pub fn ingest_csv(path: &Path, columns: &ColumnSpec, strict: bool) -> CliResult<InputTable> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(file);
    let header = reader.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h.trim().trim_start_matches('\u{feff}') == name)
            .ok_or_else(|| CliError::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
                header: header.iter().collect::<Vec<_>>().join(","),
            })
    };
    let ix = find(&columns.x)?;
    let iy = find(&columns.y)?;
    let iid = columns.id.as_deref().map(find).transpose()?;

    let mut table = InputTable {
        path: path.to_path_buf(),
        columns: columns.clone(),
        rows: Vec::new(),
        rows_read: 0,
        dropped_missing: 0,
        dropped_malformed: 0,
    };
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        table.rows_read += 1;
        let line = record.position().map_or(0, |p| p.line());
        let mut values = [0.0; 2];
        let mut missing = false;
        let mut malformed = false;
        for (k, (idx, name)) in [(ix, &columns.x), (iy, &columns.y)].into_iter().enumerate() {
            let text = record.get(idx).unwrap_or("");
            match classify(text) {
                Cell::Value(v) => values[k] = v,
                Cell::Missing => missing = true,
                Cell::Malformed if strict => {
                    return Err(CliError::Malformed {
                        path: path.to_path_buf(),
                        line,
                        column: name.clone(),
                        value: text.to_string(),
                    })
                }
                Cell::Malformed => malformed = true,
            }
        }
        if malformed {
            table.dropped_malformed += 1;
        } else if missing {
            table.dropped_missing += 1;
        } else {
            table.rows.push(InputRow {
                id: iid.map(|i| record.get(i).unwrap_or("").to_string()),
                x: values[0],
                y: values[1],
            });
        }
    }
    Ok(table)
}
