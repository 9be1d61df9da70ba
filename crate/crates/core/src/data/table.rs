use std::io::Read;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

use super::schema::{Target, FEATURE_NAMES, N_FEATURES, REQUIRED_FIVE, TARGET_NAMES};

/// Parsed CSV with optional numeric cells. Absent means the cell was empty
/// or not a finite number.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub provenance: String,
}

impl RawTable {
    /// Renders the table back to CSV text. Numbers use the shortest
    /// round-trip decimal form, absent cells become empty fields, so output
    /// is byte-deterministic for a given table.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| c.map(|v| v.to_string()).unwrap_or_default())
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn parse_cell(token: &str) -> Option<f64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => None,
    }
}

/// Reads a headered CSV. Cells that are empty or non-numeric become absent;
/// the header line is preserved verbatim.
pub fn parse_csv(reader: impl Read, provenance: &str) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header: Vec<String> = match rdr.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => {
            h.iter().map(str::to_owned).collect()
        }
        _ => {
            return Err(Error::Format {
                line: 1,
                message: "missing header line".into(),
            })
        }
    };
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format {
            line: i + 2,
            message: match e.kind() {
                csv::ErrorKind::UnequalLengths { .. } => format!(
                    "row has a different number of cells than the header ({} columns)",
                    header.len()
                ),
                _ => e.to_string(),
            },
        })?;
        rows.push(record.iter().map(parse_cell).collect());
    }
    Ok(RawTable {
        header,
        rows,
        provenance: provenance.to_owned(),
    })
}

/// Deletion report produced by `clean`.
#[derive(Debug, Clone)]
pub struct CleanReport {
    pub rows_in: usize,
    pub rows_out: usize,
    pub removed_fraction: f64,
    /// Missing-cell count per schema column, in schema order (features then targets).
    pub missing_by_column: Vec<(String, usize)>,
    /// Rows missing at least one of the survey pipeline's five required columns.
    pub missing_required_five: usize,
}

impl CleanReport {
    /// Flat key=value text block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("rows_in={}\n", self.rows_in));
        out.push_str(&format!("rows_out={}\n", self.rows_out));
        out.push_str(&format!("removed_fraction={}\n", self.removed_fraction));
        out.push_str(&format!(
            "missing_required_five={}\n",
            self.missing_required_five
        ));
        for (name, count) in &self.missing_by_column {
            out.push_str(&format!("missing.{name}={count}\n"));
        }
        out
    }
}

/// Rows with all 18 schema columns present, in canonical order, plus the
/// names of any ignored extra input columns.
#[derive(Debug, Clone)]
pub struct CleanedRows {
    pub rows: Vec<Vec<f64>>, // each length 18: 16 features then both targets
    pub extra_columns: Vec<String>,
}

/// Drops every row with an absent cell in any schema column. Stricter than
/// the source pipeline's five-column rule; the five-column sub-count is still
/// reported for comparison with real extracts.
pub fn clean(table: &RawTable) -> Result<(CleanedRows, CleanReport)> {
    let schema_cols: Vec<&str> = FEATURE_NAMES
        .iter()
        .chain(TARGET_NAMES.iter())
        .copied()
        .collect();
    let mut positions = Vec::with_capacity(schema_cols.len());
    for &name in &schema_cols {
        match table.header.iter().position(|h| h == name) {
            Some(p) => positions.push(p),
            None => return Err(Error::Schema(format!("input is missing column '{name}'"))),
        }
    }
    let extra_columns: Vec<String> = table
        .header
        .iter()
        .filter(|h| !schema_cols.contains(&h.as_str()))
        .cloned()
        .collect();

    let required_positions: Vec<usize> = REQUIRED_FIVE
        .iter()
        .map(|&name| schema_cols.iter().position(|&c| c == name).unwrap())
        .collect();

    let mut missing = vec![0usize; schema_cols.len()];
    let mut missing_required_five = 0usize;
    let mut rows = Vec::new();
    for raw in &table.rows {
        let mut keep = true;
        let mut row = Vec::with_capacity(schema_cols.len());
        for (ci, &pos) in positions.iter().enumerate() {
            match raw[pos] {
                Some(v) => row.push(v),
                None => {
                    missing[ci] += 1;
                    keep = false;
                }
            }
        }
        if !keep {
            if required_positions
                .iter()
                .any(|&ci| raw[positions[ci]].is_none())
            {
                missing_required_five += 1;
            }
            continue;
        }
        rows.push(row);
    }

    let rows_in = table.rows.len();
    let rows_out = rows.len();
    let report = CleanReport {
        rows_in,
        rows_out,
        removed_fraction: if rows_in == 0 {
            0.0
        } else {
            (rows_in - rows_out) as f64 / rows_in as f64
        },
        missing_by_column: schema_cols
            .iter()
            .map(|s| s.to_string())
            .zip(missing)
            .collect(),
        missing_required_five,
    };
    Ok((
        CleanedRows {
            rows,
            extra_columns,
        },
        report,
    ))
}

/// Feature matrix plus the chosen response column.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Matrix, // n x 16
    pub target: Matrix,   // n x 1
    pub target_name: Target,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds a Dataset from cleaned rows; the other target column is discarded.
/// Row order is preserved.
pub fn assemble(cleaned: &CleanedRows, target: Target) -> Result<Dataset> {
    if cleaned.rows.is_empty() {
        return Err(Error::Argument(
            "no rows survived cleaning; nothing to assemble".into(),
        ));
    }
    let target_col = match target {
        Target::PersonTrips => N_FEATURES,
        Target::VehicleTrips => N_FEATURES + 1,
    };
    let n = cleaned.rows.len();
    let mut features = Vec::with_capacity(n * N_FEATURES);
    let mut targets = Vec::with_capacity(n);
    for row in &cleaned.rows {
        features.extend_from_slice(&row[..N_FEATURES]);
        targets.push(row[target_col]);
    }
    Ok(Dataset {
        features: Matrix::from_vec(n, N_FEATURES, features)?,
        target: Matrix::from_vec(n, 1, targets)?,
        target_name: target,
    })
}
