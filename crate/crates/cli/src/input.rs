//! CSV ingestion: one point per row, comma separated, `#` comments allowed.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{CliError, CliResult};

/// A numeric table read from CSV, one row per record.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Resolves a column given by header name or 0-based position.
    pub fn column_index(&self, spec: &str) -> CliResult<usize> {
        if let Some(pos) = self.names.as_ref().and_then(|n| n.iter().position(|c| c == spec)) {
            return Ok(pos);
        }
        match spec.parse::<usize>() {
            Ok(i) if i < self.width() => Ok(i),
            _ => Err(CliError::Usage(format!("no column `{spec}` (use a header name or a 0-based index)"))),
        }
    }

    /// Columns other than `skip` as an `n x N` point matrix.
    pub fn points_without(&self, skip: Option<usize>) -> DMatrix<f64> {
        let keep: Vec<usize> = (0..self.width()).filter(|&c| Some(c) != skip).collect();
        DMatrix::from_fn(keep.len(), self.rows.len(), |k, j| self.rows[j][keep[k]])
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }
}

pub fn read_table(path: &Path, header: bool) -> CliResult<Table> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |line: u64, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let names = if header {
        let h = reader.headers().map_err(|e| parse_err(e.position().map_or(1, |p| p.line()), e.to_string()))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(line, format!("column {c}: `{field}` is not a finite number"))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(CliError::Usage(format!("{}: no data rows", path.display())));
    }
    Ok(Table { names, rows })
}
