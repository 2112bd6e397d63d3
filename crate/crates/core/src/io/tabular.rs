//! Comma-separated numeric tables.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::spca::DataMatrix;

/// A numeric table with optional column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub names: Option<Vec<String>>,
}

pub fn read_table(path: impl AsRef<Path>, has_header: bool) -> Result<Table> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_table(file, path, has_header)
}

pub(crate) fn parse_table<R: std::io::Read>(input: R, path: &Path, has_header: bool) -> Result<Table> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let names = if has_header {
        let h = reader.headers().map_err(|e| perr(1, e.to_string()))?;
        Some(h.iter().map(str::to_string).collect::<Vec<_>>())
    } else {
        None
    };
    let mut cols = names.as_ref().map(Vec::len);
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            perr(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match cols {
            Some(c) if c != record.len() => {
                return Err(perr(line, format!("expected {c} columns, found {}", record.len())));
            }
            None => cols = Some(record.len()),
            _ => {}
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| perr(line, format!("column {}: {cell:?} is not a finite number", j + 1)))?;
            values.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(perr(0, "no data rows".into()));
    }
    Ok(Table {
        rows,
        cols,
        values,
        names,
    })
}

/// Samples in rows, variables in columns. The result is not centered.
pub fn load_csv_data(path: impl AsRef<Path>, has_header: bool) -> Result<(DataMatrix, Option<Vec<String>>)> {
    let t = read_table(path, has_header)?;
    Ok((DataMatrix::new(t.rows, t.cols, t.values)?, t.names))
}

/// A square covariance or correlation matrix stored as CSV, such as the
/// Pitprops matrix.
pub fn load_csv_matrix(path: impl AsRef<Path>, has_header: bool) -> Result<(SymmetricMatrix, Option<Vec<String>>)> {
    let t = read_table(path, has_header)?;
    if t.rows != t.cols {
        return Err(Error::invalid(format!("covariance table is {} x {}, expected square", t.rows, t.cols)));
    }
    Ok((SymmetricMatrix::from_dense(t.rows, t.values)?, t.names))
}
