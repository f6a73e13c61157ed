//! CSV input.
//!
//! Test data use the header `x1,…,xd,y1,y2` (any column order, `d ≥ 1`
//! inferred from the `x` columns). Matrix data for `ci-matrix` take any
//! header with at least three columns. Rows are 1-based data rows; the
//! header is line 1.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use thiserror::Error;
use wpc_core::Dataset;

/// Fewest data rows accepted by the CLI.
pub const MIN_ROWS: usize = 10;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("data row {row} has {got} fields, the header has {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("unexpected column '{0}' (expected x1..xd, y1, y2)")]
    UnknownColumn(String),
    #[error("non-numeric value '{value}' in data row {row}, column '{column}'")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("non-finite value '{value}' in data row {row}, column '{column}'")]
    NonFinite {
        row: usize,
        column: String,
        value: String,
    },
    #[error("n too small: {n} data rows, need at least {min}")]
    TooFewRows { n: usize, min: usize },
    #[error("too few columns: {p}, need at least {min}")]
    TooFewColumns { p: usize, min: usize },
}

/// Header names and columns of a numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

fn open(path: &Path) -> Result<File, InputError> {
    File::open(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses a numeric CSV table; every cell must be a finite number.
pub fn read_table<R: Read>(reader: R) -> Result<Table, InputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut columns = vec![Vec::new(); names.len()];
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => InputError::RowLength {
                row,
                expected: *expected_len as usize,
                got: *len as usize,
            },
            _ => csv_error(e),
        })?;
        for ((field, name), column) in record.iter().zip(&names).zip(&mut columns) {
            let value: f64 = field.parse().map_err(|_| InputError::NonNumeric {
                row,
                column: name.clone(),
                value: field.to_owned(),
            })?;
            if !value.is_finite() {
                return Err(InputError::NonFinite {
                    row,
                    column: name.clone(),
                    value: field.to_owned(),
                });
            }
            column.push(value);
        }
    }
    Ok(Table { names, columns })
}

fn csv_error(e: csv::Error) -> InputError {
    InputError::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// Maps a table with columns `x1..xd, y1, y2` to a dataset.
pub fn dataset_from_table(table: &Table) -> Result<Dataset, InputError> {
    let mut x_cols: Vec<Option<usize>> = Vec::new();
    let (mut y1, mut y2) = (None, None);
    for (c, name) in table.names.iter().enumerate() {
        let slot = match name.as_str() {
            "y1" => &mut y1,
            "y2" => &mut y2,
            _ => {
                let j = name
                    .strip_prefix('x')
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&j| {
                        (1..=table.names.len()).contains(&j) && !name[1..].starts_with('0')
                    })
                    .ok_or_else(|| InputError::UnknownColumn(name.clone()))?;
                if x_cols.len() < j {
                    x_cols.resize(j, None);
                }
                &mut x_cols[j - 1]
            }
        };
        if slot.replace(c).is_some() {
            return Err(InputError::DuplicateColumn(name.clone()));
        }
    }
    if x_cols.is_empty() {
        return Err(InputError::MissingColumn("x1".into()));
    }
    let x_cols: Vec<usize> = x_cols
        .iter()
        .enumerate()
        .map(|(j, c)| c.ok_or_else(|| InputError::MissingColumn(format!("x{}", j + 1))))
        .collect::<Result<_, _>>()?;
    let y1 = y1.ok_or_else(|| InputError::MissingColumn("y1".into()))?;
    let y2 = y2.ok_or_else(|| InputError::MissingColumn("y2".into()))?;

    let n = table.rows();
    if n < MIN_ROWS {
        return Err(InputError::TooFewRows { n, min: MIN_ROWS });
    }
    let d = x_cols.len();
    let mut x = Vec::with_capacity(n * d);
    for i in 0..n {
        x.extend(x_cols.iter().map(|&c| table.columns[c][i]));
    }
    // Finiteness and shape were checked above.
    Ok(
        Dataset::new(x, d, table.columns[y1].clone(), table.columns[y2].clone())
            .expect("validated table"),
    )
}

pub fn read_dataset(path: &Path) -> Result<Dataset, InputError> {
    dataset_from_table(&read_table(open(path)?)?)
}

/// Reads a table of at least three variables and [`MIN_ROWS`] rows.
pub fn read_matrix(path: &Path) -> Result<Table, InputError> {
    let table = read_table(open(path)?)?;
    let mut seen = std::collections::HashSet::new();
    for name in &table.names {
        if !seen.insert(name) {
            return Err(InputError::DuplicateColumn(name.clone()));
        }
    }
    if table.names.len() < 3 {
        return Err(InputError::TooFewColumns {
            p: table.names.len(),
            min: 3,
        });
    }
    if table.rows() < MIN_ROWS {
        return Err(InputError::TooFewRows {
            n: table.rows(),
            min: MIN_ROWS,
        });
    }
    Ok(table)
}
