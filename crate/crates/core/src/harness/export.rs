use std::path::Path;

use super::convergence::ConvergenceTable;
use super::front::FrontStudy;
use crate::error::{Error, Result};
use crate::scalarize::ParetoFront;

/// Header and records of a parsed CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvData {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parses field `(row, col)` as a float; empty fields are `None`.
    pub fn float(&self, row: usize, col: usize) -> Result<Option<f64>> {
        let s = self
            .rows
            .get(row)
            .and_then(|r| r.get(col))
            .ok_or(Error::IndexOutOfRange {
                index: row,
                len: self.rows.len(),
            })?;
        if s.is_empty() {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
    }
}

/// Nine significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.8e}")
}

/// At most ten decimals, trailing zeros dropped; for labels and file names.
pub fn short_decimal(x: f64) -> String {
    let s = format!("{x:.10}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn write_records(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Parse(format!("csv encoding: {e}"));
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(r).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Parse(format!("csv encoding: {e}")))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Columns `param1, param2, j1, j2, iterations, converged`.
pub fn write_front_csv(front: &ParetoFront, path: &Path) -> Result<()> {
    let header: Vec<String> = ["param1", "param2", "j1", "j2", "iterations", "converged"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = front
        .entries
        .iter()
        .map(|e| {
            let [p1, p2] = e.parameter();
            let r = &e.report;
            vec![
                format_float(p1),
                format_float(p2),
                format_float(r.objectives.j1),
                format_float(r.objectives.j2),
                r.iterations.to_string(),
                r.converged.to_string(),
            ]
        })
        .collect();
    write_records(path, &header, &rows)
}

/// Column `h` then one error column per parameter; the last row holds the
/// fitted rates under `h = "rate"`.
pub fn write_convergence_csv(table: &ConvergenceTable, path: &Path) -> Result<()> {
    let mut header = vec!["h".to_string()];
    header.extend(table.labels.iter().cloned());
    let mut rows: Vec<Vec<String>> = table
        .hs
        .iter()
        .zip(&table.errors)
        .map(|(h, row)| {
            std::iter::once(format_float(*h))
                .chain(row.iter().map(|e| format_float(*e)))
                .collect()
        })
        .collect();
    rows.push(
        std::iter::once("rate".to_string())
            .chain(table.rates.iter().map(|r| opt(*r)))
            .collect(),
    );
    write_records(path, &header, &rows)
}

/// Column `h` then one front-error column per parameter index.
pub fn write_front_error_csv(study: &FrontStudy, path: &Path) -> Result<()> {
    let n = study.num_parameters();
    let mut header = vec!["h".to_string()];
    header.extend((1..=n).map(|i| format!("e{i}")));
    let rows: Vec<Vec<String>> = study
        .hs
        .iter()
        .zip(&study.errors)
        .map(|(h, row)| {
            std::iter::once(format_float(*h))
                .chain((0..n).map(|i| opt(row.get(i).copied().flatten())))
                .collect()
        })
        .collect();
    write_records(path, &header, &rows)
}

/// Reads a CSV file with a header row.
pub fn parse_csv(path: &Path) -> Result<CsvData> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    })?;
    let to_err = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    let header = r
        .headers()
        .map_err(to_err)?
        .iter()
        .map(String::from)
        .collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|rec| rec.iter().map(String::from).collect())
                .map_err(to_err)
        })
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(CsvData { header, rows })
}
