//! Versioned CSV files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

pub const SCHEMA_LINE: &str = "# qjump-sim schema v1";

pub const TRAJECTORY_HEADER: &[&str] = &[
    "t", "x_mean", "p_mean", "theta", "amplitude", "s_x", "s_y", "s_z", "p_plus", "purity", "dr", "telegraph",
];

/// Nine significant digits, exponent form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes the schema line, `header`, then `rows`; `trailer` lines are
/// appended as `#` comments.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I, trailer: &[String]) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut buf = BufWriter::new(file);
    writeln!(buf, "{SCHEMA_LINE}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::csv(path, e))?;
    }
    let mut buf = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    for line in trailer {
        writeln!(buf, "# {line}").map_err(|e| CliError::io(path, e))?;
    }
    buf.flush().map_err(|e| CliError::io(path, e))
}

/// Column-addressable numeric table read back from a schema-v1 CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Validation(format!("column `{name}` missing")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut first = String::new();
    BufReader::new(&file)
        .read_line(&mut first)
        .map_err(|e| CliError::io(path, e))?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(CliError::Validation(format!(
            "{}: missing `{SCHEMA_LINE}` header line",
            path.display()
        )));
    }
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let row = rec
            .iter()
            .map(|f| {
                if f.is_empty() {
                    Ok(f64::NAN)
                } else {
                    f.parse::<f64>()
                        .map_err(|_| CliError::Validation(format!("{}: bad number `{f}`", path.display())))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}
