// SPDX-License-Identifier: MIT OR Apache-2.0

//! File formats: single-column series CSV, JSON documents, sweep tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cpd_core::evaluate::SweepRow;
use cpd_core::TimeSeries;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::CliError;

/// Reads one sample per line, no header.
pub fn read_series(path: &Path) -> Result<TimeSeries, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if record.len() != 1 {
            return Err(CliError::usage(format!(
                "{}:{}: expected one value per line, found {}",
                path.display(),
                line + 1,
                record.len()
            )));
        }
        let value: f64 = record[0].parse().map_err(|_| {
            CliError::usage(format!(
                "{}:{}: not a number: {:?}",
                path.display(),
                line + 1,
                &record[0]
            ))
        })?;
        values.push(value);
    }
    TimeSeries::new(values).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::usage(format!("{}: {e}", path.display()))
}

/// Writes one sample per line in shortest round-trip decimal notation.
pub fn write_series(path: &Path, series: &TimeSeries) -> Result<(), CliError> {
    let mut out = create(path)?;
    for v in series.iter() {
        writeln!(out, "{v}").map_err(io_error(path))?;
    }
    out.flush().map_err(io_error(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let file = File::open(path).map_err(io_error(path))?;
    serde_json::from_reader(file).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    writeln!(out).map_err(io_error(path))?;
    out.flush().map_err(io_error(path))
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    }
    writer.flush().map_err(io_error(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(io_error(path))
}
