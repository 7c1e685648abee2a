use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{sort_points, BenchPoint};

pub const CSV_HEADER: &str =
    "benchmark,total_qubits,nondet_qubits,backend,wall_time_s,status,error_metric,dropped_mass,repeats,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

impl ResultFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> ResultFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ResultFormat::Json,
            _ => ResultFormat::Csv,
        }
    }
}

impl FromStr for ResultFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ResultFormat::Csv),
            "json" => Ok(ResultFormat::Json),
            other => Err(Error::config(format!("unknown result format {other:?}"))),
        }
    }
}

/// Writes rows sorted by (benchmark, n, r, backend). Missing metrics are
/// empty CSV fields or JSON nulls.
pub fn write_results<W: Write>(points: &[BenchPoint], format: ResultFormat, writer: W) -> Result<()> {
    let mut rows = points.to_vec();
    sort_points(&mut rows);
    match format {
        ResultFormat::Csv => {
            let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            out.write_record(CSV_HEADER.split(','))?;
            for row in &rows {
                out.serialize(row)?;
            }
            out.flush()?;
        }
        ResultFormat::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, &rows).map_err(|e| Error::Io(e.into()))?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

pub fn emit_results(points: &[BenchPoint], format: ResultFormat, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    write_results(points, format, &mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(format: ResultFormat, reader: R) -> Result<Vec<BenchPoint>> {
    match format {
        ResultFormat::Csv => {
            let mut input = csv::Reader::from_reader(reader);
            let header: Vec<String> = input.headers()?.iter().map(str::to_string).collect();
            if header.join(",") != CSV_HEADER {
                return Err(Error::Parse(format!("unexpected header {:?}", header.join(","))));
            }
            input.deserialize().map(|row| row.map_err(Error::from)).collect()
        }
        ResultFormat::Json => serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string())),
    }
}
