//! Time-series CSV: header `t,n1,n2,N,duan[,r,epsilon]`, LF endings, every
//! value as `{:.15e}`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::timeseries::{Row, SeriesError, TimeSeries};

const BASE_HEADER: [&str; 5] = ["t", "n1", "n2", "N", "duan"];
const SQUEEZE_HEADER: [&str; 2] = ["r", "epsilon"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("record {record}: {reason}")]
    Value { record: usize, reason: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn fmt(v: f64) -> String {
    format!("{v:.15e}")
}

/// Writes `ts` to any sink. Squeeze columns appear only when every row
/// carries them.
pub fn write_timeseries<W: Write>(ts: &TimeSeries, sink: W) -> Result<(), CsvError> {
    let squeeze = ts.has_squeeze_columns();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    let mut header: Vec<&str> = BASE_HEADER.to_vec();
    if squeeze {
        header.extend(SQUEEZE_HEADER);
    }
    w.write_record(&header)?;
    for row in ts.rows() {
        let mut rec = vec![
            fmt(row.t),
            fmt(row.n1),
            fmt(row.n2),
            fmt(row.n_total),
            fmt(row.duan),
        ];
        if let (true, Some(sq)) = (squeeze, row.squeeze) {
            rec.push(fmt(sq.r));
            rec.push(fmt(sq.epsilon));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timeseries_csv(ts: &TimeSeries, path: impl AsRef<Path>) -> Result<(), CsvError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_timeseries(ts, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Columns recovered from a time-series CSV. `r` and `epsilon` are empty
/// when the file has no squeeze columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvColumns {
    pub rows: Vec<Row>,
    pub r: Vec<f64>,
    pub epsilon: Vec<f64>,
}

pub fn read_timeseries<R: Read>(source: R) -> Result<CsvColumns, CsvError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let squeeze = if header == BASE_HEADER {
        false
    } else if header.len() == 7 && header[..5] == BASE_HEADER && header[5..] == SQUEEZE_HEADER {
        true
    } else {
        return Err(CsvError::Header(header));
    };
    let mut out = CsvColumns::default();
    let mut series = TimeSeries::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CsvError::Value {
                record: i + 1,
                reason: e.to_string(),
            })?;
        let row = Row {
            t: vals[0],
            n1: vals[1],
            n2: vals[2],
            n_total: vals[3],
            duan: vals[4],
            squeeze: None,
        };
        series.push(row)?;
        out.rows.push(row);
        if squeeze {
            out.r.push(vals[5]);
            out.epsilon.push(vals[6]);
        }
    }
    Ok(out)
}
