//! CSV and JSON tables of sweep rows.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::SweepRow;
use crate::error::{Error, Result};

/// Column names, in order. Parameters first, then results.
pub const COLUMNS: [&str; 22] = [
    "gap_a",
    "gap_ratio",
    "gap_b",
    "accel",
    "radius",
    "boundary_distance",
    "sep",
    "P_A",
    "P_B",
    "ReC",
    "ImC",
    "absC",
    "ReC1",
    "ImC1",
    "ReC2",
    "ImC2",
    "Lplus",
    "Lminus",
    "I",
    "slack",
    "err",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown table format `{other}`"))),
        }
    }
}

/// Numeric cells of a row, `None` where there is no value.
fn numbers(row: &SweepRow) -> [Option<f64>; 21] {
    let p = &row.params;
    let mut out = [None; 21];
    out[..7].copy_from_slice(&[
        Some(p.gap_a),
        Some(p.gap_ratio),
        Some(p.gap_b),
        Some(p.accel),
        Some(p.radius),
        p.boundary_distance,
        Some(p.sep),
    ]);
    if let Some(v) = &row.values {
        let vals = [
            v.p_a,
            v.p_b,
            v.c.re,
            v.c.im,
            v.c.norm(),
            v.c1.re,
            v.c1.im,
            v.c2.re,
            v.c2.im,
            v.l_plus,
            v.l_minus,
            v.mutual_info,
            v.slack,
            v.err,
        ];
        for (slot, x) in out[7..].iter_mut().zip(vals) {
            *slot = Some(x);
        }
    }
    out
}

/// Twelve significant digits.
fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format_number(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Writes `rows` to `out`. Empty input is an error.
pub fn emit_table<W: Write>(rows: &[SweepRow], format: TableFormat, out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no rows to emit".into()));
    }
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            for row in rows {
                let mut record: Vec<String> = numbers(row)
                    .iter()
                    .map(|x| x.map(format_number).unwrap_or_default())
                    .collect();
                record.push(row.status.to_string());
                w.write_record(&record)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        TableFormat::Json => {
            let array: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (key, x) in COLUMNS.iter().zip(numbers(row)) {
                        obj.insert(key.to_string(), x.map(json_number).unwrap_or(Value::Null));
                    }
                    obj.insert("status".into(), Value::String(row.status.to_string()));
                    Value::Object(obj)
                })
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &array)?;
            out.write_all(b"\n").map_err(csv::Error::from)?;
        }
    }
    Ok(())
}

/// Writes the table to `path`, reporting I/O failures with the path.
pub fn write_table(rows: &[SweepRow], format: TableFormat, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    emit_table(rows, format, &mut buf).map_err(|e| match e {
        Error::Csv(c) if c.is_io_error() => match c.into_kind() {
            csv::ErrorKind::Io(source) => io(source),
            other => Error::Config(format!("{other:?}")),
        },
        other => other,
    })?;
    buf.flush().map_err(io)
}
