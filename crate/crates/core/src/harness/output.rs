//! Sweep results as CSV.

use std::io::{Read, Write};
use std::path::Path;

use super::{SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const HEADER: [&str; 10] = [
    "series",
    "axis_name",
    "axis_value",
    "maj_frac",
    "maj_se",
    "min_frac",
    "min_se",
    "trials",
    "theory_majority",
    "theory_minority",
];

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.series.clone(),
            result.axis_name.clone(),
            r.axis_value.to_string(),
            format!("{:.6}", r.maj_frac),
            format!("{:.6}", r.maj_se),
            format!("{:.6}", r.min_frac),
            format!("{:.6}", r.min_se),
            r.trials.to_string(),
            r.theory_majority.to_string(),
            r.theory_minority.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(result, file).map_err(|e| csv_err(path, e))
}

pub fn read_csv<R: Read>(input: R, path: &Path) -> Result<SweepResult> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(HEADER) {
        return Err(csv_err(path, format!("unexpected header {:?}", header)));
    }
    let mut axis_name = String::new();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = i + 2;
        let bad = |field: &str| csv_err(path, format!("line {line}: bad {field}"));
        let num = |idx: usize| rec[idx].parse::<f64>().map_err(|_| bad(HEADER[idx]));
        axis_name = rec[1].to_string();
        rows.push(SweepRow {
            series: rec[0].to_string(),
            axis_value: num(2)?,
            maj_frac: num(3)?,
            maj_se: num(4)?,
            min_frac: num(5)?,
            min_se: num(6)?,
            trials: rec[7].parse().map_err(|_| bad("trials"))?,
            theory_majority: rec[8].parse().map_err(|_| bad("theory_majority"))?,
            theory_minority: rec[9].parse().map_err(|_| bad("theory_minority"))?,
        });
    }
    Ok(SweepResult { axis_name, rows })
}

pub fn parse_csv(path: &Path) -> Result<SweepResult> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, path)
}
