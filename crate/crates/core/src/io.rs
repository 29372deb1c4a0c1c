//! CSV point clouds and label files.
//!
//! Point clouds have one row per point and `D²−1` numeric columns; a header
//! row is optional and detected by its first field not being a number. Lines
//! starting with `#` are comments. Files we write start with a
//! `# schema_version=N` comment.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub fn read_points_from<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if i == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, f)| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::input(format!("row {}, column {}: '{f}' is not a finite number", i + 1, col + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::input("point cloud is empty"));
    }
    Ok(rows)
}

pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_points_from(std::fs::File::open(path)?)
}

pub fn write_schema_comment<W: Write>(mut w: W) -> Result<W> {
    writeln!(w, "# schema_version={CSV_SCHEMA_VERSION}")?;
    Ok(w)
}

pub fn write_points_to<W: Write>(writer: W, points: &[Vec<f64>]) -> Result<()> {
    let dim = points.first().map_or(0, Vec::len);
    let mut wtr = csv::Writer::from_writer(write_schema_comment(writer)?);
    wtr.write_record((0..dim).map(|i| format!("x{i}")))?;
    for p in points {
        wtr.write_record(p.iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// `index,<column>...` rows, one per point.
pub fn write_labels_to<W: Write>(writer: W, columns: &[(&str, &[usize])]) -> Result<()> {
    let n = columns.first().map_or(0, |(_, l)| l.len());
    if columns.iter().any(|(_, l)| l.len() != n) {
        return Err(Error::input("label columns differ in length"));
    }
    let mut wtr = csv::Writer::from_writer(write_schema_comment(writer)?);
    let mut header = vec!["index".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    wtr.write_record(&header)?;
    for i in 0..n {
        let mut row = vec![i.to_string()];
        row.extend(columns.iter().map(|(_, l)| l[i].to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
