use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::{Common, Format};

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// CSV text with the schema comment on the first line.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(hsd_core::io::write_schema_comment(Vec::new())?);
    wtr.write_record(header)?;
    for row in rows {
        wtr.write_record(row)?;
    }
    Ok(wtr.into_inner().map_err(|e| e.into_error())?)
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes a single report as JSON or CSV, to `<out-dir>/<stem>.<ext>` or stdout.
pub fn emit<T: Serialize>(common: &Common, stem: &str, value: &T, csv: impl FnOnce() -> Result<Vec<u8>>) -> Result<()> {
    let (bytes, ext) = match common.format {
        Format::Json => (json_bytes(value)?, "json"),
        Format::Csv => (csv()?, "csv"),
    };
    match &common.out_dir {
        Some(dir) => write_file(dir, &format!("{stem}.{ext}"), &bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).context("writing to stdout")?;
            Ok(())
        }
    }
}

pub fn num(v: f64) -> String {
    v.to_string()
}
