use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

/// Writes the finished buffer to `path`, or to `out` when no path is given.
pub fn emit(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => out.write_all(bytes).context("writing output"),
    }
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    Ok(buf)
}

/// CSV with a leading schema comment and optional `# key: value` lines;
/// every row must match the header.
pub fn csv_bytes(
    schema: &str,
    notes: &[(&str, String)],
    header: &[String],
    rows: &[Vec<String>],
) -> Result<Vec<u8>> {
    let mut text = format!("# schema: {schema}\n");
    for (k, v) in notes {
        text.push_str(&format!("# {k}: {v}\n"));
    }
    let mut buf = text.into_bytes();
    {
        let mut wtr = csv::Writer::from_writer(&mut buf);
        wtr.write_record(header)?;
        for row in rows {
            wtr.write_record(row)?;
        }
        wtr.flush()?;
    }
    Ok(buf)
}

pub fn num(v: f64) -> String {
    format!("{v:?}")
}
