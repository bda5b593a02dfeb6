//! Reading and writing mass vectors as CSV (`index,mass`) or JSON.
//!
//! CSV input may carry `#` comment lines and an optional header row. Indices
//! must be nonnegative integers; missing indices are zero. JSON input is either
//! a bare array of masses or an object with a `masses` array.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::distributions::Pmf;
use crate::error::{Error, Result};

/// Schema tag written in the leading comment of CSV output.
pub const CSV_SCHEMA: &str = "steinops-pmf/1";

/// Parses masses from CSV text.
pub fn masses_from_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut masses: Vec<f64> = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Parse(format!(
                "row {}: expected two columns (index, mass), got {}",
                row + 1,
                record.len()
            )));
        }
        let index = match record[0].parse::<usize>() {
            Ok(i) => i,
            Err(_) if row == 0 => continue, // header row
            Err(_) => {
                return Err(Error::Parse(format!(
                    "row {}: bad index `{}`",
                    row + 1,
                    &record[0]
                )))
            }
        };
        let mass: f64 = record[1]
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad mass `{}`", row + 1, &record[1])))?;
        if masses.len() <= index {
            masses.resize(index + 1, 0.0);
        }
        masses[index] = mass;
    }
    if masses.is_empty() {
        return Err(Error::Empty("mass table"));
    }
    Ok(masses)
}

/// Parses masses from JSON: an array of numbers or `{"masses": [...]}`.
pub fn masses_from_json<R: Read>(reader: R) -> Result<Vec<f64>> {
    let value: serde_json::Value = serde_json::from_reader(reader)?;
    let array = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(map) => map
            .get("masses")
            .ok_or_else(|| Error::Parse("JSON object lacks a `masses` array".into()))?,
        _ => return Err(Error::Parse("expected a JSON array of masses".into())),
    };
    let masses: Vec<f64> = serde_json::from_value(array.clone())?;
    if masses.is_empty() {
        return Err(Error::Empty("mass table"));
    }
    Ok(masses)
}

/// Reads masses from a file, choosing the format by extension (`.json`, else CSV).
pub fn read_masses(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path)?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        masses_from_json(std::io::BufReader::new(file))
    } else {
        masses_from_csv(std::io::BufReader::new(file))
    }
}

#[derive(Serialize)]
struct PmfRecord<'a> {
    masses: &'a [f64],
    tail_mass: f64,
    tol: f64,
}

/// Writes `{"masses": [...], "tail_mass": t, "tol": e}`.
pub fn write_pmf_json<W: Write>(pmf: &Pmf, mut out: W) -> Result<()> {
    let record = PmfRecord {
        masses: pmf.masses(),
        tail_mass: pmf.tail_mass(),
        tol: pmf.tol(),
    };
    serde_json::to_writer_pretty(&mut out, &record)?;
    writeln!(out)?;
    Ok(())
}

/// Writes a schema comment, the tail and tolerance as comments, then
/// `index,mass` rows.
pub fn write_pmf_csv<W: Write>(pmf: &Pmf, mut out: W) -> Result<()> {
    writeln!(out, "# schema: {CSV_SCHEMA}")?;
    writeln!(out, "# tail_mass: {:?}", pmf.tail_mass())?;
    writeln!(out, "# tol: {:?}", pmf.tol())?;
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["index", "mass"])?;
    for (j, m) in pmf.masses().iter().enumerate() {
        wtr.write_record([j.to_string(), format!("{m:?}")])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::pmf_poisson;

    #[test]
    fn csv_with_header_comments_and_gaps() {
        let text = "# a severity\nindex,mass\n0, 0.25\n2,0.75\n";
        assert_eq!(
            masses_from_csv(text.as_bytes()).unwrap(),
            vec![0.25, 0.0, 0.75]
        );
        assert!(masses_from_csv("0,0.5,1\n".as_bytes()).is_err());
        assert!(masses_from_csv("0,0.5\nx,0.5\n".as_bytes()).is_err());
        assert!(masses_from_csv("# nothing\n".as_bytes()).is_err());
    }

    #[test]
    fn json_array_and_object() {
        assert_eq!(
            masses_from_json("[0.5, 0.5]".as_bytes()).unwrap(),
            vec![0.5, 0.5]
        );
        assert_eq!(
            masses_from_json(r#"{"masses": [1.0], "tail_mass": 0}"#.as_bytes()).unwrap(),
            vec![1.0]
        );
        assert!(masses_from_json("3".as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = pmf_poisson(1.7, 1e-12).unwrap();
        let mut buf = Vec::new();
        write_pmf_csv(&p, &mut buf).unwrap();
        assert_eq!(masses_from_csv(buf.as_slice()).unwrap(), p.masses());
        let mut buf = Vec::new();
        write_pmf_json(&p, &mut buf).unwrap();
        assert_eq!(masses_from_json(buf.as_slice()).unwrap(), p.masses());
    }
}
