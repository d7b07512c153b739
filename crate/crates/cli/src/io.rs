use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fwnoise::FunctionalSample;
use ndarray::Array2;

use crate::Failure;

/// Reads a `T x G` matrix; every row must have the same number of fields.
pub fn read_sample(path: &Path, header: bool) -> Result<FunctionalSample, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;

    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    let skip = header as usize + 1;
    for (row, record) in reader.records().enumerate() {
        let at = format!("row {row} (line {})", row + skip);
        let record = record.map_err(|e| Failure::Input(format!("{at}: {e}")))?;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Failure::Input(format!(
                "{at}: expected {w} fields, found {}",
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Failure::Input(format!("{at}, column {col}: not a number: {field:?}"))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let w =
        width.ok_or_else(|| Failure::Input(format!("{} contains no data rows", path.display())))?;
    let m = Array2::from_shape_vec((rows, w), values).expect("row lengths were checked");
    FunctionalSample::from_rows(m).map_err(Failure::from)
}

/// Writes the sample with 17 significant digits per value.
pub fn write_sample(path: &Path, x: &FunctionalSample) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for row in x.values().rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.write_all(b",")?;
            }
            write!(out, "{v:.16e}")?;
            first = false;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}
