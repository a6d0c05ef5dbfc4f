//! CSV tables and JSON sidecars.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleSample;
use crate::error::{invalid, Result};
use crate::stats::Histogram;

/// Version string recorded in every sidecar.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Flat per-sample row; vectors are joined with `;`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SampleRow {
    index: u64,
    entropy: f64,
    inv_purity: f64,
    total_energy: f64,
    nu: String,
    invariants: String,
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:e}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn split(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|t| {
            t.parse::<f64>()
                .or_else(|_| invalid(format!("bad number {t:?}")))
        })
        .collect()
}

/// Writes one CSV row per sample.
pub fn write_samples_csv<W: Write>(writer: W, samples: &[EnsembleSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in samples {
        w.serialize(SampleRow {
            index: s.index,
            entropy: s.entropy,
            inv_purity: s.inv_purity,
            total_energy: s.total_energy,
            nu: join(&s.nu),
            invariants: join(&s.invariants),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<EnsembleSample>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize::<SampleRow>()
        .map(|row| {
            let row = row?;
            Ok(EnsembleSample {
                index: row.index,
                entropy: row.entropy,
                inv_purity: row.inv_purity,
                total_energy: row.total_energy,
                nu: split(&row.nu)?,
                invariants: split(&row.invariants)?,
            })
        })
        .collect()
}

/// Writes any sequence of flat records as CSV with a header row.
pub fn write_table_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct HistogramRow {
    lo: f64,
    hi: f64,
    count: u64,
    density: f64,
}

pub fn write_histogram_csv<W: Write>(writer: W, h: &Histogram) -> Result<()> {
    let rows: Vec<HistogramRow> = (0..h.counts.len())
        .map(|k| HistogramRow {
            lo: h.edges[k],
            hi: h.edges[k + 1],
            count: h.counts[k],
            density: h.density[k],
        })
        .collect();
    write_table_csv(writer, &rows)
}

/// JSON sidecar: the payload plus the producing code version.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar<T> {
    pub code_version: String,
    #[serde(flatten)]
    pub content: T,
}

impl<T> Sidecar<T> {
    pub fn new(content: T) -> Self {
        Self {
            code_version: CODE_VERSION.to_string(),
            content,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `foo.csv` → `foo.json`.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_round_trip_bit_exact() {
        let samples = vec![
            EnsembleSample {
                index: 0,
                nu: vec![1.0 + 1e-13, 1.0],
                inv_purity: 1.234_567_890_123_456_7,
                entropy: 0.1 + 0.2,
                invariants: vec![std::f64::consts::PI, 2.0],
                total_energy: 50.0,
            },
            EnsembleSample {
                index: 1,
                nu: vec![3.0],
                inv_purity: 9.0,
                entropy: 2.0,
                invariants: vec![9.0],
                total_energy: 12.5,
            },
        ];
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &samples).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,entropy,inv_purity,total_energy,nu,invariants\n"));
        assert_eq!(read_samples_csv(buf.as_slice()).unwrap(), samples);
    }

    #[test]
    fn histogram_table() {
        let h = crate::stats::histogram(&[0.1, 0.2, 0.9], 0.0, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &h).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().starts_with("0.0,0.5,2,"));
    }
}
