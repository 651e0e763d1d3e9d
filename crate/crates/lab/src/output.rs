//! CSV artifacts and the JSON-lines run summary.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::LabResult;

pub const SUMMARY_FILE: &str = "summary.jsonl";

/// Shortest round-trip decimal, so reruns are byte-identical.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub struct OutputDir {
    dir: PathBuf,
    summary: Vec<Value>,
}

impl OutputDir {
    pub fn create(dir: impl AsRef<Path>) -> LabResult<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(OutputDir { dir, summary: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> LabResult<CsvSink> {
        let mut writer = csv::Writer::from_path(self.path(name))?;
        writer.write_record(header)?;
        Ok(CsvSink { writer, width: header.len() })
    }

    pub fn record(&mut self, value: Value) {
        self.summary.push(value);
    }

    /// Writes the collected summary records, one JSON object per line.
    pub fn finish(self) -> LabResult<PathBuf> {
        let path = self.path(SUMMARY_FILE);
        let mut file = File::create(&path)?;
        for v in &self.summary {
            writeln!(file, "{v}")?;
        }
        Ok(path)
    }
}

pub struct CsvSink {
    writer: csv::Writer<File>,
    width: usize,
}

impl CsvSink {
    pub fn row<S: AsRef<[u8]>>(&mut self, cells: impl IntoIterator<Item = S>) -> LabResult<()> {
        let cells: Vec<S> = cells.into_iter().collect();
        debug_assert_eq!(cells.len(), self.width, "row width does not match header");
        self.writer.write_record(cells)?;
        Ok(())
    }

    pub fn nums(&mut self, values: &[f64]) -> LabResult<()> {
        self.row(values.iter().map(|v| num(*v)))
    }

    pub fn close(mut self) -> LabResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Indices `0, stride, 2·stride, …` plus the last index.
pub fn strided(len: usize, stride: usize) -> impl Iterator<Item = usize> {
    let stride = stride.max(1);
    (0..len).filter(move |i| i % stride == 0 || i + 1 == len)
}
