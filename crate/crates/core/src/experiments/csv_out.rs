//! Versioned CSV artifacts with provenance columns.
//!
//! Layout: `# schema=1`, a `# generated_unix=` line, the column header,
//! then rows. Rows stream into `<name>.partial`, renamed on success.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;
pub const BUILD_ID: &str = env!("UQDP_BUILD_ID");
pub const PROVENANCE: [&str; 3] = ["master_seed", "n_traj", "build_id"];

/// 9 significant digits; NaN as `nan`.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.8e}")
    }
}

pub struct CsvSink {
    writer: csv::Writer<BufWriter<File>>,
    partial: PathBuf,
    path: PathBuf,
    width: usize,
    provenance: [String; 3],
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

impl CsvSink {
    pub fn create(dir: &Path, file_name: &str, columns: &[&str], master_seed: u64, n_traj: usize) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(file_name);
        let partial = dir.join(format!("{file_name}.partial"));
        let mut out = BufWriter::new(File::create(&partial)?);
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        writeln!(out, "# schema={SCHEMA}")?;
        writeln!(out, "# generated_unix={now}")?;
        let mut writer = csv::Writer::from_writer(out);
        writer
            .write_record(columns.iter().chain(PROVENANCE.iter()))
            .map_err(csv_err)?;
        Ok(Self {
            writer,
            partial,
            path,
            width: columns.len(),
            provenance: [master_seed.to_string(), n_traj.to_string(), BUILD_ID.to_string()],
        })
    }

    /// Appends and flushes one row, so an aborted run leaves its rows behind.
    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        if fields.len() != self.width {
            return Err(Error::InvalidArgument(format!(
                "row has {} fields, header has {}",
                fields.len(),
                self.width
            )));
        }
        self.writer
            .write_record(fields.iter().chain(self.provenance.iter()))
            .map_err(csv_err)?;
        self.writer.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush()?;
        drop(self.writer);
        fs::rename(&self.partial, &self.path)?;
        Ok(self.path)
    }
}

/// Content lines of an artifact, without the timestamp line.
pub fn content_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with("# generated_unix=")).collect()
}
