use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;
use tempfile::NamedTempFile;

/// Writes artifacts into one directory; every file goes through a temp file
/// in the same directory and is renamed into place.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Artifacts { dir, written: vec![] })
    }

    pub fn write_with(&mut self, name: &str, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        {
            let mut w = std::io::BufWriter::new(tmp.as_file_mut());
            fill(&mut w)?;
            w.flush()?;
        }
        let path = self.dir.join(name);
        tmp.persist(&path).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// CSV with a header row; every row must have the header's width.
    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        self.write_with(name, |w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(header)?;
            for r in rows {
                c.write_record(r)?;
            }
            c.flush()?;
            Ok(())
        })
    }

    /// Whitespace-separated numeric columns for plotting.
    pub fn columns(&mut self, name: &str, rows: &[Vec<f64>]) -> Result<()> {
        self.write_with(name, |w| {
            for r in rows {
                let line: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
            Ok(())
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn axis_names(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

pub fn fmt_f(v: &[f64]) -> impl Iterator<Item = String> + '_ {
    v.iter().map(|x| format!("{x:?}"))
}
