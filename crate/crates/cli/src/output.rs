//! Output directory bookkeeping and versioned CSV files.
//!
//! Every CSV starts with a `# radopt <kind> v1` comment naming its column
//! schema; numbers are written in shortest round-trip form so reruns are
//! byte-identical and values parse back exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Files written by one run. On failure, [`Outputs::discard`] removes them,
/// and the directory too if this run created it and it is left empty.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    created: Vec<PathBuf>,
    files: Vec<PathBuf>,
}

impl Outputs {
    pub fn create(dir: &Path) -> CliResult<Self> {
        let mut created = Vec::new();
        let mut p = dir.to_path_buf();
        while !p.as_os_str().is_empty() && !p.exists() {
            created.push(p.clone());
            match p.parent() {
                Some(parent) => p = parent.to_path_buf(),
                None => break,
            }
        }
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), created, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Registers `name` for cleanup and returns its full path.
    pub fn file(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        if !self.files.contains(&p) {
            self.files.push(p.clone());
        }
        p
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<PathBuf> {
        let p = self.file(name);
        fs::write(&p, text).map_err(|e| CliError::io(&p, e))?;
        Ok(p)
    }

    pub fn csv(&mut self, name: &str, kind: &str, header: &[&str]) -> CliResult<CsvOut> {
        let p = self.file(name);
        CsvOut::create(&p, kind, header)
    }

    pub fn discard(self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        // innermost first; remove_dir refuses non-empty directories
        for d in &self.created {
            let _ = fs::remove_dir(d);
        }
    }
}

/// Runs `body` against fresh outputs in `dir`, discarding them on error.
pub fn with_outputs<R>(dir: &Path, body: impl FnOnce(&mut Outputs) -> CliResult<R>) -> CliResult<R> {
    let mut out = Outputs::create(dir)?;
    match body(&mut out) {
        Ok(r) => Ok(r),
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

pub struct CsvOut<W: Write = BufWriter<File>> {
    label: String,
    w: csv::Writer<W>,
}

impl CsvOut {
    pub fn create(path: &Path, kind: &str, header: &[&str]) -> CliResult<Self> {
        let f = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
        Self::from_writer(f, &path.display().to_string(), kind, header)
    }
}

impl<W: Write> CsvOut<W> {
    /// `label` names the destination in error messages.
    pub fn from_writer(mut w: W, label: &str, kind: &str, header: &[&str]) -> CliResult<Self> {
        let err = |e: std::io::Error| CliError::Io(format!("{label}: {e}"));
        writeln!(w, "# radopt {kind} v{SCHEMA_VERSION}").map_err(err)?;
        let mut w = csv::Writer::from_writer(w);
        w.write_record(header).map_err(|e| CliError::Io(format!("{label}: {e}")))?;
        Ok(Self { label: label.to_string(), w })
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(fields).map_err(|e| CliError::Io(format!("{}: {e}", self.label)))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.w.flush().map_err(|e| CliError::Io(format!("{}: {e}", self.label)))
    }
}

pub fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// A CSV read back: the schema line, the header and the rows as strings.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub schema: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let schema = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| CliError::io(path, "missing schema comment"))?
            .to_string();
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| CliError::io(path, e))?.iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(|e| CliError::io(path, e)))
            .collect::<CliResult<_>>()?;
        Ok(Self { schema, header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let mut w = CsvOut::create(&p, "test", &["a", "b"]).unwrap();
        w.row([fmt(0.1 + 0.2), fmt_opt(None)]).unwrap();
        w.finish().unwrap();
        let t = CsvTable::read(&p).unwrap();
        assert_eq!(t.schema, "radopt test v1");
        assert_eq!(t.rows, vec![vec!["0.30000000000000004".to_string(), String::new()]]);
        assert_eq!(t.rows[0][0].parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn discard_removes_files_and_created_dirs() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("a/b");
        let r: CliResult<()> = with_outputs(&dir, |o| {
            o.write_text("x.txt", "hi")?;
            Err(CliError::Runtime("boom".into()))
        });
        assert!(r.is_err());
        assert!(!root.path().join("a").exists());

        // a pre-existing directory and foreign files survive
        fs::write(root.path().join("keep"), "").unwrap();
        let _ = with_outputs(root.path(), |o| -> CliResult<()> {
            o.write_text("x.txt", "hi")?;
            Err(CliError::Runtime("boom".into()))
        });
        assert!(root.path().join("keep").exists());
        assert!(!root.path().join("x.txt").exists());
    }
}
