//! JSON and CSV writers. Every file carries the producing config so a run can
//! be reproduced from its outputs alone.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const REPORT_FORMAT: &str = "hypspec-report v1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, T> {
    format: &'static str,
    version: &'static str,
    kind: &'a str,
    config: &'a RunConfig,
    report: &'a T,
}

/// Output directory plus the config stamped into each file.
pub struct Writer<'a> {
    dir: PathBuf,
    config: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub fn new(dir: &Path, config: &'a RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config,
            written: Vec::new(),
        })
    }

    pub fn json<T: Serialize>(
        &mut self,
        name: &str,
        kind: &str,
        report: &T,
    ) -> Result<PathBuf, CliError> {
        let env = Envelope {
            format: REPORT_FORMAT,
            version: VERSION,
            kind,
            config: self.config,
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.put(name, text.into_bytes())
    }

    /// CSV with a leading `#` line holding the config as JSON.
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
        let mut buf = format!(
            "#{REPORT_FORMAT} version={VERSION} config={}\n",
            serde_json::to_string(self.config)?
        )
        .into_bytes();
        {
            let mut wtr = csv::Writer::from_writer(&mut buf);
            for r in rows {
                wtr.serialize(r)?;
            }
            wtr.flush()
                .map_err(|e| CliError::io(&self.dir.join(name), e))?;
        }
        self.put(name, buf)
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn into_files(self) -> Vec<PathBuf> {
        self.written
    }
}

/// Read the rows of a CSV written by [`Writer::csv`].
pub fn read_csv_rows(path: &Path) -> Result<Vec<csv::StringRecord>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    Ok(rdr.records().collect::<Result<_, _>>()?)
}
