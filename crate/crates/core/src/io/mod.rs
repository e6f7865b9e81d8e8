//! On-disk formats: scenario JSON, potential-field export, trajectory CSV,
//! Q-table JSON, replay force files, and PPM/SVG renders.

mod field_files;
mod render;
mod scenario;
mod trajectory;

pub use field_files::{export_field, FieldExport};
pub use render::{render_ppm, render_svg};
pub use scenario::{load_scenario, PolicyConfig, ScenarioFile, SimSection};
pub use trajectory::{
    read_forces_csv, read_signal_csv, write_trajectory_csv, TRAJECTORY_HEADER,
};

use crate::policy::QTable;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: malformed {what} at line {line}: {detail}")]
    Csv { path: String, what: &'static str, line: usize, detail: String },
    #[error(transparent)]
    Spec(#[from] crate::stl::ParseError),
    #[error(transparent)]
    Schedule(#[from] crate::field::ScheduleError),
    #[error("scenario: {0}")]
    Scenario(String),
}

impl IoError {
    pub fn file(path: &Path, source: std::io::Error) -> Self {
        IoError::File { path: path.display().to_string(), source }
    }

    /// The underlying cause was a missing file.
    pub fn is_not_found(&self) -> bool {
        matches!(self, IoError::File { source, .. } if source.kind() == std::io::ErrorKind::NotFound)
    }
}

pub fn save_qtable(table: &QTable, path: &Path) -> Result<(), IoError> {
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, table)
        .map_err(|e| IoError::Json { path: path.display().to_string(), source: e })?;
    w.write_all(b"\n").map_err(|e| IoError::file(path, e))?;
    Ok(())
}

pub fn load_qtable(path: &Path) -> Result<QTable, IoError> {
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| IoError::Json { path: path.display().to_string(), source: e })
}
