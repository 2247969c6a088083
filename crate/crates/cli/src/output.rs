use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use heatmap_tsp::instance::{DistanceMatrix, Instance, INSTANCE_HEADER};
use serde::Serialize;
use thiserror::Error;

use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Core(#[from] heatmap_tsp::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad arguments or unreadable input, 3 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Core(heatmap_tsp::Error::InvalidArgument(_) | heatmap_tsp::Error::Parse { .. }) => 2,
            CliError::Core(_) | CliError::Write { .. } | CliError::Json(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write(p, text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// Native files start with their header line; anything else is read as TSPLIB.
pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read(path)?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    let inst = if first == Some(INSTANCE_HEADER) {
        Instance::from_text(&text)?
    } else {
        Instance::parse_tsplib(&text)?
    };
    Ok(inst)
}

pub fn distances(inst: &Instance, tsplib_round: bool) -> DistanceMatrix {
    if tsplib_round {
        DistanceMatrix::tsplib_rounded(inst)
    } else {
        inst.distance_matrix()
    }
}

/// CSV rows under a header, or a pretty JSON document.
pub fn render<T: Serialize>(
    format: Format,
    header: &str,
    rows: &[String],
    json: &T,
) -> CliResult<String> {
    Ok(match format {
        Format::Csv => {
            let mut out = String::from(header);
            out.push('\n');
            for r in rows {
                out.push_str(r);
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json)?;
            s.push('\n');
            s
        }
    })
}
