//! File formats: headerless matrix CSV and instance directories.
//!
//! Every file is written once through a temporary sibling and renamed into
//! place, so readers never observe a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problems::{ProblemInstance, Provenance, SystemKind};

/// Write `contents` to `path` atomically, creating parent directories.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// One row per line, comma-separated, no header. `f64` display output
/// round-trips exactly.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 20);
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Parse a headerless CSV matrix; the shape is inferred.
pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut cols = None;
    let mut data = Vec::new();
    let mut rows = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: {:?} is not a number", lineno + 1, field.trim()))
            })?;
            data.push(v);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::Parse(format!(
                    "line {} has {width} fields, expected {c}",
                    lineno + 1
                )))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    Matrix::from_vec(rows, cols, data)
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    write_atomic(path, matrix_to_csv(m).as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    matrix_from_csv(&fs::read_to_string(path)?)
}

#[derive(Serialize, Deserialize)]
struct InstanceMeta {
    kind: SystemKind,
    provenance: Provenance,
}

/// `A.csv`, `B.csv`, `F.csv`, optional `X_star.csv`, and `instance.json`.
pub fn write_instance(dir: &Path, problem: &ProblemInstance) -> Result<()> {
    write_matrix(&dir.join("A.csv"), &problem.a)?;
    write_matrix(&dir.join("B.csv"), &problem.b)?;
    write_matrix(&dir.join("F.csv"), &problem.f)?;
    if let Some(x) = &problem.x_star {
        write_matrix(&dir.join("X_star.csv"), x)?;
    }
    let meta = InstanceMeta {
        kind: problem.kind,
        provenance: problem.provenance.clone(),
    };
    write_atomic(&dir.join("instance.json"), serde_json::to_string_pretty(&meta)?.as_bytes())
}

/// Inverse of [`write_instance`]. Without `instance.json` the system is
/// taken as consistent when `X_star.csv` is present.
pub fn read_instance(dir: &Path) -> Result<ProblemInstance> {
    let a = read_matrix(&dir.join("A.csv"))?;
    let b = read_matrix(&dir.join("B.csv"))?;
    let f = read_matrix(&dir.join("F.csv"))?;
    let x_path = dir.join("X_star.csv");
    let x_star = if x_path.exists() {
        Some(read_matrix(&x_path)?)
    } else {
        None
    };
    let meta_path = dir.join("instance.json");
    let (kind, provenance) = if meta_path.exists() {
        let meta: InstanceMeta = serde_json::from_str(&fs::read_to_string(meta_path)?)?;
        (meta.kind, meta.provenance)
    } else {
        let kind = if x_star.is_some() {
            SystemKind::Consistent
        } else {
            SystemKind::LeastSquares
        };
        (kind, Provenance::new("file", None))
    };
    ProblemInstance::new(a, b, f, x_star, kind, provenance)
}
