//! Grid files: a `scores.csv` + `mask.csv` pair, or the binary `.miag` format.
//!
//! `.miag` layout (little-endian): magic `MIAG`, `u32` version 1, `u64` M,
//! `u64` N, `M*N` `f64` scores row-major, `M*N` `u8` mask cells (0/1), `u32`
//! metadata length, then that many bytes of UTF-8 JSON
//! `{"meta": {...}, "sample_ids": [...]}` (keys sorted, `sample_ids` omitted
//! when absent). Saving is byte-deterministic for a given grid.

use mia_audit_core::MiaGrid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub const MAGIC: &[u8; 4] = b"MIAG";
pub const VERSION: u32 = 1;
pub const SCORES_FILE: &str = "scores.csv";
pub const MASK_FILE: &str = "mask.csv";

#[derive(Debug, thiserror::Error)]
pub enum GridFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: line {line}: cannot parse {value:?} as a number")]
    Parse {
        path: PathBuf,
        line: u64,
        value: String,
    },
    #[error("mask value {value:?} at ({row},{col}) is not 0 or 1")]
    BadMask {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("scores are {0}x{1} but mask is {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("bad magic bytes, not a .miag file")]
    BadMagic,
    #[error("unsupported .miag version {0}")]
    BadVersion(u32),
    #[error("truncated .miag file: {0}")]
    Truncated(&'static str),
    #[error("{0} trailing bytes after .miag metadata")]
    TrailingBytes(usize),
    #[error("bad .miag metadata: {0}")]
    Metadata(String),
    #[error(transparent)]
    Grid(#[from] mia_audit_core::Error),
}

pub type Result<T, E = GridFileError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridFormat {
    /// `scores.csv` and `mask.csv` in a directory
    Csv,
    /// single `.miag` file
    Binary,
}

impl GridFormat {
    /// A directory is read as CSV, anything else as `.miag`.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            GridFormat::Csv
        } else {
            GridFormat::Binary
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> GridFileError + '_ {
    move |source| GridFileError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_grid(path: &Path, format: GridFormat) -> Result<MiaGrid> {
    match format {
        GridFormat::Csv => load_csv(&path.join(SCORES_FILE), &path.join(MASK_FILE)),
        GridFormat::Binary => decode_miag(&fs::read(path).map_err(io_err(path))?),
    }
}

/// Writes the grid and returns the files written. For CSV, `path` is a
/// directory that receives `scores.csv` and `mask.csv`.
pub fn save_grid(grid: &MiaGrid, path: &Path, format: GridFormat) -> Result<Vec<PathBuf>> {
    match format {
        GridFormat::Csv => {
            fs::create_dir_all(path).map_err(io_err(path))?;
            let (scores, mask) = (path.join(SCORES_FILE), path.join(MASK_FILE));
            write_file(&scores, &scores_csv(grid))?;
            write_file(&mask, &mask_csv(grid))?;
            Ok(vec![scores, mask])
        }
        GridFormat::Binary => {
            write_file(path, &encode_miag(grid))?;
            Ok(vec![path.to_path_buf()])
        }
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(bytes).map_err(io_err(path))?;
    f.flush().map_err(io_err(path))
}

fn read_records(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| GridFileError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|source| GridFileError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

/// Splits off a header row, recognised by a non-numeric first token.
fn split_header(
    mut records: Vec<csv::StringRecord>,
) -> (Option<Vec<String>>, Vec<csv::StringRecord>) {
    let is_header = records
        .first()
        .and_then(|r| r.get(0))
        .is_some_and(|t| t.parse::<f64>().is_err());
    if is_header {
        let header = records.remove(0).iter().map(str::to_string).collect();
        (Some(header), records)
    } else {
        (None, records)
    }
}

/// Reads a score/mask CSV pair. Cells may carry surrounding whitespace.
pub fn load_csv(scores_path: &Path, mask_path: &Path) -> Result<MiaGrid> {
    let (ids, score_rows) = split_header(read_records(scores_path)?);
    let (_, mask_rows) = split_header(read_records(mask_path)?);
    let m = score_rows.len();
    let n = score_rows.first().map_or(0, |r| r.len());
    let mn = mask_rows.first().map_or(0, |r| r.len());
    if mask_rows.len() != m || mn != n {
        return Err(GridFileError::ShapeMismatch(m, n, mask_rows.len(), mn));
    }
    let mut scores = Vec::with_capacity(m * n);
    for rec in &score_rows {
        for cell in rec {
            scores.push(cell.parse::<f64>().map_err(|_| GridFileError::Parse {
                path: scores_path.to_path_buf(),
                line: rec.position().map_or(0, |p| p.line()),
                value: cell.to_string(),
            })?);
        }
    }
    let mut mask = Vec::with_capacity(m * n);
    for (row, rec) in mask_rows.iter().enumerate() {
        for (col, cell) in rec.iter().enumerate() {
            mask.push(match cell {
                "0" => false,
                "1" => true,
                other => {
                    return Err(GridFileError::BadMask {
                        row,
                        col,
                        value: other.to_string(),
                    })
                }
            });
        }
    }
    let grid = MiaGrid::new(m, n, scores, mask)?;
    Ok(match ids {
        Some(ids) => grid.with_sample_ids(ids)?,
        None => grid,
    })
}

fn header_line(grid: &MiaGrid) -> Option<Vec<u8>> {
    let ids = grid.sample_ids()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ids).ok()?;
    w.into_inner().ok()
}

/// Scores with 17 significant digits, which round-trips every `f64`.
pub fn scores_csv(grid: &MiaGrid) -> Vec<u8> {
    let mut out = header_line(grid).unwrap_or_default();
    for m in 0..grid.n_models() {
        let row: Vec<String> = grid
            .score_row(m)
            .iter()
            .map(|s| format!("{s:.16e}"))
            .collect();
        out.extend_from_slice(row.join(",").as_bytes());
        out.push(b'\n');
    }
    out
}

pub fn mask_csv(grid: &MiaGrid) -> Vec<u8> {
    let mut out = header_line(grid).unwrap_or_default();
    for m in 0..grid.n_models() {
        let row: Vec<&str> = grid
            .mask_row(m)
            .iter()
            .map(|&k| if k { "1" } else { "0" })
            .collect();
        out.extend_from_slice(row.join(",").as_bytes());
        out.push(b'\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    meta: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample_ids: Option<Vec<String>>,
}

pub fn encode_miag(grid: &MiaGrid) -> Vec<u8> {
    let cells = grid.scores().len();
    let meta = serde_json::to_vec(&Metadata {
        meta: grid.meta().clone(),
        sample_ids: grid.sample_ids().map(<[String]>::to_vec),
    })
    .expect("string maps always serialize");
    let mut out = Vec::with_capacity(24 + 9 * cells + 4 + meta.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.n_models() as u64).to_le_bytes());
    out.extend_from_slice(&(grid.n_samples() as u64).to_le_bytes());
    for s in grid.scores() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out.extend(grid.mask().iter().map(|&k| k as u8));
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta);
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(GridFileError::Truncated(what));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &'static str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn decode_miag(bytes: &[u8]) -> Result<MiaGrid> {
    let mut c = Cursor { buf: bytes };
    if c.take(4, "magic")? != MAGIC {
        return Err(GridFileError::BadMagic);
    }
    let version = c.u32("version")?;
    if version != VERSION {
        return Err(GridFileError::BadVersion(version));
    }
    let too_big = || GridFileError::Truncated("header dimensions exceed file size");
    let m = usize::try_from(c.u64("header")?).map_err(|_| too_big())?;
    let n = usize::try_from(c.u64("header")?).map_err(|_| too_big())?;
    let cells = m.checked_mul(n).ok_or_else(too_big)?;
    if cells.checked_mul(9).is_none_or(|need| need > c.buf.len()) {
        return Err(too_big());
    }
    let scores: Vec<f64> = c
        .take(8 * cells, "scores")?
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let mask = c
        .take(cells, "mask")?
        .iter()
        .enumerate()
        .map(|(i, &b)| match b {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(GridFileError::BadMask {
                row: i / n,
                col: i % n,
                value: v.to_string(),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    let len = c.u32("metadata length")? as usize;
    let meta: Metadata = serde_json::from_slice(c.take(len, "metadata")?)
        .map_err(|e| GridFileError::Metadata(e.to_string()))?;
    if !c.buf.is_empty() {
        return Err(GridFileError::TrailingBytes(c.buf.len()));
    }
    let grid = MiaGrid::new(m, n, scores, mask)?.with_meta_map(meta.meta);
    Ok(match meta.sample_ids {
        Some(ids) => grid.with_sample_ids(ids)?,
        None => grid,
    })
}
