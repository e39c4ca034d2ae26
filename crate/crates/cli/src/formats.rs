//! Points CSV, labels, and trajectory JSONL.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use persgrad::experiments::GroupLabels;
use persgrad::optim::TrajectoryRecord;
use persgrad::PointCloud;

use crate::failure::{CliResult, ExitCodeExt, Failure};

/// Relative tolerance for `loss = rho + lambda * tau` when reading records.
pub const RECORD_TOLERANCE: f64 = 1e-12;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .or_io()
}

/// Parses a points CSV. A first row that is not numeric is taken as a header.
pub fn parse_points(text: &str) -> anyhow::Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => anyhow::bail!("line {}: {e}", line + 1),
        }
    }
    Ok(rows)
}

pub fn read_points(path: &Path) -> CliResult<PointCloud> {
    let text = read_text(path)?;
    let rows = parse_points(&text)
        .with_context(|| format!("malformed points file {}", path.display()))
        .or_usage()?;
    PointCloud::new(&rows)
        .with_context(|| format!("invalid points file {}", path.display()))
        .or_usage()
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .or_io()?;
    }
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .or_io()
}

/// 17 significant digits, enough to read back the same bits.
pub fn format_coordinate(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_points(path: &Path, rows: &[Vec<f64>], header: bool) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(create(path)?);
    let dim = rows.first().map_or(0, Vec::len);
    let io = |e: csv::Error| Failure {
        code: crate::failure::IO,
        error: anyhow::Error::new(e).context(format!("cannot write {}", path.display())),
    };
    if header {
        out.write_record((0..dim).map(|k| format!("x{k}")))
            .map_err(io)?;
    }
    for row in rows {
        out.write_record(row.iter().map(|&x| format_coordinate(x)))
            .map_err(io)?;
    }
    out.flush()
        .with_context(|| format!("cannot write {}", path.display()))
        .or_io()
}

/// `pts.csv` -> `pts.labels.csv`, in the same directory.
pub fn labels_path(points: &Path) -> PathBuf {
    let stem = points
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    points.with_file_name(format!("{stem}.labels.csv"))
}

pub fn read_labels(path: &Path) -> CliResult<GroupLabels> {
    let text = read_text(path)?;
    let labels = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<usize>()
                .with_context(|| format!("{} line {}: bad label `{l}`", path.display(), i + 1))
        })
        .collect::<anyhow::Result<Vec<_>>>()
        .or_usage()?;
    Ok(GroupLabels(labels))
}

pub fn write_labels(path: &Path, labels: &GroupLabels) -> CliResult<()> {
    let mut out = create(path)?;
    for l in &labels.0 {
        writeln!(out, "{l}")
            .with_context(|| format!("cannot write {}", path.display()))
            .or_io()?;
    }
    out.flush()
        .with_context(|| format!("cannot write {}", path.display()))
        .or_io()
}

/// Labels next to a points file, if there are any.
pub fn sibling_labels(points: &Path, count: usize) -> CliResult<Option<GroupLabels>> {
    let path = labels_path(points);
    if !path.exists() {
        return Ok(None);
    }
    let labels = read_labels(&path)?;
    if labels.len() != count {
        return Err(Failure::usage(format!(
            "{} has {} labels for {count} points",
            path.display(),
            labels.len()
        )));
    }
    Ok(Some(labels))
}

/// Appends one record per line and flushes after each, so an interrupted
/// run leaves a readable prefix.
pub struct TrajectoryWriter {
    out: BufWriter<File>,
    path: PathBuf,
}

impl TrajectoryWriter {
    pub fn create(path: &Path) -> CliResult<Self> {
        Ok(Self {
            out: create(path)?,
            path: path.to_path_buf(),
        })
    }

    pub fn push(&mut self, record: &TrajectoryRecord) -> CliResult<()> {
        let line = serde_json::to_string(record).or_io()?;
        writeln!(self.out, "{line}")
            .and_then(|_| self.out.flush())
            .with_context(|| format!("cannot write {}", self.path.display()))
            .or_io()
    }
}

/// Reads a trajectory and checks every record's loss decomposition.
pub fn read_trajectory(path: &Path) -> CliResult<Vec<TrajectoryRecord>> {
    let text = read_text(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TrajectoryRecord = serde_json::from_str(line)
            .with_context(|| format!("{} line {}", path.display(), i + 1))
            .or_usage()?;
        if !record.is_consistent(RECORD_TOLERANCE) {
            return Err(Failure::usage(format!(
                "{} line {}: loss {} is not rho + lambda * tau",
                path.display(),
                i + 1,
                record.loss
            )));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(anyhow::Error::from)
        .and_then(|_| Ok(writeln!(out)?))
        .and_then(|_| Ok(out.flush()?))
        .with_context(|| format!("cannot write {}", path.display()))
        .or_io()
}
