//! Result rows and the files they are appended to.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mucorr_core::relations::RelationReport;
use serde::Serialize;

/// One evaluation, as written to `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub relation: String,
    pub dim: usize,
    pub seed: Option<u64>,
    pub param: Option<f64>,
    pub label: String,
    /// Generation count, for rows produced by a search.
    pub generation: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub violated: bool,
    pub method: String,
    pub wall_time_s: f64,
}

impl ResultRow {
    pub fn from_report(r: &RelationReport, seed: Option<u64>, generation: Option<usize>, wall_time_s: f64) -> Self {
        Self {
            relation: r.relation.to_string(),
            dim: r.dim,
            seed,
            param: r.param,
            label: r.label.clone(),
            generation,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            violated: r.violated,
            method: serde_json::to_value(r.method)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            wall_time_s,
        }
    }
}

/// Output directory: the flag, else `MUCORR_OUT_DIR`, else `fallback`.
pub fn out_dir(flag: Option<&Path>, fallback: Option<&str>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| {
            std::env::var_os("MUCORR_OUT_DIR")
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .or_else(|| fallback.map(PathBuf::from))
}

fn open_append(path: &Path) -> Result<(File, bool)> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    Ok((file, fresh))
}

/// Appends rows to a CSV file, writing the header only when the file is new.
pub fn append_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let (file, fresh) = open_append(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for row in rows {
        w.serialize(row)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush()?;
    Ok(())
}

/// Appends one JSON document per line.
pub fn append_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let (mut file, _) = open_append(path)?;
    for item in items {
        let line = serde_json::to_string(item)?;
        writeln!(file, "{line}").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        format!("{x}")
    }
}

pub fn print_reports(reports: &[RelationReport]) {
    if reports.is_empty() {
        return;
    }
    println!(
        "{:<16} {:>4} {:>8} {:>12} {:>12} {:>12}  {:<8} {:<10} {}",
        "relation", "d", "param", "lhs", "rhs", "slack", "violated", "method", "standing"
    );
    for r in reports {
        let param = r.param.map(fmt_num).unwrap_or_else(|| "-".into());
        let method = serde_json::to_value(r.method)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let standing = serde_json::to_value(r.standing)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        println!(
            "{:<16} {:>4} {:>8} {:>12} {:>12} {:>12}  {:<8} {:<10} {}",
            r.relation.as_str(),
            r.dim,
            param,
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.slack),
            r.violated,
            method,
            standing
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_written_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        #[derive(Serialize)]
        struct R {
            a: u32,
            b: f64,
        }
        append_csv(&path, &[R { a: 1, b: 0.5 }]).unwrap();
        append_csv(&path, &[R { a: 2, b: f64::INFINITY }]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1,0.5\n2,inf\n");
    }
}
