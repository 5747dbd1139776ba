//! CSV trajectory files and the run manifest.
//!
//! One file per record, header `t,re_C,im_C,P_plus,method`, values with 12
//! significant digits, rows in ascending t. Identical configurations produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spinbath::{Method, TrajectoryRecord};

use crate::CliError;

pub const CSV_HEADER: &str = "t,re_C,im_C,P_plus,method";

/// 12 significant digits, scientific; stable across runs and platforms.
fn fmt_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// Render one record as CSV text.
pub fn render_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::with_capacity(record.len() * 64 + 32);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..record.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_value(record.times[i]),
            fmt_value(record.coherence_re[i]),
            fmt_value(record.coherence_im[i]),
            fmt_value(record.population[i]),
            record.method
        );
    }
    out
}

/// Parse a CSV produced by [`render_csv`].
pub fn parse_csv(text: &str) -> Result<TrajectoryRecord, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(CliError::Validation(format!("bad CSV header: {other:?}"))),
    }
    let mut record = TrajectoryRecord {
        times: Vec::new(),
        coherence_re: Vec::new(),
        coherence_im: Vec::new(),
        population: Vec::new(),
        method: Method::Exact,
        fingerprint: 0,
    };
    let mut method: Option<Method> = None;
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Validation(format!(
                "row {}: expected 5 fields, got {}",
                i + 2,
                fields.len()
            )));
        }
        let num = |s: &str| {
            f64::from_str(s)
                .map_err(|_| CliError::Validation(format!("row {}: bad number `{s}`", i + 2)))
        };
        record.times.push(num(fields[0])?);
        record.coherence_re.push(num(fields[1])?);
        record.coherence_im.push(num(fields[2])?);
        record.population.push(num(fields[3])?);
        let m = Method::from_str(fields[4]).map_err(CliError::Validation)?;
        if *method.get_or_insert(m) != m {
            return Err(CliError::Validation(format!(
                "row {}: method changed mid-file",
                i + 2
            )));
        }
    }
    record.method =
        method.ok_or_else(|| CliError::Validation("CSV contains no data rows".into()))?;
    Ok(record)
}

/// Write one CSV per record plus `manifest.txt`; returns the paths written.
/// An empty record list still writes the manifest (with a warning upstream).
pub fn emit_csv(
    records: &[TrajectoryRecord],
    out_dir: &Path,
    config_echo: &[(String, String)],
    fingerprint: u64,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    for record in records {
        let path = out_dir.join(format!("{}.csv", record.method));
        std::fs::write(&path, render_csv(record))
            .map_err(|e| CliError::Io(format!("write {}: {e}", path.display())))?;
        written.push(path);
    }
    let mut manifest = String::new();
    let _ = writeln!(manifest, "tool = spinbath {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "model_fingerprint = {fingerprint:016x}");
    for (k, v) in config_echo {
        let _ = writeln!(manifest, "config.{k} = {v}");
    }
    for record in records {
        let _ = writeln!(
            manifest,
            "record.{} = {}.csv rows={} fingerprint={:016x}",
            record.method,
            record.method,
            record.len(),
            record.fingerprint
        );
    }
    let path = out_dir.join("manifest.txt");
    std::fs::write(&path, manifest)
        .map_err(|e| CliError::Io(format!("write {}: {e}", path.display())))?;
    written.push(path);
    Ok(written)
}
