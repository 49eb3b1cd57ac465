//! File emission: samples CSV, histogram CSV, scan CSV and results JSON.
//! Floats are written with Rust's shortest-roundtrip formatting, so a fixed
//! seed reproduces byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use qpmix::estimator::EstimatorResult;
use qpmix::mixture::AbScan;

use crate::histogram::Histogram;

/// Summary of one arm as it appears in results.json.
#[derive(Debug, Clone, Serialize)]
pub struct ArmSummary {
    pub mean: f64,
    pub empirical_std: f64,
    pub std_error: f64,
    pub variance_bound: f64,
    /// Shots required by the analytic bound for the configured δ.
    pub shot_bound: f64,
    #[serde(rename = "S")]
    pub total_shots: u64,
    #[serde(rename = "s")]
    pub shots_per_instance: u64,
    pub n_instances: u64,
    pub seed: u64,
    pub mean_t_insertions: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_samples_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram_center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram_bin_width: Option<f64>,
}

impl ArmSummary {
    pub fn new(result: &EstimatorResult, shot_bound: f64) -> Self {
        Self {
            mean: result.mean,
            empirical_std: result.empirical_std,
            std_error: result.std_error(),
            variance_bound: result.variance_bound,
            shot_bound,
            total_shots: result.total_shots,
            shots_per_instance: result.shots_per_instance,
            n_instances: result.n_instances,
            seed: result.seed,
            mean_t_insertions: result.mean_t_insertions(),
            weighted_samples_path: None,
            histogram_path: None,
            histogram_center: None,
            histogram_bin_width: None,
        }
    }
}

/// samples CSV: one row per shot,
/// `instance_index,shot_index,sign,weight,parity,weighted_value`.
pub fn write_samples_csv(path: &Path, result: &EstimatorResult) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(
        w,
        "instance_index,shot_index,sign,weight,parity,weighted_value"
    )?;
    let s = result.shots_per_instance as usize;
    for (i, value) in result.weighted_samples.iter().enumerate() {
        let instance = i / s;
        let shot = i % s;
        let meta = &result.instances[instance];
        let parity = if *value * meta.sign >= 0.0 { 1 } else { -1 };
        writeln!(
            w,
            "{},{},{},{},{},{}",
            instance, shot, meta.sign as i8, meta.weight, parity, value
        )?;
    }
    Ok(())
}

/// histogram CSV: `bin_left,bin_right,count`.
pub fn write_histogram_csv(path: &Path, histogram: &Histogram) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "bin_left,bin_right,count")?;
    for (i, count) in histogram.counts.iter().enumerate() {
        writeln!(
            w,
            "{},{},{}",
            histogram.bin_edges[i],
            histogram.bin_edges[i + 1],
            count
        )?;
    }
    Ok(())
}

/// scan CSV: `A,B,one_norm` with an empty third field for singular cells.
pub fn write_scan_csv(path: &Path, scan: &AbScan) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "A,B,one_norm")?;
    for p in &scan.points {
        match p.one_norm {
            Some(v) => writeln!(w, "{},{},{}", p.offset_a, p.offset_b, v)?,
            None => writeln!(w, "{},{},", p.offset_a, p.offset_b)?,
        }
    }
    Ok(())
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Generic CSV writer for the sweep-style outputs.
pub fn write_rows_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}")?;
    for row in rows {
        let line = row
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Parse a samples CSV (as written by `write_samples_csv`) back into the
/// weighted-value column.
pub fn read_weighted_samples_csv(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if !line.starts_with("instance_index,") {
                anyhow::bail!("{}: unexpected header {line:?}", path.display());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let value = line
            .rsplit(',')
            .next()
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| anyhow::anyhow!("{}:{}: bad row", path.display(), lineno + 1))?;
        out.push(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpmix::estimator::InstanceMeta;

    #[test]
    fn samples_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        let result = EstimatorResult {
            mean: 0.25,
            weighted_samples: vec![1.5, -1.5, 1.5, 1.5],
            total_shots: 4,
            shots_per_instance: 2,
            n_instances: 2,
            empirical_std: 1.0,
            variance_bound: 2.25,
            seed: 9,
            instances: vec![
                InstanceMeta {
                    sign: 1.0,
                    weight: 1.5,
                    t_insertions: 1,
                },
                InstanceMeta {
                    sign: -1.0,
                    weight: 1.5,
                    t_insertions: 0,
                },
            ],
        };
        write_samples_csv(&path, &result).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "instance_index,shot_index,sign,weight,parity,weighted_value"
        );
        assert_eq!(lines.next().unwrap(), "0,0,1,1.5,1,1.5");
        assert_eq!(lines.next().unwrap(), "0,1,1,1.5,-1,-1.5");
        // Instance 1 has sign −1: a +1.5 weighted value means parity −1.
        assert_eq!(lines.next().unwrap(), "1,0,-1,1.5,-1,1.5");

        let values = read_weighted_samples_csv(&path).unwrap();
        assert_eq!(values, result.weighted_samples);
    }

    #[test]
    fn scan_csv_marks_absent_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.csv");
        let scan = qpmix::mixture::scan_ab(0.05, 4);
        write_scan_csv(&path, &scan).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("A,B,one_norm\n"));
        // Diagonal cells are singular and emit an empty field.
        assert!(text.lines().any(|l| l.ends_with(',')));
        assert_eq!(text.lines().count(), 17);
    }
}
