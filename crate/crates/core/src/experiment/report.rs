//! Per-instance series, run summary, and their on-disk formats.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::drift::DriftLevel;
use crate::error::{Error, Result};
use crate::experiment::plot;

const PAIRED_HEADER: &str = "index,loss_a,loss_b,acc_a,acc_b,err_a,err_b,q,mcnemar,reject,drift_a,drift_b";
const SINGLE_HEADER: &str = "index,loss_a,acc_a,err_a,drift_a";

/// One instance of a run. The `_b` fields are `None` without a second
/// classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub index: u64,
    pub loss_a: f64,
    pub acc_a: f64,
    pub err_a: f64,
    /// `None` while A bootstraps.
    pub drift_a: Option<DriftLevel>,
    pub loss_b: Option<f64>,
    pub acc_b: Option<f64>,
    pub err_b: Option<f64>,
    /// `None` while either accumulated loss is zero.
    pub q: Option<f64>,
    pub mcnemar: Option<f64>,
    pub reject: Option<bool>,
    pub drift_b: Option<Option<DriftLevel>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub instances: u64,
    /// Instance indices at which the detector reset the classifier.
    pub drift_events_a: Vec<u64>,
    pub drift_events_b: Option<Vec<u64>>,
    pub warnings_a: u64,
    pub warnings_b: Option<u64>,
    pub metric_updates_a: u64,
    pub metric_updates_b: Option<u64>,
    pub final_base_a: usize,
    pub final_base_b: Option<usize>,
    /// `(n01, n10)`.
    pub mcnemar_counts: Option<(u64, u64)>,
    pub wall_clock_seconds: f64,
    pub config_echo: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub paired: bool,
    /// One row per processed instance.
    pub series: Vec<SeriesRow>,
    pub summary: Summary,
}

/// Six decimals, ties to even; negative zero prints as zero.
pub fn format_value(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn drift_name(level: Option<DriftLevel>) -> &'static str {
    level.map_or("bootstrap", DriftLevel::as_str)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_value).unwrap_or_default()
}

fn join(indices: &[u64]) -> String {
    indices.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentReport {
    pub fn last(&self) -> &SeriesRow {
        self.series.last().expect("report has at least one row")
    }

    /// Rows at every `stride`-th index plus the final one.
    pub fn sampled(&self, stride: u64) -> impl Iterator<Item = &SeriesRow> {
        let n = self.summary.instances;
        self.series
            .iter()
            .filter(move |r| r.index % stride == 0 || r.index == n)
    }

    pub fn csv_header(&self) -> &'static str {
        if self.paired {
            PAIRED_HEADER
        } else {
            SINGLE_HEADER
        }
    }

    pub fn csv_row(&self, r: &SeriesRow) -> String {
        if self.paired {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.index,
                format_value(r.loss_a),
                opt(r.loss_b),
                format_value(r.acc_a),
                opt(r.acc_b),
                format_value(r.err_a),
                opt(r.err_b),
                opt(r.q),
                opt(r.mcnemar),
                r.reject.map_or("", |b| if b { "1" } else { "0" }),
                drift_name(r.drift_a),
                drift_name(r.drift_b.flatten()),
            )
        } else {
            format!(
                "{},{},{},{},{}",
                r.index,
                format_value(r.loss_a),
                format_value(r.acc_a),
                format_value(r.err_a),
                drift_name(r.drift_a),
            )
        }
    }

    pub fn series_csv(&self, stride: u64) -> String {
        let mut out = String::with_capacity(64 * (self.series.len() / stride.max(1) as usize + 2));
        out.push_str(self.csv_header());
        out.push('\n');
        for r in self.sampled(stride) {
            out.push_str(&self.csv_row(r));
            out.push('\n');
        }
        out
    }

    /// Flat `key=value` lines: final values (formatted as in the series),
    /// event counts, wall-clock time and the configuration echo.
    pub fn summary_text(&self) -> String {
        let s = &self.summary;
        let last = self.last();
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        line("instances", s.instances.to_string());
        line("final_acc_a", format_value(last.acc_a));
        line("final_err_a", format_value(last.err_a));
        line("drift_events_a", join(&s.drift_events_a));
        line("resets_a", s.drift_events_a.len().to_string());
        line("warning_steps_a", s.warnings_a.to_string());
        line("metric_updates_a", s.metric_updates_a.to_string());
        line("final_base_a", s.final_base_a.to_string());
        if self.paired {
            line("final_acc_b", opt(last.acc_b));
            line("final_err_b", opt(last.err_b));
            let events = s.drift_events_b.clone().unwrap_or_default();
            line("drift_events_b", join(&events));
            line("resets_b", events.len().to_string());
            line("warning_steps_b", s.warnings_b.unwrap_or(0).to_string());
            line("metric_updates_b", s.metric_updates_b.unwrap_or(0).to_string());
            line("final_base_b", s.final_base_b.unwrap_or(0).to_string());
            line("final_q", opt(last.q));
            line("final_mcnemar", opt(last.mcnemar));
            line(
                "final_reject",
                last.reject.map_or("", |b| if b { "1" } else { "0" }).to_string(),
            );
            let (n01, n10) = s.mcnemar_counts.unwrap_or((0, 0));
            line("mcnemar_n01", n01.to_string());
            line("mcnemar_n10", n10.to_string());
        }
        line("wall_clock_seconds", format!("{:.3}", s.wall_clock_seconds));
        for (k, v) in &s.config_echo {
            line(&format!("config.{k}"), v.clone());
        }
        out
    }
}

struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        self.written.push(path.clone());
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))
    }

    fn discard(self) {
        for path in self.written {
            let _ = fs::remove_file(path);
        }
    }
}

/// Writes `series.csv`, `summary.txt` and optionally `accuracy.svg` and
/// (paired runs only) `qstat.svg`. On failure the files written so far are
/// removed.
pub fn write_report(report: &ExperimentReport, dir: &Path, stride: u64, plot: bool) -> Result<()> {
    if stride == 0 {
        return Err(Error::Config("stride must be at least 1".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut outputs = Outputs { written: Vec::new() };
    let result = (|| {
        outputs.write(dir.join("series.csv"), &report.series_csv(stride))?;
        outputs.write(dir.join("summary.txt"), &report.summary_text())?;
        if plot {
            outputs.write(dir.join("accuracy.svg"), &plot::accuracy_svg(report, stride))?;
            if let Some(svg) = plot::qstat_svg(report, stride) {
                outputs.write(dir.join("qstat.svg"), &svg)?;
            }
        }
        Ok(())
    })();
    if result.is_err() {
        outputs.discard();
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimals_round_half_even() {
        // odd multiples of 1/128 are exact ties at the sixth decimal
        assert_eq!(format_value(1.0 / 128.0), "0.007812");
        assert_eq!(format_value(3.0 / 128.0), "0.023438");
        assert_eq!(format_value(0.25), "0.250000");
        assert_eq!(format_value(-1e-9), "0.000000");
        assert_eq!(format_value(1.0), "1.000000");
    }
}
