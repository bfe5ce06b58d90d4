//! CSV tables and JSON summaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Plan};
use crate::error::{HarnessError, Result};
use crate::lb::LbRow;
use crate::runner::{SummaryStats, TrialResult};
use crate::sweep::SweepRow;

/// Columns of the per-trial CSV.
pub const TRIAL_HEADER: [&str; 6] = ["trial", "target", "distance_lower_bound", "decision", "queries_used", "notes"];

/// Columns of the sweep CSV.
pub const SWEEP_HEADER: [&str; 12] = [
    "index",
    "tester",
    "param",
    "value",
    "trials",
    "accepted",
    "rejected",
    "inconclusive",
    "acceptance_rate",
    "ci_lo",
    "ci_hi",
    "mean_queries",
];

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub plan: Plan,
    pub seed: u64,
    pub summary: SummaryStats,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the per-trial CSV (header always present).
pub fn write_trials_csv(results: &[TrialResult], path: &Path) -> Result<()> {
    let err = csv_err(path);
    let mut w = csv_writer(path)?;
    w.write_record(TRIAL_HEADER).map_err(&err)?;
    for r in results {
        w.write_record([
            r.trial.to_string(),
            r.target.clone(),
            opt(r.distance_lower_bound),
            r.decision.to_string(),
            r.queries_used.to_string(),
            r.notes.clone(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the trial CSV and, if requested, the JSON summary.
pub fn emit_results(
    config: &ExperimentConfig,
    plan: &Plan,
    results: &[TrialResult],
    summary: &SummaryStats,
    csv: &Path,
    json: Option<&Path>,
) -> Result<()> {
    write_trials_csv(results, csv)?;
    if let Some(json) = json {
        let doc = RunSummary {
            config: config.clone(),
            plan: plan.clone(),
            seed: plan.seed,
            summary: summary.clone(),
        };
        write_json(&doc, json)?;
    }
    Ok(())
}

/// Writes the sweep table to any CSV writer.
pub fn sweep_table<W: Write>(rows: &[SweepRow], param: &str, values: &[f64], w: &mut csv::Writer<W>) -> csv::Result<()> {
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    header.push("error");
    w.write_record(&header)?;
    for (row, value) in rows.iter().zip(values) {
        let s = row.stats.as_ref();
        let iv = s.and_then(|s| s.interval);
        let field = |f: &dyn Fn(&SummaryStats) -> String| s.map(f).unwrap_or_default();
        w.write_record([
            row.index.to_string(),
            row.config.tester.to_string(),
            param.to_string(),
            value.to_string(),
            field(&|s| s.trials.to_string()),
            field(&|s| s.accepted.to_string()),
            field(&|s| s.rejected.to_string()),
            field(&|s| s.inconclusive.to_string()),
            opt(s.and_then(|s| s.acceptance_rate)),
            opt(iv.map(|i| i.lo)),
            opt(iv.map(|i| i.hi)),
            field(&|s| s.mean_queries.to_string()),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(rows: &[SweepRow], param: &str, values: &[f64], path: &Path) -> Result<()> {
    sweep_table(rows, param, values, &mut csv_writer(path)?).map_err(csv_err(path))
}

/// Lower-bound table: the row's parameter columns, then `metric`,
/// `statistic`, `ci_lo`, `ci_hi`, `regime_label`.
pub fn lb_table<W: Write>(rows: &[LbRow], w: &mut csv::Writer<W>) -> csv::Result<()> {
    let mut header: Vec<String> = rows.first().map(|r| r.params.iter().map(|(k, _)| k.clone()).collect()).unwrap_or_default();
    header.extend(["metric", "statistic", "ci_lo", "ci_hi", "regime_label"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.params.iter().map(|(_, v)| v.clone()).collect();
        rec.extend([
            r.metric.clone(),
            r.statistic.to_string(),
            opt(r.ci_lo),
            opt(r.ci_hi),
            r.regime_label.clone(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_lb_csv(rows: &[LbRow], path: &Path) -> Result<()> {
    lb_table(rows, &mut csv_writer(path)?).map_err(csv_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::run_trials;

    #[test]
    fn empty_results_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trials_csv(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), TRIAL_HEADER.join(",") + "\n");
    }

    #[test]
    fn summary_round_trip_and_row_count() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            trials: 25,
            n: 8,
            ..Default::default()
        };
        let (plan, results, summary) = run_trials(&cfg).unwrap();
        let (csv, json) = (dir.path().join("out/r.csv"), dir.path().join("out/r.json"));
        emit_results(&cfg, &plan, &results, &summary, &csv, Some(&json)).unwrap();
        let back = read_summary(&json).unwrap();
        assert_eq!(back.summary, summary);
        assert_eq!(back.config, cfg);
        assert_eq!(back.plan, plan);
        let mut reader = csv::Reader::from_path(&csv).unwrap();
        assert_eq!(reader.records().count(), 25);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = write_trials_csv(&[], &blocker.join("sub.csv")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
