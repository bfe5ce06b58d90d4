//! Parameter sweeps over a shared tester.

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, TargetKind};
use crate::error::{config_error, Result};
use crate::runner::{run_trials, SummaryStats};

/// A base configuration and one parameter varied over `values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    pub param: String,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        self.values
            .iter()
            .map(|&v| {
                let mut cfg = self.base.clone();
                cfg.set_param(&self.param, v)?;
                Ok(cfg)
            })
            .collect()
    }
}

/// One grid point. Exactly one of `stats` and `error` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub config: ExperimentConfig,
    pub stats: Option<SummaryStats>,
    pub error: Option<String>,
}

/// Runs each configuration in grid order. Per-point failures become row
/// errors; configurations must share one tester.
pub fn sweep(grid: &[ExperimentConfig]) -> Result<Vec<SweepRow>> {
    if let Some(first) = grid.first() {
        if let Some(other) = grid.iter().find(|c| c.tester != first.tester) {
            return Err(config_error(format!("sweep mixes testers {} and {}", first.tester, other.tester)));
        }
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(index, cfg)| {
            let (stats, error) = match run_trials(cfg) {
                Ok((_, _, s)) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow {
                index,
                config: cfg.clone(),
                stats,
                error,
            }
        })
        .collect())
}

/// Success of a tester at one grid point: acceptance on members and
/// rejection on far targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub value: f64,
    pub member: SummaryStats,
    pub far: SummaryStats,
    /// `min(member acceptance, far rejection)`, inconclusive counted as failure.
    pub success: f64,
    /// Mean queries over member and far trials together.
    pub mean_queries: f64,
}

/// Sweeps `spec` on member and on far targets.
pub fn success_sweep(spec: &SweepSpec) -> Result<Vec<SuccessRow>> {
    let mut rows = Vec::new();
    for (cfg, &value) in spec.configs()?.into_iter().zip(&spec.values) {
        let run = |target| {
            let c = ExperimentConfig { target, ..cfg.clone() };
            run_trials(&c).map(|r| r.2)
        };
        let member = run(TargetKind::Member)?;
        let far = run(TargetKind::Far)?;
        let success = (member.accepted as f64 / member.trials as f64).min(far.rejected as f64 / far.trials as f64);
        let mean_queries = (member.mean_queries * member.trials as f64 + far.mean_queries * far.trials as f64)
            / (member.trials + far.trials) as f64;
        rows.push(SuccessRow {
            value,
            member,
            far,
            success,
            mean_queries,
        });
    }
    Ok(rows)
}

/// Smallest mean query count among rows with success at least `threshold`.
pub fn minimal_queries(rows: &[SuccessRow], threshold: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.success >= threshold)
        .map(|r| r.mean_queries)
        .min_by(f64::total_cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TesterId;

    #[test]
    fn empty_grid_gives_empty_table() {
        assert!(sweep(&[]).unwrap().is_empty());
    }

    #[test]
    fn rows_follow_grid_order_with_errors_marked() {
        let spec = SweepSpec {
            base: ExperimentConfig {
                tester: TesterId::PassiveLinear,
                n: 8,
                trials: 20,
                ..Default::default()
            },
            param: "q".into(),
            values: vec![12.0, 0.0, 4.0],
        };
        let rows = sweep(&spec.configs().unwrap()).unwrap();
        assert_eq!(rows.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(rows[0].config.q, Some(12));
        assert!(rows[0].stats.is_some());
        assert!(rows[1].error.is_some() && rows[1].stats.is_none());
        let mixed = vec![ExperimentConfig::default(), spec.base.clone()];
        assert!(sweep(&mixed).is_err());
    }
}
