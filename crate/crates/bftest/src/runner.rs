//! Seeded trial execution and aggregation.

use bftest_core::families::{far_function_generator, EpsilonNet};
use bftest_core::stats::{wilson_interval, Interval, Z95};
use bftest_core::testers::{
    active_linear_tester, blr_k_test, junta_passive_tester, learn_then_verify, passive_linear_tester,
    passive_polynomial_tester, psf_tester, symmetric_tester, tolerant_symmetric_tester, Decision, Learner,
    ModelKind, QueryOracle, Verdict, DEFAULT_SURPLUS,
};
use bftest_core::BooleanFunction;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Plan, TargetKind, TesterId};
use crate::error::{config_error, HarnessError, Result};

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    /// Descriptor of the target function.
    pub target: String,
    /// Certified distance lower bound for far targets.
    pub distance_lower_bound: Option<f64>,
    pub decision: Decision,
    pub queries_used: usize,
    pub notes: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub trials: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub inconclusive: usize,
    /// Accepts over decided (non-inconclusive) trials; `None` if none decided.
    pub acceptance_rate: Option<f64>,
    /// Wilson 95% interval for the acceptance rate.
    pub interval: Option<Interval>,
    pub mean_queries: f64,
}

impl SummaryStats {
    pub fn rejection_rate(&self) -> Option<f64> {
        self.acceptance_rate.map(|r| 1.0 - r)
    }

    /// Wilson 95% interval for the rejection rate.
    pub fn rejection_interval(&self) -> Option<Interval> {
        self.interval.map(|i| Interval {
            lo: 1.0 - i.hi,
            hi: 1.0 - i.lo,
        })
    }
}

/// RNG for trial `trial`: ChaCha8 keyed by the master seed, with the trial
/// index as the stream id. Draw `j` of the trial is word `j` of its stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Validates `config` and runs every trial, in parallel, returning results
/// ordered by trial index and their summary.
pub fn run_trials(config: &ExperimentConfig) -> Result<(Plan, Vec<TrialResult>, SummaryStats)> {
    let plan = config.resolve()?;
    let results = run_plan(&plan)?;
    let summary = summarize(&results)?;
    Ok((plan, results, summary))
}

/// Runs a resolved plan.
pub fn run_plan(plan: &Plan) -> Result<Vec<TrialResult>> {
    let net = plan.build_net()?;
    let fixed = match plan.target {
        TargetKind::Fixed => Some(plan.target_fn.as_deref().expect("validated").parse::<BooleanFunction>()?),
        _ => None,
    };
    let mut results = (0..plan.trials as u64)
        .into_par_iter()
        .map(|t| run_one(plan, net.as_ref(), fixed.as_ref(), t).map_err(|source| HarnessError::Trial { trial: t, source }))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by_key(|r| r.trial);
    Ok(results)
}

fn run_one(
    plan: &Plan,
    net: Option<&EpsilonNet>,
    fixed: Option<&BooleanFunction>,
    trial: u64,
) -> bftest_core::Result<TrialResult> {
    let mut rng = trial_rng(plan.seed, trial);
    let (target, bound) = match plan.target {
        TargetKind::Member => (plan.family.sample_uniform(&mut rng)?, None),
        TargetKind::Far => {
            let inst = far_function_generator(&plan.family, plan.epsilon, &mut rng)?;
            (inst.function, Some(inst.distance_lower_bound))
        }
        TargetKind::Fixed => (fixed.expect("fixed target").clone(), None),
    };
    let descriptor = target.to_string();
    let mut oracle = match plan.model {
        ModelKind::Classic => QueryOracle::classic(target, plan.budget),
        ModelKind::Active => QueryOracle::active(target, plan.u, plan.budget, &mut rng),
        ModelKind::Passive => QueryOracle::passive(target, plan.budget, &mut rng),
    };
    let verdict: Verdict = match plan.tester {
        TesterId::Blr => blr_k_test(&mut oracle, plan.k, plan.repetitions, &mut rng)?,
        TesterId::ActiveLinear => active_linear_tester(&mut oracle, plan.repetitions, &mut rng)?,
        TesterId::PassiveLinear => passive_linear_tester(&mut oracle, plan.q)?,
        TesterId::PassivePoly => passive_polynomial_tester(&mut oracle, plan.d, plan.q, DEFAULT_SURPLUS)?,
        TesterId::Symmetric => symmetric_tester(&mut oracle, plan.q, &mut rng)?,
        TesterId::TolerantSymmetric => {
            tolerant_symmetric_tester(&mut oracle, plan.q, plan.epsilon_lo, plan.epsilon, &mut rng)?
        }
        TesterId::Psf => psf_tester(&mut oracle, plan.k, plan.epsilon, &mut rng)?,
        TesterId::Junta => junta_passive_tester(&mut oracle, plan.k, plan.epsilon)?,
        TesterId::LearnVerify => {
            let learner = net.map_or(Learner::Consistent, Learner::Net);
            learn_then_verify(&plan.family, &mut oracle, learner, plan.epsilon)?
        }
    };
    Ok(TrialResult {
        trial,
        target: descriptor,
        distance_lower_bound: bound,
        decision: verdict.decision,
        queries_used: verdict.queries_used,
        notes: verdict.diagnostics.join("; "),
    })
}

/// Counts, acceptance rate over decided trials with its Wilson interval, and
/// mean queries over all trials.
pub fn summarize(results: &[TrialResult]) -> Result<SummaryStats> {
    if results.is_empty() {
        return Err(config_error("cannot summarize an empty trial list"));
    }
    let count = |d: Decision| results.iter().filter(|r| r.decision == d).count();
    let (accepted, rejected, inconclusive) = (count(Decision::Accept), count(Decision::Reject), count(Decision::Inconclusive));
    let decided = accepted + rejected;
    let (acceptance_rate, interval) = if decided == 0 {
        (None, None)
    } else {
        (
            Some(accepted as f64 / decided as f64),
            Some(wilson_interval(accepted as u64, decided as u64, Z95)),
        )
    };
    Ok(SummaryStats {
        trials: results.len(),
        accepted,
        rejected,
        inconclusive,
        acceptance_rate,
        interval,
        mean_queries: results.iter().map(|r| r.queries_used as f64).sum::<f64>() / results.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn fake(decisions: &[Decision]) -> Vec<TrialResult> {
        decisions
            .iter()
            .enumerate()
            .map(|(i, &decision)| TrialResult {
                trial: i as u64,
                target: String::new(),
                distance_lower_bound: None,
                decision,
                queries_used: i,
                notes: String::new(),
            })
            .collect()
    }

    /// Textbook Wilson score interval.
    fn wilson(s: f64, n: f64, z: f64) -> (f64, f64) {
        let p = s / n;
        let c = p + z * z / (2.0 * n);
        let r = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
        let den = 1.0 + z * z / n;
        ((c - r) / den, (c + r) / den)
    }

    #[test]
    fn summary_examples() {
        let none = summarize(&fake(&[Decision::Reject; 10])).unwrap();
        assert_eq!(none.acceptance_rate, Some(0.0));
        assert_eq!(none.interval.unwrap().lo, 0.0);
        let all = summarize(&fake(&[Decision::Accept; 10])).unwrap();
        assert_eq!(all.interval.unwrap().hi, 1.0);
        let mut d = vec![Decision::Accept; 75];
        d.extend([Decision::Reject; 25]);
        d.extend([Decision::Inconclusive; 7]);
        let s = summarize(&fake(&d)).unwrap();
        assert_eq!((s.accepted, s.rejected, s.inconclusive, s.trials), (75, 25, 7, 107));
        let (lo, hi) = wilson(75.0, 100.0, 1.96);
        let iv = s.interval.unwrap();
        assert!((iv.lo - lo).abs() < 1e-4 && (iv.hi - hi).abs() < 1e-4);
        assert!(iv.contains(s.acceptance_rate.unwrap()));
        assert!(summarize(&[]).is_err());
        assert_eq!(summarize(&fake(&[Decision::Inconclusive])).unwrap().acceptance_rate, None);
    }

    #[test]
    fn trial_streams_are_distinct_and_stable() {
        let a: Vec<u64> = (0..4).map(|t| trial_rng(7, t).next_u64()).collect();
        let b: Vec<u64> = (0..4).map(|t| trial_rng(7, t).next_u64()).collect();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert_ne!(trial_rng(8, 0).next_u64(), a[0]);
    }

    #[test]
    fn blr_on_linear_targets() {
        let cfg = ExperimentConfig {
            trials: 100,
            n: 10,
            ..Default::default()
        };
        let (_, results, s) = run_trials(&cfg).unwrap();
        assert_eq!(results.len(), 100);
        assert!(results.windows(2).all(|w| w[0].trial < w[1].trial));
        assert_eq!(s.acceptance_rate, Some(1.0));
        let iv = s.interval.unwrap();
        assert!((iv.lo - 0.963).abs() < 5e-4 && iv.hi == 1.0, "{iv:?}");
        assert_eq!(s.mean_queries, 30.0);
    }
}
