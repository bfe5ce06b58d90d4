//! Drivers for the lower-bound experiments, each producing table rows.

use std::collections::BTreeSet;

use bftest_core::lowerbounds::{
    cayley_mixing_experiment, default_generator_count, erdos_rado_threshold, find_delta_system, lemma21_criterion,
    pi_s, sumset_concentration_experiment, verify_delta_system, AbelianGroup,
};
use bftest_core::stats::{binomial, wilson_interval, Z95};
use bftest_core::{boolfn::fraction_to_f64, BitVector};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_error, Result};
use crate::runner::trial_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LbRow {
    pub params: Vec<(String, String)>,
    pub metric: String,
    pub statistic: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub regime_label: String,
}

fn params(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn normal_row(p: Vec<(String, String)>, metric: &str, mean: f64, se: f64, label: &str) -> LbRow {
    LbRow {
        params: p,
        metric: metric.into(),
        statistic: mean,
        ci_lo: Some(mean - Z95 * se),
        ci_hi: Some(mean + Z95 * se),
        regime_label: label.into(),
    }
}

/// Mean and standard error of `pi_S(y)` over `samples` independent uniform
/// query sets `S` of `q` points and uniform `y`.
pub fn pi_mean<R: Rng + ?Sized>(n: usize, k: usize, q: usize, samples: usize, rng: &mut R) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(config_error("samples must be at least 1"));
    }
    let values = (0..samples)
        .map(|_| {
            let s: Vec<BitVector> = (0..q).map(|_| BitVector::random(n, rng)).collect();
            Ok(fraction_to_f64(&pi_s(&s, &BitVector::random(q, rng), k)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_and_se(&values))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PisyParams {
    pub n: usize,
    pub k: usize,
    pub q_values: Vec<usize>,
    /// Pool the query sets are drawn from.
    pub pool: usize,
    pub trials: usize,
    /// Random `(S, y)` for the mean of `pi_S(y)`.
    pub samples: usize,
    pub seed: u64,
}

/// For each `q`: mean of `pi_S(y)`, the threshold violation rate over
/// `(S, y)` and the fraction of sets `S` with a violation. The regime label
/// places `q` relative to `(1 - 1/k) log2 C(n, k)`.
pub fn pisy(p: &PisyParams) -> Result<Vec<LbRow>> {
    let mut rows = Vec::new();
    let mut pool_rng = trial_rng(p.seed, u64::MAX);
    let pool: Vec<BitVector> = (0..p.pool).map(|_| BitVector::random(p.n, &mut pool_rng)).collect();
    for &q in &p.q_values {
        let mut rng = trial_rng(p.seed, q as u64);
        let report = lemma21_criterion(&pool, q, p.k, p.trials, &mut rng)?;
        let label = if (q as f64) < report.transition { "below_transition" } else { "above_transition" };
        let ps = params(&[
            ("n", p.n.to_string()),
            ("k", p.k.to_string()),
            ("q", q.to_string()),
            ("transition", format!("{:.4}", report.transition)),
        ]);
        let (mean, se) = pi_mean(p.n, p.k, q, p.samples, &mut rng)?;
        rows.push(normal_row(ps.clone(), "mean_pi", mean, se, label));
        let cells = (p.trials as u64) << q;
        let hits = (report.violation_rate * cells as f64).round() as u64;
        let iv = wilson_interval(hits, cells, Z95);
        rows.push(LbRow {
            params: ps.clone(),
            metric: "violation_rate".into(),
            statistic: report.violation_rate,
            ci_lo: Some(iv.lo),
            ci_hi: Some(iv.hi),
            regime_label: label.into(),
        });
        let sets = (report.violating_sets * p.trials as f64).round() as u64;
        let iv = wilson_interval(sets, p.trials as u64, Z95);
        rows.push(LbRow {
            params: ps,
            metric: "violating_sets".into(),
            statistic: report.violating_sets,
            ci_lo: Some(iv.lo),
            ci_hi: Some(iv.hi),
            regime_label: label.into(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumsetParams {
    pub group: AbelianGroup,
    pub n_values: Vec<usize>,
    pub k: usize,
    pub target: u64,
    pub lambda: f64,
    pub trials: usize,
    pub seed: u64,
}

/// For each `n`: mean and variance of `Y`, and the rate of
/// `|Y - E[Y]| > E[Y] / 5`, labelled with the regime conditions.
pub fn sumset(p: &SumsetParams) -> Result<Vec<LbRow>> {
    let mut rows = Vec::new();
    for &n in &p.n_values {
        let mut rng = trial_rng(p.seed, n as u64);
        let r = sumset_concentration_experiment(&p.group, n, p.k, p.target, p.lambda, p.trials, &mut rng)?;
        let label = r.regime.label();
        let ps = params(&[
            ("group", p.group.to_string()),
            ("n", n.to_string()),
            ("k", p.k.to_string()),
            ("lambda", p.lambda.to_string()),
            ("expected", r.expected.to_string()),
        ]);
        let se = (r.variance / r.trials as f64).sqrt();
        rows.push(normal_row(ps.clone(), "mean_y", r.mean, se, &label));
        rows.push(LbRow {
            params: ps.clone(),
            metric: "variance_y".into(),
            statistic: r.variance,
            ci_lo: None,
            ci_hi: None,
            regime_label: label.clone(),
        });
        rows.push(LbRow {
            params: ps,
            metric: "tail_rate".into(),
            statistic: r.tail_rate,
            ci_lo: Some(r.tail_interval.lo),
            ci_hi: Some(r.tail_interval.hi),
            regime_label: label,
        });
    }
    Ok(rows)
}

/// Outcome counts over random families of distinct `b`-sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SunflowerOutcome {
    pub families: usize,
    pub found: usize,
    /// Found systems that passed verification and lie in the family.
    pub verified: usize,
}

/// Smallest universe `m >= a b` with `C(m, b) >= 2 size`.
pub fn sunflower_universe(a: usize, b: usize, size: usize) -> usize {
    let mut m = (a * b).max(b).max(1);
    while binomial(m as u64, b as u64).unwrap_or(u128::MAX) < 2 * size as u128 {
        m += 1;
    }
    m
}

/// `size` distinct uniformly random `b`-subsets of `0..m`.
pub fn random_family<R: Rng + ?Sized>(m: usize, b: usize, size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let mut s = sample(rng, m, b).into_vec();
        s.sort_unstable();
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// Searches `families` random families of `size` distinct `b`-sets for a
/// Delta-system of size `a`.
pub fn sunflower_trials<R: Rng + ?Sized>(
    a: usize,
    b: usize,
    size: usize,
    families: usize,
    rng: &mut R,
) -> Result<SunflowerOutcome> {
    let m = sunflower_universe(a, b, size);
    let mut out = SunflowerOutcome {
        families,
        found: 0,
        verified: 0,
    };
    for _ in 0..families {
        let family = random_family(m, b, size, rng);
        if let Some(d) = find_delta_system(&family, a)? {
            out.found += 1;
            if d.sets.len() == a && verify_delta_system(&d) && d.sets.iter().all(|s| family.contains(s)) {
                out.verified += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SunflowerParams {
    pub a_values: Vec<usize>,
    pub b_values: Vec<usize>,
    /// Family size as a multiple of the threshold (1.0 = at threshold).
    pub size_factor: f64,
    pub families: usize,
    pub seed: u64,
}

/// Found and verified rates per `(a, b)`.
pub fn sunflower(p: &SunflowerParams) -> Result<Vec<LbRow>> {
    let mut rows = Vec::new();
    for &a in &p.a_values {
        for &b in &p.b_values {
            if a < 2 || b < 1 {
                return Err(config_error("sunflower needs a >= 2 and b >= 1"));
            }
            let threshold = erdos_rado_threshold(a, b);
            let size = ((threshold as f64 * p.size_factor).round() as usize).max(1);
            let label = match (size as u128).cmp(&threshold) {
                std::cmp::Ordering::Less => "below_threshold",
                std::cmp::Ordering::Equal => "at_threshold",
                std::cmp::Ordering::Greater => "above_threshold",
            };
            let mut rng = trial_rng(p.seed, ((a as u64) << 32) | b as u64);
            let o = sunflower_trials(a, b, size, p.families, &mut rng)?;
            let ps = params(&[
                ("a", a.to_string()),
                ("b", b.to_string()),
                ("size", size.to_string()),
                ("threshold", threshold.to_string()),
            ]);
            for (metric, hits) in [("found_rate", o.found), ("verified_rate", o.verified)] {
                let iv = wilson_interval(hits as u64, o.families as u64, Z95);
                rows.push(LbRow {
                    params: ps.clone(),
                    metric: metric.into(),
                    statistic: hits as f64 / o.families.max(1) as f64,
                    ci_lo: Some(iv.lo),
                    ci_hi: Some(iv.hi),
                    regime_label: label.into(),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CayleyParams {
    pub group: AbelianGroup,
    pub k: usize,
    /// Generator count; `None` uses `round(N^(1/(k-1)))`.
    pub d: Option<usize>,
    pub draws: usize,
    pub seed: u64,
}

/// Mean TV to uniform after `k - 1` and `k` steps.
pub fn cayley(p: &CayleyParams) -> Result<Vec<LbRow>> {
    let default_d = default_generator_count(p.group.order(), p.k);
    let d = p.d.unwrap_or(default_d);
    let mut rng = trial_rng(p.seed, 0);
    let r = cayley_mixing_experiment(&p.group, d, p.k, p.draws, &mut rng)?;
    let label = if d == default_d { "d=N^(1/(k-1))" } else { "custom_d" };
    let ps = params(&[
        ("group", p.group.to_string()),
        ("k", p.k.to_string()),
        ("d", d.to_string()),
        ("draws", p.draws.to_string()),
    ]);
    let before: Vec<f64> = r.per_draw.iter().map(|x| x.0).collect();
    let at: Vec<f64> = r.per_draw.iter().map(|x| x.1).collect();
    let (m0, s0) = mean_and_se(&before);
    let (m1, s1) = mean_and_se(&at);
    Ok(vec![
        normal_row(ps.clone(), "tv_k_minus_1", m0, s0, label),
        normal_row(ps, "tv_k", m1, s1, label),
    ])
}
