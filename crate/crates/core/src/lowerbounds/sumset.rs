//! Counts of k-subsets of a sequence summing to a target, and the
//! concentration experiment on those counts.

use std::collections::HashMap;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AbelianGroup;
use crate::error::{capacity, Result};
use crate::stats::{binomial, ln_binomial, wilson_interval, Interval, Z95};

/// Largest number of k-subsets enumerated directly.
pub const MAX_ENUMERATED_SUBSETS: u128 = 100_000_000;
/// Largest pair-sum table built for `k = 3, 4`.
const MAX_PAIR_TABLE: usize = 1 << 24;
/// Largest `n * k * |G|` for the dynamic program.
const MAX_DP_WORK: u128 = 4_000_000_000;
/// Largest group for the full distribution.
const MAX_DISTRIBUTION_ORDER: u64 = 1 << 24;

fn check_elements(group: &AbelianGroup, xs: &[u64]) -> Result<()> {
    xs.iter().try_for_each(|&x| group.check(x))
}

/// Number of index sets `I` with `|I| = k` and `sum_{i in I} x_i = y`.
///
/// Exact for every input within capacity: hashing for `k <= 2`, pair-sum
/// tables for `k = 3, 4`, otherwise a dynamic program over the group or
/// plain enumeration.
pub fn sumset_y_count(group: &AbelianGroup, xs: &[u64], y: u64, k: usize) -> Result<u128> {
    check_elements(group, xs)?;
    group.check(y)?;
    let n = xs.len();
    if k > n {
        return Ok(0);
    }
    let count = match k {
        0 => (y == group.identity()) as u128,
        1 => xs.iter().filter(|&&x| x == y).count() as u128,
        2 => {
            let mut seen: HashMap<u64, u128> = HashMap::new();
            let mut count = 0;
            for &x in xs {
                count += seen.get(&group.sub(y, x)).copied().unwrap_or(0);
                *seen.entry(x).or_insert(0) += 1;
            }
            count
        }
        3 | 4 if n * (n - 1) / 2 <= MAX_PAIR_TABLE => pair_table_count(group, xs, y, k),
        _ => {
            let order = group.order() as u128;
            if order <= MAX_DISTRIBUTION_ORDER as u128 && n as u128 * k as u128 * order <= MAX_DP_WORK {
                subset_sum_dp(group, xs, k)[y as usize]
            } else if binomial(n as u64, k as u64).is_some_and(|c| c <= MAX_ENUMERATED_SUBSETS) {
                enumerate_count(group, xs, y, k)
            } else {
                return Err(capacity(
                    format!("k-subset sums for n = {n}, k = {k}"),
                    MAX_ENUMERATED_SUBSETS as u64,
                ));
            }
        }
    };
    Ok(count)
}

/// `k = 3`: for each last index `c`, look up `y - x_c` among pair sums with
/// both indices below `c`. `k = 4`: for each third index `l` and fourth
/// index `m > l`, look up `y - x_l - x_m` among pair sums below `l`.
fn pair_table_count(group: &AbelianGroup, xs: &[u64], y: u64, k: usize) -> u128 {
    let n = xs.len();
    let mut pairs: HashMap<u64, u128> = HashMap::new();
    let mut count = 0u128;
    for l in 0..n {
        if k == 3 {
            count += pairs.get(&group.sub(y, xs[l])).copied().unwrap_or(0);
        } else {
            for m in l + 1..n {
                let need = group.sub(group.sub(y, xs[l]), xs[m]);
                count += pairs.get(&need).copied().unwrap_or(0);
            }
        }
        for i in 0..l {
            *pairs.entry(group.add(xs[i], xs[l])).or_insert(0) += 1;
        }
    }
    count
}

fn enumerate_count(group: &AbelianGroup, xs: &[u64], y: u64, k: usize) -> u128 {
    xs.iter()
        .combinations(k)
        .filter(|c| c.iter().fold(group.identity(), |s, &&x| group.add(s, x)) == y)
        .count() as u128
}

/// `dp[g]` = number of k-subsets summing to `g`.
fn subset_sum_dp(group: &AbelianGroup, xs: &[u64], k: usize) -> Vec<u128> {
    let order = group.order() as usize;
    let mut dp = vec![vec![0u128; order]; k + 1];
    dp[0][group.identity() as usize] = 1;
    for (i, &x) in xs.iter().enumerate() {
        for c in (1..=k.min(i + 1)).rev() {
            let (lo, hi) = dp.split_at_mut(c);
            let prev = &lo[c - 1];
            let cur = &mut hi[0];
            for g in 0..order {
                if prev[g] != 0 {
                    cur[group.add(g as u64, x) as usize] += prev[g];
                }
            }
        }
    }
    dp.swap_remove(k)
}

/// Counts for every target `y`, indexed by element encoding.
pub fn sumset_distribution(group: &AbelianGroup, xs: &[u64], k: usize) -> Result<Vec<u128>> {
    check_elements(group, xs)?;
    let order = group.order();
    if order > MAX_DISTRIBUTION_ORDER {
        return Err(capacity(format!("sum distribution over a group of order {order}"), MAX_DISTRIBUTION_ORDER));
    }
    let n = xs.len();
    let subsets = binomial(n as u64, k as u64).unwrap_or(u128::MAX);
    let dp_work = n as u128 * k as u128 * order as u128;
    if subsets <= dp_work && subsets <= MAX_ENUMERATED_SUBSETS {
        let mut out = vec![0u128; order as usize];
        for c in xs.iter().combinations(k) {
            out[c.iter().fold(group.identity(), |s, &&x| group.add(s, x)) as usize] += 1;
        }
        return Ok(out);
    }
    if dp_work > MAX_DP_WORK {
        return Err(capacity(format!("sum distribution for n = {n}, k = {k}"), MAX_DP_WORK as u64));
    }
    Ok(subset_sum_dp(group, xs, k))
}

/// One exact statistic `Y` with its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumsetStatistic {
    pub group: AbelianGroup,
    pub sequence: Vec<u64>,
    pub target: u64,
    pub k: usize,
    pub count: u128,
}

impl SumsetStatistic {
    pub fn compute(group: AbelianGroup, sequence: Vec<u64>, target: u64, k: usize) -> Result<Self> {
        let count = sumset_y_count(&group, &sequence, target, k)?;
        Ok(Self {
            group,
            sequence,
            target,
            k,
            count,
        })
    }
}

/// Which of the two sufficient conditions of the concentration lemma hold
/// for given `(n, k, N, lambda)`:
/// (a) `C(n, k) >= 800 ln 2 * k N lambda^(2k + 1)`;
/// (b) `C(n, k - 1) <= lambda N / (k 2^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub condition_a: bool,
    pub condition_b: bool,
}

impl Regime {
    pub fn evaluate(n: usize, k: usize, order: u64, lambda: f64) -> Self {
        let (n64, k64, nn) = (n as u64, k as u64, order as f64);
        let ln_a_rhs = (800.0 * std::f64::consts::LN_2 * k as f64 * nn).ln() + (2 * k + 1) as f64 * lambda.ln();
        let condition_a = ln_binomial(n64, k64) >= ln_a_rhs;
        let condition_b = k == 0
            || ln_binomial(n64, k64 - 1) <= (lambda * nn / (k as f64 * (k as f64).exp2())).ln();
        Self {
            condition_a,
            condition_b,
        }
    }

    pub fn in_regime(&self) -> bool {
        self.condition_a && self.condition_b
    }

    /// `in_regime`, or `outside(a)`, `outside(b)`, `outside(a,b)`.
    pub fn label(&self) -> String {
        match (self.condition_a, self.condition_b) {
            (true, true) => "in_regime".into(),
            (false, true) => "outside(a)".into(),
            (true, false) => "outside(b)".into(),
            (false, false) => "outside(a,b)".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumsetReport {
    pub group: AbelianGroup,
    pub n: usize,
    pub k: usize,
    pub target: u64,
    pub lambda: f64,
    pub trials: usize,
    /// `C(n, k) / N`.
    pub expected: f64,
    pub mean: f64,
    pub variance: f64,
    /// Trials with `|Y - E[Y]| > E[Y] / 5`.
    pub tail_count: usize,
    pub tail_rate: f64,
    pub tail_interval: Interval,
    pub regime: Regime,
}

/// Draws `trials` uniform sequences of `n` group elements and records `Y`
/// for the fixed target.
pub fn sumset_concentration_experiment<R: Rng + ?Sized>(
    group: &AbelianGroup,
    n: usize,
    k: usize,
    target: u64,
    lambda: f64,
    trials: usize,
    rng: &mut R,
) -> Result<SumsetReport> {
    group.check(target)?;
    let total = binomial(n as u64, k as u64).ok_or_else(|| capacity("C(n, k)", u64::MAX))?;
    let order = group.order() as u128;
    let mut sum = 0f64;
    let mut sum_sq = 0f64;
    let mut tail_count = 0;
    let mut xs = vec![0u64; n];
    for _ in 0..trials {
        for x in xs.iter_mut() {
            *x = group.random(rng);
        }
        let y = sumset_y_count(group, &xs, target, k)?;
        // |Y - C/N| > C / (5N)  <=>  5 |Y N - C| > C
        let dev = (y * order).abs_diff(total);
        if 5 * dev > total {
            tail_count += 1;
        }
        sum += y as f64;
        sum_sq += (y as f64).powi(2);
    }
    let t = trials.max(1) as f64;
    let mean = sum / t;
    let variance = if trials > 1 { (sum_sq - t * mean * mean) / (t - 1.0) } else { 0.0 };
    Ok(SumsetReport {
        group: *group,
        n,
        k,
        target,
        lambda,
        trials,
        expected: total as f64 / order as f64,
        mean,
        variance,
        tail_count,
        tail_rate: tail_count as f64 / t,
        tail_interval: wilson_interval(tail_count as u64, trials as u64, Z95),
        regime: Regime::evaluate(n, k, group.order(), lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::binomial_pmf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Subset enumeration by bitmask, independent of the production paths.
    fn naive(group: &AbelianGroup, xs: &[u64], y: u64, k: usize) -> u128 {
        (0u64..1 << xs.len())
            .filter(|m| m.count_ones() as usize == k)
            .filter(|m| {
                (0..xs.len())
                    .filter(|i| m >> i & 1 == 1)
                    .fold(0, |s, i| group.add(s, xs[i]))
                    == y
            })
            .count() as u128
    }

    #[test]
    fn small_examples() {
        let z2 = AbelianGroup::z2_power(1).unwrap();
        assert_eq!(sumset_y_count(&z2, &[0, 0, 1, 1], 0, 2).unwrap(), 2);
        let z5 = AbelianGroup::cyclic(5).unwrap();
        assert_eq!(sumset_y_count(&z5, &[1, 3, 1, 4], 1, 1).unwrap(), 2);
        assert_eq!(sumset_y_count(&z5, &[1, 3], 0, 0).unwrap(), 1);
        assert_eq!(sumset_y_count(&z5, &[1, 3], 0, 3).unwrap(), 0);
        assert!(sumset_y_count(&z5, &[7], 0, 1).is_err());
    }

    #[test]
    fn all_paths_match_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..300 {
            let group = if rng.gen_bool(0.5) {
                AbelianGroup::z2_power(rng.gen_range(1..6)).unwrap()
            } else {
                AbelianGroup::cyclic(rng.gen_range(1..40)).unwrap()
            };
            let n = rng.gen_range(0..=14);
            let xs: Vec<u64> = (0..n).map(|_| group.random(&mut rng)).collect();
            let y = group.random(&mut rng);
            let k = rng.gen_range(0..=6);
            let expected = naive(&group, &xs, y, k);
            assert_eq!(sumset_y_count(&group, &xs, y, k).unwrap(), expected);
            assert_eq!(enumerate_count(&group, &xs, y, k), expected);
            if k <= n {
                assert_eq!(subset_sum_dp(&group, &xs, k)[y as usize], expected);
            }
            let dist = sumset_distribution(&group, &xs, k).unwrap();
            assert_eq!(dist[y as usize], expected);
            assert_eq!(dist.iter().sum::<u128>(), binomial(n as u64, k as u64).unwrap());
        }
    }

    #[test]
    fn large_instances_within_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let g = AbelianGroup::cyclic(1_000_003).unwrap();
        let xs: Vec<u64> = (0..1000).map(|_| g.random(&mut rng)).collect();
        let total: u128 = (0..20).map(|y| sumset_y_count(&g, &xs, y, 4).unwrap()).sum();
        assert!(total > 0);
        let small = AbelianGroup::z2_power(3).unwrap();
        let ys: Vec<u64> = (0..60).map(|_| small.random(&mut rng)).collect();
        let by_dp: u128 = small.elements().map(|y| sumset_y_count(&small, &ys, y, 6).unwrap()).sum();
        assert_eq!(by_dp, binomial(60, 6).unwrap());
    }

    #[test]
    fn regime_labels() {
        assert_eq!(Regime::evaluate(24, 1, 16, 1.0).label(), "outside(a)");
        assert_eq!(Regime::evaluate(24, 2, 16, 1.0).label(), "outside(a,b)");
        assert!(Regime::evaluate(100_000, 1, 2, 1.0).condition_a);
        assert_eq!(Regime::evaluate(10, 2, 2, 1.0).label(), "outside(a,b)");
    }

    #[test]
    fn variance_matches_pairwise_independence() {
        // Distinct k-sets give pairwise independent uniform sums, so
        // Var(Y) = E[Y] (1 - 1/N).
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        for (q, n, k) in [(4usize, 24usize, 2usize), (1, 40, 1), (3, 12, 3)] {
            let g = AbelianGroup::z2_power(q).unwrap();
            let r = sumset_concentration_experiment(&g, n, k, 0, 1.0, 20_000, &mut rng).unwrap();
            let var = r.expected * (1.0 - 1.0 / g.order() as f64);
            assert!((r.variance / var - 1.0).abs() < 0.06, "{r:?}");
            assert!(r.tail_interval.contains(r.tail_rate));
        }
    }

    #[test]
    fn k1_tail_matches_binomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(94);
        let g = AbelianGroup::z2_power(1).unwrap();
        let r = sumset_concentration_experiment(&g, 100, 1, 0, 1.0, 20_000, &mut rng).unwrap();
        let exact: f64 = (0..=100u64)
            .filter(|&y| 5 * (2 * y).abs_diff(100) > 100)
            .map(|y| binomial_pmf(100, y, 0.5))
            .sum();
        let sigma = (exact * (1.0 - exact) / 20_000.0).sqrt();
        assert!((r.tail_rate - exact).abs() <= 3.0 * sigma, "{} vs {exact}", r.tail_rate);
    }
}
