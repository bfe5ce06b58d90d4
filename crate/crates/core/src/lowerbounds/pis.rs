//! `pi_S(y)` for uniformly random k-linear functions, the threshold
//! criterion on it, and total variation distance.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sumset_distribution, sumset_y_count, AbelianGroup};
use crate::boolfn::{BitVector, Fraction};
use crate::error::{capacity, check_dim, invalid, Error, Result};
use crate::stats::{binomial, ln_binomial};

/// Largest query count `q` for the full distribution over `Z_2^q`.
pub const MAX_DISTRIBUTION_Q: usize = 24;

/// Columns of the `q x n` matrix whose rows are the query points, each as an
/// element of `Z_2^q` (bit `r` = row `r`).
fn columns(s: &[BitVector]) -> Result<(AbelianGroup, Vec<u64>)> {
    let q = s.len();
    let group = AbelianGroup::z2_power(q)?;
    let n = s.first().map_or(0, BitVector::len);
    let mut cols = vec![0u64; n];
    for (r, x) in s.iter().enumerate() {
        check_dim(n, x.len())?;
        for i in x.ones_iter() {
            cols[i] |= 1 << r;
        }
    }
    Ok((group, cols))
}

/// Probability that a uniformly random k-linear function on `Z_2^n` answers
/// the queries `s` with `y`: the fraction of k-sets of columns summing to
/// `y`.
pub fn pi_s(s: &[BitVector], y: &BitVector, k: usize) -> Result<Fraction> {
    let (group, cols) = columns(s)?;
    check_dim(s.len(), y.len())?;
    let n = cols.len();
    let total = binomial(n as u64, k as u64).filter(|&t| t > 0).ok_or_else(|| invalid(format!("no {k}-sets among {n} columns")))?;
    let count = sumset_y_count(&group, &cols, group.from_bitvector(y)?, k)?;
    Ok(Fraction::new(count, total))
}

/// Counts behind `pi_S(y)` for every `y` (index = `y` as a bitmask) and the
/// common denominator `C(n, k)`.
pub fn pi_s_counts(s: &[BitVector], k: usize) -> Result<(Vec<u128>, u128)> {
    if s.len() > MAX_DISTRIBUTION_Q {
        return Err(capacity(format!("pi_S distribution at q = {}", s.len()), MAX_DISTRIBUTION_Q as u64));
    }
    let (group, cols) = columns(s)?;
    let total = binomial(cols.len() as u64, k as u64).unwrap_or(0);
    if total == 0 {
        return Err(invalid(format!("no {k}-sets among {} columns", cols.len())));
    }
    Ok((sumset_distribution(&group, &cols, k)?, total))
}

/// `pi_S(y) >= (6/5) 2^-q`, decided exactly as `5 * count * 2^q >= 6 * C(n, k)`.
pub fn violates_threshold(count: u128, total: u128, q: usize) -> bool {
    5 * count * (1u128 << q) >= 6 * total
}

/// `(1 - 1/k) log2 C(n, k)`, the scale of `q` around which the criterion
/// starts failing.
pub fn criterion_transition(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (1.0 - 1.0 / k as f64) * ln_binomial(n as u64, k as u64) / std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma21Report {
    pub q: usize,
    pub k: usize,
    pub trials: usize,
    /// Fraction of examined `(S, y)` with `pi_S(y) >= (6/5) 2^-q`.
    pub violation_rate: f64,
    /// Fraction of sampled `S` with at least one violating `y`.
    pub violating_sets: f64,
    pub transition: f64,
}

/// Samples `trials` query sets `S` of `q` distinct pool points and checks the
/// threshold exactly for every `y` in `Z_2^q`.
pub fn lemma21_criterion<R: Rng + ?Sized>(
    pool: &[BitVector],
    q: usize,
    k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Lemma21Report> {
    if q > pool.len() {
        return Err(invalid(format!("q = {q} exceeds the pool size {}", pool.len())));
    }
    let n = pool.first().map_or(0, BitVector::len);
    let mut violations = 0u128;
    let mut bad_sets = 0usize;
    for _ in 0..trials {
        let s: Vec<BitVector> = sample(rng, pool.len(), q).into_iter().map(|i| pool[i].clone()).collect();
        let (counts, total) = pi_s_counts(&s, k)?;
        let v = counts.iter().filter(|&&c| violates_threshold(c, total, q)).count() as u128;
        violations += v;
        bad_sets += (v > 0) as usize;
    }
    let t = trials.max(1) as f64;
    Ok(Lemma21Report {
        q,
        k,
        trials,
        violation_rate: violations as f64 / (t * (1u128 << q) as f64),
        violating_sets: bad_sets as f64 / t,
        transition: criterion_transition(n, k),
    })
}

/// `(1/2) sum_i |p_i - u_i|`. Both inputs must be probability vectors
/// (non-negative, total mass within `1e-9` of one) of equal length.
pub fn tv_distance(p: &[f64], u: &[f64]) -> Result<f64> {
    check_dim(p.len(), u.len())?;
    for dist in [p, u] {
        let mass: f64 = dist.iter().sum();
        if (mass - 1.0).abs() > 1e-9 || dist.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::NotNormalized(mass));
        }
    }
    Ok(0.5 * p.iter().zip(u).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Total variation between the answers of a uniformly random k-linear
/// function on `s` and uniform answers on `Z_2^q`.
pub fn lin_k_output_tv(s: &[BitVector], k: usize) -> Result<f64> {
    let (counts, total) = pi_s_counts(s, k)?;
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let u = vec![1.0 / counts.len() as f64; counts.len()];
    tv_distance(&p, &u)
}

/// Probability that among `m` uniform points some two agree on a fixed set
/// of coordinates with `cells` possible assignments: `1 - prod_{i<m} (1 - i/cells)`.
pub fn agreeing_pair_probability(m: usize, cells: u64) -> f64 {
    1.0 - (0..m).map(|i| 1.0 - i as f64 / cells as f64).map(|f| f.max(0.0)).product::<f64>()
}
